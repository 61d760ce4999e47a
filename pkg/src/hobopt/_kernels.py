"""Jitted inner loops: batch energy evaluation and Metropolis chains.

Terms are passed in CSR layout (indptr into a flat variable-index array,
plus a parallel coefficient array), always in canonical term order so that
float64 accumulation happens in the same sequence everywhere.

Each chain owns a splitmix64 stream derived from (seed, chain index), so
running chains in parallel or serially produces identical results.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit, prange

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U63 = np.uint64(63)
_U11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53


@njit(inline="always")
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@njit(inline="always")
def _next(state):
    state = state + _GOLDEN
    return state, _mix64(state)


@njit(cache=True, parallel=True)
def batch_energy_f64(t_indptr, t_vars, t_coeffs, rows):
    """Offset-free energies of 0/1 rows, accumulated in canonical term order."""
    n_rows = rows.shape[0]
    n_terms = t_coeffs.size
    out = np.empty(n_rows, np.float64)
    for r in prange(n_rows):
        acc = 0.0
        for t in range(n_terms):
            active = True
            for k in range(t_indptr[t], t_indptr[t + 1]):
                if rows[r, t_vars[k]] == 0:
                    active = False
                    break
            if active:
                acc += t_coeffs[t]
        out[r] = acc
    return out


@njit(cache=True, parallel=True)
def anneal_general(nvars, t_indptr, t_vars, t_coeffs,
                   v_indptr, v_terms, temps, shots, seed):
    """Metropolis single-bit-flip chains for a model of any degree.

    Per chain: random initial bits, then for each sweep visit every variable
    once in a fresh random order, flipping with the Metropolis rule at that
    sweep's temperature.  A per-term count of zero bits makes each proposal
    O(terms touching the variable).
    """
    n_terms = t_coeffs.size
    n_sweeps = temps.size
    out = np.empty((shots, nvars), np.uint8)
    for c in prange(shots):
        state = _mix64(seed + np.uint64(c + 1) * _GOLDEN)
        bits = np.empty(nvars, np.uint8)
        for v in range(nvars):
            state, z = _next(state)
            bits[v] = np.uint8(z >> _U63)
        zero_count = np.empty(n_terms, np.int8)
        for t in range(n_terms):
            zc = 0
            for k in range(t_indptr[t], t_indptr[t + 1]):
                if bits[t_vars[k]] == 0:
                    zc += 1
            zero_count[t] = zc
        perm = np.arange(nvars)
        for s in range(n_sweeps):
            temperature = temps[s]
            for i in range(nvars - 1, 0, -1):
                state, z = _next(state)
                j = z % np.uint64(i + 1)
                tmp = perm[i]
                perm[i] = perm[j]
                perm[j] = tmp
            for i in range(nvars):
                v = perm[i]
                b = bits[v]
                delta = 0.0
                if b == 1:
                    # Flipping 1 -> 0 deactivates terms that are fully set.
                    for k in range(v_indptr[v], v_indptr[v + 1]):
                        t = v_terms[k]
                        if zero_count[t] == 0:
                            delta -= t_coeffs[t]
                else:
                    # Flipping 0 -> 1 activates terms where v is the only zero.
                    for k in range(v_indptr[v], v_indptr[v + 1]):
                        t = v_terms[k]
                        if zero_count[t] == 1:
                            delta += t_coeffs[t]
                accept = True
                if delta > 0.0:
                    state, z = _next(state)
                    draw = (z >> _U11) * _INV53
                    accept = draw < math.exp(-delta / temperature)
                if accept:
                    if b == 1:
                        bits[v] = 0
                        for k in range(v_indptr[v], v_indptr[v + 1]):
                            zero_count[v_terms[k]] += 1
                    else:
                        bits[v] = 1
                        for k in range(v_indptr[v], v_indptr[v + 1]):
                            zero_count[v_terms[k]] -= 1
        for v in range(nvars):
            out[c, v] = bits[v]
    return out


@njit(cache=True, parallel=True)
def anneal_quadratic(h, J, temps, shots, seed):
    """Metropolis chains specialized for degree <= 2 models.

    Identical proposal and acceptance stream as anneal_general; the local
    field vector F[v] = sum_u J[v, u] * s_u makes each proposal O(1) with an
    O(nvars) update on acceptance.  J must be symmetric with a zero diagonal.
    """
    nvars = h.size
    n_sweeps = temps.size
    out = np.empty((shots, nvars), np.uint8)
    for c in prange(shots):
        state = _mix64(seed + np.uint64(c + 1) * _GOLDEN)
        bits = np.empty(nvars, np.uint8)
        for v in range(nvars):
            state, z = _next(state)
            bits[v] = np.uint8(z >> _U63)
        field = np.zeros(nvars, np.float64)
        for u in range(nvars):
            if bits[u] == 1:
                for w in range(nvars):
                    field[w] += J[u, w]
        perm = np.arange(nvars)
        for s in range(n_sweeps):
            temperature = temps[s]
            for i in range(nvars - 1, 0, -1):
                state, z = _next(state)
                j = z % np.uint64(i + 1)
                tmp = perm[i]
                perm[i] = perm[j]
                perm[j] = tmp
            for i in range(nvars):
                v = perm[i]
                ds = 1.0 - 2.0 * bits[v]
                delta = ds * (h[v] + field[v])
                accept = True
                if delta > 0.0:
                    state, z = _next(state)
                    draw = (z >> _U11) * _INV53
                    accept = draw < math.exp(-delta / temperature)
                if accept:
                    bits[v] = 1 - bits[v]
                    for w in range(nvars):
                        field[w] += ds * J[v, w]
        for v in range(nvars):
            out[c, v] = bits[v]
    return out


def chain_seed(seed: int) -> np.uint64:
    """Mask a Python int down to the uint64 the kernels expect."""
    return np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
