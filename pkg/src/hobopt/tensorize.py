"""Compile a polynomial into an executable cost model.

A CompiledModel is a sparse monomial table: the constant term is pulled out
as `offset`, the remaining terms are stored in canonical (lexicographic)
order, and energies are evaluated by contracting the table against 0/1
assignment vectors.  Energies exclude the offset, so a model whose source
polynomial reaches 0 reports energy -offset.

Everything is float64.  A deliberately degraded float32 evaluation mode
exists only to demonstrate how 32-bit accumulation corrupts integer-valued
energies once coefficient sums pass 2**24; nothing else uses it.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .encoding import IntegerVar
from .poly import Polynomial

FLOAT32_SAFE_BOUND = float(2 ** 24)
FLOAT64_SAFE_BOUND = float(2 ** 53)


@dataclass(frozen=True)
class EnergyReport:
    """One assignment's energy, with and without the compile-time offset."""

    assignment: tuple[int, ...]
    energy: float
    total: float


@dataclass(frozen=True)
class PrecisionAudit:
    """Worst-case magnitude bounds for a model's energies.

    energy_bound is the sum of absolute coefficients, which bounds |energy|
    for any 0/1 assignment and also every partial sum during accumulation.
    """

    max_abs_coeff: float
    energy_bound: float
    safe_float32: bool
    safe_float64: bool

    def describe(self) -> str:
        return (
            f"max |coeff| {self.max_abs_coeff:g}, energy bound {self.energy_bound:g}, "
            f"float32 {'safe' if self.safe_float32 else 'UNSAFE'}, "
            f"float64 {'safe' if self.safe_float64 else 'UNSAFE'}"
        )


class CompiledModel:
    """Sparse monomial table with a constant offset, ready for evaluation.

    Immutable after construction.  `terms` is a tuple of (vars, coeff)
    pairs sorted lexicographically on the variable-index tuples; no term is
    constant (that lives in `offset`) and no coefficient is zero.
    """

    def __init__(self, terms: Sequence[tuple[tuple[int, ...], float]],
                 offset: float, nvars: int,
                 var_labels: Sequence[str],
                 encodings: Sequence[IntegerVar] = ()):
        self.terms = tuple((tuple(k), float(c)) for k, c in terms)
        self.offset = float(offset)
        self.nvars = int(nvars)
        self.var_labels = tuple(var_labels)
        self.encodings = tuple(encodings)
        if len(self.var_labels) != self.nvars:
            raise ValueError(
                f"{len(self.var_labels)} labels for {self.nvars} variables"
            )
        for key, coeff in self.terms:
            if not key:
                raise ValueError("constant term belongs in offset, not terms")
            if coeff == 0.0:
                raise ValueError(f"zero coefficient stored for {key}")
            if key[-1] >= self.nvars:
                raise ValueError(f"term {key} exceeds nvars={self.nvars}")
        self.degree = max((len(k) for k, _ in self.terms), default=0)

    @property
    def is_qubo(self) -> bool:
        return self.degree <= 2

    @property
    def num_terms(self) -> int:
        return len(self.terms)

    # CSR views shared by the evaluation and sampling kernels.

    @cached_property
    def term_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(indptr, flat var indices, coeffs) in canonical term order."""
        indptr = np.zeros(len(self.terms) + 1, np.int64)
        coeffs = np.empty(len(self.terms), np.float64)
        flat: list[int] = []
        for t, (key, coeff) in enumerate(self.terms):
            flat.extend(key)
            indptr[t + 1] = len(flat)
            coeffs[t] = coeff
        return indptr, np.asarray(flat, np.int64), coeffs

    @cached_property
    def var_incidence(self) -> tuple[np.ndarray, np.ndarray]:
        """(indptr, term ids) mapping each variable to the terms touching it."""
        lists: list[list[int]] = [[] for _ in range(self.nvars)]
        for t, (key, _) in enumerate(self.terms):
            for v in key:
                lists[v].append(t)
        indptr = np.zeros(self.nvars + 1, np.int64)
        flat: list[int] = []
        for v, ts in enumerate(lists):
            flat.extend(ts)
            indptr[v + 1] = len(flat)
        return indptr, np.asarray(flat, np.int64)

    @cached_property
    def quadratic_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(h, J) dense form for degree <= 2 models; J symmetric, zero diag."""
        if self.degree > 2:
            raise ValueError("model has degree > 2")
        h = np.zeros(self.nvars, np.float64)
        J = np.zeros((self.nvars, self.nvars), np.float64)
        for key, coeff in self.terms:
            if len(key) == 1:
                h[key[0]] += coeff
            else:
                i, j = key
                J[i, j] += coeff
                J[j, i] += coeff
        return h, J

    def fingerprint(self) -> str:
        """Stable identifier for matching sample sets back to their model."""
        payload = json.dumps(
            {
                "nvars": self.nvars,
                "offset": self.offset,
                "terms": [[list(k), c] for k, c in self.terms],
                "var_labels": list(self.var_labels),
            },
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def to_json_dict(self) -> dict:
        return {
            "degree": self.degree,
            "nvars": self.nvars,
            "offset": self.offset,
            "terms": [{"vars": list(k), "coeff": c} for k, c in self.terms],
            "var_labels": list(self.var_labels),
            "encodings": [e.to_json_dict() for e in self.encodings],
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "CompiledModel":
        labels = list(data["var_labels"])
        encodings = [
            IntegerVar.from_json_dict(e, labels) for e in data.get("encodings", ())
        ]
        return cls(
            [(tuple(t["vars"]), t["coeff"]) for t in data["terms"]],
            data["offset"],
            data["nvars"],
            labels,
            encodings,
        )

    def __repr__(self) -> str:
        return (
            f"CompiledModel(nvars={self.nvars}, degree={self.degree}, "
            f"terms={self.num_terms}, offset={self.offset})"
        )


def compile_polynomial(p: Polynomial,
                       var_labels: Sequence[str] | None = None,
                       nvars: int | None = None,
                       encodings: Sequence[IntegerVar] = ()) -> CompiledModel:
    """Split off the constant term and freeze the rest as a monomial table.

    nvars defaults to the highest variable index plus one; var_labels
    defaults to x0, x1, ...
    """
    if var_labels is not None and nvars is None:
        nvars = len(var_labels)
    if nvars is None:
        nvars = p.max_index + 1
    if p.max_index >= nvars:
        raise ValueError(
            f"polynomial uses variable {p.max_index} but nvars={nvars}"
        )
    if var_labels is None:
        var_labels = [f"x{i}" for i in range(nvars)]
    offset = p.constant_term
    terms = sorted((k, c) for k, c in p.terms.items() if k)
    return CompiledModel(terms, offset, nvars, var_labels, encodings)


def _check_rows(m: CompiledModel, rows) -> np.ndarray:
    arr = np.asarray(rows)
    if arr.ndim != 2:
        raise ValueError(f"batch must be 2-D, got shape {arr.shape}")
    if arr.shape[1] != m.nvars:
        raise ValueError(
            f"batch rows have {arr.shape[1]} bits, model has {m.nvars} variables"
        )
    return np.ascontiguousarray(arr, dtype=np.uint8)


def energy(m: CompiledModel, bits: Sequence[int]) -> float:
    """Offset-excluded energy of one assignment (canonical-order float64 sum)."""
    if len(bits) != m.nvars:
        raise ValueError(
            f"assignment has {len(bits)} bits, model has {m.nvars} variables"
        )
    acc = 0.0
    for key, coeff in m.terms:
        for v in key:
            if not bits[v]:
                break
        else:
            acc += coeff
    return acc


def energy_batch(m: CompiledModel, rows,
                 precision: str = "float64") -> np.ndarray:
    """Energies for a batch of assignments, one per row.

    precision="float64" is the contract and matches energy() bit for bit.
    precision="float32" accumulates in 32 bits to reproduce the failure mode
    flagged by precision_audit; never use it for real sampling.
    """
    arr = _check_rows(m, rows)
    if precision == "float64":
        indptr, flat, coeffs = m.term_arrays
        return _kernels.batch_energy_f64(indptr, flat, coeffs, arr)
    if precision == "float32":
        acc = np.zeros(arr.shape[0], np.float32)
        for key, coeff in m.terms:
            active = arr[:, key].all(axis=1)
            acc[active] += np.float32(coeff)
        return acc
    raise ValueError(f"precision must be 'float64' or 'float32', got {precision!r}")


def energy_report(m: CompiledModel, bits: Sequence[int]) -> EnergyReport:
    e = energy(m, bits)
    return EnergyReport(tuple(int(b) for b in bits), e, e + m.offset)


def precision_audit(m: CompiledModel) -> PrecisionAudit:
    """Bound the model's energies and flag 32-bit / 64-bit exactness."""
    max_abs = 0.0
    bound = 0.0
    for _, coeff in m.terms:
        a = abs(coeff)
        if a > max_abs:
            max_abs = a
        bound += a
    return PrecisionAudit(
        max_abs_coeff=max_abs,
        energy_bound=bound,
        safe_float32=bound <= FLOAT32_SAFE_BOUND,
        safe_float64=bound <= FLOAT64_SAFE_BOUND,
    )


def dump_energies_csv(m: CompiledModel, rows: Iterable[Sequence[int]],
                      path, header_comments: Sequence[str] = ()) -> None:
    """CSV energy dump: one row per assignment, bit columns then energy."""
    rows = _check_rows(m, list(rows))
    energies = energy_batch(m, rows)
    with open(path, "w", newline="") as fh:
        for comment in header_comments:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([*m.var_labels, "energy"])
        for row, e in zip(rows, energies):
            writer.writerow([*(int(b) for b in row), repr(float(e))])
