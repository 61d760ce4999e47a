"""Low-energy search over compiled models.

Two solvers share the SampleSet result type:

* solve_exhaustive - enumerates every assignment (the ground-truth oracle
  for small models).
* anneal - Metropolis single-bit-flip simulated annealing with a geometric
  temperature schedule.  Each shot is an independent chain whose RNG stream
  is derived from (seed, chain index), so results are reproducible and
  independent of how chains are scheduled.

Reported energies always exclude the model offset and are recomputed from
the final assignments with the canonical float64 evaluator.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import _kernels
from .encoding import IntegerVar, OneHotViolation, decode
from .tensorize import CompiledModel, energy_batch

EXHAUSTIVE_MAX_VARS = 26
_ENUM_CHUNK = 1 << 16
# Dense (h, J) arrays stop paying off once J no longer fits in cache.
_QUADRATIC_KERNEL_MAX_VARS = 4096


@dataclass(frozen=True)
class AnnealConfig:
    """Annealer parameters.

    t_initial defaults (at run time) to max(1, max |coefficient|) of the
    model, so early sweeps explore freely; t_final defaults to 0.1, cold
    enough to freeze integer-valued landscapes.
    """

    shots: int
    sweeps_per_shot: int = 100
    t_initial: float | None = None
    t_final: float = 0.1
    schedule: str = "geometric"
    seed: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.shots, int) or self.shots < 1:
            raise ValueError(f"shots must be a positive integer, got {self.shots!r}")
        if not isinstance(self.sweeps_per_shot, int) or self.sweeps_per_shot < 1:
            raise ValueError(
                f"sweeps_per_shot must be a positive integer, got {self.sweeps_per_shot!r}"
            )
        if self.schedule != "geometric":
            raise ValueError(f"unsupported schedule {self.schedule!r}")
        if not (self.t_final > 0 and np.isfinite(self.t_final)):
            raise ValueError(f"t_final must be finite and > 0, got {self.t_final}")
        if self.t_initial is not None:
            if not (self.t_initial > 0 and np.isfinite(self.t_initial)):
                raise ValueError(
                    f"t_initial must be finite and > 0, got {self.t_initial}"
                )
            if self.t_final > self.t_initial:
                raise ValueError(
                    f"t_final={self.t_final} exceeds t_initial={self.t_initial}"
                )

    def resolve_t_initial(self, m: CompiledModel) -> float:
        if self.t_initial is not None:
            return self.t_initial
        max_abs = max((abs(c) for _, c in m.terms), default=0.0)
        return max(1.0, max_abs)

    def temperatures(self, m: CompiledModel) -> np.ndarray:
        t0 = self.resolve_t_initial(m)
        return np.geomspace(t0, self.t_final, self.sweeps_per_shot)


@dataclass(frozen=True)
class SampleEntry:
    assignment: tuple[int, ...]
    energy: float
    occurrence: int


@dataclass
class SampleSet:
    """Aggregated sampling outcome, sorted by energy (ties: first seen)."""

    entries: list[SampleEntry]
    shots: int
    model_ref: str = ""

    def __post_init__(self) -> None:
        total = sum(e.occurrence for e in self.entries)
        if total != self.shots:
            raise ValueError(
                f"occurrences sum to {total} but shots={self.shots}"
            )

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def best(self) -> SampleEntry:
        if not self.entries:
            raise ValueError("empty sample set")
        return self.entries[0]

    def to_json_dict(self) -> dict:
        return {
            "shots": self.shots,
            "model_ref": self.model_ref,
            "entries": [
                {
                    "assignment": "".join(map(str, e.assignment)),
                    "energy": e.energy,
                    "occurrence": e.occurrence,
                }
                for e in self.entries
            ],
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "SampleSet":
        entries = [
            SampleEntry(
                tuple(int(ch) for ch in item["assignment"]),
                float(item["energy"]),
                int(item["occurrence"]),
            )
            for item in data["entries"]
        ]
        return cls(entries, int(data["shots"]), data.get("model_ref", ""))

    def write_csv(self, path, encodings: Sequence[IntegerVar] = (),
                  header_comments: Sequence[str] = ()) -> None:
        """assignment,energy,occurrence plus one decoded column per encoding."""
        with open(path, "w", newline="") as fh:
            for comment in header_comments:
                fh.write(f"# {comment}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(
                ["assignment", "energy", "occurrence", *(v.name for v in encodings)]
            )
            for e in self.entries:
                decoded = []
                for var in encodings:
                    value = decode(var, e.assignment)
                    decoded.append(
                        "violation" if isinstance(value, OneHotViolation) else value
                    )
                writer.writerow(
                    ["".join(map(str, e.assignment)), repr(e.energy), e.occurrence,
                     *decoded]
                )


def _worker_threads() -> int:
    raw = os.environ.get("HOBO_THREADS", "")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return 0  # leave numba's default alone


def _apply_thread_cap() -> None:
    cap = _worker_threads()
    if cap:
        import numba

        numba.set_num_threads(min(cap, numba.config.NUMBA_NUM_THREADS))


def _aggregate(final_bits: np.ndarray, m: CompiledModel,
               shots: int) -> SampleSet:
    order: dict[bytes, int] = {}
    counts: list[int] = []
    unique_rows: list[np.ndarray] = []
    for row in final_bits:
        key = row.tobytes()
        idx = order.get(key)
        if idx is None:
            order[key] = len(counts)
            counts.append(1)
            unique_rows.append(row)
        else:
            counts[idx] += 1
    if unique_rows:
        unique = np.vstack(unique_rows)
        energies = energy_batch(m, unique)
    else:
        unique = np.empty((0, m.nvars), np.uint8)
        energies = np.empty(0)
    rank = sorted(range(len(counts)), key=lambda i: (energies[i], i))
    entries = [
        SampleEntry(tuple(int(b) for b in unique[i]), float(energies[i]), counts[i])
        for i in rank
    ]
    return SampleSet(entries, shots, m.fingerprint())


def anneal(m: CompiledModel, cfg: AnnealConfig) -> SampleSet:
    """Run cfg.shots independent annealing chains and aggregate the results."""
    if m.nvars < 1:
        raise ValueError("model has no variables")
    temps = cfg.temperatures(m)
    seed = _kernels.chain_seed(cfg.seed)
    _apply_thread_cap()
    if m.is_qubo and m.nvars <= _QUADRATIC_KERNEL_MAX_VARS:
        h, J = m.quadratic_arrays
        final = _kernels.anneal_quadratic(h, J, temps, cfg.shots, seed)
    else:
        indptr, flat, coeffs = m.term_arrays
        v_indptr, v_terms = m.var_incidence
        final = _kernels.anneal_general(
            m.nvars, indptr, flat, coeffs, v_indptr, v_terms, temps, cfg.shots, seed
        )
    return _aggregate(final, m, cfg.shots)


def _enumerate_chunk(base: int, count: int, nvars: int) -> np.ndarray:
    ids = np.arange(base, base + count, dtype=np.uint64)[:, None]
    shifts = np.arange(nvars, dtype=np.uint64)[None, :]
    return ((ids >> shifts) & 1).astype(np.uint8)


def solve_exhaustive(m: CompiledModel, levels: int = 1) -> SampleSet:
    """Enumerate all 2**nvars assignments and keep the lowest energy levels.

    Returns every assignment in the `levels` lowest distinct energies
    (occurrence 1 each), in enumeration order within a level.
    """
    if m.nvars > EXHAUSTIVE_MAX_VARS:
        raise ValueError(
            f"exhaustive solve limited to {EXHAUSTIVE_MAX_VARS} variables, "
            f"model has {m.nvars}"
        )
    if levels < 1:
        raise ValueError(f"levels must be >= 1, got {levels}")
    total = 1 << m.nvars
    # Pass 1: the `levels` lowest distinct energies.
    kept: np.ndarray | None = None
    for base in range(0, total, _ENUM_CHUNK):
        count = min(_ENUM_CHUNK, total - base)
        energies = energy_batch(m, _enumerate_chunk(base, count, m.nvars))
        candidates = np.unique(energies)
        merged = candidates if kept is None else np.union1d(kept, candidates)
        kept = merged[:levels]
    assert kept is not None
    cutoff = kept[-1]
    # Pass 2: collect the matching assignments in enumeration order.
    entries: list[SampleEntry] = []
    for base in range(0, total, _ENUM_CHUNK):
        count = min(_ENUM_CHUNK, total - base)
        rows = _enumerate_chunk(base, count, m.nvars)
        energies = energy_batch(m, rows)
        for i in np.flatnonzero(energies <= cutoff):
            if energies[i] in kept:
                entries.append(
                    SampleEntry(tuple(int(b) for b in rows[i]), float(energies[i]), 1)
                )
    entries.sort(key=lambda e: e.energy)  # stable: enumeration order within level
    return SampleSet(entries, len(entries), m.fingerprint())


def delta_energy(m: CompiledModel, bits: Sequence[int], flip: int) -> float:
    """Exact energy change from flipping one bit, in O(terms touching it)."""
    if not 0 <= flip < m.nvars:
        raise ValueError(f"flip index {flip} out of range for {m.nvars} variables")
    if len(bits) != m.nvars:
        raise ValueError(
            f"assignment has {len(bits)} bits, model has {m.nvars} variables"
        )
    v_indptr, v_terms = m.var_incidence
    sign = -1.0 if bits[flip] else 1.0
    delta = 0.0
    for k in range(v_indptr[flip], v_indptr[flip + 1]):
        key, coeff = m.terms[v_terms[k]]
        for u in key:
            if u != flip and not bits[u]:
                break
        else:
            delta += sign * coeff
    return delta
