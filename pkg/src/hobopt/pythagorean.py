"""Pythagorean triple search: model builders, oracle, and experiment harness.

The search range is parametrized by `power`: integers 1 <= x, y, z <= 2**power.
Two model builders cover the same range:

* build_hobo - x, y, z as offset-binary integers (3*power bits) with the
  quartic cost (x**2 + y**2 - z**2)**2.
* build_qubo - one-hot bits over the candidate values (3 * 2**power bits),
  with strong one-hot constraints plus a weak quadratic penalty on
  x**2 + y**2 - z**2; the squares appear as bit weights so everything stays
  degree <= 2.

harvest() decodes a SampleSet back to integer triples and scores the set of
primitive triples found against the exact oracle.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .encoding import (IntegerVar, OneHotViolation, decode,
                       make_offset_binary, make_one_hot)
from .poly import VarPool
from .sampler import AnnealConfig, SampleSet, anneal
from .tensorize import CompiledModel, compile_polynomial

HOBO_MAX_POWER = 12
QUBO_MAX_POWER = 9
DEFAULT_PENALTY_WEIGHT = 0.01
CURVE_MIN_POWER = 3


@dataclass(frozen=True)
class Triple:
    x: int
    y: int
    z: int

    def is_valid(self) -> bool:
        return self.x ** 2 + self.y ** 2 == self.z ** 2

    def is_primitive(self) -> bool:
        return self.is_valid() and math.gcd(self.x, self.y, self.z) == 1

    def canonical(self) -> "Triple":
        """Merge (x, y) with (y, x): smaller leg first."""
        if self.x <= self.y:
            return self
        return Triple(self.y, self.x, self.z)

    def astuple(self) -> tuple[int, int, int]:
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class PythagoreanProblem:
    power: int
    model_kind: str
    compiled: CompiledModel
    int_vars: tuple[IntegerVar, IntegerVar, IntegerVar]
    penalty_weight: float | None = None

    @property
    def limit(self) -> int:
        return 2 ** self.power


@dataclass(frozen=True)
class ExperimentReport:
    """Discovery statistics for one (power, model) run.

    occurrences counts every valid triple reached, unordered, including
    non-primitive ones; only primitive triples enter the discovery rate.
    """

    power: int
    model_kind: str
    shots: int
    found_primitive: frozenset[Triple]
    theoretical: frozenset[Triple]
    discovery_rate: float
    occurrences: Mapping[Triple, int]

    def __post_init__(self) -> None:
        if not self.found_primitive <= self.theoretical:
            raise ValueError("found primitive triples outside the oracle set")
        if not 0.0 <= self.discovery_rate <= 1.0:
            raise ValueError(f"discovery rate {self.discovery_rate} out of [0, 1]")

    @property
    def found_nonprimitive(self) -> frozenset[Triple]:
        return frozenset(t for t in self.occurrences if not t.is_primitive())


def build_hobo(power: int) -> PythagoreanProblem:
    """Offset-binary model: 3*power bits, degree-4 cost, offset 1."""
    if not 1 <= power <= HOBO_MAX_POWER:
        raise ValueError(f"power must be in [1, {HOBO_MAX_POWER}], got {power}")
    pool = VarPool()
    x = make_offset_binary(pool, "x", power)
    y = make_offset_binary(pool, "y", power)
    z = make_offset_binary(pool, "z", power)
    cost = (x.value_poly ** 2 + y.value_poly ** 2 - z.value_poly ** 2) ** 2
    compiled = compile_polynomial(
        cost, var_labels=pool.labels, encodings=(x, y, z)
    )
    return PythagoreanProblem(power, "hobo", compiled, (x, y, z))


def build_qubo(power: int,
               penalty_weight: float = DEFAULT_PENALTY_WEIGHT) -> PythagoreanProblem:
    """One-hot model: 3 * 2**power bits, degree 2.

    Unit-weight one-hot constraints plus penalty_weight times the squared
    equation residual, whose terms stay quadratic because the one-hot bits
    carry the squares as weights.
    """
    if not 1 <= power <= QUBO_MAX_POWER:
        raise ValueError(f"power must be in [1, {QUBO_MAX_POWER}], got {power}")
    if not penalty_weight > 0:
        raise ValueError(f"penalty_weight must be > 0, got {penalty_weight}")
    values = list(range(1, 2 ** power + 1))
    squares = [v * v for v in values]
    pool = VarPool()
    x, cx = make_one_hot(pool, "x", values)
    y, cy = make_one_hot(pool, "y", values)
    z, cz = make_one_hot(pool, "z", values)
    residual = x.weighted_sum(squares) + y.weighted_sum(squares) - z.weighted_sum(squares)
    cost = cx + cy + cz + penalty_weight * residual ** 2
    compiled = compile_polynomial(
        cost, var_labels=pool.labels, encodings=(x, y, z)
    )
    if compiled.degree > 2:
        raise AssertionError("one-hot model unexpectedly exceeds degree 2")
    return PythagoreanProblem(power, "qubo", compiled, (x, y, z), penalty_weight)


def primitive_triples(limit_z: int) -> frozenset[Triple]:
    """All primitive triples with z <= limit_z, via the m/n parametrization.

    x = m**2 - n**2, y = 2mn, z = m**2 + n**2 over coprime m > n >= 1 of
    opposite parity generates each primitive triple exactly once (up to leg
    order); results are stored smaller-leg-first.
    """
    if limit_z < 1:
        raise ValueError(f"limit_z must be >= 1, got {limit_z}")
    found: set[Triple] = set()
    m = 2
    while m * m + 1 <= limit_z:
        for n in range(1 + (m % 2), m, 2):  # opposite parity to m
            z = m * m + n * n
            if z > limit_z:
                break
            if math.gcd(m, n) != 1:
                continue
            a = m * m - n * n
            b = 2 * m * n
            found.add(Triple(min(a, b), max(a, b), z))
        m += 1
    return frozenset(found)


def primitive_triples_bruteforce(limit_z: int) -> frozenset[Triple]:
    """Independent O(limit_z**2) scan over legs, checking perfect squares."""
    if limit_z < 1:
        raise ValueError(f"limit_z must be >= 1, got {limit_z}")
    found: set[Triple] = set()
    limit_sq = limit_z * limit_z
    for x in range(1, limit_z + 1):
        y_max = math.isqrt(limit_sq - x * x)
        if y_max <= x:
            break
        ys = np.arange(x + 1, y_max + 1, dtype=np.int64)
        sums = x * x + ys * ys
        roots = np.sqrt(sums.astype(np.float64)).round().astype(np.int64)
        hits = ys[roots * roots == sums]
        for y in hits:
            y = int(y)
            if math.gcd(x, y) == 1:
                found.add(Triple(x, y, math.isqrt(x * x + y * y)))
    return frozenset(found)


def harvest(problem: PythagoreanProblem, samples: SampleSet) -> ExperimentReport:
    """Decode a SampleSet into triple discoveries and score it.

    One-hot violations are skipped; decoded (x, y, z) must satisfy the
    equation exactly to count; (x, y) and (y, x) merge; non-primitive
    triples are tallied but excluded from the discovery rate.
    """
    fingerprint = problem.compiled.fingerprint()
    if samples.model_ref and samples.model_ref != fingerprint:
        raise ValueError(
            f"sample set {samples.model_ref} does not match model {fingerprint}"
        )
    limit = problem.limit
    occurrences: dict[Triple, int] = {}
    for entry in samples.entries:
        decoded = [decode(var, entry.assignment) for var in problem.int_vars]
        if any(isinstance(v, OneHotViolation) for v in decoded):
            continue
        x, y, z = decoded
        if not (1 <= x <= limit and 1 <= y <= limit and 1 <= z <= limit):
            raise ValueError(f"decoded ({x}, {y}, {z}) escapes the range [1, {limit}]")
        triple = Triple(x, y, z)
        if not triple.is_valid():
            continue
        key = triple.canonical()
        occurrences[key] = occurrences.get(key, 0) + entry.occurrence
    theoretical = primitive_triples(limit)
    found = frozenset(t for t in occurrences if t.is_primitive())
    rate = len(found & theoretical) / len(theoretical) if theoretical else 0.0
    return ExperimentReport(
        power=problem.power,
        model_kind=problem.model_kind,
        shots=samples.shots,
        found_primitive=found,
        theoretical=theoretical,
        discovery_rate=rate,
        occurrences=occurrences,
    )


def power_seed(master_seed: int, power: int) -> int:
    """Stable per-power seed derived from the master seed."""
    ss = np.random.SeedSequence([master_seed & 0xFFFFFFFFFFFFFFFF, power])
    return int(ss.generate_state(1, np.uint64)[0])


def run_experiment(power: int, model_kind: str, shots: int, *,
                   seed: int = 0, sweeps_per_shot: int = 100,
                   t_initial: float | None = None, t_final: float = 0.1,
                   penalty_weight: float = DEFAULT_PENALTY_WEIGHT,
                   ) -> tuple[PythagoreanProblem, SampleSet, ExperimentReport]:
    """Build, sample, and harvest one (power, model) experiment."""
    if model_kind == "hobo":
        problem = build_hobo(power)
    elif model_kind == "qubo":
        problem = build_qubo(power, penalty_weight)
    else:
        raise ValueError(f"model_kind must be 'hobo' or 'qubo', got {model_kind!r}")
    if shots == 0:
        samples = SampleSet([], 0, problem.compiled.fingerprint())
    else:
        cfg = AnnealConfig(
            shots=shots, sweeps_per_shot=sweeps_per_shot,
            t_initial=t_initial, t_final=t_final, seed=seed,
        )
        samples = anneal(problem.compiled, cfg)
    return problem, samples, harvest(problem, samples)


def discovery_curve(model_kind: str, max_power: int, shots: int, *,
                    seed: int = 0, sweeps_per_shot: int = 100,
                    t_initial: float | None = None, t_final: float = 0.1,
                    penalty_weight: float = DEFAULT_PENALTY_WEIGHT,
                    min_power: int = CURVE_MIN_POWER,
                    ) -> list[ExperimentReport]:
    """One report per power in [min_power, max_power], seeds derived per power."""
    cap = HOBO_MAX_POWER if model_kind == "hobo" else QUBO_MAX_POWER
    if max_power > cap:
        raise ValueError(f"max_power {max_power} exceeds {cap} for {model_kind}")
    reports = []
    for power in range(min_power, max_power + 1):
        _, _, report = run_experiment(
            power, model_kind, shots,
            seed=power_seed(seed, power), sweeps_per_shot=sweeps_per_shot,
            t_initial=t_initial, t_final=t_final, penalty_weight=penalty_weight,
        )
        reports.append(report)
    return reports


def write_curve_csv(reports: Iterable[ExperimentReport], path,
                    header_comments: Sequence[str] = ()) -> None:
    """The plot data: one row per power."""
    with open(path, "w", newline="") as fh:
        for comment in header_comments:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["power", "model", "shots", "theoretical_count", "found_count",
             "discovery_rate"]
        )
        for r in reports:
            writer.writerow(
                [r.power, r.model_kind, r.shots, len(r.theoretical),
                 len(r.found_primitive & r.theoretical), repr(r.discovery_rate)]
            )


def write_triples_csv(report: ExperimentReport, path,
                      header_comments: Sequence[str] = ()) -> None:
    """Per-triple occurrence counts, primitive and non-primitive."""
    with open(path, "w", newline="") as fh:
        for comment in header_comments:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x", "y", "z", "primitive", "occurrences"])
        for triple in sorted(report.occurrences, key=Triple.astuple):
            writer.writerow(
                [triple.x, triple.y, triple.z,
                 int(triple.is_primitive()), report.occurrences[triple]]
            )
