import csv
import math
import random

import pytest

from hobopt import (Polynomial, SampleSet, SampleEntry, Triple, build_hobo,
                    build_qubo, decode, discovery_curve, energy, energy_batch,
                    harvest, primitive_triples, primitive_triples_bruteforce,
                    run_experiment, write_curve_csv, write_triples_csv)
from hobopt.pythagorean import power_seed

from helpers import all_assignments

# power -> number of primitive triples with z <= 2**power
THEORETICAL_COUNTS = {3: 1, 4: 2, 5: 5, 6: 9, 7: 20, 8: 39, 9: 83, 10: 161,
                      11: 327, 12: 652}

POWER6_TRIPLES = {
    (3, 4, 5), (5, 12, 13), (8, 15, 17), (7, 24, 25), (20, 21, 29),
    (12, 35, 37), (9, 40, 41), (28, 45, 53), (11, 60, 61),
}


def sample_set_for(problem, triples_with_occ, encode_triple):
    """Synthetic SampleSet from decoded triples (energy recomputed)."""
    entries = []
    shots = 0
    for (x, y, z), occ in triples_with_occ:
        bits = tuple(encode_triple(problem, x, y, z))
        entries.append(SampleEntry(bits, energy(problem.compiled, bits), occ))
        shots += occ
    entries.sort(key=lambda e: e.energy)
    return SampleSet(entries, shots, problem.compiled.fingerprint())


class TestBuildHobo:
    def test_power4_shape(self, power4):
        assert power4.compiled.nvars == 12
        assert power4.compiled.offset == 1.0
        assert power4.model_kind == "hobo"
        assert power4.limit == 16

    def test_power4_energy_at_345(self, power4, encode_triple):
        assert energy(power4.compiled, encode_triple(power4, 3, 4, 5)) == -1.0

    def test_degree_four_from_width_two(self):
        # width 1 collapses to degree 2 under idempotence (x**2 == 1 + 3q);
        # every wider encoding keeps the full quartic interactions
        assert build_hobo(1).compiled.degree == 2
        for power in (2, 5, 8, 12):
            assert build_hobo(power).compiled.degree == 4

    def test_power1_minimum_by_enumeration(self):
        # domain {1,2}^3 holds no triple; the minimum must match brute force
        prob = build_hobo(1)
        m = prob.compiled
        assert m.nvars == 3
        best = math.inf
        for bits in all_assignments(3):
            x, y, z = (decode(v, bits) for v in prob.int_vars)
            cost = (x * x + y * y - z * z) ** 2
            assert energy(m, bits) == cost - m.offset
            best = min(best, cost - m.offset)
        assert best == min(energy(m, bits) for bits in all_assignments(3))
        assert best > -m.offset  # no exact solution in range

    def test_power_bounds(self):
        for bad in (0, 13):
            with pytest.raises(ValueError):
                build_hobo(bad)

    def test_valid_triple_iff_ground_energy(self):
        # power <= 4, exhaustively: energy == -offset <=> decoded triple valid
        for power in (2, 3, 4):
            prob = build_hobo(power)
            m = prob.compiled
            rows = all_assignments(m.nvars)
            energies = energy_batch(m, rows)
            for bits, e in zip(rows, energies):
                x, y, z = (decode(v, bits) for v in prob.int_vars)
                assert (e == -m.offset) == (x * x + y * y == z * z)


class TestBuildQubo:
    def test_power4_shape(self):
        prob = build_qubo(4, 0.01)
        assert prob.compiled.nvars == 48
        assert prob.compiled.degree == 2
        assert prob.penalty_weight == 0.01

    def test_one_hot_triple_is_ground(self, encode_triple):
        prob = build_qubo(4, 0.01)
        m = prob.compiled
        bits = encode_triple(prob, 3, 4, 5)
        assert energy(m, bits) + m.offset == 0.0
        assert tuple(decode(v, bits) for v in prob.int_vars) == (3, 4, 5)

    def test_all_zero_group_costs_one(self, encode_triple):
        prob = build_qubo(3, 0.01)
        m = prob.compiled
        feasible = encode_triple(prob, 3, 4, 5)
        infeasible = list(feasible)
        for vid in prob.int_vars[0].bit_vars:  # clear the x group
            infeasible[vid.index] = 0
        # removing x's hot bit violates one-hot (+1) and changes the
        # equation penalty from 0 to weight * (16 - 25)^2
        delta = (energy(m, infeasible) - energy(m, feasible))
        assert delta == pytest.approx(1.0 + 0.01 * (16 - 25) ** 2)

    def test_power_bounds(self):
        with pytest.raises(ValueError):
            build_qubo(10)
        with pytest.raises(ValueError):
            build_qubo(4, penalty_weight=0.0)


class TestOracle:
    def test_limit_16(self):
        triples = primitive_triples(16)
        assert {t.astuple() for t in triples} == {(3, 4, 5), (5, 12, 13)}

    def test_limit_64_matches_table(self):
        triples = primitive_triples(64)
        assert {t.astuple() for t in triples} == POWER6_TRIPLES

    def test_counts_all_powers(self):
        for power, count in THEORETICAL_COUNTS.items():
            assert len(primitive_triples(2 ** power)) == count

    def test_methods_agree_up_to_512(self):
        for limit in (1, 4, 8, 16, 63, 64, 100, 256, 512):
            assert primitive_triples(limit) == primitive_triples_bruteforce(limit)

    def test_all_primitive_and_in_range(self):
        for t in primitive_triples(256):
            assert t.is_valid() and t.is_primitive()
            assert t.x < t.y < t.z <= 256

    def test_limit_validation(self):
        with pytest.raises(ValueError):
            primitive_triples(0)
        with pytest.raises(ValueError):
            primitive_triples_bruteforce(-1)


class TestTriple:
    def test_validity(self):
        assert Triple(3, 4, 5).is_valid()
        assert not Triple(4, 7, 8).is_valid()

    def test_primitivity(self):
        assert Triple(3, 4, 5).is_primitive()
        assert not Triple(6, 8, 10).is_primitive()

    def test_canonical_swaps(self):
        assert Triple(4, 3, 5).canonical() == Triple(3, 4, 5)
        assert Triple(3, 4, 5).canonical() == Triple(3, 4, 5)


class TestHarvest:
    def test_table_i_sample_set(self, power4, encode_triple):
        rows = [
            ((8, 6, 10), 1234), ((12, 5, 13), 929), ((12, 9, 15), 775),
            ((4, 3, 5), 983), ((9, 12, 15), 1021), ((5, 12, 13), 1316),
            ((3, 4, 5), 1332), ((6, 8, 10), 849), ((4, 7, 8), 223),
            ((14, 1, 14), 39),
        ]
        samples = sample_set_for(power4, rows, encode_triple)
        report = harvest(power4, samples)
        assert {t.astuple() for t in report.found_primitive} == {(3, 4, 5), (5, 12, 13)}
        assert report.discovery_rate == 1.0
        assert {t.astuple() for t in report.found_nonprimitive} == {
            (6, 8, 10), (9, 12, 15),
        }
        # (x, y) swaps merge: (3,4,5) absorbs (4,3,5)
        assert report.occurrences[Triple(3, 4, 5)] == 1332 + 983
        assert report.occurrences[Triple(5, 12, 13)] == 1316 + 929
        assert Triple(4, 7, 8) not in report.occurrences

    def test_empty_sample_set(self, power4):
        report = harvest(power4, SampleSet([], 0, power4.compiled.fingerprint()))
        assert report.discovery_rate == 0.0
        assert not report.found_primitive and not report.occurrences

    def test_only_near_miss(self, power4, encode_triple):
        samples = sample_set_for(power4, [((4, 7, 8), 10)], encode_triple)
        report = harvest(power4, samples)
        assert report.discovery_rate == 0.0
        assert not report.occurrences

    def test_swap_symmetry(self, power4, encode_triple):
        rows = [((3, 4, 5), 7), ((12, 5, 13), 3), ((6, 8, 10), 2)]
        swapped = [((y, x, z), occ) for (x, y, z), occ in rows]
        a = harvest(power4, sample_set_for(power4, rows, encode_triple))
        b = harvest(power4, sample_set_for(power4, swapped, encode_triple))
        assert a.found_primitive == b.found_primitive
        assert a.occurrences == b.occurrences
        assert a.discovery_rate == b.discovery_rate

    def test_model_mismatch_rejected(self, power4):
        alien = SampleSet([], 0, "deadbeefdeadbeef")
        with pytest.raises(ValueError, match="does not match"):
            harvest(power4, alien)

    def test_one_hot_violations_skipped(self, encode_triple):
        prob = build_qubo(3, 0.01)
        bits = [0] * prob.compiled.nvars  # all groups violate one-hot
        samples = SampleSet(
            [SampleEntry(tuple(bits), energy(prob.compiled, bits), 5)],
            5, prob.compiled.fingerprint(),
        )
        report = harvest(prob, samples)
        assert not report.occurrences and report.discovery_rate == 0.0


class TestExperiments:
    def test_zero_shots_gives_zero_rate(self):
        _, samples, report = run_experiment(3, "hobo", 0)
        assert samples.shots == 0
        assert report.discovery_rate == 0.0

    def test_power3_hobo_finds_345(self):
        _, _, report = run_experiment(3, "hobo", 3000, seed=power_seed(0, 3))
        assert Triple(3, 4, 5) in report.found_primitive
        assert report.discovery_rate == 1.0

    def test_power3_qubo_finds_345(self):
        # the one power where the one-hot model still reaches the solution
        _, _, report = run_experiment(3, "qubo", 3000, seed=power_seed(0, 3))
        assert Triple(3, 4, 5) in report.found_primitive
        assert report.discovery_rate == 1.0

    def test_curve_zero_shots(self):
        reports = discovery_curve("hobo", 4, 0, seed=0)
        assert [r.power for r in reports] == [3, 4]
        assert all(r.discovery_rate == 0.0 for r in reports)

    def test_curve_seed_derivation_stable(self):
        assert power_seed(0, 3) == power_seed(0, 3)
        assert power_seed(0, 3) != power_seed(0, 4)
        assert power_seed(0, 3) != power_seed(1, 3)

    def test_curve_power_cap(self):
        with pytest.raises(ValueError):
            discovery_curve("qubo", 10, 1)
        with pytest.raises(ValueError):
            discovery_curve("hobo", 13, 1)

    def test_unknown_model_kind(self):
        with pytest.raises(ValueError):
            run_experiment(3, "ising", 1)


class TestReportFiles:
    def test_curve_csv(self, tmp_path):
        reports = discovery_curve("hobo", 4, 0)
        path = tmp_path / "curve.csv"
        write_curve_csv(reports, path, header_comments=["run_id=abc"])
        lines = path.read_text().splitlines()
        assert lines[0] == "# run_id=abc"
        with open(path, newline="") as fh:
            rows = list(csv.reader(line for line in fh if not line.startswith("#")))
        assert rows[0] == ["power", "model", "shots", "theoretical_count",
                           "found_count", "discovery_rate"]
        assert [r[0] for r in rows[1:]] == ["3", "4"]
        assert rows[1][3] == "1" and rows[2][3] == "2"

    def test_triples_csv(self, tmp_path, power4, encode_triple):
        samples = sample_set_for(
            power4, [((3, 4, 5), 4), ((6, 8, 10), 2)], encode_triple
        )
        report = harvest(power4, samples)
        path = tmp_path / "triples.csv"
        write_triples_csv(report, path)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["x", "y", "z", "primitive", "occurrences"]
        assert rows[1] == ["3", "4", "5", "1", "4"]
        assert rows[2] == ["6", "8", "10", "0", "2"]


class TestFormulationEquivalence:
    def test_expand_then_substitute_matches(self):
        # Expanding (a+b-c)^2 symbolically over integer squares first, then
        # substituting bit polynomials, must equal substituting first.
        for power in (2, 3):
            prob = build_hobo(power)
            x, y, z = (v.value_poly for v in prob.int_vars)
            x2, y2, z2 = x * x, y * y, z * z
            expanded = (
                x2 ** 2 + 2 * x2 * y2 + y2 ** 2
                - 2 * x2 * z2 - 2 * y2 * z2 + z2 ** 2
            )
            substituted = (x ** 2 + y ** 2 - z ** 2) ** 2
            assert expanded == substituted
