"""Higher-order binary optimization toolkit.

Build multilinear cost functions over binary variables (directly, from
expression text, or from encoded integers), compile them into sparse
monomial tables, sample low-energy states with an exhaustive solver or a
Metropolis annealer, and run the built-in Pythagorean triple experiments.
"""

from .poly import MAX_EXPONENT, ParseError, Polynomial, VarId, VarPool, parse_expr
from .encoding import (EncodingScheme, IntegerVar, OneHotViolation, decode,
                       encode_bits, make_binary, make_offset_binary,
                       make_one_hot, qubit_count)
from .tensorize import (CompiledModel, EnergyReport, PrecisionAudit,
                        compile_polynomial, dump_energies_csv, energy,
                        energy_batch, energy_report, precision_audit)
from .sampler import (AnnealConfig, SampleEntry, SampleSet, anneal,
                      delta_energy, solve_exhaustive)
from .pythagorean import (ExperimentReport, PythagoreanProblem, Triple,
                          build_hobo, build_qubo, discovery_curve, harvest,
                          primitive_triples, primitive_triples_bruteforce,
                          run_experiment, write_curve_csv, write_triples_csv)

__version__ = "0.1.0"

__all__ = [
    "MAX_EXPONENT",
    "ParseError",
    "Polynomial",
    "VarId",
    "VarPool",
    "parse_expr",
    "EncodingScheme",
    "IntegerVar",
    "OneHotViolation",
    "decode",
    "encode_bits",
    "make_binary",
    "make_offset_binary",
    "make_one_hot",
    "qubit_count",
    "CompiledModel",
    "EnergyReport",
    "PrecisionAudit",
    "compile_polynomial",
    "dump_energies_csv",
    "energy",
    "energy_batch",
    "energy_report",
    "precision_audit",
    "AnnealConfig",
    "SampleEntry",
    "SampleSet",
    "anneal",
    "delta_energy",
    "solve_exhaustive",
    "ExperimentReport",
    "PythagoreanProblem",
    "Triple",
    "build_hobo",
    "build_qubo",
    "discovery_curve",
    "harvest",
    "primitive_triples",
    "primitive_triples_bruteforce",
    "run_experiment",
    "write_curve_csv",
    "write_triples_csv",
    "__version__",
]
