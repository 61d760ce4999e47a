import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hobopt import AnnealConfig, anneal, build_hobo, energy_batch


@pytest.fixture(scope="session")
def power4():
    return build_hobo(4)


@pytest.fixture(scope="session", autouse=True)
def warm_kernels(power4):
    """Trigger numba compilation once so timed tests measure only the work."""
    m = power4.compiled
    energy_batch(m, np.zeros((2, m.nvars), np.uint8))
    anneal(m, AnnealConfig(shots=2, sweeps_per_shot=2, seed=0))
    from hobopt import build_qubo

    q = build_qubo(2).compiled
    anneal(q, AnnealConfig(shots=2, sweeps_per_shot=2, seed=0))


def triple_bits(problem, x: int, y: int, z: int) -> list[int]:
    """Assignment encoding the given integers into problem's variables."""
    from hobopt import encode_bits

    bits = [0] * problem.compiled.nvars
    for var, val in zip(problem.int_vars, (x, y, z)):
        for vid, b in zip(var.bit_vars, encode_bits(var, val)):
            bits[vid.index] = b
    return bits


@pytest.fixture(scope="session")
def encode_triple():
    return triple_bits
