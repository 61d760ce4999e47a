"""Shared oracles and generators for the test suite.

Everything here is deliberately independent of the code paths it checks:
the dense contraction oracle materializes an explicit coefficient tensor
and einsums it, and the expression-tree generator evaluates its own AST
numerically without going through Polynomial at all.
"""

from __future__ import annotations

import itertools
import random

import numpy as np

from hobopt import Polynomial, VarPool, compile_polynomial
from hobopt.tensorize import CompiledModel


def all_assignments(nvars: int) -> np.ndarray:
    """Every 0/1 assignment, enumeration order, bit i = (index >> i) & 1."""
    ids = np.arange(1 << nvars, dtype=np.uint64)[:, None]
    return ((ids >> np.arange(nvars, dtype=np.uint64)[None, :]) & 1).astype(np.uint8)


def dense_contraction_energy(m: CompiledModel, bits) -> float:
    """Independent oracle: materialize the coefficient tensor and contract it.

    Rank equals the model degree; shorter monomials are padded with a dummy
    index whose vector entry is fixed to 1.  Intended for small models only
    (< 14 variables).
    """
    rank = max(m.degree, 1)
    side = m.nvars + 1
    tensor = np.zeros((side,) * rank)
    for key, coeff in m.terms:
        padded = tuple(key) + (m.nvars,) * (rank - len(key))
        tensor[padded] += coeff
    vec = np.append(np.asarray(bits, dtype=np.float64), 1.0)
    for _ in range(rank):
        tensor = np.tensordot(tensor, vec, axes=([-1], [0]))
    return float(tensor)


def random_polynomial(rng: random.Random, nvars: int, max_degree: int = 4,
                      n_terms: int = 12, coeff_range: tuple[int, int] = (-8, 8),
                      ) -> Polynomial:
    """Random integral polynomial: sums of random monomials, degree capped."""
    p = Polynomial.constant(rng.randint(*coeff_range))
    for _ in range(n_terms):
        deg = rng.randint(1, min(max_degree, nvars))
        key = tuple(sorted(rng.sample(range(nvars), deg)))
        coeff = rng.randint(*coeff_range)
        p = p + Polynomial({key: float(coeff)}) if coeff else p
    return p


def random_compiled(rng: random.Random, nvars: int, **kw):
    p = random_polynomial(rng, nvars, **kw)
    return p, compile_polynomial(p, nvars=nvars)


# -- random expression trees --------------------------------------------------

class _Node:
    def __init__(self, op, children=(), value=None):
        self.op = op          # "int", "var", "+", "-", "*", "^", "neg"
        self.children = list(children)
        self.value = value    # int literal, variable label, or exponent

    def render(self) -> str:
        if self.op == "int":
            return str(self.value)
        if self.op == "var":
            return self.value
        if self.op == "neg":
            return f"-({self.children[0].render()})"
        if self.op == "^":
            return f"({self.children[0].render()})^{self.value}"
        a, b = self.children
        return f"({a.render()} {self.op} {b.render()})"

    def eval(self, env: dict[str, int]) -> int:
        if self.op == "int":
            return self.value
        if self.op == "var":
            return env[self.value]
        if self.op == "neg":
            return -self.children[0].eval(env)
        if self.op == "^":
            return self.children[0].eval(env) ** self.value
        a = self.children[0].eval(env)
        b = self.children[1].eval(env)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        return a * b


def random_expr_tree(rng: random.Random, labels: list[str], depth: int) -> _Node:
    if depth <= 0 or rng.random() < 0.3:
        if rng.random() < 0.4:
            return _Node("int", value=rng.randint(0, 5))
        return _Node("var", value=rng.choice(labels))
    roll = rng.random()
    if roll < 0.35:
        op = "+"
    elif roll < 0.55:
        op = "-"
    elif roll < 0.85:
        op = "*"
    elif roll < 0.95:
        return _Node("^", [random_expr_tree(rng, labels, depth - 1)],
                     value=rng.randint(0, 3))
    else:
        return _Node("neg", [random_expr_tree(rng, labels, depth - 1)])
    return _Node(op, [random_expr_tree(rng, labels, depth - 1),
                      random_expr_tree(rng, labels, depth - 1)])


def make_pool(n: int, prefix: str = "q") -> VarPool:
    pool = VarPool()
    pool.new_many(prefix, n)
    return pool


def exhaustive_assignments(nvars: int):
    """Iterate python tuples over {0,1}**nvars in enumeration order."""
    for bits in itertools.product((0, 1), repeat=nvars):
        # itertools.product varies the LAST element fastest; flip so that
        # index 0 is the fastest-varying bit, matching all_assignments().
        yield tuple(reversed(bits))
