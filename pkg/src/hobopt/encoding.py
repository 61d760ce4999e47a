"""Encode bounded integers as polynomials over fresh binary variables.

Three schemes:

* binary         value = sum(2**i * bit_i),      domain [0, 2**width - 1]
* offset_binary  value = 1 + sum(2**i * bit_i),  domain [1, 2**width]
* one_hot        value = sum(values[i] * bit_i) with a separate
                 (sum(bits) - 1)**2 constraint polynomial

Bit i always carries weight 2**i (least significant bit first), and the bit
variables are labelled q<name>0, q<name>1, ... for traceability in solver
output.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .poly import Polynomial, VarId, VarPool

MAX_WIDTH = 20

BINARY = "binary"
OFFSET_BINARY = "offset_binary"
ONE_HOT = "one_hot"


@dataclass(frozen=True)
class EncodingScheme:
    kind: str
    width: int
    domain_values: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in (BINARY, OFFSET_BINARY, ONE_HOT):
            raise ValueError(f"unknown encoding kind {self.kind!r}")
        if self.kind == ONE_HOT:
            if not self.domain_values:
                raise ValueError("one_hot scheme needs a value list")
        elif not 1 <= self.width <= MAX_WIDTH:
            raise ValueError(
                f"width must be in [1, {MAX_WIDTH}], got {self.width}"
            )

    @property
    def domain(self) -> tuple[int, ...]:
        """All representable values, in canonical bit-pattern order."""
        if self.kind == BINARY:
            return tuple(range(2 ** self.width))
        if self.kind == OFFSET_BINARY:
            return tuple(range(1, 2 ** self.width + 1))
        return self.domain_values


@dataclass(frozen=True)
class OneHotViolation:
    """Decode result for a one-hot group whose hot-bit count is not 1."""

    name: str
    hot_count: int

    def __str__(self) -> str:
        return f"<{self.name} is not one-hot: {self.hot_count} bits set>"


@dataclass(frozen=True)
class IntegerVar:
    """An encoded integer: its scheme, bit variables, and value polynomial."""

    name: str
    scheme: EncodingScheme
    bit_vars: tuple[VarId, ...]
    value_poly: Polynomial

    def decode(self, bits: Sequence[int]) -> int | OneHotViolation:
        return decode(self, bits)

    def weighted_sum(self, weights: Sequence[float]) -> Polynomial:
        """sum(weights[i] * bit_i) over this variable's bits."""
        if len(weights) != len(self.bit_vars):
            raise ValueError(
                f"{self.name}: {len(weights)} weights for {len(self.bit_vars)} bits"
            )
        return Polynomial.linear(zip(self.bit_vars, weights))

    def to_json_dict(self) -> dict:
        data: dict = {
            "name": self.name,
            "kind": self.scheme.kind,
            "bits": [v.index for v in self.bit_vars],
        }
        if self.scheme.kind == ONE_HOT:
            data["values"] = list(self.scheme.domain_values)
        else:
            data["width"] = self.scheme.width
        return data

    @classmethod
    def from_json_dict(cls, data: Mapping,
                       labels: Sequence[str] | None = None) -> "IntegerVar":
        name = data["name"]
        kind = data["kind"]
        indices = list(data["bits"])
        if labels is not None:
            bit_vars = tuple(VarId(i, labels[i]) for i in indices)
        else:
            bit_vars = tuple(VarId(i, f"q{name}{k}") for k, i in enumerate(indices))
        if kind == ONE_HOT:
            values = tuple(int(v) for v in data["values"])
            scheme = EncodingScheme(ONE_HOT, len(values), values)
            value_poly = Polynomial.linear(zip(bit_vars, values))
        else:
            width = int(data["width"])
            scheme = EncodingScheme(kind, width)
            offset = 1.0 if kind == OFFSET_BINARY else 0.0
            value_poly = Polynomial.linear(
                ((v, float(2 ** i)) for i, v in enumerate(bit_vars)), offset
            )
        return cls(name, scheme, bit_vars, value_poly)


def make_binary(pool: VarPool, name: str, width: int) -> IntegerVar:
    """Plain binary integer: sum(2**i * bit_i), domain [0, 2**width - 1]."""
    scheme = EncodingScheme(BINARY, width)
    bits = tuple(pool.new_many(f"q{name}", width))
    value_poly = Polynomial.linear((v, float(2 ** i)) for i, v in enumerate(bits))
    return IntegerVar(name, scheme, bits, value_poly)


def make_offset_binary(pool: VarPool, name: str, width: int) -> IntegerVar:
    """Offset binary integer: 1 + sum(2**i * bit_i), domain [1, 2**width].

    The +1 offset guarantees the value is at least 1 without any extra
    constraint polynomial.
    """
    scheme = EncodingScheme(OFFSET_BINARY, width)
    bits = tuple(pool.new_many(f"q{name}", width))
    value_poly = Polynomial.linear(
        ((v, float(2 ** i)) for i, v in enumerate(bits)), constant=1.0
    )
    return IntegerVar(name, scheme, bits, value_poly)


def make_one_hot(pool: VarPool, name: str,
                 values: Sequence[int]) -> tuple[IntegerVar, Polynomial]:
    """One bit per candidate value, plus the (sum(bits) - 1)**2 constraint.

    The constraint polynomial is returned separately so the caller chooses
    its penalty weight.
    """
    values = tuple(int(v) for v in values)
    if not values:
        raise ValueError("one_hot needs a non-empty value list")
    if len(set(values)) != len(values):
        raise ValueError("one_hot values must be distinct")
    scheme = EncodingScheme(ONE_HOT, len(values), values)
    bits = tuple(pool.new_many(f"q{name}", len(values)))
    value_poly = Polynomial.linear(zip(bits, values))
    hot_count = Polynomial.linear((v, 1.0) for v in bits)
    constraint = (hot_count - 1) ** 2
    return IntegerVar(name, scheme, bits, value_poly), constraint


def decode(var: IntegerVar, bits: Sequence[int]) -> int | OneHotViolation:
    """Read an integer back out of a sampled bit assignment.

    For one-hot variables a hot-bit count other than 1 yields a
    OneHotViolation value (not an exception); a missing bit is an error.
    """
    for v in var.bit_vars:
        if v.index >= len(bits):
            raise ValueError(
                f"assignment of length {len(bits)} is missing bit {v.label}"
            )
    if var.scheme.kind == ONE_HOT:
        hot = [i for i, v in enumerate(var.bit_vars) if bits[v.index]]
        if len(hot) != 1:
            return OneHotViolation(var.name, len(hot))
        return var.scheme.domain_values[hot[0]]
    value = var.value_poly.evaluate(bits)
    return int(value)


def encode_bits(var: IntegerVar, value: int) -> tuple[int, ...]:
    """Canonical bit pattern for a domain value (inverse of decode)."""
    kind = var.scheme.kind
    if kind == ONE_HOT:
        try:
            hot = var.scheme.domain_values.index(value)
        except ValueError:
            raise ValueError(f"{value} not in the domain of {var.name}") from None
        return tuple(1 if i == hot else 0 for i in range(len(var.bit_vars)))
    residue = value - 1 if kind == OFFSET_BINARY else value
    width = var.scheme.width
    if not 0 <= residue < 2 ** width:
        raise ValueError(f"{value} not in the domain of {var.name}")
    return tuple((residue >> i) & 1 for i in range(width))


def qubit_count(model: str, power: int) -> int:
    """Bits needed to search 1 <= x, y, z <= 2**power with each model kind.

    hobo: three offset-binary integers of width power.
    qubo: three one-hot groups with 2**power candidates each.
    """
    if model not in ("hobo", "qubo"):
        raise ValueError(f"model must be 'hobo' or 'qubo', got {model!r}")
    if power < 1:
        raise ValueError(f"power must be >= 1, got {power}")
    if model == "hobo":
        return 3 * power
    return 3 * 2 ** power
