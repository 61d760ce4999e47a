"""Exact algebra for multilinear polynomials over binary variables.

A cost function over bits is stored as a sparse term map

    terms: dict[tuple[int, ...], float]

where each key is a strictly increasing tuple of variable indices (the empty
tuple is the constant term) and each value is a nonzero float64 coefficient.
Because every variable takes values in {0, 1}, powers collapse (x*x == x), so
every polynomial built here is multilinear by construction and structural
equality of the term maps coincides with semantic equality.

Coefficients are float64.  Integer inputs stay exactly representable up to
2**53, and the arithmetic here preserves integrality: sums and products of
integral polynomials are integral (checked by a debug assertion).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

MAX_EXPONENT = 16

Key = tuple[int, ...]


@dataclass(frozen=True)
class VarId:
    """A binary variable: dense index plus a human-readable label."""

    index: int
    label: str

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError(f"variable index must be >= 0, got {self.index}")


class VarPool:
    """Allocates fresh variables with unique labels and dense 0..n-1 indices.

    One pool per model; there is no global variable state.
    """

    def __init__(self) -> None:
        self._vars: list[VarId] = []
        self._by_label: dict[str, VarId] = {}

    def new(self, label: str) -> VarId:
        if not label:
            raise ValueError("variable label must be non-empty")
        if label in self._by_label:
            raise ValueError(f"duplicate variable label {label!r}")
        var = VarId(len(self._vars), label)
        self._vars.append(var)
        self._by_label[label] = var
        return var

    def new_many(self, prefix: str, count: int) -> list[VarId]:
        """Allocate count variables labelled prefix0, prefix1, ..."""
        return [self.new(f"{prefix}{i}") for i in range(count)]

    def __len__(self) -> int:
        return len(self._vars)

    def __iter__(self):
        return iter(self._vars)

    def __getitem__(self, index: int) -> VarId:
        return self._vars[index]

    def lookup(self, label: str) -> VarId:
        try:
            return self._by_label[label]
        except KeyError:
            raise KeyError(f"no variable labelled {label!r}") from None

    @property
    def labels(self) -> list[str]:
        return [v.label for v in self._vars]


def _as_index(var: VarId | int) -> int:
    idx = var.index if isinstance(var, VarId) else int(var)
    if idx < 0:
        raise ValueError(f"variable index must be >= 0, got {idx}")
    return idx


def _merge_keys(a: Key, b: Key) -> Key:
    """Union of two strictly increasing index tuples (idempotence applied)."""
    if not a:
        return b
    if not b:
        return a
    out: list[int] = []
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        x, y = a[i], b[j]
        if x < y:
            out.append(x)
            i += 1
        elif x > y:
            out.append(y)
            j += 1
        else:
            out.append(x)
            i += 1
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


class Polynomial:
    """Immutable multilinear polynomial over binary variables.

    Supports +, -, * and ** with other polynomials and with int/float
    scalars.  Zero-coefficient terms are dropped eagerly, so ``==`` on two
    polynomials is both structural and semantic equality.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Sequence[int], float] | None = None):
        canon: dict[Key, float] = {}
        if terms:
            for key, coeff in terms.items():
                key = tuple(key)
                if any(key[i] >= key[i + 1] for i in range(len(key) - 1)):
                    raise ValueError(
                        f"term key {key} is not strictly increasing"
                    )
                if key and key[0] < 0:
                    raise ValueError(f"negative variable index in {key}")
                c = canon.get(key, 0.0) + float(coeff)
                if c != 0.0:
                    canon[key] = c
                elif key in canon:
                    del canon[key]
        self._terms = canon

    @classmethod
    def _wrap(cls, canon: dict[Key, float]) -> "Polynomial":
        # Trusted constructor: canon must already be canonical.
        p = cls.__new__(cls)
        p._terms = canon
        return p

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls._wrap({})

    @classmethod
    def constant(cls, value: float) -> "Polynomial":
        value = float(value)
        return cls._wrap({(): value} if value != 0.0 else {})

    @classmethod
    def variable(cls, var: VarId | int) -> "Polynomial":
        return cls._wrap({(_as_index(var),): 1.0})

    @classmethod
    def linear(cls, weighted_vars: Iterable[tuple[VarId | int, float]],
               constant: float = 0.0) -> "Polynomial":
        """Build constant + sum(weight * var) in one pass."""
        canon: dict[Key, float] = {}
        if constant:
            canon[()] = float(constant)
        for var, w in weighted_vars:
            key = (_as_index(var),)
            c = canon.get(key, 0.0) + float(w)
            if c != 0.0:
                canon[key] = c
            elif key in canon:
                del canon[key]
        return cls._wrap(canon)

    # -- inspection ---------------------------------------------------------

    @property
    def terms(self) -> dict[Key, float]:
        """The canonical term map.  Treat as read-only."""
        return self._terms

    @property
    def degree(self) -> int:
        return max((len(k) for k in self._terms), default=0)

    @property
    def constant_term(self) -> float:
        return self._terms.get((), 0.0)

    def variables(self) -> tuple[int, ...]:
        """Sorted indices of all variables that appear in some term."""
        seen: set[int] = set()
        for key in self._terms:
            seen.update(key)
        return tuple(sorted(seen))

    @property
    def num_variables(self) -> int:
        return len(self.variables())

    @property
    def max_index(self) -> int:
        """Largest variable index used, or -1 for a constant polynomial."""
        return max((k[-1] for k in self._terms if k), default=-1)

    def is_integral(self) -> bool:
        return all(c.is_integer() for c in self._terms.values())

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "Polynomial | None":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, float)):
            return Polynomial.constant(other)
        return None

    def __add__(self, other) -> "Polynomial":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        out = dict(self._terms)
        for key, coeff in rhs._terms.items():
            c = out.get(key, 0.0) + coeff
            if c != 0.0:
                out[key] = c
            elif key in out:
                del out[key]
        result = Polynomial._wrap(out)
        if __debug__ and self.is_integral() and rhs.is_integral():
            assert result.is_integral(), "integral inputs produced a non-integral sum"
        return result

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._wrap({k: -c for k, c in self._terms.items()})

    def __pos__(self) -> "Polynomial":
        return self

    def __sub__(self, other) -> "Polynomial":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self + (-rhs)

    def __rsub__(self, other) -> "Polynomial":
        lhs = self._coerce(other)
        if lhs is None:
            return NotImplemented
        return lhs + (-self)

    def __mul__(self, other) -> "Polynomial":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        out: dict[Key, float] = {}
        for ka, ca in self._terms.items():
            for kb, cb in rhs._terms.items():
                key = _merge_keys(ka, kb)
                c = out.get(key, 0.0) + ca * cb
                if c != 0.0:
                    out[key] = c
                elif key in out:
                    del out[key]
        result = Polynomial._wrap(out)
        if __debug__ and self.is_integral() and rhs.is_integral():
            assert result.is_integral(), "integral inputs produced a non-integral product"
        return result

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Polynomial":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError(f"exponent must be a nonnegative integer, got {exponent!r}")
        if exponent > MAX_EXPONENT:
            raise ValueError(
                f"exponent {exponent} exceeds the maximum of {MAX_EXPONENT}"
            )
        result = Polynomial.constant(1.0)
        for _ in range(exponent):
            result = result * self
        return result

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, bits: Sequence[int]) -> float:
        """Evaluate at a 0/1 assignment; bits[i] is the value of variable i.

        The assignment must cover every variable of the polynomial.
        """
        if self.max_index >= len(bits):
            raise ValueError(
                f"assignment of length {len(bits)} does not cover variable "
                f"index {self.max_index}"
            )
        total = 0.0
        for key, coeff in self._terms.items():
            for idx in key:
                if not bits[idx]:
                    break
            else:
                total += coeff
        return total

    # -- comparison / misc --------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self._terms == other._terms
        if isinstance(other, (int, float)):
            return self._terms == Polynomial.constant(other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def format(self, labels: Sequence[str] | None = None) -> str:
        """Render in canonical term order, e.g. '1 + 2*q0*q1 - q2'."""
        if not self._terms:
            return "0"
        parts: list[str] = []
        for key in sorted(self._terms):
            coeff = self._terms[key]
            names = [labels[i] if labels else f"x{i}" for i in key]
            mag = abs(coeff)
            body = "*".join(names)
            if not key:
                text = _fmt_num(mag)
            elif mag == 1.0:
                text = body
            else:
                text = f"{_fmt_num(mag)}*{body}"
            if not parts:
                parts.append(text if coeff >= 0 else f"-{text}")
            else:
                parts.append(f"+ {text}" if coeff >= 0 else f"- {text}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"Polynomial({self.format()})"

    # -- serialization ------------------------------------------------------

    def to_json_dict(self) -> dict:
        """JSON form: {"offset_included": true, "terms": [{"vars", "coeff"}]}.

        The constant term, if any, is carried in the terms list with an
        empty vars array.
        """
        return {
            "offset_included": True,
            "terms": [
                {"vars": list(key), "coeff": self._terms[key]}
                for key in sorted(self._terms)
            ],
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "Polynomial":
        return cls({tuple(t["vars"]): t["coeff"] for t in data["terms"]})


def _fmt_num(value: float) -> str:
    return str(int(value)) if value.is_integer() else repr(value)


# -- expression parsing -----------------------------------------------------

class ParseError(ValueError):
    """Syntax or name error in an expression, with a character position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


_TOKEN_RE = re.compile(r"(\d+)|([A-Za-z_][A-Za-z0-9_]*)|([()+\-*^])|(\S)")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens: list[tuple[str, str, int]] = []
    for m in _TOKEN_RE.finditer(text):
        pos = m.start()
        if m.group(1):
            tokens.append(("int", m.group(1), pos))
        elif m.group(2):
            tokens.append(("name", m.group(2), pos))
        elif m.group(3):
            tokens.append(("op", m.group(3), pos))
        else:
            raise ParseError(f"unexpected character {m.group(4)!r}", pos)
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    """Recursive-descent parser for the expression grammar.

    expr   := term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := ('+'|'-') factor | atom ('^' INT)?
    atom   := INT | NAME | '(' expr ')'

    Exponents are nonnegative integer literals <= MAX_EXPONENT.
    """

    def __init__(self, text: str, variables: Mapping[str, VarId]):
        self._tokens = _tokenize(text)
        self._pos = 0
        self._vars = variables

    def _peek(self) -> tuple[str, str, int]:
        return self._tokens[self._pos]

    def _next(self) -> tuple[str, str, int]:
        tok = self._tokens[self._pos]
        self._pos += 1
        return tok

    def parse(self) -> Polynomial:
        result = self._expr()
        kind, value, pos = self._peek()
        if kind != "end":
            raise ParseError(f"unexpected {value!r}", pos)
        return result

    def _expr(self) -> Polynomial:
        result = self._term()
        while True:
            kind, value, _ = self._peek()
            if kind == "op" and value in "+-":
                self._next()
                rhs = self._term()
                result = result + rhs if value == "+" else result - rhs
            else:
                return result

    def _term(self) -> Polynomial:
        result = self._factor()
        while True:
            kind, value, _ = self._peek()
            if kind == "op" and value == "*":
                self._next()
                result = result * self._factor()
            else:
                return result

    def _factor(self) -> Polynomial:
        kind, value, _ = self._peek()
        if kind == "op" and value in "+-":
            self._next()
            inner = self._factor()
            return inner if value == "+" else -inner
        base = self._atom()
        kind, value, pos = self._peek()
        if kind == "op" and value == "^":
            self._next()
            kind, value, pos = self._next()
            if kind != "int":
                raise ParseError("exponent must be an integer literal", pos)
            exponent = int(value)
            if exponent > MAX_EXPONENT:
                raise ParseError(
                    f"exponent {exponent} exceeds the maximum of {MAX_EXPONENT}",
                    pos,
                )
            return base ** exponent
        return base

    def _atom(self) -> Polynomial:
        kind, value, pos = self._next()
        if kind == "int":
            return Polynomial.constant(int(value))
        if kind == "name":
            var = self._vars.get(value)
            if var is None:
                raise ParseError(f"undeclared variable {value!r}", pos)
            return Polynomial.variable(var)
        if kind == "op" and value == "(":
            inner = self._expr()
            kind, value, pos = self._next()
            if not (kind == "op" and value == ")"):
                raise ParseError("expected ')'", pos)
            return inner
        if kind == "end":
            raise ParseError("unexpected end of expression", pos)
        raise ParseError(f"unexpected {value!r}", pos)


def parse_expr(text: str,
               variables: Mapping[str, VarId] | Iterable[VarId]) -> Polynomial:
    """Parse an infix expression into an expanded multilinear polynomial.

    The grammar allows integer literals, declared variable labels, the
    operators + - * ^ (exponent a nonnegative integer literal <= 16), and
    parentheses.  Whitespace is insignificant.  Raises ParseError with a
    character position for syntax errors, undeclared variables, and
    oversized exponents.
    """
    if not isinstance(variables, Mapping):
        variables = {v.label: v for v in variables}
    return _Parser(text, variables).parse()
