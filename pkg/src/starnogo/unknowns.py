"""Symbolic unknowns and exact polynomial expressions in them.

An :class:`Unknown` names one scalar coefficient of a candidate operator
term: the coefficient of the monomial ``x^a*y^b`` inside the coefficient
function of ``d^(i,j) (x) d^(k,l)`` at a given order in the deformation
parameter.  :class:`UnknownExpr` is a sparse multivariate polynomial in
unknowns with Gaussian-rational coefficients; linear expressions form the
constraint rows and degree-2 terms arise from associativity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .poly import monomial_str
from .scalars import Scalar

Index = tuple[int, int]


@dataclass(frozen=True, order=True)
class Unknown:
    """Identity of one symbolic coefficient; ordered for deterministic pivoting.

    The total order is lexicographic on ``(level, left, right, mono)``.
    """

    level: int
    left: Index
    right: Index
    mono: Index = (0, 0)

    @property
    def name(self) -> str:
        i, j = self.left
        k, l = self.right
        text = f"C{self.level}[{i},{j};{k},{l}]"
        ms = monomial_str(self.mono)
        if ms:
            text += f"@{ms}"
        return text

    def __str__(self) -> str:
        return self.name

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "left": list(self.left),
            "right": list(self.right),
            "mono": list(self.mono),
            "name": self.name,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Unknown":
        return cls(
            int(data["level"]),
            tuple(int(v) for v in data["left"]),
            tuple(int(v) for v in data["right"]),
            tuple(int(v) for v in data["mono"]),
        )


_COERCIBLE = (int, Fraction, Scalar)

Key = tuple[Unknown, ...]


class UnknownExpr:
    """Sparse exact polynomial in unknowns; the key () holds the constant."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[Key, Scalar] | None = None):
        pruned = {}
        for key, value in (terms or {}).items():
            value = Scalar.coerce(value)
            if value:
                pruned[key] = value
        self.terms = pruned

    # constructors -----------------------------------------------------------

    @classmethod
    def zero(cls) -> "UnknownExpr":
        return cls()

    @classmethod
    def constant(cls, value) -> "UnknownExpr":
        return cls({(): Scalar.coerce(value)})

    @classmethod
    def var(cls, unknown: Unknown) -> "UnknownExpr":
        return cls({(unknown,): Scalar(1)})

    @classmethod
    def coerce(cls, value) -> "UnknownExpr":
        if isinstance(value, UnknownExpr):
            return value
        return cls.constant(value)

    # arithmetic ---------------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, _COERCIBLE):
            other = UnknownExpr.constant(other)
        if not isinstance(other, UnknownExpr):
            return NotImplemented
        out = dict(self.terms)
        for key, value in other.terms.items():
            merged = out.get(key)
            merged = value if merged is None else merged + value
            if merged:
                out[key] = merged
            elif key in out:
                del out[key]
        result = UnknownExpr.__new__(UnknownExpr)
        result.terms = out
        return result

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, _COERCIBLE):
            other = UnknownExpr.constant(other)
        if not isinstance(other, UnknownExpr):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        result = UnknownExpr.__new__(UnknownExpr)
        result.terms = {key: -value for key, value in self.terms.items()}
        return result

    def __mul__(self, other):
        if isinstance(other, _COERCIBLE):
            factor = Scalar.coerce(other)
            if not factor:
                return UnknownExpr.zero()
            result = UnknownExpr.__new__(UnknownExpr)
            result.terms = {key: value * factor for key, value in self.terms.items()}
            return result
        if not isinstance(other, UnknownExpr):
            return NotImplemented
        out: dict[Key, Scalar] = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                key = tuple(sorted(k1 + k2))
                value = c1 * c2
                merged = out.get(key)
                merged = value if merged is None else merged + value
                if merged:
                    out[key] = merged
                elif key in out:
                    del out[key]
        result = UnknownExpr.__new__(UnknownExpr)
        result.terms = out
        return result

    __rmul__ = __mul__

    # predicates / queries ------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, _COERCIBLE):
            other = UnknownExpr.constant(other)
        if not isinstance(other, UnknownExpr):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def degree(self) -> int:
        if not self.terms:
            return 0
        return max(len(key) for key in self.terms)

    def is_constant(self) -> bool:
        return all(not key for key in self.terms)

    def constant_value(self) -> Scalar:
        return self.terms.get((), Scalar(0))

    def is_linear(self) -> bool:
        return all(len(key) <= 1 for key in self.terms)

    def linear_parts(self) -> tuple[Scalar, dict[Unknown, Scalar]]:
        """Split a linear expression into (constant, coefficient map)."""
        const = Scalar(0)
        coeffs: dict[Unknown, Scalar] = {}
        for key, value in self.terms.items():
            if not key:
                const = value
            elif len(key) == 1:
                coeffs[key[0]] = value
            else:
                raise ValueError(f"expression is not linear: {self}")
        return const, coeffs

    def unknowns(self) -> set[Unknown]:
        out: set[Unknown] = set()
        for key in self.terms:
            out.update(key)
        return out

    def single_square(self) -> tuple[Scalar, Unknown] | None:
        """Recognise the exact shape ``c * u^2`` with c != 0; else None."""
        if len(self.terms) != 1:
            return None
        (key, value), = self.terms.items()
        if len(key) == 2 and key[0] == key[1]:
            return value, key[0]
        return None

    # substitution ----------------------------------------------------------------

    def substitute(self, mapping: Mapping[Unknown, "UnknownExpr | Scalar | int"]) -> "UnknownExpr":
        """Replace mapped unknowns and expand products exactly."""
        if not mapping:
            return self
        result = UnknownExpr.zero()
        for key, coeff in self.terms.items():
            acc = UnknownExpr.constant(coeff)
            for unknown in key:
                replacement = mapping.get(unknown)
                if replacement is None:
                    acc = acc * UnknownExpr.var(unknown)
                else:
                    acc = acc * UnknownExpr.coerce(replacement)
                if not acc:
                    break
            result = result + acc
        return result

    # formatting ----------------------------------------------------------------

    @staticmethod
    def _key_str(key: Key) -> str:
        parts = []
        run_start = 0
        while run_start < len(key):
            run_end = run_start
            while run_end < len(key) and key[run_end] == key[run_start]:
                run_end += 1
            power = run_end - run_start
            text = key[run_start].name
            parts.append(text if power == 1 else f"{text}^{power}")
            run_start = run_end
        return "*".join(parts)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        keys = sorted(self.terms, key=lambda k: (len(k) == 0, k))
        parts = []
        for key in keys:
            coeff = self.terms[key]
            if not key:
                parts.append(str(coeff))
                continue
            ks = self._key_str(key)
            if coeff == Scalar(1):
                parts.append(ks)
            elif coeff == Scalar(-1):
                parts.append("-" + ks)
            elif coeff.re == 0 or coeff.im == 0:
                parts.append(f"{coeff}*{ks}")
            else:
                parts.append(f"({coeff})*{ks}")
        out = parts[0]
        for part in parts[1:]:
            if part.startswith("-"):
                out += " - " + part[1:]
            else:
                out += " + " + part
        return out

    __repr__ = __str__
