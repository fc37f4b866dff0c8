"""Order-by-order associativity of truncated formal star products.

A truncated product is a list of bidifferential terms C0..CR with C0 the
pointwise product.  The order-n residual is the Gerstenhaber sum

    sum_{r+s=n} [ C^r(C^s(f,g), h) - C^r(f, C^s(g,h)) ]

expanded into a canonical tridifferential operator; it vanishes exactly when
associativity holds at that order.  A separate brute-force check evaluates
both associations on monomial triples, independent of the composition
machinery, so the two routes validate each other.
"""

from __future__ import annotations

from dataclasses import dataclass

from .operators import BiDiffOp, TriDiffOp, compose_left, compose_right, moyal_term
from .poly import Poly, monomial_str
from .scalars import Scalar

Index = tuple[int, int]

_SLOT_NAMES = ("f", "g", "h")


def _slot_str(name: str, deriv: Index) -> str:
    i, j = deriv
    if i == 0 and j == 0:
        return name
    return f"{name}_" + "x" * i + "y" * j


@dataclass(frozen=True)
class ResidualTarget:
    """A named coefficient of the residual: derivative triple plus monomial."""

    derivs: tuple[Index, Index, Index]
    mono: Index = (0, 0)

    def label(self) -> str:
        text = "*".join(_slot_str(n, d) for n, d in zip(_SLOT_NAMES, self.derivs))
        ms = monomial_str(self.mono)
        return f"{ms}*{text}" if ms else text

    def __str__(self) -> str:
        return self.label()

    def to_json(self) -> dict:
        return {"derivs": [list(d) for d in self.derivs], "mono": list(self.mono)}

    @classmethod
    def from_json(cls, data: dict) -> "ResidualTarget":
        derivs = tuple(tuple(int(v) for v in d) for d in data["derivs"])
        return cls(derivs, tuple(int(v) for v in data["mono"]))


class FormalStarProduct:
    """Terms C0..CR of a truncated star product; C0 is the pointwise product."""

    def __init__(self, terms: list[BiDiffOp]):
        if not terms:
            raise ValueError("a star product needs at least its order-0 term")
        if terms[0] != BiDiffOp.identity():
            raise ValueError("the order-0 term must be the pointwise product")
        self.terms: tuple[BiDiffOp, ...] = tuple(terms)

    @property
    def truncation_order(self) -> int:
        return len(self.terms) - 1

    def term(self, r: int) -> BiDiffOp:
        if 0 <= r < len(self.terms):
            return self.terms[r]
        return BiDiffOp.zero()

    @classmethod
    def moyal(cls, order: int) -> "FormalStarProduct":
        return cls([moyal_term(r) for r in range(order + 1)])


def assoc_residual(star: FormalStarProduct, n: int) -> TriDiffOp:
    """Left-minus-right of the order-n associativity identity."""
    if n < 1:
        raise ValueError("the associativity residual is defined for n >= 1")
    residual = TriDiffOp.zero()
    for r in range(n + 1):
        s = n - r
        outer = star.term(r)
        inner = star.term(s)
        if not outer or not inner:
            continue
        residual = residual + compose_left(outer, inner) - compose_right(outer, inner)
    return residual


def extract(residual: TriDiffOp, target: ResidualTarget):
    """Canonical coefficient at the target; exact zero when absent."""
    return residual.extract(target.derivs, target.mono)


# ----------------------------------------------------------------------------
# Direct numeric verification (independent of the composition machinery)
# ----------------------------------------------------------------------------


def star_series(star: FormalStarProduct, left: list[Poly], right: list[Poly], max_order: int) -> list[Poly]:
    """Product of two truncated series in the deformation parameter."""
    out = [Poly.zero() for _ in range(max_order + 1)]
    for a, fa in enumerate(left):
        if a > max_order or not fa:
            continue
        for b, gb in enumerate(right):
            if a + b > max_order or not gb:
                continue
            for r in range(max_order - a - b + 1):
                term = star.term(r)
                if not term:
                    continue
                out[a + b + r] = out[a + b + r] + term.apply(fa, gb)
    return out


@dataclass(frozen=True)
class AssocFailure:
    order: int
    f: Index
    g: Index
    h: Index
    residual: Poly

    def __str__(self) -> str:
        def mono(m: Index) -> str:
            return monomial_str(m) or "1"

        return (
            f"order={self.order} f={mono(self.f)} g={mono(self.g)} "
            f"h={mono(self.h)} residual={self.residual}"
        )


@dataclass(frozen=True)
class AssocReport:
    max_order: int
    max_degree: int
    triples_checked: int
    failures: tuple[AssocFailure, ...]

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_text(self) -> str:
        lines = [
            f"associativity check: orders 1..{self.max_order}, "
            f"monomials up to degree {self.max_degree}, "
            f"{self.triples_checked} triples",
        ]
        if self.ok:
            lines.append("no failures")
        else:
            lines.extend(str(f) for f in self.failures)
        return "\n".join(lines)


def assoc_check_numeric(star: FormalStarProduct, max_order: int, max_degree: int) -> AssocReport:
    """Compare (f*g)*h with f*(g*h) on all monomial triples, order by order."""
    monomials = [
        (a, b)
        for total in range(max_degree + 1)
        for a in range(total + 1)
        for b in [total - a]
    ]
    polys = {m: Poly.monomial(*m) for m in monomials}
    failures: list[AssocFailure] = []
    pair_cache: dict[tuple[Index, Index], list[Poly]] = {}

    def star_pair(m1: Index, m2: Index) -> list[Poly]:
        cached = pair_cache.get((m1, m2))
        if cached is None:
            cached = star_series(star, [polys[m1]], [polys[m2]], max_order)
            pair_cache[(m1, m2)] = cached
        return cached

    count = 0
    for m1 in monomials:
        for m2 in monomials:
            fg = star_pair(m1, m2)
            for m3 in monomials:
                count += 1
                left = star_series(star, fg, [polys[m3]], max_order)
                gh = star_pair(m2, m3)
                right = star_series(star, [polys[m1]], gh, max_order)
                for order in range(1, max_order + 1):
                    diff = left[order] - right[order]
                    if diff:
                        failures.append(AssocFailure(order, m1, m2, m3, diff))
    return AssocReport(max_order, max_degree, count, tuple(failures))
