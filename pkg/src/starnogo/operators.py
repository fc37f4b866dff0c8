"""Differential, bidifferential and tridifferential operators on the plane.

Operators are finite sparse maps from derivative multi-indices to
coefficients in a pluggable commutative ring (Scalar for concrete operators,
UnknownExpr for symbolic ansatz coefficients).  Polynomial coefficient
functions are carried structurally: every term key also holds the exponent
pair of its coefficient monomial, so a bidifferential term is

    coeff * x^a*y^b * (d_x^i d_y^j  (x)  d_x^k d_y^l)

keyed by ``((i, j), (k, l), (a, b))``.  All operations are pure and exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial

from .poly import Poly, monomial_str
from .scalars import ONE, Scalar

Index = tuple[int, int]
BiKey = tuple[Index, Index, Index]
TriKey = tuple[Index, Index, Index, Index]


def _falling(n: int, k: int) -> int:
    out = 1
    for t in range(k):
        out *= n - t
    return out


def _add_term(out: dict, key, value) -> None:
    merged = out.get(key)
    merged = value if merged is None else merged + value
    if merged:
        out[key] = merged
    elif key in out:
        del out[key]


# ----------------------------------------------------------------------------
# Vector fields and the Poisson structure
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class VectorField:
    """First-order operator ``coeff_x * d_x + coeff_y * d_y``."""

    coeff_x: Poly
    coeff_y: Poly

    @classmethod
    def zero(cls) -> "VectorField":
        return cls(Poly.zero(), Poly.zero())

    def __call__(self, f: Poly) -> Poly:
        return self.coeff_x * f.partial("x") + self.coeff_y * f.partial("y")

    def __bool__(self) -> bool:
        return bool(self.coeff_x) or bool(self.coeff_y)

    def commutator(self, other: "VectorField") -> "VectorField":
        return VectorField(
            self(other.coeff_x) - other(self.coeff_x),
            self(other.coeff_y) - other(self.coeff_y),
        )

    def __str__(self) -> str:
        parts = []
        if self.coeff_x:
            parts.append(f"({self.coeff_x})*d_x")
        if self.coeff_y:
            parts.append(f"({self.coeff_y})*d_y")
        return " + ".join(parts) if parts else "0"


def poisson(f: Poly, g: Poly) -> Poly:
    """Poisson bracket fixed by the area form: f_x g_y - f_y g_x."""
    return f.partial("x") * g.partial("y") - f.partial("y") * g.partial("x")


def hamiltonian_vf(h: Poly) -> VectorField:
    """Vector field X_h with X_h(f) = {h, f}, i.e. h_x*d_y - h_y*d_x."""
    return VectorField(-h.partial("y"), h.partial("x"))


# ----------------------------------------------------------------------------
# Bidifferential operators
# ----------------------------------------------------------------------------


class _OpBase:
    """Shared sparse-map plumbing for bi- and tridifferential operators."""

    __slots__ = ("terms",)
    _label: str = "C"

    def __init__(self, terms=None):
        pruned = {}
        for key, value in (terms or {}).items():
            if value:
                pruned[key] = value
        self.terms = pruned

    @classmethod
    def zero(cls):
        return cls()

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, type(self)):
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None

    def __add__(self, other):
        if not isinstance(other, type(self)):
            return NotImplemented
        out = dict(self.terms)
        for key, value in other.terms.items():
            _add_term(out, key, value)
        result = type(self).__new__(type(self))
        result.terms = out
        return result

    def __sub__(self, other):
        if not isinstance(other, type(self)):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        result = type(self).__new__(type(self))
        result.terms = {key: -value for key, value in self.terms.items()}
        return result

    def scale(self, factor):
        if not factor:
            return type(self)()
        return type(self)({key: value * factor for key, value in self.terms.items()})

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: kv[0])

    def _key_str(self, key) -> str:
        *derivs, mono = key
        inner = ";".join(f"{i},{j}" for i, j in derivs)
        text = f"{self._label}[{inner}]"
        ms = monomial_str(mono)
        if ms:
            text += f" * {ms}"
        return text

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return "\n".join(f"{self._key_str(k)} = {v}" for k, v in self.sorted_terms())

    __repr__ = __str__


class BiDiffOp(_OpBase):
    """Finite sum of ``coeff * x^a*y^b * (d^(i,j) (x) d^(k,l))`` terms."""

    _label = "C"

    @classmethod
    def tensor(cls, left: Index, right: Index, coeff=ONE, mono: Index = (0, 0)) -> "BiDiffOp":
        return cls({(left, right, mono): coeff})

    @classmethod
    def identity(cls) -> "BiDiffOp":
        """The pointwise product f, g -> f*g."""
        return cls.tensor((0, 0), (0, 0))

    def apply(self, f: Poly, g: Poly) -> Poly:
        """Evaluate on a pair of polynomials; coefficients stay in the ring."""
        out: dict = {}
        for ((i, j), (k, l), (a, b)), coeff in self.terms.items():
            product = f.derive(i, j) * g.derive(k, l)
            for (pa, pb), pc in product.terms.items():
                _add_term(out, (pa + a, pb + b), coeff * pc)
        return Poly(out)


class TriDiffOp(_OpBase):
    """Finite sum of trilinear ``coeff * x^a*y^b * (d1 (x) d2 (x) d3)`` terms."""

    _label = "C"

    def apply(self, f: Poly, g: Poly, h: Poly) -> Poly:
        out: dict = {}
        for ((i1, j1), (i2, j2), (i3, j3), (a, b)), coeff in self.terms.items():
            product = f.derive(i1, j1) * g.derive(i2, j2) * h.derive(i3, j3)
            for (pa, pb), pc in product.terms.items():
                _add_term(out, (pa + a, pb + b), coeff * pc)
        return Poly(out)

    def extract(self, derivs: tuple[Index, Index, Index], mono: Index = (0, 0)):
        """Coefficient at a derivative triple; exact zero when absent."""
        return self.terms.get((*derivs, mono), Scalar(0))


# ----------------------------------------------------------------------------
# The Lie derivative of a bidifferential operator along a vector field
# ----------------------------------------------------------------------------


def lie_derivative(field: VectorField, op: BiDiffOp) -> BiDiffOp:
    """Canonical form of ``X(B(f,g)) - B(Xf, g) - B(f, Xg)``.

    The expansion is fully symbolic: coefficient monomials are differentiated
    and multiplied by the field's polynomial coefficients, and the Leibniz
    commutation of the field through each derivative slot is carried out with
    exact binomial and falling-factorial multiplicities.  The result is zero
    precisely when ``op`` is invariant under ``field``.
    """
    out: dict = {}
    routes = (("x", field.coeff_x), ("y", field.coeff_y))
    for (left, right, (a, b)), coeff in op.terms.items():
        i, j = left
        k, l = right
        for axis, poly in routes:
            for (pa, pb), pc in poly.terms.items():
                base_mono = (a + pa, b + pb)
                scaled = coeff * pc
                # X applied after B: derivative of the coefficient monomial
                # plus one extra derivative pushed onto each slot.
                if axis == "x":
                    if a:
                        _add_term(out, (left, right, (a - 1 + pa, b + pb)), scaled * a)
                    bumped_l = (i + 1, j)
                    bumped_r = (k + 1, l)
                else:
                    if b:
                        _add_term(out, (left, right, (a + pa, b - 1 + pb)), scaled * b)
                    bumped_l = (i, j + 1)
                    bumped_r = (k, l + 1)
                _add_term(out, (bumped_l, right, base_mono), scaled)
                _add_term(out, (left, bumped_r, base_mono), scaled)
                # B(Xf, g): commute d^(i,j) through the coefficient of X.
                ex, ey = (1, 0) if axis == "x" else (0, 1)
                for u in range(min(i, pa) + 1):
                    cu = comb(i, u) * _falling(pa, u)
                    for v in range(min(j, pb) + 1):
                        mult = cu * comb(j, v) * _falling(pb, v)
                        new_left = (i - u + ex, j - v + ey)
                        new_mono = (a + pa - u, b + pb - v)
                        _add_term(out, (new_left, right, new_mono), scaled * (-mult))
                # B(f, Xg): mirrored on the right slot.
                for u in range(min(k, pa) + 1):
                    cu = comb(k, u) * _falling(pa, u)
                    for v in range(min(l, pb) + 1):
                        mult = cu * comb(l, v) * _falling(pb, v)
                        new_right = (k - u + ex, l - v + ey)
                        new_mono = (a + pa - u, b + pb - v)
                        _add_term(out, (left, new_right, new_mono), scaled * (-mult))
    result = BiDiffOp.__new__(BiDiffOp)
    result.terms = out
    return result


# ----------------------------------------------------------------------------
# Leibniz composition into tridifferential operators
# ----------------------------------------------------------------------------


def compose_left(outer: BiDiffOp, inner: BiDiffOp) -> TriDiffOp:
    """Operator T with T(f, g, h) = outer(inner(f, g), h).

    The outer left derivative distributes over the inner coefficient
    monomial, the f-part and the g-part with multinomial multiplicities;
    coefficients multiply in the ring, so symbolic inputs produce quadratic
    unknown terms.
    """
    out: dict = {}
    for ((oi, oj), oright, (oa, ob)), ocoeff in outer.terms.items():
        for ((p, q), (r, s), (ia, ib)), icoeff in inner.terms.items():
            combined = ocoeff * icoeff
            for i1 in range(min(oi, ia) + 1):
                f1 = comb(oi, i1) * _falling(ia, i1)
                for i2 in range(oi - i1 + 1):
                    i3 = oi - i1 - i2
                    ci = f1 * comb(oi - i1, i2)
                    for j1 in range(min(oj, ib) + 1):
                        g1 = comb(oj, j1) * _falling(ib, j1)
                        for j2 in range(oj - j1 + 1):
                            j3 = oj - j1 - j2
                            mult = ci * g1 * comb(oj - j1, j2)
                            if mult == 0:
                                continue
                            key = (
                                (p + i2, q + j2),
                                (r + i3, s + j3),
                                oright,
                                (oa + ia - i1, ob + ib - j1),
                            )
                            _add_term(out, key, combined * mult)
    result = TriDiffOp.__new__(TriDiffOp)
    result.terms = out
    return result


def compose_right(outer: BiDiffOp, inner: BiDiffOp) -> TriDiffOp:
    """Operator T with T(f, g, h) = outer(f, inner(g, h)); mirror of compose_left."""
    out: dict = {}
    for (oleft, (ok, ol), (oa, ob)), ocoeff in outer.terms.items():
        for ((p, q), (r, s), (ia, ib)), icoeff in inner.terms.items():
            combined = ocoeff * icoeff
            for i1 in range(min(ok, ia) + 1):
                f1 = comb(ok, i1) * _falling(ia, i1)
                for i2 in range(ok - i1 + 1):
                    i3 = ok - i1 - i2
                    ci = f1 * comb(ok - i1, i2)
                    for j1 in range(min(ol, ib) + 1):
                        g1 = comb(ol, j1) * _falling(ib, j1)
                        for j2 in range(ol - j1 + 1):
                            j3 = ol - j1 - j2
                            mult = ci * g1 * comb(ol - j1, j2)
                            if mult == 0:
                                continue
                            key = (
                                oleft,
                                (p + i2, q + j2),
                                (r + i3, s + j3),
                                (oa + ia - i1, ob + ib - j1),
                            )
                            _add_term(out, key, combined * mult)
    result = TriDiffOp.__new__(TriDiffOp)
    result.terms = out
    return result


def lift_product(op: BiDiffOp, side: str) -> TriDiffOp:
    """Turn B into a trilinear map through a pointwise product.

    ``side="left"`` gives T(f, g, h) = B(f*g, h) by splitting the left
    derivative binomially between f and g; ``side="right"`` gives
    T(f, g, h) = B(f, g*h).
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', not {side!r}")
    out: dict = {}
    for (left, right, mono), coeff in op.terms.items():
        if side == "left":
            i, j = left
            for u in range(i + 1):
                cu = comb(i, u)
                for v in range(j + 1):
                    mult = cu * comb(j, v)
                    key = ((u, v), (i - u, j - v), right, mono)
                    _add_term(out, key, coeff * mult)
        else:
            k, l = right
            for u in range(k + 1):
                cu = comb(k, u)
                for v in range(l + 1):
                    mult = cu * comb(l, v)
                    key = (left, (u, v), (k - u, l - v), mono)
                    _add_term(out, key, coeff * mult)
    result = TriDiffOp.__new__(TriDiffOp)
    result.terms = out
    return result


# ----------------------------------------------------------------------------
# The constant-coefficient reference product
# ----------------------------------------------------------------------------


def moyal_term(r: int) -> BiDiffOp:
    """Order-r term of the reference product on the plane.

    ``(-i/2)^r / r! * sum_k binom(r,k) (-1)^k d_x^(r-k) d_y^k (x) d_x^k d_y^(r-k)``,
    whose order-0 term is the pointwise product and whose order-1
    antisymmetrisation reproduces -i times the Poisson bracket.
    """
    if r < 0:
        raise ValueError("order must be nonnegative")
    base = Scalar(0, -1) / 2
    factor = (base ** r) / factorial(r)
    terms = {}
    for k in range(r + 1):
        coeff = factor * (comb(r, k) * (-1) ** k)
        terms[((r - k, k), (k, r - k), (0, 0))] = coeff
    return BiDiffOp(terms)
