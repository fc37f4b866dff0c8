"""Sparse exact polynomials in the plane coordinates x, y.

The term map sends exponent pairs ``(a, b)`` (for ``x^a * y^b``) to nonzero
coefficients.  Coefficients are :class:`~starnogo.scalars.Scalar` by default,
but any commutative-ring value supporting ``+``, ``*``, unary ``-`` and
truthiness (false exactly at zero) works, which lets the same class carry
symbolic coefficients.

The module also owns the plain-text polynomial grammar: sums of terms
``c*x^a*y^b`` with integer or rational ``c`` and an optional ``i`` factor;
``*`` and ``^1`` are optional and whitespace is ignored.  A parenthesised
group is allowed only as a mixed complex coefficient, e.g. ``(1+2*i)*x*y``,
which is what the canonical printer emits; the printer/parser pair round-trips
on canonical output.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import ONE, Scalar

Exponents = tuple[int, int]


def _falling(n: int, k: int) -> int:
    out = 1
    for t in range(k):
        out *= n - t
    return out


def _coerce_coeff(value):
    if isinstance(value, (int, Fraction)):
        return Scalar(value)
    return value


class Poly:
    """Sparse polynomial in x and y with exact coefficients.

    Instances are canonical (no stored zero coefficient) and treated as
    immutable; equality and hashing are structural on the term map.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict[Exponents, object] | None = None):
        pruned = {}
        for key, value in (terms or {}).items():
            value = _coerce_coeff(value)
            if value:
                pruned[key] = value
        self.terms = pruned

    # constructors ---------------------------------------------------------

    @classmethod
    def zero(cls) -> "Poly":
        return cls()

    @classmethod
    def constant(cls, value) -> "Poly":
        return cls({(0, 0): value})

    @classmethod
    def monomial(cls, a: int, b: int, coeff=ONE) -> "Poly":
        if a < 0 or b < 0:
            raise ValueError("monomial exponents must be nonnegative")
        return cls({(a, b): coeff})

    # arithmetic -------------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        out = dict(self.terms)
        for key, value in other.terms.items():
            merged = out.get(key)
            merged = value if merged is None else merged + value
            if merged:
                out[key] = merged
            elif key in out:
                del out[key]
        result = Poly.__new__(Poly)
        result.terms = out
        return result

    def __sub__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        result = Poly.__new__(Poly)
        result.terms = {key: -value for key, value in self.terms.items()}
        return result

    def __mul__(self, other):
        if isinstance(other, Poly):
            out: dict[Exponents, object] = {}
            for (a1, b1), c1 in self.terms.items():
                for (a2, b2), c2 in other.terms.items():
                    key = (a1 + a2, b1 + b2)
                    value = c1 * c2
                    merged = out.get(key)
                    merged = value if merged is None else merged + value
                    if merged:
                        out[key] = merged
                    elif key in out:
                        del out[key]
            result = Poly.__new__(Poly)
            result.terms = out
            return result
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, factor) -> "Poly":
        factor = _coerce_coeff(factor)
        if not factor:
            return Poly.zero()
        return Poly({key: value * factor for key, value in self.terms.items()})

    def __pow__(self, n: int) -> "Poly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial exponent must be a nonnegative integer")
        out = Poly.constant(ONE)
        for _ in range(n):
            out = out * self
        return out

    # calculus ---------------------------------------------------------------

    def partial(self, axis: str) -> "Poly":
        """Exact partial derivative along ``"x"`` or ``"y"``."""
        if axis not in ("x", "y"):
            raise ValueError(f"axis must be 'x' or 'y', not {axis!r}")
        out = {}
        for (a, b), c in self.terms.items():
            if axis == "x":
                if a:
                    out[(a - 1, b)] = c * a
            else:
                if b:
                    out[(a, b - 1)] = c * b
        return Poly(out)

    def derive(self, i: int, j: int) -> "Poly":
        """Apply ``d^i/dx^i d^j/dy^j`` in one pass."""
        out = {}
        for (a, b), c in self.terms.items():
            if a < i or b < j:
                continue
            factor = _falling(a, i) * _falling(b, j)
            out[(a - i, b - j)] = c * factor
        return Poly(out)

    # predicates / queries -----------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(a + b for a, b in self.terms)

    def coefficient(self, a: int, b: int):
        return self.terms.get((a, b), Scalar(0))

    def sorted_terms(self):
        """Terms in graded-lex order: total degree, then x-exponent, descending."""
        return sorted(self.terms.items(), key=lambda kv: (-(kv[0][0] + kv[0][1]), -kv[0][0]))

    # formatting -----------------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for key, coeff in self.sorted_terms():
            parts.append(_term_str(key, coeff))
        out = parts[0]
        for part in parts[1:]:
            if part.startswith("-"):
                out += " - " + part[1:]
            else:
                out += " + " + part
        return out

    __repr__ = __str__


X = Poly.monomial(1, 0)
Y = Poly.monomial(0, 1)


def monomial_str(key: Exponents) -> str:
    a, b = key
    parts = []
    if a == 1:
        parts.append("x")
    elif a > 1:
        parts.append(f"x^{a}")
    if b == 1:
        parts.append("y")
    elif b > 1:
        parts.append(f"y^{b}")
    return "*".join(parts)


def _term_str(key: Exponents, coeff) -> str:
    mono = monomial_str(key)
    if isinstance(coeff, Scalar):
        if not mono:
            return str(coeff)
        if coeff == Scalar(1):
            return mono
        if coeff == Scalar(-1):
            return "-" + mono
        if coeff.re == 0 or coeff.im == 0:
            return f"{coeff}*{mono}"
        return f"({coeff})*{mono}"
    text = str(coeff)
    if not mono:
        return f"({text})"
    return f"({text})*{mono}"


# ----------------------------------------------------------------------------
# Parsing
# ----------------------------------------------------------------------------


class PolyParseError(ValueError):
    """Raised for malformed polynomial text; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.message = message
        self.position = position


def _tokenize(text: str):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("int", text[i:j], i))
            i = j
        elif ch in "xyi":
            tokens.append((ch, ch, i))
            i += 1
        elif ch in "+-*/^()":
            tokens.append((ch, ch, i))
            i += 1
        else:
            raise PolyParseError(f"unexpected character {ch!r}", i)
    tokens.append(("end", "", n))
    return tokens


_FACTOR_STARTS = {"int", "x", "y", "i", "("}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def fail(self, message: str):
        raise PolyParseError(message, self.peek()[2])

    # grammar: poly := [sign] term ((+|-) term)*

    def parse(self) -> Poly:
        result = Poly.zero()
        sign = 1
        kind, _, _ = self.peek()
        if kind in ("+", "-"):
            sign = -1 if kind == "-" else 1
            self.take()
        if self.peek()[0] == "end":
            self.fail("expected a term")
        while True:
            result = result + self.parse_term().scale(sign)
            kind, _, _ = self.peek()
            if kind == "end":
                return result
            if kind == "+":
                sign = 1
            elif kind == "-":
                sign = -1
            else:
                self.fail("expected '+' or '-' between terms")
            self.take()
            if self.peek()[0] == "end":
                self.fail("expected a term after sign")

    def parse_term(self) -> Poly:
        coeff = Scalar(1)
        exps = {"x": 0, "y": 0}
        if self.peek()[0] not in _FACTOR_STARTS:
            self.fail("expected a term")
        expect_factor = True
        while expect_factor:
            kind, value, pos = self.peek()
            if kind == "int":
                self.take()
                coeff = coeff * int(value)
            elif kind == "i":
                self.take()
                coeff = coeff * Scalar(0, 1)
            elif kind in ("x", "y"):
                self.take()
                exps[kind] += self.parse_exponent()
            elif kind == "(":
                coeff = coeff * self.parse_paren_scalar()
            else:
                self.fail("expected a factor")
            expect_factor = False
            while True:
                kind, value, pos = self.peek()
                if kind == "/":
                    self.take()
                    kind2, value2, pos2 = self.peek()
                    if kind2 != "int":
                        self.fail("expected an integer denominator after '/'")
                    self.take()
                    den = int(value2)
                    if den == 0:
                        raise PolyParseError("division by zero", pos2)
                    coeff = coeff / den
                    continue
                if kind == "*":
                    self.take()
                    if self.peek()[0] not in _FACTOR_STARTS:
                        self.fail("expected a factor after '*'")
                    expect_factor = True
                break
            if not expect_factor and self.peek()[0] in _FACTOR_STARTS:
                expect_factor = True
        return Poly.monomial(exps["x"], exps["y"], coeff)

    def parse_exponent(self) -> int:
        kind, _, _ = self.peek()
        if kind != "^":
            return 1
        self.take()
        kind, value, pos = self.peek()
        if kind == "-":
            raise PolyParseError("negative exponents are not supported", pos)
        if kind != "int":
            self.fail("expected a nonnegative integer exponent after '^'")
        self.take()
        return int(value)

    def parse_paren_scalar(self) -> Scalar:
        self.take()  # '('
        total = Scalar(0)
        sign = 1
        kind, _, _ = self.peek()
        if kind in ("+", "-"):
            sign = -1 if kind == "-" else 1
            self.take()
        while True:
            total = total + self.parse_scalar_atom() * sign
            kind, _, pos = self.peek()
            if kind == ")":
                self.take()
                return total
            if kind == "+":
                sign = 1
            elif kind == "-":
                sign = -1
            else:
                self.fail("expected '+', '-' or ')' in coefficient group")
            self.take()

    def parse_scalar_atom(self) -> Scalar:
        kind, value, pos = self.peek()
        if kind == "i":
            self.take()
            return Scalar(0, 1)
        if kind != "int":
            self.fail("expected a number or 'i'")
        self.take()
        q = Fraction(int(value))
        kind, value, pos = self.peek()
        if kind == "/":
            self.take()
            kind2, value2, pos2 = self.peek()
            if kind2 != "int":
                self.fail("expected an integer denominator after '/'")
            self.take()
            if int(value2) == 0:
                raise PolyParseError("division by zero", pos2)
            q = q / int(value2)
            kind, value, pos = self.peek()
        if kind == "*":
            if self.tokens[self.pos + 1][0] == "i":
                self.take()
                self.take()
                return Scalar(0, q)
        if kind == "i":
            self.take()
            return Scalar(0, q)
        return Scalar(q)


def parse_poly(text: str) -> Poly:
    """Parse the plain-text polynomial grammar into a canonical :class:`Poly`."""
    return _Parser(text).parse()
