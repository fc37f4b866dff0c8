"""Constraint generation and exact linear elimination over Q(i).

The constraint systems are ordered lists of expressions asserted equal to
zero, each carrying provenance back to the generator and operator key that
produced it.  Elimination is deterministic Gauss reduction in the fixed
unknown order, producing a fully reduced triangular substitution; an
inconsistent row (nonzero constant = 0) is reported as data, not raised,
because infeasibility is the interesting outcome.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .operators import BiDiffOp, VectorField, lie_derivative
from .scalars import Scalar
from .unknowns import Unknown, UnknownExpr

Index = tuple[int, int]


# ----------------------------------------------------------------------------
# Rows and systems
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class Provenance:
    kind: str
    generator: str | None = None
    rule: str | None = None
    key: tuple | None = None

    def __str__(self) -> str:
        parts = [self.kind]
        if self.generator is not None:
            parts.append(f"generator={self.generator}")
        if self.rule is not None:
            parts.append(f"rule={self.rule}")
        if self.key is not None:
            parts.append(f"key={self.key}")
        return " ".join(parts)


@dataclass(frozen=True)
class Row:
    expr: UnknownExpr
    provenance: Provenance

    def __str__(self) -> str:
        return f"{self.expr} = 0"


class ConstraintSystem:
    """Ordered rows over a fixed universe of unknowns."""

    def __init__(self, rows: Iterable[Row], universe: Iterable[Unknown]):
        self.rows: tuple[Row, ...] = tuple(rows)
        self.universe: tuple[Unknown, ...] = tuple(sorted(set(universe)))

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    @classmethod
    def merge(cls, *systems: "ConstraintSystem") -> "ConstraintSystem":
        rows: list[Row] = []
        universe: set[Unknown] = set()
        for system in systems:
            rows.extend(system.rows)
            universe.update(system.universe)
        return cls(rows, universe)

    def to_text(self) -> str:
        lines = []
        for idx, row in enumerate(self.rows):
            lines.append(f"{idx} | {row.provenance} | {row.expr} = 0")
        return "\n".join(lines)


# ----------------------------------------------------------------------------
# Ansatz construction
# ----------------------------------------------------------------------------


def build_ansatz(level: int, slot_bound: int, coeff_degree: int) -> BiDiffOp:
    """Candidate operator with one unknown per derivative pair and monomial.

    Unknowns cover left and right derivative indices of total order up to
    ``slot_bound`` and coefficient monomials of total degree up to
    ``coeff_degree``, so constancy of the surviving coefficients is derived
    rather than assumed.
    """
    if level < 1:
        raise ValueError("level must be a positive integer")
    if slot_bound < 0 or coeff_degree < 0:
        raise ValueError("bounds must be nonnegative")
    terms = {}
    for i in range(slot_bound + 1):
        for j in range(slot_bound + 1 - i):
            for k in range(slot_bound + 1):
                for l in range(slot_bound + 1 - k):
                    for a in range(coeff_degree + 1):
                        for b in range(coeff_degree + 1 - a):
                            unknown = Unknown(level, (i, j), (k, l), (a, b))
                            terms[((i, j), (k, l), (a, b))] = UnknownExpr.var(unknown)
    return BiDiffOp(terms)


def ansatz_unknowns(op: BiDiffOp) -> tuple[Unknown, ...]:
    out: set[Unknown] = set()
    for value in op.terms.values():
        if isinstance(value, UnknownExpr):
            out.update(value.unknowns())
    return tuple(sorted(out))


# ----------------------------------------------------------------------------
# Invariance rows
# ----------------------------------------------------------------------------


def invariance_rows(field: VectorField, op: BiDiffOp, label: str | None = None) -> ConstraintSystem:
    """One linear row per nonzero coefficient of the Lie derivative."""
    derived = lie_derivative(field, op)
    generator = label if label is not None else str(field)
    rows = []
    for key in sorted(derived.terms):
        expr = UnknownExpr.coerce(derived.terms[key])
        if not expr.is_linear():
            raise ValueError("invariance rows require an ansatz linear in unknowns")
        rows.append(Row(expr, Provenance("invariance", generator=generator, key=key)))
    return ConstraintSystem(rows, ansatz_unknowns(op))


# ----------------------------------------------------------------------------
# Substitution and elimination
# ----------------------------------------------------------------------------


class Substitution(Mapping[Unknown, UnknownExpr]):
    """Triangular solved form: each unknown maps to an expression in strictly
    smaller unknowns, fully reduced so that applying it twice equals once."""

    def __init__(self, mapping: dict[Unknown, UnknownExpr]):
        self._map = dict(mapping)

    def __getitem__(self, key: Unknown) -> UnknownExpr:
        return self._map[key]

    def __iter__(self):
        return iter(self._map)

    def __len__(self) -> int:
        return len(self._map)

    def __eq__(self, other):
        if isinstance(other, Substitution):
            return self._map == other._map
        return NotImplemented

    def apply(self, expr: UnknownExpr) -> UnknownExpr:
        return expr.substitute(self._map)

    def zeros(self) -> dict[Unknown, UnknownExpr]:
        """The vanishing entries u -> 0 of the solved form."""
        zero = UnknownExpr.zero()
        return {u: zero for u, e in self._map.items() if not e}

    def to_text(self) -> str:
        return "\n".join(f"{u} -> {e}" for u, e in sorted(self._map.items()))


def substitute(expr: UnknownExpr, substitution: Mapping[Unknown, UnknownExpr]) -> UnknownExpr:
    """Apply a solved form to an expression, expanding products exactly."""
    if isinstance(substitution, Substitution):
        return substitution.apply(expr)
    return expr.substitute(substitution)


@dataclass(frozen=True)
class Elimination:
    substitution: Substitution
    residual: ConstraintSystem
    free: tuple[Unknown, ...]

    @property
    def infeasible(self) -> bool:
        return bool(self.residual.rows)


def eliminate(system: ConstraintSystem) -> Elimination:
    """Deterministic exact Gauss elimination of the linear rows.

    Rows are processed in order; each is reduced by the current solved form
    and then pivoted on its largest unknown.  Earlier pivots' right-hand
    sides are back-substituted immediately, keeping the solved form fully
    reduced.  A row that reduces to a nonzero constant lands in the residual
    system instead of raising.
    """
    solved: dict[Unknown, tuple[Scalar, dict[Unknown, Scalar]]] = {}
    occurs: dict[Unknown, set[Unknown]] = {}
    residual_rows: list[Row] = []
    seen: set = set()

    for row in system.rows:
        const, coeffs = row.expr.linear_parts()
        coeffs = dict(coeffs)
        # reduce by the current solved form
        for unknown in [u for u in coeffs if u in solved]:
            factor = coeffs.pop(unknown)
            rhs_const, rhs_coeffs = solved[unknown]
            const = const + factor * rhs_const
            for v, cv in rhs_coeffs.items():
                merged = coeffs.get(v)
                merged = factor * cv if merged is None else merged + factor * cv
                if merged:
                    coeffs[v] = merged
                elif v in coeffs:
                    del coeffs[v]
        if not coeffs:
            if const:
                reduced = UnknownExpr.constant(const)
                residual_rows.append(Row(reduced, row.provenance))
            continue
        # dedupe identical reduced rows (scaled copies arise across generators)
        pivot = max(coeffs)
        lead = coeffs[pivot]
        signature = (
            tuple(sorted((u, (c / lead).exact()) for u, c in coeffs.items())),
            (const / lead).exact(),
        )
        if signature in seen:
            continue
        seen.add(signature)
        coeffs.pop(pivot)
        rhs_const = -const / lead
        rhs_coeffs = {v: -cv / lead for v, cv in coeffs.items()}
        # back-substitute into earlier pivots that mention the new pivot
        for parent in occurs.pop(pivot, ()):  # set of pivots
            p_const, p_coeffs = solved[parent]
            factor = p_coeffs.pop(pivot)
            p_const = p_const + factor * rhs_const
            for v, cv in rhs_coeffs.items():
                merged = p_coeffs.get(v)
                merged = factor * cv if merged is None else merged + factor * cv
                if merged:
                    p_coeffs[v] = merged
                    occurs.setdefault(v, set()).add(parent)
                else:
                    if v in p_coeffs:
                        del p_coeffs[v]
                    bucket = occurs.get(v)
                    if bucket is not None:
                        bucket.discard(parent)
            solved[parent] = (p_const, p_coeffs)
        solved[pivot] = (rhs_const, rhs_coeffs)
        for v in rhs_coeffs:
            occurs.setdefault(v, set()).add(pivot)

    mapping = {}
    for unknown in sorted(solved):
        rhs_const, rhs_coeffs = solved[unknown]
        terms: dict = {}
        if rhs_const:
            terms[()] = rhs_const
        for v, cv in rhs_coeffs.items():
            terms[(v,)] = cv
        mapping[unknown] = UnknownExpr(terms)
    substitution = Substitution(mapping)
    free = tuple(u for u in system.universe if u not in mapping)
    residual = ConstraintSystem(residual_rows, system.universe)
    return Elimination(substitution, residual, free)


# ----------------------------------------------------------------------------
# Closed-form rule oracle
# ----------------------------------------------------------------------------

RULE_CONSTANT = "constant-coefficients"
RULE_SUPPORT = "support"
RULE_SHIFT1 = "index-shift-1"
RULE_SHIFT2 = "index-shift-2"


def prop1_oracle(op: BiDiffOp) -> ConstraintSystem:
    """Constraint rows from the four closed-form rule families.

    Generated directly from the rules, independent of the Lie-derivative
    engine: coefficients are constants; entries with ``i > l`` or ``j < k``
    vanish; and the two sign-flip families relate entries along diagonal
    index shifts.  The ansatz is a truncation, so rule instances whose
    partner falls outside the truncated index set read the partner as zero.
    """
    universe = set(ansatz_unknowns(op))
    rows: list[Row] = []

    def var(u: Unknown) -> UnknownExpr:
        return UnknownExpr.var(u)

    for u in sorted(universe):
        i, j = u.left
        k, l = u.right
        if u.mono != (0, 0):
            rows.append(Row(var(u), Provenance("oracle", rule=RULE_CONSTANT)))
            continue
        if i > l or j < k:
            rows.append(Row(var(u), Provenance("oracle", rule=RULE_SUPPORT)))
        level = u.level
        if j >= 1 and k >= 1:
            partner = Unknown(level, (i + 1, j - 1), (k - 1, l + 1))
            if partner in universe:
                rows.append(
                    Row(var(u) + var(partner), Provenance("oracle", rule=RULE_SHIFT1))
                )
            else:
                rows.append(
                    Row(var(u), Provenance("oracle", rule=f"{RULE_SHIFT1} (truncated partner)"))
                )
        if j >= 1 and k >= 2:
            partner = Unknown(level, (i + 2, j - 1), (k - 2, l + 1))
            if partner in universe:
                rows.append(
                    Row(var(u) + var(partner), Provenance("oracle", rule=RULE_SHIFT2))
                )
            else:
                rows.append(
                    Row(var(u), Provenance("oracle", rule=f"{RULE_SHIFT2} (truncated partner)"))
                )
        # instances whose left-hand entry lies beyond the truncation but
        # whose partner is this unknown: the rule then forces the partner.
        if i >= 2 and l >= 1:
            source = Unknown(level, (i - 2, j + 1), (k + 2, l - 1))
            if source not in universe:
                rows.append(
                    Row(var(u), Provenance("oracle", rule=f"{RULE_SHIFT2} (truncated source)"))
                )
        if i >= 1 and l >= 1:
            source = Unknown(level, (i - 1, j + 1), (k + 1, l - 1))
            if source not in universe:
                rows.append(
                    Row(var(u), Provenance("oracle", rule=f"{RULE_SHIFT1} (truncated source)"))
                )
    return ConstraintSystem(rows, universe)


# ----------------------------------------------------------------------------
# Solution-space comparison
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class EquivalenceReport:
    equivalent: bool
    elimination_a: Elimination
    elimination_b: Elimination
    mismatches: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.equivalent


def systems_equivalent(system_a: ConstraintSystem, system_b: ConstraintSystem) -> EquivalenceReport:
    """Compare solution spaces via the canonical reduced solved forms.

    Both systems must share a universe.  Because elimination produces the
    unique fully reduced echelon solved form in the fixed unknown order,
    equal substitutions and equal free sets are equivalent to equal solution
    spaces.
    """
    if tuple(system_a.universe) != tuple(system_b.universe):
        raise ValueError("systems compare over different unknown universes")
    elim_a = eliminate(system_a)
    elim_b = eliminate(system_b)
    mismatches: list[str] = []
    if elim_a.infeasible != elim_b.infeasible:
        mismatches.append("one system is infeasible and the other is not")
    if elim_a.free != elim_b.free:
        only_a = set(elim_a.free) - set(elim_b.free)
        only_b = set(elim_b.free) - set(elim_a.free)
        mismatches.append(f"free unknowns differ: only_a={sorted(only_a)} only_b={sorted(only_b)}")
    solved_a = elim_a.substitution
    solved_b = elim_b.substitution
    for unknown in sorted(set(solved_a) | set(solved_b)):
        ea = solved_a._map.get(unknown)
        eb = solved_b._map.get(unknown)
        if ea != eb:
            mismatches.append(f"{unknown}: {ea} vs {eb}")
            if len(mismatches) > 12:
                break
    return EquivalenceReport(not mismatches, elim_a, elim_b, tuple(mismatches))
