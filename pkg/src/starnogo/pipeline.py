"""Pipelines: ansatz -> invariance -> associativity -> certificate, plus controls.

``run_nogo`` drives the full search: it builds symbolic order-1 and order-2
ansatz operators, derives and eliminates the invariance constraints of the
configured Hamiltonian action, reduces the order-2 associativity residual at
the configured coefficient targets with the vanishing part of the solved
form, recognises forced zeros of the narrow shape ``c*u^2``, and finally
substitutes them into the bracket normalization row.  A row reducing to a
nonzero constant yields an INFEASIBLE certificate; any target of
unrecognised shape yields FEASIBLE-UNDECIDED with the unreduced expressions
attached rather than a guess.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .assoc import (
    AssocReport,
    FormalStarProduct,
    ResidualTarget,
    assoc_check_numeric,
    extract,
)
from .certificate import (
    ENGINE_VERSION,
    STATUS_INFEASIBLE,
    STATUS_UNDECIDED,
    Certificate,
    Contradiction,
    ForcedZero,
    TargetRecord,
    ZeroFact,
    expr_to_json,
)
from .constraints import (
    ConstraintSystem,
    Elimination,
    build_ansatz,
    ansatz_unknowns,
    eliminate,
    invariance_rows,
    prop1_oracle,
    systems_equivalent,
)
from .operators import BiDiffOp, TriDiffOp, compose_left, compose_right, hamiltonian_vf, lie_derivative, moyal_term
from .poly import Poly, parse_poly
from .scalars import Scalar
from .unknowns import Unknown, UnknownExpr

Index = tuple[int, int]


def default_hamiltonians() -> tuple[Poly, ...]:
    return tuple(parse_poly(text) for text in ("x^3", "x^2", "x", "y", "1"))


DEFAULT_TARGETS = (
    ResidualTarget(((0, 2), (1, 0), (1, 0))),
    ResidualTarget(((2, 0), (0, 1), (0, 1))),
)

_NORM_LEFT = Unknown(1, (1, 0), (0, 1))
_NORM_RIGHT = Unknown(1, (0, 1), (1, 0))


@dataclass(frozen=True)
class NogoConfig:
    """Search configuration; the defaults reproduce the flagship action."""

    hamiltonians: tuple[Poly, ...] = ()
    slot_bound_c1: int = 4
    slot_bound_c2: int = 4
    coeff_degree: int = 2
    targets: tuple[ResidualTarget, ...] = DEFAULT_TARGETS

    def __post_init__(self):
        if not self.hamiltonians:
            object.__setattr__(self, "hamiltonians", default_hamiltonians())

    def validate(self) -> None:
        if not self.hamiltonians:
            raise ValueError("at least one Hamiltonian is required")
        # below slot bound 2 the residual targets cannot receive contributions
        if self.slot_bound_c1 < 2 or self.slot_bound_c2 < 2:
            raise ValueError("slot bounds must be at least 2")
        if self.coeff_degree < 0:
            raise ValueError("coefficient degree must be nonnegative")
        if not self.targets:
            raise ValueError("at least one residual target is required")

    def normalization_expr(self) -> UnknownExpr:
        """Row asserting that the order-1 commutator matches -i times the bracket."""
        return (
            UnknownExpr.var(_NORM_LEFT)
            - UnknownExpr.var(_NORM_RIGHT)
            + UnknownExpr.constant(Scalar(0, 1))
        )

    def normalization_text(self) -> str:
        return f"{_NORM_LEFT.name} - {_NORM_RIGHT.name} = -i"

    def echo(self) -> dict:
        return {
            "hamiltonians": [str(h) for h in self.hamiltonians],
            "slot_bound_c1": self.slot_bound_c1,
            "slot_bound_c2": self.slot_bound_c2,
            "coeff_degree": self.coeff_degree,
            "targets": [t.to_json() for t in self.targets],
            "normalization": self.normalization_text(),
        }


# ----------------------------------------------------------------------------
# Invariance stage
# ----------------------------------------------------------------------------


def invariance_system(
    hamiltonians: tuple[Poly, ...], ansatzes: tuple[BiDiffOp, ...]
) -> ConstraintSystem:
    systems = []
    for h in hamiltonians:
        field = hamiltonian_vf(h)
        for ansatz in ansatzes:
            systems.append(invariance_rows(field, ansatz, label=str(h)))
    return ConstraintSystem.merge(*systems)


def _classify_zero(u: Unknown) -> str:
    if u.mono != (0, 0):
        return "constant-coefficients"
    i, j = u.left
    k, l = u.right
    if i > l or j < k:
        return "support"
    return "eliminated"


# ----------------------------------------------------------------------------
# Target-focused associativity residual
# ----------------------------------------------------------------------------


def _le(a: Index, b: Index) -> bool:
    return a[0] <= b[0] and a[1] <= b[1]


def _filter_op(op: BiDiffOp, keep) -> BiDiffOp:
    out = BiDiffOp.__new__(BiDiffOp)
    out.terms = {key: value for key, value in op.terms.items() if keep(key)}
    return out


def targets_residual(
    c1: BiDiffOp, c2: BiDiffOp, targets: tuple[ResidualTarget, ...], coeff_degree: int
) -> TriDiffOp:
    """Order-2 residual restricted to terms that can reach the targets.

    Composition leaves the outer operator's passive slot untouched, so an
    outer term contributes only when that slot equals a target slot exactly
    and its coefficient monomial fits inside the target monomial.  An inner
    term needs slotwise orders bounded by the two target slots it feeds, and
    the outer active slot is bounded by those two slots plus the inner
    monomial degree (outer derivatives may fall on the inner coefficient
    monomial).  Dropping the other terms cannot change the extracted target
    coefficients.
    """
    pad = (coeff_degree, coeff_degree)

    def covers_left_inner(key) -> bool:
        left, right, _mono = key
        return any(_le(left, t.derivs[0]) and _le(right, t.derivs[1]) for t in targets)

    def covers_left_outer(key) -> bool:
        left, right, mono = key
        for t in targets:
            bound = (
                t.derivs[0][0] + t.derivs[1][0] + pad[0],
                t.derivs[0][1] + t.derivs[1][1] + pad[1],
            )
            if right == t.derivs[2] and _le(left, bound) and _le(mono, t.mono):
                return True
        return False

    def covers_right_inner(key) -> bool:
        left, right, _mono = key
        return any(_le(left, t.derivs[1]) and _le(right, t.derivs[2]) for t in targets)

    def covers_right_outer(key) -> bool:
        left, right, mono = key
        for t in targets:
            bound = (
                t.derivs[1][0] + t.derivs[2][0] + pad[0],
                t.derivs[1][1] + t.derivs[2][1] + pad[1],
            )
            if left == t.derivs[0] and _le(right, bound) and _le(mono, t.mono):
                return True
        return False

    def roles(op: BiDiffOp) -> dict[str, BiDiffOp]:
        return {
            "outer_left": _filter_op(op, covers_left_outer),
            "inner_left": _filter_op(op, covers_left_inner),
            "outer_right": _filter_op(op, covers_right_outer),
            "inner_right": _filter_op(op, covers_right_inner),
        }

    by_level = {0: roles(BiDiffOp.identity()), 1: roles(c1), 2: roles(c2)}
    residual = TriDiffOp.zero()
    for r in range(3):
        s = 2 - r
        residual = residual + compose_left(by_level[r]["outer_left"], by_level[s]["inner_left"])
        residual = residual - compose_right(by_level[r]["outer_right"], by_level[s]["inner_right"])
    return residual


# ----------------------------------------------------------------------------
# The no-go pipeline
# ----------------------------------------------------------------------------


def run_nogo(config: NogoConfig | None = None) -> Certificate:
    config = config or NogoConfig()
    config.validate()

    ansatz1 = build_ansatz(1, config.slot_bound_c1, config.coeff_degree)
    ansatz2 = build_ansatz(2, config.slot_bound_c2, config.coeff_degree)
    system = invariance_system(config.hamiltonians, (ansatz1, ansatz2))
    elimination = eliminate(system)
    zeros = elimination.substitution.zeros()

    # Stage the reduction the way the derivation proceeds: coefficient
    # monomials whose unknowns are already forced to zero are folded into
    # the operators before the residual is expanded (only finitely many
    # constant entries can then contribute to a fixed target, which is what
    # stabilises certificates across slot bounds); the remaining zero facts
    # are applied to the recorded target expressions afterwards.
    constancy = {u: z for u, z in zeros.items() if u.mono != (0, 0)}

    def fold(op: BiDiffOp) -> BiDiffOp:
        out = BiDiffOp.__new__(BiDiffOp)
        out.terms = {}
        for key, value in op.terms.items():
            reduced = value.substitute(constancy)
            if reduced:
                out.terms[key] = reduced
        return out

    residual = targets_residual(fold(ansatz1), fold(ansatz2), config.targets, config.coeff_degree)

    records: list[TargetRecord] = []
    forced: list[ForcedZero] = []
    unrecognized: list[int] = []
    for idx, target in enumerate(config.targets):
        before = UnknownExpr.coerce(extract(residual, target))
        after = before.substitute(zeros)
        forced_unknown = None
        square_coeff = None
        if after:
            square = after.single_square()
            if square is None:
                unrecognized.append(idx)
            else:
                square_coeff, forced_unknown = square
                forced.append(
                    ForcedZero(
                        forced_unknown,
                        idx,
                        f"residual coefficient of {target.label()} reduces to "
                        f"{after} = 0, so {forced_unknown.name} = 0",
                    )
                )
        records.append(
            TargetRecord(
                target.derivs,
                target.mono,
                target.label(),
                before,
                after,
                forced_unknown,
                square_coeff,
            )
        )

    cited: set[Unknown] = set()
    for record in records:
        cited.update(record.expr_before.unknowns())
    zero_facts = tuple(
        ZeroFact(u, _classify_zero(u)) for u in sorted(cited) if u in zeros
    )
    free_unknowns = tuple(
        sorted(set().union(*(record.expr_after.unknowns() for record in records)))
        if records
        else ()
    )

    notes: list[str] = []
    contradiction = None
    if unrecognized:
        status = STATUS_UNDECIDED
        notes.append(
            "targets "
            + ", ".join(str(i) for i in unrecognized)
            + " did not reduce to a recognised forced-zero shape; "
            "their unreduced expressions are attached"
        )
    elif not forced:
        status = STATUS_UNDECIDED
        notes.append("no forced zeros arose at the configured targets")
    else:
        norm = config.normalization_expr()
        forced_map = {fz.unknown: UnknownExpr.zero() for fz in forced}
        reduced = norm.substitute(forced_map)
        if reduced.is_constant() and reduced.constant_value():
            status = STATUS_INFEASIBLE
            contradiction = Contradiction(
                config.normalization_text(),
                norm,
                reduced.constant_value(),
                ("normalization",) + tuple(fz.unknown.name for fz in forced),
            )
        else:
            status = STATUS_UNDECIDED
            notes.append(
                "the forced zeros do not contradict the normalization row "
                f"(it reduces to {reduced})"
            )

    return Certificate(
        status=status,
        config=config.echo(),
        zero_facts=zero_facts,
        free_unknowns=free_unknowns,
        targets=tuple(records),
        forced_zeros=tuple(forced),
        contradiction=contradiction,
        notes=tuple(notes),
        engine_version=ENGINE_VERSION,
    )


# ----------------------------------------------------------------------------
# Rule-oracle comparison
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class Prop1Report:
    level: int
    slot_bound: int
    coeff_degree: int
    hamiltonians: tuple[str, ...]
    equivalent: bool
    invariance_row_count: int
    oracle_row_count: int
    free_unknowns: tuple[Unknown, ...]
    mismatches: tuple[str, ...]
    runtime_seconds: float

    def to_text(self) -> str:
        lines = [
            f"invariance system vs closed-form rule system "
            f"(level {self.level}, slot bound {self.slot_bound}, "
            f"coefficient degree {self.coeff_degree})",
            f"generators: {', '.join(self.hamiltonians)}",
            f"invariance rows: {self.invariance_row_count}",
            f"oracle rows: {self.oracle_row_count}",
            "verdict: " + ("EQUIVALENT" if self.equivalent else "NOT EQUIVALENT"),
            f"free unknowns ({len(self.free_unknowns)}): "
            + ", ".join(u.name for u in self.free_unknowns),
        ]
        for mismatch in self.mismatches:
            lines.append(f"mismatch: {mismatch}")
        lines.append(f"runtime: {self.runtime_seconds:.2f}s")
        return "\n".join(lines)

    def to_json_dict(self) -> dict:
        return {
            "level": self.level,
            "slot_bound": self.slot_bound,
            "coeff_degree": self.coeff_degree,
            "hamiltonians": list(self.hamiltonians),
            "equivalent": self.equivalent,
            "invariance_rows": self.invariance_row_count,
            "oracle_rows": self.oracle_row_count,
            "free_unknowns": [u.to_json() for u in self.free_unknowns],
            "mismatches": list(self.mismatches),
            "runtime_seconds": self.runtime_seconds,
        }


def run_prop1(
    level: int = 1,
    slot_bound: int = 4,
    coeff_degree: int = 2,
    hamiltonians: tuple[Poly, ...] | None = None,
) -> Prop1Report:
    """Compare the eliminated invariance system against the rule oracle."""
    start = time.perf_counter()
    hams = hamiltonians if hamiltonians is not None else default_hamiltonians()
    ansatz = build_ansatz(level, slot_bound, coeff_degree)
    inv_system = invariance_system(hams, (ansatz,))
    oracle_system = prop1_oracle(ansatz)
    report = systems_equivalent(inv_system, oracle_system)
    elapsed = time.perf_counter() - start
    return Prop1Report(
        level=level,
        slot_bound=slot_bound,
        coeff_degree=coeff_degree,
        hamiltonians=tuple(str(h) for h in hams),
        equivalent=report.equivalent,
        invariance_row_count=len(inv_system),
        oracle_row_count=len(oracle_system),
        free_unknowns=report.elimination_a.free,
        mismatches=report.mismatches,
        runtime_seconds=elapsed,
    )


# ----------------------------------------------------------------------------
# Reference-product controls
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class InvarianceControl:
    order: int
    generator: str
    invariant: bool
    lie_derivative_text: str

    def __str__(self) -> str:
        verdict = "invariant" if self.invariant else "NOT invariant"
        text = f"order {self.order} under {self.generator}: {verdict}"
        if not self.invariant:
            text += f"; L = {self.lie_derivative_text}"
        return text


@dataclass(frozen=True)
class MoyalControlReport:
    assoc: AssocReport
    invariance: tuple[InvarianceControl, ...]

    def invariant(self, order: int, generator: str) -> bool:
        for control in self.invariance:
            if control.order == order and control.generator == generator:
                return control.invariant
        raise KeyError(f"no control for order {order} generator {generator}")

    def to_text(self) -> str:
        lines = [self.assoc.to_text(), "per-generator invariance of the reference terms:"]
        lines.extend(str(c) for c in self.invariance)
        return "\n".join(lines)

    def to_json_dict(self) -> dict:
        return {
            "assoc": {
                "max_order": self.assoc.max_order,
                "max_degree": self.assoc.max_degree,
                "triples_checked": self.assoc.triples_checked,
                "failures": [str(f) for f in self.assoc.failures],
            },
            "invariance": [
                {
                    "order": c.order,
                    "generator": c.generator,
                    "invariant": c.invariant,
                    "lie_derivative": c.lie_derivative_text,
                }
                for c in self.invariance
            ],
        }


def run_moyal_controls(max_order: int = 4, max_degree: int = 6) -> MoyalControlReport:
    """Positive and negative controls for the constant-coefficient product.

    Reports associativity failures of the truncated reference product (none
    expected) and the computed per-generator invariance status of each term;
    whatever the computation finds is reported as is.
    """
    if max_order < 1:
        raise ValueError("max_order must be at least 1")
    star = FormalStarProduct.moyal(max_order)
    assoc_report = assoc_check_numeric(star, max_order, max_degree)
    controls = []
    for order in range(1, max(max_order, 2) + 1):
        term = moyal_term(order)
        for h in default_hamiltonians():
            derived = lie_derivative(hamiltonian_vf(h), term)
            controls.append(
                InvarianceControl(
                    order=order,
                    generator=str(h),
                    invariant=not derived,
                    lie_derivative_text=str(derived),
                )
            )
    return MoyalControlReport(assoc_report, tuple(controls))


# ----------------------------------------------------------------------------
# Reference valuations (used by controls and tests)
# ----------------------------------------------------------------------------


def moyal_valuation(unknowns, order_map: dict[int, BiDiffOp] | None = None) -> dict[Unknown, UnknownExpr]:
    """Assign each unknown the matching reference-product coefficient."""
    cache: dict[int, BiDiffOp] = dict(order_map or {})
    valuation: dict[Unknown, UnknownExpr] = {}
    for u in unknowns:
        term = cache.get(u.level)
        if term is None:
            term = moyal_term(u.level)
            cache[u.level] = term
        if u.mono != (0, 0):
            valuation[u] = UnknownExpr.zero()
        else:
            value = term.terms.get((u.left, u.right, (0, 0)), Scalar(0))
            valuation[u] = UnknownExpr.constant(value)
    return valuation
