"""Certificate objects, exact serialization, and the independent replay checker.

A certificate records the constraint facts and derivations that establish the
feasibility status of an invariant-product search: the zero-valued
coefficient facts cited from the invariance stage, the two residual
coefficient reductions with their forced zeros, and the terminal
contradiction row.  Every scalar is serialized as an exact rational string;
nothing in this module imports the generating engines, so the checker
revalidates each derivation step by expression arithmetic alone.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .scalars import Scalar
from .unknowns import Unknown, UnknownExpr

SCHEMA_VERSION = 1
ENGINE_VERSION = "1.0.0"

STATUS_INFEASIBLE = "INFEASIBLE"
STATUS_UNDECIDED = "FEASIBLE-UNDECIDED"

Index = tuple[int, int]


# ----------------------------------------------------------------------------
# Expression serialization
# ----------------------------------------------------------------------------


def expr_to_json(expr: UnknownExpr) -> list[dict]:
    out = []
    for key in sorted(expr.terms, key=lambda k: (len(k), k)):
        out.append(
            {
                "coeff": expr.terms[key].exact(),
                "unknowns": [u.to_json() for u in key],
            }
        )
    return out


def expr_from_json(data: list[dict]) -> UnknownExpr:
    terms = {}
    for item in data:
        key = tuple(sorted(Unknown.from_json(u) for u in item["unknowns"]))
        terms[key] = Scalar.from_exact(item["coeff"])
    return UnknownExpr(terms)


# ----------------------------------------------------------------------------
# Certificate structure
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class ZeroFact:
    """An invariance-derived equality ``unknown = 0`` cited by a target."""

    unknown: Unknown
    rule: str

    def to_json(self) -> dict:
        return {"unknown": self.unknown.to_json(), "rule": self.rule}

    @classmethod
    def from_json(cls, data: dict) -> "ZeroFact":
        return cls(Unknown.from_json(data["unknown"]), str(data["rule"]))


@dataclass(frozen=True)
class TargetRecord:
    derivs: tuple[Index, Index, Index]
    mono: Index
    label: str
    expr_before: UnknownExpr
    expr_after: UnknownExpr
    forced_zero: Unknown | None
    square_coeff: Scalar | None

    def to_json(self) -> dict:
        return {
            "derivs": [list(d) for d in self.derivs],
            "mono": list(self.mono),
            "label": self.label,
            "expr_before": expr_to_json(self.expr_before),
            "expr_after": expr_to_json(self.expr_after),
            "forced_zero": self.forced_zero.to_json() if self.forced_zero else None,
            "square_coeff": self.square_coeff.exact() if self.square_coeff else None,
        }

    @classmethod
    def from_json(cls, data: dict) -> "TargetRecord":
        forced = data.get("forced_zero")
        coeff = data.get("square_coeff")
        return cls(
            tuple(tuple(int(v) for v in d) for d in data["derivs"]),
            tuple(int(v) for v in data["mono"]),
            str(data["label"]),
            expr_from_json(data["expr_before"]),
            expr_from_json(data["expr_after"]),
            Unknown.from_json(forced) if forced else None,
            Scalar.from_exact(coeff) if coeff else None,
        )


@dataclass(frozen=True)
class ForcedZero:
    unknown: Unknown
    target_index: int
    justification: str

    def to_json(self) -> dict:
        return {
            "unknown": self.unknown.to_json(),
            "target_index": self.target_index,
            "justification": self.justification,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ForcedZero":
        return cls(
            Unknown.from_json(data["unknown"]),
            int(data["target_index"]),
            str(data["justification"]),
        )


@dataclass(frozen=True)
class Contradiction:
    row_text: str
    row_expr: UnknownExpr
    reduced: Scalar
    uses: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "row_text": self.row_text,
            "row_expr": expr_to_json(self.row_expr),
            "reduced": self.reduced.exact(),
            "uses": list(self.uses),
        }

    @classmethod
    def from_json(cls, data: dict) -> "Contradiction":
        return cls(
            str(data["row_text"]),
            expr_from_json(data["row_expr"]),
            Scalar.from_exact(data["reduced"]),
            tuple(str(u) for u in data["uses"]),
        )


@dataclass(frozen=True)
class Certificate:
    status: str
    config: dict
    zero_facts: tuple[ZeroFact, ...]
    free_unknowns: tuple[Unknown, ...]
    targets: tuple[TargetRecord, ...]
    forced_zeros: tuple[ForcedZero, ...]
    contradiction: Contradiction | None
    notes: tuple[str, ...] = ()
    engine_version: str = ENGINE_VERSION
    schema: int = SCHEMA_VERSION

    # serialization -----------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "schema": self.schema,
            "engine_version": self.engine_version,
            "status": self.status,
            "config": self.config,
            "invariance": {
                "zeros": [z.to_json() for z in self.zero_facts],
                "free_unknowns": [u.to_json() for u in self.free_unknowns],
            },
            "associativity": {
                "order": 2,
                "targets": [t.to_json() for t in self.targets],
            },
            "forced_zeros": [f.to_json() for f in self.forced_zeros],
            "contradiction": self.contradiction.to_json() if self.contradiction else None,
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json_dict(cls, data: dict) -> "Certificate":
        contradiction = data.get("contradiction")
        return cls(
            status=str(data["status"]),
            config=dict(data["config"]),
            zero_facts=tuple(ZeroFact.from_json(z) for z in data["invariance"]["zeros"]),
            free_unknowns=tuple(
                Unknown.from_json(u) for u in data["invariance"]["free_unknowns"]
            ),
            targets=tuple(TargetRecord.from_json(t) for t in data["associativity"]["targets"]),
            forced_zeros=tuple(ForcedZero.from_json(f) for f in data["forced_zeros"]),
            contradiction=Contradiction.from_json(contradiction) if contradiction else None,
            notes=tuple(str(n) for n in data.get("notes", [])),
            engine_version=str(data["engine_version"]),
            schema=int(data["schema"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        return cls.from_json_dict(json.loads(text))

    def to_text(self) -> str:
        lines = [
            f"certificate (engine {self.engine_version}, schema {self.schema})",
            f"status: {self.status}",
            "config:",
        ]
        for key in sorted(self.config):
            lines.append(f"  {key} = {self.config[key]}")
        lines.append("[1] invariance facts cited below (coefficients forced to zero):")
        by_rule: dict[str, list[str]] = {}
        for fact in self.zero_facts:
            by_rule.setdefault(fact.rule, []).append(fact.unknown.name)
        for rule in sorted(by_rule):
            names = ", ".join(by_rule[rule])
            lines.append(f"  {rule}: {names} = 0")
        if self.free_unknowns:
            free = ", ".join(u.name for u in self.free_unknowns)
            lines.append(f"  still undetermined inside the targets: {free}")
        lines.append("[2] associativity residual coefficients at order 2:")
        for idx, target in enumerate(self.targets):
            lines.append(f"  target {idx}: coefficient of {target.label}")
            lines.append(f"    full expansion : {target.expr_before}")
            lines.append(f"    after the zero facts : {target.expr_after}")
            if target.forced_zero is not None:
                lines.append(
                    f"    square term forces {target.forced_zero.name} = 0"
                )
            elif target.expr_after:
                lines.append("    not of forced-zero shape (left unreduced)")
        lines.append("[3] bracket normalization row:")
        if self.contradiction is not None:
            lines.append(f"  {self.contradiction.row_text}")
            lines.append(
                "  substituting the forced zeros leaves the nonzero constant "
                f"{self.contradiction.reduced} = 0  -- contradiction"
            )
        else:
            lines.append("  no contradiction derived")
        for note in self.notes:
            lines.append(f"note: {note}")
        return "\n".join(lines)


# ----------------------------------------------------------------------------
# Independent replay checker
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str = ""

    def __str__(self) -> str:
        mark = "ok" if self.ok else "FAIL"
        text = f"[{mark}] {self.name}"
        if self.detail:
            text += f": {self.detail}"
        return text


@dataclass(frozen=True)
class CheckReport:
    ok: bool
    results: tuple[CheckResult, ...]

    def to_text(self) -> str:
        lines = [str(r) for r in self.results]
        lines.append("certificate verified" if self.ok else "certificate REJECTED")
        return "\n".join(lines)


def check_certificate(cert: "Certificate | dict | str") -> CheckReport:
    """Replay every derivation step of a certificate by exact arithmetic.

    Uses only the certificate's own rows: the cited zero facts are taken as
    premises, and the reductions, the square-form recognitions and the final
    contradiction are all recomputed and compared against the recorded
    values.  The generating engines are never consulted.
    """
    if isinstance(cert, str):
        cert = Certificate.from_json(cert)
    elif isinstance(cert, dict):
        cert = Certificate.from_json_dict(cert)

    results: list[CheckResult] = []

    def check(name: str, ok: bool, detail: str = "") -> None:
        results.append(CheckResult(name, ok, detail))

    check("schema", cert.schema == SCHEMA_VERSION, f"schema={cert.schema}")
    check(
        "status",
        cert.status in (STATUS_INFEASIBLE, STATUS_UNDECIDED),
        cert.status,
    )

    zero_map = {fact.unknown: UnknownExpr.zero() for fact in cert.zero_facts}
    forced_map = {fz.unknown: UnknownExpr.zero() for fz in cert.forced_zeros}
    forced_by_target = {fz.target_index: fz for fz in cert.forced_zeros}

    for idx, target in enumerate(cert.targets):
        reduced = target.expr_before.substitute(zero_map)
        check(
            f"target {idx} reduction",
            reduced == target.expr_after,
            f"recomputed {reduced} vs recorded {target.expr_after}",
        )
        if target.forced_zero is not None:
            square = target.expr_after.single_square()
            ok = (
                square is not None
                and square[1] == target.forced_zero
                and bool(square[0])
                and square[0] == target.square_coeff
            )
            check(
                f"target {idx} square form",
                ok,
                f"expr {target.expr_after}",
            )
            fz = forced_by_target.get(idx)
            check(
                f"target {idx} forced zero recorded",
                fz is not None and fz.unknown == target.forced_zero,
            )
            sound = target.expr_after.substitute({target.forced_zero: UnknownExpr.zero()})
            check(f"target {idx} forced zero soundness", not sound)
        elif target.expr_after:
            check(
                f"target {idx} honestly unreduced",
                cert.status == STATUS_UNDECIDED,
                "unreduced target on a decided certificate",
            )

    for fz in cert.forced_zeros:
        in_range = 0 <= fz.target_index < len(cert.targets)
        check(
            f"forced zero {fz.unknown.name} cites a target",
            in_range and cert.targets[fz.target_index].forced_zero == fz.unknown,
        )

    if cert.status == STATUS_INFEASIBLE:
        check("contradiction present", cert.contradiction is not None)
        if cert.contradiction is not None:
            reduced = cert.contradiction.row_expr.substitute(forced_map)
            is_const = reduced.is_constant()
            value = reduced.constant_value() if is_const else None
            check(
                "contradiction reduction",
                is_const and bool(value) and value == cert.contradiction.reduced,
                f"row reduces to {reduced}",
            )
    else:
        check("no contradiction claimed", cert.contradiction is None)

    ok = all(r.ok for r in results)
    return CheckReport(ok, tuple(results))
