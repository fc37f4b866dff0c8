"""Command-line interface.

Subcommands: ``nogo`` (run the certificate pipeline), ``prop1`` (compare the
invariance system with the closed-form rule oracle), ``moyal`` (reference
product controls), ``invariance`` (dump a constraint system), and ``verify``
(replay-check a certificate file).  Feasibility status is data: the exit code
is 0 for any completed run and nonzero only for usage or parse errors (and
for a failed ``verify``).
"""

from __future__ import annotations

import argparse
import json
import sys

from .certificate import Certificate, check_certificate
from .constraints import build_ansatz, invariance_rows, ConstraintSystem
from .operators import hamiltonian_vf
from .pipeline import (
    NogoConfig,
    run_moyal_controls,
    run_nogo,
    run_prop1,
)
from .poly import PolyParseError, parse_poly


def _parse_hamiltonians(text: str):
    polys = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            raise PolyParseError("empty Hamiltonian in list", 0)
        polys.append(parse_poly(chunk))
    return tuple(polys)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="starnogo",
        description=(
            "Exact workbench deciding whether a polynomial Hamiltonian action "
            "on the plane admits an invariant star product at truncation order 2."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--out", default=None, help="write output to this path")

    nogo = sub.add_parser("nogo", help="run the full certificate pipeline")
    nogo.add_argument("--hamiltonians", default=None, help="comma-separated polynomials")
    nogo.add_argument("--slot-bound-c1", type=int, default=4)
    nogo.add_argument("--slot-bound-c2", type=int, default=4)
    nogo.add_argument("--coeff-degree", type=int, default=2)
    add_common(nogo)

    prop1 = sub.add_parser("prop1", help="compare invariance system with the rule oracle")
    prop1.add_argument("--hamiltonians", default=None)
    prop1.add_argument("--level", type=int, default=1)
    prop1.add_argument("--slot-bound-c1", type=int, default=4)
    prop1.add_argument("--coeff-degree", type=int, default=2)
    add_common(prop1)

    moyal = sub.add_parser("moyal", help="reference-product associativity and invariance controls")
    moyal.add_argument("--order", type=int, default=4)
    moyal.add_argument("--max-degree", type=int, default=6)
    add_common(moyal)

    inv = sub.add_parser("invariance", help="dump the invariance constraint system")
    inv.add_argument("--hamiltonians", default=None)
    inv.add_argument("--level", type=int, default=1)
    inv.add_argument("--slot-bound-c1", type=int, default=4)
    inv.add_argument("--coeff-degree", type=int, default=2)
    add_common(inv)

    verify = sub.add_parser("verify", help="replay-check a certificate file")
    verify.add_argument("path", help="path to a JSON certificate")
    add_common(verify)

    return parser


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        print(text)
    else:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text)
            if not text.endswith("\n"):
                handle.write("\n")


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        if args.command == "nogo":
            hams = _parse_hamiltonians(args.hamiltonians) if args.hamiltonians else ()
            config = NogoConfig(
                hamiltonians=hams,
                slot_bound_c1=args.slot_bound_c1,
                slot_bound_c2=args.slot_bound_c2,
                coeff_degree=args.coeff_degree,
            )
            config.validate()
            cert = run_nogo(config)
            _emit(cert.to_json() if args.format == "json" else cert.to_text(), args.out)
            return 0

        if args.command == "prop1":
            hams = _parse_hamiltonians(args.hamiltonians) if args.hamiltonians else None
            report = run_prop1(
                level=args.level,
                slot_bound=args.slot_bound_c1,
                coeff_degree=args.coeff_degree,
                hamiltonians=hams,
            )
            text = (
                json.dumps(report.to_json_dict(), indent=2, sort_keys=True)
                if args.format == "json"
                else report.to_text()
            )
            _emit(text, args.out)
            return 0

        if args.command == "moyal":
            if args.order < 1 or args.max_degree < 0:
                parser.error("order must be >= 1 and max-degree >= 0")
            report = run_moyal_controls(args.order, args.max_degree)
            text = (
                json.dumps(report.to_json_dict(), indent=2, sort_keys=True)
                if args.format == "json"
                else report.to_text()
            )
            _emit(text, args.out)
            return 0

        if args.command == "invariance":
            if args.level < 1 or args.slot_bound_c1 < 0 or args.coeff_degree < 0:
                parser.error("invalid bounds")
            hams = (
                _parse_hamiltonians(args.hamiltonians)
                if args.hamiltonians
                else NogoConfig().hamiltonians
            )
            ansatz = build_ansatz(args.level, args.slot_bound_c1, args.coeff_degree)
            systems = [
                invariance_rows(hamiltonian_vf(h), ansatz, label=str(h)) for h in hams
            ]
            system = ConstraintSystem.merge(*systems)
            if args.format == "json":
                rows = [
                    {"id": idx, "provenance": str(row.provenance), "expr": str(row.expr)}
                    for idx, row in enumerate(system.rows)
                ]
                text = json.dumps({"rows": rows}, indent=2, sort_keys=True)
            else:
                text = system.to_text()
            _emit(text, args.out)
            return 0

        if args.command == "verify":
            with open(args.path, "r", encoding="utf-8") as handle:
                cert = Certificate.from_json(handle.read())
            report = check_certificate(cert)
            _emit(report.to_text(), args.out)
            return 0 if report.ok else 1

    except PolyParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    parser.error(f"unknown command {args.command!r}")
    return 2


if __name__ == "__main__":
    sys.exit(main())
