"""Command-line front end: ``riccicol <subcommand> ...``.

Exit status: 0 when the engine is internally consistent (disagreements with
printed values are reported, not fatal), 1 for usage and constraint errors,
2 when an internal-consistency check fails.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .collineation import collineation_matrix, nullspace, oracle_check
from .geometry import (
    evaluate_connection,
    evaluate_form,
    levi_civita,
    symbolic_levi_civita,
    symbolic_symmetrized_ricci,
    symbolic_yano,
    symmetrized_ricci_of,
    yano,
)
from .lie import (
    FAMILIES,
    FAMILY_DEFS,
    ConstraintViolation,
    JacobiError,
    StructureConstants,
    jacobi_residual,
    make_family,
)
from .scalars import ParseError, parse_rational
from .verifier import CatalogError, check_lemma_fixtures, dumps_report, lemma_summary, text_summary, verify

EXIT_OK, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2

log = logging.getLogger("riccicol")


class UsageError(Exception):
    pass


def parse_params(text: str | None) -> dict[str, Fraction]:
    """``"m=1/2,n=2"`` -> {"m": Fraction(1, 2), "n": Fraction(2)}."""
    out: dict[str, Fraction] = {}
    if not text:
        return out
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or not key:
            raise UsageError(f"malformed parameter {item!r}; expected key=rational")
        if key in out:
            raise UsageError(f"parameter {key!r} given twice")
        try:
            out[key] = parse_rational(value)
        except (ParseError, ZeroDivisionError):
            raise UsageError(f"malformed value for {key}: {value.strip()!r}") from None
    return out


def _family(name: str) -> str:
    if name not in FAMILY_DEFS:
        raise UsageError(f"unknown family {name!r}; expected one of {', '.join(FAMILIES)}")
    return name


def _numeric_family(args) -> tuple[str, dict, StructureConstants]:
    fam = _family(args.family)
    params = parse_params(args.params)
    try:
        c = make_family(fam, params)
    except ConstraintViolation as exc:
        raise UsageError(str(exc)) from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return fam, params, c


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def cmd_ricci(args) -> int:
    if args.symbolic:
        fam = _family(args.family)
        if args.params:
            raise UsageError("--symbolic takes no --params")
        _emit({"family": fam, "ricci": symbolic_symmetrized_ricci(fam).to_json()})
        return EXIT_OK
    fam, params, _ = _numeric_family(args)
    T = evaluate_form(symbolic_symmetrized_ricci(fam), params)
    _emit({"family": fam, "params": args.params or "", "ricci": T.to_json()})
    return EXIT_OK


def cmd_connection(args) -> int:
    if args.symbolic:
        fam = _family(args.family)
        conn = symbolic_levi_civita(fam) if args.which == "lc" else symbolic_yano(fam)
        _emit({"family": fam, "which": args.which, "connection": conn.to_json()})
        return EXIT_OK
    fam, params, _ = _numeric_family(args)
    conn = symbolic_levi_civita(fam) if args.which == "lc" else symbolic_yano(fam)
    _emit({"family": fam, "which": args.which, "connection": evaluate_connection(conn, params).to_json()})
    return EXIT_OK


def cmd_collineate(args) -> int:
    fam, params, c = _numeric_family(args)
    T = evaluate_form(symbolic_symmetrized_ricci(fam), params)
    M = collineation_matrix(T, c)
    basis = nullspace(M)
    report = oracle_check(basis, T, c, trials=args.trials)
    out = {"family": fam, **basis.to_json(), "system": M.rows_json(), "oracle": report.to_json()}
    _emit(out)
    return EXIT_OK if report.ok else EXIT_INTERNAL


def cmd_jacobi(args) -> int:
    path = Path(args.input)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc.msg}") from None
    try:
        c = StructureConstants.from_json(obj, label=path.name)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"{path}: {exc}") from None
    residual = jacobi_residual(c)
    out = {"input": str(path), "lie_algebra": residual.is_zero(), "residual": residual.to_json()}
    if residual.is_zero() and not c.is_symbolic() and args.ricci:
        out["ricci"] = symmetrized_ricci_of(c).to_json()
    _emit(out)
    # a table failing Jacobi is a property of the input, not an engine fault
    return EXIT_OK if residual.is_zero() else EXIT_USAGE


def cmd_lemmas(args) -> int:
    entries = check_lemma_fixtures()
    summary = lemma_summary(entries)
    if args.json:
        Path(args.json).write_text(
            json.dumps({"lemmas": entries, "summary": summary}, indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
    loop = summary["closed_loop"]
    print(f"closed loop: {loop['confirmed_fraction']} confirmed")
    for e in entries:
        if not e["match"]:
            flag = "explained" if e["explained"] else "UNEXPLAINED"
            print(f"  {e['location']}: {e['status']} ({flag}); printed {e['paper']}; recomputed {e['engine']}")
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        report = verify(seed=args.seed, samples=args.samples, catalog=args.catalog, jobs=args.jobs)
    except (CatalogError, OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot load catalog: {exc}") from None
    if args.json:
        Path(args.json).write_text(dumps_report(report), encoding="utf-8")
    sys.stdout.write(text_summary(report))
    return EXIT_INTERNAL if report["summary"]["hard_failures"] else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="riccicol",
        description="Exact Yano-Ricci tensors and Ricci collineations on 3D Lorentzian Lie groups.",
    )
    p.add_argument("-v", "--verbose", action="store_true", help="log debug messages")
    sub = p.add_subparsers(dest="command", required=True)

    def family_cmd(name: str, help_text: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("family", help=f"one of {', '.join(FAMILIES)}")
        sp.add_argument("--params", help="comma-separated key=rational pairs, e.g. m=1/2,n=2")
        return sp

    sp = family_cmd("ricci", "print the symmetrized Yano-Ricci matrix")
    sp.add_argument("--symbolic", action="store_true", help="print polynomial entries")
    sp.set_defaults(func=cmd_ricci)

    sp = family_cmd("connection", "print a connection table")
    sp.add_argument("--which", choices=("lc", "yano"), default="yano")
    sp.add_argument("--symbolic", action="store_true", help="print polynomial entries")
    sp.set_defaults(func=cmd_connection)

    sp = family_cmd("collineate", "print a basis of the left-invariant Ricci collineations")
    sp.add_argument("--trials", type=int, default=20, help="oracle trials (default 20)")
    sp.set_defaults(func=cmd_collineate)

    sp = sub.add_parser("jacobi", help="check a structure-constant table (JSON)")
    sp.add_argument("--input", required=True, help='JSON file {"c12": [...], "c13": [...], "c23": [...]}')
    sp.add_argument("--ricci", action="store_true", help="also print the symmetrized Yano-Ricci matrix")
    sp.set_defaults(func=cmd_jacobi)

    sp = sub.add_parser("verify", help="audit the lemma fixtures and replay the theorem catalog")
    sp.add_argument("--catalog", help="case catalog JSON (default: the shipped catalog)")
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--samples", type=int, default=100)
    sp.add_argument("--json", help="write the JSON report here")
    sp.add_argument("--jobs", type=int, default=1, help="worker processes (results are identical)")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("lemmas", help="check the lemma fixtures only")
    sp.add_argument("--json", help="write the lemma section as JSON here")
    sp.set_defaults(func=cmd_lemmas)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"riccicol: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except JacobiError as exc:
        print(f"riccicol: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
