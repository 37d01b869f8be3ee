"""Audit of transcribed lemma data and sampled replay of the classification cases.

The report is a plain JSON-ready dict. Everything in it is derived from the
shipped fixture/catalog files plus exact computation, and it is assembled in a
fixed order, so equal inputs give byte-identical JSON.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

from .collineation import (
    ROW_LABELS,
    ROWS,
    collineation_matrix,
    lie_derivative,
    nullspace,
    oracle_check,
    span_equal,
)
from .geometry import BilinearForm, evaluate_form, symbolic_family, symbolic_symmetrized_ricci
from .lie import (
    FAMILIES,
    FAMILY_DEFS,
    FRAME,
    FrameVector,
    StructureConstants,
    g2_as_printed,
    jacobi_residual,
    make_family,
)
from .sampling import Constraint, family_constraints, format_params, sample_parameters
from .scalars import (
    VARIABLES,
    ParseError,
    Poly,
    evaluate_expression,
    format_scalar,
    parse_poly,
    sqrt_rational,
)

FIXTURE_FILE = "lemma-fixtures.json"
CATALOG_FILE = "paper-theorems.json"

REQUIRED_CASES = (
    "Thm3.3",
    "Thm3.6(1)", "Thm3.6(2)",
    "Thm3.9(1)", "Thm3.9(2)",
    "Thm3.12(1)", "Thm3.12(2a)", "Thm3.12(2b)", "Thm3.12(3)", "Thm3.12(4)",
    "Thm4.3",
    "Thm4.6(1)", "Thm4.6(2)",
    "Thm4.9(1)", "Thm4.9(2)", "Thm4.9(3)", "Thm4.9(4)", "Thm4.9(5)", "Thm4.9(6)", "Thm4.9(7)",
)

# (k, i, j) for L_{e_k} T(e_i, e_j); the three L_{e_k} T(e_k, e_k) are omitted
COMPONENTS = tuple(
    (k, i, j) for k in range(3) for (i, j) in ROWS if not (i == j == k)
)

EXTENSION_STRATEGY = (
    "irrational equalities are solved in the quadratic extension Q(sqrt(d)): "
    "free parameters are drawn rational, the equality is solved exactly for its "
    "designated variable, and every later computation runs in exact a + b*sqrt(d) arithmetic"
)


class CatalogError(ValueError):
    pass


def component_label(k: int, i: int, j: int) -> str:
    return f"e{k + 1}({i + 1},{j + 1})"


def _read_package_json(name: str):
    ref = resources.files("riccicol") / "catalog" / name
    with ref.open("r", encoding="utf-8") as fh:
        return json.load(fh)


def load_fixtures(path: str | Path | None = None) -> dict:
    if path is None:
        return _read_package_json(FIXTURE_FILE)
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


# lemma fixtures ----------------------------------------------------------------


def _try_parse(text: str) -> Poly | None:
    try:
        return parse_poly(text)
    except ParseError:
        return None


def _poly(x) -> Poly:
    return x if isinstance(x, Poly) else Poly.const(x)


def _lie_components(T: BilinearForm, c: StructureConstants) -> dict[str, Poly]:
    derivs = [lie_derivative(T, e, c) for e in FRAME]
    return {component_label(k, i, j): _poly(derivs[k][i, j]) for k, i, j in COMPONENTS}


def _leading_ratio(a: Poly, b: Poly) -> Fraction:
    return a.terms[0][1] / b.terms[0][1]


def proportional(printed: Sequence[Poly], truth: Sequence[Poly]) -> bool:
    """True when ``printed`` is a nonzero constant multiple of ``truth``."""
    pivot = next((k for k, t in enumerate(truth) if not t.is_zero()), None)
    if pivot is None:
        return all(p.is_zero() for p in printed)
    if printed[pivot].is_zero():
        return False
    ratio = _leading_ratio(printed[pivot], truth[pivot])
    return all(p == t * ratio for p, t in zip(printed, truth))


def _printed_ricci(fam: str, data: Mapping) -> tuple[list[list[Poly | None]], list[tuple[int, int]]]:
    matrix = [[_try_parse(x) for x in row] for row in data["lemmas"][fam]["ricci"]]
    bad = [(i, j) for i in range(3) for j in range(3) if matrix[i][j] is None]
    return matrix, bad


def _form_from(matrix, fill: BilinearForm) -> BilinearForm:
    return BilinearForm(
        tuple(
            tuple(fill[i, j] if matrix[i][j] is None else matrix[i][j] for j in range(3))
            for i in range(3)
        )
    )


@dataclass
class _Ledger:
    known: Mapping[str, str]
    entries: list[dict] = field(default_factory=list)

    def add(self, location: str, check: str, family: str, ref: str, entry: str,
            printed: str, engine: str, status: str, **extra) -> dict:
        rec = {
            "location": location,
            "check": check,
            "family": family,
            "lemma": ref,
            "entry": entry,
            "paper": printed,
            "engine": engine,
            "match": status == "confirmed",
            "status": status,
        }
        if status != "confirmed":
            rec["explained"] = location in self.known
            rec["explanation"] = self.known.get(location)
        rec.update(extra)
        self.entries.append(rec)
        return rec


def _ricci_section(ledger: _Ledger, data: Mapping) -> None:
    for fam in FAMILIES:
        ref = data["lemmas"][fam]["ricci_lemma"]
        engine = symbolic_symmetrized_ricci(fam)
        printed_txt = data["lemmas"][fam]["ricci"]
        printed_m, _ = _printed_ricci(fam, data)
        for i in range(3):
            for j in range(3):
                label = f"({i + 1},{j + 1})"
                ev = _poly(engine[i, j])
                if printed_m[i][j] is None:
                    status = "unparseable"
                else:
                    status = "confirmed" if printed_m[i][j] == ev else "mismatch"
                ledger.add(f"ricci:{ref}:{label}", "ricci", fam, ref, label,
                           printed_txt[i][j], format_scalar(ev), status)


def _lie_sections(ledger: _Ledger, data: Mapping) -> None:
    for fam in FAMILIES:
        lem = data["lemmas"][fam]
        ref = lem["lie_lemma"]
        c = symbolic_family(fam)
        engine_T = symbolic_symmetrized_ricci(fam)
        printed_m, bad = _printed_ricci(fam, data)
        engine_lie = _lie_components(engine_T, c)
        # closed loop: the printed matrix itself; symbols it never defines are
        # replaced by the engine value and every component they reach is flagged
        loop = _lie_components(_form_from(printed_m, engine_T), c)
        blank = _lie_components(_form_from(printed_m, BilinearForm.zero()), c)
        for key, text in lem["lie"].items():
            printed = _try_parse(text)
            ev = engine_lie[key]
            if printed is None:
                status = "unparseable"
            else:
                status = "confirmed" if printed == ev else "mismatch"
            ledger.add(f"lie:{ref}:{key}", "lie", fam, ref, key, text, format_scalar(ev), status)
            rv = loop[key]
            contaminated = bad and rv != blank[key]
            if printed is not None and printed == rv and not contaminated:
                status = "confirmed"
            elif contaminated:
                status = "contaminated"
            else:
                status = "mismatch" if printed is not None else "unparseable"
            ledger.add(f"closed-loop:{ref}:{key}", "closed-loop", fam, ref, key, text,
                       format_scalar(rv), status)


def _system_section(ledger: _Ledger, data: Mapping) -> None:
    truth_cache: dict[str, dict[str, Poly]] = {}
    for line in data["systems"]:
        fam = line["family"]
        if fam not in truth_cache:
            printed_m, _ = _printed_ricci(fam, data)
            truth_cache[fam] = _lie_components(
                _form_from(printed_m, symbolic_symmetrized_ricci(fam)), symbolic_family(fam)
            )
        loop = truth_cache[fam]
        i, j = ROWS[ROW_LABELS.index(line["row"])]
        truth = [loop.get(component_label(k, i, j), Poly()) for k in range(3)]
        printed = [parse_poly(x) for x in line["coeffs"]]
        lemma = data["lemmas"][fam]["lie"]
        lemma_row = [
            parse_poly(lemma[component_label(k, i, j)]) if component_label(k, i, j) in lemma else Poly()
            for k in range(3)
        ]
        mod = line.get("modulo")
        if mod:
            mono = parse_poly(mod).terms[0][0]
            truth = [t.drop_multiples_of(mono) for t in truth]
            printed = [p.drop_multiples_of(mono) for p in printed]
            lemma_row = [p.drop_multiples_of(mono) for p in lemma_row]
        ok = proportional(printed, truth)
        location = f"system:{line['system']}:line{line['line']}"
        if ok:
            supports = "system"
        elif proportional(lemma_row, truth):
            supports = "lemma"
        else:
            supports = "neither"
        ledger.add(
            location, "system", fam, line["system"], f"line {line['line']} {line['row']}",
            " | ".join(line["coeffs"]), " | ".join(format_scalar(t) for t in truth),
            "confirmed" if ok else "mismatch",
            modulo=mod, recomputation_supports=supports,
        )


def _det2(rows: Sequence[Sequence[Poly]]) -> Poly:
    return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]


def _determinant_section(ledger: _Ledger, data: Mapping) -> None:
    for det in data["determinants"]:
        rows = [[parse_poly(x) for x in row] for row in det["entries"]]
        value = _det2(rows)
        printed = parse_poly(det["printed"])
        if printed == value:
            status = "confirmed"
        elif printed == -value:
            status = "sign-flipped"
        else:
            status = "mismatch"
        ledger.add(f"determinant:{det['id']}", "determinant", det["family"], det["id"], "|A|",
                   det["printed"], format_scalar(value), status)


def _jacobi_section(ledger: _Ledger, data: Mapping) -> None:
    for fam in FAMILIES:
        residual = jacobi_residual(symbolic_family(fam))
        ledger.add(f"jacobi:{fam}", "jacobi", fam, fam, "residual", "0",
                   " | ".join(residual.to_json()),
                   "confirmed" if residual.is_zero() else "mismatch")
    printed = data["bracket_tables"]["G2 (as printed)"]
    residual = jacobi_residual(g2_as_printed())
    expected = [parse_poly(x) for x in printed["expected_residual"]]
    ok = all(_poly(a) == b for a, b in zip(residual, expected))
    ledger.add("jacobi:G2 (as printed)", "jacobi", "G2", "G2 (as printed)", "residual",
               " | ".join(printed["expected_residual"]), " | ".join(residual.to_json()),
               "confirmed" if ok else "mismatch", rejected=not residual.is_zero())


def check_lemma_fixtures(data: Mapping | None = None) -> list[dict]:
    """Symbolic comparison of every transcribed matrix, component, system row and determinant."""
    data = data if data is not None else load_fixtures()
    ledger = _Ledger(data.get("known_discrepancies", {}))
    _jacobi_section(ledger, data)
    _ricci_section(ledger, data)
    _lie_sections(ledger, data)
    _system_section(ledger, data)
    _determinant_section(ledger, data)
    return ledger.entries


def lemma_summary(entries: Sequence[dict]) -> dict:
    loop = [e for e in entries if e["check"] == "closed-loop"]
    confirmed = sum(e["match"] for e in loop)
    loop_unexplained = [e["location"] for e in loop if not e["match"] and not e["explained"]]
    ricci = [e for e in entries if e["check"] == "ricci"]
    loop_implicated = {e["family"] for e in loop if e["status"] == "mismatch"}
    ricci_mismatch = [e for e in ricci if e["status"] == "mismatch"]
    unimplicated = [e["location"] for e in ricci_mismatch if e["family"] not in loop_implicated]
    jacobi = [e for e in entries if e["check"] == "jacobi"]
    return {
        "jacobi": {
            "families_ok": all(e["match"] for e in jacobi if e["family"] in FAMILIES and e["lemma"] != "G2 (as printed)"),
            "as_printed_g2_rejected": any(e["lemma"] == "G2 (as printed)" and e["rejected"] and e["match"] for e in jacobi),
        },
        "closed_loop": {
            "listed": len(loop),
            "confirmed": confirmed,
            "confirmed_fraction": f"{confirmed}/{len(loop)}" if loop else "0/0",
            "meets_target": bool(loop) and Fraction(confirmed, len(loop)) >= Fraction(9, 10),
            "unexplained": loop_unexplained,
        },
        "ricci_derivation": {
            "mismatches": [e["location"] for e in ricci_mismatch],
            "reported": [
                {"location": e["location"], "paper": e["paper"], "engine": e["engine"]}
                for e in ricci if e["status"] == "unparseable"
            ],
            "not_implicated_by_closed_loop": unimplicated,
        },
        "unexplained": [e["location"] for e in entries if not e["match"] and not e.get("explained")],
    }


# theorem cases -----------------------------------------------------------------


@dataclass(frozen=True)
class CaseRecord:
    case_id: str
    family: str
    theorem: str = ""
    constraints: tuple[Constraint, ...] = ()
    expected_dimension: int = 0
    expected_span: tuple[tuple[str, str, str], ...] = ()
    samples: int | None = None
    allow_extension: bool = False
    relax_family_equalities: bool = False
    case_constraints_first: bool = False
    audit: str | None = None
    notes: str = ""

    @classmethod
    def from_json(cls, obj: Mapping) -> "CaseRecord":
        try:
            family = obj["family"]
            if family not in FAMILY_DEFS:
                raise CatalogError(f"{obj.get('case_id')}: unknown family {family!r}")
            span = tuple(tuple(str(x) for x in vec) for vec in obj.get("expected_span", ()))
            if any(len(vec) != 3 for vec in span):
                raise CatalogError(f"{obj['case_id']}: span vectors need three coordinates")
            return cls(
                case_id=obj["case_id"],
                family=family,
                theorem=obj.get("theorem", ""),
                constraints=tuple(Constraint.from_json(c) for c in obj.get("constraints", ())),
                expected_dimension=int(obj["expected_dimension"]),
                expected_span=span,
                samples=obj.get("samples"),
                allow_extension=bool(obj.get("allow_extension", False)),
                relax_family_equalities=bool(obj.get("relax_family_equalities", False)),
                case_constraints_first=bool(obj.get("case_constraints_first", False)),
                audit=obj.get("audit"),
                notes=obj.get("notes", ""),
            )
        except KeyError as exc:
            raise CatalogError(f"catalog entry lacks field {exc}") from None

    def all_constraints(self) -> list[Constraint]:
        fam = family_constraints(self.family, relax_equalities=self.relax_family_equalities)
        own = list(self.constraints)
        return own + fam if self.case_constraints_first else fam + own


def load_catalog(path: str | Path | None = None) -> list[CaseRecord]:
    if path is None:
        raw = _read_package_json(CATALOG_FILE)
    else:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    if not isinstance(raw, list):
        raise CatalogError("catalog must be a JSON array of case records")
    records = [CaseRecord.from_json(obj) for obj in raw]
    seen = Counter(r.case_id for r in records)
    dupes = sorted(k for k, n in seen.items() if n > 1)
    if dupes:
        raise CatalogError(f"duplicate case ids: {', '.join(dupes)}")
    return records


def missing_cases(records: Sequence[CaseRecord]) -> list[str]:
    have = {r.case_id for r in records}
    return [cid for cid in REQUIRED_CASES if cid not in have]


def _field_div(a, b):
    if b == 0:
        raise ZeroDivisionError("expected span is undefined at this sample")
    return a / b


def expected_vectors(rec: CaseRecord, params: Mapping[str, object]) -> list[FrameVector]:
    env = {name: params.get(name, Fraction(0)) for name in VARIABLES}
    env["sqrt"] = sqrt_rational
    return [
        FrameVector(tuple(evaluate_expression(x, env, divide=_field_div) for x in vec))
        for vec in rec.expected_span
    ]


def _span_text(vectors: Sequence[FrameVector]) -> list[list[str]]:
    return [v.to_json() for v in vectors]


def run_case(rec: CaseRecord, *, seed: int = 42, samples: int = 100, oracle_trials: int = 20) -> dict:
    """Replay one case at exact parameter samples and aggregate the comparison."""
    n = rec.samples if rec.samples is not None else samples
    rng = random.Random(f"{seed}:{rec.case_id}")
    constraints = rec.all_constraints()
    T_sym = symbolic_symmetrized_ricci(rec.family)
    names = FAMILY_DEFS[rec.family].params
    dims: Counter = Counter()
    sample_rows = []
    oracle_totals = {"soundness_checked": 0, "maximality_checked": 0, "violations": []}
    matched = 0
    counterexample = None
    first_basis = None
    for idx in range(n):
        params = sample_parameters(rec.family, constraints, rng, allow_extension=rec.allow_extension)
        c = make_family(
            rec.family, {k: params[k] for k in names}, check_constraints=not rec.relax_family_equalities
        )
        T = evaluate_form(T_sym, params)
        M = collineation_matrix(T, c)
        basis = nullspace(M)
        try:
            expected = expected_vectors(rec, params)
            undefined = None
        except ZeroDivisionError as exc:
            expected, undefined = None, str(exc)
        match = (
            expected is not None
            and basis.dimension == rec.expected_dimension
            and span_equal(basis.vectors, expected)
        )
        oracle = oracle_check(
            basis, T, c, trials=oracle_trials,
            rng=random.Random(f"{seed}:{rec.case_id}:{idx}:oracle"), M=M,
        )
        oracle_totals["soundness_checked"] += oracle.soundness_checked
        oracle_totals["maximality_checked"] += oracle.maximality_checked
        oracle_totals["violations"] += [f"sample {idx}: {v}" for v in oracle.violations]
        dims[basis.dimension] += 1
        matched += match
        row = {
            "index": idx,
            "params": format_params(params),
            "dimension": basis.dimension,
            "engine_basis": _span_text(basis.vectors),
            "expected_basis": None if expected is None else _span_text(expected),
            "match": match,
            "oracle_ok": oracle.ok,
        }
        if undefined:
            row["note"] = undefined
        if first_basis is None:
            first_basis = row
        if not match and counterexample is None:
            counterexample = row
        sample_rows.append(row)
    if matched == n:
        status = "confirmed"
    elif matched == 0:
        status = "refuted"
    else:
        status = "partially-confirmed"
    entry = {
        "case_id": rec.case_id,
        "family": rec.family,
        "theorem": rec.theorem,
        "constraints": [c.text for c in constraints],
        "samples_run": n,
        "status": status,
        "matched": matched,
        "expected_dimension": rec.expected_dimension,
        "expected_basis": [list(v) for v in rec.expected_span],
        "engine_basis": first_basis["engine_basis"] if first_basis else [],
        "dimension_counts": {str(d): dims[d] for d in sorted(dims)},
        "counterexample": counterexample,
        "oracle": oracle_totals,
        "notes": rec.notes,
        "samples": sample_rows,
    }
    if rec.allow_extension:
        entry["strategy"] = EXTENSION_STRATEGY
    return entry


def _describe_span(basis: Sequence[Sequence[str]]) -> str:
    if not basis:
        return "{0}"
    return "<" + ", ".join("(" + ", ".join(v) + ")" for v in basis) + ">"


def resolution_entries(records: Sequence[CaseRecord], cases: Sequence[dict]) -> list[dict]:
    by_id = {c["case_id"]: c for c in cases}
    groups: dict[str, list[CaseRecord]] = {}
    for rec in records:
        if rec.audit:
            groups.setdefault(rec.audit, []).append(rec)
    out = []
    for topic, recs in groups.items():
        candidates = []
        for rec in recs:
            case = by_id[rec.case_id]
            first = case["samples"][0] if case["samples"] else None
            candidates.append({
                "case_id": rec.case_id,
                "constraints": case["constraints"],
                "status": case["status"],
                "dimension_counts": case["dimension_counts"],
                "sample_params": first["params"] if first else {},
                "engine_dimension": first["dimension"] if first else None,
                "engine_span": first["engine_basis"] if first else [],
                "oracle_violations": len(case["oracle"]["violations"]),
            })
        confirmed = [c["case_id"] for c in candidates if c["status"] == "confirmed"]
        lines = []
        for c in candidates:
            lines.append(
                f"{c['case_id']}: engine dimension {c['engine_dimension']}, span "
                f"{_describe_span(c['engine_span'])} at {c['sample_params']}; "
                f"dimensions over samples {c['dimension_counts']}; printed expectation {c['status']}"
            )
        if len(candidates) > 1:
            lines.append(
                "engine confirms: " + (", ".join(confirmed) if confirmed else "none of the candidates")
            )
        out.append({
            "topic": topic,
            "candidates": candidates,
            "engine_confirms": confirmed,
            "statement": "; ".join(lines),
        })
    return out


def _case_worker(args) -> dict:
    rec, seed, samples = args
    return run_case(rec, seed=seed, samples=samples)


def verify(
    *,
    seed: int = 42,
    samples: int = 100,
    catalog: str | Path | None = None,
    jobs: int = 1,
    fixtures: str | Path | None = None,
) -> dict:
    """Full audit: lemma fixtures plus every catalog case."""
    records = load_catalog(catalog)
    lemmas = check_lemma_fixtures(load_fixtures(fixtures))
    work = [(rec, seed, samples) for rec in records]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cases = list(pool.map(_case_worker, work))
    else:
        cases = [_case_worker(w) for w in work]
    discrepancies = [
        {
            "location": e["location"],
            "kind": e["check"],
            "status": e["status"],
            "paper": e["paper"],
            "recomputed": e["engine"],
            "explained": e["explained"],
            "explanation": e["explanation"],
        }
        for e in lemmas
        if not e["match"]
    ]
    for case in cases:
        if case["status"] != "confirmed":
            discrepancies.append({
                "location": f"case:{case['case_id']}",
                "kind": "theorem-case",
                "status": case["status"],
                "paper": _describe_span(case["expected_basis"]),
                "recomputed": case["counterexample"],
                "explained": bool(case["notes"]),
                "explanation": case["notes"] or None,
            })
    hard = [f"{c['case_id']} {v}" for c in cases for v in c["oracle"]["violations"]]
    missing = missing_cases(records) if catalog is None else []
    hard += [f"catalog lacks required case {cid}" for cid in missing]
    status_counts = Counter(c["status"] for c in cases)
    return {
        "seed": seed,
        "samples": samples,
        "strategy": {"irrational_constraints": EXTENSION_STRATEGY},
        "summary": {
            "lemmas": lemma_summary(lemmas),
            "cases": {k: status_counts[k] for k in ("confirmed", "partially-confirmed", "refuted")},
            "hard_failures": hard,
        },
        "lemmas": lemmas,
        "cases": cases,
        "resolutions": resolution_entries(records, cases),
        "discrepancies": discrepancies,
    }


def dumps_report(report: Mapping) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def text_summary(report: Mapping) -> str:
    """Human-readable digest derived from the JSON report."""
    s = report["summary"]
    loop = s["lemmas"]["closed_loop"]
    ricci = s["lemmas"]["ricci_derivation"]
    out = [
        f"seed {report['seed']}, {report['samples']} samples per case",
        f"closed loop: {loop['confirmed_fraction']} components confirmed"
        + (f", unexplained {loop['unexplained']}" if loop["unexplained"] else ""),
        "ricci derivation mismatches: " + (", ".join(ricci["mismatches"]) or "none"),
    ]
    for r in ricci["reported"]:
        out.append(f"  reported {r['location']}: printed {r['paper']}, engine {r['engine']}")
    out.append("cases:")
    for case in report["cases"]:
        out.append(
            f"  {case['case_id']:<16} {case['status']:<20} dims {case['dimension_counts']}"
        )
    out.append("resolutions:")
    for res in report["resolutions"]:
        out.append(f"  {res['topic']}: {res['statement']}")
    explained = sum(1 for d in report["discrepancies"] if d["explained"])
    out.append(f"discrepancies: {len(report['discrepancies'])} ({explained} explained)")
    hard = s["hard_failures"]
    out.append("hard failures: " + ("; ".join(hard) if hard else "none"))
    return "\n".join(out) + "\n"
