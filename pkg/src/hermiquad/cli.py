"""Command-line front end.

Subcommands::

    hermiquad poly {h2|hmn|hnu} --n N [--m M] [--nu NU] --x X --y Y [--w W --z Z --tau T]
    hermiquad integral --spec PATH --method {closed|oracle|both}
    hermiquad verify --seed S --cases N [--rel-tol R] [--deterministic]

Every subcommand writes one JSON document to stdout.  Exit codes: 0 ok,
2 invalid input, 3 divergent / ill-conditioned / overflowing entries,
4 verification failure.
"""
from __future__ import annotations

import argparse
import json
import math
import random
import sys
import time
from pathlib import Path

from . import engine, kernels, oracle
from .engine import EvalReport, GaussIntegralSpec, Kind, Method, RationalIntegralSpec
from .errors import (
    DivergentError,
    FloatOverflowError,
    HermiquadError,
    IllConditionedError,
    InvalidInputError,
)
from .kernels import Family, PolyQuery

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3
EXIT_VERIFY_FAILED = 4

SCHEMA_VERSION = 1

# errors that make an entry's result meaningless without the input being malformed
_NUMERICAL_ERRORS = (DivergentError, IllConditionedError, FloatOverflowError)

_GAUSS_FLOATS = ("a", "b", "c", "d", "f", "alpha", "y", "z")
_GAUSS_INTS = ("m", "n", "p")
_RATIONAL_FLOATS = ("a", "b", "c", "nu")
_POLY_FAMILIES = {"h2": Family.TWO_VARIABLE, "hmn": Family.TWO_INDEX, "hnu": Family.GAMMA_WEIGHTED}


class SpecFileError(Exception):
    pass


def _dump(doc) -> str:
    # repr-based float output is the shortest string that round-trips exactly
    return json.dumps(doc, indent=2, allow_nan=False)


def _num(v):
    if v is None or not math.isfinite(v):
        return None
    return v


# -- spec file parsing --------------------------------------------------------

def _get_float(entry, key, where, default=None):
    if key not in entry:
        if default is None:
            raise SpecFileError(f"{where}: missing field {key!r}")
        return default
    v = entry[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise SpecFileError(f"{where}: field {key!r} must be a finite number, got {v!r}")
    return float(v)


def _get_int(entry, key, where, default=0):
    v = entry.get(key, default)
    if isinstance(v, float) and v.is_integer():
        v = int(v)
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise SpecFileError(f"{where}: field {key!r} must be a non-negative integer, got {v!r}")
    return v


def _check_keys(entry, allowed, where):
    unknown = set(entry) - set(allowed) - {"id", "kind"}
    if unknown:
        raise SpecFileError(f"{where}: unknown field(s) {sorted(unknown)}")


def parse_entry(entry: dict, where: str = "entry"):
    """Turn one spec-file entry into a PolyQuery or an integral spec."""
    if not isinstance(entry, dict):
        raise SpecFileError(f"{where}: entry must be an object")
    kind = entry.get("kind")
    if kind == "rational":
        _check_keys(entry, _RATIONAL_FLOATS + ("n",), where)
        return RationalIntegralSpec(
            a=_get_float(entry, "a", where, 0.0),
            b=_get_float(entry, "b", where, 0.0),
            c=_get_float(entry, "c", where, 1.0),
            nu=_get_float(entry, "nu", where),
            n=_get_int(entry, "n", where),
        )
    if kind == "poly":
        _check_keys(entry, ("family", "n", "m", "nu", "args"), where)
        try:
            family = Family(entry.get("family"))
        except ValueError:
            raise SpecFileError(
                f"{where}: family must be one of {[f.value for f in Family]}"
            ) from None
        args = entry.get("args")
        if not isinstance(args, list):
            raise SpecFileError(f"{where}: args must be a list of numbers")
        vals = tuple(_get_float({"v": v}, "v", f"{where}.args") for v in args)
        expected = 5 if family is Family.TWO_INDEX else 2
        if len(vals) != expected:
            raise SpecFileError(f"{where}: {family.value} takes {expected} args, got {len(vals)}")
        nu = 0.0
        if family is Family.GAMMA_WEIGHTED:
            nu = _get_float(entry, "nu", where)
        return PolyQuery(family, _get_int(entry, "n", where), vals, _get_int(entry, "m", where), nu)
    try:
        kind = Kind(kind)
    except ValueError:
        raise SpecFileError(f"{where}: unknown kind {kind!r}") from None
    _check_keys(entry, _GAUSS_FLOATS + _GAUSS_INTS + ("g",), where)
    if "g" in entry:
        # g is the same linear exponent coefficient as alpha
        if "alpha" in entry:
            raise SpecFileError(f"{where}: give alpha or its alias g, not both")
        entry = {**entry, "alpha": entry["g"]}
    fields = {k: _get_float(entry, k, where, 1.0 if k == "f" else 0.0) for k in _GAUSS_FLOATS}
    ints = {k: _get_int(entry, k, where) for k in _GAUSS_INTS}
    return GaussIntegralSpec(kind, **fields, **ints)


def load_spec_file(path: str | Path) -> list[tuple[str, object]]:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise SpecFileError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise SpecFileError(f"{path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SpecFileError("spec file must be a JSON object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise SpecFileError(f"schema_version must be {SCHEMA_VERSION}")
    entries = doc.get("entries")
    if not isinstance(entries, list) or not entries:
        raise SpecFileError("entries must be a non-empty list")
    out = []
    seen = set()
    for i, entry in enumerate(entries):
        where = f"entries[{i}]"
        ident = entry.get("id") if isinstance(entry, dict) else None
        if not isinstance(ident, str) or not ident:
            raise SpecFileError(f"{where}: id must be a non-empty string")
        if ident in seen:
            raise SpecFileError(f"{where}: duplicate id {ident!r}")
        seen.add(ident)
        out.append((ident, parse_entry(entry, f"{where} ({ident})")))
    return out


def spec_to_entry(ident: str, spec) -> dict:
    return {"id": ident, **spec.to_dict()}


# -- evaluation -------------------------------------------------------------------

def _failed(exc: HermiquadError) -> EvalReport:
    return EvalReport(None, Method.CLOSED_FORM, math.inf, False, f"{exc.code}: {exc}")


def _oracle_report(rep: oracle.OracleReport) -> EvalReport:
    if rep.converged:
        return EvalReport(rep.value, rep.method, rep.err_est)
    return EvalReport(rep.value, rep.method, rep.err_est, False, "NotConverged: quadrature")


def _comparison_json(name, rec: oracle.ComparisonRecord) -> dict:
    return {
        "oracle": name,
        "value": _num(rec.oracle_value),
        "err_est": _num(rec.oracle_err),
        "discrepancy": _num(rec.discrepancy),
        "rel_tol": rec.rel_tol,
        "passed": rec.passed,
        "by_error_bound": rec.by_error_bound,
        "notes": rec.notes,
    }


def evaluate_entry(spec, method: str, rel_tol: float, quad_rel_tol: float) -> tuple[dict, str | None]:
    """Evaluate one entry.  Returns the result record and an error code, if any."""
    rec: dict = {}
    try:
        if isinstance(spec, PolyQuery):
            pv = spec.evaluate()
            rep = EvalReport(pv.value, Method.CLOSED_FORM, pv.abs_err_est)
            rec.update(_report_json(rep))
            if method != "closed":
                rec["notes"] = "polynomial entries have a single evaluation path"
            return rec, None

        is_rational = isinstance(spec, RationalIntegralSpec)
        if method == "oracle":
            if is_rational:
                rep = _oracle_report(oracle.quad_integral(spec))
            else:
                rep = _oracle_report(oracle.moment_oracle(spec))
            rec.update(_report_json(rep))
            return rec, None if rep.valid else "NotConverged"

        closed = engine.evaluate(spec)
        rec.update(_report_json(closed))
        if method == "both":
            comps = []
            if not is_rational:
                comps.append(("MomentOracle", oracle.compare(closed, oracle.moment_oracle(spec), rel_tol)))
            comps.append(("Quadrature", oracle.compare(closed, oracle.quad_integral(spec), quad_rel_tol)))
            rec["comparisons"] = [_comparison_json(n, c) for n, c in comps]
            rec["discrepancy"] = _num(max(c.discrepancy for _, c in comps))
            rec["passed"] = all(c.passed for _, c in comps)
        return rec, None
    except HermiquadError as exc:
        rec.update(_report_json(_failed(exc)))
        return rec, exc.code


def _report_json(rep: EvalReport) -> dict:
    return {
        "value": _num(rep.value),
        "method": Method(rep.method).value,
        "err_est": _num(rep.abs_err_est),
        "valid": rep.valid,
        "notes": rep.notes,
    }


def _exit_code(codes: list[str | None], comparisons_failed: bool) -> int:
    numerical = {c.code for c in (DivergentError, IllConditionedError, FloatOverflowError)}
    numerical.add("NotConverged")
    present = {c for c in codes if c}
    if present - numerical:
        return EXIT_INVALID
    if present:
        return EXIT_NUMERICAL
    if comparisons_failed:
        return EXIT_VERIFY_FAILED
    return EXIT_OK


# -- subcommands -------------------------------------------------------------------

def cmd_poly(args) -> int:
    family = _POLY_FAMILIES[args.family]
    if family is Family.TWO_INDEX:
        needed = ("m", "x", "y", "w", "z", "tau")
    elif family is Family.GAMMA_WEIGHTED:
        needed = ("nu", "x", "y")
    else:
        needed = ("x", "y")
    missing = [k for k in needed if getattr(args, k) is None]
    if missing:
        print(f"error: poly {args.family} requires --{' --'.join(missing)}", file=sys.stderr)
        return EXIT_INVALID
    if family is Family.TWO_INDEX:
        pargs = (args.x, args.y, args.w, args.z, args.tau)
    else:
        pargs = (args.x, args.y)
    query = PolyQuery(family, args.n, pargs, args.m or 0, args.nu or 0.0)
    try:
        pv = query.evaluate()
    except HermiquadError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL if isinstance(exc, _NUMERICAL_ERRORS) else EXIT_INVALID
    doc = {"value": pv.value, "abs_err_est": pv.abs_err_est}
    if args.id is not None:
        doc = {"id": args.id, **doc}
    print(_dump(doc))
    return EXIT_OK


def cmd_integral(args) -> int:
    start = time.perf_counter()
    try:
        entries = load_spec_file(args.spec)
    except SpecFileError as exc:
        print(f"error: invalid spec file: {exc}", file=sys.stderr)
        return EXIT_INVALID
    results = []
    codes = []
    for ident, spec in entries:
        rec, code = evaluate_entry(spec, args.method, args.rel_tol, args.quad_rel_tol)
        if code:
            print(f"error: entry {ident!r}: {rec['notes']}", file=sys.stderr)
        results.append({"id": ident, **rec})
        codes.append(code)

    compared = [r for r in results if "passed" in r]
    failed = [r for r in compared if not r["passed"]]
    discrepancies = [r["discrepancy"] for r in compared if r["discrepancy"] is not None]
    summary = {
        "entries": len(results),
        "valid": sum(1 for r in results if r["valid"]),
        "invalid": sum(1 for r in results if not r["valid"]),
        "compared": len(compared),
        "passed": len(compared) - len(failed),
        "failed": len(failed),
        "max_discrepancy": max(discrepancies) if discrepancies else None,
    }
    if not args.deterministic:
        summary["wall_time_s"] = time.perf_counter() - start
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "integral",
        "method": args.method,
        "results": results,
        "summary": summary,
    }
    print(_dump(doc))
    return _exit_code(codes, bool(failed))


# -- verify --------------------------------------------------------------------------

def sample_spec(rng: random.Random, kind: Kind, box: dict) -> GaussIntegralSpec:
    """Uniform draw from the parameter box; the draw order is fixed for replay."""
    c = box["coef_max"]
    yz = box["yz_max"]
    imax = box["index_max"]
    return GaussIntegralSpec(
        kind,
        a=rng.uniform(-c, c),
        b=rng.uniform(-c, c),
        c=rng.uniform(-c, c),
        d=rng.uniform(-c, c),
        f=rng.uniform(box["f_min"], box["f_max"]),
        alpha=rng.uniform(-c, c),
        y=rng.uniform(-yz, yz),
        z=rng.uniform(-yz, yz),
        m=rng.randint(0, imax),
        n=rng.randint(0, imax),
        p=rng.randint(0, imax),
    )


def _rel(u: float, v: float) -> float:
    scale = max(abs(u), abs(v))
    return 0.0 if scale == 0 else abs(u - v) / scale


def structural_checks(rng: random.Random, box: dict, count: int = 8) -> list[dict]:
    """Symmetry, tau = 0 factorization, kind consistency and the orthogonality grid."""
    checks = []

    def add(name, discrepancy, tol, detail):
        checks.append(
            {"check": name, "discrepancy": discrepancy, "tol": tol,
             "passed": discrepancy <= tol, "detail": detail}
        )

    for i in range(count):
        s = sample_spec(rng, Kind.IMN, box)
        swapped = GaussIntegralSpec(
            Kind.IMN, a=s.c, b=s.d, c=s.a, d=s.b, f=s.f, alpha=s.alpha,
            y=s.z, z=s.y, m=s.n, n=s.m,
        )
        add("Imn swap symmetry",
            _rel(engine.eval_Imn(s).value, engine.eval_Imn(swapped).value), 1e-12,
            spec_to_entry(f"sym-{i}", s))

        x, y, w, z = s.a, s.y, s.b, s.z
        factored = kernels.hermite2(s.m, x, y).value * kernels.hermite2(s.n, w, z).value
        add("tau=0 factorization",
            _rel(kernels.hermite_two_index(s.m, s.n, x, y, w, z, 0.0).value, factored), 1e-12,
            {"m": s.m, "n": s.n, "args": [x, y, w, z, 0.0]})

        flat = GaussIntegralSpec(Kind.IMN, s.a, s.b, s.c, s.d, s.f, s.alpha, 0.0, 0.0, s.m, s.n)
        script = GaussIntegralSpec(Kind.SCRIPT_IMN, s.a, s.b, s.c, s.d, s.f, s.alpha, 0.0, 0.0, s.m, s.n)
        add("Imn(y=z=0) = ScriptImn",
            _rel(engine.eval_Imn(flat).value, engine.eval_calligraphic_Imn(script).value), 1e-12,
            spec_to_entry(f"script-{i}", script))

        single = GaussIntegralSpec(Kind.IMN, s.a, s.b, 0.0, 0.0, s.f, s.alpha, s.y, 0.0, s.m, 0)
        plain = GaussIntegralSpec(Kind.IN, s.a, s.b, 0.0, 0.0, s.f, s.alpha, s.y, n=s.m)
        add("Imn(n=0, c=d=z=0) = In",
            _rel(engine.eval_Imn(single).value, engine.eval_In(plain).value), 1e-12,
            spec_to_entry(f"single-{i}", plain))

        p0 = GaussIntegralSpec(Kind.P_IMN, s.a, s.b, s.c, s.d, s.f, s.alpha, s.y, s.z, s.m, s.n, 0)
        add("pImn(p=0) = Imn",
            _rel(engine.eval_pImn(p0).value, engine.eval_Imn(s).value), 1e-12,
            spec_to_entry(f"p0-{i}", p0))

        m0 = GaussIntegralSpec(Kind.M_IN, s.a, s.b, 0.0, 0.0, s.f, s.alpha, s.y, m=0, n=s.n)
        plain_n = GaussIntegralSpec(Kind.IN, s.a, s.b, 0.0, 0.0, s.f, s.alpha, s.y, n=s.n)
        add("mIn(m=0) = In",
            _rel(engine.eval_mIn(m0).value, engine.eval_In(plain_n).value), 1e-12,
            spec_to_entry(f"m0-{i}", m0))

    imax = box["index_max"]
    worst = 0.0
    for m in range(imax + 1):
        for n in range(imax + 1):
            s = GaussIntegralSpec(Kind.IMN, a=2.0, c=2.0, y=-1.0, z=-1.0, f=1.0, m=m, n=n)
            diag = math.sqrt(math.pi) * 2.0**n * math.factorial(n)
            expected = diag if m == n else 0.0
            worst = max(worst, abs(engine.eval_Imn(s).value - expected) / diag)
    add("orthogonality grid", worst, 1e-9, {"index_max": imax})
    return checks


def cmd_verify(args) -> int:
    if args.cases < 1:
        print("error: --cases must be >= 1", file=sys.stderr)
        return EXIT_INVALID
    box = {
        "index_max": args.index_max,
        "coef_max": args.coef_max,
        "f_min": args.f_min,
        "f_max": args.f_max,
        "yz_max": args.yz_max,
    }
    if not (0 < args.f_min <= args.f_max) or args.coef_max < 0 or args.yz_max < 0 or args.index_max < 0:
        print(f"error: invalid parameter box {box}", file=sys.stderr)
        return EXIT_INVALID
    try:
        kernels.check_index(args.index_max, name="index_max")
    except HermiquadError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_INVALID

    start = time.perf_counter()
    rng = random.Random(args.seed)
    kinds = list(Kind)
    results = []
    failures = []
    max_moment = 0.0
    max_quad = 0.0
    for i in range(args.cases):
        kind = kinds[i % len(kinds)]
        spec = sample_spec(rng, kind, box)
        ident = f"case-{i:04d}"
        rec, code = evaluate_entry(spec, "both", args.rel_tol, args.quad_rel_tol)
        comps = {c["oracle"]: c for c in rec.get("comparisons", [])}
        dm = comps.get("MomentOracle", {}).get("discrepancy")
        dq = comps.get("Quadrature", {}).get("discrepancy")
        passed = code is None and rec.get("passed", False)
        if dm is not None:
            max_moment = max(max_moment, dm)
        if dq is not None:
            max_quad = max(max_quad, dq)
        row = {
            "id": ident,
            "kind": kind.value,
            "value": rec["value"],
            "err_est": rec["err_est"],
            "discrepancy_moment": dm,
            "discrepancy_quad": dq,
            "by_error_bound": any(c["by_error_bound"] for c in comps.values()),
            "passed": passed,
        }
        if not passed:
            row["notes"] = rec.get("notes") or "; ".join(
                n for c in comps.values() for n in c["notes"]
            ) or "comparison outside tolerance"
            failures.append(spec_to_entry(ident, spec))
        results.append(row)

    checks = structural_checks(random.Random(args.seed + 1), box)
    failed_checks = [c for c in checks if not c["passed"]]
    failed_cases = [r for r in results if not r["passed"]]

    summary = {
        "cases": len(results),
        "cases_passed": len(results) - len(failed_cases),
        "cases_failed": len(failed_cases),
        "cases_passed_by_error_bound": sum(1 for r in results if r["passed"] and r["by_error_bound"]),
        "checks": len(checks),
        "checks_passed": len(checks) - len(failed_checks),
        "checks_failed": len(failed_checks),
        "max_discrepancy_moment": max_moment,
        "max_discrepancy_quad": max_quad,
        "rel_tol": args.rel_tol,
        "quad_rel_tol": args.quad_rel_tol,
        "passed": not failed_cases and not failed_checks,
    }
    if not args.deterministic:
        summary["wall_time_s"] = time.perf_counter() - start
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "seed": args.seed,
        "box": box,
        "results": results,
        "checks": checks,
        "summary": summary,
        # a spec file that replays every failing case through `integral --method both`
        "replay": {"schema_version": SCHEMA_VERSION, "entries": failures},
    }
    print(_dump(doc))
    if failed_cases or failed_checks:
        for r in failed_cases:
            print(f"FAIL {r['id']} ({r['kind']}): {r['notes']}", file=sys.stderr)
        for c in failed_checks:
            print(f"FAIL check {c['check']}: discrepancy {c['discrepancy']:.3e}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


# -- argument parsing -----------------------------------------------------------------

def _finite(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return v


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0: {text!r}")
    return v


def _positive(text: str) -> float:
    v = _finite(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be > 0: {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hermiquad",
        description="Hermite polynomials and closed-form Gaussian integrals with verification oracles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("poly", help="evaluate a Hermite polynomial")
    p.add_argument("family", choices=sorted(_POLY_FAMILIES))
    p.add_argument("--n", type=_nonneg_int, required=True)
    p.add_argument("--m", type=_nonneg_int)
    p.add_argument("--nu", type=_finite)
    for name in ("x", "y", "w", "z", "tau"):
        p.add_argument(f"--{name}", type=_finite)
    p.add_argument("--id")
    p.set_defaults(func=cmd_poly)

    p = sub.add_parser("integral", help="evaluate integrals listed in a JSON spec file")
    p.add_argument("--spec", required=True)
    p.add_argument("--method", choices=("closed", "oracle", "both"), default="closed")
    p.add_argument("--rel-tol", type=_positive, default=1e-9,
                   help="tolerance against the moment oracle (default 1e-9)")
    p.add_argument("--quad-rel-tol", type=_positive, default=1e-7,
                   help="tolerance against quadrature (default 1e-7)")
    p.add_argument("--deterministic", action="store_true", help="omit wall-clock timing")
    p.set_defaults(func=cmd_integral)

    p = sub.add_parser("verify", help="randomized closed-form vs oracle certification")
    p.add_argument("--seed", type=_nonneg_int, required=True)
    p.add_argument("--cases", type=int, required=True)
    p.add_argument("--rel-tol", type=_positive, default=1e-9)
    p.add_argument("--quad-rel-tol", type=_positive, default=1e-7)
    p.add_argument("--index-max", type=_nonneg_int, default=8)
    p.add_argument("--coef-max", type=_finite, default=3.0)
    p.add_argument("--f-min", type=_finite, default=0.5)
    p.add_argument("--f-max", type=_finite, default=4.0)
    p.add_argument("--yz-max", type=_finite, default=2.0)
    p.add_argument("--deterministic", action="store_true", help="omit wall-clock timing")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        kernels.resolve_nmax()
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
