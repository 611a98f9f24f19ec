"""``opdlab`` command line.

Exit codes: 0 every check passed, 1 a check failed (witness in the report),
2 usage or configuration error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from math import comb

import numpy as np

from . import __version__
from .cache import Cache, CacheIntegrityError, canonical_key, resolve_dir
from .design import (
    DEFAULT_MAX_COUNTERS,
    DEFAULT_MC_SAMPLES,
    BudgetError,
    DesignError,
    build_design,
    intersection_numbers,
    value_spectrum,
    verify_tdesign,
)
from .geometry import GeometryError, build_S, build_W, classify_lines, hyperoval_of
from .gf import FieldError, parse_field
from .groups import (
    GROUPS,
    GroupError,
    difference_counts,
    group_fixes_blockset,
    is_difference_set,
    is_subgroup,
    stabilizer,
    subset_j,
    verify_tdesign_invariant,
    walsh_check,
)
from .harness import CONJECTURES, DEFAULT_BUDGET, build_cost, parse_m_values, require, run_conjecture
from .poly import (
    Poly,
    PolyError,
    exponent_orbit,
    image_sizes,
    is_dpolynomial,
    is_opolynomial,
    is_permutation,
    is_tmonomial,
    parse_poly,
)

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(ValueError):
    pass


class Outcome:
    """Accumulates the report body of one command."""

    def __init__(self):
        self.results: dict = {}
        self.witnesses: list = []
        self.mode = "exhaustive"
        self.artifacts: dict = {}
        self.timings: dict = {}
        self.design_text: str | None = None
        self.skipped = False

    def fail(self, what: str, witness):
        self.witnesses.append({"check": what, "witness": witness})

    def timed(self, name, fn, *a, **kw):
        t0 = time.perf_counter()
        out = fn(*a, **kw)
        self.timings[name] = round(time.perf_counter() - t0, 6)
        return out


# -- argument parsing --------------------------------------------------------------

def _common(p: argparse.ArgumentParser, poly: bool = True, field_required: bool = True):
    p.add_argument("--field", required=field_required, help="p:m[:modulus-hex]")
    if poly:
        p.add_argument("--poly", help="catalog name, monomial:e or terms:e,c;...")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cache-dir")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="maximum elementary operations")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="opdlab", description="Designs from polynomials over finite fields.")
    ap.add_argument("--version", action="version", version=f"opdlab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("field", help="describe GF(p^m)")
    _common(p, poly=False)

    p = sub.add_parser("poly", help="classify a polynomial")
    _common(p)

    p = sub.add_parser("design", help="build and verify D(f, k)")
    _common(p)
    p.add_argument("--k", type=int, help="block size (default q/2 in characteristic 2)")
    p.add_argument("--verify-t", type=int, action="append", default=[])
    p.add_argument("--extended", action="store_true")
    p.add_argument("--intersections", action="store_true")
    p.add_argument("--samples", type=int, default=DEFAULT_MC_SAMPLES)
    p.add_argument("--export", help="write the hex block list here")

    p = sub.add_parser("spectrum", help="value spectrum")
    _common(p)
    p.add_argument("--extended", action="store_true")

    p = sub.add_parser("stab", help="stabilizer of J_e or of a given set")
    _common(p)
    p.add_argument("--set", help="comma-separated element indices")
    p.add_argument("--group", choices=GROUPS, default="AG1")

    p = sub.add_parser("diffset", help="difference-set test for J_e* or a given set")
    _common(p)
    p.add_argument("--set", help="comma-separated element indices")
    p.add_argument("--group", choices=("multiplicative", "additive"), default="multiplicative")

    p = sub.add_parser("walsh", help="Walsh spectrum of the indicator of J_e")
    _common(p)

    p = sub.add_parser("hyperoval", help="hyperoval of an o-polynomial and its designs")
    _common(p)
    p.add_argument("--designs", action="store_true", help="also build and verify W and S")

    p = sub.add_parser("conjecture", help="per-instance conjecture checks")
    _common(p, poly=False, field_required=False)
    p.add_argument("--id", required=True, choices=CONJECTURES)
    p.add_argument("--m", required=True, help="5, 3,5,7 or 3-7")

    p = sub.add_parser("report", help="validate and summarize stored reports")
    p.add_argument("paths", nargs="*", help="report files (default: every cached report)")
    p.add_argument("--cache-dir")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    return ap


# -- helpers -----------------------------------------------------------------------

def _field(args):
    return parse_field(args.field)


def _poly(args, F) -> Poly:
    if not args.poly:
        raise UsageError("--poly is required")
    return parse_poly(args.poly, F)


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _j_mask(args, F):
    if args.set:
        mask = np.zeros(F.q, dtype=bool)
        mask[_int_list(args.set)] = True
        return mask, {"set": _int_list(args.set)}
    f = _poly(args, F)
    e = f.monomial_exponent
    if e is None:
        raise UsageError("--poly must be a monomial (or pass --set)")
    return subset_j(e, F), {"e": e}


def _verification(d, t, args):
    """Exhaustive counters when affordable, orbit counting for AG1-invariant
    block sets, Monte-Carlo otherwise."""
    counters = comb(d.v, t)
    increments = d.b * comb(d.k, t)
    if counters <= DEFAULT_MAX_COUNTERS and increments <= args.budget:
        return verify_tdesign(d, t)
    if t in (2, 3) and d.field is not None and d.v == d.field.q and group_fixes_blockset("AG1", d):
        return verify_tdesign_invariant(d, t)
    if args.samples * d.b * d.blocks.shape[1] > args.budget:
        raise BudgetError(f"t={t} verification exceeds the budget even in Monte-Carlo mode")
    return verify_tdesign(d, t, max_counters=0, samples=args.samples, seed=args.seed)


def _opoly_witness(f: Poly) -> dict:
    g = f.normalized()
    if not is_permutation(g):
        vals, counts = np.unique(g.values, return_counts=True)
        return {"reason": "not a permutation", "repeated_value": int(vals[np.argmax(counts)])}
    sizes = image_sizes(g, g.field.elements[1:])
    u = int(np.nonzero(sizes != g.q // 2)[0][0]) + 1
    return {"reason": "f(x) + u x is not 2-to-1", "u": u, "image_size": int(sizes[u - 1])}


# -- commands ----------------------------------------------------------------------

def cmd_field(args, out: Outcome):
    F = _field(args)
    out.results = {"q": F.q, "p": F.p, "m": F.m, "modulus": list(F.modulus),
                   "modulus_hex": format(F.modulus_int, "x"), "generator": F.generator}


def cmd_poly(args, out: Outcome):
    F = _field(args)
    f = _poly(args, F)
    r = {"terms": [[e, c] for e, c in f.terms], "permutation": is_permutation(f)}
    ok, k = is_dpolynomial(f)
    r["d_polynomial"] = {"holds": ok, "k": k}
    if F.p == 2:
        r["o_polynomial"] = is_opolynomial(f)
    e = f.monomial_exponent
    if e is not None and F.p != 2 and np.gcd(e, F.q - 1) == 1:
        tm, sizes = is_tmonomial(e, F)
        r["t_monomial"] = {"holds": tm, "sizes": list(sizes)}
    if e is not None and F.p == 2 and np.gcd(e * (e - 1), F.q - 1) == 1:
        r["exponent_orbit"] = sorted(exponent_orbit(e, F).members)
    out.results = r


def cmd_design(args, out: Outcome):
    F = _field(args)
    f = _poly(args, F)
    k = args.k
    if k is None:
        if F.p != 2:
            raise UsageError("--k is required in odd characteristic")
        k = F.q // 2
    require(*build_cost(F.q, args.extended), args.budget, "block construction")
    d = out.timed("build", build_design, f, k, args.extended)
    r = {"v": d.v, "k": d.k, "b": d.b, "raw_tuples": d.raw_count, "construction": d.source["construction"]}
    text = d.export_text()
    out.artifacts["design_sha256"] = _sha(text)
    if args.export:
        with open(args.export, "w") as fh:
            fh.write(text)
    checks = []
    for t in args.verify_t:
        if not 1 <= t < d.k:
            raise UsageError(f"--verify-t {t} needs 1 <= t < k")
        res = out.timed(f"verify_t{t}", _verification, d, t, args)
        checks.append(res.as_dict())
        if res.mode != "exhaustive":
            out.mode = res.mode
        if not res.ok:
            out.fail(f"t={t}", res.witness)
        else:
            r.setdefault("params", []).append({"t": t, "lambda": res.lam,
                                               "admissible": d.b * comb(d.k, t) == res.lam * comb(d.v, t)})
    r["verification"] = checks
    if args.intersections:
        hist, qs = out.timed("intersections", intersection_numbers, d)
        r["intersection_numbers"] = {str(s): n for s, n in hist.items()}
        r["quasi_symmetric"] = qs
    out.results = r
    out.design_text = text


def cmd_spectrum(args, out: Outcome):
    F = _field(args)
    f = _poly(args, F)
    require(*build_cost(F.q, args.extended), args.budget, "value spectrum")
    vs = out.timed("spectrum", value_spectrum, f, args.extended)
    out.results = {"extended": args.extended, "histogram": vs.as_dict(), "total": vs.total()}


def cmd_stab(args, out: Outcome):
    F = _field(args)
    mask, label = _j_mask(args, F)
    mu, maps = out.timed("stabilizer", stabilizer, mask, F, args.group)
    out.results = {**label, "group": args.group, "set_size": int(mask.sum()), "mu": mu,
                   "elements": [s.as_list() for s in maps], "subgroup": is_subgroup(maps, F)}


def cmd_diffset(args, out: Outcome):
    F = _field(args)
    mask, label = _j_mask(args, F)
    if args.group == "multiplicative" and not args.set:
        mask = mask.copy()
        mask[0] = False
    params = is_difference_set(mask, F, args.group)
    out.results = {**label, "group": args.group, "size": int(mask.sum()),
                   "difference_set": list(params.as_tuple()) if params else None}
    if params is None:
        counts = difference_counts(mask, F, args.group)
        i = int(np.nonzero(counts != counts[0])[0][0]) if len(counts) else 0
        elem = (lambda j: int(F.exp_table[j])) if args.group == "multiplicative" else (lambda j: j + 1)
        out.fail("difference set", {"element": elem(0), "count": int(counts[0]),
                                    "other_element": elem(i), "other_count": int(counts[i])})


def cmd_walsh(args, out: Outcome):
    F = _field(args)
    f = _poly(args, F)
    e = f.monomial_exponent
    if e is None:
        raise UsageError("walsh needs --poly monomial:e")
    rep = out.timed("walsh", walsh_check, e, F)
    out.results = rep.as_dict()
    if not rep.ok:
        out.fail("walsh", {"mismatches": rep.mismatches[:16], "routes_agree": rep.routes_agree,
                           "parseval": rep.parseval})


def cmd_hyperoval(args, out: Outcome):
    F = _field(args)
    f = _poly(args, F)
    if F.p != 2:
        raise UsageError("hyperovals need characteristic 2")
    if not is_opolynomial(f):
        out.results = {"o_polynomial": False}
        out.fail("o-polynomial", _opoly_witness(f))
        return
    H = out.timed("hyperoval", hyperoval_of, f)
    sec, ext = classify_lines(H)
    r = {"o_polynomial": True, "points": [list(t) for t in H.triples()],
         "secants": len(sec), "exterior": len(ext)}
    if args.designs:
        for name, builder in (("W", build_W), ("S", build_S)):
            d = out.timed(name, builder, H)
            res = verify_tdesign(d, 2) if d.k > 2 else None
            r[name] = {"v": d.v, "k": d.k, "b": d.b, "lambda": res.lam if res else 1,
                       "symmetric": d.b == d.v, "trivial": d.trivial}
            if res is not None and not res.ok:
                out.fail(f"{name} t=2", res.witness)
    out.results = r


def cmd_conjecture(args, out: Outcome):
    ms = parse_m_values(args.m)
    cases = out.timed("conjecture", run_conjecture, args.id, ms, args.budget)
    out.results = {"id": args.id, "cases": [c.as_dict() for c in cases]}
    for c in cases:
        if c.verdict == "fails":
            out.fail(f"{c.id} m={c.m} {c.family}", c.witness)
    out.skipped = any(c.verdict == "skipped" for c in cases)


COMMANDS = {
    "field": cmd_field, "poly": cmd_poly, "design": cmd_design, "spectrum": cmd_spectrum,
    "stab": cmd_stab, "diffset": cmd_diffset, "walsh": cmd_walsh, "hyperoval": cmd_hyperoval,
    "conjecture": cmd_conjecture,
}


# -- reports -----------------------------------------------------------------------

def _sha(text: str) -> str:
    import hashlib

    return hashlib.sha256(text.encode()).hexdigest()


def _inputs(args) -> dict:
    skip = {"cache_dir", "format", "export"}
    d = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    if getattr(args, "field", None):
        d["field"] = parse_field(args.field).describe()  # modulus always explicit
    d["version"] = __version__
    return d


def make_report(args, out: Outcome, code: int, status: str, key: str) -> dict:
    rep = {
        "schema": SCHEMA,
        "experiment": f"{args.command}-{key[:16]}",
        "command": args.command,
        "inputs": _inputs(args),
        "mode": out.mode,
        "seed": args.seed,
        "status": status,
        "exit_code": code,
        "results": out.results,
        "witnesses": out.witnesses,
        "artifacts": out.artifacts,
        "timings": out.timings,
    }
    if out.mode == "monte-carlo":
        rep["samples"] = getattr(args, "samples", None)
    return rep


def dumps_report(rep: dict) -> str:
    return json.dumps(rep, sort_keys=True, indent=2) + "\n"


def _flatten(prefix: str, obj, rows: list):
    if isinstance(obj, dict):
        for k in sorted(obj):
            _flatten(f"{prefix}.{k}" if prefix else str(k), obj[k], rows)
    elif isinstance(obj, list) and obj and all(isinstance(x, dict) for x in obj):
        for i, x in enumerate(obj):
            _flatten(f"{prefix}[{i}]", x, rows)
    else:
        rows.append((prefix, json.dumps(obj) if isinstance(obj, (list, dict)) else obj))


def to_csv(rep: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if rep.get("command") == "conjecture":
        w.writerow(["id", "m", "family", "verdict", "detail", "witness"])
        for c in rep["results"]["cases"]:
            w.writerow([c["id"], c["m"], c["family"], c["verdict"], json.dumps(c["detail"], sort_keys=True),
                        json.dumps(c.get("witness"), sort_keys=True) if c.get("witness") else ""])
        return buf.getvalue()
    w.writerow(["key", "value"])
    rows: list = []
    _flatten("", {k: v for k, v in rep.items() if k != "timings"}, rows)
    w.writerows(rows)
    return buf.getvalue()


def emit(rep: dict, fmt: str, text: str | None = None):
    sys.stdout.write(to_csv(rep) if fmt == "csv" else (text or dumps_report(rep)))


def cmd_report(args) -> int:
    paths = list(args.paths)
    blobs = []
    try:
        if paths:
            blobs = [(p, open(p, "rb").read()) for p in paths]
        else:
            root = resolve_dir(args.cache_dir)
            if root is None:
                print("opdlab: error: no report files and no cache directory", file=sys.stderr)
                return EXIT_USAGE
            cache = Cache(root)
            blobs = [(k, cache.lookup(k)) for k in cache.keys()]
    except (OSError, CacheIntegrityError) as e:
        print(f"opdlab: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    rows = []
    for name, data in blobs:
        try:
            rep = json.loads(data)
        except ValueError:
            print(f"opdlab: error: {name} is not JSON", file=sys.stderr)
            return EXIT_USAGE
        if rep.get("schema") != SCHEMA:
            print(f"opdlab: error: {name} has unsupported schema {rep.get('schema')!r}", file=sys.stderr)
            return EXIT_USAGE
        rows.append({"source": str(name), "experiment": rep["experiment"], "command": rep["command"],
                     "status": rep["status"], "mode": rep["mode"], "exit_code": rep["exit_code"]})
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=["source", "experiment", "command", "status", "mode", "exit_code"],
                           lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        sys.stdout.write(buf.getvalue())
    else:
        sys.stdout.write(json.dumps({"schema": SCHEMA, "reports": rows}, indent=2, sort_keys=True) + "\n")
    return max((r["exit_code"] for r in rows), default=EXIT_OK)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.command == "report":
        return cmd_report(args)
    try:
        key = canonical_key(_inputs(args))
        cache_root = resolve_dir(args.cache_dir)
        cache = Cache(cache_root) if cache_root else None
        if cache is not None:
            hit = cache.lookup(key)
            if hit is not None:
                rep = json.loads(hit)
                emit(rep, args.format, hit.decode())
                return rep["exit_code"]
    except (FieldError, CacheIntegrityError, ValueError) as e:
        print(f"opdlab: error: {e}", file=sys.stderr)
        return EXIT_USAGE

    out = Outcome()
    try:
        COMMANDS[args.command](args, out)
    except BudgetError as e:
        out.results.setdefault("error", str(e))
        rep = make_report(args, out, EXIT_BUDGET, "budget-exceeded", key)
        emit(rep, args.format)
        return EXIT_BUDGET
    except (UsageError, FieldError, PolyError, DesignError, GroupError, GeometryError, ValueError) as e:
        print(f"opdlab: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if out.witnesses:
        code, status = EXIT_FAIL, "fail"
    elif out.skipped:
        code, status = EXIT_BUDGET, "partial"
    else:
        code, status = EXIT_OK, "pass"
    rep = make_report(args, out, code, status, key)
    text = dumps_report(rep)
    if cache is not None:
        if out.design_text is not None:
            cache.put_blob(out.design_text.encode())
        cache.store(key, text.encode())
    emit(rep, args.format, text)
    return code


if __name__ == "__main__":
    sys.exit(main())
