"""Command-line front end.

Every command writes its payload to stdout (or ``--out``) and one JSON run
manifest to stderr (or ``--manifest``). Payloads are deterministic; only the
manifest's wall time varies between identical runs.

Exit codes: 0 success, 1 failed internal check or I/O error, 2 invalid
arguments, 3 counterexample found (``verify`` found a progression, or
``random`` met a witness-free trial).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .diagnostics import PeriodicZColouring, find_gaps, is_table, ladder_sweep, lemma1_bound
from .exact import Colour, format_rational
from .fractal import (
    AP1414,
    AP3X30000,
    CONSTRUCTIONS,
    apply_T,
    config_to_csv,
    config_to_dict,
    get_construction,
    iterate,
    iterate_levels,
    measure,
    check_properties,
    reflect,
    verify_band_structure,
)
from .search import (
    CyclicColouring,
    PatternSpec,
    empirical_findability,
    induce,
    verify_no_pattern,
)

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_COUNTEREXAMPLE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def primes_upto(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for q in range(2, int(n**0.5) + 1):
        if sieve[q]:
            sieve[q * q :: q] = False
    return np.flatnonzero(sieve).tolist()


def _fill(text: str) -> Colour | None:
    return None if text == "none" else Colour.parse(text)


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("APLAB_JOBS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------- build


def cmd_build(args) -> tuple[int, str, dict]:
    cons = get_construction(args.construction)
    if not 0 <= args.level <= cons.max_level:
        raise UsageError(f"level {args.level} outside 0..{cons.max_level} for {cons.id}")
    config = iterate(cons.id, args.level)
    if args.format == "json":
        payload = json.dumps(config_to_dict(config), indent=1) + "\n"
    elif args.format == "csv":
        payload = config_to_csv(config)
    else:
        lines = [f"{cons.id} level {config.level}: {len(config)} intervals"]
        lines += [repr(ivl) for ivl in config.intervals]
        payload = "\n".join(lines) + "\n"
    return EXIT_OK, payload, {"intervals": len(config)}


# ---------------------------------------------------------------- verify


def _verify_one(job) -> dict:
    construction, p, depth, fill, a, b = job
    c = induce(construction, p, depth, _fill(fill))
    cert = verify_no_pattern(c, PatternSpec(a, b), allow_partial=True)
    out = cert.to_dict()
    out.update(unresolved=c.unresolved, depth=depth, fill=fill)
    return out


def cmd_verify(args) -> tuple[int, str, dict]:
    cons = get_construction(args.construction)
    spec = PatternSpec(*args.pattern)
    moduli = list(args.primes or []) + (primes_upto(args.primes_upto) if args.primes_upto else [])
    if not moduli:
        raise UsageError("give --primes and/or --primes-upto")
    if min(moduli) < 2:
        raise UsageError("moduli must be at least 2")
    moduli = sorted(set(moduli))
    depth = cons.default_depth if args.depth is None else args.depth
    if depth < 0:
        raise UsageError("depth must be non-negative")
    jobs = [(cons.id, p, depth, args.fill, spec.a, spec.b) for p in moduli]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_verify_one, jobs, chunksize=4))
    else:
        results = [_verify_one(j) for j in jobs]
    failed = [r for r in results if not r["verified"]]
    summary = {
        "construction": cons.id,
        "pattern": {"a": spec.a, "b": spec.b},
        "depth": depth,
        "fill": args.fill,
        "moduli": len(results),
        "verified": len(results) - len(failed),
        "counterexamples": len(failed),
    }
    if args.format == "json":
        payload = json.dumps({"summary": summary, "results": results}, indent=1) + "\n"
    else:
        lines = []
        for r in results:
            verdict = "verified" if r["verified"] else f"COUNTEREXAMPLE {json.dumps(r['counterexample'])}"
            lines.append(f"p={r['p']} unresolved={r['unresolved']} {verdict}")
        lines.append(
            f"{summary['verified']}/{summary['moduli']} moduli free of {spec}-APs"
            f" ({cons.id}, depth {depth}, fill {args.fill})"
        )
        payload = "\n".join(lines) + "\n"
    if failed and args.witness_out:
        Path(args.witness_out).write_text(
            json.dumps([dict(p=r["p"], **r["counterexample"]) for r in failed], indent=1) + "\n"
        )
    return (EXIT_COUNTEREXAMPLE if failed else EXIT_OK), payload, summary


# ---------------------------------------------------------------- report


def _report_rows(construction: str, max_level: int) -> list[dict]:
    levels = list(iterate_levels(construction, max_level + (construction == AP3X30000)))
    rows = []
    for k in range(max_level + 1):
        cfg = levels[k]
        if construction == AP1414:
            symmetric = apply_T(cfg).same_partition(cfg)
            structure = verify_band_structure(cfg, k)
        else:
            symmetric = reflect(cfg, Fraction(1, 4)).same_partition(cfg)
            structure = check_properties(levels[k - 1] if k else None, cfg, levels[k + 1])
        rows.append(
            {
                "level": k,
                "intervals": len(cfg),
                "red": format_rational(measure(cfg, Colour.RED)),
                "blue": format_rational(measure(cfg, Colour.BLUE)),
                "uncoloured": format_rational(measure(cfg, None)),
                "symmetry": symmetric,
                "structure": structure.ok,
            }
        )
    return rows


def cmd_report(args) -> tuple[int, str, dict]:
    cons = get_construction(args.construction)
    if not 0 <= args.max_level <= cons.max_level:
        raise UsageError(f"max level {args.max_level} outside 0..{cons.max_level} for {cons.id}")
    rows = _report_rows(cons.id, args.max_level)
    cols = list(rows[0])
    if args.format == "json":
        payload = json.dumps({"construction": cons.id, "rows": rows}, indent=1) + "\n"
    elif args.format == "csv":
        payload = "\n".join([",".join(cols)] + [",".join(str(r[c]) for c in cols) for r in rows]) + "\n"
    else:
        payload = "\n".join(
            [f"{cons.id}"] + ["  ".join(f"{c}={r[c]}" for c in cols) for r in rows]
        ) + "\n"
    ok = all(r["symmetry"] and r["structure"] for r in rows)
    return (EXIT_OK if ok else EXIT_CHECK), payload, {"levels": len(rows), "all_checks_pass": ok}


# ---------------------------------------------------------------- random


def cmd_random(args) -> tuple[int, str, dict]:
    spec = PatternSpec(*args.pattern)
    refs = []
    for name in args.reference or []:
        for p in args.prime:
            refs.append((f"{name}@{p}", induce(name, p, None, Colour.BLUE)))
    try:
        report = empirical_findability(args.prime, spec, args.trials, args.delta, args.seed, refs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    dumped = []
    for row in report.rows:
        for i, c in enumerate(row.counterexamples):
            if args.dump_dir:
                path = Path(args.dump_dir) / f"witness_free_p{row.p}_{i}.txt"
                path.parent.mkdir(parents=True, exist_ok=True)
                path.write_text(c.to_text())
                dumped.append(str(path))
            else:
                dumped.append(c.to_text().split()[1])
    data = report.to_dict()
    data["witness_free_colourings"] = dumped
    if args.format == "json":
        payload = json.dumps(data, indent=1) + "\n"
    else:
        lines = [
            f"p={r.p} trials={r.trials} with_witness={r.with_witness} fraction={float(r.fraction):.6f}"
            for r in report.rows
        ]
        lines += [f"reference {name}: {'witness-free' if cert.verified else 'has witness'}" for name, cert in report.references]
        lines += [f"witness-free: {x}" for x in dumped]
        payload = "\n".join(lines) + "\n"
    code = EXIT_OK if report.all_found else EXIT_COUNTEREXAMPLE
    return code, payload, {"all_trials_have_witness": report.all_found, "witness_free": len(dumped)}


# ---------------------------------------------------------------- ladders / diag


def cmd_ladders(args) -> tuple[int, str, dict]:
    if args.samples < 1 or args.anchors < 1:
        raise UsageError("samples and anchors must be positive")
    rows = ladder_sweep(args.samples, args.anchors, args.seed)
    ok = all(r["valid"] == r["ladders"] == r["hit_blue"] for r in rows)
    if args.format == "json":
        payload = json.dumps(rows, indent=1) + "\n"
    else:
        payload = "\n".join(
            f"case {r['case']} d in [{r['d_range'][0]}, {r['d_range'][1]}]: "
            f"{r['valid']}/{r['ladders']} valid, {r['hit_blue']}/{r['ladders']} meet [1/2,3/4]"
            for r in rows
        ) + "\n"
    return (EXIT_OK if ok else EXIT_CHECK), payload, {"all_pass": ok}


def cmd_diag(args) -> tuple[int, str, dict]:
    text = Path(args.colouring).read_text()
    try:
        c = CyclicColouring.from_text(text)
        z = PeriodicZColouring.from_cyclic(c)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    lo, hi = args.window if args.window else (0, c.p)
    gaps = find_gaps(z, (lo, hi))
    data: dict = {
        "p": c.p,
        "window": [lo, hi],
        "gaps": [[g.start, g.end] for g in gaps],
        "longest_gap": max((g.length for g in gaps), default=None),
    }
    if args.table:
        d, ell, m, k = args.table
        data["table"] = {"d": d, "ell": ell, "m": m, "k": k, "is_table": is_table(z, d, ell, m, k)}
    if args.bound:
        m, k = args.bound
        data["lemma1_bound"] = {"m": m, "k": k, "bound": lemma1_bound(m, k)}
    if args.format == "json":
        payload = json.dumps(data, indent=1) + "\n"
    else:
        lines = [f"p={c.p} window [{lo}, {hi}]: {len(gaps)} gaps, longest {data['longest_gap']}"]
        lines += [f"gap [{g.start}, {g.end}]" for g in gaps]
        if "table" in data:
            lines.append(f"is_table(d={d}, ell={ell}, m={m}, k={k}) = {data['table']['is_table']}")
        if "lemma1_bound" in data:
            lines.append(f"lemma1_bound(m={m}, k={k}) = {data['lemma1_bound']['bound']}")
        payload = "\n".join(lines) + "\n"
    return EXIT_OK, payload, {"gaps": len(gaps)}


# ---------------------------------------------------------------- wiring


def _pattern(parser):
    parser.add_argument("--pattern", nargs=2, type=int, metavar=("A", "B"), required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aplab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--out", help="write the payload here instead of stdout")
    common.add_argument("--manifest", help="write the run manifest here instead of stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    names = sorted(CONSTRUCTIONS)

    p = sub.add_parser("build", parents=[common], help="materialize c_k of a construction")
    p.add_argument("construction", choices=names)
    p.add_argument("--level", type=int, default=0)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", parents=[common], help="exhaustively search induced colourings")
    p.add_argument("construction", choices=names)
    _pattern(p)
    p.add_argument("--primes", nargs="+", type=int)
    p.add_argument("--primes-upto", type=int)
    p.add_argument("--depth", type=int)
    p.add_argument("--fill", choices=("blue", "red", "none"), default="blue")
    p.add_argument("--jobs", type=int, default=_default_jobs())
    p.add_argument("--witness-out", help="also write counterexample witnesses to this JSON file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("report", parents=[common], help="per-level measures and structural checks")
    p.add_argument("construction", choices=names)
    p.add_argument("--max-level", type=int, default=8)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("random", parents=[common], help="search random dense colourings")
    _pattern(p)
    p.add_argument("--prime", nargs="+", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reference", nargs="+", choices=names, help="also verify induced constructions")
    p.add_argument("--dump-dir", help="directory for witness-free colourings")
    p.set_defaults(func=cmd_random)

    p = sub.add_parser("ladders", parents=[common], help="sweep the explicit ladders")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--anchors", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_ladders)

    p = sub.add_parser("diag", parents=[common], help="gap/table analysis of a colouring file")
    p.add_argument("colouring")
    p.add_argument("--window", nargs=2, type=int, metavar=("LO", "HI"))
    p.add_argument("--table", nargs=4, type=int, metavar=("D", "ELL", "M", "K"))
    p.add_argument("--bound", nargs=2, type=int, metavar=("M", "K"))
    p.set_defaults(func=cmd_diag)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    params = {k: v for k, v in vars(args).items() if k not in ("func", "manifest", "out")}
    t0 = time.perf_counter()
    try:
        code, payload, result = args.func(args)
    except UsageError as exc:
        print(f"aplab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"aplab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"aplab {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_CHECK
    manifest = {
        "command": args.command,
        "params": params,
        "version": __version__,
        "seed": getattr(args, "seed", None),
        "wall_time_s": round(time.perf_counter() - t0, 3),
        "exit_code": code,
        "result": result,
    }
    try:
        if args.out:
            Path(args.out).write_text(payload)
        else:
            sys.stdout.write(payload)
        if args.manifest:
            Path(args.manifest).write_text(json.dumps(manifest, sort_keys=True) + "\n")
        else:
            print(json.dumps(manifest, sort_keys=True), file=sys.stderr)
    except OSError as exc:
        print(f"aplab {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_CHECK
    return code


if __name__ == "__main__":
    sys.exit(main())
