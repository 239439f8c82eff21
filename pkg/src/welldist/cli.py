"""Command-line entry point: ``welldist <subcommand> ...``.

Exit codes: 0 when everything checked passes, 2 when any verification
fails or is indeterminate, 1 on operational errors (bad input, I/O).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from . import analysis
from .construction import ConstructionParams, build, relaxed_default, state_from_json, state_to_json
from .distribution import window_profile
from .prime_engine import PrimeWindows, sieve, window_by_index, write_binary, write_csv
from .report import prime_source, write_report
from .run_finder import SearchBudget, enumerate_runs, find_first_run

EXIT_OK, EXIT_ERROR, EXIT_FAILED = 0, 1, 2


class CliError(Exception):
    pass


def _emit(obj, out: str | None = None) -> None:
    text = json.dumps(obj, indent=1) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_state(path: str):
    try:
        data = json.loads(Path(path).read_text())
        return state_from_json(data)
    except FileNotFoundError as exc:
        raise CliError(f"state file not found: {path}") from exc
    except (ValueError, KeyError, TypeError) as exc:
        raise CliError(f"invalid state file {path}: {exc}") from exc


def read_config(path: str) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment.  Keys use flag names (dashes ok)."""
    conf = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        conf[key.replace("-", "_")] = value
    return conf


# -- subcommands -------------------------------------------------------------------


def cmd_sieve(args) -> int:
    table = sieve(args.limit)
    if args.format == "csv":
        if args.out:
            with open(args.out, "w", newline="") as fh:
                write_csv(table, fh)
        else:
            write_csv(table, sys.stdout)
    else:
        if not args.out:
            raise CliError("--out is required for binary output")
        with open(args.out, "wb") as fh:
            write_binary(table, fh)
    print(json.dumps({"limit": table.limit, "count": table.count}), file=sys.stderr)
    return EXIT_OK


def cmd_find_run(args) -> int:
    budget = SearchBudget(args.max_prime)
    if args.all:
        for run in enumerate_runs(args.k, args.q, args.a, budget, threads=args.threads):
            sys.stdout.write(json.dumps(run.to_json()) + "\n")
        return EXIT_OK
    res = find_first_run(args.k, args.q, args.a, budget, threads=args.threads)
    sys.stdout.write(json.dumps(res.to_json()) + "\n")
    return EXIT_OK


def _params_from_args(args) -> ConstructionParams:
    # the preset needs primes up to ~6.2e8; other modes default to 1e8
    if args.preset == "relaxed-default" or (args.mode == "relaxed" and args.preset is None):
        kw = {"max_prime": args.max_prime or 10**9, "h_max": args.h_max}
        if args.modulus_exponent is not None:
            kw["modulus_exponent"] = args.modulus_exponent
        if args.run_length is not None:
            kw["run_length"] = args.run_length
        return relaxed_default(args.stages, **kw)
    if args.mode == "faithful":
        return ConstructionParams(mode="faithful", stages=args.stages, budget=SearchBudget(args.max_prime or 10**8))
    digits = tuple(int(x) for x in args.digits.split(",")) if args.digits else ()
    return ConstructionParams(
        mode=args.mode,
        stages=args.stages,
        budget=SearchBudget(args.max_prime or 10**8),
        base=args.base,
        first_exponent=args.first_exponent or 1,
        modulus_exponent=args.modulus_exponent,
        run_length=args.run_length,
        digits=digits,
        b_max=max(digits, default=1),
        growth="capped",
        h_max=args.h_max,
    )


def cmd_build(args) -> int:
    params = _params_from_args(args)
    state = build(params, threads=args.threads)
    _emit(state_to_json(state), args.out)
    return EXIT_OK


def _state_primes(state, shift: int | None = None, N: int = 0, threads: int | None = None):
    src = prime_source(state)
    if shift is not None and not src.covers(shift + 1, N):
        src = PrimeWindows(*src.sources, window_by_index(shift + 1, N, threads=threads))
    return src


def cmd_weyl(args) -> int:
    state = _load_state(args.state)
    primes = _state_primes(state, args.shift, args.N, args.threads)
    res = analysis.weyl_sum(analysis.WeylQuery(args.h, args.N, args.shift, state.alpha, state.tail_bound), primes)
    _emit({"h": args.h, "N": args.N, "shift": args.shift, **res.to_json(),
           "truncation_error": res.truncation_error, "rounding_error": res.rounding_error})
    return EXIT_OK


def cmd_verify(args) -> int:
    state = _load_state(args.state)
    if args.lemma == "liouville":
        rep = analysis.verify_liouville(state)
    else:
        primes = _state_primes(state)
        if args.lemma == "2.2":
            rep = analysis.verify_lemma22(state, args.h, args.k, primes)
        elif args.lemma == "pointwise":
            rep = analysis.verify_pointwise(state, args.h, args.k, primes)
        else:
            Ns = [args.N] if args.N else range(1, state.stage(args.k).length + 1)
            reps = [analysis.verify_sandwich(state, args.h, args.k, N, primes) for N in Ns]
            checks = [c for r in reps for c in r["checks"]]
            rep = {"check": "sandwich", "h": args.h, "k": args.k, "checks": checks,
                   "summary": analysis.summarize(checks)}
    rep = dict(rep)
    rep["checks"] = [c.to_json() for c in rep["checks"]]
    _emit(rep)
    return EXIT_OK if rep["summary"]["all_pass"] else EXIT_FAILED


def cmd_discrepancy(args) -> int:
    state = _load_state(args.state)
    data = json.loads(Path(args.windows).read_text())
    if isinstance(data, dict):
        data = data.get("windows", [])
    windows = [(int(w["m"]), int(w["N"])) if isinstance(w, dict) else (int(w[0]), int(w[1])) for w in data]
    sources = list(prime_source(state).sources)
    for m, N in windows:
        if not any(s.covers(m + 1, N) for s in sources):
            sources.append(window_by_index(m + 1, N, threads=args.threads))
    reports = window_profile(state.alpha, args.h, PrimeWindows(*sources), windows, state.tail_bound)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["m", "N", "d_star", "argmax"])
        for r in reports:
            w.writerow([r.m, r.N, repr(r.d_star), repr(r.argmax)])
    finally:
        if args.out:
            fh.close()
    return EXIT_OK


def cmd_report(args) -> int:
    state = _load_state(args.state)
    summary = write_report(state, args.out_dir, h_max=args.h_max, seed=args.seed, random_shifts=args.random_shifts)
    _emit({k: summary[k] for k in ("banner", "mode", "stages", "seed", "verification", "all_pass")})
    return EXIT_OK if summary["all_pass"] else EXIT_FAILED


# -- parser -----------------------------------------------------------------------


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="welldist", description="Well-distribution counterexample toolkit")
    p.add_argument("--threads", type=int, default=None, help="sieve threads (env WELLDIST_THREADS)")
    p.add_argument("--config", default=None, help="key=value file; command-line flags take precedence")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sieve", help="write all primes up to a limit")
    s.add_argument("--limit", type=int, required=True)
    s.add_argument("--out", default=None)
    s.add_argument("--format", choices=["bin", "csv"], default="bin")
    s.set_defaults(func=cmd_sieve)

    s = sub.add_parser("find-run", help="consecutive primes in one residue class")
    s.add_argument("-k", type=int, required=True)
    s.add_argument("-q", type=int, required=True)
    s.add_argument("-a", type=int, default=1)
    s.add_argument("--max-prime", type=int, required=True)
    s.add_argument("--all", action="store_true", help="every maximal run instead of the first")
    s.set_defaults(func=cmd_find_run)

    s = sub.add_parser("build", help="construct alpha and write state.json")
    s.add_argument("--mode", choices=["faithful", "relaxed", "generalized"], default="faithful")
    s.add_argument("--stages", type=int, default=0)
    s.add_argument("--max-prime", type=int, default=None, help="prime budget (1e9 for the preset, else 1e8)")
    s.add_argument("--preset", choices=["relaxed-default"], default=None)
    s.add_argument("--modulus-exponent", type=int, default=None)
    s.add_argument("--run-length", type=int, default=None)
    s.add_argument("--first-exponent", type=int, default=None)
    s.add_argument("--base", type=int, default=2)
    s.add_argument("--digits", default=None, help="comma-separated b_k (generalized mode)")
    s.add_argument("--h-max", type=int, default=16)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_build)

    s = sub.add_parser("weyl", help="one normalized Weyl sum")
    s.add_argument("--state", required=True)
    s.add_argument("--h", type=int, default=1)
    s.add_argument("--shift", type=int, default=0)
    s.add_argument("--N", type=int, required=True)
    s.set_defaults(func=cmd_weyl)

    s = sub.add_parser("verify", help="check one inequality family")
    s.add_argument("--state", required=True)
    s.add_argument("--lemma", choices=["2.2", "pointwise", "sandwich", "liouville"], required=True)
    s.add_argument("--h", type=int, default=1)
    s.add_argument("--k", type=int, default=0)
    s.add_argument("--N", type=int, default=None)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("discrepancy", help="star discrepancy per window")
    s.add_argument("--state", required=True)
    s.add_argument("--h", type=int, default=1)
    s.add_argument("--windows", required=True, help='JSON: [[m, N], ...] or {"windows": [{"m":..,"N":..}]}')
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_discrepancy)

    s = sub.add_parser("report", help="full report bundle")
    s.add_argument("--state", required=True)
    s.add_argument("--h-max", type=int, default=16)
    s.add_argument("--out-dir", required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--random-shifts", type=int, default=8)
    s.set_defaults(func=cmd_report)
    return p


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, rest = pre.parse_known_args(argv)
    if not known.config:
        return
    conf = read_config(known.config)
    command = next((a for a in rest if not a.startswith("-")), None)
    subs = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    targets = [parser] + ([subs.choices[command]] if command in subs.choices else [])
    for target in targets:
        by_dest = {a.dest: a for a in target._actions}
        defaults = {}
        for key, value in conf.items():
            action = by_dest.get(key)
            if action is None or action.dest in ("help", "config", "command"):
                continue
            if isinstance(action, argparse._StoreTrueAction):
                defaults[key] = value.lower() in ("1", "true", "yes", "on")
            else:
                defaults[key] = action.type(value) if action.type else value
                action.required = False
        target.set_defaults(**defaults)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = make_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        if args.threads is None and os.environ.get("WELLDIST_THREADS"):
            args.threads = int(os.environ["WELLDIST_THREADS"])
        return args.func(args)
    except (CliError, ValueError, IndexError, MemoryError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
