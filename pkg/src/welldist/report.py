"""Report bundle for a built state: tables, verification results and a scatter plot.

Everything written here is deterministic for a given state, ``h_max`` and
seed; the SVG carries no timestamp.
"""

from __future__ import annotations

import csv
import json
import random
from pathlib import Path

from . import analysis
from .analysis import phases
from .construction import ConstructionState, liouville_records
from .distribution import window_profile
from .prime_engine import PrimeWindows, sieve, window_at
from .radix import encode

PROFILE_N = (1, 2, 3, 4, 8, 16, 32, 64, 128, 256)
UNSHIFTED_N = 10_000
SCATTER_N = 200
BASE_LIMIT = 2_000_000
BUNDLE_FILES = (
    "stages.csv",
    "liouville.csv",
    "verification.json",
    "criterion_profile.csv",
    "discrepancy.csv",
    "scatter.svg",
    "summary.json",
)


def prime_source(state: ConstructionState, extra: int = max(PROFILE_N), base_limit: int = BASE_LIMIT) -> PrimeWindows:
    """A table of small primes plus a window around every recorded string."""
    table = sieve(base_limit)
    windows = [
        window_at(s.m + 1, s.run.first_prime, max(s.length, extra))
        for s in state.stages
        if not s.run.synthetic and not table.covers(s.m + 1, max(s.length, extra))
    ]
    return PrimeWindows(table, *windows)


def verification(state: ConstructionState, h_max: int, primes) -> dict:
    """Small-distance, pointwise and sandwich checks for every stage and ``1 <= h <= h_max``."""
    results = []
    totals = {"pass": 0, "fail": 0, "indeterminate": 0}
    for s in state.stages:
        if s.run.synthetic:
            continue
        for h in range(1, h_max + 1):
            entries = [
                analysis.verify_lemma22(state, h, s.k, primes),
                analysis.verify_pointwise(state, h, s.k, primes),
            ]
            entries += [analysis.verify_sandwich(state, h, s.k, N, primes) for N in range(1, s.length + 1)]
            for e in entries:
                for key in totals:
                    totals[key] += e["summary"][key]
                results.append({
                    "check": e["check"], "h": h, "k": s.k, "N": e.get("N"),
                    "summary": e["summary"], "checks": [c.to_json() for c in e["checks"]],
                })
    return {"results": results, "totals": totals, "all_pass": totals["fail"] == totals["indeterminate"] == 0}


def _write_csv(path: Path, rows: list[dict], columns: list[str]) -> None:
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
        w.writeheader()
        for r in rows:
            w.writerow(r)


def _scatter_svg(series: list[tuple[str, list[float]]]) -> str:
    """One panel per series: x = position in window, y = fractional part."""
    width, panel_h, pad = 640, 180, 30
    height = pad + len(series) * (panel_h + pad)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="monospace" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for row, (label, ys) in enumerate(series):
        top = pad + row * (panel_h + pad)
        left, plot_w = 50, width - 70
        out.append(f'<text x="{left}" y="{top - 8}">{label}</text>')
        out.append(f'<rect x="{left}" y="{top}" width="{plot_w}" height="{panel_h}" fill="none" stroke="#888"/>')
        out.append(f'<text x="{left - 30}" y="{top + 10}">1</text>')
        out.append(f'<text x="{left - 30}" y="{top + panel_h}">0</text>')
        n = max(len(ys), 2)
        for i, y in enumerate(ys):
            cx = left + plot_w * i / (n - 1)
            cy = top + panel_h * (1.0 - y)
            out.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="2" fill="#1f4e9c"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_report(
    state: ConstructionState,
    out_dir: str | Path,
    *,
    h_max: int = 16,
    seed: int = 0,
    random_shifts: int = 8,
    primes=None,
) -> dict:
    """Write the bundle into ``out_dir`` and return its summary.

    Files: ``stages.csv``, ``liouville.csv``, ``verification.json``,
    ``criterion_profile.csv``, ``discrepancy.csv``, ``scatter.svg`` and
    ``summary.json``.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    primes = primes if primes is not None else prime_source(state)
    partial = not state.complete

    stage_rows = [
        {
            "k": s.k, "n_k": s.n, "digit": s.digit, "modulus": s.modulus, "m_k": s.m,
            "run_length": s.length, "first_prime": s.run.first_prime, "pi_k": s.pi,
            "synthetic": int(s.run.synthetic),
        }
        for s in state.stages
    ]
    _write_csv(out / "stages.csv", stage_rows, list(stage_rows[0]) if stage_rows else ["k"])

    lv_rows = []
    for rec in liouville_records(state):
        lv_rows.append({
            "k": rec.k,
            "n_k": state.stages[rec.k].n,
            "a_odd": int(rec.a & 1),
            "coprime": int(rec.coprime),
            "gap_bound": encode(rec.gap_bound) if rec.gap_bound is not None else "",
            "log2_gap_bound_upper": rec.gap_bound.log2_upper() if rec.gap_bound is not None else "",
            "threshold": encode(rec.threshold),
            "holds": "" if rec.holds is None else int(rec.holds),
        })
    _write_csv(out / "liouville.csv", lv_rows,
               ["k", "n_k", "a_odd", "coprime", "gap_bound", "log2_gap_bound_upper", "threshold", "holds"])

    ver = verification(state, h_max, primes)
    (out / "verification.json").write_text(json.dumps(ver, indent=1) + "\n")

    rng = random.Random(seed)
    table = primes.sources[0]
    shifts = [s.m for s in state.stages if not s.run.synthetic and primes.covers(s.m + 1, max(PROFILE_N))]
    shifts += [rng.randrange(0, table.count - max(PROFILE_N)) for _ in range(random_shifts)]
    profile = analysis.criterion_profile(1, state.alpha, primes, PROFILE_N, shifts or [0], state.tail_bound)
    _write_csv(out / "criterion_profile.csv", profile, list(profile[0]))

    windows = [(0, UNSHIFTED_N)] + [(s.m, s.length) for s in state.stages if not s.run.synthetic]
    disc = window_profile(state.alpha, 1, primes, windows, state.tail_bound)
    _write_csv(out / "discrepancy.csv", [
        {**d.to_row(), "h": d.h, "float_error": d.float_error} for d in disc
    ], ["m", "N", "d_star", "argmax", "h", "float_error"])

    series = [("m=0 (unshifted)", phases(state.alpha, 1, primes.run(1, SCATTER_N).tolist())[0])]
    for s in state.stages:
        if s.run.synthetic or not primes.covers(s.m + 1, SCATTER_N):
            continue
        ys = phases(state.alpha, 1, primes.run(s.m + 1, SCATTER_N).tolist())[0]
        series.append((f"m=m_{s.k}={s.m} (string of {s.length} at left)", ys))
    (out / "scatter.svg").write_text(_scatter_svg(series))

    summary = {
        "banner": "partial" if partial else "complete",
        "mode": state.params.mode,
        "synthetic": state.synthetic,
        "stages": state.depth,
        "h_max": h_max,
        "seed": seed,
        "random_shifts": random_shifts,
        "verification": ver["totals"],
        "all_pass": ver["all_pass"],
        "frontier": state.frontier.to_json() if state.frontier else None,
        "discrepancy": [{**d.to_row(), "float_error": d.float_error} for d in disc],
        "files": list(BUNDLE_FILES),
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=1) + "\n")
    return summary
