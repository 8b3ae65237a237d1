"""Command-line front end.

    python3 -m shiftframes scan-rank --family configs/theorem3_k024.json --out out/
    python3 -m shiftframes frame-bounds --family configs/spline_a05.json
    python3 -m shiftframes spline-check --family configs/spline_a1.json
    python3 -m shiftframes reconstruct --family configs/theorem43_r2.json --seed 7

Exit codes: 0 success or expectation met, 2 config error, 3 expectation
mismatch, 4 the family is not a frame (command needs one), 5 an oracle or
round-trip tolerance was breached.  Every output is written with sorted keys
and fixed float formatting, so identical inputs give identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from .configs import ConfigError, RunConfig, load_family
from .spaces import (
    default_render_grid,
    frame_ratio,
    random_coefficients,
    reconstruct,
    synthesize,
)
from .spectral import SCHEMA_VERSION, cached_rank_profile, classify
from .spline import SplineGenerator, closed_form_eval, convolve_oracle, hat_eval, quadrature_ft, spline_mass
from .weights import validate_p

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MISMATCH = 3
EXIT_NOT_FRAME = 4
EXIT_ORACLE = 5

CONV_TOL_STEPS = 5.0
FT_TOL = 1e-6
HAT0_TOL = 1e-10
MASS_TOL = 1e-8
ROUND_TRIP_TOL = 1e-6
RATIO_MARGIN = 1.05


def _num(v):
    """JSON-safe float: infinities and NaN become strings."""
    if v is None:
        return None
    v = float(v)
    if math.isfinite(v):
        return v
    return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _g(v: float) -> str:
    return f"{float(v):.17g}"


def _report_dict(report) -> dict:
    d = report.to_dict()
    d["frame_bounds"] = [_num(v) for v in d["frame_bounds"]]
    d["gram_condition_constant"] = _num(d["gram_condition_constant"])
    return d


def _setup(args) -> tuple:
    cfg = RunConfig(
        family_path=args.family,
        grid_n=args.grid_n,
        rel_tol=args.rel_tol,
        guard_band=args.guard_band,
        epsilon=args.epsilon,
        seed=args.seed,
        p=validate_p(args.p),
        out=args.out,
        trials=args.trials,
    )
    family, raw = load_family(cfg.family_path, cfg.epsilon)
    weight = cfg.weight_from(raw)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return cfg, family, weight, out


def cmd_scan_rank(args) -> int:
    cfg, family, _, out = _setup(args)
    report = classify(family, cfg.spec)
    prof = cached_rank_profile(family, cfg.spec)
    (out / "rank_profile.csv").write_text(prof.to_csv())
    _write_json(out / "report.json", _report_dict(report))
    rows = [
        [SCHEMA_VERSION, _g(x), "" if gd else int(n), int(s)]
        for x, n, s, gd in zip(prof.grid, prof.numeric_rank, prof.structural_rank, prof.guard)
    ]
    (out / "plot_xi_rank.csv").write_text(
        _csv(["schema_version", "xi", "numeric_rank", "structural_rank"], rows)
    )
    rows = [
        [SCHEMA_VERSION, _g(x), _g(lo), _g(hi), _g(nz)]
        for x, lo, hi, nz in zip(prof.grid, prof.min_eig, prof.max_eig, prof.min_nonzero_eig)
    ]
    (out / "plot_xi_eigs.csv").write_text(
        _csv(["schema_version", "xi", "min_eig", "max_eig", "min_nonzero_eig"], rows)
    )
    print(f"{family.label}: {report.classification} ranks={report.distinct_ranks} expect={family.expect}")
    if report.expectation_met is False:
        print(f"expectation mismatch: expected {family.expect}, got {report.classification}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_frame_bounds(args) -> int:
    cfg, family, _, out = _setup(args)
    report = classify(family, cfg.spec)
    prof = cached_rank_profile(family, cfg.spec)
    rows = [
        [SCHEMA_VERSION, _g(x), int(gd), _g(nz), _g(hi)]
        for x, gd, nz, hi in zip(prof.grid, prof.guard, prof.min_nonzero_eig, prof.max_eig)
    ]
    (out / "frame_bounds.csv").write_text(
        _csv(["schema_version", "xi", "guard", "min_nonzero_eig", "max_eig"], rows)
    )
    _write_json(out / "report.json", _report_dict(report))
    if report.classification == "NotClosed":
        print(f"{family.label}: not a frame, ranks {report.distinct_ranks}", file=sys.stderr)
        return EXIT_NOT_FRAME
    lo, hi = report.frame_bounds
    print(f"{family.label}: lower={lo:.6g} upper={hi:.6g} C={report.gram_condition_constant:.6g}")
    return EXIT_OK


def spline_oracle_report(ns, a: float, q: int = 256) -> dict:
    """Closed form against the convolution and quadrature oracles for each ``n``."""
    h = a / q
    xi = np.linspace(-8 * math.pi, 8 * math.pi, 1601)
    rows, breaches = [], []
    for n in ns:
        s = SplineGenerator(n, a)
        x, conv = convolve_oracle(n, a, h)
        cf = closed_form_eval(s, x)
        if n == 1:
            # interior only: the oracle halves both end samples by construction
            diff = np.abs(cf[1:-1] - conv[1:-1])
            xs = x[1:-1]
        else:
            diff = np.abs(cf - conv)
            xs = x
        k = int(np.argmax(diff))
        ft = np.abs(hat_eval(s, xi) - quadrature_ft(s, xi))
        kf = int(np.argmax(ft))
        row = {
            "n": n,
            "a": a,
            "h": h,
            "conv_max_dev": float(diff[k]),
            "conv_location": float(xs[k]),
            "conv_tol": 0.0 if n == 1 else CONV_TOL_STEPS * h,
            "ft_max_dev": float(ft[kf]),
            "ft_location": float(xi[kf]),
            "ft_tol": FT_TOL,
            "hat0_dev": abs(hat_eval(s, 0.0) - 1.0),
            "mass_dev": abs(spline_mass(s) - 1.0),
        }
        checks = [
            ("convolution", row["conv_max_dev"] > row["conv_tol"], row["conv_location"]),
            ("fourier", row["ft_max_dev"] >= FT_TOL, row["ft_location"]),
            ("hat(0)", row["hat0_dev"] >= HAT0_TOL, 0.0),
            ("mass", row["mass_dev"] >= MASS_TOL, None),
        ]
        row["passed"] = not any(bad for _, bad, _ in checks)
        for name, bad, loc in checks:
            if bad:
                breaches.append({"check": name, "n": n, "a": a, "location": loc})
        rows.append(row)
    return {"schema_version": SCHEMA_VERSION, "checks": rows, "breaches": breaches, "passed": not breaches}


def cmd_spline_check(args) -> int:
    cfg, family, _, out = _setup(args)
    if family.kind != "spline":
        print("spline-check needs a spline config", file=sys.stderr)
        return EXIT_CONFIG
    a = family.members[0].a
    top = max(g.n for g in family.members)
    rep = spline_oracle_report(range(1, max(top, 6) + 1), a)
    rep["label"] = family.label
    _write_json(out / "oracle_report.json", rep)
    for b in rep["breaches"]:
        print(f"oracle breach: {b['check']} n={b['n']} a={b['a']:g} at {b['location']}", file=sys.stderr)
    if rep["breaches"]:
        return EXIT_ORACLE
    print(f"{family.label}: all spline oracles within tolerance")
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    cfg, family, weight, out = _setup(args)
    report = classify(family, cfg.spec)
    if report.classification == "NotClosed":
        _write_json(out / "report.json", _report_dict(report))
        print(f"{family.label}: not a frame, nothing to reconstruct", file=sys.stderr)
        return EXIT_NOT_FRAME
    rng = np.random.default_rng(cfg.seed)
    grid = default_render_grid(family)
    C = report.gram_condition_constant * RATIO_MARGIN
    trials = []
    for t in range(cfg.trials):
        c = random_coefficients(family.r, grid.J, 8, rng)
        f = synthesize(family, c, grid)
        res = reconstruct(f, family, cfg.spec)
        ratio = frame_ratio(f, family, weight, cfg.p)
        trials.append(
            {
                "trial": t,
                "relative_error": res.relative_error,
                "window_leakage": res.window_leakage,
                "frame_ratio": ratio,
            }
        )
    errs = [tr["relative_error"] for tr in trials]
    ratios = [tr["frame_ratio"] for tr in trials]
    rep = {
        "schema_version": SCHEMA_VERSION,
        "label": family.label,
        "classification": report.classification,
        "seed": cfg.seed,
        "p": _num(cfg.p),
        "weight": weight.to_json(),
        "render_grid": {"T": grid.T, "q": grid.q, "J": grid.J},
        "trials": trials,
        "max_relative_error": max(errs),
        "tolerance": ROUND_TRIP_TOL,
        "ratio_min": min(ratios),
        "ratio_max": max(ratios),
        "ratio_bound": _num(C),
        "passed": max(errs) < ROUND_TRIP_TOL,
    }
    _write_json(out / "reconstruction_report.json", rep)
    print(f"{family.label}: max relative error {max(errs):.3e} over {cfg.trials} trials")
    if not rep["passed"]:
        print(f"round-trip error {max(errs):.3e} exceeds {ROUND_TRIP_TOL:g}", file=sys.stderr)
        return EXIT_ORACLE
    return EXIT_OK


COMMANDS = {
    "scan-rank": cmd_scan_rank,
    "frame-bounds": cmd_frame_bounds,
    "spline-check": cmd_spline_check,
    "reconstruct": cmd_reconstruct,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shiftframes", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--family", required=True, help="family config JSON")
        sp.add_argument("--grid-n", type=int, default=2048)
        sp.add_argument("--epsilon", type=float, default=None, help="override the config epsilon")
        sp.add_argument("--rel-tol", type=float, default=1e-9)
        sp.add_argument("--guard-band", type=float, default=1e-3)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default="out")
        sp.add_argument("--p", default="2", choices=["1", "2", "inf"])
        sp.add_argument("--trials", type=int, default=20)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
