"""Command-line interface.

Subcommands: simulate, table2, theorem-check, analyze, scenarios. Every
invocation is deterministic given --seed: outputs carry no timestamps or
environment state, and parallel runs (--workers) aggregate in a fixed order.
Existing output files are never overwritten without --force. The default
output directory comes from SURRMETA_OUT when set.
"""

import argparse
import json
import math
import os
import re
import sys
from pathlib import Path

from . import experiments, model
from .asymptotics import positivity_certificate, random_trial_params
from .errors import SchemaError, SurrmetaError
from .experiments import fmt6
from .figures import panel_svg
from .inference import fit_summary
from .regions import chi2_quantile_2df, ellipse_boundary
from .streams import DOMAIN_PARAMS, UnitStream, derive_state

DEFAULT_SEED = 1729


class OutputExistsError(SurrmetaError):
    pass


def _out_dir(args):
    base = args.out_dir or os.environ.get("SURRMETA_OUT") or "."
    path = Path(base)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _open_out(path: Path, force):
    if path.exists() and not force:
        raise OutputExistsError(f"refusing to overwrite {path}; pass --force")
    return open(path, "w", newline="")


def _write_text(path: Path, text, force):
    if path.exists() and not force:
        raise OutputExistsError(f"refusing to overwrite {path}; pass --force")
    path.write_text(text)


def _write_json(path: Path, obj, force):
    _write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n", force)


def _slug(text):
    return re.sub(r"[^A-Za-z0-9_-]+", "-", str(text)).strip("-") or "trial"


def cmd_simulate(args):
    design = experiments.design(
        args.design, N=args.N, n_T=args.n_trials, n=args.n, m=args.m, alpha=args.alpha
    )
    summary = experiments.run_simulation(design, args.seed, workers=args.workers)
    out = _out_dir(args)
    prefix = f"sim{design.name}"
    _write_json(out / f"{prefix}_summary.json", experiments.summary_dict(summary), args.force)
    with _open_out(out / f"{prefix}_scatter.csv", args.force) as fh:
        experiments.write_scatter_csv(summary, fh)
    with _open_out(out / f"{prefix}_estimates.csv", args.force) as fh:
        experiments.write_estimates_csv(summary, fh)
    report = (
        f"design {design.name}: N={design.N} repetitions, n_T={design.n_T} trials, "
        f"n={design.n}, m={design.m}, alpha={design.alpha}, seed={summary.master_seed}\n"
        f"mean fitted slope     : {fmt6(summary.mean_beta1)}\n"
        f"rejection rate        : {fmt6(summary.rejection_rate)}\n"
        f"rejection rate MC s.e.: {fmt6(summary.mc_se_rejection)}\n"
        f"excluded repetitions  : {len(summary.excluded_repetitions)}\n"
    )
    _write_text(out / f"{prefix}_report.txt", report, args.force)
    print(report, end="")
    return 0


def cmd_table2(args):
    report = experiments.table2_report(args.seed, workers=args.workers)
    out = _out_dir(args)
    for N, rows in report.blocks:
        with _open_out(out / f"table2_N{N}.csv", args.force) as fh:
            experiments.write_table2_csv(rows, fh)
    text = experiments.format_table2(report)
    _write_text(out / "table2_report.txt", text, args.force)
    print(text, end="")
    return 0


def cmd_theorem_check(args):
    if args.draws < 1:
        raise SurrmetaError("--draws must be >= 1")
    stream = UnitStream(derive_state(args.seed, DOMAIN_PARAMS))
    ordered = not args.violate_assumption
    min_a = math.inf
    min_b = math.inf
    min_cov = math.inf
    holds_all = True
    for i in range(args.draws):
        params = random_trial_params(stream, ordered=ordered, label=f"draw-{i}")
        cert = positivity_certificate(params, args.n, args.m)
        min_a = min(min_a, cert.A)
        min_b = min(min_b, cert.B)
        min_cov = min(min_cov, cert.cov12)
        holds_all = holds_all and cert.assumption_holds
    lines = [
        f"draws={args.draws} seed={args.seed} n={args.n} m={args.m} "
        f"assumption={'ordered' if ordered else 'violated'}",
        f"min A     = {fmt6(min_a)}",
        f"min B     = {fmt6(min_b)}",
        f"min cov12 = {fmt6(min_cov)}",
    ]
    if ordered:
        ok = min_a > 0 and min_b > 0 and min_cov > 0
        lines.append(f"positivity: {'PASS' if ok else 'FAIL'}")
    else:
        ok = True
        lines.append(
            "assumption_holds=false for all draws; no sign asserted"
            if not holds_all
            else "warning: some draws satisfied the ordering"
        )
    text = "\n".join(lines) + "\n"
    print(text, end="")
    if args.out_dir is not None:
        _write_text(_out_dir(args) / "theorem_check.txt", text, args.force)
    return 0 if ok else 1


def cmd_analyze(args):
    rho_values = tuple(float(v) for v in args.rho.split(","))
    with open(args.csv, newline="") as fh:
        records = experiments.read_trial_summaries(fh)
    analysis = experiments.analyze_meta(
        records, rho_values=rho_values, alpha=args.alpha, ci_level=args.level
    )
    out = _out_dir(args)
    summary = fit_summary(analysis.fit)
    doc = {
        "fit": {k: (v if isinstance(v, (bool, int)) else float(fmt6(v))) for k, v in summary.items()},
        "alpha": analysis.alpha,
        "rho_values": list(analysis.rho_values),
        "trials": [
            {
                "trial_id": t.record.trial_id,
                "S_hat": float(fmt6(t.estimate.S_hat)),
                "M_hat": float(fmt6(t.estimate.M_hat)),
                "varS": float(fmt6(t.var_S)),
                "varM": float(fmt6(t.var_M)),
                "lowCount": t.low_count,
            }
            for t in analysis.trials
        ],
        "rejected": [{"trial_id": tid, "reason": why} for tid, why in analysis.rejected],
    }
    _write_json(out / "analysis_fit.json", doc, args.force)
    with _open_out(out / "analysis_fit.csv", args.force) as fh:
        cols = list(summary)
        fh.write(",".join(cols) + "\n")
        fh.write(
            ",".join(
                str(v) if isinstance(v, (bool, int)) else fmt6(v)
                for v in (summary[c] for c in cols)
            )
            + "\n"
        )

    for t in analysis.trials:
        for rho in rho_values:
            region = analysis.regions[(t.record.trial_id, rho)]
            pts = ellipse_boundary(region, args.points)
            name = f"ellipse_{_slug(t.record.trial_id)}_rho{rho:g}.csv"
            with _open_out(out / name, args.force) as fh:
                fh.write("trial,rho,theta,S,M\n")
                for i, (x, y) in enumerate(pts):
                    theta = 2.0 * math.pi * i / args.points
                    fh.write(
                        f"{t.record.trial_id},{rho:g},{fmt6(theta)},{fmt6(x)},{fmt6(y)}\n"
                    )

    if args.svg:
        centers = [
            (t.record.trial_id, t.estimate.S_hat, t.estimate.M_hat)
            for t in analysis.trials
        ]
        for rho in rho_values:
            boundaries = {
                t.record.trial_id: ellipse_boundary(
                    analysis.regions[(t.record.trial_id, rho)], args.points
                )
                for t in analysis.trials
            }
            svg = panel_svg(
                centers,
                boundaries,
                (analysis.fit.beta0_hat, analysis.fit.beta1_hat),
                rho,
                level_pct=100.0 * (1.0 - analysis.alpha),
            )
            _write_text(out / f"panel_rho{rho:g}.svg", svg, args.force)

    low = [t.record.trial_id for t in analysis.trials if t.low_count]
    lines = [
        f"trials analyzed: {len(analysis.trials)} "
        f"(rejected: {len(analysis.rejected)})",
        f"region level: {100 * (1 - analysis.alpha):g}% "
        f"(alpha={analysis.alpha:g}, chi-squared 2df threshold "
        f"{chi2_quantile_2df(analysis.alpha):.6f})",
        f"slope = {fmt6(summary['beta1'])}  (se {fmt6(summary['se'])}, "
        f"t {fmt6(summary['t'])}, p {fmt6(summary['p'])}, df {summary['df']})",
        f"pearson r = {fmt6(summary['r'])} "
        f"CI [{fmt6(summary['r_lo'])}, {fmt6(summary['r_hi'])}]",
        f"low-count trials: {', '.join(low) if low else 'none'}",
    ]
    text = "\n".join(lines) + "\n"
    _write_text(out / "analysis_report.txt", text, args.force)
    print(text, end="")
    return 0


def cmd_scenarios(args):
    doc = model.registry_document()
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out is not None:
        _write_text(Path(args.out), text, args.force)
    print(text, end="")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="surrmeta",
        description=(
            "Trial-level estimate uncertainty in surrogate endpoint "
            "meta-regression: simulations, positivity checks, and "
            "confidence-region sensitivity analysis."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, seed=True):
        if seed:
            p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                           help="master seed (default %(default)s)")
        p.add_argument("--out-dir", default=None,
                       help="output directory (default $SURRMETA_OUT or .)")
        p.add_argument("--force", action="store_true",
                       help="overwrite existing output files")

    p = sub.add_parser("simulate", help="run one simulation design")
    p.add_argument("design", choices=experiments.DESIGN_NAMES)
    p.add_argument("--N", type=int, default=100, help="repetitions (default %(default)s)")
    p.add_argument("--n-trials", type=int, default=10, dest="n_trials",
                   help="trials per repetition (default %(default)s)")
    p.add_argument("--n", type=int, default=None, help="control-arm size override")
    p.add_argument("--m", type=int, default=None, help="screen-arm size override")
    p.add_argument("--alpha", type=float, default=0.05,
                   help="test level (default %(default)s)")
    p.add_argument("--workers", type=int, default=1)
    add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("table2", help="summary table over all four designs")
    p.add_argument("--workers", type=int, default=1)
    add_common(p)
    p.set_defaults(func=cmd_table2)

    p = sub.add_parser("theorem-check",
                       help="positivity certificate over random parameter draws")
    p.add_argument("--draws", type=int, default=10000)
    p.add_argument("--n", type=int, default=20000)
    p.add_argument("--m", type=int, default=20000)
    p.add_argument("--violate-assumption", action="store_true",
                   help="draw with the stage-lethality ordering reversed")
    add_common(p)
    p.set_defaults(func=cmd_theorem_check)

    p = sub.add_parser("analyze", help="meta-analysis of trial summary CSV")
    p.add_argument("csv", help="trial summary CSV path")
    p.add_argument("--rho", default="0.1,0.66,0.9",
                   help="comma-separated sensitivity correlations (default %(default)s)")
    p.add_argument("--alpha", type=float, default=0.10,
                   help="region miscoverage level (default %(default)s)")
    p.add_argument("--level", type=float, default=0.95,
                   help="correlation CI level (default %(default)s)")
    p.add_argument("--points", type=int, default=256,
                   help="boundary points per ellipse (default %(default)s)")
    p.add_argument("--svg", action="store_true", help="emit one SVG panel per rho")
    add_common(p, seed=False)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("scenarios", help="print the scenario registry")
    p.add_argument("--out", default=None, help="also write the JSON document here")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_scenarios)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SurrmetaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
