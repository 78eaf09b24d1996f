"""Command-line entry point: ``scalelab <subcommand> [options]``.

Exit codes: 0 success, 2 input error, 3 numerical failure.
"""

import argparse
import os
import re
import sys
import warnings

import numpy as np

from . import report
from .dataset import load_runs, reference_dataset, total_compute
from .diagnostics import run_all
from .errors import ExtrapolationWarning, InputError, InvalidParameter, NumericalError
from .ols import bootstrap, coefficient_inference, contrast
from .pareto import CostLossPoint, pareto_frontier
from .pipeline import DEFAULT_REPLICATES, analysis_report, analyze
from .powerlaw import curve_to_csv, extrapolate, fit_compute_law, fit_scaling_law, predict_curve
from .trends import fit_trends, load_trend_points

EXIT_INPUT = 2
EXIT_NUMERICAL = 3
SEED_ENV = "SCALELAB_SEED"


def default_seed():
    value = os.environ.get(SEED_ENV)
    if value is None or value == "":
        return 0
    try:
        return int(value)
    except ValueError:
        raise InvalidParameter(f"{SEED_ENV} must be an integer, got {value!r}") from None


def _runs(args):
    if getattr(args, "input", None):
        return load_runs(args.input)
    return reference_dataset()


def _meta(args, **extra):
    return report.base_metadata(
        input=getattr(args, "input", None) or "reference", **extra
    )


_TERM = re.compile(r"([+-]?)(?:(\d+(?:\.\d*)?|\.\d+)\*?)?b(\d+)")


def parse_contrast(expr, names):
    """Parse ``"b1-b2"`` or ``"b3+0.5*b1"`` into weights over ``b0..b{k-1}``."""
    text = expr.replace(" ", "")
    w = np.zeros(len(names))
    pos = 0
    for m in _TERM.finditer(text):
        if m.start() != pos or (pos > 0 and not m.group(1)):
            break
        sign, coef, idx = m.groups()
        i = int(idx)
        if i >= len(names):
            raise InvalidParameter(f"b{i} out of range; model has b0..b{len(names) - 1}")
        c = float(coef) if coef else 1.0
        w[i] += -c if sign == "-" else c
        pos = m.end()
    if not text or pos != len(text):
        raise InvalidParameter(f"cannot parse contrast expression {expr!r}")
    return w


def cmd_fit_compute(args):
    law = fit_compute_law(_runs(args), args.split)
    doc = report.ReportDocument([report.compute_law_table({args.split: law})], _meta(args, split=args.split))
    return doc


def cmd_fit_law(args):
    mode = args.standardize.replace("-", "_")
    law = fit_scaling_law(_runs(args), args.split, mode)
    std = law.standardized
    infs = [coefficient_inference(std, j) for j in range(1, std.k)]
    raw_rows = [["β0", f"{law.beta0:.6g}"]] + [
        [report._coef_label(n), report.fmt_num(b, 4)]
        for n, b in zip(law.raw.column_names[1:], law.exponents)
    ]
    sections = [
        report.coefficient_table({args.split: infs}, title=f"Standardized coefficients ({mode})"),
        report.Table("exponents", "Power-law parameters (log10 scale)", ["Parameter", "Value"], raw_rows),
        report.fit_metrics_table({args.split: std}),
    ]
    return report.ReportDocument(sections, _meta(args, split=args.split, standardization=mode))


def cmd_diagnose(args):
    powers = tuple(int(p) for p in args.reset_powers.split(",") if p.strip())
    law = fit_scaling_law(_runs(args), args.split, args.standardize.replace("-", "_"))
    diag = run_all(law.standardized, powers)
    return report.render_diagnostics({args.split: diag}, _meta(args, split=args.split, reset_powers=powers))


def cmd_bootstrap(args):
    law = fit_scaling_law(_runs(args), args.split, args.standardize.replace("-", "_"))
    std = law.standardized
    result = bootstrap(std.frame, args.replicates, args.seed, args.jobs)
    entries = []
    for j in range(1, std.k):
        entries.append({"classic": coefficient_inference(std, j), "bootstrap": result.interval(j, args.level)})
    meta = _meta(args, split=args.split, replicates=args.replicates, seed=args.seed,
                 redrawn=result.rejected)
    return report.render_coefficients({args.split: entries}, meta, methods=("classic", "bootstrap"))


def cmd_contrast(args):
    law = fit_scaling_law(_runs(args), args.split, args.standardize.replace("-", "_"))
    std = law.standardized
    w = parse_contrast(args.expr, std.column_names)
    inf = contrast(std, w, args.level, name=args.expr)
    iv = inf.interval
    row = [args.split, args.expr, report.fmt_num(iv.point, 2), report.fmt_ci(iv.lower, iv.upper),
           report.fmt_num(inf.se, 4), report.fmt_p(inf.p_value)]
    table = report.Table("contrast", "Coefficient contrast (standardized)",
                         ["Task", "Contrast", "Estimate", f"{args.level * 100:g}% CI", "SE", "p-value"], [row])
    return report.ReportDocument([table], _meta(args, split=args.split))


def cmd_extrapolate(args):
    law = fit_scaling_law(_runs(args), args.split)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ExtrapolationWarning)
        pred = extrapolate(law, args.params, args.samples, args.initial_loss, args.level)
    if pred.extrapolation:
        print(
            f"warning: leverage {pred.log_space.leverage:.3g} exceeds the training maximum "
            f"{pred.log_space.max_training_leverage:.3g}; this is an extrapolation",
            file=sys.stderr,
        )
    table = report.prediction_table({args.split: pred}, args.level)
    meta = _meta(args, split=args.split, P=args.params, S=args.samples, T=args.initial_loss,
                 back_transform="10**log10_prediction (median, no bias correction)")
    return report.ReportDocument([table], meta)


def cmd_pareto(args):
    runs = _runs(args).with_split(args.split)
    points = [CostLossPoint(total_compute(r), r.loss(args.split), r) for r in runs]
    rows = [
        [p.source_run.model_label, f"{p.source_run.seen_samples:.0f}", f"{p.cost:.6g}", f"{p.loss:g}"]
        for p in pareto_frontier(points)
    ]
    table = report.Table("pareto", f"Pareto frontier ({args.split})",
                         ["model_label", "seen_samples", "compute_macs", "loss"], rows)
    return report.ReportDocument([table], _meta(args, split=args.split))


def cmd_trend(args):
    fits = fit_trends(load_trend_points(args.input))
    rows = [
        [task, split, metric, str(f.n), report.fmt_num(f.slope, 4), report.fmt_num(f.r2, 3)]
        for (task, split, metric), f in fits.items()
    ]
    table = report.Table("trend", "Downstream metric vs CE loss (log10-log10 OLS)",
                         ["Task", "Split", "Metric", "n", "Slope", "R²"], rows)
    return report.ReportDocument([table], _meta(args))


def cmd_curve(args):
    law = fit_scaling_law(_runs(args), args.split)
    fixed = {k: v for k, v in (("P", args.params), ("S", args.samples), ("T", args.initial_loss)) if v is not None}
    fixed.pop(args.sweep, None)
    return predict_curve(law, args.sweep, args.start, args.stop, args.count, fixed, args.level)


def cmd_report(args):
    if not args.reference and not args.input:
        raise InvalidParameter("report needs --reference or --input")
    runs = reference_dataset() if args.reference else load_runs(args.input)
    analysis = analyze(
        runs,
        standardization=args.standardize.replace("-", "_"),
        reset_powers=tuple(int(p) for p in args.reset_powers.split(",")),
        replicates=args.replicates,
        seed=args.seed,
        n_jobs=args.jobs,
    )
    return analysis_report(analysis)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=report.FORMATS, default=None)
    common.add_argument("--output", default=None, help="write to PATH instead of stdout")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--input", help="CSV or JSON run file (default: bundled reference data)")

    split = argparse.ArgumentParser(add_help=False)
    split.add_argument("--split", required=True)

    std = argparse.ArgumentParser(add_help=False)
    std.add_argument("--standardize", choices=["per-task", "per_task", "pooled"], default="per-task")

    level = argparse.ArgumentParser(add_help=False)
    level.add_argument("--level", type=float, default=0.95)

    boot = argparse.ArgumentParser(add_help=False)
    boot.add_argument("--replicates", type=int, default=DEFAULT_REPLICATES)
    boot.add_argument("--seed", type=int, default=None)
    boot.add_argument("--jobs", type=int, default=1)

    parser = argparse.ArgumentParser(prog="scalelab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit-compute", parents=[common, data, split], help="compute law on the Pareto frontier")
    p.set_defaults(func=cmd_fit_compute)
    p = sub.add_parser("fit-law", parents=[common, data, split, std], help="multivariate power law")
    p.set_defaults(func=cmd_fit_law)
    p = sub.add_parser("diagnose", parents=[common, data, split, std], help="OLS diagnostic battery")
    p.add_argument("--reset-powers", default="2")
    p.set_defaults(func=cmd_diagnose)
    p = sub.add_parser("bootstrap", parents=[common, data, split, std, level, boot], help="bootstrap CIs")
    p.set_defaults(func=cmd_bootstrap)
    p = sub.add_parser("contrast", parents=[common, data, split, std, level], help="coefficient contrast")
    p.add_argument("--expr", required=True, help='e.g. "b1-b2" or "b3+b2"')
    p.set_defaults(func=cmd_contrast)
    p = sub.add_parser("extrapolate", parents=[common, data, split, level], help="prediction interval")
    p.add_argument("--params", type=float, required=True)
    p.add_argument("--samples", type=float, required=True)
    p.add_argument("--initial-loss", type=float, required=True)
    p.set_defaults(func=cmd_extrapolate)
    p = sub.add_parser("pareto", parents=[common, data, split], help="Pareto frontier as CSV")
    p.set_defaults(func=cmd_pareto, default_format="csv")
    p = sub.add_parser("trend", parents=[common, level], help="downstream metric trends")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_trend)
    p = sub.add_parser("curve", parents=[common, data, split, level], help="plot-ready prediction curve CSV")
    p.add_argument("--sweep", choices=["P", "S", "T"], required=True)
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--params", type=float)
    p.add_argument("--samples", type=float)
    p.add_argument("--initial-loss", type=float)
    p.set_defaults(func=cmd_curve)
    p = sub.add_parser("report", parents=[common, data, std, boot], help="regenerate all tables")
    p.add_argument("--reference", action="store_true", help="use the bundled reference dataset")
    p.add_argument("--reset-powers", default="2")
    p.set_defaults(func=cmd_report)
    return parser


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if hasattr(args, "seed") and args.seed is None:
            args.seed = default_seed()
        result = args.func(args)
        if isinstance(result, list):
            text = curve_to_csv(result)
        else:
            fmt = args.format or getattr(args, "default_format", "markdown")
            text = result.render(fmt)
        _emit(text, args.output)
    except (InputError, OSError) as exc:
        print(f"scalelab: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"scalelab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return 0


if __name__ == "__main__":
    sys.exit(main())
