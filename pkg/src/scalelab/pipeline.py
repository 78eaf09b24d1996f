"""End-to-end analysis of a run dataset: both laws, inference, diagnostics,
bootstrap and extrapolation, gathered for reporting."""

import warnings
from dataclasses import dataclass

from . import report
from .diagnostics import DEFAULT_RESET_POWERS, run_all
from .errors import ExtrapolationWarning
from .ols import bootstrap, coefficient_inference
from .powerlaw import DEFAULT_STANDARDIZATION, extrapolate, fit_compute_law, fit_scaling_law

# Published extrapolation target: 30B parameters, 10K steps of 1024 samples,
# initial loss 3.0.
EXTRAPOLATION_POINT = (30e9, 10_240_000, 3.0)
DEFAULT_REPLICATES = 10_000


@dataclass
class Analysis:
    splits: tuple
    laws: dict
    compute_laws: dict
    inferences: dict
    diagnostics: dict
    bootstraps: dict
    predictions: dict
    config: dict


def analyze(
    runs,
    splits=None,
    standardization=DEFAULT_STANDARDIZATION,
    reset_powers=DEFAULT_RESET_POWERS,
    replicates=DEFAULT_REPLICATES,
    seed=0,
    n_jobs=1,
    extrapolation_point=EXTRAPOLATION_POINT,
    level=0.95,
):
    splits = tuple(splits or runs.splits)
    laws, compute_laws, inferences, diags, boots, preds = {}, {}, {}, {}, {}, {}
    for split in splits:
        law = fit_scaling_law(runs, split, standardization)
        laws[split] = law
        compute_laws[split] = fit_compute_law(runs, split)
        std = law.standardized
        inferences[split] = [
            {
                "classic": coefficient_inference(std, j, "classic", level),
                "hc3": coefficient_inference(std, j, "hc3", level),
            }
            for j in range(1, std.k)
        ]
        diags[split] = run_all(std, reset_powers)
        if replicates:
            boots[split] = bootstrap(std.frame, replicates, seed, n_jobs)
            for j, entry in enumerate(inferences[split], start=1):
                entry["bootstrap"] = boots[split].interval(j, level)
        if extrapolation_point is not None:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ExtrapolationWarning)
                preds[split] = extrapolate(law, *extrapolation_point, level=level)
    config = {
        "standardization": standardization,
        "reset_powers": tuple(sorted(set(reset_powers))),
        "bootstrap_replicates": replicates,
        "seed": seed,
        "hc3_reference": "normal",
        "classic_reference": "t",
        "level": level,
        "row_order": getattr(runs, "source", ""),
    }
    return Analysis(splits, laws, compute_laws, inferences, diags, boots, preds, config)


def analysis_report(analysis):
    meta = report.base_metadata(**analysis.config)
    methods = ("classic", "hc3", "bootstrap") if analysis.bootstraps else ("classic", "hc3")
    sections = [
        report.coefficient_table(
            {s: [e["classic"] for e in analysis.inferences[s]] for s in analysis.splits}
        ),
        report.render_coefficients(analysis.inferences, meta, methods).sections[0],
        report.diagnostics_table(analysis.diagnostics),
        report.fit_metrics_table({s: analysis.laws[s].standardized for s in analysis.splits}),
        report.compute_law_table(analysis.compute_laws),
    ]
    if analysis.predictions:
        sections.append(report.prediction_table(analysis.predictions, analysis.config["level"]))
    return report.ReportDocument(sections, meta)
