"""Publication-style tables rendered as markdown, JSON or CSV.

Nothing here computes statistics: every number comes from a fit,
diagnostics report or bootstrap result handed in by the caller, and is only
formatted.
"""

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

from . import __version__

FORMATS = ("markdown", "json", "csv")
COEF_LABELS = {"log10_P": "β1 (P)", "log10_S": "β2 (S)", "log10_T": "β3 (T)"}


def fmt_num(value, digits=3):
    """Fixed-point with negative zero folded to zero; blank for None."""
    if value is None:
        return ""
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    text = f"{value:.{digits}f}"
    if text.startswith("-") and float(text) == 0.0:
        text = text[1:]
    return text


def fmt_p(p):
    if p is None:
        return ""
    if p < 0.001:
        return "p < 0.001"
    return f"p = {fmt_num(p, 3)}"


def fmt_ci(lower, upper, digits=2):
    return f"[{fmt_num(lower, digits)}, {fmt_num(upper, digits)}]"


@dataclass
class Table:
    key: str
    title: str
    header: list
    rows: list
    long_form: list = field(default_factory=list)

    def to_markdown(self):
        lines = [f"### {self.title}", ""]
        lines.append("| " + " | ".join(self.header) + " |")
        lines.append("|" + "|".join("---" for _ in self.header) + "|")
        for row in self.rows:
            lines.append("| " + " | ".join(row) + " |")
        return "\n".join(lines) + "\n"


@dataclass
class ReportDocument:
    sections: list
    metadata: dict
    format: str = "markdown"

    def section(self, key):
        for s in self.sections:
            if s.key == key:
                return s
        raise KeyError(key)

    def to_markdown(self):
        meta = ", ".join(f"{k}={self.metadata[k]}" for k in sorted(self.metadata))
        parts = [f"<!-- scalelab report: {meta} -->\n"]
        parts += [s.to_markdown() for s in self.sections]
        return "\n".join(parts)

    def to_json(self):
        payload = {"metadata": self.metadata, "sections": [asdict(s) for s in self.sections]}
        return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for s in self.sections:
            if s.long_form:
                writer.writerow(["section", *s.long_form[0].keys()])
                for rec in s.long_form:
                    writer.writerow([s.key, *rec.values()])
            else:
                writer.writerow(["section", *s.header])
                for row in s.rows:
                    writer.writerow([s.key, *row])
        return buf.getvalue()

    def render(self, format=None):
        format = format or self.format
        if format == "markdown":
            return self.to_markdown()
        if format == "json":
            return self.to_json()
        if format == "csv":
            return self.to_csv()
        raise ValueError(f"format must be one of {FORMATS}, got {format!r}")

    @classmethod
    def from_json(cls, text):
        payload = json.loads(text)
        sections = [Table(**s) for s in payload["sections"]]
        return cls(sections, payload["metadata"], "json")


def base_metadata(**config):
    meta = {"version": __version__}
    meta.update({k: _meta_value(v) for k, v in config.items()})
    return meta


def _meta_value(v):
    if isinstance(v, (list, tuple)):
        return ",".join(str(x) for x in v)
    return v


def _coef_label(name):
    return COEF_LABELS.get(name, name)


def coefficient_table(inferences_by_split, title="Standardized coefficients", key="table1"):
    """Estimate [classic 95% CI] and p-value per (split, coefficient).

    ``inferences_by_split`` maps split -> list of classic
    :class:`~scalelab.ols.Inference`.
    """
    rows, long_form = [], []
    for split, infs in inferences_by_split.items():
        for inf in infs:
            iv = inf.interval
            rows.append([
                split,
                _coef_label(inf.name),
                f"{fmt_num(iv.point, 2)} {fmt_ci(iv.lower, iv.upper)}",
                fmt_p(inf.p_value),
            ])
            long_form.append({
                "task": split, "coefficient": inf.name, "estimate": fmt_num(iv.point, 6),
                "lower": fmt_num(iv.lower, 6), "upper": fmt_num(iv.upper, 6),
                "p_value": fmt_num(inf.p_value, 6),
            })
    return Table(key, title, ["Task", "Coefficient", "Estimate [95% CI]", "p-value"], rows, long_form)


def render_coefficients(rows_by_split, metadata, methods=("classic", "hc3", "bootstrap")):
    """Extended coefficient table.

    ``rows_by_split`` maps split -> list of dicts with keys ``classic`` and
    optionally ``hc3`` (:class:`Inference`) and ``bootstrap``
    (:class:`IntervalEstimate`).
    """
    header = ["Task", "Coefficient", "Estimate", "OLS 95% CI"]
    if "hc3" in methods:
        header.append("HC3 95% CI")
    if "bootstrap" in methods:
        header.append("Bootstrap 95% CI")
    header.append("p-value")
    rows, long_form = [], []
    for split, entries in rows_by_split.items():
        for entry in entries:
            classic = entry["classic"]
            iv = classic.interval
            row = [split, _coef_label(classic.name), fmt_num(iv.point, 2), fmt_ci(iv.lower, iv.upper)]
            rec = {"task": split, "coefficient": classic.name, "estimate": fmt_num(iv.point, 6),
                   "ols_lower": fmt_num(iv.lower, 6), "ols_upper": fmt_num(iv.upper, 6)}
            for m in ("hc3", "bootstrap"):
                if m not in methods:
                    continue
                val = entry.get(m)
                ivm = getattr(val, "interval", val)
                row.append("" if ivm is None else fmt_ci(ivm.lower, ivm.upper))
                rec[f"{m}_lower"] = "" if ivm is None else fmt_num(ivm.lower, 6)
                rec[f"{m}_upper"] = "" if ivm is None else fmt_num(ivm.upper, 6)
            row.append(fmt_p(classic.p_value))
            rec["p_value"] = fmt_num(classic.p_value, 6)
            rows.append(row)
            long_form.append(rec)
    table = Table("table4", "Coefficients with OLS, HC3 and bootstrap 95% CIs", header, rows, long_form)
    return ReportDocument([table], metadata)


def diagnostics_table(reports_by_split):
    splits = list(reports_by_split)
    header = ["Test"]
    for s in splits:
        header += [f"{s} Statistic", f"{s} p-value"]
    labels = [label for label, _, _ in next(iter(reports_by_split.values())).rows()]
    rows = []
    long_form = []
    for i, label in enumerate(labels):
        row = [label]
        for s in splits:
            _, stat, p = reports_by_split[s].rows()[i]
            row += [fmt_num(stat, 3), fmt_num(p, 3)]
            long_form.append({"test": label, "task": s, "quantity": "statistic", "value": fmt_num(stat, 6)})
            if p is not None:
                long_form.append({"test": label, "task": s, "quantity": "p_value", "value": fmt_num(p, 6)})
        rows.append(row)
    return Table("table5", "OLS diagnostic tests", header, rows, long_form)


def render_diagnostics(reports_by_split, metadata):
    return ReportDocument([diagnostics_table(reports_by_split)], metadata)


def fit_metrics_table(fits_by_split):
    rows = []
    for split, f in fits_by_split.items():
        rows.append([split, fmt_num(f.r2, 3), fmt_num(f.r2_adj, 3), fmt_num(f.r2_loocv, 3)])
    return Table("table6", "Model fit metrics (log10 space)", ["Task", "R²", "Adjusted R²", "LOOCV R²"], rows)


def render_fit_metrics(fits_by_split, metadata):
    """``fits_by_split`` maps split -> :class:`~scalelab.ols.OlsFit`."""
    return ReportDocument([fit_metrics_table(fits_by_split)], metadata)


def compute_law_table(fits_by_split):
    rows = []
    for split, law in fits_by_split.items():
        rows.append([split, f"{law.alpha0:.6g}", fmt_num(law.alpha1, 4), fmt_num(law.r2, 3), str(len(law.frontier))])
    return Table("compute_law", "Compute power law on the Pareto frontier",
                 ["Task", "alpha0", "alpha1", "R²", "Frontier points"], rows)


def prediction_table(predictions_by_split, level):
    rows = []
    for split, pred in predictions_by_split.items():
        rows.append([
            split, fmt_num(pred.point, 2), fmt_ci(pred.lower, pred.upper),
            "yes" if pred.extrapolation else "no",
        ])
    pct = f"{level * 100:g}%"
    return Table("extrapolation", "Extrapolated CE loss",
                 ["Task", "Prediction", f"{pct} PI", "Extrapolation"], rows)


def merge(documents, metadata):
    sections = [s for d in documents for s in d.sections]
    return ReportDocument(sections, metadata)
