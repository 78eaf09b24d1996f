"""Log-log trends of downstream metrics against test cross-entropy loss."""

import csv
from dataclasses import dataclass

from .errors import (
    InsufficientPoints,
    NonPositiveValue,
    ParseError,
    SchemaError,
)
from .ols import fit, make_frame

TREND_COLUMNS = ("label", "split", "ce_loss", "task", "metric_name", "metric_value")


@dataclass(frozen=True)
class TrendPoint:
    ce_loss: float
    metric: float
    label: str = ""
    split: str = ""
    task: str = ""
    metric_name: str = ""

    def __post_init__(self):
        # log10 is undefined at zero; near-zero metrics are rejected, not floored.
        if not self.ce_loss > 0:
            raise NonPositiveValue(f"{self.label or 'point'}: ce_loss must be > 0, got {self.ce_loss}")
        if not self.metric > 0:
            raise NonPositiveValue(f"{self.label or 'point'}: metric must be > 0, got {self.metric}")


@dataclass(frozen=True, eq=False)
class TrendFit:
    slope: float
    intercept: float
    r2: float
    underlying: object
    task: str = ""
    split: str = ""
    metric_name: str = ""
    n: int = 0

    def predict(self, ce_loss):
        return 10.0**self.intercept * ce_loss**self.slope


def fit_trend(points):
    """Regress ``log10(metric)`` on ``[1, log10(ce_loss)]``."""
    points = list(points)
    if len(points) < 3:
        raise InsufficientPoints(f"need at least 3 trend points, got {len(points)}")
    frame = make_frame(
        [[p.ce_loss] for p in points], [p.metric for p in points], ("log10_ce_loss",), "log10_metric"
    )
    result = fit(frame)
    first = points[0]
    return TrendFit(
        slope=float(result.coefficients[1]),
        intercept=float(result.coefficients[0]),
        r2=result.r2,
        underlying=result,
        task=first.task,
        split=first.split,
        metric_name=first.metric_name,
        n=len(points),
    )


def load_trend_points(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = [h.strip() for h in (reader.fieldnames or [])]
        missing = [c for c in TREND_COLUMNS if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}")
        points = []
        for row in reader:
            row = {k.strip(): (v or "").strip() for k, v in row.items() if k is not None}
            try:
                loss = float(row["ce_loss"])
                metric = float(row["metric_value"])
            except ValueError as exc:
                raise ParseError(reader.line_num, str(exc)) from None
            points.append(
                TrendPoint(loss, metric, row["label"], row["split"], row["task"], row["metric_name"])
            )
    return points


def group_points(points):
    """Group by (task, split, metric_name), keeping first-appearance order."""
    groups = {}
    for p in points:
        groups.setdefault((p.task, p.split, p.metric_name), []).append(p)
    return groups


def fit_trends(points):
    return {key: fit_trend(pts) for key, pts in group_points(points).items()}
