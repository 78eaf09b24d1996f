"""Compute-only and multivariate power laws, fitted by OLS in log10 space.

The compute law ``loss = a0 * C**a1`` is fitted to the Pareto frontier of
(compute, loss) points. The multivariate law
``loss = b0 * P**b1 * S**b2 * T**b3`` (model size, seen samples, initial
loss) is fitted to every run. Errors are multiplicative in loss space.
"""

import csv
import io
import warnings
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .dataset import total_compute
from .errors import (
    DataValueError,
    ExtrapolationWarning,
    InsufficientFrontier,
    InsufficientPoints,
    InvalidParameter,
    InvalidRange,
)
from .ols import make_frame, predict_interval, standardize
from .ols import fit as ols_fit
from .pareto import CostLossPoint, pareto_frontier

SCALING_PREDICTORS = ("log10_P", "log10_S", "log10_T")
DEFAULT_STANDARDIZATION = "per_task"


@dataclass(frozen=True, eq=False)
class ComputeLawFit:
    alpha0: float
    alpha1: float
    r2: float
    frontier: tuple
    underlying: object

    def predict(self, cost):
        return self.alpha0 * np.asarray(cost, dtype=float) ** self.alpha1


@dataclass(frozen=True, eq=False)
class ScalingLawFit:
    beta0: float
    beta1: float
    beta2: float
    beta3: float
    standardized_betas: np.ndarray
    raw: object
    standardized: object
    split: str = ""

    @property
    def exponents(self):
        return np.array([self.beta1, self.beta2, self.beta3])

    def predict(self, P, S, T):
        return self.beta0 * np.power(P, self.beta1) * np.power(S, self.beta2) * np.power(T, self.beta3)


@dataclass(frozen=True)
class LossPrediction:
    point: float
    lower: float
    upper: float
    log_space: object
    inputs: tuple

    @property
    def interval(self):
        return (self.lower, self.upper)

    @property
    def extrapolation(self):
        return self.log_space.extrapolation


def _fit_compute(costs, losses, sources):
    points = [CostLossPoint(float(c), float(y), s) for c, y, s in zip(costs, losses, sources)]
    frontier = tuple(pareto_frontier(points))
    # Two points determine the line exactly and leave no residual variance.
    if len(frontier) < 3:
        raise InsufficientFrontier(f"need at least 3 frontier points, got {len(frontier)}")
    frame = make_frame(
        [[p.cost] for p in frontier], [p.loss for p in frontier], ("log10_C",), "log10_loss"
    )
    fitted = ols_fit(frame)
    a, b = fitted.coefficients
    return ComputeLawFit(10.0**a, float(b), fitted.r2, frontier, fitted)


def fit_compute_law(runs, split):
    """Fit ``loss = a0 * C**a1`` on the Pareto frontier of one split."""
    runs = runs.with_split(split)
    costs = [total_compute(r) for r in runs]
    losses = [r.loss(split) for r in runs]
    return _fit_compute(costs, losses, list(runs))


def _scaling_frame(runs, split):
    X = [[r.total_params, r.seen_samples, r.initial_loss] for r in runs]
    y = [r.loss(split) for r in runs]
    return make_frame(X, y, SCALING_PREDICTORS, f"log10_loss_{split}")


def fit_scaling_law(runs, split, standardization=DEFAULT_STANDARDIZATION):
    """Fit the multivariate law for ``split``.

    Keeps both the log10-scale fit and the z-scored fit. ``pooled``
    standardization takes response statistics over every split that all
    runs carry.
    """
    runs = runs.with_split(split)
    if len(runs) < 5:
        raise InsufficientPoints(f"need at least 5 runs, got {len(runs)}")
    frame = _scaling_frame(runs, split)
    raw = ols_fit(frame)
    if standardization == "pooled":
        others = [s for s in runs.splits if s != split and all(s in r.losses for r in runs)]
        siblings = [_scaling_frame(runs, s) for s in others]
        zframe = standardize(frame, "pooled", siblings)
    elif standardization in ("per_task", "per-task"):
        zframe = standardize(frame, "per_task")
    elif standardization == "none":
        zframe = frame
    else:
        raise InvalidParameter(f"unknown standardization {standardization!r}")
    std = ols_fit(zframe)
    b = raw.coefficients
    return ScalingLawFit(
        beta0=float(10.0 ** b[0]),
        beta1=float(b[1]),
        beta2=float(b[2]),
        beta3=float(b[3]),
        standardized_betas=std.coefficients[1:].copy(),
        raw=raw,
        standardized=std,
        split=split,
    )


def extrapolate(law, P, S, T, level=0.95):
    """Point prediction and prediction interval in loss space."""
    for name, v in (("P", P), ("S", S), ("T", T)):
        if not v > 0:
            raise DataValueError(f"{name} must be > 0, got {v}")
    pi = predict_interval(law.raw, [P, S, T], level)
    point, lower, upper = pi.back_transform()
    return LossPrediction(point, lower, upper, pi, (P, S, T))


@dataclass(frozen=True)
class CurvePoint:
    x: float
    y_pred: float
    pi_lower: float
    pi_upper: float


_SWEEPABLE = ("P", "S", "T")


def predict_curve(law, sweep, start, stop, count, fixed, level=0.95):
    """Log-uniform sweep of one predictor with the other two held fixed.

    ``sweep`` is one of ``"P"``, ``"S"``, ``"T"``; ``fixed`` maps the other
    two names to values.
    """
    if sweep not in _SWEEPABLE:
        raise InvalidParameter(f"sweep must be one of {_SWEEPABLE}, got {sweep!r}")
    if not (start > 0 and stop > 0):
        raise InvalidRange(f"sweep bounds must be positive, got [{start}, {stop}]")
    if count < 2:
        raise InvalidRange(f"need at least 2 sweep points, got {count}")
    missing = [v for v in _SWEEPABLE if v != sweep and v not in fixed]
    if missing:
        raise InvalidParameter(f"fixed values missing for {missing}")
    xs = np.logspace(np.log10(start), np.log10(stop), int(count))
    out = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ExtrapolationWarning)
        for x in xs:
            vals = {**fixed, sweep: float(x)}
            pred = extrapolate(law, vals["P"], vals["S"], vals["T"], level)
            out.append(CurvePoint(float(x), pred.point, pred.lower, pred.upper))
    return out


def curve_to_csv(points):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "y_pred", "pi_lower", "pi_upper"])
    for p in points:
        writer.writerow([repr(p.x), repr(p.y_pred), repr(p.pi_lower), repr(p.pi_upper)])
    return buf.getvalue()


class ComputeLawRegressor(RegressorMixin, BaseEstimator):
    """``loss = alpha0 * C**alpha1`` fitted on the Pareto frontier of (C, loss).

    ``fit`` takes a single column of training compute. Points off the
    frontier are ignored; ``frontier_mask_`` records which were used.
    """

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        if X.shape[1] != 1:
            raise InvalidParameter("ComputeLawRegressor expects a single compute column")
        law = _fit_compute(X[:, 0], y, range(len(y)))
        self.law_ = law
        self.alpha0_ = law.alpha0
        self.alpha1_ = law.alpha1
        self.r2_ = law.r2
        used = {p.source_run for p in law.frontier}
        self.frontier_mask_ = np.array([i in used for i in range(len(y))])
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "law_")
        X = check_array(X)
        return self.law_.predict(X[:, 0])


class ScalingLawRegressor(RegressorMixin, BaseEstimator):
    """``loss = beta0 * P**beta1 * S**beta2 * T**beta3`` by log10 OLS.

    ``X`` columns are model parameters, seen samples and initial loss.
    """

    def __init__(self, standardization=DEFAULT_STANDARDIZATION, level=0.95):
        self.standardization = standardization
        self.level = level

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        if X.shape[1] != 3:
            raise InvalidParameter("ScalingLawRegressor expects columns (P, S, T)")
        frame = make_frame(X, y, SCALING_PREDICTORS, "log10_loss")
        raw = ols_fit(frame)
        if self.standardization == "none":
            std = raw
        elif self.standardization in ("per_task", "per-task"):
            std = ols_fit(standardize(frame, "per_task"))
        else:
            raise InvalidParameter(
                "ScalingLawRegressor supports standardization 'none' or 'per_task'; "
                "use fit_scaling_law for pooled standardization"
            )
        b = raw.coefficients
        self.law_ = ScalingLawFit(
            float(10.0 ** b[0]), float(b[1]), float(b[2]), float(b[3]),
            std.coefficients[1:].copy(), raw, std,
        )
        self.coef_ = np.asarray(b[1:])
        self.intercept_ = float(b[0])
        self.standardized_coef_ = self.law_.standardized_betas
        self.n_features_in_ = 3
        return self

    def predict(self, X):
        check_is_fitted(self, "law_")
        X = check_array(X)
        return self.law_.predict(X[:, 0], X[:, 1], X[:, 2])

    def predict_interval(self, X, level=None):
        """Array (n, 3) of point, lower and upper loss."""
        check_is_fitted(self, "law_")
        X = check_array(X)
        level = self.level if level is None else level
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ExtrapolationWarning)
            rows = [extrapolate(self.law_, *x, level=level) for x in X]
        return np.array([[r.point, r.lower, r.upper] for r in rows])
