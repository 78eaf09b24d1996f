"""Ordinary least squares inference in log10 space.

A :class:`RegressionFrame` holds the design (intercept first) and response,
plus whatever transform maps raw predictor values into the frame. :func:`fit`
turns a frame into an immutable :class:`OlsFit`, which every interval,
contrast, bootstrap and diagnostic routine consumes.
"""

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .errors import (
    DataValueError,
    DegenerateVariance,
    DimensionMismatch,
    ExtrapolationWarning,
    InsufficientPoints,
    InvalidColumn,
    InvalidParameter,
    RankDeficient,
    TooFewValidResamples,
    ZeroVariance,
)
from .numerics import normal_ppf, normal_sf, solve_least_squares, t_ppf, t_two_sided_p

STANDARDIZATION_MODES = ("none", "pooled", "per_task")
INTERVAL_METHODS = ("classic", "hc3")


@dataclass(frozen=True, eq=False)
class RegressionFrame:
    """Design matrix and response with the transform that produced them.

    ``X[:, 0]`` is the intercept. When ``log10`` is set, raw predictor and
    response values were mapped through ``log10`` before any z-scoring; the
    stored ``x_mean``/``x_scale`` and ``y_mean``/``y_scale`` then undo the
    standardization (identity when ``standardization == "none"``).
    """

    X: np.ndarray
    y: np.ndarray
    column_names: tuple
    response_name: str = "y"
    log10: bool = True
    standardization: str = "none"
    x_mean: Optional[np.ndarray] = None
    x_scale: Optional[np.ndarray] = None
    y_mean: float = 0.0
    y_scale: float = 1.0

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
            raise DimensionMismatch(f"X {X.shape} and y {y.shape} do not align")
        if len(self.column_names) != X.shape[1]:
            raise DimensionMismatch("one column name per design column required")
        ones = np.all(X == 1.0, axis=0)
        if X.shape[1] == 0 or not ones[0] or ones.sum() != 1:
            raise DimensionMismatch("design needs exactly one intercept column, in first position")
        if self.standardization not in STANDARDIZATION_MODES:
            raise InvalidParameter(f"unknown standardization {self.standardization!r}")
        p = X.shape[1] - 1
        x_mean = np.zeros(p) if self.x_mean is None else np.asarray(self.x_mean, float)
        x_scale = np.ones(p) if self.x_scale is None else np.asarray(self.x_scale, float)
        for name, val in (("X", X), ("y", y), ("x_mean", x_mean), ("x_scale", x_scale)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def k(self):
        return self.X.shape[1]

    @property
    def predictor_names(self):
        return self.column_names[1:]

    def column_index(self, which):
        if isinstance(which, str):
            try:
                return self.column_names.index(which)
            except ValueError:
                raise InvalidColumn(f"no column named {which!r}") from None
        idx = int(which)
        if not 0 <= idx < self.k:
            raise InvalidColumn(f"column index {idx} out of range for {self.k} columns")
        return idx

    def unstandardized_predictors(self):
        """Predictor columns (no intercept) in log10 (or raw) units."""
        return self.X[:, 1:] * self.x_scale + self.x_mean

    def unstandardized_response(self):
        return self.y * self.y_scale + self.y_mean

    def design_rows(self, raw):
        """Map raw predictor rows (shape (m, k-1)) into design rows with intercept."""
        raw = np.atleast_2d(np.asarray(raw, dtype=float))
        if raw.shape[1] != self.k - 1:
            raise DimensionMismatch(f"expected {self.k - 1} predictor values, got {raw.shape[1]}")
        if self.log10:
            if np.any(raw <= 0):
                raise DataValueError("log10 frames need strictly positive predictor values")
            raw = np.log10(raw)
        z = (raw - self.x_mean) / self.x_scale
        return np.column_stack([np.ones(z.shape[0]), z])

    def response_to_log(self, values):
        """Frame response units to log10 (or raw) response units."""
        return np.asarray(values, dtype=float) * self.y_scale + self.y_mean

    def response_from_raw(self, raw):
        raw = np.asarray(raw, dtype=float)
        v = np.log10(raw) if self.log10 else raw
        return (v - self.y_mean) / self.y_scale


def make_frame(predictors, response, names, response_name="y", log10=True):
    """Build an unstandardized frame from raw (positive, if ``log10``) values."""
    P = np.atleast_2d(np.asarray(predictors, dtype=float))
    if P.shape[0] == 1 and len(np.asarray(response).ravel()) != 1:
        P = P.T
    y = np.asarray(response, dtype=float).ravel()
    if P.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"{P.shape[0]} predictor rows but {y.shape[0]} responses")
    if len(names) != P.shape[1]:
        raise DimensionMismatch("one name per predictor column required")
    if not (np.all(np.isfinite(P)) and np.all(np.isfinite(y))):
        raise DataValueError("predictors and response must be finite")
    if log10:
        if np.any(P <= 0) or np.any(y <= 0):
            raise DataValueError("log10 frames need strictly positive values")
        P, y = np.log10(P), np.log10(y)
    X = np.column_stack([np.ones(P.shape[0]), P])
    return RegressionFrame(
        X=X, y=y, column_names=("const", *names), response_name=response_name, log10=log10
    )


def _mean_sd(values, label):
    mean = float(np.mean(values))
    sd = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
    if not sd > 0:
        raise ZeroVariance(label)
    return mean, sd


def standardize(frame, mode="per_task", siblings=()):
    """Z-score the predictors and the response (sample sd, ddof=1).

    ``per_task`` uses only the frame's own rows. ``pooled`` takes predictor
    statistics over the stacked rows of ``frame`` and ``siblings`` (which must
    share the same design) and response statistics over all their responses.
    """
    if frame.standardization != "none":
        raise InvalidParameter("frame is already standardized")
    if mode not in ("pooled", "per_task"):
        raise InvalidParameter(f"mode must be 'pooled' or 'per_task', got {mode!r}")
    if mode == "pooled":
        for sib in siblings:
            if sib.standardization != "none" or not np.array_equal(sib.X, frame.X):
                raise DimensionMismatch("pooled siblings must share the unstandardized design")
        Xs = np.vstack([frame.X] + [s.X for s in siblings])
        ys = np.concatenate([frame.y] + [s.y for s in siblings])
    else:
        Xs, ys = frame.X, frame.y

    stats = [_mean_sd(Xs[:, j], frame.column_names[j]) for j in range(1, frame.k)]
    x_mean = np.array([m for m, _ in stats])
    x_scale = np.array([s for _, s in stats])
    y_mean, y_scale = _mean_sd(ys, frame.response_name)
    Z = (frame.X[:, 1:] - x_mean) / x_scale
    return RegressionFrame(
        X=np.column_stack([np.ones(frame.n), Z]),
        y=(frame.y - y_mean) / y_scale,
        column_names=frame.column_names,
        response_name=frame.response_name,
        log10=frame.log10,
        standardization=mode,
        x_mean=x_mean,
        x_scale=x_scale,
        y_mean=y_mean,
        y_scale=y_scale,
    )


@dataclass(frozen=True, eq=False)
class OlsFit:
    frame: RegressionFrame
    coefficients: np.ndarray
    cov_classic: np.ndarray
    cov_hc3: np.ndarray
    residuals: np.ndarray
    fitted: np.ndarray
    hat_diagonals: np.ndarray
    xtx_inverse: np.ndarray
    n: int
    k: int
    sigma2: float
    sse: float
    sst: float
    press: float
    r2: float
    r2_adj: float
    r2_loocv: float

    @property
    def df_resid(self):
        return self.n - self.k

    @property
    def column_names(self):
        return self.frame.column_names

    def covariance(self, method="classic"):
        if method == "classic":
            return self.cov_classic
        if method == "hc3":
            return self.cov_hc3
        raise InvalidParameter(f"method must be one of {INTERVAL_METHODS}, got {method!r}")

    def standard_errors(self, method="classic"):
        return np.sqrt(np.clip(np.diag(self.covariance(method)), 0.0, None))

    def t_values(self, method="classic"):
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.coefficients / self.standard_errors(method)


def fit(frame):
    """OLS fit of ``frame.y`` on ``frame.X`` with classic and HC3 covariances."""
    n, k = frame.X.shape
    if n <= k:
        raise InsufficientPoints(f"need more rows than columns, got n={n}, k={k}")
    sol = solve_least_squares(frame.X, frame.y)
    e = sol.residuals
    h = sol.hat_diagonals
    y = frame.y
    sst = float(np.sum((y - y.mean()) ** 2))
    if sst == 0.0:
        raise DegenerateVariance("response has zero variance")
    sse = float(e @ e)
    sigma2 = sse / (n - k)
    cov = sigma2 * sol.xtx_inverse
    with np.errstate(divide="ignore", invalid="ignore"):
        loo = e / (1.0 - h)
        meat = frame.X.T @ (frame.X * (loo**2)[:, None])
    cov_hc3 = sol.xtx_inverse @ meat @ sol.xtx_inverse
    press = float(loo @ loo)
    r2 = 1.0 - sse / sst
    coef = sol.coefficients
    for arr in (coef, e, h):
        arr.setflags(write=False)
    return OlsFit(
        frame=frame,
        coefficients=coef,
        cov_classic=0.5 * (cov + cov.T),
        cov_hc3=0.5 * (cov_hc3 + cov_hc3.T),
        residuals=e,
        fitted=y - e,
        hat_diagonals=h,
        xtx_inverse=sol.xtx_inverse,
        n=n,
        k=k,
        sigma2=sigma2,
        sse=sse,
        sst=sst,
        press=press,
        r2=r2,
        r2_adj=1.0 - (1.0 - r2) * (n - 1) / (n - k),
        r2_loocv=1.0 - press / sst,
    )


@dataclass(frozen=True)
class IntervalEstimate:
    point: float
    lower: float
    upper: float
    level: float
    method: str

    @property
    def width(self):
        return self.upper - self.lower

    def contains(self, value):
        return self.lower <= value <= self.upper


@dataclass(frozen=True)
class Inference:
    """Point estimate, interval and two-sided test of a linear combination."""

    name: str
    interval: IntervalEstimate
    se: float
    statistic: float
    p_value: float
    df: int
    reference: str

    @property
    def estimate(self):
        return self.interval.point


def _reference_for(method, reference):
    if reference is None:
        # HC3 is an asymptotic estimator: normal reference, as in common
        # econometrics software. Classic OLS uses t(n - k).
        return "normal" if method == "hc3" else "t"
    if reference not in ("t", "normal"):
        raise InvalidParameter(f"reference must be 't' or 'normal', got {reference!r}")
    return reference


def _infer(name, point, se, df, level, method, reference):
    if not 0.0 < level < 1.0:
        raise InvalidParameter(f"level must lie in (0, 1), got {level}")
    q = 0.5 * (1.0 + level)
    crit = t_ppf(q, df) if reference == "t" else normal_ppf(q)
    if se > 0:
        stat = point / se
        p = t_two_sided_p(stat, df) if reference == "t" else 2.0 * normal_sf(abs(stat))
    elif point == 0:
        stat, p = 0.0, 1.0
    else:
        stat, p = math.copysign(math.inf, point), 0.0
    interval = IntervalEstimate(point, point - crit * se, point + crit * se, level, f"{method}_{reference}")
    return Inference(name, interval, float(se), float(stat), float(p), df, reference)


def coefficient_inference(ols_fit, which, method="classic", level=0.95, reference=None):
    """t-statistic, two-sided p-value and CI for one coefficient.

    ``method`` picks the covariance (``"classic"`` or ``"hc3"``).
    ``reference`` picks the quantile distribution; by default t(n-k) for
    classic and the standard normal for HC3.
    """
    idx = ols_fit.frame.column_index(which)
    se = float(ols_fit.standard_errors(method)[idx])
    reference = _reference_for(method, reference)
    return _infer(
        ols_fit.column_names[idx],
        float(ols_fit.coefficients[idx]),
        se,
        ols_fit.df_resid,
        level,
        method,
        reference,
    )


def contrast(ols_fit, weights, level=0.95, method="classic", reference=None, name=None):
    """Inference on ``w @ beta`` using the chosen covariance."""
    w = np.asarray(weights, dtype=float).ravel()
    if w.shape[0] != ols_fit.k:
        raise DimensionMismatch(f"weights need length {ols_fit.k}, got {w.shape[0]}")
    point = float(w @ ols_fit.coefficients)
    var = float(w @ ols_fit.covariance(method) @ w)
    se = math.sqrt(max(var, 0.0))
    if name is None:
        name = " ".join(
            f"{'+' if c > 0 else '-'}{'' if abs(c) == 1 else f'{abs(c):g}*'}{n}"
            for c, n in zip(w, ols_fit.column_names)
            if c != 0
        ).lstrip("+") or "0"
    return _infer(name, point, se, ols_fit.df_resid, level, method, _reference_for(method, reference))


@dataclass(frozen=True, eq=False)
class BootstrapResult:
    """Row-resampled coefficient replicates, one row per replicate."""

    estimates: np.ndarray
    seed: int
    draws: int
    rejected: int
    point: np.ndarray

    @property
    def replicates(self):
        return self.estimates.shape[0]

    def interval(self, target, level=0.95, column_names=None):
        w = _target_weights(target, self.point.shape[0], column_names)
        values = self.estimates @ w
        alpha = 1.0 - level
        lo, hi = np.quantile(values, [alpha / 2.0, 1.0 - alpha / 2.0], method="linear")
        return IntervalEstimate(float(self.point @ w), float(lo), float(hi), level, "bootstrap_percentile")


def _target_weights(target, k, column_names=None):
    if isinstance(target, str):
        if column_names is None or target not in column_names:
            raise InvalidColumn(f"unknown coefficient {target!r}")
        target = column_names.index(target)
    if np.isscalar(target):
        idx = int(target)
        if not 0 <= idx < k:
            raise InvalidColumn(f"coefficient index {idx} out of range")
        w = np.zeros(k)
        w[idx] = 1.0
        return w
    w = np.asarray(target, dtype=float).ravel()
    if w.shape[0] != k:
        raise DimensionMismatch(f"contrast weights need length {k}, got {w.shape[0]}")
    return w


MAX_REDRAWS_PER_REPLICATE = 1000


def _replicate(X, y, seed, index):
    # Each replicate owns a generator keyed on (seed, index), so output does
    # not depend on how replicates are scheduled across workers.
    rng = np.random.default_rng([seed, index])
    n = X.shape[0]
    for attempt in range(MAX_REDRAWS_PER_REPLICATE):
        rows = rng.integers(0, n, size=n)
        try:
            sol = solve_least_squares(X[rows], y[rows])
        except RankDeficient:
            continue
        return sol.coefficients, attempt
    raise TooFewValidResamples(
        f"replicate {index}: {MAX_REDRAWS_PER_REPLICATE} consecutive rank-deficient resamples"
    )


def bootstrap(frame, replicates=10_000, seed=0, n_jobs=1):
    """Pairs bootstrap: resample rows of (X, y) with replacement and refit.

    Rank-deficient resamples are discarded and redrawn. Raises
    :class:`TooFewValidResamples` when more than half of all draws were
    rank deficient.
    """
    if replicates < 1:
        raise InvalidParameter(f"replicates must be >= 1, got {replicates}")
    X, y = frame.X, frame.y
    point = solve_least_squares(X, y).coefficients

    def run(indices):
        return [_replicate(X, y, seed, i) for i in indices]

    if n_jobs is None or n_jobs <= 1:
        results = run(range(replicates))
    else:
        chunks = [range(i, replicates, n_jobs) for i in range(n_jobs)]
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            parts = list(pool.map(run, chunks))
        results = [None] * replicates
        for chunk, part in zip(chunks, parts):
            for i, res in zip(chunk, part):
                results[i] = res

    estimates = np.array([c for c, _ in results])
    rejected = sum(r for _, r in results)
    draws = replicates + rejected
    if rejected > 0.5 * draws:
        raise TooFewValidResamples(f"{rejected} of {draws} resamples were rank deficient")
    return BootstrapResult(estimates, seed, draws, rejected, point)


def bootstrap_ci(frame, target, replicates=10_000, seed=0, level=0.95, n_jobs=1):
    """Percentile interval for a coefficient (index or name) or contrast weights."""
    result = bootstrap(frame, replicates, seed, n_jobs)
    return result.interval(target, level, frame.column_names)


@dataclass(frozen=True)
class PredictionInterval(IntervalEstimate):
    """Interval for a new observation, in the frame's log10 response units."""

    leverage: float = 0.0
    max_training_leverage: float = 0.0
    extrapolation: bool = False
    log10: bool = True

    def back_transform(self):
        """(point, lower, upper) in raw response units."""
        vals = (self.point, self.lower, self.upper)
        return tuple(10.0**v for v in vals) if self.log10 else vals


def predict_interval(ols_fit, x0, level=0.95, raw=True):
    """Prediction interval for a new response at predictor vector ``x0``.

    ``x0`` holds raw predictor values (no intercept) unless ``raw=False``,
    in which case it is a full design row. The interval is returned in the
    unstandardized log10 response space; leverage above the training maximum
    sets ``extrapolation`` and emits :class:`ExtrapolationWarning`.
    """
    frame = ols_fit.frame
    if raw:
        row = frame.design_rows(x0)[0]
    else:
        row = np.asarray(x0, dtype=float).ravel()
        if row.shape[0] != ols_fit.k:
            raise DimensionMismatch(f"design row needs {ols_fit.k} entries")
    if not 0.0 < level < 1.0:
        raise InvalidParameter(f"level must lie in (0, 1), got {level}")
    leverage = float(row @ ols_fit.xtx_inverse @ row)
    max_lev = float(np.max(ols_fit.hat_diagonals))
    crit = t_ppf(0.5 * (1.0 + level), ols_fit.df_resid)
    half = crit * math.sqrt(ols_fit.sigma2 * (1.0 + leverage)) * frame.y_scale
    point = float(frame.response_to_log(row @ ols_fit.coefficients))
    extrapolating = leverage > max_lev * (1.0 + 1e-12)
    if extrapolating:
        warnings.warn(
            f"prediction leverage {leverage:.3g} exceeds training maximum {max_lev:.3g}",
            ExtrapolationWarning,
            stacklevel=2,
        )
    return PredictionInterval(
        point=point,
        lower=point - half,
        upper=point + half,
        level=level,
        method="prediction_t",
        leverage=leverage,
        max_training_leverage=max_lev,
        extrapolation=extrapolating,
        log10=frame.log10,
    )


class OLSRegressor(RegressorMixin, BaseEstimator):
    """Scikit-learn wrapper around :func:`fit`.

    Parameters
    ----------
    log10 : bool
        Regress ``log10(y)`` on ``log10(X)``; predictions are mapped back.
    standardize : {"none", "per_task"}
        Z-score predictors and response before fitting.
    level : float
        Default level for :meth:`predict_interval`.
    """

    def __init__(self, log10=False, standardize="none", level=0.95):
        self.log10 = log10
        self.standardize = standardize
        self.level = level

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        if self.standardize not in ("none", "per_task"):
            raise InvalidParameter(f"standardize must be 'none' or 'per_task', got {self.standardize!r}")
        names = tuple(f"x{i}" for i in range(X.shape[1]))
        frame = make_frame(X, y, names, log10=self.log10)
        if self.standardize == "per_task":
            frame = standardize(frame, "per_task")
        self.fit_ = fit(frame)
        self.n_features_in_ = X.shape[1]
        beta = self.fit_.coefficients
        self.intercept_ = float(beta[0])
        self.coef_ = np.asarray(beta[1:])
        return self

    def _log_predict(self, X):
        check_is_fitted(self, "fit_")
        X = check_array(X)
        rows = self.fit_.frame.design_rows(X)
        return self.fit_.frame.response_to_log(rows @ self.fit_.coefficients)

    def predict(self, X):
        v = self._log_predict(X)
        return 10.0**v if self.log10 else v

    def predict_interval(self, X, level=None):
        """Array of shape (n, 3): point, lower, upper in response units."""
        check_is_fitted(self, "fit_")
        X = check_array(X)
        level = self.level if level is None else level
        out = []
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ExtrapolationWarning)
            for row in X:
                pi = predict_interval(self.fit_, row, level)
                out.append(pi.back_transform())
        return np.array(out)
