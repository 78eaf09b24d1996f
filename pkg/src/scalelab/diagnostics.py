"""OLS assumption checks: conditioning, heteroskedasticity, autocorrelation,
functional form and residual normality."""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    CollinearAugmentation,
    DegenerateResiduals,
    InvalidParameter,
    RankDeficient,
    SampleTooSmall,
    ScaleLabError,
)
from .numerics import chi2_sf, condition_number, f_sf, solve_least_squares

DEFAULT_RESET_POWERS = (2,)
# Residual sums of squares below this fraction of SST count as an exact fit.
_EXACT_FIT_RTOL = 1e-20


@dataclass(frozen=True)
class StatResult:
    statistic: float
    p_value: Optional[float] = None


def _residuals(residuals, min_len=2):
    e = np.asarray(residuals, dtype=float).ravel()
    if e.shape[0] < min_len:
        raise SampleTooSmall(f"need at least {min_len} residuals, got {e.shape[0]}")
    if not np.any(e):
        raise DegenerateResiduals("all residuals are zero")
    return e


def _check_not_exact(ols_fit):
    if ols_fit.sse <= _EXACT_FIT_RTOL * ols_fit.sst:
        raise DegenerateResiduals("fit is exact; residual-based tests are undefined")


def breusch_pagan(ols_fit):
    """Studentized (Koenker) Breusch-Pagan test.

    Squared residuals are regressed on the fit's full design. Returns
    ``(lm, lm_p, f, f_p)`` with ``lm = n * R2_aux`` against chi2(k-1) and the
    F form against F(k-1, n-k).
    """
    _check_not_exact(ols_fit)
    n, k = ols_fit.n, ols_fit.k
    if k < 2:
        raise InvalidParameter("Breusch-Pagan needs at least one non-constant regressor")
    u = ols_fit.residuals**2
    aux = solve_least_squares(ols_fit.frame.X, u)
    sst = float(np.sum((u - u.mean()) ** 2))
    if sst == 0.0:
        raise DegenerateResiduals("squared residuals have zero variance")
    r2 = 1.0 - float(aux.residuals @ aux.residuals) / sst
    df1, df2 = k - 1, n - k
    lm = n * r2
    f = (r2 / df1) / ((1.0 - r2) / df2)
    return lm, chi2_sf(lm, df1), f, f_sf(f, df1, df2)


def durbin_watson(residuals):
    e = _residuals(residuals)
    return float(np.sum(np.diff(e) ** 2) / (e @ e))


def ramsey_reset(ols_fit, powers=DEFAULT_RESET_POWERS):
    """RESET F-test adding powers of the fitted values to the design.

    Returns ``(f, p)`` with degrees of freedom ``(q, n - k - q)`` where
    ``q = len(powers)``.
    """
    powers = tuple(sorted(set(int(p) for p in powers)))
    if not powers or powers[0] < 2:
        raise InvalidParameter(f"RESET powers must be integers >= 2, got {powers}")
    n, k, q = ols_fit.n, ols_fit.k, len(powers)
    if n <= k + q:
        raise SampleTooSmall(f"RESET needs n > k + {q}, got n={n}, k={k}")
    yhat = ols_fit.fitted
    X = np.column_stack([ols_fit.frame.X] + [yhat**p for p in powers])
    try:
        aug = solve_least_squares(X, ols_fit.frame.y)
    except RankDeficient:
        raise CollinearAugmentation(
            f"design augmented with fitted powers {powers} is rank deficient"
        ) from None
    sse_r = ols_fit.sse
    if sse_r <= _EXACT_FIT_RTOL * ols_fit.sst:
        return 0.0, 1.0
    sse_u = float(aug.residuals @ aug.residuals)
    df2 = n - k - q
    f = max((sse_r - sse_u) / q, 0.0) / (sse_u / df2)
    return f, f_sf(f, q, df2)


def _moments(e):
    d = e - e.mean()
    m2 = np.mean(d**2)
    skew = np.mean(d**3) / m2**1.5
    kurt = np.mean(d**4) / m2**2
    return float(skew), float(kurt)


def jarque_bera(residuals):
    """JB = n/6 * (skew^2 + (kurtosis - 3)^2 / 4) with moment estimators."""
    e = _residuals(residuals)
    n = e.shape[0]
    skew, kurt = _moments(e)
    jb = n / 6.0 * (skew**2 + 0.25 * (kurt - 3.0) ** 2)
    return jb, chi2_sf(jb, 2)


def skewness_z(e):
    """D'Agostino's normalizing transform of sample skewness."""
    n = e.shape[0]
    b2, _ = _moments(e)
    y = b2 * math.sqrt((n + 1) * (n + 3) / (6.0 * (n - 2)))
    beta2 = 3.0 * (n * n + 27 * n - 70) * (n + 1) * (n + 3) / ((n - 2.0) * (n + 5) * (n + 7) * (n + 9))
    w2 = -1.0 + math.sqrt(2.0 * (beta2 - 1.0))
    delta = 1.0 / math.sqrt(0.5 * math.log(w2))
    alpha = math.sqrt(2.0 / (w2 - 1.0))
    if y == 0:
        y = 1.0
    r = y / alpha
    return delta * math.log(r + math.sqrt(r * r + 1.0))


def kurtosis_z(e):
    """Anscombe-Glynn normalizing transform of sample kurtosis."""
    n = e.shape[0]
    _, b2 = _moments(e)
    mean = 3.0 * (n - 1) / (n + 1)
    var = 24.0 * n * (n - 2) * (n - 3) / ((n + 1.0) ** 2 * (n + 3) * (n + 5))
    x = (b2 - mean) / math.sqrt(var)
    sqrt_beta1 = (
        6.0 * (n * n - 5 * n + 2) / ((n + 7.0) * (n + 9))
        * math.sqrt(6.0 * (n + 3) * (n + 5) / (n * (n - 2.0) * (n - 3)))
    )
    a = 6.0 + 8.0 / sqrt_beta1 * (2.0 / sqrt_beta1 + math.sqrt(1.0 + 4.0 / sqrt_beta1**2))
    term1 = 1.0 - 2.0 / (9.0 * a)
    denom = 1.0 + x * math.sqrt(2.0 / (a - 4.0))
    if denom == 0:
        return math.inf
    term2 = math.copysign(abs((1.0 - 2.0 / a) / denom) ** (1.0 / 3.0), denom)
    return (term1 - term2) / math.sqrt(2.0 / (9.0 * a))


OMNIBUS_MIN_N = 8


def omnibus(residuals):
    """D'Agostino-Pearson K^2 = z_skew^2 + z_kurt^2 against chi2(2)."""
    e = np.asarray(residuals, dtype=float).ravel()
    if e.shape[0] < OMNIBUS_MIN_N:
        raise SampleTooSmall(f"omnibus test needs at least {OMNIBUS_MIN_N} residuals")
    e = _residuals(e)
    k2 = skewness_z(e) ** 2 + kurtosis_z(e) ** 2
    return k2, chi2_sf(k2, 2)


@dataclass(frozen=True)
class DiagnosticsReport:
    condition_number: Optional[float]
    bp_lm: Optional[StatResult]
    bp_f: Optional[StatResult]
    durbin_watson: Optional[float]
    reset: Optional[StatResult]
    jarque_bera: Optional[StatResult]
    omnibus: Optional[StatResult]
    reset_powers: tuple = DEFAULT_RESET_POWERS
    errors: dict = field(default_factory=dict)

    def rows(self):
        """(test name, statistic, p-value) in table order; None marks blanks."""
        out = []
        for label, attr in TEST_ROWS:
            value = getattr(self, attr)
            if value is None:
                out.append((label, None, None))
            elif isinstance(value, StatResult):
                out.append((label, value.statistic, value.p_value))
            else:
                out.append((label, value, None))
        return out


TEST_ROWS = (
    ("Condition Number", "condition_number"),
    ("Breusch-Pagan (LM)", "bp_lm"),
    ("Breusch-Pagan (F)", "bp_f"),
    ("Durbin-Watson", "durbin_watson"),
    ("Ramsey RESET", "reset"),
    ("Jarque-Bera", "jarque_bera"),
    ("Omnibus", "omnibus"),
)


def run_all(ols_fit, reset_powers=DEFAULT_RESET_POWERS):
    """Run every test; failures are recorded in ``errors`` instead of raised."""
    results = {}
    errors = {}

    def attempt(name, fn):
        try:
            results[name] = fn()
        except ScaleLabError as exc:
            errors[name] = f"{type(exc).__name__}: {exc}"
            results[name] = None

    exact = ols_fit.sse <= _EXACT_FIT_RTOL * ols_fit.sst

    def residual_test(fn):
        def wrapped():
            if exact:
                raise DegenerateResiduals("fit is exact; residual-based tests are undefined")
            return fn(ols_fit.residuals)

        return wrapped

    attempt("condition_number", lambda: condition_number(ols_fit.frame.X))
    attempt("bp", lambda: breusch_pagan(ols_fit))
    attempt("durbin_watson", residual_test(durbin_watson))
    attempt("reset", lambda: ramsey_reset(ols_fit, reset_powers))
    attempt("jarque_bera", residual_test(jarque_bera))
    attempt("omnibus", residual_test(omnibus))

    bp = results["bp"]
    if "bp" in errors:
        errors["bp_lm"] = errors["bp_f"] = errors.pop("bp")

    def pair(v):
        return None if v is None else StatResult(float(v[0]), float(v[1]))

    return DiagnosticsReport(
        condition_number=results["condition_number"],
        bp_lm=None if bp is None else StatResult(float(bp[0]), float(bp[1])),
        bp_f=None if bp is None else StatResult(float(bp[2]), float(bp[3])),
        durbin_watson=results["durbin_watson"],
        reset=pair(results["reset"]),
        jarque_bera=pair(results["jarque_bera"]),
        omnibus=pair(results["omnibus"]),
        reset_powers=tuple(sorted(set(reset_powers))),
        errors=errors,
    )
