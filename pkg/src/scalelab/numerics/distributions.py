"""CDFs, survival functions and quantiles for the four families used in
regression inference: normal, Student t, chi-squared and F."""

import math
from statistics import NormalDist

from ..errors import InvalidParameter
from .special import betainc, gammainc, gammaincc

FAMILIES = ("normal", "student_t", "chi_squared", "f")

_STD_NORMAL = NormalDist()


def _check_df(*dfs):
    for df in dfs:
        if df is None or not df > 0 or math.isnan(df):
            raise InvalidParameter(f"degrees of freedom must be positive, got {df}")


def normal_cdf(x):
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def normal_sf(x):
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def normal_ppf(p):
    return _STD_NORMAL.inv_cdf(p)


def t_cdf(x, df):
    _check_df(df)
    if math.isinf(x):
        return 1.0 if x > 0 else 0.0
    tail = 0.5 * betainc(0.5 * df, 0.5, df / (df + x * x))
    return 1.0 - tail if x > 0 else tail


def t_sf(x, df):
    return t_cdf(-x, df)


def t_two_sided_p(t, df):
    """P(|T| >= |t|) for T ~ t(df)."""
    _check_df(df)
    if math.isinf(t):
        return 0.0
    return betainc(0.5 * df, 0.5, df / (df + t * t))


def t_ppf(p, df):
    """Quantile of t(df) by bracketing and bisection on the CDF."""
    _check_df(df)
    if not 0.0 < p < 1.0:
        raise InvalidParameter(f"probability must lie in (0, 1), got {p}")
    if p == 0.5:
        return 0.0
    if p < 0.5:
        return -t_ppf(1.0 - p, df)
    lo, hi = 0.0, max(1.0, normal_ppf(p))
    while t_cdf(hi, df) < p:
        lo, hi = hi, hi * 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if t_cdf(mid, df) < p:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def chi2_cdf(x, df):
    _check_df(df)
    return gammainc(0.5 * df, 0.5 * x) if x > 0 else 0.0


def chi2_sf(x, df):
    _check_df(df)
    return gammaincc(0.5 * df, 0.5 * x) if x > 0 else 1.0


def f_cdf(x, dfn, dfd):
    _check_df(dfn, dfd)
    if x <= 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    return betainc(0.5 * dfn, 0.5 * dfd, dfn * x / (dfn * x + dfd))


def f_sf(x, dfn, dfd):
    _check_df(dfn, dfd)
    if x <= 0:
        return 1.0
    if math.isinf(x):
        return 0.0
    return betainc(0.5 * dfd, 0.5 * dfn, dfd / (dfd + dfn * x))


def dist_cdf(family, x, df=None, df2=None):
    """Dispatch on ``family``; ``df``/``df2`` are the degrees of freedom."""
    x = float(x)
    if family == "normal":
        return normal_cdf(x)
    if family == "student_t":
        return t_cdf(x, df)
    if family == "chi_squared":
        return chi2_cdf(x, df)
    if family == "f":
        return f_cdf(x, df, df2)
    raise InvalidParameter(f"unknown family {family!r}; expected one of {FAMILIES}")


def dist_sf(family, x, df=None, df2=None):
    x = float(x)
    if family == "normal":
        return normal_sf(x)
    if family == "student_t":
        return t_sf(x, df)
    if family == "chi_squared":
        return chi2_sf(x, df)
    if family == "f":
        return f_sf(x, df, df2)
    raise InvalidParameter(f"unknown family {family!r}; expected one of {FAMILIES}")
