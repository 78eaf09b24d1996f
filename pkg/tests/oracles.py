"""Independent reference computations used to check the library.

Nothing here calls into scalelab; each oracle takes a different route
(brute force, normal equations, arbitrary precision) from the code it checks.
"""

import mpmath as mp
import numpy as np

mp.mp.dps = 50


def dominated(p, q):
    """True when q weakly dominates p."""
    return (q[0] <= p[0] and q[1] < p[1]) or (q[0] < p[0] and q[1] <= p[1])


def brute_force_frontier(points):
    """O(n^2) frontier; exact duplicates keep the first occurrence."""
    keep = []
    for i, p in enumerate(points):
        if any(dominated(p, q) for j, q in enumerate(points) if j != i):
            continue
        if any(points[j] == p for j in keep):
            continue
        keep.append(i)
    return sorted(keep, key=lambda i: points[i][0])


def normal_equations_ols(X, y):
    X = np.asarray(X, float)
    y = np.asarray(y, float)
    xtx_inv = np.linalg.inv(X.T @ X)
    beta = xtx_inv @ X.T @ y
    e = y - X @ beta
    n, k = X.shape
    h = np.array([X[i] @ xtx_inv @ X[i] for i in range(n)])
    sigma2 = e @ e / (n - k)
    return beta, e, h, sigma2, xtx_inv


def loo_press(X, y):
    """PRESS by literally refitting without each row."""
    X = np.asarray(X, float)
    y = np.asarray(y, float)
    total = 0.0
    for i in range(len(y)):
        mask = np.arange(len(y)) != i
        b = np.linalg.lstsq(X[mask], y[mask], rcond=None)[0]
        total += (y[i] - X[i] @ b) ** 2
    return total


def t_cdf(x, df):
    x, df = mp.mpf(x), mp.mpf(df)
    tail = mp.betainc(df / 2, mp.mpf(1) / 2, 0, df / (df + x * x), regularized=True) / 2
    return float(1 - tail if x > 0 else tail)


def chi2_sf(x, df):
    return float(mp.gammainc(mp.mpf(df) / 2, mp.mpf(x) / 2, mp.inf, regularized=True))


def f_sf(x, d1, d2):
    x, d1, d2 = mp.mpf(x), mp.mpf(d1), mp.mpf(d2)
    return float(mp.betainc(d2 / 2, d1 / 2, 0, d2 / (d2 + d1 * x), regularized=True))


def normal_cdf(x):
    return float(mp.ncdf(mp.mpf(x)))


def hc3_covariance(X, y):
    """Sandwich estimator written out term by term."""
    beta, e, h, _, xtx_inv = normal_equations_ols(X, y)
    X = np.asarray(X, float)
    meat = np.zeros((X.shape[1], X.shape[1]))
    for i in range(X.shape[0]):
        meat += np.outer(X[i], X[i]) * (e[i] / (1 - h[i])) ** 2
    return xtx_inv @ meat @ xtx_inv
