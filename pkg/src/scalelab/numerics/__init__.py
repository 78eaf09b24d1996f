from .distributions import (
    FAMILIES,
    chi2_cdf,
    chi2_sf,
    dist_cdf,
    dist_sf,
    f_cdf,
    f_sf,
    normal_cdf,
    normal_ppf,
    normal_sf,
    t_cdf,
    t_ppf,
    t_sf,
    t_two_sided_p,
)
from .linalg import LstSqSolution, condition_number, matrix_rank, solve_least_squares
from .special import betainc, betaincc, gammainc, gammaincc

__all__ = [
    "FAMILIES",
    "LstSqSolution",
    "betainc",
    "betaincc",
    "chi2_cdf",
    "chi2_sf",
    "condition_number",
    "dist_cdf",
    "dist_sf",
    "f_cdf",
    "f_sf",
    "gammainc",
    "gammaincc",
    "matrix_rank",
    "normal_cdf",
    "normal_ppf",
    "normal_sf",
    "solve_least_squares",
    "t_cdf",
    "t_ppf",
    "t_sf",
    "t_two_sided_p",
]
