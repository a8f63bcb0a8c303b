"""Nonparametric statistics: Spearman, Kendall tau-b, Mann-Whitney U, and the
D'Agostino-Pearson K-squared omnibus normality test.

All p-values are two-sided unless stated otherwise. Implementations follow
the classic textbook formulas so that results are reproducible without an
external stats stack; only the normal CDF/quantile and the regularised
incomplete beta come from scipy.special.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.special import betainc, ndtr

from ._util import average_ranks


@dataclass(frozen=True)
class TestResult:
    __test__ = False  # not a pytest collection target

    statistic: float
    p_value: float
    n: tuple

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p-value {self.p_value} outside [0, 1]")


def _t_sf_two_sided(t: float, df: int) -> float:
    """P(|T| >= t) for Student's t with ``df`` degrees of freedom."""
    if not math.isfinite(t):
        return 0.0
    return float(betainc(df / 2.0, 0.5, df / (df + t * t)))


def spearman(x, y) -> TestResult:
    """Spearman rho (Pearson correlation of average ranks), p via the
    t-distribution approximation with n-2 degrees of freedom."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("spearman needs two equal-length 1-D sequences")
    n = x.size
    if n < 3:
        raise ValueError(f"spearman needs length >= 3, got {n}")
    for name, v in (("x", x), ("y", y)):
        if np.all(v == v[0]):
            raise ValueError(f"spearman: sequence {name} is constant")
    rx = average_ranks(x)
    ry = average_ranks(y)
    rxc = rx - rx.mean()
    ryc = ry - ry.mean()
    rho = float(rxc @ ryc / math.sqrt((rxc @ rxc) * (ryc @ ryc)))
    rho = max(-1.0, min(1.0, rho))
    if abs(rho) >= 1.0:
        p = 0.0
    else:
        t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
        p = _t_sf_two_sided(abs(t), n - 2)
    return TestResult(rho, p, (n,))


def kendall(x, y) -> float:
    """Kendall tau-b with tie correction; 0 when exactly one side is fully
    tied, error when both are."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("kendall needs two equal-length 1-D sequences")
    n = x.size
    if n < 2:
        raise ValueError(f"kendall needs length >= 2, got {n}")
    x_tied = bool(np.all(x == x[0]))
    y_tied = bool(np.all(y == y[0]))
    if x_tied and y_tied:
        raise ValueError("kendall: both sequences fully tied")
    if x_tied or y_tied:
        return 0.0
    dx = np.sign(x[:, None] - x[None, :])
    dy = np.sign(y[:, None] - y[None, :])
    iu = np.triu_indices(n, k=1)
    prod = dx[iu] * dy[iu]
    concordant_minus_discordant = float(prod.sum())
    n0 = n * (n - 1) / 2.0
    n1 = _tie_pairs(x)
    n2 = _tie_pairs(y)
    denom = math.sqrt((n0 - n1) * (n0 - n2))
    return concordant_minus_discordant / denom


def _tie_pairs(v: np.ndarray) -> float:
    _, counts = np.unique(v, return_counts=True)
    return float(np.sum(counts * (counts - 1) / 2.0))


def mannwhitney(a, b, alternative: str = "two-sided") -> TestResult:
    """Mann-Whitney U. Exact enumeration when len(a)+len(b) <= 20 and the
    pooled sample is tie-free, else the normal approximation with tie and
    continuity corrections. The statistic is U of the first sample."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise ValueError("mannwhitney needs two non-empty samples")
    if alternative not in ("two-sided", "greater", "less"):
        raise ValueError(f"unknown alternative {alternative!r}")
    na, nb = a.size, b.size
    pooled = np.concatenate([a, b])
    ranks = average_ranks(pooled)
    u_a = float(np.sum(ranks[:na]) - na * (na + 1) / 2.0)
    u_b = na * nb - u_a
    has_ties = np.unique(pooled).size < pooled.size
    if na + nb <= 20 and not has_ties:
        p = _mw_exact_p(na, nb, u_a, alternative)
    else:
        p = _mw_normal_p(na, nb, u_a, pooled, alternative)
    return TestResult(u_a, p, (na, nb))


def _mw_counts(na: int, nb: int) -> np.ndarray:
    """Null distribution of U as arrangement counts.

    N(u | a, b) = N(u-b | a-1, b) + N(u | a, b-1), conditioning on whether
    the largest pooled value belongs to the first sample.
    """
    max_u = na * nb
    dp = np.zeros((na + 1, max_u + 1), dtype=np.float64)
    dp[:, 0] = 1.0  # b = 0: the only arrangement has U = 0
    for b in range(1, nb + 1):
        new = np.zeros_like(dp)
        new[0, 0] = 1.0
        for a in range(1, na + 1):
            new[a, :] = dp[a, :]
            new[a, b:] += new[a - 1, : max_u + 1 - b]
        dp = new
    return dp[na]


def _mw_exact_p(na: int, nb: int, u_a: float, alternative: str) -> float:
    counts = _mw_counts(na, nb)
    total = counts.sum()
    u = int(round(u_a))
    cdf_le = counts[: u + 1].sum() / total
    sf_ge = counts[u:].sum() / total
    if alternative == "greater":
        return min(1.0, sf_ge)
    if alternative == "less":
        return min(1.0, cdf_le)
    u_min = min(u, na * nb - u)
    p = 2.0 * counts[: u_min + 1].sum() / total
    return min(1.0, p)


def _mw_normal_p(na: int, nb: int, u_a: float, pooled: np.ndarray, alternative: str) -> float:
    n = na + nb
    mean = na * nb / 2.0
    _, counts = np.unique(pooled, return_counts=True)
    tie_term = float(np.sum(counts**3 - counts))
    var = na * nb / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    if var <= 0.0:
        return 1.0
    sd = math.sqrt(var)
    if alternative == "greater":
        z = (u_a - mean - 0.5) / sd
        return float(ndtr(-z))
    if alternative == "less":
        z = (u_a - mean + 0.5) / sd
        return float(ndtr(z))
    z = (abs(u_a - mean) - 0.5) / sd
    return min(1.0, float(2.0 * ndtr(-max(z, 0.0))))


def mannwhitney_brute_force(a, b) -> float:
    """Two-sided exact p by enumerating every labelling; test oracle for
    small tie-free samples."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na, nb = a.size, b.size
    pooled = np.concatenate([a, b])
    ranks = average_ranks(pooled)

    def u_of(idx):
        return float(sum(ranks[list(idx)]) - na * (na + 1) / 2.0)

    u_obs = u_of(range(na))
    u_min = min(u_obs, na * nb - u_obs)
    le = 0
    total = 0
    for idx in combinations(range(na + nb), na):
        total += 1
        if u_of(idx) <= u_min:
            le += 1
    return min(1.0, 2.0 * le / total)


def dagostino_k2(x) -> TestResult:
    """D'Agostino-Pearson K^2 omnibus test: K^2 = Z1^2 + Z2^2 from the
    transformed skewness and kurtosis, p = exp(-K^2/2)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("dagostino_k2 needs a 1-D sequence")
    n = x.size
    if n < 20:
        raise ValueError(f"dagostino_k2 needs length >= 20, got {n}")
    if np.all(x == x[0]):
        raise ValueError("dagostino_k2: constant sample")
    z1 = _skew_z(x, n)
    z2 = _kurtosis_z(x, n)
    k2 = z1 * z1 + z2 * z2
    return TestResult(float(k2), float(math.exp(-k2 / 2.0)), (n,))


def _skew_z(x: np.ndarray, n: int) -> float:
    # D'Agostino (1970) transformed skewness
    d = x - x.mean()
    m2 = np.mean(d * d)
    m3 = np.mean(d * d * d)
    g1 = m3 / m2**1.5
    y = g1 * math.sqrt((n + 1) * (n + 3) / (6.0 * (n - 2)))
    beta2 = 3.0 * (n * n + 27 * n - 70) * (n + 1) * (n + 3) / (
        (n - 2.0) * (n + 5) * (n + 7) * (n + 9)
    )
    w2 = -1.0 + math.sqrt(2.0 * (beta2 - 1.0))
    delta = 1.0 / math.sqrt(0.5 * math.log(w2))
    alpha = math.sqrt(2.0 / (w2 - 1.0))
    return delta * math.log(y / alpha + math.sqrt((y / alpha) ** 2 + 1.0))


def _kurtosis_z(x: np.ndarray, n: int) -> float:
    # Anscombe & Glynn (1983) transformed kurtosis
    d = x - x.mean()
    m2 = np.mean(d * d)
    m4 = np.mean(d**4)
    b2 = m4 / (m2 * m2)
    e_b2 = 3.0 * (n - 1) / (n + 1)
    var_b2 = 24.0 * n * (n - 2) * (n - 3) / ((n + 1) ** 2 * (n + 3) * (n + 5))
    xstat = (b2 - e_b2) / math.sqrt(var_b2)
    sqrt_b1 = (
        6.0 * (n * n - 5 * n + 2) / ((n + 7.0) * (n + 9))
        * math.sqrt(6.0 * (n + 3) * (n + 5) / (n * (n - 2.0) * (n - 3)))
    )
    a = 6.0 + 8.0 / sqrt_b1 * (2.0 / sqrt_b1 + math.sqrt(1.0 + 4.0 / sqrt_b1**2))
    denom = 1.0 + xstat * math.sqrt(2.0 / (a - 4.0))
    term = (1.0 - 2.0 / a) / denom
    term = math.copysign(abs(term) ** (1.0 / 3.0), term)
    return ((1.0 - 2.0 / (9.0 * a)) - term) / math.sqrt(2.0 / (9.0 * a))
