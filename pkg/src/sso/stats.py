"""Rank-based and classical hypothesis tests for comparing run results.

The statistics (Kruskal-Wallis H, Friedman chi-square, Bartlett, Levene,
pooled two-sample t, Anderson-Darling normality) are computed from their
textbook formulas with mid-rank tie handling and the standard tie
corrections; only the tail probabilities are delegated to the
regularized incomplete gamma/beta functions.  Degenerate inputs (all
values identical, zero-information blocks) are reported with a flag
rather than silently producing NaN, so callers can escalate them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy import special

__all__ = [
    "TestResult",
    "DegenerateDataError",
    "kruskal_wallis",
    "friedman",
    "variance_homogeneity",
    "t_test_independent",
    "normality",
    "chi_square_sf",
    "t_sf",
    "f_sf",
    "midranks",
]

Df = Union[int, tuple[int, int]]


class DegenerateDataError(ValueError):
    """Input carries no information for the requested test."""


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    df: Df
    method: str
    degenerate: bool = False
    notes: Optional[str] = None

    def __post_init__(self):
        if not math.isfinite(self.statistic):
            raise ValueError(f"non-finite statistic {self.statistic!r}")
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p-value outside [0, 1]: {self.p_value!r}")


# ---------------------------------------------------------------------------
# tail probabilities


def chi_square_sf(x: float, df: int) -> float:
    """Chi-square survival function via the regularized upper incomplete gamma."""
    if x < 0:
        raise ValueError(f"chi-square statistic must be >= 0, got {x}")
    if df < 1:
        raise ValueError(f"df must be a positive integer, got {df}")
    return float(special.gammaincc(df / 2.0, x / 2.0))


def t_sf(t: float, df: int) -> float:
    """Student-t upper tail P(T > t) via the regularized incomplete beta."""
    if df < 1:
        raise ValueError(f"df must be a positive integer, got {df}")
    z = df / (df + t * t)
    half_tail = 0.5 * float(special.betainc(df / 2.0, 0.5, z))
    return half_tail if t >= 0 else 1.0 - half_tail


def f_sf(x: float, df1: int, df2: int) -> float:
    """F-distribution upper tail via the regularized incomplete beta."""
    if min(df1, df2) < 1:
        raise ValueError(f"degrees of freedom must be positive, got ({df1}, {df2})")
    if x <= 0:
        return 1.0
    return float(special.betainc(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * x)))


# ---------------------------------------------------------------------------
# ranking helpers


def midranks(values: np.ndarray) -> np.ndarray:
    """Ranks 1..n with tied values sharing the mean of their rank range."""
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size, dtype=np.float64)
    sorted_vals = values[order]
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def _tie_term(values: np.ndarray) -> float:
    """Sum of t^3 - t over groups of tied values."""
    _, counts = np.unique(values, return_counts=True)
    counts = counts.astype(np.float64)
    return float(np.sum(counts**3 - counts))


def _as_groups(groups: Sequence) -> list[np.ndarray]:
    out = [np.asarray(g, dtype=np.float64).ravel() for g in groups]
    if any(g.size == 0 for g in out):
        raise ValueError("every group must be nonempty")
    if any(not np.isfinite(g).all() for g in out):
        raise ValueError("groups must contain finite values only")
    return out


# ---------------------------------------------------------------------------
# tests


def kruskal_wallis(groups: Sequence) -> TestResult:
    """H test on pooled mid-ranks with the standard tie correction."""
    groups = _as_groups(groups)
    k = len(groups)
    if k < 2:
        raise ValueError(f"need at least 2 groups, got {k}")
    pooled = np.concatenate(groups)
    n_total = pooled.size
    df = k - 1
    if np.all(pooled == pooled[0]):
        return TestResult(0.0, 1.0, df, "kruskal-wallis", degenerate=True,
                          notes="all pooled observations identical")
    ranks = midranks(pooled)
    h = 0.0
    offset = 0
    for g in groups:
        r = ranks[offset : offset + g.size]
        h += r.sum() ** 2 / g.size
        offset += g.size
    h = 12.0 / (n_total * (n_total + 1.0)) * h - 3.0 * (n_total + 1.0)
    correction = 1.0 - _tie_term(pooled) / (n_total**3 - n_total)
    h /= correction
    return TestResult(float(h), chi_square_sf(h, df), df, "kruskal-wallis")


def friedman(data) -> TestResult:
    """Blocked rank test: within-block mid-ranks, chi-square with tie correction."""
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2:
        raise ValueError(f"expected an (n blocks, k treatments) matrix, got shape {data.shape}")
    n, k = data.shape
    if n < 2 or k < 2:
        raise ValueError(f"need at least 2 blocks and 2 treatments, got {data.shape}")
    if not np.isfinite(data).all():
        raise ValueError("blocks must contain finite values only")

    ranks = np.empty_like(data)
    tie_sum = 0.0
    flat_blocks = 0
    for b in range(n):
        ranks[b] = midranks(data[b])
        tie_sum += _tie_term(data[b])
        if np.all(data[b] == data[b, 0]):
            flat_blocks += 1
    df = k - 1
    notes = None
    if flat_blocks:
        notes = f"{flat_blocks} block(s) entirely tied contribute no information"
    correction = 1.0 - tie_sum / (n * (k**3 - k))
    if correction == 0.0:  # every block entirely tied
        return TestResult(0.0, 1.0, df, "friedman", degenerate=True, notes=notes)
    mean_ranks = ranks.mean(axis=0)
    stat = 12.0 * n / (k * (k + 1.0)) * np.sum((mean_ranks - (k + 1.0) / 2.0) ** 2)
    stat = float(stat / correction)
    return TestResult(stat, chi_square_sf(stat, df), df, "friedman",
                      degenerate=stat == 0.0 and flat_blocks == n, notes=notes)


def variance_homogeneity(groups: Sequence, method: str = "bartlett") -> TestResult:
    """Bartlett's log-pooled-variance test or Levene's mean-centered F test."""
    groups = _as_groups(groups)
    k = len(groups)
    if k < 2:
        raise ValueError(f"need at least 2 groups, got {k}")
    if any(g.size < 2 for g in groups):
        raise ValueError("every group needs at least 2 observations")
    sizes = np.array([g.size for g in groups], dtype=np.float64)
    n_total = sizes.sum()

    if method == "bartlett":
        variances = np.array([g.var(ddof=1) for g in groups])
        if np.any(variances == 0.0):
            raise DegenerateDataError(
                f"group {int(np.nonzero(variances == 0.0)[0][0])} has zero variance; "
                "Bartlett's statistic takes its logarithm"
            )
        pooled = float(np.sum((sizes - 1.0) * variances) / (n_total - k))
        stat = (n_total - k) * math.log(pooled) - float(
            np.sum((sizes - 1.0) * np.log(variances))
        )
        corr = 1.0 + (np.sum(1.0 / (sizes - 1.0)) - 1.0 / (n_total - k)) / (3.0 * (k - 1.0))
        stat = float(stat / corr)
        # tiny negative values can appear when all variances are equal
        stat = max(stat, 0.0)
        return TestResult(stat, chi_square_sf(stat, k - 1), k - 1, "bartlett")

    if method == "levene-mean":
        z = [np.abs(g - g.mean()) for g in groups]
        z_group_means = np.array([zi.mean() for zi in z])
        grand = float(np.concatenate(z).mean())
        df1, df2 = k - 1, int(n_total) - k
        between = float(np.sum(sizes * (z_group_means - grand) ** 2))
        within = float(sum(np.sum((zi - zi.mean()) ** 2) for zi in z))
        if within == 0.0:
            degenerate = between == 0.0
            if degenerate:
                return TestResult(0.0, 1.0, (df1, df2), "levene-mean", degenerate=True,
                                  notes="no within-group deviation spread")
            raise DegenerateDataError("zero within-group spread but nonzero between")
        stat = (df2 / df1) * between / within
        return TestResult(stat, f_sf(stat, df1, df2), (df1, df2), "levene-mean")

    raise ValueError(f"unknown method {method!r}; expected 'bartlett' or 'levene-mean'")


def t_test_independent(a, b) -> TestResult:
    """Pooled-variance two-sample t test, two-sided p-value."""
    a, b = _as_groups([a, b])
    na, nb = a.size, b.size
    if na < 2 or nb < 2:
        raise ValueError("both samples need at least 2 observations")
    df = na + nb - 2
    pooled = ((na - 1) * a.var(ddof=1) + (nb - 1) * b.var(ddof=1)) / df
    if pooled == 0.0:
        # both samples constant: no spread to scale a difference by
        return TestResult(0.0, 1.0, df, "t-pooled", degenerate=True,
                          notes="zero pooled variance")
    stat = float((a.mean() - b.mean()) / math.sqrt(pooled * (1.0 / na + 1.0 / nb)))
    p = 2.0 * t_sf(abs(stat), df)
    return TestResult(stat, min(p, 1.0), df, "t-pooled")


# Anderson-Darling case 3 (mean and variance estimated), D'Agostino & Stephens (1986)
_AD_SMALL = (-13.436, 101.14, -223.73)
_AD_MID = (-8.318, 42.796, -59.938)
_AD_HIGH = (0.9177, -4.279, -1.38)
_AD_TAIL = (1.2937, -5.709, 0.0186)


def normality(sample) -> TestResult:
    """Anderson-Darling test against a normal with estimated parameters."""
    x = np.sort(np.asarray(sample, dtype=np.float64).ravel())
    n = x.size
    if n < 8:
        raise ValueError(f"need at least 8 observations, got {n}")
    if not np.isfinite(x).all():
        raise ValueError("sample must contain finite values only")
    sd = x.std(ddof=1)
    if sd == 0.0:
        raise DegenerateDataError("zero-variance sample cannot be standardized")

    z = (x - x.mean()) / sd
    # ndtr is the standard normal CDF; clip away exact 0/1 before the logs
    cdf = np.clip(special.ndtr(z), 1e-300, 1.0 - 1e-16)
    i = np.arange(1, n + 1)
    a2 = -n - np.mean((2 * i - 1) * (np.log(cdf) + np.log1p(-cdf[::-1])))
    a2_star = a2 * (1.0 + 0.75 / n + 2.25 / n**2)

    if a2_star <= 0.2:
        c0, c1, c2 = _AD_SMALL
        p = 1.0 - math.exp(c0 + c1 * a2_star + c2 * a2_star**2)
    elif a2_star <= 0.34:
        c0, c1, c2 = _AD_MID
        p = 1.0 - math.exp(c0 + c1 * a2_star + c2 * a2_star**2)
    elif a2_star < 0.6:
        c0, c1, c2 = _AD_HIGH
        p = math.exp(c0 + c1 * a2_star + c2 * a2_star**2)
    else:
        c0, c1, c2 = _AD_TAIL
        p = math.exp(c0 + c1 * a2_star + c2 * a2_star**2)
    p = min(max(p, 0.0), 1.0)
    return TestResult(float(a2), p, n, "anderson-darling",
                      notes=f"adjusted statistic {a2_star:.6g}")
