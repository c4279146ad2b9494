"""Goodness-of-fit helpers: cell pooling, chi-square tests, TV distance."""

from __future__ import annotations

import numpy as np
from scipy import stats


def pool_cells(expected: np.ndarray, min_expected: float = 5.0) -> list[np.ndarray]:
    """Group consecutive cells so every group's expected mass is >= min.

    Pools from the left; a trailing light group is merged into its
    predecessor.  Returns index arrays, one per group.
    """
    groups: list[list[int]] = []
    cur: list[int] = []
    acc = 0.0
    for i, e in enumerate(expected):
        cur.append(i)
        acc += float(e)
        if acc >= min_expected:
            groups.append(cur)
            cur = []
            acc = 0.0
    if cur:
        if groups:
            groups[-1].extend(cur)
        else:
            groups.append(cur)
    return [np.array(g) for g in groups]


def chisq_onesample(counts: np.ndarray, probs: np.ndarray,
                    min_expected: float = 5.0) -> tuple[float, float, int]:
    """Chi-square of observed counts against an exact pmf.

    Returns (statistic, p_value, dof).  Cells are pooled to the expected-count
    floor; a single surviving cell gives a degenerate exact comparison
    (p = 1 when the counts match the cell exactly, else 0).
    """
    counts = np.asarray(counts, float)
    probs = np.asarray(probs, float)
    n = counts.sum()
    expected = probs * n
    groups = pool_cells(expected, min_expected)
    obs = np.array([counts[g].sum() for g in groups])
    exp = np.array([expected[g].sum() for g in groups])
    # renormalize the residual mass into the last pooled cell
    missing = n - exp.sum()
    exp[-1] += missing
    if len(groups) < 2:
        return 0.0, 1.0 if abs(obs[0] - exp[0]) < 0.5 else 0.0, 0
    stat = float(((obs - exp) ** 2 / exp).sum())
    dof = len(groups) - 1
    return stat, float(stats.chi2.sf(stat, dof)), dof


def chisq_twosample(counts_a: np.ndarray, counts_b: np.ndarray,
                    min_expected: float = 5.0) -> tuple[float, float, int]:
    """Two-sample chi-square on a pair of histograms over the same support.

    Returns (statistic, p_value, dof); degenerate tables (one row empty or a
    single pooled column) compare supports exactly as in the one-sample case.
    """
    a = np.asarray(counts_a, float)
    b = np.asarray(counts_b, float)
    if a.sum() == 0 or b.sum() == 0:
        raise ValueError("empty histogram")
    # pool so that the smaller sample's expected count clears the floor
    groups = pool_cells((a + b) * min(a.sum(), b.sum()) / (a.sum() + b.sum()),
                        min_expected)
    oa = np.array([a[g].sum() for g in groups])
    ob = np.array([b[g].sum() for g in groups])
    if len(groups) < 2:
        same = abs(oa[0] / a.sum() - ob[0] / b.sum()) < 1e-12
        return 0.0, 1.0 if same else 0.0, 0
    table = np.vstack([oa, ob])
    stat, p, dof, _ = stats.chi2_contingency(table)
    return float(stat), float(p), int(dof)


def tv_distance(p: np.ndarray, q: np.ndarray) -> float:
    """Total variation distance between two pmfs on the same support."""
    p = np.asarray(p, float)
    q = np.asarray(q, float)
    return 0.5 * float(np.abs(p - q).sum())


def empirical_pmf(values: np.ndarray, support_hi: int | None = None) -> np.ndarray:
    """Histogram of nonnegative integers normalized to a pmf."""
    values = np.asarray(values, np.int64)
    hi = int(values.max()) if support_hi is None else support_hi
    counts = np.bincount(values, minlength=hi + 1)[:hi + 1].astype(float)
    out = counts / len(values)
    return out
