"""Desk-scale realization of the walk-in-Wiener embedding.

A fine symmetric walk with spatial step 1/m and time step 1/m² stands in for
the Wiener path.  Exit times tau_k (first moves of ±1 relative to the
previous exit value) embed a unit walk S_k = W(tau_k); occupation counts of
the fine path estimate the one-side local time as occ(level m*x)/(2m).

Two discrepancy clocks are measured for sup_x |xi_D(x, n) - eta_R-estimate|:
at the coupled times tau_n (the comparison the embedding construction makes
natural) and at the Wiener clock n (the invariance-principle statement);
both are reported, with the coupled one as the headline curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _fast
from .rng import StepGenerator, master_mixed
from .stats import FitResult, fit


@dataclass
class EmbeddingTrace:
    m: int
    n_coarse: int
    probes: list[int]
    emb_steps: np.ndarray = field(repr=False)   # ±1, length n_coarse
    tau_fine: np.ndarray = field(repr=False)    # fine-step index of exit k
    d_tau: np.ndarray = field(repr=False)       # per probe, coupled clock
    d_time: np.ndarray = field(repr=False)      # per probe, Wiener clock
    occ_center: np.ndarray = field(repr=False)  # final occ, levels -8m-1..8m+1
    fine_lo: int = 0
    fine_hi: int = 0

    def tau1_mean(self) -> float:
        """Mean exit duration in Wiener time units (expected value 1)."""
        inc = np.diff(np.concatenate([[0], self.tau_fine]))
        return float(inc.mean()) / self.m**2

    def sigma2(self) -> float:
        """Sample variance of the exit durations in Wiener time units."""
        inc = np.diff(np.concatenate([[0], self.tau_fine])) / self.m**2
        return float(inc.var(ddof=1))

    def _occ(self, level: int) -> int:
        i = level + 8 * self.m + 1
        if 0 <= i < len(self.occ_center):
            return int(self.occ_center[i])
        raise ValueError(f"level {level} outside the retained center window")

    def eta_r_hat(self, x: int, eps: float = 0.25) -> float:
        """One-side local time estimate at the final time: time spent in
        [x, x+eps) over 2*eps."""
        levels = range(self.m * x, self.m * x + int(self.m * eps))
        t = sum(self._occ(l) for l in levels) / self.m**2
        return t / (2 * eps)

    def eta_hat(self, x: int, eps: float = 0.25) -> float:
        """Two-side local time estimate: time in (x-eps, x+eps) over 2*eps."""
        levels = range(self.m * x - int(self.m * eps) + 1,
                       self.m * x + int(self.m * eps))
        t = sum(self._occ(l) for l in levels) / self.m**2
        return t / (2 * eps)

    def embedded_downcross_counts(self, n: int) -> dict[int, int]:
        """xi_D of the embedded walk after its first n steps."""
        pos = np.concatenate([[0], np.cumsum(self.emb_steps[:n], dtype=np.int64)])
        down = {}
        for site in pos[1:][self.emb_steps[:n] == -1]:
            down[int(site)] = down.get(int(site), 0) + 1
        return down


def simulate_embedding(gen: StepGenerator, m: int, n_coarse: int,
                       probes: list[int] | None = None) -> EmbeddingTrace:
    """Run the fine walk until the n_coarse-th exit (and the matching Wiener
    clock), recording discrepancies at the given coarse probe times."""
    if not 8 <= m <= 256:
        raise ValueError("m must be in [8, 256]")
    if n_coarse < 1:
        raise ValueError("n_coarse must be >= 1")
    if probes is None:
        probes = [n_coarse]
    probes = sorted(set(int(p) for p in probes))
    if probes[-1] != n_coarse:
        raise ValueError("last probe must equal n_coarse")
    if probes[0] < 1:
        raise ValueError("probes must be >= 1")
    parr = np.array(probes, np.int64)
    fine_span = int(6 * m * math.sqrt(n_coarse)) + 16 * m
    while True:
        res = _fast.embed_run(gen.base, m, parr, fine_span)
        if res[0] == _fast.STATUS_OK:
            break
        fine_span *= 2
    _, emb_steps, tau_fine, d_tau, d_time, occ_center, flo, fhi = res
    return EmbeddingTrace(m=m, n_coarse=n_coarse, probes=probes,
                          emb_steps=emb_steps, tau_fine=tau_fine,
                          d_tau=d_tau, d_time=d_time, occ_center=occ_center,
                          fine_lo=int(flo), fine_hi=int(fhi))


@dataclass
class DiscrepancyCurve:
    n_grid: list[int]
    d_tau: list[float]
    d_time: list[float]
    slope_tau: FitResult
    slope_time: FitResult

    def to_payload(self) -> dict:
        return {"n_grid": self.n_grid, "d_tau": self.d_tau,
                "d_time": self.d_time,
                "slope_tau": self.slope_tau.to_payload(),
                "slope_time": self.slope_time.to_payload()}


def discrepancy_curve(trace: EmbeddingTrace,
                      n_grid: list[int] | None = None) -> DiscrepancyCurve:
    """Log-log slope fits of the two discrepancy clocks over probe times."""
    if n_grid is None:
        n_grid = trace.probes
    idx = []
    for n in n_grid:
        if n not in trace.probes:
            raise ValueError(f"{n} was not probed during the simulation")
        idx.append(trace.probes.index(n))
    d_tau = [max(float(trace.d_tau[i]), 1e-9) for i in idx]
    d_time = [max(float(trace.d_time[i]), 1e-9) for i in idx]
    return DiscrepancyCurve(
        n_grid=list(n_grid), d_tau=d_tau, d_time=d_time,
        slope_tau=fit("log-log", list(zip(n_grid, d_tau))),
        slope_time=fit("log-log", list(zip(n_grid, d_time))))


@dataclass
class NeighborGapCurve:
    n_grid: list[int]
    sup_gap: list[int]          # sup_x |xi_D(x+1,n) - xi_D(x,n)|
    gap01: list[int]            # |xi_D(1,n) - xi_D(0,n)|
    max_down: list[int]         # xi_D*(n)
    max_visits: list[int]       # xi*(n)

    def slope(self) -> FitResult:
        pts = [(n, max(g, 1e-9)) for n, g in zip(self.n_grid, self.sup_gap)]
        return fit("log-log", pts)

    def to_payload(self) -> dict:
        return {"n_grid": self.n_grid, "sup_gap": self.sup_gap,
                "gap01": self.gap01, "max_down": self.max_down,
                "max_visits": self.max_visits}


def neighbor_gap_curve(gen: StepGenerator,
                       n_grid: list[int]) -> NeighborGapCurve:
    """Plain-walk neighbor gaps of the downcrossing counts at probe times."""
    n_grid = sorted(set(int(n) for n in n_grid))
    probes = np.array(n_grid, np.int64)
    span = max(64, int(6 * math.sqrt(n_grid[-1])) + 64)
    while True:
        res = _fast.neighbor_gap_run(gen.base, probes, span)
        if res[0] == _fast.STATUS_OK:
            break
        span *= 2
    _, sup, gap01, maxd, maxv = res
    return NeighborGapCurve(
        n_grid=n_grid, sup_gap=[int(v) for v in sup],
        gap01=[int(v) for v in gap01], max_down=[int(v) for v in maxd],
        max_visits=[int(v) for v in maxv])


@dataclass
class BlockReport:
    """Downcrossing-block statistics at the origin.

    m0_counts histograms xi_D(1, alpha_1), the number of downcrossings to 1
    before the first 1 -> 0 downcrossing; its law is P(0) = 1/2 and
    P(k) = 2^-(k+1) for k >= 1.
    """

    replicas: int
    m0_counts: np.ndarray = field(repr=False)
    p01: float = 0.0
    p01_se: float = 0.0
    p10: float = 0.0
    p10_se: float = 0.0
    mean_m0: float = 0.0
    mean_m0_se: float = 0.0
    censor_rate: float = 0.0
    valid: bool = True

    def pmf(self, hi: int) -> np.ndarray:
        c = self.m0_counts[:hi + 1].astype(float)
        return c / self.m0_counts.sum()

    @staticmethod
    def exact_pmf(hi: int) -> np.ndarray:
        p = 0.5 ** (np.arange(hi + 1) + 1)
        p[0] = 0.5
        return p

    def to_payload(self) -> dict:
        return {"replicas": self.replicas,
                "m0_counts": [int(c) for c in self.m0_counts],
                "p01": self.p01, "p01_se": self.p01_se,
                "p10": self.p10, "p10_se": self.p10_se,
                "mean_m0": self.mean_m0, "mean_m0_se": self.mean_m0_se,
                "censor_rate": self.censor_rate, "valid": self.valid}


def block_distribution(master_seed: int, replicas: int, cap: int = 10**7,
                       stream0: int = 0) -> BlockReport:
    """Monte Carlo block statistics; censoring above 1% flags the report."""
    if replicas < 2:
        raise ValueError("need >= 2 replicas")
    mm = master_mixed(master_seed)
    m0, c0 = _fast.block_batch(mm, stream0, replicas, 0, cap)
    m1, c1 = _fast.block_batch(mm, stream0 + replicas, replicas, 1, cap)
    keep0 = c0 == 0
    keep1 = c1 == 0
    censor = 1.0 - 0.5 * (float(keep0.mean()) + float(keep1.mean()))
    v0 = m0[keep0]
    v1 = m1[keep1]
    n0 = len(v0)
    n1 = len(v1)
    p01 = float((v0 > 0).mean())
    p10 = float((v1 > 0).mean())
    mean_m0 = float(v0.mean())
    return BlockReport(
        replicas=replicas,
        m0_counts=np.bincount(v0),
        p01=p01, p01_se=math.sqrt(p01 * (1 - p01) / n0),
        p10=p10, p10_se=math.sqrt(p10 * (1 - p10) / n1),
        mean_m0=mean_m0,
        mean_m0_se=float(v0.std(ddof=1)) / math.sqrt(n0),
        censor_rate=censor, valid=censor <= 0.01)
