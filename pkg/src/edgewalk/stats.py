"""Deterministic replica orchestration, estimators, and regression fits.

Replica r of an experiment always uses stream index r of the master seed, so
any subset of replicas can be rerun in isolation and reproduces its rows
bit-for-bit.  Aggregation uses compensated summation (math.fsum), making the
results independent of merge order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .rng import StepGenerator


@dataclass
class ReplicaConfig:
    experiment: str
    master_seed: int
    replicas: int
    params: dict = field(default_factory=dict)

    @classmethod
    def from_payload(cls, d: dict) -> "ReplicaConfig":
        return cls(d["experiment"], d["master_seed"], d["replicas"],
                   dict(d.get("params", {})))


@dataclass
class EstimateRow:
    statistic: str
    params: dict
    estimate: float
    se: float
    replicas: int
    seed: int

    def to_payload(self) -> dict:
        return {"statistic": self.statistic, "params": self.params,
                "estimate": self.estimate, "se": self.se,
                "replicas": self.replicas, "seed": self.seed}


def mean_se(values) -> tuple[float, float]:
    """Compensated mean and its standard error (needs >= 2 values)."""
    vals = [float(v) for v in values]
    n = len(vals)
    if n < 2:
        raise ValueError("need at least 2 replicas for a standard error")
    m = math.fsum(vals) / n
    var = math.fsum((v - m) ** 2 for v in vals) / (n - 1)
    return m, math.sqrt(var / n)


def row(statistic: str, params: dict, values, seed: int) -> EstimateRow:
    est, se = mean_se(values)
    return EstimateRow(statistic, params, est, se, len(list(values)), seed)


# ---------------------------------------------------------------- regression

FIT_MODELS = ("linear-log", "log-log")   # y = a + b log x ; log y = a + b log x


@dataclass
class FitResult:
    model: str
    slope: float
    intercept: float
    correlation: float
    residuals: list[float]

    def to_payload(self) -> dict:
        return {"model": self.model, "slope": self.slope,
                "intercept": self.intercept,
                "correlation": self.correlation,
                "residuals": self.residuals}


def fit(model: str, points) -> FitResult:
    """Least-squares fit of one of the two log models.

    Points are (x, y) pairs with x > 0 (and y > 0 for log-log).  Exact on
    model-generated data up to float rounding.
    """
    if model not in FIT_MODELS:
        raise ValueError(f"unknown model {model!r}")
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 3:
        raise ValueError("need at least 3 points")
    if any(x <= 0 for x, _ in pts):
        raise ValueError("abscissae must be positive")
    u = np.log([x for x, _ in pts])
    if np.ptp(u) == 0:
        raise ValueError("degenerate abscissae")
    if model == "log-log":
        if any(y <= 0 for _, y in pts):
            raise ValueError("log-log needs positive ordinates")
        v = np.log([y for _, y in pts])
    else:
        v = np.array([y for _, y in pts])
    ub = u.mean()
    vb = v.mean()
    suv = float(((u - ub) * (v - vb)).sum())
    suu = float(((u - ub) ** 2).sum())
    svv = float(((v - vb) ** 2).sum())
    slope = suv / suu
    intercept = vb - slope * ub
    corr = suv / math.sqrt(suu * svv) if svv > 0 else 1.0
    resid = (v - (intercept + slope * u)).tolist()
    return FitResult(model, slope, intercept, corr, resid)


# ---------------------------------------------------------------- transience

@dataclass
class TransienceProfile:
    gamma: float
    n_grid: list[int]
    median_utilde: list[float]     # of Utilde(n) (log n)^gamma / sqrt(n)
    q10_utilde: list[float]
    median_u: list[float]          # same for U(n)
    q10_u: list[float]
    prop24_all_ok: bool
    replicas: int
    master_seed: int

    def to_payload(self) -> dict:
        return {"gamma": self.gamma, "n_grid": self.n_grid,
                "median_utilde": self.median_utilde,
                "q10_utilde": self.q10_utilde,
                "median_u": self.median_u, "q10_u": self.q10_u,
                "prop24_all_ok": self.prop24_all_ok,
                "replicas": self.replicas, "master_seed": self.master_seed}


def transience_samples(master_seed: int, replicas: int,
                       n_grid: list[int], stream0: int = 0):
    """Per-replica Utilde(n) and U(n) at the probe times, plus the
    favorite-edge/favorite-downcross-site coupling flag."""
    from . import _fast
    n_grid = sorted(n_grid)
    probes = np.array(n_grid, np.int64)
    ut = np.empty((replicas, len(n_grid)))
    uu = np.empty((replicas, len(n_grid)))
    all_ok = True
    for r in range(replicas):
        gen = StepGenerator(master_seed, stream0 + r)
        span = max(64, int(6 * math.sqrt(n_grid[-1])) + 64)
        while True:
            res = _fast.probe_run(gen.base, probes, span)
            if res[0] == _fast.STATUS_OK:
                break
            span *= 2
        _, _, _, _, utld, _, _, umin, p24 = res
        ut[r] = utld
        uu[r] = umin
        all_ok &= bool((p24 == 1).all())
    return n_grid, ut, uu, all_ok


def transience_profile(master_seed: int, replicas: int, gamma: float = 12.0,
                       n_grid: list[int] | None = None,
                       stream0: int = 0) -> TransienceProfile:
    """Across-replica quantiles of the normalized least favorite-edge and
    favorite-downcross-site distances from the origin."""
    if n_grid is None:
        n_grid = [1 << p for p in range(14, 24)]
    n_grid, ut, uu, all_ok = transience_samples(master_seed, replicas,
                                                n_grid, stream0)
    norm = np.array([math.log(n) ** gamma / math.sqrt(n) for n in n_grid])
    nut = ut * norm
    nuu = uu * norm
    return TransienceProfile(
        gamma=gamma, n_grid=list(map(int, n_grid)),
        median_utilde=np.median(nut, axis=0).tolist(),
        q10_utilde=np.quantile(nut, 0.1, axis=0).tolist(),
        median_u=np.median(nuu, axis=0).tolist(),
        q10_u=np.quantile(nuu, 0.1, axis=0).tolist(),
        prop24_all_ok=all_ok, replicas=replicas, master_seed=master_seed)


# ---------------------------------------------------------------- experiments

EXPERIMENTS = ("count-events", "hitting", "lemma41", "rayknight",
               "embedding", "transience")


def run_replicas(config: ReplicaConfig) -> list[EstimateRow]:
    """Run a named experiment; deterministic given the config."""
    if config.experiment not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {config.experiment!r}; "
                         f"choose from {EXPERIMENTS}")
    return _DISPATCH[config.experiment](config)


def _run_count_events(cfg: ReplicaConfig) -> list[EstimateRow]:
    from . import events
    h_grid = cfg.params.get("H_grid", [cfg.params.get("H", 100)])
    out = []
    for hh in h_grid:
        reports = events.replicate_reports(cfg.master_seed, cfg.replicas, hh)
        n = [r.n_events(hh) for r in reports]
        nt = [r.n_tilde_events(hh) for r in reports]
        thr = math.log(math.log(hh))
        out.append(row("E[N_H]", {"H": hh}, n, cfg.master_seed))
        out.append(row("E[Ntilde_H]", {"H": hh}, nt, cfg.master_seed))
        out.append(row("E[Ntilde_H^2]", {"H": hh}, [v * v for v in nt],
                       cfg.master_seed))
        out.append(row("P(N_H>loglogH)", {"H": hh},
                       [1.0 if v > thr else 0.0 for v in n], cfg.master_seed))
    return out


def _run_hitting(cfg: ReplicaConfig) -> list[EstimateRow]:
    from .branching import hitting_moments
    k = cfg.params.get("k", 0)
    h_grid = cfg.params.get("h_grid", [cfg.params.get("h", 100)])
    rng = StepGenerator(cfg.master_seed, 0).generator(tag=3)
    out = []
    for h in h_grid:
        est = hitting_moments(k, h, cfg.replicas, rng)
        out.append(EstimateRow("E[tau_h]", {"k": k, "h": h}, est.tau_mean,
                               est.tau_se, est.replicas, cfg.master_seed))
        out.append(EstimateRow("E[Z_tau_h]", {"k": k, "h": h}, est.z_mean,
                               est.z_se, est.replicas, cfg.master_seed))
        out.append(EstimateRow("residual", {"k": k, "h": h}, est.residual,
                               est.residual_se, est.replicas, cfg.master_seed))
    return out


def _run_lemma41(cfg: ReplicaConfig) -> list[EstimateRow]:
    from .branching import lemma41_statistic, window_mid
    h_grid = cfg.params.get("h_grid", [cfg.params.get("h", 400)])
    rng = StepGenerator(cfg.master_seed, 0).generator(tag=4)
    out = []
    for h in h_grid:
        k = cfg.params.get("k", window_mid(h))
        est, se = lemma41_statistic(k, h, cfg.replicas, rng)
        out.append(EstimateRow("lemma41_sum", {"k": k, "h": h}, est, se,
                               cfg.replicas, cfg.master_seed))
    return out


def _run_rayknight(cfg: ReplicaConfig) -> list[EstimateRow]:
    from .rayknight import sample_patched_profiles, walk_profiles
    x = cfg.params.get("x", 3)
    k = cfg.params.get("k", 0)
    window = tuple(cfg.params.get("window", (0, 0)))
    cap = cfg.params.get("cap", 10**8)
    stops, wprof = walk_profiles(x, k, window, cfg.replicas,
                                 cfg.master_seed, cap=cap)
    keep = stops >= 0
    rng = StepGenerator(cfg.master_seed, 2**32).generator(tag=1)
    cprof = sample_patched_profiles(x - 1, k, window, cfg.replicas, rng)
    out = [row("censor_rate", {"x": x, "k": k},
               [0.0 if s >= 0 else 1.0 for s in stops], cfg.master_seed)]
    for col in range(wprof.shape[1]):
        w = wprof[keep, col].astype(float)
        c = cprof[:, col].astype(float)
        mw, sw = mean_se(w)
        mc, sc = mean_se(c)
        out.append(EstimateRow(
            "mean_diff", {"x": x, "k": k, "y": window[0] + col},
            mw - mc, math.hypot(sw, sc), int(keep.sum()), cfg.master_seed))
    return out


def _run_embedding(cfg: ReplicaConfig) -> list[EstimateRow]:
    from .embedding import block_distribution
    rep = block_distribution(cfg.master_seed, cfg.replicas,
                             cap=cfg.params.get("cap", 10**7))
    return [
        EstimateRow("p(0,1)", {}, rep.p01, rep.p01_se, rep.replicas,
                    cfg.master_seed),
        EstimateRow("p(1,0)", {}, rep.p10, rep.p10_se, rep.replicas,
                    cfg.master_seed),
        EstimateRow("E[xi_D(1,alpha1)]", {}, rep.mean_m0, rep.mean_m0_se,
                    rep.replicas, cfg.master_seed),
    ]


def _run_transience(cfg: ReplicaConfig) -> list[EstimateRow]:
    gamma = cfg.params.get("gamma", 12.0)
    n_grid = cfg.params.get("n_grid") or [1 << p for p in range(14, 24)]
    n_grid, ut, uu, _ = transience_samples(cfg.master_seed, cfg.replicas,
                                           n_grid)
    boot = StepGenerator(cfg.master_seed, 2**33).generator(tag=9)
    rows = []
    for name, mat in (("median_norm_utilde", ut), ("median_norm_u", uu)):
        for i, n in enumerate(n_grid):
            vals = mat[:, i] * (math.log(n) ** gamma / math.sqrt(n))
            med = float(np.median(vals))
            idx = boot.integers(0, len(vals), size=(200, len(vals)))
            se = float(np.median(vals[idx], axis=1).std(ddof=1))
            rows.append(EstimateRow(name, {"n": int(n), "gamma": gamma},
                                    med, se, cfg.replicas, cfg.master_seed))
    return rows


_DISPATCH = {
    "count-events": _run_count_events,
    "hitting": _run_hitting,
    "lemma41": _run_lemma41,
    "rayknight": _run_rayknight,
    "embedding": _run_embedding,
    "transience": _run_transience,
}
