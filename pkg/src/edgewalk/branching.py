"""Critical Galton-Watson transition kernels and chain samplers.

Three kernels, all built from the geometric(mean 1) offspring law
P(X = j) = 2^(-j-1):

* ``plain``              next = sum of i offspring          (absorbing at 0)
* ``immigrant``          next = sum of i+1 offspring
* ``shifted-immigrant``  next = 1 + sum of i offspring

The plain kernel is pi(i, j) = 2^(-i-j) * C(i+j-1, j) for i >= 1 and
delta_0(j) at i = 0; the other two are index shifts of it.  Scalar kernel
values are evaluated exactly (integer binomial over a power of two) for
i + j <= 60 and in log-gamma space beyond; the two regimes agree to ~1e-13
at the crossover.

Chain transitions use the negative-binomial identity: a sum of c independent
geometric(1/2) variables is NegativeBinomial(c, 1/2), which numpy samples in
O(1) regardless of c.  The literal sum-of-geometrics sampler and an
inverse-CDF sampler over the exact rows are kept alongside as cross-checks;
all three must agree in law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import gammaln

KINDS = ("plain", "immigrant", "shifted-immigrant")

_EXACT_LIMIT = 60


def _pi_exact(i: int, j: int) -> float:
    return float(Fraction(math.comb(i + j - 1, j), 2 ** (i + j)))


def _pi(i: int, j: int) -> float:
    if i < 0 or j < 0:
        return 0.0
    if i == 0:
        return 1.0 if j == 0 else 0.0
    if i + j <= _EXACT_LIMIT:
        return _pi_exact(i, j)
    return math.exp(gammaln(i + j) - gammaln(i) - gammaln(j + 1)
                    - (i + j) * math.log(2.0))


def kernel_eval(kind: str, i: int, j: int) -> float:
    """Transition probability kind(i, j)."""
    if kind == "plain":
        return _pi(i, j)
    if kind == "immigrant":
        return _pi(i + 1, j)
    if kind == "shifted-immigrant":
        return _pi(i, j - 1)
    raise ValueError(f"unknown kernel kind {kind!r}")


def kernel_row(kind: str, i: int, j_hi: int) -> np.ndarray:
    """Row kind(i, 0..j_hi) as a float array (vectorized, exact small cases)."""
    if kind == "immigrant":
        return _pi_row(i + 1, j_hi)
    if kind == "shifted-immigrant":
        row = np.zeros(j_hi + 1)
        row[1:] = _pi_row(i, j_hi - 1)
        if i == 0:
            row[:] = 0.0
            if j_hi >= 1:
                row[1] = 1.0
        return row
    if kind == "plain":
        return _pi_row(i, j_hi)
    raise ValueError(f"unknown kernel kind {kind!r}")


def _pi_row(i: int, j_hi: int) -> np.ndarray:
    if i == 0:
        row = np.zeros(j_hi + 1)
        row[0] = 1.0
        return row
    j = np.arange(j_hi + 1)
    with np.errstate(divide="ignore"):
        row = np.exp(gammaln(i + j) - gammaln(i) - gammaln(j + 1)
                     - (i + j) * math.log(2.0))
    exact_hi = min(j_hi, _EXACT_LIMIT - i)
    for jj in range(0, exact_hi + 1):
        row[jj] = _pi_exact(i, jj)
    return row


def row_sum(kind: str, i: int) -> float:
    """Row total with the far tail cut where the pmf is below 1e-30."""
    j_hi = int(i + 60 * math.sqrt(i + 1) + 200)
    return float(kernel_row(kind, i, j_hi).sum())


# ------------------------------------------------------------------ sampling

def _nb_draw(counts: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Sum of ``counts[r]`` geometric(1/2) variables per row, via the
    negative-binomial identity; zero counts contribute zero."""
    out = np.zeros(len(counts), np.int64)
    pos = counts > 0
    if pos.any():
        out[pos] = rng.negative_binomial(counts[pos], 0.5)
    return out


def sample_next(kind: str, states: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One transition for an array of chain states."""
    states = np.asarray(states, np.int64)
    if kind == "plain":
        return _nb_draw(states, rng)
    if kind == "immigrant":
        return _nb_draw(states + 1, rng)
    if kind == "shifted-immigrant":
        return 1 + _nb_draw(states, rng)
    raise ValueError(f"unknown kernel kind {kind!r}")


def sample_sum_of_geometrics(kind: str, i: int, size: int,
                             rng: np.random.Generator) -> np.ndarray:
    """Literal offspring-sum sampler: draws every geometric individually."""
    c = {"plain": i, "immigrant": i + 1, "shifted-immigrant": i}[kind]
    add = 1 if kind == "shifted-immigrant" else 0
    if c == 0:
        return np.full(size, add, np.int64)
    flat = rng.geometric(0.5, size=size * c).astype(np.int64) - 1
    return flat.reshape(size, c).sum(axis=1) + add


def sample_inverse_cdf(kind: str, i: int, size: int,
                       rng: np.random.Generator,
                       j_hi: int | None = None) -> np.ndarray:
    """Inverse-CDF sampler over the exact kernel row (cross-check path)."""
    if j_hi is None:
        j_hi = int(2 * i + 60 * math.sqrt(i + 1) + 200)
    cdf = np.cumsum(kernel_row(kind, i, j_hi))
    u = rng.random(size)
    return np.searchsorted(cdf, u, side="right").astype(np.int64)


# ------------------------------------------------------------------ chains

@dataclass
class ChainTrajectory:
    kind: str
    start: int
    states: list[int]
    tau_h: int | None = None     # first index with state >= h
    omega: int | None = None     # first index with state 0
    censored: bool = False

    @property
    def sigma_h(self) -> int | None:
        # the hitting index of a plain chain goes by this name
        return self.tau_h


STOP_RULES = ("steps", "hit", "extinct", "hit-or-extinct")


def chain_run(kind: str, start: int, stop_rule: str,
              rng: np.random.Generator, *, n_steps: int = 0, h: int = 0,
              budget: int = 10**7) -> ChainTrajectory:
    """Sample one trajectory under the given stopping rule."""
    if kind not in KINDS:
        raise ValueError(f"unknown kernel kind {kind!r}")
    if stop_rule not in STOP_RULES:
        raise ValueError(f"unknown stop rule {stop_rule!r}")
    if stop_rule in ("hit", "hit-or-extinct") and h < 1:
        raise ValueError("hit rules need h >= 1")
    states = [start]
    traj = ChainTrajectory(kind, start, states)

    def note(idx: int, v: int) -> bool:
        done = False
        if v >= h and stop_rule in ("hit", "hit-or-extinct") and traj.tau_h is None:
            traj.tau_h = idx
            done = True
        if v == 0 and traj.omega is None:
            traj.omega = idx
            if stop_rule in ("extinct", "hit-or-extinct"):
                done = True
        return done

    if note(0, start):
        return traj
    one = np.empty(1, np.int64)
    cur = start
    for idx in range(1, budget + 1):
        one[0] = cur
        cur = int(sample_next(kind, one, rng)[0])
        states.append(cur)
        if note(idx, cur):
            return traj
        if stop_rule == "steps" and idx == n_steps:
            return traj
        if kind == "plain" and cur == 0 and stop_rule == "steps":
            states.extend([0] * (n_steps - idx))
            return traj
    traj.censored = True
    return traj


# ------------------------------------------------------------------ exact pmf

@dataclass
class ExactPmf:
    kind: str
    start: int
    steps: int
    masses: np.ndarray = field(repr=False)
    overflow: float = 0.0

    @property
    def low_precision(self) -> bool:
        return self.overflow > 1e-12

    def mean(self) -> float:
        return float(np.dot(np.arange(len(self.masses)), self.masses))

    def second_moment(self) -> float:
        return float(np.dot(np.arange(len(self.masses)) ** 2, self.masses))


def kernel_power(kind: str, start: int, steps: int, cap: int) -> ExactPmf:
    """Exact marginal pmf after ``steps`` transitions on {0..cap}."""
    if start > cap:
        raise ValueError("start beyond cap")
    mat = np.empty((cap + 1, cap + 1))
    for i in range(cap + 1):
        mat[i] = kernel_row(kind, i, cap)
    row_loss = 1.0 - mat.sum(axis=1)
    v = np.zeros(cap + 1)
    v[start] = 1.0
    overflow = 0.0
    for _ in range(steps):
        overflow += float(np.dot(v, row_loss))
        v = v @ mat
    return ExactPmf(kind, start, steps, v, overflow)


def martingale_checks(k: int, n: int, cap: int = 400) -> dict:
    """Exact expectations of the two hitting-time martingales after n steps
    of the immigrant chain from k.

    M_n  = sum_{s<=n} (Z_s - s) - n (Z_n - n)      -> expectation 0
    M'_n = -Z_n^2/4 + n Z_n - n^2/2 + n/4          -> expectation -k^2/4
    """
    means = []
    pmf_n = None
    for s in range(1, n + 1):
        pmf = kernel_power("immigrant", k, s, cap)
        means.append(pmf.mean())
        if s == n:
            pmf_n = pmf
    e_zn = means[-1]
    e_zn2 = pmf_n.second_moment()
    e_m = sum(means[s - 1] - s for s in range(1, n + 1)) - n * (e_zn - n)
    e_mp = -e_zn2 / 4.0 + n * e_zn - n * n / 2.0 + n / 4.0
    return {
        "k": k, "n": n,
        "E_M": e_m, "E_M_expected": 0.0,
        "E_Mprime": e_mp, "E_Mprime_expected": -(k * k) / 4.0,
        "overflow": pmf_n.overflow,
    }


# ------------------------------------------------------------------ windows

def window_integers(h: int, closed: bool = False) -> list[int]:
    """Integers k in the window ((h - 2 sqrt h)/2, (h - sqrt h)/2).

    Comparisons are done in exact integer arithmetic; ``closed`` switches to
    the closed-interval variant.
    """
    out = []
    lo_guess = max(0, (h - 2 * math.isqrt(4 * h)) // 2 - 2)
    hi_guess = h // 2 + 2
    for k in range(lo_guess, hi_guess + 1):
        d = h - 2 * k
        if closed:
            lower_ok = d <= 0 or d * d <= 4 * h
            upper_ok = d >= 0 and d * d >= h
        else:
            lower_ok = d < 0 or d * d < 4 * h
            upper_ok = d > 0 and d * d > h
        if lower_ok and upper_ok:
            out.append(k)
    return out


def window_mid(h: int, closed: bool = False) -> int:
    """Median integer of the window (used for 'mid-window' starts)."""
    ks = window_integers(h, closed)
    if not ks:
        raise ValueError(f"empty window at h={h}")
    return ks[len(ks) // 2]


# ------------------------------------------------------------------ estimators

@dataclass
class HittingEstimate:
    k: int
    h: int
    replicas: int
    tau_mean: float
    tau_se: float
    z_mean: float
    z_se: float
    residual: float          # tau - (Z_tau - k), mean over replicas
    residual_se: float
    censor_rate: float


def hitting_moments(k: int, h: int, replicas: int, rng: np.random.Generator,
                    budget: int = 10**7) -> HittingEstimate:
    """Monte Carlo moments of the immigrant chain's first passage to >= h."""
    if not 0 <= k < h:
        raise ValueError("need 0 <= k < h")
    z = np.full(replicas, k, np.int64)
    tau = np.zeros(replicas, np.int64)
    z_hit = np.zeros(replicas, np.int64)
    active = np.ones(replicas, bool)
    it = 0
    while active.any():
        it += 1
        if it > budget:
            break
        nxt = sample_next("immigrant", z[active], rng)
        z[active] = nxt
        tau[active] += 1
        hit = np.zeros(replicas, bool)
        hit[active] = nxt >= h
        z_hit[hit] = z[hit]
        active &= ~hit
    kept = ~active
    n = int(kept.sum())
    t = tau[kept].astype(float)
    zz = z_hit[kept].astype(float)
    res = t - (zz - k)
    sq = math.sqrt(n)
    return HittingEstimate(
        k=k, h=h, replicas=n,
        tau_mean=float(t.mean()), tau_se=float(t.std(ddof=1)) / sq,
        z_mean=float(zz.mean()), z_se=float(zz.std(ddof=1)) / sq,
        residual=float(res.mean()), residual_se=float(res.std(ddof=1)) / sq,
        censor_rate=float(active.mean()))


def ruin_probability(m: int, h: int, replicas: int,
                     rng: np.random.Generator,
                     budget: int = 10**7) -> tuple[float, float]:
    """P(plain chain from m hits 0 before reaching >= h), with SE."""
    if m == 0:
        return 1.0, 0.0
    if not 0 < m < h:
        raise ValueError("need 0 < m < h")
    y = np.full(replicas, m, np.int64)
    ruined = np.zeros(replicas, bool)
    active = np.ones(replicas, bool)
    it = 0
    while active.any():
        it += 1
        if it > budget:
            break
        nxt = sample_next("plain", y[active], rng)
        y[active] = nxt
        now_ruined = np.zeros(replicas, bool)
        now_ruined[active] = nxt == 0
        now_hit = np.zeros(replicas, bool)
        now_hit[active] = nxt >= h
        ruined |= now_ruined
        active &= ~(now_ruined | now_hit)
    p = float(ruined.mean())
    se = math.sqrt(p * (1 - p) / replicas)
    return p, se


def lemma41_statistic(k: int, h: int, replicas: int,
                      rng: np.random.Generator,
                      budget: int = 10**7) -> tuple[float, float]:
    """Mean of sum_{n=1}^{tau} (h/2 - Z_n)/(h/2) for the immigrant chain from
    k, stopped when Z_n >= (h-1)/2.  Returns (estimate, SE)."""
    if h <= 4:
        raise ValueError("need h > 4")
    thresh = (h - 1) / 2.0
    half = h / 2.0
    z = np.full(replicas, k, np.int64)
    acc = np.zeros(replicas)
    active = z < thresh
    it = 0
    while active.any():
        it += 1
        if it > budget:
            break
        nxt = sample_next("immigrant", z[active], rng)
        z[active] = nxt
        acc[active] += (half - nxt) / half
        still = np.zeros(replicas, bool)
        still[active] = nxt < thresh
        active = still
    return float(acc.mean()), float(acc.std(ddof=1)) / math.sqrt(replicas)
