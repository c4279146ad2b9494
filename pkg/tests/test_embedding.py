import math

import numpy as np
import pytest

from edgewalk import embedding as emb
from edgewalk import gof, walk
from edgewalk.rng import StepGenerator


def test_simulate_embedding_validation():
    g = StepGenerator(1, 0)
    with pytest.raises(ValueError):
        emb.simulate_embedding(g, 4, 100)
    with pytest.raises(ValueError):
        emb.simulate_embedding(g, 16, 100, probes=[50])   # last != n_coarse


def test_embedded_walk_is_fair_unit_walk():
    trace = emb.simulate_embedding(StepGenerator(21, 0), 16, 10_000)
    steps = trace.emb_steps.astype(int)
    assert set(np.unique(steps)) <= {-1, 1}
    n = len(steps)
    assert abs(steps.mean()) <= 3 / math.sqrt(n)
    counts = np.bincount(((steps + 1) // 2).astype(int), minlength=2)
    _, p, _ = gof.chisq_onesample(counts, np.array([0.5, 0.5]))
    assert p > 1e-3


def test_exit_durations_mean_one():
    # E(tau_i - tau_{i-1}) = 1 holds exactly for the fine-walk proxy
    trace = emb.simulate_embedding(StepGenerator(22, 1), 64, 2000)
    se = math.sqrt(trace.sigma2() / trace.n_coarse)
    assert abs(trace.tau1_mean() - 1.0) <= 3 * se
    # Var(tau_1) tends to 2/3 for the Wiener exit; allow a wide desk band
    assert 0.3 <= trace.sigma2() <= 1.2


def test_eta_halving_at_origin():
    trace = emb.simulate_embedding(StepGenerator(23, 2), 64, 10_000)
    for x in range(-3, 4):
        eta = trace.eta_hat(x)
        eta_r = trace.eta_r_hat(x)
        floor = 5.0 / trace.m   # resolution floor for rare levels
        assert abs(eta_r - eta / 2) <= 0.10 * eta + floor, (x, eta, eta_r)


def test_discrepancy_zero_before_leaving_unit_interval():
    # while the embedded walk has only made one step, xi_D is 0 or 1 and the
    # occupation estimate is within resolution error of it
    trace = emb.simulate_embedding(StepGenerator(24, 3), 32, 1,
                                   probes=[1])
    assert trace.d_tau[0] >= 0
    assert trace.d_tau[0] <= 1.5


def test_discrepancy_curve_shape_and_slope():
    probes = [100, 1000, 10_000]
    trace = emb.simulate_embedding(StepGenerator(25, 4), 32, probes[-1],
                                   probes=probes)
    curve = emb.discrepancy_curve(trace)
    assert curve.n_grid == probes
    assert all(d >= 0 for d in curve.d_tau)
    assert curve.slope_tau.model == "log-log"
    # growth is clearly sublinear even at desk scale
    assert curve.slope_tau.slope <= 0.6


def test_discrepancy_requires_probed_points():
    trace = emb.simulate_embedding(StepGenerator(26, 5), 16, 100,
                                   probes=[100])
    with pytest.raises(ValueError):
        emb.discrepancy_curve(trace, [50])


def test_embedded_downcross_counts_match_ledger():
    trace = emb.simulate_embedding(StepGenerator(27, 6), 16, 3000)
    led = walk.CrossingLedger()
    for s in trace.emb_steps:
        led.advance(int(s))
    down = trace.embedded_downcross_counts(3000)
    for site, cnt in down.items():
        assert led.xi_down(site) == cnt


# ------------------------------------------------------------- neighbor gaps

def test_neighbor_gap_curve_matches_bruteforce():
    gen = StepGenerator(28, 7)
    grid = [10, 100, 1000]
    curve = emb.neighbor_gap_curve(gen, grid)
    steps = gen.steps(grid[-1]).astype(int)
    for i, n in enumerate(grid):
        cc = walk.crossing_counts(steps[:n])
        down = cc["down"]
        gaps = np.abs(np.diff(np.concatenate([[0], down, [0]])))
        assert curve.sup_gap[i] == gaps.max()
        lo = cc["lo"]
        d1 = down[1 - lo] if 0 <= 1 - lo < len(down) else 0
        d0 = down[0 - lo] if 0 <= 0 - lo < len(down) else 0
        assert curve.gap01[i] == abs(int(d1) - int(d0))
        assert curve.max_down[i] == down.max()


def test_gap_at_one_step():
    curve = emb.neighbor_gap_curve(StepGenerator(29, 8), [1])
    assert curve.sup_gap[0] <= 1


def test_neighbor_gap_slope_sublinear():
    slopes = []
    for s in range(5):
        curve = emb.neighbor_gap_curve(StepGenerator(30, s),
                                       [10**3, 10**4, 10**5])
        slopes.append(curve.slope().slope)
    assert np.median(slopes) <= 0.5


# ------------------------------------------------------------- blocks

def test_block_distribution_exact_values():
    rep = emb.block_distribution(31, 40_000)
    assert rep.valid
    assert abs(rep.p01 - 0.5) <= 3 * rep.p01_se
    assert abs(rep.p10 - 0.5) <= 3 * rep.p10_se
    assert abs(rep.mean_m0 - 1.0) <= 3 * rep.mean_m0_se
    # pmf: P(0) = 1/2, P(k) = 2^-(k+1)
    emp = rep.pmf(20)
    assert gof.tv_distance(emp, rep.exact_pmf(20)) <= 0.01


def test_block_distribution_payload():
    rep = emb.block_distribution(32, 2000)
    payload = rep.to_payload()
    assert payload["replicas"] == 2000
    assert isinstance(payload["valid"], bool)


# ------------------------------------------------------------- Kesten proxy

def test_kesten_band_small():
    n = 10**5
    vals = []
    for s in range(10):
        xi_star = walk.max_site_local_time(StepGenerator(33, s), n)
        vals.append(xi_star / math.sqrt(2 * n * math.log(math.log(n))))
    assert all(0.2 <= v <= 1.5 for v in vals)
