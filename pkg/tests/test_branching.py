import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats as sps

from edgewalk import branching as br
from edgewalk import gof
from edgewalk.rng import StepGenerator


def rng(tag=0):
    return StepGenerator(909, 0).generator(tag)


# ------------------------------------------------------------- kernel values

def test_kernel_point_values():
    assert br.kernel_eval("plain", 1, 0) == 0.5
    assert br.kernel_eval("plain", 1, 1) == 0.25
    assert br.kernel_eval("plain", 0, 0) == 1.0
    assert br.kernel_eval("plain", 0, 5) == 0.0
    assert br.kernel_eval("immigrant", 0, 0) == 0.5
    assert br.kernel_eval("shifted-immigrant", 1, 1) == 0.5
    assert br.kernel_eval("shifted-immigrant", 1, 0) == 0.0


def test_kernel_shift_identities():
    for i in range(0, 12):
        for j in range(0, 12):
            assert br.kernel_eval("immigrant", i, j) == br.kernel_eval("plain", i + 1, j)
            assert br.kernel_eval("shifted-immigrant", i, j) == br.kernel_eval("plain", i, j - 1)


def test_kernel_matches_negative_binomial():
    # independent check: the plain row at i is NB(i, 1/2) on failures
    # (both sides approximate in the far tail; 5e-12 relative covers it)
    for i in (1, 2, 7, 40, 130):
        j = np.arange(0, 4 * i + 50)
        mine = br.kernel_row("plain", i, int(j[-1]))
        ref = sps.nbinom.pmf(j, i, 0.5)
        assert np.allclose(mine, ref, rtol=5e-12, atol=1e-300)


def test_exact_log_crossover_agreement():
    for i in (3, 17, 30):
        for j in range(max(0, br._EXACT_LIMIT - i - 3), br._EXACT_LIMIT - i + 1):
            exact = br._pi_exact(i, j)
            logv = math.exp(
                sps.nbinom.logpmf(j, i, 0.5))
            assert abs(exact - logv) <= 1e-13 * exact


def test_row_sums_unit():
    for kind in br.KINDS:
        for i in (0, 1, 2, 10, 50, 200):
            assert abs(br.row_sum(kind, i) - 1.0) <= 1e-12


def test_monotonicity_in_start_state_exact():
    # adjacent exact comparisons; transitivity covers all i1 < i2 pairs
    for i in range(1, 300):
        for j in range(0, i):
            # pi(i,j) > pi(i+1,j)  <=>  2*C(i+j-1,j) > C(i+j,j)
            assert 2 * math.comb(i + j - 1, j) > math.comb(i + j, j)


@pytest.mark.parametrize("h", [100, 1000])
def test_lemma31_band(h):
    # uniform constants on the +-10 sqrt(h) window: the corners sit ~e^-50
    # below the diagonal, so the lower constant is tiny but still uniform
    s = math.sqrt(h)
    lo = max(int(math.floor((h - 10 * s) / 2)) + 1, 1)
    hi = int(math.ceil((h + 10 * s) / 2)) - 1
    vals = []
    for i in range(lo, hi + 1):
        row = br.kernel_row("plain", i, hi)
        vals.append(row[lo:hi + 1])
    grid = np.array(vals) * s
    assert grid.min() >= 1e-30
    assert grid.max() <= 1e2

    # on the +-2 sqrt(h) sub-window, where the row evaluations the bound
    # feeds actually live, the practical band holds
    lo2 = int(math.floor((h - 2 * s) / 2)) + 1
    hi2 = int(math.ceil((h + 2 * s) / 2)) - 1
    sub = grid[lo2 - lo:hi2 - lo + 1, lo2 - lo:hi2 - lo + 1]
    assert sub.min() >= 1e-2
    assert sub.max() <= 1e2

    diag = np.array([br.kernel_eval("plain", i, h - i) for i in range(1, h)])
    assert s * diag.max() <= 0.5


# ------------------------------------------------------------- samplers

def test_plain_absorbing_sample():
    out = br.sample_next("plain", np.zeros(100, np.int64), rng())
    assert (out == 0).all()


def test_shifted_immigrant_always_positive():
    for i in (0, 1, 5):
        out = br.sample_sum_of_geometrics("shifted-immigrant", i, 2000, rng(i))
        assert (out >= 1).all()


@pytest.mark.parametrize("kind", br.KINDS)
@pytest.mark.parametrize("i", [1, 5])
def test_all_samplers_match_exact_row(kind, i):
    reps = 200_000
    j_hi = 200
    probs = br.kernel_row(kind, i, j_hi)
    for tag, draw in enumerate((
            lambda: br.sample_sum_of_geometrics(kind, i, reps, rng(tag)),
            lambda: br.sample_next(kind, np.full(reps, i, np.int64), rng(tag + 8)),
            lambda: br.sample_inverse_cdf(kind, i, reps, rng(tag + 16)))):
        vals = draw()
        counts = np.bincount(vals, minlength=j_hi + 1)[:j_hi + 1]
        _, p, _ = gof.chisq_onesample(counts, probs)
        assert p > 1e-3, (kind, i, tag, p)


def test_geometric_sampler_tv():
    vals = br.sample_sum_of_geometrics("plain", 1, 10**6, rng(3))
    emp = gof.empirical_pmf(vals, 40)
    ref = 0.5 ** (np.arange(41) + 1)
    assert gof.tv_distance(emp, ref) <= 0.01


# ------------------------------------------------------------- chains

def test_plain_chain_from_zero_extinct_immediately():
    traj = br.chain_run("plain", 0, "extinct", rng())
    assert traj.omega == 0
    assert traj.states == [0]


def test_chain_run_records_hits():
    traj = br.chain_run("immigrant", 0, "hit", rng(), h=5)
    assert traj.tau_h is not None
    assert traj.states[traj.tau_h] >= 5
    assert all(s < 5 for s in traj.states[:traj.tau_h])


def test_chain_run_validation():
    with pytest.raises(ValueError):
        br.chain_run("plain", 1, "hit", rng())   # h missing
    with pytest.raises(ValueError):
        br.chain_run("plain", 1, "sideways", rng())


def test_first_hit_moments_exact_case():
    est = br.hitting_moments(0, 1, 40_000, rng(5))
    assert est.censor_rate == 0
    assert abs(est.tau_mean - 2.0) <= 3 * est.tau_se
    assert abs(est.z_mean - 2.0) <= 3 * est.z_se
    assert abs(est.residual) <= 3 * est.residual_se


def test_overshoot_law_from_zero():
    # Z at the first passage of 1 is the geometric conditioned positive:
    # P(Z = j) = 2^-j for j >= 1
    z = np.full(30_000, 0, np.int64)
    g = rng(6)
    out = []
    active = np.ones(len(z), bool)
    while active.any():
        nxt = br.sample_next("immigrant", z[active], g)
        z[active] = nxt
        hit = np.zeros(len(z), bool)
        hit[active] = nxt >= 1
        out.extend(z[hit].tolist())
        active &= ~hit
    counts = np.bincount(out, minlength=30)[:30]
    probs = 0.5 ** np.arange(30)
    probs[0] = 0.0
    _, p, _ = gof.chisq_onesample(counts, probs)
    assert p > 1e-3


def test_ruin_probability_exact_small_case():
    p, se = br.ruin_probability(1, 2, 50_000, rng(7))
    assert abs(p - 2 / 3) <= 4 * se
    assert br.ruin_probability(0, 5, 10, rng()) == (1.0, 0.0)


def test_ruin_probability_lower_bound():
    m, h = 63, 64
    p, se = br.ruin_probability(m, h, 30_000, rng(8))
    assert p >= (h - m) / h - 3 * se


# ------------------------------------------------------------- exact pmfs

def test_kernel_power_one_step_geometric():
    pmf = br.kernel_power("immigrant", 0, 1, 80)
    ref = 0.5 ** (np.arange(81) + 1)
    assert np.allclose(pmf.masses, ref, atol=1e-15)
    assert pmf.overflow < 1e-12


def test_kernel_power_absorbing():
    pmf = br.kernel_power("plain", 0, 7, 40)
    assert pmf.masses[0] == 1.0
    assert abs(pmf.masses[1:].sum()) == 0.0


def test_kernel_power_mean_vs_monte_carlo():
    pmf = br.kernel_power("immigrant", 0, 2, 200)
    z = np.zeros(200_000, np.int64)
    g = rng(9)
    for _ in range(2):
        z = br.sample_next("immigrant", z, g)
    mc = z.mean()
    se = z.std(ddof=1) / math.sqrt(len(z))
    assert abs(pmf.mean() - mc) <= 3 * se
    assert abs(pmf.mean() - 2.0) < 1e-10  # drift is exactly +1 per step


def test_martingale_small_exact():
    res = br.martingale_checks(0, 1, cap=120)
    assert abs(res["E_M"]) <= 1e-12
    assert abs(res["E_Mprime"]) <= 1e-12

    res = br.martingale_checks(3, 4, cap=220)
    assert abs(res["E_M"]) <= 1e-9
    assert abs(res["E_Mprime"] - (-9 / 4)) <= 1e-9


# ------------------------------------------------------------- windows

def test_window_integers_h400():
    assert br.window_integers(400) == list(range(181, 190))
    assert br.window_integers(400, closed=True) == list(range(180, 191))
    assert br.window_mid(400) == 185


def test_window_integers_small():
    # h=100: open interval (40, 45)
    assert br.window_integers(100) == [41, 42, 43, 44]


def test_lemma41_statistic_positive():
    est, se = br.lemma41_statistic(br.window_mid(400), 400, 20_000, rng(11))
    assert est > 0
    assert est - 3 * se > 0
