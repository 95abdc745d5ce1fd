import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nwfpp import cmbp, stats
from nwfpp.theory import constants, mean_matrix

K2 = constants(2.0)


def alive_series(tr):
    """Alive (A_R, A_B) just after each split, rebuilt from the split log."""
    dead_r = np.where(tr.parent_type == cmbp.RED, 1, 0)
    ar = np.cumsum(tr.d_R - dead_r)
    ab = np.cumsum(tr.d_B - (1 - dead_r))
    if tr.root_type == cmbp.RED:
        ar = ar + 1
    else:
        ab = ab + 1
    return ar, ab


def _seed_with_zero_poisson(rho):
    for seed in range(500):
        tr = cmbp.simulate(rho, "blue", at_splits=1, seed=seed)
        if tr.d_B[0] == 0:
            return seed, tr
    raise AssertionError("no seed found")


def test_forced_zero_poisson_root_split():
    _, tr = _seed_with_zero_poisson(1.0)
    assert (tr.A_R, tr.A_B) == (2, 0)
    assert tr.T[0] == 0.0


def test_martingale_at_zero_plus():
    _, tr = _seed_with_zero_poisson(1.0)
    k = constants(1.0)
    assert cmbp.martingale_W(tr, k) == pytest.approx(2 * k.u_R, rel=1e-14)


@settings(max_examples=25)
@given(rho=st.floats(0.1, 6.0), seed=st.integers(0, 10**6), m=st.integers(1, 400))
def test_trajectory_invariants(rho, seed, m):
    tr = cmbp.simulate(rho, "blue", at_splits=m, seed=seed)
    assert tr.splits == m
    assert tr.T[0] == 0.0
    assert np.all(np.diff(tr.T) > 0)
    assert np.all(tr.d_R >= 1) and np.all(tr.d_B >= 0)
    np.testing.assert_array_equal(tr.d_R, np.where(tr.parent_type == cmbp.RED, 1, 2))
    # S_i = S_{i-1} - 1 + D_i, with S_1 the root's offspring count
    assert tr.S[0] == tr.D[0]
    np.testing.assert_array_equal(tr.S[1:], tr.S[:-1] - 1 + tr.D[1:])
    ar, ab = alive_series(tr)
    assert np.all(ar >= 0) and np.all(ab >= 0)
    assert (ar[-1], ab[-1]) == (tr.A_R, tr.A_B)
    np.testing.assert_array_equal(ar + ab, tr.S)


def test_particle_start_has_positive_first_split():
    tr = cmbp.simulate(1.0, "blue", at_splits=5, seed=3, start="particle")
    assert tr.T[0] > 0


def test_at_time_stops_before_horizon():
    tr = cmbp.simulate(2.0, "red", at_time=3.0, seed=4)
    assert tr.t_end == 3.0
    assert tr.T[-1] <= 3.0


def test_deterministic_given_seed():
    a = cmbp.simulate(2.0, "blue", at_splits=2000, seed=99)
    b = cmbp.simulate(2.0, "blue", at_splits=2000, seed=99)
    np.testing.assert_array_equal(a.T, b.T)
    np.testing.assert_array_equal(a.d_B, b.d_B)
    c = cmbp.simulate(2.0, "blue", at_splits=2000, seed=100)
    assert not np.array_equal(a.d_B, c.d_B)


def test_errors():
    with pytest.raises(cmbp.ResourceError):
        cmbp.simulate(1.0, at_splits=cmbp.MAX_SPLITS + 1)
    with pytest.raises(ValueError):
        cmbp.simulate(0.0, at_splits=3)
    with pytest.raises(ValueError):
        cmbp.simulate(1.0, at_splits=3, at_time=1.0)
    with pytest.raises(ValueError):
        cmbp.simulate(1.0, root="green", at_splits=3)
    with pytest.raises(ValueError):
        cmbp.simulate(1.0, at_splits=3, start="late")


def test_blue_offspring_is_poisson():
    tr = cmbp.simulate(1.5, "blue", at_splits=20000, seed=8)
    counts = np.bincount(tr.d_B, minlength=8)
    from scipy.stats import poisson
    probs = poisson.pmf(np.arange(8), 1.5)
    probs[-1] += poisson.sf(7, 1.5)
    binned = np.append(counts[:7], counts[7:].sum())
    _, p = stats.chi_square(binned, probs)
    assert p > 0.001


def test_alive_at_matches_mean_matrix():
    k = constants(1.0)
    ar, ab = cmbp.alive_at(1.0, 1.0, 20000, root="blue", seed=5)
    mean = mean_matrix(k, 1.0)[cmbp.BLUE]
    for x, m in ((ar, mean[0]), (ab, mean[1])):
        se = x.std(ddof=1) / math.sqrt(x.size)
        assert abs(x.mean() - m) < 3.5 * se


def test_type_fractions_at_1e5_splits():
    tr = cmbp.simulate(2.0, "blue", at_splits=10**5, seed=12)
    n_r, _ = tr.dead_counts()
    assert abs(n_r / tr.splits - K2.pi_R) < 0.01


def test_type_ratio_of_alive_at_large_population():
    tr = cmbp.simulate(2.0, "blue", at_splits=60000, seed=13)
    total = tr.A_R + tr.A_B
    assert total >= 10**5
    assert abs(tr.A_R / total - K2.pi_R) < 0.02


def test_split_count_ratio():
    m = 10**5
    tr = cmbp.simulate(2.0, "blue", at_splits=m, seed=21)
    W = cmbp.martingale_W(tr, K2)
    ratio = m * math.exp(-K2.lam * tr.T[-1]) / (W / K2.lam)
    assert 0.95 <= ratio <= 1.05


def test_log_split_count_over_time():
    # log m = lam T_m + log(W / lam) + o(1); the W term decays only like 1/log m
    m = 10**6
    tr = cmbp.simulate(2.0, "blue", at_splits=m, seed=22)
    W = cmbp.martingale_W(tr, K2)
    rate = (math.log(m) - math.log(W / K2.lam)) / tr.T[-1]
    assert abs(rate / K2.lam - 1) < 0.01


def test_late_split_mean_offspring():
    m = 10**5
    tr = cmbp.simulate(2.0, "blue", at_splits=m, seed=23)
    d = tr.D[m // 2:]
    se = d.std(ddof=1) / math.sqrt(d.size)
    assert abs(d.mean() - (K2.lam + 1)) < 3 * se


def test_martingale_stabilises():
    # doubling the horizon from 6/lam moves W by a few percent at the median
    t1 = 6.0 / K2.lam
    rel = []
    for seed in range(30):
        tr = cmbp.simulate(2.0, "blue", at_time=2 * t1, seed=seed)
        ar, ab = alive_series(tr)
        i = np.searchsorted(tr.T, t1, side="right") - 1
        w1 = math.exp(-K2.lam * t1) * (ar[i] * K2.u_R + ab[i] * K2.u_B)
        rel.append(abs(cmbp.martingale_W(tr, K2) - w1) / w1)
    assert np.median(rel) < 0.05


# --- sample_W ---------------------------------------------------------------

def test_sample_w_positive_and_deterministic():
    a = cmbp.sample_W(1.0, reps=300, seed=1)
    b = cmbp.sample_W(1.0, reps=300, seed=1)
    assert np.all(a > 0)
    np.testing.assert_array_equal(a, b)


@pytest.mark.parametrize("start,factor", [("particle", 0.0), ("split", 1.0)])
def test_sample_w_mean(start, factor):
    k = constants(1.0)
    W = cmbp.sample_W(1.0, "blue", reps=4000, seed=2, start=start)
    target = (k.lam * factor + 1) * k.u_B
    se = W.std(ddof=1) / math.sqrt(W.size)
    assert abs(W.mean() - target) < 3.5 * se


def test_sample_w_red_root_particle_mean():
    k = constants(2.0)
    W = cmbp.sample_W(2.0, "red", reps=4000, seed=3, start="particle")
    se = W.std(ddof=1) / math.sqrt(W.size)
    assert abs(W.mean() - k.u_R) < 3.5 * se


def test_sample_w_cap_does_not_change_law():
    a = cmbp.sample_W(2.0, reps=3000, seed=4, max_alive=200)
    b = cmbp.sample_W(2.0, reps=3000, seed=5, max_alive=5000)
    assert stats.ks_two_sample(a, b).passed


# --- generations ------------------------------------------------------------

def test_generation_first_split_is_one():
    tr = cmbp.simulate(2.0, "blue", at_splits=10, seed=6)
    assert cmbp.generation_sample(tr, k=1, seed=1) == 1
    assert cmbp.generation_mean(tr, k=1) == 1.0


def test_generation_mean_matches_resamples():
    tr = cmbp.simulate(2.0, "blue", at_splits=3000, seed=7)
    g = cmbp.generation_sample(tr, seed=2, size=4000)
    mean = cmbp.generation_mean(tr)
    p = tr.D / tr.S
    se = math.sqrt(np.sum(p * (1 - p)) / g.size)
    assert abs(g.mean() - mean) < 4 * se
    assert np.all((g >= 1) & (g <= tr.splits))


def test_generation_bad_k():
    tr = cmbp.simulate(2.0, "blue", at_splits=10, seed=6)
    with pytest.raises(ValueError):
        cmbp.generation_sample(tr, k=11)


def _generation_draws(k_split, trajectories, seed0):
    out = []
    for s in range(trajectories):
        tr = cmbp.simulate(2.0, "blue", at_splits=k_split, seed=seed0 + s)
        out.append((cmbp.generation_sample(tr, seed=s), tr))
    return out


def test_generation_growth_slope():
    # the mean generation grows like ((lam+1)/lam) log k
    trs = [tr for _, tr in _generation_draws(10000, 150, 500)]
    lo = [cmbp.generation_mean(tr, k=1000) for tr in trs]
    hi = [cmbp.generation_mean(tr) for tr in trs]
    slope = (np.mean(hi) - np.mean(lo)) / math.log(10)
    assert slope == pytest.approx((K2.lam + 1) / K2.lam, rel=0.05)


@pytest.mark.xfail(reason="O(1) centering offset at k=1e4; see ledger", strict=False)
def test_generation_clt_literal():
    k_split = 10**4
    n_prime = (k_split * K2.lam) ** 2
    centre = (K2.lam + 1) / (2 * K2.lam) * math.log(n_prime)
    g = np.array([x for x, _ in _generation_draws(k_split, 400, 900)], dtype=float)
    z = (g - centre) / math.sqrt(centre)
    assert stats.ks_one_sample(z, stats.normal_cdf).passed
