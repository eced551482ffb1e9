import numpy as np
import pytest

from cafqpsk.de import (
    AcprGrid,
    DeConfig,
    acpr_scan,
    awgn_channel,
    biawgn_channel,
    biawgn_threshold,
    de_symmetric,
    de_two_density,
    decodable_caf,
    decodable_sic,
    degraded_caf_channel,
    threshold_bisect,
)
from cafqpsk.model import params_from_snr

FAST = DeConfig(n_pop=50_000, seed=3)


def test_biawgn_channel_llr_statistics():
    sigma = 0.8
    ch = biawgn_channel(sigma)
    rng = np.random.default_rng(0)
    llr0 = ch.sample_llr(rng, 0, 200_000)
    llr1 = ch.sample_llr(rng, 1, 200_000)
    # LLR of BIAWGN is N(+-2/sigma^2, 4/sigma^2)
    assert llr0.mean() == pytest.approx(2 / sigma ** 2, rel=0.02)
    assert llr0.var() == pytest.approx(4 / sigma ** 2, rel=0.03)
    assert llr1.mean() == pytest.approx(-2 / sigma ** 2, rel=0.02)


def test_de_symmetric_verdicts_straddle_threshold():
    good = de_symmetric(3, 6, biawgn_channel(0.80), FAST)
    bad = de_symmetric(3, 6, biawgn_channel(0.95), FAST)
    assert good.converged and not bad.converged
    assert bad.error_prob_trace[-1] > 0.01


def test_de_trace_non_increasing_within_mc_noise():
    out = de_symmetric(3, 6, biawgn_channel(0.80), FAST)
    slack = 3 / np.sqrt(FAST.n_pop)
    t = out.error_prob_trace
    assert all(b <= a + slack for a, b in zip(t, t[1:]))
    assert t[-1] < FAST.target_error


def test_zero_capacity_channel_stays_at_half():
    out = de_symmetric(3, 6, awgn_channel(0.0, 1.0), FAST)
    assert not out.converged
    assert all(e == 0.5 for e in out.error_prob_trace)
    # the stall abort keeps this from burning the full iteration budget
    assert out.iterations < FAST.max_iter


def test_de_symmetric_input_validation():
    with pytest.raises(ValueError):
        de_symmetric(3, 6, degraded_caf_channel(params_from_snr(4, 4)), FAST)
    with pytest.raises(ValueError):
        de_symmetric(3, 6, biawgn_channel(0.8), DeConfig(n_pop=100))
    with pytest.raises(ValueError):
        de_two_density(3, 6, biawgn_channel(0.8), DeConfig(n_pop=100))


def test_two_density_agrees_with_symmetric_on_biawgn():
    for sigma, expect in ((0.80, True), (0.95, False)):
        out = de_two_density(3, 6, biawgn_channel(sigma), FAST)
        assert out.converged == expect


def test_decodable_caf_straddles_crossover():
    assert decodable_caf(3, 6, params_from_snr(4.0, 4.0), FAST)
    assert not decodable_caf(3, 6, params_from_snr(1.0, 1.0), FAST)


def test_decodable_sic_cases():
    # equal powers at theta=0 collapse the stage-1 constellation
    assert not decodable_sic(3, 6, params_from_snr(6, 6), 0.0, "a_first", FAST)
    # a strong power offset separates the stage-1 mixture
    assert decodable_sic(3, 6, params_from_snr(10, 2), 0.0, "a_first", FAST)
    # theta=pi/4 splits the diagonal eventually, but needs much more power
    assert decodable_sic(3, 6, params_from_snr(14, 14), np.pi / 4, "a_first", FAST)
    assert not decodable_sic(3, 6, params_from_snr(8, 8), np.pi / 4, "a_first", FAST)
    with pytest.raises(ValueError):
        decodable_sic(3, 6, params_from_snr(6, 6), 0.0, "sideways", FAST)


def test_decodable_sic_order_swap_symmetry():
    p = params_from_snr(10, 2)
    q = params_from_snr(2, 10)
    assert (decodable_sic(3, 6, p, 0.0, "a_first", FAST)
            == decodable_sic(3, 6, q, 0.0, "b_first", FAST))


def test_biawgn_thresholds_match_references():
    cfg = DeConfig(n_pop=100_000, seed=1)
    t36 = biawgn_threshold(3, 6, tol=0.005, de_cfg=cfg)
    assert t36 == pytest.approx(0.881, abs=0.01)
    t39 = biawgn_threshold(3, 9, lo=0.5, hi=1.0, tol=0.005, de_cfg=cfg)
    assert t39 == pytest.approx(0.71, abs=0.02)


def test_threshold_bisect_bracket_validation():
    with pytest.raises(ValueError):
        threshold_bisect(lambda x, s: True, 0.0, 1.0, 0.1)
    with pytest.raises(ValueError):
        threshold_bisect(lambda x, s: x > 0.5, 1.0, 1.0, 0.1)
    with pytest.raises(ValueError):
        threshold_bisect(lambda x, s: x > 0.5, 1.0, 0.0, 0.1)


def test_threshold_bisect_on_deterministic_step():
    root = threshold_bisect(lambda x, s: x > 0.37, 0.0, 1.0, 1e-4)
    assert root == pytest.approx(0.37, abs=1e-4)
    # works regardless of the step direction
    root2 = threshold_bisect(lambda x, s: x < 0.37, 0.0, 1.0, 1e-4)
    assert root2 == pytest.approx(0.37, abs=1e-4)


def test_acpr_scan_lrc_grid_and_monotonicity():
    grid = acpr_scan("caf_lrc", 3, 6, [-2.0, 0.0, 2.0, 4.0],
                     [-2.0, 0.0, 2.0, 4.0])
    assert isinstance(grid, AcprGrid)
    assert grid.rate == 0.5
    assert np.all(grid.status == "ok")
    # SIR grows with either SNR, so decodability is an up-set
    d = grid.decodable
    assert np.all(d[:-1, :] <= d[1:, :]) and np.all(d[:, :-1] <= d[:, 1:])
    assert d[0, 0] == False and d[-1, -1] == True  # noqa: E712


def test_acpr_scan_deterministic_and_validates_axes():
    a = acpr_scan("caf_ldpc", 3, 6, [1.0, 4.0], [1.0, 4.0], de_cfg=FAST)
    b = acpr_scan("caf_ldpc", 3, 6, [1.0, 4.0], [1.0, 4.0], de_cfg=FAST)
    assert np.array_equal(a.decodable, b.decodable)
    assert a.decodable[1, 1] and not a.decodable[0, 0]
    with pytest.raises(ValueError):
        acpr_scan("caf_lrc", 3, 6, [2.0, 1.0], [0.0, 1.0])


def test_acpr_scan_records_per_point_errors():
    grid = acpr_scan("bogus", 3, 6, [0.0], [0.0])
    assert grid.status[0, 0].startswith("error:")
    assert not grid.decodable[0, 0]
