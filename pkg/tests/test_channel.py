import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from mmnoma.channel import (
    PathLossLaw,
    compute_sinrs,
    effective_gain_aligned,
    effective_gain_misaligned,
    inter_cluster_interference,
    noma_sinrs,
    path_loss,
)
from mmnoma.config import default_config
from mmnoma.geometry import Realization, nakagami_power, sample_realization
from mmnoma.special import fejer_gain


@pytest.fixture
def law(cfg):
    return PathLossLaw.from_config(cfg)


def test_path_loss_intercept_at_one_metre(cfg, law):
    wavelength = 299_792_458.0 / 28e9
    assert path_loss(1.0, law) == pytest.approx((wavelength / (4 * math.pi)) ** 2, rel=1e-12)


def test_path_loss_branches(cfg, law):
    assert path_loss(cfg.R_L / 2, law) == pytest.approx(4 * cfg.C_L / cfg.R_L**2)
    assert path_loss(2 * cfg.R_L, law) == pytest.approx(cfg.C_N / (16 * cfg.R_L**4))


def test_path_loss_boundary_is_nlos(cfg, law):
    assert path_loss(cfg.R_L, law) == pytest.approx(cfg.C_N * cfg.R_L ** (-cfg.alpha_N))


def test_path_loss_rejects_nonpositive(law):
    with pytest.raises(ValueError):
        path_loss(0.0, law)
    with pytest.raises(ValueError):
        path_loss(np.array([1.0, -2.0]), law)


def test_path_loss_vectorized(law):
    r = np.array([1.0, 50.0, 150.0])
    assert np.allclose(path_loss(r, law), [path_loss(x, law) for x in r])


def test_aligned_gain():
    assert effective_gain_aligned(1.0, 10) == 10.0
    assert effective_gain_aligned(0.0, 64) == 0.0


def test_aligned_gain_mean_over_fading():
    rng = np.random.default_rng(0)
    g2 = nakagami_power(rng, 3, 200_000)
    assert np.mean(effective_gain_aligned(g2, 10)) == pytest.approx(10.0, rel=0.01)


def test_misaligned_gain():
    assert effective_gain_misaligned(1.3, 16, 0.0) == pytest.approx(effective_gain_aligned(1.3, 16))
    assert effective_gain_misaligned(1.0, 16, 2 / 16) == pytest.approx(0.0, abs=1e-15)
    for M in (4, 10, 33):
        avg = integrate.quad(lambda d: effective_gain_misaligned(1.0, M, d), -1, 1, limit=400)[0] / 2
        assert avg == pytest.approx(1.0, abs=1e-8)


def _single_user_realization(r, angle=0.0, fading=1.0):
    # two users on the x axis, no interferers
    return Realization(
        bs_points=np.zeros((0, 2)),
        user_offsets=np.array([[r, 0.0], [3 * r, 0.0]]),
        user_angles=np.array([angle, angle]),
        user_fading=np.array([fading, fading]),
        interferer_beam_offsets=np.zeros((0, 2)),
        interferer_fading=np.zeros((0, 2)),
        partner_uniform=0.5,
        R_L=100.0,
    )


def test_sinrs_without_interference():
    cfg = default_config(K=1)
    r = 20.0
    real = _single_user_realization(r)
    trip = compute_sinrs(real, cfg, (1, 2))
    snr = cfg.M * cfg.C_L * r ** (-cfg.alpha_L) / cfg.noise_normalized
    assert trip.gamma_k == pytest.approx(cfg.a_k * snr, rel=1e-12)
    expected = cfg.a_j / (cfg.a_k + cfg.noise_normalized * r**cfg.alpha_L / (cfg.M * cfg.C_L))
    assert trip.gamma_k_to_j == pytest.approx(expected, rel=1e-12)


def test_far_user_uses_sorted_rank():
    cfg = default_config(K=1)
    real = _single_user_realization(20.0)
    swapped = Realization(**{**real.__dict__, "user_offsets": real.user_offsets[::-1].copy()})
    assert compute_sinrs(real, cfg, (1, 2)) == compute_sinrs(swapped, cfg, (1, 2))


def test_compute_sinrs_invalid_pair(cfg):
    real = sample_realization(cfg, rng_seed=0)
    for pair in [(2, 2), (3, 1), (0, 2), (1, 5)]:
        with pytest.raises(ValueError):
            compute_sinrs(real, cfg, pair)


def test_interference_matches_direct_sum(cfg):
    real = sample_realization(cfg, rng_seed=11)
    law = PathLossLaw.from_config(cfg)
    got = inter_cluster_interference(real, cfg)
    for u in range(cfg.n_users):
        direct = 0.0
        for b, y in enumerate(real.bs_points):
            d = math.dist(real.user_offsets[u], y)
            direct += cfg.M * real.interferer_fading[b, u] * fejer_gain(real.interferer_beam_offsets[b, u], cfg.M) \
                * path_loss(d, law)
        assert got[u] == pytest.approx(direct, rel=1e-10)


def test_sinrs_nonnegative_and_capped(cfg):
    for seed in range(20):
        trip = compute_sinrs(sample_realization(cfg, rng_seed=seed), cfg, (1, 4))
        assert trip.gamma_k >= 0 and trip.gamma_j >= 0
        assert 0 <= trip.gamma_k_to_j < cfg.a_j / cfg.a_k


positive = st.floats(1e-6, 1e3)


@given(positive, positive, positive, positive, st.floats(0.01, 0.45), st.floats(1e-3, 10.0))
def test_sic_sinr_increases_with_far_share(sk, sj, ik, ij, a_k, noise):
    lo = noma_sinrs(sk, sj, ik, ij, a_k, 1 - a_k, noise)[1]
    hi = noma_sinrs(sk, sj, ik, ij, a_k, 1 - a_k + 0.05, noise)[1]
    assert hi > lo


@settings(max_examples=50)
@given(positive, positive, positive, positive, st.floats(0.01, 0.45), st.floats(1e-3, 10.0), st.floats(1e-3, 1e3))
def test_sinrs_scale_invariant(sk, sj, ik, ij, a_k, noise, c):
    base = noma_sinrs(sk, sj, ik, ij, a_k, 1 - a_k, noise)
    scaled = noma_sinrs(c * sk, c * sj, c * ik, c * ij, a_k, 1 - a_k, c * noise)
    assert np.allclose(base, scaled, rtol=1e-10)


def test_far_sinr_ceiling():
    g_j = noma_sinrs(1.0, 1.0, 0.0, 0.0, 0.2, 0.8, 1e-15)[2]
    assert g_j == pytest.approx(0.8 / 0.2, rel=1e-12)
