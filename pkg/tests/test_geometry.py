import io
import math

import numpy as np
import pytest
from scipy import integrate, stats

from mmnoma.config import default_config
from mmnoma.geometry import (
    conditional_far_pdf,
    conditional_near_pdf,
    default_window_radius,
    distance_cutoff,
    dump_realization,
    far_marginal_pdf,
    near_marginal_pdf,
    ordered_cdf,
    ordered_pdf,
    ordered_pdf_series,
    rayleigh_cdf,
    rayleigh_pdf,
    sample_realization,
)


def test_rayleigh_pdf_values():
    assert rayleigh_pdf(0.0, 10.0) == 0.0
    assert rayleigh_pdf(10.0, 10.0) == pytest.approx(0.1 * math.exp(-0.5))
    # mode at v = sigma
    h = 1e-5
    assert rayleigh_pdf(10.0 + h, 10.0) < rayleigh_pdf(10.0, 10.0) > rayleigh_pdf(10.0 - h, 10.0)


def test_rayleigh_cdf_values():
    sigma = 7.0
    assert rayleigh_cdf(0.0, sigma) == 0.0
    assert rayleigh_cdf(sigma * math.sqrt(2 * math.log(2)), sigma) == pytest.approx(0.5)
    assert rayleigh_cdf(5 * sigma, sigma) == pytest.approx(1 - math.exp(-12.5), rel=1e-14)


def test_rayleigh_rejects_bad_inputs():
    with pytest.raises(ValueError):
        rayleigh_pdf(-1.0, 1.0)
    with pytest.raises(ValueError):
        rayleigh_cdf(1.0, 0.0)


def test_ordered_pdf_two_users():
    sigma = 10.0
    r = np.linspace(0.1, 60, 50)
    nearest = 2 * r / sigma**2 * np.exp(-(r**2) / sigma**2)
    assert np.allclose(ordered_pdf(1, r, 1, sigma), nearest, rtol=1e-12)
    farthest = 2 * rayleigh_pdf(r, sigma) * rayleigh_cdf(r, sigma)
    assert np.allclose(ordered_pdf(2, r, 1, sigma), farthest, rtol=1e-12)


@pytest.mark.parametrize("K", [1, 2, 3, 4, 5])
def test_ordered_pdf_matches_binomial_sum(K):
    r = np.linspace(0.5, 50, 40)
    for i in range(1, 2 * K + 1):
        exact = ordered_pdf(i, r, K, 9.0)
        # the alternating sum cancels near r = 0, so compare on the peak scale
        assert np.allclose(ordered_pdf_series(i, r, K, 9.0), exact, rtol=1e-9, atol=1e-11 * exact.max())


def test_ordered_pdf_index_bounds():
    with pytest.raises(ValueError):
        ordered_pdf(0, 1.0, 2, 10.0)
    with pytest.raises(ValueError):
        ordered_pdf(5, 1.0, 2, 10.0)


@pytest.mark.parametrize("K", [1, 2, 5])
def test_mixture_of_ordered_pdfs_is_rayleigh(K):
    r = np.linspace(0.01, 60, 300)
    mix = sum(ordered_pdf(i, r, K, 10.0) for i in range(1, 2 * K + 1)) / (2 * K)
    assert np.allclose(mix, rayleigh_pdf(r, 10.0), atol=1e-6)


def test_ordered_cdf_is_integral_of_pdf():
    for i in range(1, 7):
        val = integrate.quad(lambda r: ordered_pdf(i, r, 3, 12.0), 0, 25.0)[0]
        assert ordered_cdf(i, 25.0, 3, 12.0) == pytest.approx(val, abs=1e-10)


def test_conditional_far_pdf():
    sigma, r_k = 10.0, 10.0
    assert conditional_far_pdf(5.0, r_k, sigma) == 0.0
    assert conditional_far_pdf(r_k, r_k, sigma) == 0.0
    mass = integrate.quad(lambda r: conditional_far_pdf(r, r_k, sigma), r_k, np.inf)[0]
    assert mass == pytest.approx(1.0, abs=1e-10)
    r = np.linspace(0.5, 40, 10)
    assert np.allclose(conditional_far_pdf(r, 1e-12, sigma), rayleigh_pdf(r, sigma))


def test_conditional_near_pdf():
    sigma, r_j = 10.0, 15.0
    assert conditional_near_pdf(20.0, r_j, sigma) == 0.0
    mass = integrate.quad(lambda r: conditional_near_pdf(r, r_j, sigma), 0, r_j)[0]
    assert mass == pytest.approx(1.0, abs=1e-10)
    r = np.linspace(0.5, 40, 10)
    assert np.allclose(conditional_near_pdf(r, 1e6, sigma), rayleigh_pdf(r, sigma))
    with pytest.raises(ValueError):
        conditional_near_pdf(1.0, 0.0, sigma)


@pytest.mark.parametrize("K, k", [(2, 1), (2, 2), (3, 2), (1, 1)])
def test_fnrf_far_marginal_equals_conditional_integral(K, k):
    cfg = default_config(K=K, scheme="FNRF", k=k)
    for r in (3.0, 9.0, 17.0, 30.0):
        nested = integrate.quad(
            lambda rk: ordered_pdf(k, rk, K, cfg.sigma) * conditional_far_pdf(r, rk, cfg.sigma), 0, r
        )[0]
        assert far_marginal_pdf(cfg, r) == pytest.approx(nested, rel=1e-8)


@pytest.mark.parametrize("K, j", [(2, 4), (2, 2), (3, 5), (1, 2)])
def test_rnff_near_marginal_equals_conditional_integral(K, j):
    cfg = default_config(K=K, scheme="RNFF", j=j)
    for r in (3.0, 9.0, 17.0, 30.0):
        nested = integrate.quad(
            lambda rj: ordered_pdf(j, rj, K, cfg.sigma) * conditional_near_pdf(r, rj, cfg.sigma), r, np.inf
        )[0]
        assert near_marginal_pdf(cfg, r) == pytest.approx(nested, rel=1e-8)


def test_fixed_user_marginals_are_order_statistics():
    cfg = default_config(scheme="FNFF", k=2, j=3)
    r = np.linspace(1, 40, 7)
    assert np.array_equal(near_marginal_pdf(cfg, r), ordered_pdf(2, r, 2, cfg.sigma))
    assert np.array_equal(far_marginal_pdf(cfg, r), ordered_pdf(3, r, 2, cfg.sigma))


def test_distance_cutoff_tail():
    cfg = default_config()
    r_max = distance_cutoff(cfg)
    tail = 1 - ordered_cdf(cfg.n_users, r_max, cfg.K, cfg.sigma)
    assert tail <= cfg.quad_eps * 1.0001


def test_sampling_is_deterministic():
    cfg = default_config()
    a = sample_realization(cfg, rng_seed=5)
    b = sample_realization(cfg, rng_seed=5)
    for field in ("bs_points", "user_offsets", "user_angles", "user_fading",
                  "interferer_beam_offsets", "interferer_fading"):
        assert np.array_equal(getattr(a, field), getattr(b, field))
    assert a.partner_uniform == b.partner_uniform


def test_empty_ppp():
    cfg = default_config(bs_density_per_m2=0.0)
    real = sample_realization(cfg, rng_seed=1)
    assert real.bs_points.shape == (0, 2)
    assert real.user_offsets.shape == (4, 2)


def test_realization_shapes_and_ranges():
    cfg = default_config(K=3)
    real = sample_realization(cfg, rng_seed=3)
    n_bs = real.bs_points.shape[0]
    assert real.interferer_beam_offsets.shape == (n_bs, 6)
    assert np.all(np.abs(real.interferer_beam_offsets) <= 1)
    assert np.all(np.hypot(*real.bs_points.T) <= default_window_radius(cfg))
    assert real.los_flags.shape == (n_bs, 6)


def test_window_radius():
    cfg = default_config()
    assert default_window_radius(cfg) == pytest.approx(2500.0)
    assert default_window_radius(cfg.with_updates(bs_density_per_m2=1e-3)) == 2000.0


def test_offsets_second_moment():
    cfg = default_config(bs_density_per_m2=0.0, sigma_m=8.0)
    sq = []
    for seed in range(3000):
        off = sample_realization(cfg, rng_seed=seed).user_offsets
        sq.extend(np.sum(off**2, axis=1))
    assert np.mean(sq) == pytest.approx(2 * 8.0**2, rel=0.03)


def test_nearest_distance_ks():
    cfg = default_config(bs_density_per_m2=0.0)
    mins = [sample_realization(cfg, rng_seed=s).user_distances.min() for s in range(4000)]
    res = stats.kstest(mins, lambda r: ordered_cdf(1, r, cfg.K, cfg.sigma))
    assert res.statistic < 0.03


def test_dump_format():
    cfg = default_config()
    real = sample_realization(cfg, rng_seed=2)
    buf = io.StringIO()
    dump_realization(real, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0].startswith("# R_L")
    assert sum(line.startswith("user ") for line in lines) == 4
    assert sum(line.startswith("bs ") for line in lines) == real.bs_points.shape[0]
