"""Intra-cluster distance laws and sampling of the clustered network.

Users of a cluster are isotropic Gaussian offsets around their base station,
so their distances are Rayleigh.  The pairing schemes pick order statistics
of the 2K distances; the helpers here give both the ordered densities and
the marginal densities of the randomly chosen partner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TextIO

import numpy as np
from scipy import special as sp

from .config import NetworkConfig


def _check_sigma(sigma: float) -> None:
    if not sigma > 0:
        raise ValueError(f"sigma must be positive (got {sigma!r})")


def rayleigh_pdf(v, sigma: float):
    _check_sigma(sigma)
    v = np.asarray(v, dtype=float)
    if np.any(v < 0):
        raise ValueError("distance must be nonnegative")
    out = v / sigma**2 * np.exp(-(v**2) / (2 * sigma**2))
    return float(out) if out.ndim == 0 else out


def rayleigh_cdf(v, sigma: float):
    _check_sigma(sigma)
    v = np.asarray(v, dtype=float)
    if np.any(v < 0):
        raise ValueError("distance must be nonnegative")
    out = -np.expm1(-(v**2) / (2 * sigma**2))
    return float(out) if out.ndim == 0 else out


def order_coefficient(i: int, n_users: int) -> float:
    """(2K)! / ((i-1)! (2K-i)!)."""
    return math.factorial(n_users) / (math.factorial(i - 1) * math.factorial(n_users - i))


def ordered_pdf(i: int, r, K: int, sigma: float):
    """Density of the i-th smallest of 2K i.i.d. Rayleigh(sigma) distances.

    Evaluated in the factored form ``c R_p R_c^(i-1) (1-R_c)^(2K-i)``, which is
    the binomial sum of the textbook expression without its cancellation.
    """
    _check_sigma(sigma)
    n_users = 2 * K
    if not 1 <= i <= n_users:
        raise ValueError(f"order index must satisfy 1 <= i <= 2K (i={i}, 2K={n_users})")
    r = np.asarray(r, dtype=float)
    x = r**2 / (2 * sigma**2)
    cdf = -np.expm1(-x)
    out = order_coefficient(i, n_users) * r / sigma**2 * np.exp(-(n_users - i + 1) * x) * cdf ** (i - 1)
    return float(out) if out.ndim == 0 else out


def ordered_pdf_series(i: int, r, K: int, sigma: float):
    """Same density written as the alternating binomial sum over w."""
    n_users = 2 * K
    r = np.asarray(r, dtype=float)
    total = np.zeros_like(r)
    for w in range(i):
        total = total + (-1) ** (i - 1 - w) * math.comb(i - 1, w) * np.exp(-(n_users - w) * r**2 / (2 * sigma**2))
    out = order_coefficient(i, n_users) * r / sigma**2 * total
    return float(out) if out.ndim == 0 else out


def ordered_cdf(i: int, r, K: int, sigma: float):
    """P[r_(i) <= r]: regularized incomplete beta of the Rayleigh CDF."""
    n_users = 2 * K
    p = rayleigh_cdf(r, sigma)
    return sp.betainc(i, n_users - i + 1, p)


def conditional_far_pdf(r_j, r_k: float, sigma: float):
    """Rayleigh density of a far user conditioned on lying beyond ``r_k``."""
    _check_sigma(sigma)
    r_j = np.asarray(r_j, dtype=float)
    tail = math.exp(-(r_k**2) / (2 * sigma**2))
    out = np.where(r_j > r_k, r_j / sigma**2 * np.exp(-(r_j**2) / (2 * sigma**2)) / tail, 0.0)
    return float(out) if out.ndim == 0 else out


def conditional_near_pdf(r_k, r_j: float, sigma: float):
    """Rayleigh density of a near user conditioned on lying inside ``r_j``."""
    _check_sigma(sigma)
    if not r_j > 0:
        raise ValueError("r_j must be positive")
    r_k = np.asarray(r_k, dtype=float)
    mass = rayleigh_cdf(r_j, sigma)
    out = np.where(r_k < r_j, r_k / sigma**2 * np.exp(-(r_k**2) / (2 * sigma**2)) / mass, 0.0)
    return float(out) if out.ndim == 0 else out


def near_marginal_pdf(cfg: NetworkConfig, r):
    """Marginal density of the near user's distance under ``cfg.scheme``.

    FNRF/FNFF: the k-th order statistic.  RNFF: the near user is uniform over
    ranks 1..j-1, which is what integrating the conditional law against the
    j-th order statistic gives.
    """
    if cfg.scheme.kind == "RNFF":
        j = cfg.far_index
        return sum(ordered_pdf(i, r, cfg.K, cfg.sigma) for i in range(1, j)) / (j - 1)
    return ordered_pdf(cfg.near_index, r, cfg.K, cfg.sigma)


def far_marginal_pdf(cfg: NetworkConfig, r):
    """Marginal density of the far user's distance under ``cfg.scheme``."""
    if cfg.scheme.kind == "FNRF":
        k = cfg.near_index
        n_users = cfg.n_users
        return sum(ordered_pdf(i, r, cfg.K, cfg.sigma) for i in range(k + 1, n_users + 1)) / (n_users - k)
    return ordered_pdf(cfg.far_index, r, cfg.K, cfg.sigma)


def distance_cutoff(cfg: NetworkConfig) -> float:
    """Radius beyond which every intra-cluster distance density is below eps.

    The farthest of 2K users has tail ``2K exp(-r^2/(2 sigma^2))``.
    """
    return cfg.sigma * math.sqrt(2.0 * math.log(cfg.n_users / cfg.quad_eps))


# ---------------------------------------------------------------------------
# Sampling


def default_window_radius(cfg: NetworkConfig) -> float:
    """Simulation disc: ten mean inter-BS spacings, and at least 20 R_L."""
    if cfg.lambda_c <= 0:
        return 20.0 * cfg.R_L
    return max(10.0 / math.sqrt(math.pi * cfg.lambda_c), 20.0 * cfg.R_L)


@dataclass(frozen=True)
class Realization:
    """One sampled network seen from the typical cluster.

    Arrays over interferers have shape ``(n_bs, 2K)``: every interfering base
    station gets its own beam offset and fading draw towards each of the 2K
    typical-cluster users.  Typical-cluster arrays are in sampling order (not
    sorted by distance).
    """

    bs_points: np.ndarray            # (n_bs, 2) interfering BSs; typical BS is the origin
    user_offsets: np.ndarray         # (2K, 2)
    user_angles: np.ndarray          # (2K,) spatial angles in [-1, 1]
    user_fading: np.ndarray          # (2K,) |g|^2 from the typical BS
    interferer_beam_offsets: np.ndarray  # (n_bs, 2K)
    interferer_fading: np.ndarray        # (n_bs, 2K)
    partner_uniform: float           # drives the random pick in FNRF / RNFF
    R_L: float

    @property
    def user_distances(self) -> np.ndarray:
        return np.hypot(self.user_offsets[:, 0], self.user_offsets[:, 1])

    @property
    def user_los(self) -> np.ndarray:
        return self.user_distances < self.R_L

    def interferer_distances(self) -> np.ndarray:
        diff = self.user_offsets[None, :, :] - self.bs_points[:, None, :]
        return np.hypot(diff[..., 0], diff[..., 1])

    @property
    def los_flags(self) -> np.ndarray:
        return self.interferer_distances() < self.R_L


def nakagami_power(rng: np.random.Generator, shape: np.ndarray | int, size) -> np.ndarray:
    """Unit-mean Gamma(N, 1/N) power gains."""
    shape = np.asarray(shape, dtype=float)
    return rng.gamma(shape, 1.0 / shape, size=size)


def sample_realization(cfg: NetworkConfig, window_radius: float | None = None,
                       rng_seed: int | np.random.SeedSequence | None = 0) -> Realization:
    rng = np.random.default_rng(rng_seed)
    if window_radius is None:
        window_radius = default_window_radius(cfg)
    return _sample_one(cfg, window_radius, rng)


def _sample_one(cfg: NetworkConfig, window_radius: float, rng: np.random.Generator) -> Realization:
    n_users = cfg.n_users
    offsets = rng.normal(0.0, cfg.sigma, size=(n_users, 2))
    angles = rng.uniform(-1.0, 1.0, size=n_users)
    dist = np.hypot(offsets[:, 0], offsets[:, 1])
    user_shape = np.where(dist < cfg.R_L, cfg.N_L, cfg.N_N)
    fading = nakagami_power(rng, user_shape, n_users)
    partner_u = rng.uniform()

    n_bs = rng.poisson(cfg.lambda_c * math.pi * window_radius**2) if cfg.lambda_c > 0 else 0
    radius = window_radius * np.sqrt(rng.uniform(size=n_bs))
    phi = rng.uniform(0.0, 2.0 * math.pi, size=n_bs)
    bs = np.column_stack([radius * np.cos(phi), radius * np.sin(phi)])
    beam = rng.uniform(-1.0, 1.0, size=(n_bs, n_users))
    diff = offsets[None, :, :] - bs[:, None, :]
    d_int = np.hypot(diff[..., 0], diff[..., 1])
    int_shape = np.where(d_int < cfg.R_L, cfg.N_L, cfg.N_N)
    int_fading = nakagami_power(rng, int_shape, (n_bs, n_users))
    return Realization(bs, offsets, angles, fading, beam, int_fading, float(partner_u), cfg.R_L)


def dump_realization(real: Realization, fh: TextIO) -> None:
    """Line-oriented text dump for debugging."""
    fh.write(f"# R_L {real.R_L!r}\n")
    fh.write(f"# partner_uniform {real.partner_uniform!r}\n")
    for idx, (off, ang, fad, los) in enumerate(
        zip(real.user_offsets, real.user_angles, real.user_fading, real.user_los)
    ):
        fh.write(f"user {idx} {off[0]!r} {off[1]!r} angle {ang!r} gain {fad!r} los {int(los)}\n")
    los_int = real.los_flags
    for b, point in enumerate(real.bs_points):
        offsets = " ".join(repr(x) for x in real.interferer_beam_offsets[b])
        gains = " ".join(repr(x) for x in real.interferer_fading[b])
        flags = " ".join(str(int(x)) for x in los_int[b])
        fh.write(f"bs {b} {point[0]!r} {point[1]!r} offsets {offsets} gains {gains} los {flags}\n")
