"""Path loss, beamforming gains and NOMA SINRs for sampled networks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import NetworkConfig
from .geometry import Realization
from .special import fejer_gain


@dataclass(frozen=True)
class PathLossLaw:
    """Two-branch law: LOS inside the disc of radius ``R_L``, NLOS outside."""

    C_L: float
    C_N: float
    alpha_L: float
    alpha_N: float
    R_L: float

    @classmethod
    def from_config(cls, cfg: NetworkConfig) -> "PathLossLaw":
        return cls(cfg.C_L, cfg.C_N, cfg.alpha_L, cfg.alpha_N, cfg.R_L)


def path_loss(r, law: PathLossLaw):
    """``C_L r^-alpha_L`` for r < R_L, else ``C_N r^-alpha_N`` (r = R_L is NLOS)."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("distance must be positive")
    out = np.where(r < law.R_L, law.C_L * r ** (-law.alpha_L), law.C_N * r ** (-law.alpha_N))
    return float(out) if out.ndim == 0 else out


def effective_gain_aligned(g2, M: int):
    out = M * np.asarray(g2, dtype=float)
    return float(out) if out.ndim == 0 else out


def effective_gain_misaligned(g2, M: int, delta):
    out = M * np.asarray(g2, dtype=float) * fejer_gain(delta, M)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class SinrTriple:
    gamma_k: float
    gamma_k_to_j: float
    gamma_j: float


def noma_sinrs(signal_k, signal_j, interference_k, interference_j, a_k: float, a_j: float, noise: float):
    """Vectorized SINRs from received powers (all normalized by P_t).

    ``signal_k`` is the near user's aligned gain times path loss; ``signal_j``
    already includes the Fejer factor of the misaligned beam.
    """
    signal_k = np.asarray(signal_k, dtype=float)
    signal_j = np.asarray(signal_j, dtype=float)
    den_k = np.asarray(interference_k, dtype=float) + noise
    den_j = np.asarray(interference_j, dtype=float) + noise
    gamma_k_to_j = a_j * signal_k / (a_k * signal_k + den_k)
    gamma_k = a_k * signal_k / den_k
    gamma_j = a_j * signal_j / (a_k * signal_j + den_j)
    return gamma_k, gamma_k_to_j, gamma_j


def inter_cluster_interference(real: Realization, cfg: NetworkConfig) -> np.ndarray:
    """Aggregate interference at each typical-cluster user, shape (2K,)."""
    if real.bs_points.shape[0] == 0:
        return np.zeros(real.user_offsets.shape[0])
    law = PathLossLaw.from_config(cfg)
    d = real.interferer_distances()
    gain = cfg.M * real.interferer_fading * fejer_gain(real.interferer_beam_offsets, cfg.M)
    return np.sum(gain * path_loss(d, law), axis=0)


def compute_sinrs(real: Realization, cfg: NetworkConfig, pair: tuple[int, int]) -> SinrTriple:
    """SINRs for the users at distance ranks ``pair = (k, j)`` (1-based, k < j)."""
    k, j = pair
    n_users = real.user_offsets.shape[0]
    if not 1 <= k < j <= n_users:
        raise ValueError(f"invalid pair {pair!r} for {n_users} users")
    order = np.argsort(real.user_distances, kind="stable")
    ik, ij = order[k - 1], order[j - 1]
    law = PathLossLaw.from_config(cfg)
    dist = real.user_distances
    interference = inter_cluster_interference(real, cfg)
    sig_k = effective_gain_aligned(real.user_fading[ik], cfg.M) * path_loss(dist[ik], law)
    offset = real.user_angles[ik] - real.user_angles[ij]
    sig_j = effective_gain_misaligned(real.user_fading[ij], cfg.M, offset) * path_loss(dist[ij], law)
    g_k, g_kj, g_j = noma_sinrs(sig_k, sig_j, interference[ik], interference[ij], cfg.a_k, cfg.a_j,
                                cfg.noise_normalized)
    return SinrTriple(float(g_k), float(g_kj), float(g_j))
