"""Closed forms for sparse networks.

With interference ignored (``L_I = 1``), NLOS users counted as never
covered and ``alpha_L = 2``, the distance integrals become Gaussian-type and
reduce to finite sums.  Each ``*_sum`` helper takes the effective gains
explicitly so the OMA baseline can reuse them.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from ..config import ConfigError, NetworkConfig
from ..geometry import order_coefficient
from ..special import chebyshev_nodes, digamma, fejer_gain
from .laplace import psi_constant
from .theorems import CoverageResult, _result, far_threshold, near_threshold


def _require_alpha2(cfg: NetworkConfig) -> None:
    if cfg.alpha_L != 2:
        raise ConfigError(f"closed forms require alpha_L = 2 (got {cfg.alpha_L})")


def _noise_rate(cfg: NetworkConfig, n: int, tau: float, gains: np.ndarray) -> np.ndarray:
    """``n psi tau sigma_n^2 / (gain M C_L)``; infinite where the gain is zero."""
    psi = psi_constant(cfg.N_L)
    with np.errstate(divide="ignore"):
        return np.where(gains > 0, n * psi * tau * cfg.noise_normalized / (np.where(gains > 0, gains, 1.0) * cfg.M * cfg.C_L), np.inf)


def _one_minus_exp_over(a: np.ndarray, R2: float) -> np.ndarray:
    """(1 - exp(-a R^2)) / a, with the a -> inf limit 0."""
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(np.isfinite(a), -np.expm1(-a * R2) / np.where(np.isfinite(a), a, 1.0), 0.0)


def fixed_user_sum(cfg: NetworkConfig, i: int, tau: float, gains) -> np.ndarray:
    """LOS coverage of the i-th nearest user for each effective gain."""
    _require_alpha2(cfg)
    gains = np.atleast_1d(np.asarray(gains, dtype=float))
    s2 = cfg.sigma**2
    R2 = cfg.R_L**2
    gamma = order_coefficient(i, cfg.n_users) / 2.0
    total = np.zeros(gains.shape)
    for n in range(1, cfg.N_L + 1):
        c = _noise_rate(cfg, n, tau, gains)
        for w in range(i):
            a = c + (cfg.n_users - w) / (2.0 * s2)
            sign = (-1) ** (n + i - w)
            total += sign * math.comb(i - 1, w) * math.comb(cfg.N_L, n) * gamma / s2 * _one_minus_exp_over(a, R2)
    return total


def fnrf_far_sum(cfg: NetworkConfig, k: int, tau: float, gains) -> np.ndarray:
    """LOS coverage of a far user drawn uniformly from ranks k+1..2K."""
    _require_alpha2(cfg)
    gains = np.atleast_1d(np.asarray(gains, dtype=float))
    s2 = cfg.sigma**2
    R2 = cfg.R_L**2
    coef = order_coefficient(k, cfg.n_users)
    total = np.zeros(gains.shape)
    live = gains > 0
    for n in range(1, cfg.N_L + 1):
        c = _noise_rate(cfg, n, tau, gains)
        q = np.where(live, c, 0.0) + 1.0 / (2.0 * s2)
        inner = np.zeros(gains.shape)
        for w in range(k):
            chi = (cfg.n_users - w - 1) / (2.0 * s2)
            bracket = -np.expm1(-(q + chi) * R2) / (q + chi) - np.exp(-q * R2) * (-np.expm1(-chi * R2)) / chi
            inner += (-1) ** (k - 1 - w) * math.comb(k - 1, w) * bracket
        term = (-1) ** (n + 1) * math.comb(cfg.N_L, n) * coef / (4.0 * s2 * s2 * q) * inner
        total += np.where(live, term, 0.0)
    return total


def _omega(delta: float, cfg: NetworkConfig) -> float:
    s2 = cfg.sigma**2
    return digamma(2.0 * s2 * delta) + math.exp(-delta * cfg.R_L**2) / (2.0 * s2 * delta)


def rnff_near_sum(cfg: NetworkConfig, j: int, tau: float, beta: float) -> float:
    """LOS coverage of a near user drawn uniformly from ranks 1..j-1.

    Drops terms of order ``exp(-R_L^2 / (2 sigma^2))``.
    """
    _require_alpha2(cfg)
    if math.exp(-cfg.R_L**2 / (2.0 * cfg.sigma**2)) > 1e-3:
        warnings.warn("exp(-R_L^2/(2 sigma^2)) > 1e-3: the RNFF near-user closed form loses accuracy",
                      RuntimeWarning, stacklevel=2)
    s2 = cfg.sigma**2
    gamma = order_coefficient(j, cfg.n_users) / 2.0
    total = 0.0
    for n in range(1, cfg.N_L + 1):
        a3 = float(_noise_rate(cfg, n, tau, np.array([beta]))[0]) + 1.0 / (2.0 * s2)
        for w in range(j):
            a_w = (cfg.n_users - w) / (2.0 * s2)
            sign = (-1) ** (n + j - w)
            total += (sign * math.comb(j - 1, w) * math.comb(cfg.N_L, n) * gamma / (s2 * a3)
                      * (_omega(a_w + a3, cfg) - _omega(a_w, cfg)))
    return total


def _beam_average(cfg: NetworkConfig, per_gain, beta: float, n2: int | None) -> tuple[float, int]:
    rule = chebyshev_nodes(cfg.n2 if n2 is None else n2)
    gains = beta * fejer_gain(rule.unit_nodes, cfg.M)
    return float(rule.integrate_unit(per_gain(gains))), rule.n


def coverage_near_fnrf_closed(cfg: NetworkConfig) -> CoverageResult:
    tau, beta = near_threshold(cfg)
    raw = fixed_user_sum(cfg, cfg.near_index, tau, beta)[0]
    return _result(raw, cfg, "near", "special2-closed-form")


def coverage_near_rnff_closed(cfg: NetworkConfig) -> CoverageResult:
    tau, beta = near_threshold(cfg)
    raw = rnff_near_sum(cfg, cfg.far_index, tau, beta)
    return _result(raw, cfg, "near", "special2-closed-form")


def coverage_far_fnrf_closed(cfg: NetworkConfig, n2: int | None = None) -> CoverageResult:
    tau, beta = far_threshold(cfg)
    raw, n = _beam_average(cfg, lambda g: fnrf_far_sum(cfg, cfg.near_index, tau, g), beta, n2)
    return _result(raw, cfg, "far", "special2-closed-form", n2=n)


def coverage_far_rnff_closed(cfg: NetworkConfig, n2: int | None = None) -> CoverageResult:
    tau, beta = far_threshold(cfg)
    raw, n = _beam_average(cfg, lambda g: fixed_user_sum(cfg, cfg.far_index, tau, g), beta, n2)
    return _result(raw, cfg, "far", "special2-closed-form", n2=n)
