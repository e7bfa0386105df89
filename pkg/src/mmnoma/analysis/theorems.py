"""Coverage probabilities as one-dimensional integrals over user distance.

Every result has the form ``int Theta_L f dr`` over (0, R_L) plus
``int Theta_N f dr`` over (R_L, inf), where ``f`` is the marginal distance
density of the user in question.  For the randomly picked partner that
marginal is a uniform mixture of order-statistic densities (see
:mod:`mmnoma.geometry`), which is exactly what the nested integral over the
conditional densities evaluates to.  Far users are additionally averaged over
the beam offset ``g`` with a Gauss-Chebyshev rule of order ``n2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from ..config import NetworkConfig, RangeTag, classify_threshold_range
from ..geometry import distance_cutoff, far_marginal_pdf, near_marginal_pdf
from ..special import chebyshev_nodes, fejer_gain
from .laplace import LaplaceEvaluator, theta_kernel

METHODS = {
    "full": "theorem",
    "special1": "special1",
    "special2": "special2-closed-form",
    "special2-numeric": "special2-numeric",
}


@dataclass(frozen=True)
class CoverageResult:
    value: float
    raw_value: float
    method: str
    scheme: str
    role: str
    n1: int | None = None
    n2: int | None = None
    n_samples: int | None = None
    half_width: float | None = None

    def __float__(self) -> float:
        return self.value


def _result(raw: float, cfg: NetworkConfig, role: str, method: str, n1=None, n2=None) -> CoverageResult:
    raw = float(raw)
    return CoverageResult(
        value=min(1.0, max(0.0, raw)),
        raw_value=raw,
        method=method,
        scheme=cfg.scheme.label(cfg.K),
        role=role,
        n1=n1,
        n2=n2,
    )


def near_threshold(cfg: NetworkConfig) -> tuple[float, float]:
    """Binding (tau, beta) for the near user's joint SIC/decode event."""
    if classify_threshold_range(cfg) is RangeTag.R1:
        return cfg.tau_j, cfg.a_j - cfg.tau_j * cfg.a_k
    return cfg.tau_k, cfg.a_k


def far_threshold(cfg: NetworkConfig) -> tuple[float, float]:
    return cfg.tau_j, cfg.a_j - cfg.tau_j * cfg.a_k


def _laplace_for(cfg: NetworkConfig, mode: str, n1: int | None) -> LaplaceEvaluator:
    lap_mode = {"full": "full", "special1": "special1", "special2-numeric": "unity"}[mode]
    return LaplaceEvaluator(cfg, lap_mode, n1)


def integrate_distance(
    cfg: NetworkConfig,
    pdf: Callable[[np.ndarray], np.ndarray],
    tau: float,
    beta: np.ndarray,
    lap: LaplaceEvaluator,
    los_only: bool = False,
) -> np.ndarray:
    """``int Theta(r, tau, beta) f(r) dr`` for each entry of ``beta``.

    Entries with ``beta == 0`` (beam null towards the user) give 0.
    """
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    live = beta > 0
    out = np.zeros(beta.shape)
    if not np.any(live):
        return out
    b = beta[live]
    r_max = distance_cutoff(cfg)
    tol = cfg.quad_abs_tol

    def los(r):
        return theta_kernel(r, tau, b, "L", cfg, lap) * pdf(r)

    def nlos(r):
        return theta_kernel(r, tau, b, "N", cfg, lap) * pdf(r)

    total = np.zeros(b.shape)
    upper = min(cfg.R_L, r_max)
    total += integrate.quad_vec(los, 0.0, upper, epsabs=tol, epsrel=1e-10)[0]
    if not los_only and r_max > cfg.R_L:
        total += integrate.quad_vec(nlos, cfg.R_L, r_max, epsabs=tol, epsrel=1e-10)[0]
    out[live] = total
    return out


def near_coverage_value(cfg: NetworkConfig, tau: float, beta: float, mode: str = "full", n1: int | None = None) -> float:
    """Near-user style coverage ``P[h M beta L(r) > tau (I + noise)]``."""
    lap = _laplace_for(cfg, mode, n1)
    pdf = lambda r: near_marginal_pdf(cfg, r)  # noqa: E731
    los_only = mode == "special2-numeric"
    return float(integrate_distance(cfg, pdf, tau, np.array([beta]), lap, los_only)[0])


def far_coverage_value(
    cfg: NetworkConfig,
    tau: float,
    beta: float,
    mode: str = "full",
    n1: int | None = None,
    n2: int | None = None,
    aligned: bool = False,
) -> float:
    """Far-user coverage averaged over the serving beam's offset."""
    lap = _laplace_for(cfg, mode, n1)
    pdf = lambda r: far_marginal_pdf(cfg, r)  # noqa: E731
    los_only = mode == "special2-numeric"
    if aligned:
        return float(integrate_distance(cfg, pdf, tau, np.array([beta]), lap, los_only)[0])
    rule = chebyshev_nodes(cfg.n2 if n2 is None else n2)
    gains = beta * fejer_gain(rule.unit_nodes, cfg.M)
    per_node = integrate_distance(cfg, pdf, tau, gains, lap, los_only)
    return float(rule.integrate_unit(per_node))


def _check_mode(mode: str) -> None:
    if mode not in METHODS:
        raise ValueError(f"unknown mode {mode!r}; expected one of {sorted(METHODS)}")


def coverage_near_fnrf(cfg: NetworkConfig, mode: str = "full", n1: int | None = None) -> CoverageResult:
    """Near user of FNRF (and FNFF): the k-th nearest user."""
    _check_mode(mode)
    if mode == "special2":
        from .closed_form import coverage_near_fnrf_closed

        return coverage_near_fnrf_closed(cfg)
    tau, beta = near_threshold(cfg)
    n1_used = cfg.n1 if n1 is None else n1
    return _result(near_coverage_value(cfg, tau, beta, mode, n1), cfg, "near", METHODS[mode], n1=n1_used)


def coverage_near_rnff(cfg: NetworkConfig, mode: str = "full", n1: int | None = None) -> CoverageResult:
    """Near user of RNFF: uniformly one of the j-1 users inside the j-th."""
    _check_mode(mode)
    if mode == "special2":
        from .closed_form import coverage_near_rnff_closed

        return coverage_near_rnff_closed(cfg)
    tau, beta = near_threshold(cfg)
    n1_used = cfg.n1 if n1 is None else n1
    return _result(near_coverage_value(cfg, tau, beta, mode, n1), cfg, "near", METHODS[mode], n1=n1_used)


def coverage_far_fnrf(cfg: NetworkConfig, mode: str = "full", n1: int | None = None,
                      n2: int | None = None) -> CoverageResult:
    """Far user of FNRF: uniformly one of the 2K-k users beyond the k-th."""
    _check_mode(mode)
    if mode == "special2":
        from .closed_form import coverage_far_fnrf_closed

        return coverage_far_fnrf_closed(cfg, n2=n2)
    tau, beta = far_threshold(cfg)
    value = far_coverage_value(cfg, tau, beta, mode, n1, n2)
    return _result(value, cfg, "far", METHODS[mode], n1=cfg.n1 if n1 is None else n1,
                   n2=cfg.n2 if n2 is None else n2)


def coverage_far_rnff(cfg: NetworkConfig, mode: str = "full", n1: int | None = None,
                      n2: int | None = None) -> CoverageResult:
    """Far user of RNFF (and FNFF): the j-th nearest user."""
    _check_mode(mode)
    if mode == "special2":
        from .closed_form import coverage_far_rnff_closed

        return coverage_far_rnff_closed(cfg, n2=n2)
    tau, beta = far_threshold(cfg)
    value = far_coverage_value(cfg, tau, beta, mode, n1, n2)
    return _result(value, cfg, "far", METHODS[mode], n1=cfg.n1 if n1 is None else n1,
                   n2=cfg.n2 if n2 is None else n2)


def coverage(cfg: NetworkConfig, role: str, mode: str = "full", n1: int | None = None,
             n2: int | None = None) -> CoverageResult:
    """Dispatch on scheme and role.

    FNFF reuses the FNRF near-user and the RNFF far-user results, since its
    fixed users have the same distance laws.
    """
    kind = cfg.scheme.kind
    if role == "near":
        if kind == "RNFF":
            return coverage_near_rnff(cfg, mode, n1)
        return coverage_near_fnrf(cfg, mode, n1)
    if role == "far":
        if kind == "FNRF":
            return coverage_far_fnrf(cfg, mode, n1, n2)
        return coverage_far_rnff(cfg, mode, n1, n2)
    raise ValueError(f"role must be 'near' or 'far' (got {role!r})")


def user_coverage(cfg: NetworkConfig, role: str, tau: float, beta: float, mode: str = "full",
                  aligned: bool = False, n1: int | None = None, n2: int | None = None) -> float:
    """Unclamped coverage of the scheme's near or far user for explicit (tau, beta).

    ``beta`` multiplies the serving gain; far users additionally see the
    Fejer factor unless ``aligned`` is set.  Used by the OMA baseline, where
    the coefficients differ from the NOMA ones stored in ``cfg``.
    """
    _check_mode(mode)
    kind = cfg.scheme.kind
    if mode == "special2":
        from . import closed_form as cf

        if role == "near":
            if kind == "RNFF":
                return cf.rnff_near_sum(cfg, cfg.far_index, tau, beta)
            return float(cf.fixed_user_sum(cfg, cfg.near_index, tau, beta)[0])
        if kind == "FNRF":
            per_gain = lambda g: cf.fnrf_far_sum(cfg, cfg.near_index, tau, g)  # noqa: E731
        else:
            per_gain = lambda g: cf.fixed_user_sum(cfg, cfg.far_index, tau, g)  # noqa: E731
        if aligned:
            return float(per_gain(np.array([beta]))[0])
        rule = chebyshev_nodes(cfg.n2 if n2 is None else n2)
        return float(rule.integrate_unit(per_gain(beta * fejer_gain(rule.unit_nodes, cfg.M))))
    if role == "near":
        return near_coverage_value(cfg, tau, beta, mode, n1)
    if role == "far":
        return far_coverage_value(cfg, tau, beta, mode, n1, n2, aligned)
    raise ValueError(f"role must be 'near' or 'far' (got {role!r})")
