"""System rate of a NOMA pair and of its OMA baseline.

A user whose SINR clears ``2^(R/B) - 1`` is credited its full target rate
``R``; the system rate is the coverage-weighted sum over the pair.  In OMA
each user owns half the band, so its threshold becomes ``2^(2R/B) - 1``, and
it receives the whole power budget without any SIC step.
"""

from __future__ import annotations

from dataclasses import dataclass

from .analysis.theorems import user_coverage
from .config import ConfigError, NetworkConfig


@dataclass(frozen=True)
class RateRequirement:
    R_k: float
    R_j: float
    B: float

    def __post_init__(self):
        for name in ("R_k", "R_j", "B"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive (got {getattr(self, name)!r})")

    @property
    def noma_thresholds(self) -> tuple[float, float]:
        return rate_to_threshold(self.R_k, self.B), rate_to_threshold(self.R_j, self.B)

    @property
    def oma_thresholds(self) -> tuple[float, float]:
        return rate_to_threshold(self.R_k, self.B / 2), rate_to_threshold(self.R_j, self.B / 2)


def rate_to_threshold(R: float, B_eff: float) -> float:
    """SINR needed to carry ``R`` bit/s over ``B_eff`` Hz."""
    if not (R > 0 and B_eff > 0):
        raise ValueError("rate and bandwidth must be positive")
    return 2.0 ** (R / B_eff) - 1.0


def noma_config(cfg: NetworkConfig, req: RateRequirement) -> NetworkConfig:
    """``cfg`` with thresholds derived from the rate targets."""
    tau_k, tau_j = req.noma_thresholds
    try:
        return cfg.with_updates(tau_k=tau_k, tau_j=tau_j, bandwidth=req.B)
    except ConfigError as exc:
        raise ConfigError(f"rate targets infeasible for NOMA: {exc}") from exc


def noma_coverages(cfg: NetworkConfig, req: RateRequirement, mode: str = "full") -> tuple[float, float]:
    from .analysis.theorems import coverage

    c = noma_config(cfg, req)
    return coverage(c, "near", mode).value, coverage(c, "far", mode).value


def oma_coverages(cfg: NetworkConfig, req: RateRequirement, mode: str = "full",
                  aligned_far_beam: bool = False) -> tuple[float, float]:
    """Single-user coverages with full power and half the bandwidth.

    By default the beam stays on the near user, so the far user keeps the
    Fejer factor of its offset; ``aligned_far_beam`` points a beam at each
    user in its own slot instead.
    """
    tau_k, tau_j = req.oma_thresholds
    near = user_coverage(cfg, "near", tau_k, 1.0, mode)
    far = user_coverage(cfg, "far", tau_j, 1.0, mode, aligned=aligned_far_beam)
    clamp = lambda p: min(1.0, max(0.0, p))  # noqa: E731
    return clamp(near), clamp(far)


def combine_rate(req: RateRequirement, p_near: float, p_far: float) -> float:
    return req.R_k * p_near + req.R_j * p_far


def system_rate_noma(cfg: NetworkConfig, req: RateRequirement, mode: str = "full") -> float:
    return combine_rate(req, *noma_coverages(cfg, req, mode))


def system_rate_oma(cfg: NetworkConfig, req: RateRequirement, mode: str = "full",
                    aligned_far_beam: bool = False) -> float:
    return combine_rate(req, *oma_coverages(cfg, req, mode, aligned_far_beam))
