"""Laplace transform of the inter-cluster interference.

Interfering BSs form a PPP of density ``lambda_c``; each points its beam at a
uniformly random angle, so a typical interferer contributes
``M |h|^2 G_F(g) L(r)`` with ``g`` uniform on [0, 1] after folding by evenness.
The radial integral has a closed form in 2F1; the average over ``g`` uses a
Gauss-Chebyshev rule of order ``n1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..config import ConfigError, NetworkConfig
from ..special import chebyshev_nodes, fejer_gain, gauss_2f1

MODES = ("full", "special1", "unity")

# rho_L(v) -> 1 as v -> inf; beyond this cap the remaining error is < 1e-13.
_V_CAP = 1e15


def rho_L(v, N_L: int, alpha_L: float):
    """Normalized LOS radial integral: (2/R_L^2) int_0^R_L (1 + a r^-alpha)^-N r dr."""
    v = np.minimum(np.asarray(v, dtype=float), _V_CAP)
    b = N_L + 2.0 / alpha_L
    return gauss_2f1(N_L, b, b + 1.0, -v) * 2.0 * v**N_L / (alpha_L * N_L + 2.0)


def rho_N(v, N_N: int, alpha_N: float):
    """NLOS counterpart: 1 + (2/R_L^2) int_R_L^inf [1 - (1 + a r^-alpha)^-N] r dr."""
    d = 2.0 / alpha_N
    return gauss_2f1(-d, N_N, 1.0 - d, -np.asarray(v, dtype=float))


def f_alpha(v, N_L: int):
    """The alpha_L = 2 reduction of ``-rho_L``; ``1 + f_alpha(v) = 1 - rho_L(1/v)``."""
    v = np.asarray(v, dtype=float)
    out = -1.0 / (1.0 + v) ** (N_L - 1)
    partial = np.zeros_like(v)
    for m in range(1, N_L):
        partial = partial + 1.0 / ((1.0 + v) ** (N_L - m) * (N_L - m))
    with np.errstate(divide="ignore", invalid="ignore"):
        log_term = np.where(v > 0, np.log1p(1.0 / np.where(v > 0, v, 1.0)), 0.0)
        out = out - N_L * v * (partial - log_term)
    return out


def interference_kernel_full(s, g, cfg: NetworkConfig):
    """G^I(s, g): bracket of the exponent for one beam offset ``g``."""
    s = np.asarray(s, dtype=float)
    gain = cfg.M * fejer_gain(g, cfg.M)
    x = s * gain
    v_n = x * cfg.C_N / (cfg.N_N * cfg.R_L**cfg.alpha_N)
    with np.errstate(divide="ignore"):
        v_l = np.where(x > 0, cfg.N_L * cfg.R_L**cfg.alpha_L / (np.where(x > 0, x, 1.0) * cfg.C_L), np.inf)
    return rho_N(v_n, cfg.N_N, cfg.alpha_N) - rho_L(v_l, cfg.N_L, cfg.alpha_L)


def interference_kernel_special1(s, g, cfg: NetworkConfig):
    """LOS-only kernel for alpha_L = 2, written with elementary functions."""
    s = np.asarray(s, dtype=float)
    v = s * cfg.M * fejer_gain(g, cfg.M) * cfg.C_L / (cfg.N_L * cfg.R_L**2)
    return 1.0 + f_alpha(v, cfg.N_L)


@dataclass(frozen=True)
class LaplaceEvaluator:
    """Callable ``s -> L_I(s)`` for one configuration.

    ``mode`` is ``full`` (LOS and NLOS interferers), ``special1`` (LOS only,
    alpha_L = 2) or ``unity`` (interference ignored, ``L_I = 1``).
    """

    cfg: NetworkConfig
    mode: str = "full"
    n1: int | None = None
    _rule: object = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown Laplace mode {self.mode!r}; expected one of {MODES}")
        if self.mode == "special1" and self.cfg.alpha_L != 2:
            raise ConfigError(f"special1 requires alpha_L = 2 (got {self.cfg.alpha_L})")
        object.__setattr__(self, "_rule", chebyshev_nodes(self.order))

    @property
    def order(self) -> int:
        return self.cfg.n1 if self.n1 is None else int(self.n1)

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        if np.any(s < 0):
            raise ValueError("Laplace argument must be nonnegative")
        if self.mode == "unity" or self.cfg.lambda_c == 0:
            out = np.ones_like(s)
            return float(out) if out.ndim == 0 else out
        kernel = interference_kernel_full if self.mode == "full" else interference_kernel_special1
        g = self._rule.unit_nodes
        vals = kernel(s[..., None], g, self.cfg)
        # Folded average over g in [0, 1] of 2 pi lambda int (...) r dr.
        exponent = (math.pi**2 * self.cfg.lambda_c * self.cfg.R_L**2 / (2.0 * self._rule.n)) * np.sum(
            vals * self._rule.weights, axis=-1
        )
        out = np.where(s > 0, np.exp(-exponent), 1.0)
        return float(out) if out.ndim == 0 else out


def laplace_full(s, cfg: NetworkConfig, n1: int | None = None):
    return LaplaceEvaluator(cfg, "full", n1)(s)


def laplace_special1(s, cfg: NetworkConfig, n1: int | None = None):
    return LaplaceEvaluator(cfg, "special1", n1)(s)


def psi_constant(N: int) -> float:
    """Alzer constant ``N (N!)^(-1/N)``."""
    return N * math.factorial(N) ** (-1.0 / N)


def _neumaier_sum(terms: np.ndarray) -> np.ndarray:
    """Compensated sum along axis 0."""
    total = np.zeros(terms.shape[1:])
    comp = np.zeros(terms.shape[1:])
    for t in terms:
        new = total + t
        comp = comp + np.where(np.abs(total) >= np.abs(t), (total - new) + t, (t - new) + total)
        total = new
    return total + comp


def theta_kernel(r, tau: float, beta, branch: str, cfg: NetworkConfig, lap: LaplaceEvaluator | None = None):
    """Conditional coverage at distance ``r`` for effective coefficient ``beta``.

    ``P[h M beta L(r) > tau (I + noise)]`` with the Gamma tail replaced by
    Alzer's bound.  ``r`` and ``beta`` broadcast against each other.
    """
    if branch not in ("L", "N"):
        raise ValueError("branch must be 'L' or 'N'")
    beta = np.asarray(beta, dtype=float)
    if np.any(beta <= 0):
        raise ValueError("beta must be positive (NOMA infeasible)")
    if lap is None:
        lap = LaplaceEvaluator(cfg, "full")
    r = np.asarray(r, dtype=float)
    if branch == "L":
        N, alpha, C = cfg.N_L, cfg.alpha_L, cfg.C_L
    else:
        N, alpha, C = cfg.N_N, cfg.alpha_N, cfg.C_N
    psi = psi_constant(N)
    base = psi * tau * r**alpha / (beta * cfg.M * C)
    terms = []
    for n in range(1, N + 1):
        s = n * base
        terms.append((-1) ** (n + 1) * math.comb(N, n) * np.exp(-s * cfg.noise_normalized) * lap(s))
    out = _neumaier_sum(np.stack(terms))
    return float(out) if out.ndim == 0 else out
