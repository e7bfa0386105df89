"""Monte Carlo estimates of coverage and rate, plus the interference Laplace transform.

Realizations are drawn in fixed-size batches.  Batch ``b`` uses the stream
``SeedSequence(seed, spawn_key=(b,))``, so an estimate depends only on
``(cfg, n, seed)`` and not on how batches are spread over workers.  Counts
are integers and float partial sums are combined with ``math.fsum``, so the
reduction order does not matter either.

Per-user link samples depend only on geometry and channel fields.  They are
cached, so sweeps over noise or thresholds reuse the same draws (common
random numbers).
"""

from __future__ import annotations

import math
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import PathLossLaw, noma_sinrs, path_loss
from .config import NetworkConfig
from .geometry import default_window_radius
from .special import fejer_gain
from .throughput import RateRequirement, combine_rate, noma_config

BATCH_SIZE = 2000
_CACHE_SIZE = 6


@dataclass(frozen=True)
class McEstimate:
    mean: float
    half_width: float
    n_samples: int
    seed: int

    @property
    def std_error(self) -> float:
        return self.half_width / 1.96


def proportion_estimate(hits: int, n: int, seed: int) -> McEstimate:
    p = hits / n
    if hits in (0, n):
        hw = 3.0 / n
    else:
        hw = 1.96 * math.sqrt(p * (1.0 - p) / n)
    return McEstimate(p, hw, n, seed)


@dataclass(frozen=True)
class LinkSamples:
    """Per-realization quantities for the 2K users, sorted by distance."""

    distance: np.ndarray      # (n, 2K)
    signal: np.ndarray        # (n, 2K) M |g|^2 L(r), aligned beam
    interference: np.ndarray  # (n, 2K)
    angle: np.ndarray         # (n, 2K)
    partner_u: np.ndarray     # (n,)


def _batch_rng(seed: int, batch: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(batch,)))


def _batch_sizes(n: int) -> list[int]:
    full, rest = divmod(n, BATCH_SIZE)
    return [BATCH_SIZE] * full + ([rest] if rest else [])


def _gamma_power(rng: np.random.Generator, los: np.ndarray, cfg: NetworkConfig) -> np.ndarray:
    shape = np.where(los, float(cfg.N_L), float(cfg.N_N))
    return rng.gamma(shape, 1.0 / shape)


def _interference(rng: np.random.Generator, cfg: NetworkConfig, positions: np.ndarray, window: float) -> np.ndarray:
    """Interference at ``positions`` (b, u, 2) from an independent PPP per realization."""
    b, u, _ = positions.shape
    if cfg.lambda_c <= 0:
        return np.zeros((b, u))
    counts = rng.poisson(cfg.lambda_c * math.pi * window**2, size=b)
    total = int(counts.sum())
    owner = np.repeat(np.arange(b), counts)
    radius = window * np.sqrt(rng.uniform(size=total))
    phi = rng.uniform(0.0, 2.0 * math.pi, size=total)
    bs = np.column_stack([radius * np.cos(phi), radius * np.sin(phi)])
    diff = positions[owner] - bs[:, None, :]
    d = np.hypot(diff[..., 0], diff[..., 1])
    delta = rng.uniform(-1.0, 1.0, size=d.shape)
    fading = _gamma_power(rng, d < cfg.R_L, cfg)
    law = PathLossLaw.from_config(cfg)
    power = cfg.M * fading * fejer_gain(delta, cfg.M) * path_loss(d, law)
    out = np.empty((b, u))
    for col in range(u):
        out[:, col] = np.bincount(owner, weights=power[:, col], minlength=b)
    return out


def _sample_links(cfg: NetworkConfig, size: int, rng: np.random.Generator, window: float) -> LinkSamples:
    n_users = cfg.n_users
    offsets = rng.normal(0.0, cfg.sigma, size=(size, n_users, 2))
    angles = rng.uniform(-1.0, 1.0, size=(size, n_users))
    dist = np.hypot(offsets[..., 0], offsets[..., 1])
    fading = _gamma_power(rng, dist < cfg.R_L, cfg)
    partner = rng.uniform(size=size)
    interference = _interference(rng, cfg, offsets, window)
    signal = cfg.M * fading * path_loss(dist, PathLossLaw.from_config(cfg))
    order = np.argsort(dist, axis=1, kind="stable")
    take = lambda a: np.take_along_axis(a, order, axis=1)  # noqa: E731
    return LinkSamples(take(dist), take(signal), take(interference), take(angles), partner)


def _geometry_key(cfg: NetworkConfig, n: int, seed: int, window: float) -> tuple:
    return (cfg.lambda_c, cfg.sigma, cfg.K, cfg.R_L, cfg.alpha_L, cfg.alpha_N, cfg.N_L, cfg.N_N,
            cfg.M, cfg.C_L, cfg.C_N, n, seed, window)


_cache: OrderedDict = OrderedDict()


def clear_cache() -> None:
    _cache.clear()


def link_samples(cfg: NetworkConfig, n: int, seed: int, workers: int = 1,
                 window_radius: float | None = None) -> list[LinkSamples]:
    """Batched link samples, cached on the geometry/channel fields."""
    if n < 1:
        raise ValueError("n must be >= 1")
    window = default_window_radius(cfg) if window_radius is None else float(window_radius)
    key = _geometry_key(cfg, n, seed, window)
    if key in _cache:
        _cache.move_to_end(key)
        return _cache[key]
    sizes = _batch_sizes(n)

    def run(idx: int) -> LinkSamples:
        return _sample_links(cfg, sizes[idx], _batch_rng(seed, idx), window)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(run, range(len(sizes))))
    else:
        batches = [run(i) for i in range(len(sizes))]
    _cache[key] = batches
    while len(_cache) > _CACHE_SIZE:
        _cache.popitem(last=False)
    return batches


def _pair_indices(cfg: NetworkConfig, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """0-based (near, far) indices into the sorted users."""
    kind = cfg.scheme.kind
    n_users = cfg.n_users
    if kind == "RNFF":
        j = cfg.far_index
        near = np.minimum(np.floor(u * (j - 1)).astype(int), j - 2)
        far = np.full(u.shape, j - 1)
    else:
        k = cfg.near_index
        near = np.full(u.shape, k - 1)
        if kind == "FNRF":
            far = np.minimum(k + np.floor(u * (n_users - k)).astype(int), n_users - 1)
        else:
            far = np.full(u.shape, cfg.far_index - 1)
    return near, far


def _pick(a: np.ndarray, idx: np.ndarray) -> np.ndarray:
    return np.take_along_axis(a, idx[:, None], axis=1)[:, 0]


def _role_hits(batch: LinkSamples, cfg: NetworkConfig, role: str) -> int:
    near, far = _pair_indices(cfg, batch.partner_u)
    sig_k = _pick(batch.signal, near)
    offset = _pick(batch.angle, near) - _pick(batch.angle, far)
    sig_j = _pick(batch.signal, far) * fejer_gain(offset, cfg.M)
    g_k, g_kj, g_j = noma_sinrs(sig_k, sig_j, _pick(batch.interference, near), _pick(batch.interference, far),
                                cfg.a_k, cfg.a_j, cfg.noise_normalized)
    if role == "near":
        return int(np.count_nonzero((g_k > cfg.tau_k) & (g_kj > cfg.tau_j)))
    if role == "far":
        return int(np.count_nonzero(g_j > cfg.tau_j))
    raise ValueError(f"role must be 'near' or 'far' (got {role!r})")


def mc_coverage(cfg: NetworkConfig, role: str, n: int = 100_000, seed: int = 0, workers: int = 1) -> McEstimate:
    """Fraction of realizations in which the role's decoding event succeeds."""
    batches = link_samples(cfg, n, seed, workers)
    hits = sum(_role_hits(b, cfg, role) for b in batches)
    return proportion_estimate(hits, n, seed)


def _oma_hits(batch: LinkSamples, cfg: NetworkConfig, role: str, tau: float, aligned: bool) -> int:
    near, far = _pair_indices(cfg, batch.partner_u)
    if role == "near":
        sig, idx = _pick(batch.signal, near), near
    else:
        sig, idx = _pick(batch.signal, far), far
        if not aligned:
            sig = sig * fejer_gain(_pick(batch.angle, near) - _pick(batch.angle, far), cfg.M)
    sinr = sig / (_pick(batch.interference, idx) + cfg.noise_normalized)
    return int(np.count_nonzero(sinr > tau))


def mc_oma_coverage(cfg: NetworkConfig, role: str, tau: float, n: int = 100_000, seed: int = 0,
                    aligned_far_beam: bool = False, workers: int = 1) -> McEstimate:
    """Single-user (full power, no SIC) coverage of the scheme's near or far user."""
    batches = link_samples(cfg, n, seed, workers)
    hits = sum(_oma_hits(b, cfg, role, tau, aligned_far_beam) for b in batches)
    return proportion_estimate(hits, n, seed)


def mc_laplace(cfg: NetworkConfig, s, n: int = 100_000, seed: int = 0, workers: int = 1):
    """Empirical ``E[exp(-s I)]`` at one cluster user placed per the Gaussian law.

    ``s`` may be a scalar or a sequence; a sequence shares the same draws and
    returns a list of estimates.
    """
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(s_arr < 0):
        raise ValueError("s must be nonnegative")
    window = default_window_radius(cfg)
    sizes = _batch_sizes(n)

    def run(idx: int):
        rng = _batch_rng(seed, idx)
        pos = rng.normal(0.0, cfg.sigma, size=(sizes[idx], 1, 2))
        interference = _interference(rng, cfg, pos, window)[:, 0]
        vals = np.exp(-np.outer(interference, s_arr))
        return vals.sum(axis=0), (vals**2).sum(axis=0)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(i) for i in range(len(sizes))]
    out = []
    for col in range(s_arr.size):
        m1 = math.fsum(p[0][col] for p in parts) / n
        m2 = math.fsum(p[1][col] for p in parts) / n
        var = max(m2 - m1 * m1, 0.0)
        se = math.sqrt(var / n) if n > 1 else 0.0
        out.append(McEstimate(m1, 1.96 * se, n, seed))
    return out[0] if np.ndim(s) == 0 else out


def mc_system_rate(cfg: NetworkConfig, req: RateRequirement, n: int = 100_000, seed: int = 0,
                   access: str = "noma", aligned_far_beam: bool = False, workers: int = 1) -> float:
    """Coverage-weighted rate from Monte Carlo coverages (NOMA or OMA)."""
    if access == "noma":
        c = noma_config(cfg, req)
        p_near = mc_coverage(c, "near", n, seed, workers).mean
        p_far = mc_coverage(c, "far", n, seed, workers).mean
    elif access == "oma":
        tau_k, tau_j = req.oma_thresholds
        p_near = mc_oma_coverage(cfg, "near", tau_k, n, seed, workers=workers).mean
        p_far = mc_oma_coverage(cfg, "far", tau_j, n, seed, aligned_far_beam, workers).mean
    else:
        raise ValueError("access must be 'noma' or 'oma'")
    return combine_rate(req, p_near, p_far)
