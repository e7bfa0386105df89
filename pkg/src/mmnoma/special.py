"""Numerical kernels used by the coverage formulas."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sp


class DomainError(ValueError):
    pass


def gauss_2f1(a, b, c, z):
    """Gauss hypergeometric function 2F1(a, b; c; z) for real z < 1.

    Accepts scalars or arrays (broadcast).  Raises :class:`DomainError` for
    ``z >= 1`` or when ``c`` is a non-positive integer.
    """
    z_arr = np.asarray(z, dtype=float)
    c_arr = np.asarray(c, dtype=float)
    if np.any(z_arr >= 1.0):
        raise DomainError("2F1 is only evaluated for z < 1")
    if np.any((c_arr <= 0) & (c_arr == np.round(c_arr))):
        raise DomainError("c must not be a non-positive integer")
    out = sp.hyp2f1(a, b, c, z_arr)
    if np.ndim(out) == 0:
        return float(out)
    return out


def digamma(x):
    """Psi function for x > 0."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr <= 0):
        raise DomainError("digamma is only evaluated for x > 0")
    out = sp.digamma(x_arr)
    if np.ndim(out) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class ChebyshevRule:
    """First-kind Gauss-Chebyshev nodes on (-1, 1).

    ``integrate(f)`` approximates the plain integral of ``f`` over [-1, 1] as
    ``(pi/n) sum f(x_i) sqrt(1 - x_i^2)``; ``integrate_unit`` does the same
    for [0, 1] through the map ``g = (x + 1)/2``.
    """

    n: int
    nodes: np.ndarray

    @property
    def weights(self) -> np.ndarray:
        return np.sqrt(1.0 - self.nodes**2)

    @property
    def unit_nodes(self) -> np.ndarray:
        return 0.5 * (self.nodes + 1.0)

    def integrate(self, values: np.ndarray, axis: int = -1) -> np.ndarray:
        values = np.moveaxis(np.asarray(values, dtype=float), axis, -1)
        return (math.pi / self.n) * np.sum(values * self.weights, axis=-1)

    def integrate_unit(self, values: np.ndarray, axis: int = -1) -> np.ndarray:
        return 0.5 * self.integrate(values, axis=axis)


def chebyshev_nodes(n: int) -> ChebyshevRule:
    if int(n) != n or n < 1:
        raise DomainError(f"Chebyshev order must be an integer >= 1 (got {n!r})")
    n = int(n)
    i = np.arange(1, n + 1)
    nodes = np.cos((2 * i - 1) * math.pi / (2 * n))
    # cos() leaves ~1e-17 residue at the symmetric midpoint.
    if n % 2 == 1:
        nodes[n // 2] = 0.0
    nodes.setflags(write=False)
    return ChebyshevRule(n, nodes)


def fejer_gain(delta, M: int):
    """Normalized Fejer kernel ``sin^2(pi M d/2) / (M^2 sin^2(pi d/2))``.

    Period two, peak 1 at even integers, zeros at ``d = 2m/M`` otherwise.
    """
    d = np.asarray(delta, dtype=float)
    # Reduce to [-1, 1) first so the small-angle branch sees true offsets.
    d = d - 2.0 * np.floor((d + 1.0) / 2.0)
    half = 0.5 * math.pi * d
    den = np.sin(half)
    small = np.abs(den) < 1e-9
    safe = np.where(small, 1.0, den)
    value = (np.sin(M * half) / (M * safe)) ** 2
    # sin(M x)/(M sin x) = 1 - (M^2 - 1) x^2 / 6 + O(x^4) near zero.
    limit = (1.0 - (M * M - 1.0) * half * half / 6.0) ** 2
    value = np.where(small, limit, value)
    value = np.clip(value, 0.0, 1.0)
    if value.ndim == 0:
        return float(value)
    return value
