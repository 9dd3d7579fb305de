"""Exact lattice arithmetic on Gaussian integers and the ring Z[rho].

Points of Z[rho] are written a + b*rho*i with integer (a, b); the basis is
{1, rho*i}.  All types here are immutable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import NotCoprime


@dataclass(frozen=True)
class GaussianInt:
    re: int
    im: int

    def __add__(self, other: GaussianInt) -> GaussianInt:
        return GaussianInt(self.re + other.re, self.im + other.im)

    def __neg__(self) -> GaussianInt:
        return GaussianInt(-self.re, -self.im)

    def __sub__(self, other: GaussianInt) -> GaussianInt:
        return self + (-other)

    def __iter__(self):
        yield self.re
        yield self.im


@dataclass(frozen=True)
class RingParams:
    rho: complex = 1.0

    def __post_init__(self):
        rho = complex(self.rho)
        object.__setattr__(self, "rho", rho)
        if abs(rho) == 0:
            raise ValueError("rho must be non-zero")
        if rho.real == 0:
            # rho*i would be real: the lattice collapses onto one axis
            raise ValueError(f"rho={rho} is purely imaginary; {{1, rho*i}} is degenerate")

    @property
    def basis(self) -> np.ndarray:
        """Columns are the real 2-vectors of 1 and rho*i."""
        v = self.rho * 1j
        return np.array([[1.0, v.real], [0.0, v.imag]])

    @cached_property
    def _reduced(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        basis, unimodular = lagrange_reduce(self.basis)
        return basis, np.linalg.inv(basis), unimodular


@dataclass(frozen=True)
class RingPoint:
    a: int
    b: int
    params: RingParams

    @property
    def value(self) -> complex:
        return self.a + self.b * self.params.rho * 1j


@dataclass(frozen=True)
class BezoutPair:
    q1: int
    q2: int
    mu1: int
    mu2: int

    def __post_init__(self):
        if self.q1 < 1 or self.q2 < 1:
            raise ValueError("q1 and q2 must be positive")
        if math.gcd(self.q1, self.q2) != 1:
            raise NotCoprime(f"gcd({self.q1}, {self.q2}) != 1")
        if self.q1 * self.mu1 + self.q2 * self.mu2 != 1:
            raise ValueError("Bezout identity violated")

    def shifted(self, k: int) -> BezoutPair:
        """Another valid pair, (mu1 + k*q2, mu2 - k*q1)."""
        return BezoutPair(self.q1, self.q2, self.mu1 + k * self.q2, self.mu2 - k * self.q1)


def extended_euclid(q1: int, q2: int) -> BezoutPair:
    """Bezout coefficients of a coprime pair, normalized to 0 <= mu1 < q2."""
    if q1 < 1 or q2 < 1:
        raise ValueError("extended_euclid expects positive integers")
    try:
        # the modular inverse is already the canonical mu1 in [0, q2)
        mu1 = pow(q1, -1, q2)
    except ValueError:
        raise NotCoprime(f"gcd({q1}, {q2}) = {math.gcd(q1, q2)}") from None
    return BezoutPair(q1, q2, mu1, (1 - q1 * mu1) // q2)


def g_rho(g: GaussianInt, params: RingParams) -> complex:
    return g.re + g.im * params.rho * 1j


def g_rho_inverse(p: RingPoint) -> GaussianInt:
    return GaussianInt(p.a, p.b)


def round_half_away(x):
    """Elementwise rounding with ties sent away from zero."""
    x = np.asarray(x, dtype=float)
    return np.copysign(np.floor(np.abs(x) + 0.5), x)


def lagrange_reduce(basis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Lagrange-Gauss reduction of a 2-D basis (columns).

    Returns (reduced, U) with reduced = basis @ U and U unimodular.
    """
    b = np.array(basis, dtype=float)
    u = np.eye(2, dtype=np.int64)
    for _ in range(200):
        if b[:, 0] @ b[:, 0] > b[:, 1] @ b[:, 1]:
            b = b[:, ::-1].copy()
            u = u[:, ::-1].copy()
        m = round(float(b[:, 0] @ b[:, 1]) / float(b[:, 0] @ b[:, 0]))
        if m == 0:
            break
        b[:, 1] -= m * b[:, 0]
        u[:, 1] -= m * u[:, 0]
    return b, u


_OFFSETS = np.array([(0, 0)] + [(i, j) for i in (-1, 0, 1) for j in (-1, 0, 1) if (i, j) != (0, 0)])


def quantize_coords(mu, params: RingParams) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized nearest-point quantizer; returns integer lattice coordinates (a, b).

    Rounds the coordinates in a reduced basis, then searches the 3x3 integer
    neighborhood.  The rounded candidate is checked first and only displaced
    by a strictly closer point, so exact ties resolve half away from zero.
    """
    mu = np.asarray(mu, dtype=complex)
    shape = mu.shape
    mu = mu.ravel()
    reduced, inv, unimodular = params._reduced
    target = np.stack([mu.real, mu.imag])
    centre = round_half_away(inv @ target)

    best = centre.copy()
    best_d = np.full(mu.shape, np.inf)
    for off in _OFFSETS:
        cand = centre + off[:, None]
        d = np.sum((reduced @ cand - target) ** 2, axis=0)
        better = d < best_d
        best[:, better] = cand[:, better]
        best_d = np.where(better, d, best_d)

    ab = unimodular @ best.astype(np.int64)
    return ab[0].reshape(shape), ab[1].reshape(shape)


def quantize_to_ring(mu: complex, params: RingParams) -> RingPoint:
    a, b = quantize_coords(np.array([mu]), params)
    return RingPoint(int(a[0]), int(b[0]), params)
