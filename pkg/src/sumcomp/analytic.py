"""Closed-form error and complexity expressions for SumComp computation.

MSE and the MAE bound are sums over per-axis error magnitudes l of a
polynomial weight times Q((2l - 1) / (2 sigma_axis)), with sigma_axis equal to
sigma on the real axis and sigma/|rho| on the imaginary axis.  The grid
extent M enters through 1/M boundary terms; passing M=None drops those terms
and sums until Q underflows, which is the limit of an unbounded received grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .errors import OutOfAsymptoticRegime, ZeroTrueValue
from .nomographic import ModulusDescriptor, modulus_eval

# Q(x) < 1e-300 beyond x ~ 37; terms past this are exactly zero in double precision
_Q_CUTOFF = 40.0


def q_function(x):
    """Gaussian tail probability P(N(0,1) > x)."""
    if np.ndim(x) == 0:
        return 0.5 * math.erfc(float(x) / math.sqrt(2.0))
    return 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))


@dataclass(frozen=True)
class ErrorModelInputs:
    q1: int
    q2: int
    rho_abs: float
    M1: int | None
    M2: int | None
    sigma: float

    def __post_init__(self):
        if self.q1 < 1 or self.q2 < 1:
            raise ValueError("q1, q2 must be positive")
        if not self.rho_abs > 0:
            raise ValueError("|rho| must be positive")
        for M in (self.M1, self.M2):
            if M is not None and M < 1:
                raise ValueError("grid extents must be >= 1")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")


def _axis_terms(M: int | None, sigma_axis: float):
    """(l, Q_l) for the per-axis sums, with Q_l = Q((2l - 1) / (2 sigma_axis))."""
    if sigma_axis == 0:
        return np.zeros(0), np.zeros(0)
    top = int(math.ceil(_Q_CUTOFF * sigma_axis + 1))
    if M is not None:
        top = min(top, M - 1)
    ell = np.arange(1, top + 1, dtype=float)
    return ell, q_function((2 * ell - 1) / (2 * sigma_axis))


def alpha(M: int | None, sigma_axis: float) -> float:
    ell, Q = _axis_terms(M, sigma_axis)
    w = 2 * ell - 1
    if M is not None:
        w = w + (3 * ell * (1 - ell) - 1) / M
    return float(2 * np.sum(w * Q))


def beta(M: int | None, sigma_axis: float) -> float:
    ell, Q = _axis_terms(M, sigma_axis)
    w = np.ones_like(ell)
    if M is not None:
        w = w + (1 - 2 * ell) / M
    return float(2 * np.sum(w * Q))


def _sigmas(inp: ErrorModelInputs) -> tuple[float, float]:
    return inp.sigma, inp.sigma / inp.rho_abs


def mse_analytic(inp: ErrorModelInputs) -> float:
    s1, s2 = _sigmas(inp)
    return inp.q1 ** 2 * alpha(inp.M1, s1) + inp.q2 ** 2 * alpha(inp.M2, s2)


def _zeta_axis(M: int | None, sigma_axis: float, lump_tail: bool) -> float:
    if sigma_axis == 0:
        return 0.0
    top = int(math.ceil(_Q_CUTOFF * sigma_axis + 1))
    if M is not None:
        top = min(top, M - 1)
    ell = np.arange(1, top + 1, dtype=float)
    zeta = q_function((2 * ell - 1) / (2 * sigma_axis)) - q_function((2 * ell + 1) / (2 * sigma_axis))
    if lump_tail and M is not None and top == M - 1:
        # on an M-point axis no error exceeds M-1, so that magnitude takes the whole tail
        zeta[-1] = q_function((2 * ell[-1] - 1) / (2 * sigma_axis))
    weight = ell ** 2 if M is None else ell ** 2 - ell ** 3 / M
    return float(2 * np.sum(weight * zeta))


def mse_zeta_oracle(inp: ErrorModelInputs, lump_tail: bool = True) -> float:
    """MSE from per-magnitude error probabilities zeta(l).

    zeta(l) = Q((2l-1)/(2s)) - Q((2l+1)/(2s)) is the probability that rounding
    a Gaussian error lands l steps out on one side.  With ``lump_tail`` the last
    magnitude of a bounded axis also absorbs everything beyond it.
    """
    s1, s2 = _sigmas(inp)
    return (inp.q1 ** 2 * _zeta_axis(inp.M1, s1, lump_tail)
            + inp.q2 ** 2 * _zeta_axis(inp.M2, s2, lump_tail))


def zeta_boundary_term(inp: ErrorModelInputs) -> float:
    """mse_analytic - mse_zeta_oracle(lump_tail=False): the summation-by-parts remainder."""
    total = 0.0
    for q, M, s in ((inp.q1, inp.M1, inp.sigma), (inp.q2, inp.M2, inp.sigma / inp.rho_abs)):
        if M is None or M < 2 or s == 0:
            continue
        total += q ** 2 * 2 * (M - 1) ** 2 / M * q_function((2 * M - 1) / (2 * s))
    return total


def mae_bound(inp: ErrorModelInputs, w: ModulusDescriptor, scale: float = 1.0) -> float:
    """Upper bound on E|f - f_hat|; ``scale`` converts decoded-sum units to psi's argument."""
    s1, s2 = _sigmas(inp)
    inner = inp.q1 * beta(inp.M1, s1) + inp.q2 * beta(inp.M2, s2)
    return modulus_eval(w, scale * inner)


def nmse(true_vals, est_vals) -> float:
    """Mean over trials of |f - f_hat|^2 / |f| (denominator as defined for the comparison metric)."""
    f = np.asarray(true_vals, dtype=float)
    g = np.asarray(est_vals, dtype=float)
    if f.shape != g.shape:
        raise ValueError("true and estimated values differ in length")
    if np.any(f == 0):
        raise ZeroTrueValue("NMSE undefined for a zero true value")
    return float(np.mean(np.abs(f - g) ** 2 / np.abs(f)))


def lambert_w0(x: float) -> float:
    """Principal branch of the Lambert W function for x >= 0 (Halley iteration)."""
    if x < 0:
        raise ValueError("lambert_w0 is defined here for x >= 0")
    if x == 0:
        return 0.0
    if math.isinf(x):
        return math.inf
    w = math.log1p(x) if x < math.e else math.log(x) - math.log(math.log(x))
    if x >= math.e:
        w = max(w, 1.0)
    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1
        step = f / (ew * wp1 - (wp1 + 1) * f / (2 * wp1))
        w -= step
        if abs(step) <= 1e-15 * (1 + abs(w)):
            break
    return w


@dataclass(frozen=True)
class ComplexityInputs:
    K: int
    q: int
    a: float
    b: float
    E: tuple  # per-node derivative bounds of phi_k
    D: float  # derivative bound of psi

    def __post_init__(self):
        if self.K < 1 or self.q < 1 or not (self.a > 0 and self.b > 0 and self.D > 0):
            raise ValueError("complexity inputs must be positive")
        if len(self.E) != self.K or any(not e > 0 for e in self.E):
            raise ValueError("need one positive derivative bound per node")

    @classmethod
    def uniform(cls, K: int, q: int, a: float = 1.0, b: float = 1.0, E: float = 1.0,
                D: float = 1.0) -> ComplexityInputs:
        return cls(K, q, a, b, (E,) * K, D)


def _bops_term(bound: float, q: int, half_width_ln: float, half_width_w: float) -> float:
    arg = bound * q / (2 * half_width_ln * math.sqrt(2 * math.pi))
    if arg <= 1:
        raise OutOfAsymptoticRegime(f"log argument {arg:.6g} <= 1; q is too small for the estimate")
    L = math.log(arg)
    return L / lambert_w0(L / (2 * half_width_w * math.e))


def bops_encoder(inp: ComplexityInputs) -> float:
    return sum(_bops_term(e, inp.q, inp.a, inp.a) for e in inp.E)


def bops_decoder(inp: ComplexityInputs) -> float:
    # the ln argument uses a while the W argument uses b, as printed
    return _bops_term(inp.D, inp.q, inp.a, inp.b)


def log10_channelcomp_encoder(K: int, q: int, symmetric: bool = False) -> float:
    """log10 of the big-O SDP cost quoted for ChannelComp (no hidden constants)."""
    if symmetric:
        return 0.5 * math.log10(q) + 4 * (K + q - 1) * math.log10(math.e)
    return 0.5 * math.log10(K) + (8 * K + 0.5) * math.log10(q)


def log10_channelcomp_decoder(K: int, q: int) -> float:
    return K * math.log10(q)
