"""Nomographic function presets f(s) = psi(sum_k phi(s_k)), uniform input quantization,
and modulus-of-continuity descriptors used by the MAE bound."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import UnknownPreset


@dataclass(frozen=True)
class ModulusDescriptor:
    kind: str  # "identity" | "lipschitz" | "hoelder"
    L: float = 1.0
    C: float = 1.0
    alpha: float = 1.0

    def __post_init__(self):
        if self.kind not in ("identity", "lipschitz", "hoelder"):
            raise ValueError(f"unknown modulus kind {self.kind!r}")
        if self.kind == "lipschitz" and not self.L > 0:
            raise ValueError("Lipschitz constant must be positive")
        if self.kind == "hoelder" and not (self.C > 0 and 0 < self.alpha <= 1):
            raise ValueError("Hoelder modulus needs C > 0 and alpha in (0, 1]")

    @classmethod
    def identity(cls) -> ModulusDescriptor:
        return cls("identity")

    @classmethod
    def lipschitz(cls, L: float) -> ModulusDescriptor:
        return cls("lipschitz", L=float(L))

    @classmethod
    def hoelder(cls, C: float, alpha: float) -> ModulusDescriptor:
        return cls("hoelder", C=float(C), alpha=float(alpha))


def modulus_eval(w: ModulusDescriptor, t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("modulus is evaluated at t >= 0 only")
    if w.kind == "identity":
        out = t
    elif w.kind == "lipschitz":
        out = w.L * t
    else:
        out = w.C * t ** w.alpha
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class UniformQuantizer:
    lo: float
    hi: float
    q: int

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("quantizer needs lo < hi")
        if self.q < 2:
            raise ValueError("quantizer needs at least two levels")

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / (self.q - 1)

    def quantize_many(self, c) -> tuple[np.ndarray, int]:
        """Levels for an array of values, plus how many were clamped into range."""
        c = np.asarray(c, dtype=float)
        saturated = int(np.count_nonzero((c < self.lo) | (c > self.hi)))
        x = (np.clip(c, self.lo, self.hi) - self.lo) / self.step
        # half-away rounding; x >= 0 here
        return np.floor(x + 0.5).astype(np.int64), saturated


def quantize_pre(c: float, quant: UniformQuantizer) -> int:
    levels, _ = quant.quantize_many(np.array([c]))
    return int(levels[0])


def dequantize(level, quant: UniformQuantizer):
    out = quant.lo + np.asarray(level, dtype=float) * quant.step
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class NomographicSpec:
    name: str
    K: int
    phi: Callable
    psi: Callable
    modulus: ModulusDescriptor
    input_domain: tuple[float, float]
    exact: Callable  # the target function, applied along the last axis
    phi_inverse: Callable
    p0: float | None = None
    approx_eps: float = 0.0  # sup |psi(sum phi) - f| on the domain

    def evaluate(self, s) -> np.ndarray:
        """psi(sum_k phi(s_k)) along the last axis, without quantization."""
        return self.psi(np.sum(self.phi(np.asarray(s, dtype=float)), axis=-1))

    def quantizer(self, q: int) -> UniformQuantizer:
        """Quantizer spanning the exact image of phi over the input domain."""
        lo, hi = self.input_domain
        return UniformQuantizer(float(self.phi(lo)), float(self.phi(hi)), q)

    def sum_range(self, q: int) -> tuple[float, float]:
        quant = self.quantizer(q)
        return self.K * quant.lo, self.K * quant.hi


PRESETS = ("arithmetic_mean", "arithmetic_sum", "geometric_mean", "max_approx", "euclidean_norm")


def preset(name: str, K: int, input_domain: tuple[float, float] | None = None,
           p0: float = 1e3) -> NomographicSpec:
    """Nomographic preset for K nodes.  All phi are increasing on their domains."""
    if K < 1:
        raise ValueError("K must be positive")
    if name == "arithmetic_mean":
        dom = input_domain or (0.0, 63.0)
        return NomographicSpec(name, K, lambda s: s, lambda x: x / K, ModulusDescriptor.lipschitz(1 / K),
                               dom, lambda s: np.mean(s, axis=-1), lambda x: x)
    if name == "arithmetic_sum":
        dom = input_domain or (0.0, 63.0)
        return NomographicSpec(name, K, lambda s: s, lambda x: x, ModulusDescriptor.identity(),
                               dom, lambda s: np.sum(s, axis=-1), lambda x: x)
    if name == "euclidean_norm":
        dom = input_domain or (1.0, 8.0)
        if dom[0] < 0:
            raise ValueError("euclidean_norm needs a nonnegative domain for phi to be monotone")
        return NomographicSpec(name, K, np.square, lambda x: np.sqrt(np.maximum(x, 0.0)),
                               ModulusDescriptor.hoelder(1.0, 0.5), dom,
                               lambda s: np.sqrt(np.sum(np.square(s), axis=-1)), np.sqrt)
    if name == "geometric_mean":
        dom = input_domain or (1.0, 8.0)
        if dom[0] <= 0:
            raise ValueError("geometric_mean needs a positive domain")
        d = 1.0 / p0
        # psi' = exp(x/K)/K is at most (hi + d)/K on the reachable sum range
        return NomographicSpec(name, K, lambda s: np.log(s + d), lambda x: np.exp(x / K),
                               ModulusDescriptor.lipschitz((dom[1] + d) / K), dom,
                               lambda s: np.exp(np.mean(np.log(s), axis=-1)), lambda x: np.exp(x) - d,
                               p0=p0, approx_eps=(1 + dom[1] / dom[0]) * d)
    if name == "max_approx":
        dom = input_domain or (0.0, 4.0)
        theta = K * math.exp(dom[0])  # smallest reachable value of sum exp(s_k)
        return NomographicSpec(name, K, np.exp, np.log, ModulusDescriptor.lipschitz(1 / theta), dom,
                               lambda s: np.max(s, axis=-1), np.log, approx_eps=math.log(K))
    raise UnknownPreset(f"unknown nomographic preset {name!r}")
