"""Gaussian multiple-access channel: superposition, noise, fading with channel
inversion, and the orthogonal (OFDMA) baseline.

Noise is circularly symmetric with standard deviation sigma on each of the
real and imaginary components, so the total noise power is 2*sigma**2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateConstellation, ZeroChannel

H_FLOOR = 1e-6


@dataclass(frozen=True)
class ChannelConfig:
    snr_db: float
    sigma: float
    fading: str | None = None  # None or "rayleigh"
    seed: int = 0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if self.fading not in (None, "rayleigh"):
            raise ValueError(f"unknown fading mode {self.fading!r}")

    @classmethod
    def from_snr(cls, points, snr_db: float, fading: str | None = None, seed: int = 0) -> ChannelConfig:
        return cls(snr_db, sigma_from_snr(points, snr_db), fading, seed)


def sigma_from_snr(points, snr_db: float) -> float:
    """Per-component noise std giving the requested SNR for a constellation.

    ``points`` is a Constellation or an array of its symbols.
    """
    pts = points.points() if hasattr(points, "points") else np.asarray(points, dtype=complex)
    energy = float(np.sum(np.abs(pts) ** 2))
    if not energy > 0:
        raise DegenerateConstellation("constellation has zero energy")
    if math.isinf(snr_db) and snr_db > 0:
        return 0.0
    return math.sqrt(energy / (len(pts) * 10 ** (snr_db / 10)))


def complex_noise(sigma: float, rng: np.random.Generator, size=None):
    n = rng.standard_normal(size=(2,) if size is None else (2,) + tuple(np.atleast_1d(size)))
    z = sigma * (n[0] + 1j * n[1])
    return complex(z) if size is None else z


def transmit_mac(symbols, sigma: float, rng: np.random.Generator) -> complex:
    return complex(np.sum(np.asarray(symbols, dtype=complex))) + complex_noise(sigma, rng)


def transmit_faded(symbols, h, sigma: float, rng: np.random.Generator) -> complex:
    """MAC with fading h_k, each node pre-equalizing with p_k = conj(h_k)/|h_k|^2."""
    h = np.asarray(h, dtype=complex)
    if np.any(np.abs(h) < H_FLOOR):
        raise ZeroChannel(f"channel magnitude below {H_FLOOR}")
    p = np.conj(h) / np.abs(h) ** 2
    return transmit_mac(h * p * np.asarray(symbols, dtype=complex), sigma, rng)


def transmit_ofdma(symbols, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """One orthogonal slot per node, each with its own noise draw."""
    x = np.asarray(symbols, dtype=complex)
    return x + complex_noise(sigma, rng, x.shape)


def rayleigh(K: int, rng: np.random.Generator) -> np.ndarray:
    """K unit-power Rayleigh fading coefficients."""
    return (rng.standard_normal(K) + 1j * rng.standard_normal(K)) / math.sqrt(2)


# batched forms used by the harness: rows are trials, columns nodes

def mac_batch(symbols: np.ndarray, sigma: float, rng: np.random.Generator) -> np.ndarray:
    s = np.sum(symbols, axis=-1)
    return s + complex_noise(sigma, rng, s.shape)


def ofdma_batch(symbols: np.ndarray, sigma: float, rng: np.random.Generator) -> np.ndarray:
    return symbols + complex_noise(sigma, rng, symbols.shape)
