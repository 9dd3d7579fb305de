"""SumComp encoder/decoder and modulation presets.

An input value c is encoded onto the line {(c*mu1 + k*q2, c*mu2 - k*q1) : k in Z}
of Gaussian integers; every point on that line carries the value
a*q1 + b*q2 = c, so symbol sums carry value sums.  A finite grid subset picks one
representative per value, and an affine map gamma2*x + gamma1 turns lattice
points into transmit symbols.
"""
from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable

import numpy as np

from .errors import EmptyLambda, NotPerfectSquare, UnknownPreset, ValueNotRepresentable
from .ring import (
    BezoutPair,
    GaussianInt,
    RingParams,
    RingPoint,
    extended_euclid,
    g_rho,
    g_rho_inverse,
    quantize_coords,
)


def encode_line(m: int, k: int, bezout: BezoutPair) -> GaussianInt:
    return GaussianInt(
        m * bezout.mu1 + k * bezout.q2,
        m * bezout.mu2 - k * bezout.q1,
    )


def value_of(g: GaussianInt, bezout: BezoutPair) -> int:
    return g.re * bezout.q1 + g.im * bezout.q2


@dataclass(frozen=True)
class GridSubset:
    points: frozenset

    def __post_init__(self):
        object.__setattr__(self, "points", frozenset((int(a), int(b)) for a, b in self.points))

    @classmethod
    def rectangular(cls, m1: int, m2: int, a0: int = 0, b0: int = 0) -> GridSubset:
        return cls(frozenset((a0 + i, b0 + j) for i in range(m1) for j in range(m2)))

    @property
    def extents(self) -> tuple[int, int]:
        """(M1, M2): number of integer positions spanned along each axis."""
        a = [p[0] for p in self.points]
        b = [p[1] for p in self.points]
        return max(a) - min(a) + 1, max(b) - min(b) + 1

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class Constellation:
    symbols: dict  # value -> complex symbol

    @property
    def order(self) -> int:
        return len(self.symbols)

    def points(self) -> np.ndarray:
        return np.array(list(self.symbols.values()), dtype=complex)


@dataclass(frozen=True)
class SumCompCode:
    bezout: BezoutPair
    params: RingParams
    grid: GridSubset
    gamma1: complex = 0j
    gamma2: complex = 1 + 0j
    values: tuple | None = None
    name: str = "custom"
    _reps: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.gamma2 == 0:
            raise ValueError("gamma2 must be non-zero")
        if len(self.grid) == 0:
            raise EmptyLambda("grid subset is empty")
        allowed = None if self.values is None else set(self.values)
        reps: dict[int, tuple[int, int]] = {}
        for a, b in sorted(self.grid.points):
            c = a * self.bezout.q1 + b * self.bezout.q2
            if allowed is not None and c not in allowed:
                continue
            # sorted iteration keeps the lexicographically smallest representative
            reps.setdefault(c, (a, b))
        if not reps:
            raise EmptyLambda("no grid point carries an allowed value")
        object.__setattr__(self, "_reps", dict(sorted(reps.items())))

    @property
    def q1(self) -> int:
        return self.bezout.q1

    @property
    def q2(self) -> int:
        return self.bezout.q2

    @property
    def order(self) -> int:
        return len(self._reps)

    def representative(self, c: int) -> GaussianInt:
        try:
            a, b = self._reps[c]
        except KeyError:
            raise ValueNotRepresentable(f"value {c} has no point in the grid of {self.name}") from None
        return GaussianInt(a, b)

    def representatives_of(self, c: int) -> list[GaussianInt]:
        """All grid points carrying value c (more than one for duplicated values)."""
        return [GaussianInt(a, b) for a, b in sorted(self.grid.points)
                if a * self.q1 + b * self.q2 == c]

    @cached_property
    def value_array(self) -> np.ndarray:
        return np.array(list(self._reps), dtype=np.int64)

    @cached_property
    def lattice_array(self) -> np.ndarray:
        return np.array(list(self._reps.values()), dtype=np.int64)

    @cached_property
    def symbol_array(self) -> np.ndarray:
        ab = self.lattice_array
        return self.gamma2 * (ab[:, 0] + ab[:, 1] * self.params.rho * 1j) + self.gamma1

    @cached_property
    def constellation(self) -> Constellation:
        return Constellation(dict(zip(self.value_array.tolist(), self.symbol_array.tolist())))

    @cached_property
    def box(self) -> tuple[int, int, int, int]:
        """(a_min, a_max, b_min, b_max) over the representatives."""
        ab = self.lattice_array
        return int(ab[:, 0].min()), int(ab[:, 0].max()), int(ab[:, 1].min()), int(ab[:, 1].max())

    def aggregate_extents(self, K: int) -> tuple[int, int]:
        """Per-axis number of lattice positions reachable by a K-fold symbol sum."""
        a0, a1, b0, b1 = self.box
        return K * (a1 - a0) + 1, K * (b1 - b0) + 1


def build_code(q1: int, q2: int, rho: complex, grid: GridSubset, gamma1: complex = 0,
               gamma2: complex = 1, values: Iterable[int] | None = None,
               name: str = "custom") -> SumCompCode:
    bezout = extended_euclid(q1, q2)
    if not isinstance(grid, GridSubset):
        grid = GridSubset(frozenset(grid))
    return SumCompCode(bezout, RingParams(rho), grid, complex(gamma1), complex(gamma2),
                       None if values is None else tuple(values), name)


def centered(code: SumCompCode) -> SumCompCode:
    """Same code with the constellation centroid moved to the origin."""
    ab = code.lattice_array
    # integer sums keep the centroid exact when it is representable
    ca = float(Fraction(int(ab[:, 0].sum()), code.order))
    cb = float(Fraction(int(ab[:, 1].sum()), code.order))
    centroid = code.gamma2 * (ca + cb * code.params.rho * 1j)
    return SumCompCode(code.bezout, code.params, code.grid, -complex(centroid), code.gamma2,
                       code.values, code.name + "-centered")


def encode(c: int, code: SumCompCode) -> complex:
    return code.gamma2 * g_rho(code.representative(c), code.params) + code.gamma1


def encode_array(c: np.ndarray, code: SumCompCode) -> np.ndarray:
    """Vectorized encode; c must hold representable values."""
    idx = np.searchsorted(code.value_array, c)
    idx = np.clip(idx, 0, len(code.value_array) - 1)
    if np.any(code.value_array[idx] != c):
        bad = np.asarray(c)[code.value_array[idx] != c].ravel()[0]
        raise ValueNotRepresentable(f"value {bad} has no point in the grid of {code.name}")
    return code.symbol_array[idx]


def denormalize(r, K: int, code: SumCompCode):
    """Undo the affine map: (r - K*gamma1) / gamma2.

    Division is the full inverse gamma2^* / |gamma2|^2, not only the phase.
    """
    return (r - K * code.gamma1) / code.gamma2


def restrict_to_box(a, b, K: int, code: SumCompCode):
    """Clip lattice coordinates to the box reachable by K summed representatives."""
    a0, a1, b0, b1 = code.box
    return np.clip(a, K * a0, K * a1), np.clip(b, K * b0, K * b1)


def decode_sum(r_lattice: RingPoint, K: int, code: SumCompCode, restrict: bool = True) -> int:
    """Value carried by a quantized, de-normalized received point.

    The gamma1 offset is removed beforehand by ``denormalize``; here K only
    bounds the box of reachable sums.  For one-dimensional codes (PAM) the box
    has zero height, which reproduces the real-part-only PAM decoder.
    """
    a, b = r_lattice.a, r_lattice.b
    if restrict:
        a, b = (int(v) for v in restrict_to_box(a, b, K, code))
    return value_of(g_rho_inverse(RingPoint(a, b, r_lattice.params)), code.bezout)


def decode_received(r: complex, K: int, code: SumCompCode, restrict: bool = True) -> int:
    """Full receive chain for one superposed symbol: denormalize, quantize, decode."""
    from .ring import quantize_to_ring

    point = quantize_to_ring(denormalize(r, K, code), code.params)
    return decode_sum(point, K, code, restrict)


def decode_array(r: np.ndarray, K: int, code: SumCompCode, restrict: bool = True) -> np.ndarray:
    a, b = quantize_coords(denormalize(np.asarray(r), K, code), code.params)
    if restrict:
        a, b = restrict_to_box(a, b, K, code)
    return a * code.q1 + b * code.q2


# ---------------------------------------------------------------- presets

def qam_preset(q: int, centered_: bool = False) -> SumCompCode:
    side = math.isqrt(q)
    if q < 4 or side * side != q:
        raise NotPerfectSquare(f"QAM order {q} is not a perfect square >= 4")
    grid = GridSubset.rectangular(side, side)
    code = build_code(1, side, 1.0, grid, gamma1=-side * (1 + 1j), values=range(q), name=f"qam{q}")
    return centered(code) if centered_ else code


def pam_preset(q: int, centered_: bool = False) -> SumCompCode:
    if q < 2:
        raise ValueError("PAM order must be >= 2")
    grid = GridSubset.rectangular(q, 1)
    code = build_code(1, q, 1.0, grid, gamma1=-(q // 2), values=range(q), name=f"pam{q}")
    return centered(code) if centered_ else code


# 2-4-2 layout of the 8-point hexagonal QAM, in (a, b) lattice coordinates
HEX8_GRID = GridSubset(frozenset({(0, 0), (1, 0), (-1, 1), (0, 1), (1, 1), (2, 1), (0, 2), (1, 2)}))


def hex_qam8_preset(variant: str, centered_: bool = False, rho: complex = 1.0) -> SumCompCode:
    variant = variant.upper()
    if variant == "A":
        code = build_code(2, 3, rho, HEX8_GRID, name="hex8a")
    elif variant == "B":
        code = build_code(1, 2, rho, HEX8_GRID, name="hex8b")
    else:
        raise UnknownPreset(f"hexagonal QAM-8 variant {variant!r}")
    return centered(code) if centered_ else code


@lru_cache(maxsize=None)
def preset_code(name: str, centered_: bool = False) -> SumCompCode:
    """Look up a modulation preset by id: qamN, pamN, hex8a, hex8b."""
    key = name.lower().replace("-", "")
    m = re.fullmatch(r"(qam|pam)(\d+)", key)
    if m:
        q = int(m.group(2))
        return qam_preset(q, centered_) if m.group(1) == "qam" else pam_preset(q, centered_)
    if key in ("hex8a", "hexa"):
        return hex_qam8_preset("A", centered_)
    if key in ("hex8b", "hexb"):
        return hex_qam8_preset("B", centered_)
    raise UnknownPreset(f"unknown modulation preset {name!r}")


def gray_pam4_baseline(s: int, Es: float) -> float:
    """Gray-labelled PAM-4 amplitude used to show destructive overlaps."""
    if s not in (0, 1, 2, 3):
        raise ValueError("s must be in {0, 1, 2, 3}")
    if Es <= 0:
        raise ValueError("Es must be positive")
    return (s + s // 2 - 2 * (s // 3) - 3) * Es / 2


def constellation_energy(c: Constellation) -> float:
    pts = c.points()
    return float(np.mean(np.abs(pts) ** 2))


def exact_energy(code: SumCompCode, spacing=1) -> Fraction:
    """Mean symbol energy in rational arithmetic, with gamma2 replaced by ``spacing``.

    Requires a real rho; rho and gamma1 are taken as exact binary fractions.
    """
    if code.params.rho.imag != 0 or code.gamma2.imag != 0:
        raise ValueError("exact energy needs real rho and gamma2")
    rho = Fraction(code.params.rho.real)
    g2 = Fraction(code.gamma2.real)
    # offset expressed in lattice units
    o_re, o_im = Fraction(code.gamma1.real) / g2, Fraction(code.gamma1.imag) / g2
    total = sum((a + o_re) ** 2 + (b * rho + o_im) ** 2 for a, b in code.lattice_array.tolist())
    return Fraction(spacing) ** 2 * total / code.order


def constellation_csv(code: SumCompCode) -> str:
    """CSV text with rows (c, re, im), one per constellation symbol."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["c", "re", "im"])
    for c, x in code.constellation.symbols.items():
        w.writerow([c, f"{x.real:.9g}", f"{x.imag:.9g}"])
    return buf.getvalue()
