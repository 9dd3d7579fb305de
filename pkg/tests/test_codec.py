import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sumcomp.codec import (
    HEX8_GRID,
    GridSubset,
    build_code,
    constellation_csv,
    constellation_energy,
    decode_array,
    decode_received,
    decode_sum,
    denormalize,
    encode,
    encode_array,
    encode_line,
    exact_energy,
    gray_pam4_baseline,
    hex_qam8_preset,
    pam_preset,
    preset_code,
    qam_preset,
    value_of,
)
from sumcomp.errors import EmptyLambda, NotCoprime, NotPerfectSquare, UnknownPreset, ValueNotRepresentable
from sumcomp.ring import GaussianInt, RingParams, RingPoint, extended_euclid, quantize_to_ring

from oracles import brute_values, qam_eq8

ALL_PRESETS = ["qam16", "qam64", "qam256", "pam4", "pam5", "pam16", "pam64", "hex8a", "hex8b"]


def test_encode_line_examples():
    assert encode_line(0, 0, extended_euclid(3, 7)) == GaussianInt(0, 0)
    assert encode_line(1, 0, extended_euclid(1, 4)) == GaussianInt(1, 0)
    g = encode_line(4, 1, extended_euclid(2, 3))
    assert g == GaussianInt(11, -6)
    assert value_of(g, extended_euclid(2, 3)) == 4


def test_value_of_examples():
    bp = extended_euclid(1, 4)
    assert value_of(GaussianInt(0, 0), bp) == 0
    assert value_of(GaussianInt(-3, -3), bp) == -15


@given(st.integers(-1000, 1000), st.integers(-1000, 1000),
       st.sampled_from([(1, 4), (2, 3), (3, 5), (1, 16), (7, 9)]))
def test_value_of_encode_line(m, k, q):
    bp = extended_euclid(*q)
    assert value_of(encode_line(m, k, bp), bp) == m


@given(st.integers(-50, 50), st.integers(-3, 3), st.integers(-5, 5),
       st.sampled_from([(1, 4), (2, 3), (3, 5), (5, 8)]))
def test_bezout_choice_invariance(m, shift, k, q):
    bp = extended_euclid(*q)
    alt = bp.shifted(shift)
    assert value_of(encode_line(m, k, alt), alt) == value_of(encode_line(m, k, bp), bp) == m


def test_build_code_errors():
    with pytest.raises(EmptyLambda):
        build_code(1, 4, 1, GridSubset(frozenset()))
    with pytest.raises(NotCoprime):
        build_code(2, 4, 1, GridSubset.rectangular(2, 2))


def test_qam16_matches_closed_form():
    code = qam_preset(16)
    for c in range(16):
        assert encode(c, code) == qam_eq8(c, 16)
    assert encode(0, code) == -4 - 4j
    assert encode(5, code) == -3 - 3j
    assert encode(15, code) == -1 - 1j
    assert len(set(code.symbol_array.tolist())) == 16
    with pytest.raises(NotPerfectSquare):
        qam_preset(15)


def test_pam_examples():
    assert encode(3, pam_preset(5)) == 1
    assert sorted(pam_preset(5).symbol_array.real.tolist()) == [-2, -1, 0, 1, 2]
    assert sorted(pam_preset(4).symbol_array.real.tolist()) == [-2, -1, 0, 1]
    code = pam_preset(2)
    assert decode_received(3 * encode(1, code), 3, code) == 3


def test_denormalize_examples():
    plain = build_code(1, 4, 1, GridSubset.rectangular(4, 4))
    assert denormalize(3 + 2j, 5, plain) == 3 + 2j
    scaled = build_code(1, 4, 1, GridSubset.rectangular(4, 4), gamma2=2)
    assert denormalize(4 + 2j, 7, scaled) == 2 + 1j
    shifted = build_code(1, 4, 1, GridSubset.rectangular(4, 4), gamma1=1 + 1j)
    assert denormalize(5 + 4j, 3, shifted) == 2 + 1j


def test_denormalize_full_inverse_of_complex_scale():
    code = build_code(1, 4, 1, GridSubset.rectangular(4, 4), gamma1=0.3 - 2j, gamma2=1.5 + 2j)
    for c1, c2 in itertools.product(range(16), repeat=2):
        r = encode(c1, code) + encode(c2, code)
        assert decode_received(r, 2, code) == c1 + c2


def test_decode_sum_examples():
    pam5 = pam_preset(5)
    r = encode(3, pam5) + encode(4, pam5)
    assert r == 3
    assert decode_received(r, 2, pam5) == 7
    q16 = qam_preset(16)
    assert decode_received(encode(5, q16) + encode(7, q16), 2, q16) == 12
    hexa = hex_qam8_preset("A")
    assert decode_received(encode(3, hexa) + encode(5, hexa), 2, hexa) == 8


def test_decode_sum_on_ring_point():
    code = qam_preset(16)
    mu = denormalize(encode(9, code), 1, code)
    assert decode_sum(quantize_to_ring(mu, code.params), 1, code) == 9
    # a point outside the reachable box is pulled back onto it
    assert decode_sum(RingPoint(-2, 0, code.params), 1, code) == 0
    assert decode_sum(RingPoint(-2, 0, code.params), 1, code, restrict=False) == -2


def test_hex_variant_a():
    code = hex_qam8_preset("A")
    assert (code.q1, code.q2) == (2, 3)
    assert code.value_array.tolist() == [0, 1, 2, 3, 5, 6, 7, 8]
    with pytest.raises(ValueNotRepresentable):
        encode(4, code)


def test_hex_variant_b_duplicates():
    code = hex_qam8_preset("B")
    assert (code.q1, code.q2) == (1, 2)
    assert code.value_array.tolist() == [0, 1, 2, 3, 4, 5]
    vals = brute_values(HEX8_GRID.points, 1, 2)
    assert len(vals[1]) == 2 and len(vals[4]) == 2
    assert len(code.representatives_of(1)) == 2
    for c in (1, 4):
        rep = code.representative(c)
        assert (rep.re, rep.im) == min(vals[c])
    with pytest.raises(UnknownPreset):
        hex_qam8_preset("C")


@pytest.mark.parametrize("name", ALL_PRESETS)
def test_group_property_exhaustive(name):
    code = preset_code(name)
    vals = code.value_array.tolist()
    for c1, c2 in itertools.product(vals, repeat=2):
        g = code.representative(c1) + code.representative(c2)
        assert value_of(g, code.bezout) == c1 + c2


@pytest.mark.parametrize("name", ALL_PRESETS)
@pytest.mark.parametrize("centered", [False, True])
def test_noiseless_end_to_end(name, centered):
    code = preset_code(name, centered)
    rng = np.random.default_rng(3)
    for K in (1, 2, 10, 100):
        c = code.value_array[rng.integers(0, code.order, size=(200, K))]
        r = encode_array(c, code).sum(axis=1)
        assert np.array_equal(decode_array(r, K, code), c.sum(axis=1))


def test_encode_array_rejects_unrepresentable():
    with pytest.raises(ValueNotRepresentable):
        encode_array(np.array([0, 4]), hex_qam8_preset("A"))


def test_preset_lookup():
    assert preset_code("QAM-64").order == 64
    assert preset_code("hex8b").name == "hex8b"
    with pytest.raises(UnknownPreset):
        preset_code("psk8")


def test_gray_pam4():
    assert gray_pam4_baseline(0, 2) == -3
    assert gray_pam4_baseline(2, 2) == 0
    x = lambda s: gray_pam4_baseline(s, 2)
    assert x(1) + x(1) == x(0) + x(3)
    with pytest.raises(ValueError):
        gray_pam4_baseline(4, 2)


def test_constellation_energy_examples():
    single = build_code(1, 2, 1, GridSubset(frozenset({(0, 0)})))
    assert constellation_energy(single.constellation) == 0
    # centered PAM-8 with unit spacing: (64 - 1)/12
    assert constellation_energy(preset_code("pam8", True).constellation) == pytest.approx(63 / 12)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 8, 16, 64, 1024])
def test_pam_energy_exact(q):
    A = Fraction(3, 7)
    assert exact_energy(pam_preset(q, True), A) == Fraction(q * q - 1, 12) * A * A


@pytest.mark.parametrize("q", [4, 16, 64, 256, 1024])
def test_qam_energy_exact(q):
    A = Fraction(5, 2)
    assert exact_energy(qam_preset(q, True), A) == Fraction(q - 1, 6) * A * A


def test_centering_moves_centroid_to_origin():
    for name in ALL_PRESETS:
        code = preset_code(name, True)
        assert abs(np.mean(code.symbol_array)) < 1e-12


def test_constellation_csv():
    text = constellation_csv(qam_preset(16)).splitlines()
    assert text[0] == "c,re,im"
    assert text[1] == "0,-4,-4"
    assert len(text) == 17
