from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from strategies import symbols
from ymgap.symbols import (
    Ordering,
    PolySymbol,
    convert_ordering,
    diff,
    restrict_modes,
    star,
    star_antinormal,
    star_normal,
    star_weyl,
    weierstrass_transform,
)

Z = PolySymbol.z(1, 0)
ZB = PolySymbol.zbar(1, 0)
N1 = PolySymbol.number(1)
ONE = PolySymbol.constant(1, 1)


def mono(b, a, c=1):
    return PolySymbol.monomial((b,), (a,), c)


def test_arithmetic_examples():
    assert (N1 + (-1) * N1).is_zero()
    assert Z * ZB == N1
    assert N1 * N1 == mono(2, 2)


def test_mode_mismatch_rejected():
    with pytest.raises(ValueError):
        PolySymbol.z(1, 0) + PolySymbol.z(2, 0)


def test_diff_examples():
    assert diff(N1, 0) == ZB
    assert diff(mono(0, 2), 0, conjugate=True).is_zero()
    # d_z d_z* (z*^2 z^2) = 4 z* z
    assert diff(diff(mono(2, 2), 0), 0, conjugate=True) == 4 * N1


def test_weierstrass_examples():
    assert weierstrass_transform(mono(2, 2), 0) == mono(2, 2)
    assert weierstrass_transform(N1, -1) == N1 - 1
    # two-term series: z*^2 z^2 - 4 z* z + 2
    assert weierstrass_transform(mono(2, 2), -1) == mono(2, 2) - 4 * N1 + 2


def test_ordering_examples():
    assert convert_ordering(N1, "normal", "antinormal") == N1 - 1
    assert convert_ordering(N1, "antinormal", "weyl") == N1 + Fraction(1, 2)
    with pytest.raises(ValueError):
        convert_ordering(N1, "normal", "wick")


@given(symbols(max_degree=6, integer=True), st.sampled_from([-1, Fraction(-1, 2), Fraction(1, 2), 1]),
       st.sampled_from([-1, Fraction(-1, 2), Fraction(1, 2), 1]))
def test_weierstrass_semigroup(p, s, t):
    lhs = weierstrass_transform(weierstrass_transform(p, t), s)
    assert lhs == weierstrass_transform(p, s + t)


@given(symbols(max_degree=6, integer=True))
def test_ordering_routes_compose(p):
    direct = convert_ordering(p, "normal", "antinormal")
    via = convert_ordering(convert_ordering(p, "normal", "weyl"), "weyl", "antinormal")
    assert direct == via
    for a in Ordering:
        for b in Ordering:
            assert convert_ordering(convert_ordering(p, a, b), b, a) == p


def test_star_normal_examples():
    assert star_normal(ZB, Z) == N1
    # a a^dag = a^dag a + 1
    assert star_normal(Z, ZB) == N1 + 1
    # (a^dag a)^2 = a^dag^2 a^2 + a^dag a
    assert star_normal(N1, N1) == mono(2, 2) + N1


def test_star_antinormal_examples():
    p = mono(1, 2, 3) + 2
    assert star_antinormal(ONE, p) == p
    assert star_antinormal(Z, ZB) == N1
    # a^dag a = a a^dag - 1
    assert star_antinormal(ZB, Z) == N1 - 1


def test_star_weyl_examples():
    assert star_weyl(Z, ZB) - star_weyl(ZB, Z) == ONE
    p = mono(2, 1) + mono(0, 3, 5)
    assert star_weyl(p, ONE) == p
    # Weyl symbol of N^2 two ways
    n_weyl = convert_ordering(N1, "normal", "weyl")
    via_normal = convert_ordering(star_normal(N1, N1), "normal", "weyl")
    assert star_weyl(n_weyl, n_weyl) == via_normal


@given(symbols(integer=True), symbols(integer=True))
def test_star_products_agree_across_orderings(p2, p1):
    if p1.n_modes != p2.n_modes:
        p1 = PolySymbol(p2.n_modes, {})
    for tag in (Ordering.WEYL, Ordering.ANTINORMAL):
        lhs = convert_ordering(star_normal(p2, p1), "normal", tag)
        rhs = star(convert_ordering(p2, "normal", tag), convert_ordering(p1, "normal", tag), tag)
        assert lhs == rhs


@given(symbols(n_modes=2, integer=True), symbols(n_modes=2, integer=True), symbols(n_modes=2, integer=True))
def test_star_associative(p3, p2, p1):
    for tag in Ordering:
        assert star(star(p3, p2, tag), p1, tag) == star(p3, star(p2, p1, tag), tag)


@given(symbols(integer=True), st.integers(-4, 4))
def test_star_with_constant_is_multiplication(p, c):
    k = PolySymbol.constant(p.n_modes, c)
    for tag in Ordering:
        assert star(p, k, tag) == p * c
        assert star(k, p, tag) == p * c


def test_restrict_modes_examples():
    p = PolySymbol.number(3) * PolySymbol.number(3) + PolySymbol.z(3, 1, 2) + 7
    assert restrict_modes(p, [0, 1, 2]) == p
    assert restrict_modes(p, []) == PolySymbol.constant(0, 7)
    r = restrict_modes(p, [1])
    assert r == mono(2, 2) + PolySymbol.z(1, 0, 2) + 7


def test_text_round_trip():
    p = PolySymbol(2, {((1, 0), (0, 2)): 1.5 - 2j, ((0, 0), (0, 0)): 0.25})
    assert PolySymbol.from_text(p.to_text()) == p


def test_real_diagonal_detection():
    assert (N1 * 2 + Z + ZB).is_real_diagonal()
    assert not (Z * 1j + ZB).is_real_diagonal()
    assert (Z * 1j + ZB * -1j).is_real_diagonal()


@given(symbols(real_diagonal=True))
def test_real_diagonal_symbols_are_real_valued(p):
    rng = np.random.default_rng(0)
    zeta = rng.normal(size=p.n_modes) + 1j * rng.normal(size=p.n_modes)
    assert abs(p.evaluate(zeta).imag) <= 1e-12 * max(1.0, abs(p.evaluate(zeta)))
