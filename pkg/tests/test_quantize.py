import cmath

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from strategies import random_symbol, rel_max_diff, symbols
from ymgap.fock import enumerate_basis
from ymgap.quantize import (
    coherent_matrix_element,
    galerkin_compress,
    quantize,
    toeplitz_quantize,
    truncation_safe_window,
)
from ymgap.symbols import PolySymbol, convert_ordering, real_coordinates, restrict_modes
from ymgap.yangmills import quartic_symbol, su2_algebra

N1 = PolySymbol.number(1)


def diag(op):
    return op.toarray().diagonal()


def test_number_symbol_in_each_ordering():
    b = enumerate_basis(1, 3)
    assert np.array_equal(diag(quantize(N1, "antinormal", b)), [1, 2, 3, 4])
    assert np.array_equal(diag(quantize(N1, "normal", b)), [0, 1, 2, 3])
    assert np.allclose(diag(quantize(N1, "weyl", b)), [0.5, 1.5, 2.5, 3.5])


def test_mode_mismatch():
    with pytest.raises(ValueError):
        quantize(N1, "normal", enumerate_basis(2, 2))
    with pytest.raises(ValueError):
        toeplitz_quantize(N1, enumerate_basis(2, 2))


@given(symbols(real_diagonal=True), st.sampled_from(["normal", "weyl", "antinormal"]), st.integers(2, 6))
def test_hermitian_matrices_exactly_symmetric(p, tag, D):
    op = quantize(p, tag, enumerate_basis(p.n_modes, D))
    assert op.hermitian
    m = op.toarray()
    assert np.array_equal(m, m.conj().T)


@given(symbols(max_degree=4), st.sampled_from(["normal", "weyl", "antinormal"]))
def test_ordering_routes_commute_with_quantize(p, tag):
    b = enumerate_basis(p.n_modes, 7)
    direct = quantize(p, tag, b).toarray()
    via = quantize(convert_ordering(p, tag, "normal"), "normal", b).toarray()
    assert rel_max_diff(direct, via) < 1e-12


def test_toeplitz_identity_and_number():
    b = enumerate_basis(2, 4)
    assert np.allclose(toeplitz_quantize(PolySymbol.constant(2, 1), b).toarray(), np.eye(len(b)))
    b1 = enumerate_basis(1, 5)
    assert np.allclose(toeplitz_quantize(N1, b1).toarray(), quantize(N1, "antinormal", b1).toarray())


@pytest.mark.parametrize("seed", range(5))
def test_toeplitz_matches_antinormal(seed):
    rng = np.random.default_rng(seed)
    p = random_symbol(rng, 2, 2, n_terms=5, real_diagonal=True)
    b = enumerate_basis(2, 6)
    t = toeplitz_quantize(p, b).toarray()
    a = quantize(p, "antinormal", b).toarray()
    w = truncation_safe_window(b, p.degree)
    assert np.abs(t - a)[np.ix_(w, w)].max() <= 1e-12 * max(1, np.abs(a).max())
    # both are exact compressions, so they agree on the whole block
    assert np.abs(t - a).max() <= 1e-12 * max(1, np.abs(a).max())


def test_compress_keep_all_and_none():
    p = quartic_symbol(su2_algebra())
    p = restrict_modes(p, [0, 1, 3, 4])
    Q = quantize(p, "antinormal", enumerate_basis(4, 4))
    assert np.array_equal(galerkin_compress(Q, range(4)).toarray(), Q.toarray())
    vac = galerkin_compress(Q, [])
    assert vac.shape == (1, 1)
    assert vac.toarray()[0, 0] == Q.toarray()[0, 0]


def test_compression_is_restricted_normal_symbol():
    # dropped modes sit in their vacuum, which kills every normal-ordered term touching them
    p = restrict_modes(quartic_symbol(su2_algebra()), [0, 1, 3, 4, 6])
    keep = [0, 1, 3]
    b = enumerate_basis(5, 4)
    Q = quantize(p, "antinormal", b)
    compressed = galerkin_compress(Q, keep).toarray()
    normal_symbol = convert_ordering(p, "antinormal", "normal")
    route = quantize(restrict_modes(normal_symbol, keep), "normal", enumerate_basis(3, 4)).toarray()
    assert rel_max_diff(compressed, route) < 1e-12


def test_antinormal_restriction_keeps_zero_point_of_dropped_modes():
    # a_1 a_1^dag compressed to mode 0 is the identity, while restricting its
    # anti-normal symbol z*_1 z_1 gives zero
    p = PolySymbol.number(2) - PolySymbol.number(2) + PolySymbol.monomial((0, 1), (0, 1))
    Q = quantize(p, "antinormal", enumerate_basis(2, 3))
    assert np.allclose(galerkin_compress(Q, [0]).toarray(), np.eye(4))
    assert restrict_modes(p, [0]).is_zero()


def test_compression_eigenvalues_interlace():
    p = restrict_modes(quartic_symbol(su2_algebra()), [0, 1, 3, 4]) + PolySymbol.number(4)
    Q = quantize(p, "antinormal", enumerate_basis(4, 5))
    full = np.linalg.eigvalsh(Q.toarray())
    sub = np.linalg.eigvalsh(galerkin_compress(Q, [0, 1, 3]).toarray())
    assert np.all(sub >= full[: len(sub)] - 1e-9)


def test_coherent_identity_and_number():
    b = enumerate_basis(2, 30)
    zeta = np.array([0.3 + 0.1j, -0.2j])
    eta = np.array([0.25, 0.1 + 0.2j])
    overlap = cmath.exp(np.vdot(zeta, eta))
    ident = quantize(PolySymbol.constant(2, 1), "normal", b)
    assert abs(coherent_matrix_element(ident, zeta, eta) - overlap) < 1e-12
    Q = quantize(PolySymbol.monomial((1, 0), (1, 0)), "normal", b)
    ratio = coherent_matrix_element(Q, zeta, eta) / overlap
    assert abs(ratio - zeta[0].conjugate() * eta[0]) < 1e-12


@given(symbols(n_modes=1, max_degree=4))
def test_coherent_element_is_normal_symbol_on_doubled_variables(p):
    b = enumerate_basis(1, 40)
    zeta, eta = np.array([0.4 - 0.2j]), np.array([-0.3 + 0.35j])
    overlap = cmath.exp(np.vdot(zeta, eta))
    expected = sum(
        complex(c) * zeta[0].conjugate() ** beta[0] * eta[0] ** alpha[0] for (beta, alpha), c in p.terms.items()
    )
    got = coherent_matrix_element(quantize(p, "normal", b), zeta, eta) / overlap
    assert abs(got - expected) <= 1e-10 * max(1.0, abs(expected))


def test_coherent_tail_violation_reported():
    Q = quantize(N1, "normal", enumerate_basis(1, 4))
    with pytest.raises(ValueError):
        coherent_matrix_element(Q, [2.0], [2.0])


@pytest.mark.parametrize("seed", range(3))
def test_antinormal_diagonal_elements_nonnegative(seed):
    rng = np.random.default_rng(seed)
    xs, ys = real_coordinates(2)
    p = (xs[0] - 0.3) * (xs[0] - 0.3) + ys[1] * ys[1] * 2 + (xs[1] + ys[0]) * (xs[1] + ys[0])
    Q = quantize(p, "antinormal", enumerate_basis(2, 40))
    zeta = 0.5 * (rng.normal(size=2) + 1j * rng.normal(size=2))
    assert coherent_matrix_element(Q, zeta, zeta).real >= -1e-12


@pytest.mark.parametrize("D", [2, 4, 8])
def test_berezin_bound_convex_quadratic(D):
    xs, ys = real_coordinates(2)
    # 2 (x0 - 1)^2 + (y0 + x1)^2 + y1^2 / 2 + 3 has infimum 3
    p = (xs[0] - 1) * (xs[0] - 1) * 2 + (ys[0] + xs[1]) * (ys[0] + xs[1]) + ys[1] * ys[1] * 0.5 + 3
    Q = quantize(p, "antinormal", enumerate_basis(2, D))
    assert np.linalg.eigvalsh(Q.toarray()).min() >= 3 - 1e-9
