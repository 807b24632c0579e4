import math

from hypothesis import given, strategies as st
import numpy as np
import pytest

from negaspec.errors import NumericalError
from negaspec.lattice import make_geometry, make_state
from negaspec.linalg import eigenvalues
from negaspec.negadeform import build_plain
from negaspec.spectra import (
    characteristic_poly,
    chi_ratios,
    classify_pairs,
    entanglement_spectrum,
    exact_spectrum,
    logarithmic_negativity,
    negativity_terms,
)

from oracles import multiset_distance

HALF = make_state("1/2")
geoms = st.builds(make_geometry, st.integers(0, 30), st.integers(0, 30), st.integers(1, 40))
states = st.sampled_from([make_state(p) for p in ("1/2", "1/3", "2/5", "3/8")])


def test_entanglement_spectrum_examples():
    nu = entanglement_spectrum([0.0, 1.0, 2j / np.pi])
    assert np.allclose(nu[0], [0.5, 0.5])
    assert np.allclose(nu[1], [1.0, 0.0])
    assert np.allclose(nu[2], [(1 + 2j / np.pi) / 2, (1 - 2j / np.pi) / 2])


def test_negativity_examples():
    assert logarithmic_negativity([-1.0, -0.3, 0.0, 0.7, 1.0]).value == 0.0
    e = logarithmic_negativity([2j / np.pi, -2j / np.pi])
    assert e.value == pytest.approx(math.log(1 + 4 / np.pi**2), abs=1e-14)
    assert e.value == pytest.approx(2 * e.per_eigenvalue_terms[0])
    assert logarithmic_negativity([1.5]).value == pytest.approx(math.log(1.5))


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_negativity_term_matches_direct_formula(a, b):
    lam = complex(a, b)
    direct = math.log((abs(1 + lam) + abs(1 - lam)) / 2)
    term = negativity_terms([lam])[0]
    assert term >= -1e-12
    assert term == pytest.approx(direct, abs=1e-13)


@given(st.floats(-0.85, 0.85), st.floats(-0.05, 0.05).filter(lambda b: abs(b) > 1e-4))
def test_negativity_small_imaginary_expansion(a, b):
    term = negativity_terms([complex(a, b)])[0]
    assert term == pytest.approx(0.5 * b * b / (1 - a * a), rel=0.05)


@given(st.floats(-0.999, 0.999), st.floats(0.0, 1.0))
def test_negativity_expansion_controlled_by_scaled_imaginary_part(a, s):
    # the expansion parameter is Im / (1 - Re^2), not Im alone
    b = 0.1 * s * (1 - a * a)
    if b < 1e-6:
        return
    term = negativity_terms([complex(a, b)])[0]
    assert term == pytest.approx(0.5 * b * b / (1 - a * a), rel=0.05)


def test_two_site_end_to_end():
    res = exact_spectrum(make_geometry(0, 0, 1), HALF)
    assert multiset_distance(res.lambdas, [2j / np.pi, -2j / np.pi]) < 1e-12
    assert res.n_pairs == 1 and res.classification == "complex-pairs"
    assert res.kind(0) == "complex-pair"
    assert characteristic_poly(make_geometry(0, 0, 1), HALF, 0.0) == pytest.approx(4 / np.pi**2)


def test_chi_two_site():
    chi1, chi2 = chi_ratios(make_geometry(0, 0, 1), HALF, 1.0)
    assert chi2 == pytest.approx(1 + 4 / np.pi**2, abs=1e-14)
    assert chi1 == pytest.approx(1 + 4 / np.pi**2, abs=1e-14)


def test_chi_single_site_block():
    # A has one site: chi_1plus drops it, leaving D(B) and C_last = D/D(B)
    geom, state = make_geometry(0, 3, 2), make_state("1/3")
    lam = 0.4 + 0.9j
    chi1, _ = chi_ratios(geom, state, lam)
    assert chi1 == pytest.approx(
        characteristic_poly(geom, state, lam)
        / np.linalg.det(lam * np.eye(4) + build_plain(make_geometry(0, 3, 2), state).block("B", "B")),
        rel=1e-10,
    )


def test_characteristic_poly_leading_coefficient():
    geom = make_geometry(3, 4, 2)
    lam = 1e6
    assert characteristic_poly(geom, HALF, lam) / lam**geom.dim == pytest.approx(1.0, rel=1e-5)


@given(geoms, states, st.floats(-2, 2), st.floats(0.5, 2))
def test_characteristic_poly_is_eigen_product(geom, state, x, y):
    lam = complex(x, y)
    vals = exact_spectrum(geom, state).lambdas
    d = characteristic_poly(geom, state, lam)
    assert abs(d - np.prod(lam + vals)) <= 1e-6 * abs(d)


@given(geoms, states, st.floats(-2, 2), st.floats(0.6, 2))
def test_chi_telescoping(geom, state, x, y):
    if geom.k == 0 or geom.l == 0:
        return
    lam = complex(x, y)
    chi1, chi2 = chi_ratios(geom, state, lam)
    d = characteristic_poly(geom, state, lam)
    d_k = characteristic_poly(make_geometry(geom.k - 1, geom.l, geom.gap), state, lam)
    assert abs(chi1 * d_k - d) <= 1e-8 * abs(d)
    # dropping B's rightmost site shifts A by one coordinate only through the
    # gap, so the smaller system is (k, l-1, gap+1)
    d_l = characteristic_poly(make_geometry(geom.k, geom.l - 1, geom.gap + 1), state, lam)
    assert abs(chi2 * d_l - d) <= 1e-8 * abs(d)


@given(geoms, states)
def test_plain_spectrum_hermitian(geom, state):
    vals = eigenvalues(build_plain(geom, state).entries).values
    assert np.max(np.abs(vals.imag)) < 1e-10
    assert np.max(np.abs(vals.real)) <= 1 + 1e-10
    assert logarithmic_negativity(vals).value < 1e-10
    res = exact_spectrum(geom, state, deformed=False)
    assert res.n_pairs == 0 and not res.range_violations


@given(geoms, states)
def test_deformed_spectrum_invariants(geom, state):
    res = exact_spectrum(geom, state)
    vals = res.lambdas
    assert multiset_distance(vals, np.conj(vals)) <= 1e-8
    for i, j in enumerate(res.partner):
        if j >= 0:
            assert res.partner[j] == i
            assert abs(vals[j] - np.conj(vals[i])) <= 1e-8
    assert not res.range_violations
    nu = entanglement_spectrum(vals).ravel()
    assert multiset_distance(nu, 1 - nu) <= 1e-12
    terms = logarithmic_negativity(vals).per_eigenvalue_terms
    assert np.all(terms >= -1e-12)


def test_classify_pairs_errors():
    with pytest.raises(NumericalError):
        classify_pairs([0.1 + 0.5j], 1e-6)
    with pytest.raises(NumericalError):
        classify_pairs([0.1 + 0.5j, 0.3 - 0.5j], 1e-6)
    p = classify_pairs([0.1 + 0.5j, 0.2, 0.1 - 0.5j], 1e-6)
    assert list(p) == [2, -1, 0]
