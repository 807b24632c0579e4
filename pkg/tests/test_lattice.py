from fractions import Fraction
import math

from hypothesis import given, strategies as st
import numpy as np
import pytest
from scipy.integrate import quad

from negaspec.errors import ValidationError
from negaspec.lattice import (
    covariance_entries,
    covariance_entry,
    endpoint_lengths,
    fermi_function,
    make_geometry,
    make_state,
)

HALF = make_state("1/2")
fillings = st.fractions(min_value=Fraction(1, 1000), max_value=Fraction(999, 1000)).filter(
    lambda f: 0 < f < 1
)


def test_geometry_examples():
    g = make_geometry(2, 3, 5)
    assert g.t == (0, 3, 8, 10)
    assert g.ell[3, 0] == 10 and g.ell[2, 1] == 5

    g = make_geometry(0, 0, 1)
    assert g.t == (0, 0, 1, 1)
    assert g.sites_a == (1,) and g.sites_b == (0,)

    g = make_geometry(29, 29, 15)
    assert (g.ell[3, 0], g.ell[2, 0], g.ell[3, 1]) == (73, 44, 44)


@pytest.mark.parametrize("args", [(-1, 0, 1), (0, -2, 1), (1, 1, 0), (1, 1, -3), (1.5, 1, 1), (True, 1, 1)])
def test_geometry_rejects_bad_sizes(args):
    with pytest.raises(ValidationError):
        make_geometry(*args)


@given(st.integers(0, 300), st.integers(0, 300), st.integers(1, 300))
def test_geometry_invariants(k, l, gap):
    g = make_geometry(k, l, gap)
    assert list(g.t) == sorted(g.t)
    assert g.ell[3, 0] == k + l + gap
    assert (g.ell[2, 1], g.ell[1, 0], g.ell[3, 2]) == (gap, l, k)
    assert not set(g.sites_a) & set(g.sites_b)
    assert len(g.sites_a) == k + 1 and len(g.sites_b) == l + 1
    assert g.dim == k + l + 2
    t, ell = endpoint_lengths(g, "sites")
    assert (ell[1, 0], ell[3, 2], ell[2, 1]) == (l + 1, k + 1, gap)


def test_endpoint_lengths_rejects_unknown_convention():
    with pytest.raises(ValidationError):
        endpoint_lengths(make_geometry(1, 1, 1), "metres")


@pytest.mark.parametrize("pf", ["3/2", "0", "1", "-1/3", "abc", (1, 0), 2])
def test_make_state_rejects(pf):
    with pytest.raises(ValidationError):
        make_state(pf)


def test_make_state_forms():
    assert make_state("2/4") == make_state(Fraction(1, 2)) == make_state((1, 2))
    s = make_state("1/3")
    assert not s.half_filling and HALF.half_filling
    assert s.pf == pytest.approx(math.pi / 3)
    for fi, fo in s.jumps:
        assert fi == -fo
    z1, z2 = s.fermi_points
    assert z1 == pytest.approx(np.exp(1j * math.pi / 3))
    assert z2 == pytest.approx(np.conj(z1))


def test_covariance_examples():
    assert covariance_entry(0, HALF) == 0.0
    assert covariance_entry(2, HALF) == 0.0
    assert covariance_entry(1, HALF) == pytest.approx(2 / math.pi, abs=1e-15)
    assert covariance_entry(0, make_state("1/4")) == -0.5


def _quadrature_entry(d, pf):
    # (1/2pi) int f(e^{ip}) e^{-ipd} dp with f = +1 on the sea, -1 off it
    inside = quad(lambda p: math.cos(p * d), -pf, pf, limit=200)[0]
    total = quad(lambda p: math.cos(p * d), -math.pi, math.pi, limit=200)[0]
    return (2 * inside - total) / (2 * math.pi)


def test_covariance_matches_quadrature_oracle():
    rng = np.random.default_rng(3)
    for _ in range(100):
        d = int(rng.integers(-60, 61))
        q = int(rng.integers(2, 40))
        p = int(rng.integers(1, q))
        state = make_state(Fraction(p, q))
        assert covariance_entry(d, state) == pytest.approx(_quadrature_entry(d, state.pf), abs=1e-10)


@given(st.integers(-10_000, 10_000), fillings)
def test_covariance_even_and_bounded(d, frac):
    s = make_state(frac)
    assert covariance_entry(d, s) == covariance_entry(-d, s)
    if d:
        assert abs(covariance_entry(d, s)) <= 2 / (math.pi * abs(d)) + 1e-16


@given(st.integers(-5000, 5000))
def test_half_filling_odd_entries_alternate(n):
    d = 2 * n + 1
    a, b = covariance_entry(d, HALF), covariance_entry(d + 2, HALF)
    assert abs(a) == pytest.approx(2 / (math.pi * abs(d)), rel=1e-12)
    assert np.sign(a * d) == -np.sign(b * (d + 2))
    assert covariance_entry(2 * n, HALF) == 0.0


def test_covariance_vectorised_matches_scalar():
    s = make_state("2/5")
    d = np.arange(-30, 31)
    assert np.array_equal(covariance_entries(d, s), [covariance_entry(int(x), s) for x in d])


def test_fermi_function():
    s = make_state("1/3")
    assert fermi_function(0.0, s) == 1.0
    assert fermi_function(math.pi, s) == -1.0
    assert fermi_function(s.pf, s) == 0.0
    assert fermi_function(-s.pf, s) == 0.0
