"""Two-interval lattice geometry, zero-temperature Fermi sea and its kernel.

Interval B occupies sites ``0..l`` and interval A occupies
``l+gap .. l+gap+k``.  The four endpoint coordinates are

    t = (0, l, l + gap, l + gap + k)

and ``ell[i, j] = |t_i - t_j|``.  Only differences of site coordinates
enter the covariance kernel, so the placement is a convention.

The asymptotic formulas of :mod:`negaspec.rh` are accurate when the
interval lengths are measured in sites (``k + 1`` and ``l + 1``); that
variant of the endpoints is exposed as :attr:`Geometry.t_sites`.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
import math

import numpy as np

from .errors import ValidationError

__all__ = [
    "Geometry",
    "FermiState",
    "make_geometry",
    "make_state",
    "covariance_entry",
    "covariance_entries",
    "fermi_function",
    "endpoint_lengths",
]


def _distance_map(t):
    return {(i, j): abs(t[i] - t[j]) for i, j in permutations(range(4), 2)}


@dataclass(frozen=True)
class Geometry:
    k: int
    l: int
    gap: int
    t: tuple = field(init=False)
    ell: dict = field(init=False, repr=False, compare=False)
    sites_a: tuple = field(init=False, repr=False)
    sites_b: tuple = field(init=False, repr=False)

    def __post_init__(self):
        k, l, gap = self.k, self.l, self.gap
        t = (0, l, l + gap, l + gap + k)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "ell", _distance_map(t))
        object.__setattr__(self, "sites_b", tuple(range(0, l + 1)))
        object.__setattr__(self, "sites_a", tuple(range(l + gap, l + gap + k + 1)))

    @property
    def dim(self):
        return self.k + self.l + 2

    @property
    def sites(self):
        """Lattice coordinates in matrix row order: B ascending, then A."""
        return self.sites_b + self.sites_a

    @property
    def t_sites(self):
        """Endpoints with each interval measured by its number of sites."""
        k, l, gap = self.k, self.l, self.gap
        return (0, l + 1, l + 1 + gap, l + gap + k + 2)

    def shifted(self, s):
        """Site coordinates translated by ``s`` (B block first)."""
        return tuple(x + s for x in self.sites)


def make_geometry(k, l, gap):
    """Validate sizes and build a :class:`Geometry`.

    ``k + 1`` and ``l + 1`` are the numbers of sites in A and B, ``gap``
    the coordinate difference between the last site of B and the first
    site of A.
    """
    for name, value in (("k", k), ("l", l), ("gap", gap)):
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
            raise ValidationError(f"{name} must be an integer, got {value!r}")
    if k < 0 or l < 0:
        raise ValidationError(f"interval sizes must be non-negative (k={k}, l={l})")
    if gap < 1:
        raise ValidationError(f"gap must be at least 1, got {gap}")
    return Geometry(int(k), int(l), int(gap))


def endpoint_lengths(geom, convention="sites"):
    """Endpoints and pairwise distances under a length convention.

    ``"coords"`` uses the site coordinates of the interval ends,
    ``"sites"`` counts sites (each interval one unit longer).
    """
    if convention == "sites":
        t = geom.t_sites
    elif convention == "coords":
        t = geom.t
    else:
        raise ValidationError(f"unknown length convention {convention!r}")
    return t, _distance_map(t)


@dataclass(frozen=True)
class FermiState:
    """Zero-temperature Fermi sea with ``p_F = pi * pf_numer / pf_denom``.

    Fermi point 1 sits at ``exp(i p_F)``, point 2 at ``exp(-i p_F)``.
    ``jumps[j] = (f_inside, f_outside)`` are the limits of ``f`` at point
    ``j`` approached from the clockwise and counter-clockwise sides.
    """

    pf_numer: int
    pf_denom: int

    @property
    def fraction(self):
        return Fraction(self.pf_numer, self.pf_denom)

    @property
    def pf(self):
        return math.pi * self.pf_numer / self.pf_denom

    @property
    def half_filling(self):
        return self.fraction == Fraction(1, 2)

    @property
    def fermi_points(self):
        return (complex(np.exp(1j * self.pf)), complex(np.exp(-1j * self.pf)))

    @property
    def jumps(self):
        return ((1.0, -1.0), (-1.0, 1.0))

    def sin_pf_times(self, d):
        """``sin(p_F d)`` with exact zeros and exact oddness in ``d``.

        ``p d`` is reduced to ``r`` in ``[0, 2q)``; the sine is evaluated at
        the folded residue in ``[0, q/2]`` and its sign applied afterwards.
        """
        d = np.asarray(d).astype(np.int64)
        p, q = self.pf_numer, self.pf_denom
        r = np.mod(p * np.abs(d), 2 * q)
        sign = np.where(r > q, -1.0, 1.0) * np.sign(d)
        r = np.where(r > q, 2 * q - r, r)
        r = np.minimum(r, q - r)
        return sign * np.sin(np.pi * r / q)


def make_state(pf):
    """Build a :class:`FermiState` from ``"p/q"``, a Fraction or a tuple."""
    try:
        if isinstance(pf, tuple):
            frac = Fraction(int(pf[0]), int(pf[1]))
        else:
            frac = Fraction(pf)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ValidationError(f"cannot parse filling fraction {pf!r}") from exc
    if not 0 < frac < 1:
        raise ValidationError(f"filling fraction must lie in (0, 1), got {frac}")
    return FermiState(frac.numerator, frac.denominator)


def covariance_entries(d, state):
    """Vectorised ``f_d = 2 sin(p_F d) / (pi d)``, ``f_0 = 2 p_F / pi - 1``."""
    d = np.asarray(d, dtype=np.int64)
    safe = np.where(d == 0, 1, d)
    off = 2.0 * state.sin_pf_times(d) / (np.pi * safe)
    f0 = 2.0 * float(state.fraction) - 1.0
    return np.where(d == 0, f0, off)


def covariance_entry(d, state):
    """Single Fourier coefficient of the zero-temperature Fermi function."""
    return float(covariance_entries(np.array([int(d)]), state)[0])


def fermi_function(p, state):
    """``+1`` inside the sea, ``-1`` outside, ``0`` exactly at ``|p| = p_F``."""
    a = abs(p)
    if a < state.pf:
        return 1.0
    if a > state.pf:
        return -1.0
    return 0.0
