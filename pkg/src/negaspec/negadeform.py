"""Reduced covariance matrices over the sites of A and B.

Rows and columns are ordered B ascending, then A ascending.  The deformed
matrix implements the fermionic partial transpose: with base value
``-f_{i-j}`` it multiplies the A-A block by 1, the B-B block by -1 and
both cross blocks by ``i``.
"""

from dataclasses import dataclass

import numpy as np

from .lattice import covariance_entries

__all__ = [
    "DeformedMatrix",
    "build_deformed",
    "build_plain",
    "site_kernel",
    "deformed_on_sites",
]


@dataclass(frozen=True)
class DeformedMatrix:
    entries: np.ndarray
    geometry: object
    state: object
    deformed: bool

    @property
    def dim(self):
        return self.entries.shape[0]

    @property
    def n_b(self):
        return self.geometry.l + 1

    def real_form(self):
        """Real matrix similar to the deformed one.

        Conjugating by ``diag(1 on B, i on A)`` turns both cross blocks real
        (multiplication by ``+-i`` is exact in floating point), so a real
        eigensolver returns exactly conjugate-symmetric spectra.
        """
        if not self.deformed:
            return self.entries
        nb = self.n_b
        r = np.array(self.entries)
        r[:nb, nb:] *= -1j
        r[nb:, :nb] *= 1j
        return _frozen(np.ascontiguousarray(r.real))

    def block(self, rows, cols):
        """Sub-block by name: ``"A"`` or ``"B"``."""
        nb = self.n_b
        sl = {"B": slice(0, nb), "A": slice(nb, None)}
        return self.entries[sl[rows], sl[cols]]


def site_kernel(sites, state):
    """Real matrix ``f_{i-j}`` over the given lattice coordinates."""
    s = np.asarray(sites, dtype=np.int64)
    return covariance_entries(s[:, None] - s[None, :], state)


def _frozen(a):
    a.setflags(write=False)
    return a


def build_plain(geom, state):
    """Undeformed reduced covariance matrix; exactly symmetric."""
    f = site_kernel(geom.sites, state)
    # covariance_entries is even in d, so this only guards against drift
    f = np.triu(f) + np.triu(f, 1).T
    return DeformedMatrix(_frozen(f), geom, state, False)


def deformed_on_sites(sites_b, sites_a, state, *, b_first=True):
    """Raw deformed matrix for arbitrary B and A coordinate lists.

    ``b_first=False`` puts the A block first; the phases follow the sites.
    """
    sites_b, sites_a = list(sites_b), list(sites_a)
    first, second = (sites_b, sites_a) if b_first else (sites_a, sites_b)
    f = site_kernel(first + second, state)
    n1 = len(first)
    m = -f.astype(np.complex128)
    if b_first:
        m[:n1, :n1] *= -1.0
    else:
        m[n1:, n1:] *= -1.0
    m[:n1, n1:] *= 1j
    m[n1:, :n1] *= 1j
    return m


def build_deformed(geom, state):
    """Deformed matrix with the block phases ``{1, -1, i, i}`` on ``-f``."""
    m = deformed_on_sites(geom.sites_b, geom.sites_a, state)
    return DeformedMatrix(_frozen(m), geom, state, True)
