"""Exact-side quantities built from the finite matrices.

Everything here is computed from a dense matrix of size ``k + l + 2``:
the deformed spectrum, its entanglement-spectrum partners, the
logarithmic negativity, the characteristic determinant
``D(lambda) = det(lambda + f~)`` and the two determinant ratios that equal
the last diagonal entry of an unpivoted LU factor.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError
from .linalg import determinant, eigenvalues, lu_c_diagonal
from .negadeform import build_deformed, build_plain, deformed_on_sites

__all__ = [
    "SpectrumResult",
    "NegativityValue",
    "exact_spectrum",
    "classify_pairs",
    "entanglement_spectrum",
    "logarithmic_negativity",
    "negativity_terms",
    "characteristic_poly",
    "chi_ratios",
    "IMAG_FLOOR",
    "PAIR_TOL",
]

# |Im lambda| below IMAG_FLOOR * |M|_2 counts as real
IMAG_FLOOR = 1e-6
PAIR_TOL = 1e-8
RANGE_TOL = 1e-6


@dataclass(frozen=True)
class SpectrumResult:
    lambdas: np.ndarray
    partner: np.ndarray
    source: str = "exact"
    geometry: object = None
    state: object = None
    imag_floor: float = IMAG_FLOOR
    residual: float = 0.0
    range_violations: tuple = field(default=())

    @property
    def is_complex(self):
        return self.partner >= 0

    @property
    def n_pairs(self):
        return int(np.count_nonzero(self.partner >= 0) // 2)

    @property
    def classification(self):
        return "complex-pairs" if self.n_pairs else "real"

    def kind(self, i):
        return "complex-pair" if self.partner[i] >= 0 else "real"


@dataclass(frozen=True)
class NegativityValue:
    value: float
    per_eigenvalue_terms: np.ndarray


def classify_pairs(lambdas, imag_floor, pair_tol=PAIR_TOL):
    """Partner index per eigenvalue (``-1`` for real ones).

    Complex values are paired greedily with the closest conjugate; a
    missing partner within ``pair_tol`` (relative to ``max(1, |lambda|)``)
    raises :class:`NumericalError`.
    """
    lam = np.asarray(lambdas, dtype=np.complex128)
    partner = np.full(lam.shape, -1, dtype=np.int64)
    cplx = np.flatnonzero(np.abs(lam.imag) >= imag_floor)
    upper = [i for i in cplx if lam[i].imag > 0]
    lower = set(i for i in cplx if lam[i].imag < 0)
    for i in upper:
        if not lower:
            raise NumericalError(f"eigenvalue {lam[i]} has no conjugate partner")
        j = min(lower, key=lambda c: (abs(lam[c] - np.conj(lam[i])), c))
        if abs(lam[j] - np.conj(lam[i])) > pair_tol * max(1.0, abs(lam[i])):
            raise NumericalError(
                f"conjugate partner of {lam[i]} missing (closest {lam[j]})"
            )
        partner[i], partner[j] = j, i
        lower.discard(j)
    if lower:
        raise NumericalError(f"{len(lower)} unpaired complex eigenvalues")
    return partner


def exact_spectrum(geom, state, *, deformed=True, imag_floor=IMAG_FLOOR):
    """Diagonalise the (deformed) reduced covariance matrix.

    The deformed matrix is diagonalised through its real similar form, so
    conjugate symmetry of the result is exact.  Eigenvalues with
    ``|Re lambda| > 1 + 1e-6`` are listed in
    ``range_violations`` instead of being dropped.
    """
    mat = build_deformed(geom, state) if deformed else build_plain(geom, state)
    res = eigenvalues(mat.real_form())
    lam = res.values
    scale = np.linalg.norm(mat.entries, 2) if mat.dim else 1.0
    floor = imag_floor * max(scale, 1e-300)
    if not deformed:
        lam = lam.real.astype(np.complex128)
    partner = classify_pairs(lam, floor)
    bad = tuple(complex(x) for x in lam if abs(x.real) > 1 + RANGE_TOL)
    return SpectrumResult(
        lambdas=lam,
        partner=partner,
        source="exact",
        geometry=geom,
        state=state,
        imag_floor=floor,
        residual=res.residual,
        range_violations=bad,
    )


def entanglement_spectrum(lambdas):
    """Pairs ``(nu, 1 - nu)`` with ``nu = (1 + lambda) / 2``."""
    lam = np.asarray(lambdas, dtype=np.complex128)
    return np.stack([(1 + lam) / 2, (1 - lam) / 2], axis=-1)


def negativity_terms(lambdas):
    """``log((|1+lambda| + |1-lambda|) / 2)`` without cancellation.

    With ``lambda = a + ib`` the excess over 2 is split into
    ``b^2 / (|1+lambda| + |1+a|)``-type pieces, so real ``lambda`` in
    ``[-1, 1]`` gives exactly zero and tiny ``b`` keeps full precision.
    """
    lam = np.asarray(lambdas, dtype=np.complex128)
    a, b = lam.real, lam.imag
    p, m = np.abs(1 + lam), np.abs(1 - lam)
    b2 = b * b
    with np.errstate(invalid="ignore", divide="ignore"):
        ep = np.where(b2 == 0, 0.0, b2 / (p + np.abs(1 + a)))
        em = np.where(b2 == 0, 0.0, b2 / (m + np.abs(1 - a)))
    excess = ep + em + (np.abs(1 + a) + np.abs(1 - a) - 2.0)
    return np.log1p(excess / 2)


def logarithmic_negativity(lambdas):
    terms = negativity_terms(lambdas)
    return NegativityValue(float(np.sum(terms)), terms)


def characteristic_poly(geom, state, lam):
    """``D(lambda) = det(lambda + f~)`` by pivoted elimination."""
    m = build_deformed(geom, state).entries
    return determinant(lam * np.eye(m.shape[0]) + m)


def _chi(sites_b, sites_a, state, lam, b_first, rtol):
    m = deformed_on_sites(sites_b, sites_a, state, b_first=b_first)
    shifted = lam * np.eye(m.shape[0]) + m
    c_last = lu_c_diagonal(shifted).c_diag[-1]
    if b_first:
        smaller = deformed_on_sites(sites_b, sites_a[:-1], state, b_first=True)
    else:
        smaller = deformed_on_sites(sites_b[:-1], sites_a, state, b_first=False)
    ratio = determinant(shifted) / determinant(
        lam * np.eye(smaller.shape[0]) + smaller
    )
    if abs(ratio - c_last) > rtol * max(abs(ratio), abs(c_last)):
        raise NumericalError(
            f"chi mismatch: determinant ratio {ratio} vs LU pivot {c_last}"
        )
    return c_last


def chi_ratios(geom, state, lam, *, rtol=1e-6):
    """``(chi_1plus, chi_2plus)`` at spectral parameter ``lam``.

    ``chi_1plus = D(k, l) / D(k-1, l)`` drops the rightmost A site (last
    row with B ordered first), ``chi_2plus = D(k, l) / D(k, l-1)`` drops
    the rightmost B site (last row with A ordered first).  Each is
    computed as a determinant ratio and as the final unpivoted LU pivot,
    and the two must agree to ``rtol``.
    """
    sb, sa = list(geom.sites_b), list(geom.sites_a)
    chi1 = _chi(sb, sa, state, lam, True, rtol)
    chi2 = _chi(sb, sa, state, lam, False, rtol)
    return chi1, chi2
