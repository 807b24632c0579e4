"""Dense complex linear algebra used by the exact side of the comparison."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, PivotError, ValidationError

__all__ = [
    "EigenResult",
    "LUResult",
    "eigenvalues",
    "lu_c_diagonal",
    "determinant",
    "sort_spectrum",
    "MAX_DIM",
    "PIVOT_RTOL",
]

MAX_DIM = 2048
PIVOT_RTOL = 1e-12
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class EigenResult:
    values: np.ndarray
    residual: float
    tolerance: float


@dataclass(frozen=True)
class LUResult:
    c_diag: np.ndarray
    success: bool
    failed_at: int = -1


def _square(m):
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    return m


def sort_spectrum(values):
    """Order by real part, then imaginary part."""
    values = np.asarray(values, dtype=np.complex128)
    order = np.lexsort((values.imag, values.real))
    return values[order]


def eigenvalues(m, *, max_dim=MAX_DIM, rtol=None, vectors=True):
    """All eigenvalues of a dense matrix with a backward-error check.

    LAPACK's balanced Hessenberg-QR (``geev``) does the work; real input
    goes through the real driver, whose complex eigenvalues come in exact
    conjugate pairs.  With
    ``vectors=True`` the reported residual is
    ``max_i |M v_i - lambda_i v_i| / |M|_F`` over unit eigenvectors.
    """
    m = _square(m)
    n = m.shape[0]
    if n > max_dim:
        raise ValidationError(f"matrix dimension {n} exceeds cap {max_dim}")
    if rtol is None:
        rtol = 100.0 * max(n, 1) * _EPS
    if n == 0:
        return EigenResult(np.zeros(0, np.complex128), 0.0, rtol)
    a = np.asarray(m)
    a = a.astype(np.float64 if np.isrealobj(a) else np.complex128, copy=False)
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix has non-finite entries")
    try:
        if vectors:
            w, v = scipy.linalg.eig(a, check_finite=False)
        else:
            w = scipy.linalg.eigvals(a, check_finite=False)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise ConvergenceError(f"eigensolver did not converge: {exc}") from exc

    norm = np.linalg.norm(a)
    if vectors and norm > 0:
        v = v / np.linalg.norm(v, axis=0)
        resid = np.linalg.norm(a @ v - v * w, axis=0).max() / norm
    else:
        resid = 0.0
    if not np.isfinite(resid) or resid > rtol:
        raise ConvergenceError(
            f"eigen residual {resid:.3e} exceeds tolerance {rtol:.3e}"
        )
    return EigenResult(sort_spectrum(w), float(resid), float(rtol))


def lu_c_diagonal(m, *, rtol=PIVOT_RTOL, check=True):
    """Diagonal of ``C`` in ``M B = C``, ``B`` unit upper, ``C`` lower.

    No pivoting: ``C_jj`` is the ratio of the ``j``-th to the ``(j-1)``-th
    leading principal minor, so row order decides which entry is which.
    A pivot below ``rtol * |M|_F`` raises :class:`PivotError` (or, with
    ``check=False``, returns ``success=False``).
    """
    a = np.array(_square(m), dtype=np.complex128)
    n = a.shape[0]
    floor = rtol * np.linalg.norm(a)
    c = np.zeros(n, dtype=np.complex128)
    for j in range(n):
        piv = a[j, j]
        c[j] = piv
        if abs(piv) <= floor:
            if check:
                raise PivotError(
                    f"leading minor {j + 1} vanishes (|pivot|={abs(piv):.3e})",
                    index=j,
                )
            return LUResult(c[: j + 1], False, j)
        if j + 1 < n:
            a[j + 1 :, j + 1 :] -= np.outer(a[j + 1 :, j] / piv, a[j, j + 1 :])
    return LUResult(c, True)


def determinant(m):
    """Determinant by partially pivoted LU (LAPACK ``getrf``)."""
    a = _square(m)
    if a.shape[0] == 0:
        return 1.0 + 0.0j
    return complex(np.linalg.det(np.asarray(a, dtype=np.complex128)))
