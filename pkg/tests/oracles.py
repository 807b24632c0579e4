"""Independent brute-force references used by several test modules."""

import numpy as np
from scipy.optimize import linear_sum_assignment


def cofactor_det(m):
    """Laplace expansion along the first row (exponential cost, small n only)."""
    m = np.asarray(m, dtype=np.complex128)
    n = m.shape[0]
    if n == 0:
        return 1.0 + 0j
    if n == 1:
        return m[0, 0]
    total = 0j
    for j in range(n):
        minor = np.delete(np.delete(m, 0, axis=0), j, axis=1)
        total += (-1) ** j * m[0, j] * cofactor_det(minor)
    return total


def charpoly_coefficients(m):
    """Monic coefficients of det(z - M), highest degree first, by interpolating
    cofactor determinants at roots of unity."""
    m = np.asarray(m, dtype=np.complex128)
    n = m.shape[0]
    size = n + 1
    z = np.exp(2j * np.pi * np.arange(size) / size)
    vals = np.array([cofactor_det(zz * np.eye(n) - m) for zz in z])
    ascending = np.fft.fft(vals) / size
    return ascending[::-1]


def multiset_distance(a, b):
    a, b = np.asarray(a), np.asarray(b)
    if a.size != b.size:
        return np.inf
    if a.size == 0:
        return 0.0
    cost = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max())
