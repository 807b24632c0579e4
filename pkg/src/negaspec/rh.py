"""Asymptotic predictions for the spectrum of the deformed matrix.

The spectral parameter enters through the Fisher-Hartwig exponents of the
two Fermi points.  On the real segment ``(-1, 1)`` both reduce to
``1/2 + i beta_I`` up to sign, with

    beta_I(lambda) = log((1 - lambda) / (1 + lambda)) / (2 pi),
    lambda = -tanh(pi beta_I).

Fine-structure eigenvalues solve ``cos(theta_23 + theta_10) = bracket``
where the ``theta_i`` are the endpoint phases of :func:`theta_angles`.
Root searches run in ``x = beta_I``; complex eigenvalues come from complex
``x`` through the analytic continuation of every ingredient.

Length conventions
------------------
Every function that uses interval lengths accepts ``convention``:
``"sites"`` (default) measures each interval by its number of sites,
``"coords"`` uses the coordinate endpoints of :class:`Geometry`.  The
``"sites"`` lengths reproduce the exact single-interval spectra; the
``"coords"`` lengths are kept for literal evaluation of the closed forms.
"""

from dataclasses import dataclass, field
import math

import numpy as np
import scipy.integrate
import scipy.optimize

from .errors import ConvergenceError, DomainError
from .lattice import endpoint_lengths
from .special import arg_gamma_half, arg_gamma_half_deriv, log_gamma

__all__ = [
    "BetaParams",
    "Thetas",
    "RHPrediction",
    "ENDPOINT_SIGNS",
    "FERMI_POINT_WEIGHT",
    "DEFAULT_CONVENTION",
    "beta_exponents",
    "beta_imag",
    "lambda_from_beta_imag",
    "theta_angles",
    "phase_condition",
    "phase_mismatch",
    "phase_residual",
    "predict_fine_structure",
    "decoupling_phase",
    "decoupling_roots",
    "predict_decoupling",
    "mean_density",
    "integrated_density",
    "log_det_factor",
    "predict_log_det",
    "half_filling_closed_forms",
    "simple_case_roots",
    "small_imag_negativity",
    "gamma_vector",
    "inner_integral",
    "inner_integral_asymptote",
]

DEFAULT_CONVENTION = "sites"

# Im(beta_i) = ENDPOINT_SIGNS[i] * beta_I at t_0..t_3.  B (t_0, t_1) carries
# +f, A (t_2, t_3) carries -f; frozen by the decoupling-limit calibration.
ENDPOINT_SIGNS = (1, -1, -1, 1)

# Both Fermi points contribute beta**2 to log D; fixed against the exact
# resolvent under geometry rescaling.
FERMI_POINT_WEIGHT = 2.0

_BRANCH_EPS = 1e-12


# ---------------------------------------------------------------------------
# exponents


@dataclass(frozen=True)
class BetaParams:
    lam: complex
    beta: tuple
    beta_tilde: tuple
    beta_i: complex
    endpoint_signs: tuple = ENDPOINT_SIGNS

    @property
    def endpoint_imag(self):
        return tuple(s * self.beta_i for s in self.endpoint_signs)


def _fh_exponent(lam, f_in, f_out):
    ratio = (lam + f_in) / (lam + f_out)
    # adding +0.0 clears a negative zero so log(-1) = +i pi (principal branch)
    ratio = complex(ratio.real, ratio.imag + 0.0)
    return np.log(ratio) / (2j * np.pi)


def beta_imag(lam):
    """``beta_I = log((1 - lambda) / (1 + lambda)) / (2 pi)``, principal log."""
    lam = np.asarray(lam)
    out = np.log((1 - lam) / (1 + lam)) / (2 * np.pi)
    if not np.iscomplexobj(lam):
        out = np.real(out)
    return out if np.ndim(out) else out.item()


def lambda_from_beta_imag(x):
    """Inverse of :func:`beta_imag`: ``lambda = -tanh(pi x)``."""
    out = -np.tanh(np.pi * np.asarray(x))
    return out if np.ndim(out) else out.item()


def beta_exponents(lam, state):
    """Fisher-Hartwig exponents at the two Fermi points.

    ``beta_j = log((lam + f_in) / (lam + f_out)) / (2 pi i)`` and
    ``beta~_j`` with ``f -> -f``.  Raises :class:`DomainError` within
    ``1e-12`` of the branch points ``lam = +-1``.
    """
    lam = complex(lam)
    if abs(lam - 1) < _BRANCH_EPS or abs(lam + 1) < _BRANCH_EPS:
        raise DomainError(f"lambda={lam} is at a branch point")
    beta = tuple(complex(_fh_exponent(lam, fi, fo)) for fi, fo in state.jumps)
    tilde = tuple(complex(_fh_exponent(lam, -fi, -fo)) for fi, fo in state.jumps)
    x = complex(np.log((1 - lam) / (1 + lam)) / (2 * np.pi))
    if lam.imag == 0:
        x = complex(x.real, 0.0)
    return BetaParams(lam, beta, tilde, x)


# ---------------------------------------------------------------------------
# endpoint phases


@dataclass(frozen=True)
class Thetas:
    theta: tuple

    def __getitem__(self, i):
        return self.theta[i]

    def diff(self, i, j):
        return self.theta[i] - self.theta[j]


def _lengths(geom, convention):
    return endpoint_lengths(geom, convention or DEFAULT_CONVENTION)


def _theta_x(x, t, ell, pf):
    """Endpoint phases as functions of ``x = beta_I`` (array-friendly)."""
    x = np.asarray(x)
    imb = [s * x for s in ENDPOINT_SIGNS]
    two_sin = 2.0 * math.sin(pf)
    th = []
    for i in range(4):
        acc = t[i] * pf - arg_gamma_half(-imb[i])
        for k in range(4):
            if k != i:
                acc = acc + imb[k] * math.log(two_sin * ell[i, k])
        th.append(acc)
    return th


def theta_angles(lam, geom, state, betas=None, *, convention=None):
    """``theta_i = t_i p_F - arg Gamma(1/2 - i Im b_i) + sum_k Im b_k log(2 sin p_F l_ik)``.

    ``lam`` may be complex; ``Im b_i`` is then continued analytically as
    ``ENDPOINT_SIGNS[i] * beta_I(lam)``.
    """
    if betas is None:
        betas = beta_exponents(lam, state)
    x = betas.beta_i
    if x.imag == 0:
        x = x.real
    t, ell = _lengths(geom, convention)
    return Thetas(tuple(_theta_x(x, t, ell, state.pf)))


def _bracket_and_sum(x, t, ell, pf):
    th = _theta_x(x, t, ell, pf)
    t12, t30 = th[1] - th[2], th[3] - th[0]
    bracket = (
        ell[3, 2] * ell[1, 0] * np.cos(t12 - t30)
        - ell[3, 1] * ell[2, 0] * np.cos(t12 + t30)
    ) / (ell[2, 1] * ell[3, 0])
    total = (th[2] - th[3]) + (th[1] - th[0])
    return bracket, total


def phase_condition(lam, geom, state, *, convention=None):
    """``(bracket, lhs_phase)`` of the fine-structure equation at real ``lam``.

    ``lhs_phase = theta_23 + theta_10`` reduced to ``(-pi, pi]``.  Real
    eigenvalues need ``|bracket| <= 1``.
    """
    lam = float(lam)
    if not -1 < lam < 1:
        raise DomainError(f"phase condition needs -1 < lambda < 1, got {lam}")
    t, ell = _lengths(geom, convention)
    b, s = _bracket_and_sum(beta_imag(lam), t, ell, state.pf)
    phase = math.remainder(float(s), 2 * math.pi)
    if phase == -math.pi:
        phase = math.pi
    return float(b), phase


def phase_mismatch(x, geom, state, *, convention=None):
    """``cos(theta_23 + theta_10) - bracket`` as a function of ``x = beta_I``.

    Proportional to the 2x2 cosine determinant, so its zeros (real or
    complex ``x``) are the predicted eigenvalues.
    """
    t, ell = _lengths(geom, convention)
    b, s = _bracket_and_sum(x, t, ell, state.pf)
    return np.cos(s) - b


def phase_residual(lam, geom, state, branch, *, convention=None):
    """``|theta_23 + theta_10 -+ arccos(bracket)|`` modulo ``2 pi``."""
    b, phase = phase_condition(lam, geom, state, convention=convention)
    target = (1 if branch == "plus" else -1) * math.acos(max(-1.0, min(1.0, b)))
    return abs(math.remainder(phase - target, 2 * math.pi))


# ---------------------------------------------------------------------------
# fine structure


@dataclass
class RHPrediction:
    roots: np.ndarray
    branches: tuple
    classification: str
    density_samples: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    closed_form_negativity: float = None
    gaps: list = field(default_factory=list)
    source: str = "rh-prediction"

    @property
    def n_pairs(self):
        return int(np.count_nonzero(self.roots.imag > 0))

    def within(self, lo, hi):
        keep = (self.roots.real >= lo) & (self.roots.real <= hi)
        return self.roots[keep]


def _x_window(window):
    lo, hi = window
    if not -1 < lo < hi < 1:
        raise DomainError(f"lambda window must lie inside (-1, 1), got {window}")
    return beta_imag(hi), beta_imag(lo)


def _phase_rate(geom, state, t, ell, x_lo, x_hi):
    """Bound on ``|d(theta combination)/dx|`` over the window."""
    xs = np.linspace(x_lo, x_hi, 257)
    log_terms = sum(
        abs(math.log(2 * math.sin(state.pf) * ell[i, j]))
        for i in range(4)
        for j in range(4)
        if i != j
    )
    psi = np.max(np.abs(arg_gamma_half_deriv(xs)))
    return 2.0 * log_terms + 8.0 * psi


def _newton(fun, z0, *, tol=1e-13, maxiter=80, h=1e-7):
    z = complex(z0)
    for _ in range(maxiter):
        fz = fun(z)
        d = (fun(z + h) - fun(z - h)) / (2 * h)
        if d == 0 or not np.isfinite(d):
            break
        step = fz / d
        if abs(step) > 0.25:
            step *= 0.25 / abs(step)
        z -= step
        if abs(step) < tol:
            return z, True
    return z, False


def _density_samples(geom, window, convention, n=41):
    lam = np.linspace(window[0], window[1], n)
    return np.column_stack([lam, mean_density(lam, geom, convention=convention)])


def _branch_of(x, t, ell, pf):
    _, s = _bracket_and_sum(x, t, ell, pf)
    return "plus" if math.sin(float(np.real(s))) >= 0 else "minus"


def predict_fine_structure(
    geom,
    state,
    *,
    window=(-0.95, 0.95),
    points_per_spacing=10,
    convention=None,
    xtol=1e-10,
):
    """Predicted eigenvalue positions in a real ``lambda`` window.

    Scans a uniform ``beta_I`` grid for sign changes of
    :func:`phase_mismatch` (simple real roots, bisected to ``xtol``).
    Minima of ``|mismatch|`` that do not cross zero are refined by
    complex Newton iteration: a converged complex root yields a conjugate
    pair, a converged real root a double eigenvalue.  Failed refinements
    are recorded in ``gaps``.  For half filling with equal intervals and
    an odd gap the pairs come from :func:`simple_case_roots` instead.
    """
    t, ell = _lengths(geom, convention)
    pf = state.pf
    x_lo, x_hi = _x_window(window)
    if state.half_filling and geom.k == geom.l and ell[2, 1] % 2 == 1:
        roots = simple_case_roots(geom, window=window, convention=convention)
        lam = roots
        branches = tuple("plus" if z.imag > 0 else "minus" for z in lam)
        cf = half_filling_closed_forms(geom, state, convention=convention)
        return RHPrediction(
            roots=lam,
            branches=branches,
            classification="complex-pairs",
            density_samples=_density_samples(geom, window, convention),
            closed_form_negativity=cf[1],
        )

    fun = lambda x: phase_mismatch(x, geom, state, convention=convention)
    rate = _phase_rate(geom, state, t, ell, x_lo, x_hi)
    step = math.pi / (points_per_spacing * rate)
    n = max(64, int(math.ceil((x_hi - x_lo) / step)) + 1)
    xs = np.linspace(x_lo, x_hi, n)
    g = np.real(fun(xs))
    dx = xs[1] - xs[0]

    found = []  # (x, kind)
    for i in range(n - 1):
        if g[i] == 0.0:
            found.append((xs[i], "real"))
        elif g[i] * g[i + 1] < 0:
            r = scipy.optimize.brentq(lambda y: float(np.real(fun(y))), xs[i], xs[i + 1], xtol=xtol * 1e-3)
            found.append((r, "real"))

    gaps = []
    real_x = np.array([r for r, _ in found])
    for i in range(1, n - 1):
        if not (abs(g[i]) <= abs(g[i - 1]) and abs(g[i]) < abs(g[i + 1])):
            continue
        if real_x.size and np.min(np.abs(real_x - xs[i])) < 2 * dx:
            continue
        seed = xs[i] + 1j * max(4 * dx, 1e-3)
        z, ok = _newton(fun, seed)
        if not ok or abs(z.real - xs[i]) > 4 * dx:
            # touching minimum; accept as a double real root if it reaches zero
            zr, okr = _newton(fun, xs[i] + 0.0j)
            if okr and abs(zr.imag) < 1e-9 and abs(zr.real - xs[i]) < 2 * dx:
                found += [(zr.real, "real"), (zr.real, "real")]
            else:
                gaps.append((float(xs[i - 1]), float(xs[i + 1])))
            continue
        if abs(z.imag) < 1e-9:
            found += [(z.real, "real"), (z.real, "real")]
        else:
            zc = complex(z.real, abs(z.imag))
            found += [(zc, "pair"), (zc.conjugate(), "pair")]

    lam, branches = [], []
    for x, kind in found:
        value = complex(lambda_from_beta_imag(x))
        if kind == "real":
            lam.append(complex(value.real, 0.0))
            branches.append(_branch_of(np.real(x), t, ell, pf))
        else:
            lam.append(value)
            branches.append("plus" if value.imag > 0 else "minus")
    lam = np.array(lam, dtype=np.complex128)
    order = np.lexsort((lam.imag, lam.real)) if lam.size else np.zeros(0, int)
    lam = lam[order]
    branches = tuple(branches[i] for i in order)
    has_pairs = bool(np.any(np.abs(lam.imag) > 0))
    return RHPrediction(
        roots=lam,
        branches=branches,
        classification="complex-pairs" if has_pairs else "real",
        density_samples=_density_samples(geom, window, convention),
        gaps=gaps,
    )


# ---------------------------------------------------------------------------
# decoupled intervals


def decoupling_phase(y, length, state):
    """``p_F L + 2 y log(2 sin(p_F) L) + 2 arg Gamma(1/2 - i y)``."""
    pf = state.pf
    return pf * length + 2 * y * math.log(2 * math.sin(pf) * length) + 2 * arg_gamma_half(-np.asarray(y))


def decoupling_roots(length, state, *, y_max=3.0):
    """Solutions ``y`` of ``decoupling_phase(y) = +-pi/2 (mod 2 pi)``.

    The phase is increasing in ``y`` for ``|y|`` well below
    ``2 sin(p_F) L``; every crossing of an odd multiple of ``pi/2`` in
    ``[-y_max, y_max]`` is bracketed and bisected.  Returns sorted ``y``
    and the sign (+1/-1) of the ``pi/2`` branch.
    """
    ys = np.linspace(-y_max, y_max, 4001)
    ph = decoupling_phase(ys, length, state)
    if np.any(np.diff(ph) <= 0):
        raise DomainError("decoupling phase is not monotone on the search range")
    # odd multiples of pi/2: m * pi/2 with m odd; branch = +1 when m = 1 mod 4
    m_lo = math.ceil(ph[0] / (math.pi / 2))
    m_hi = math.floor(ph[-1] / (math.pi / 2))
    out, signs = [], []
    for m in range(m_lo, m_hi + 1):
        if m % 2 == 0:
            continue
        target = m * math.pi / 2
        j = int(np.searchsorted(ph, target))
        j = min(max(j, 1), len(ys) - 1)
        y = scipy.optimize.brentq(
            lambda v: float(decoupling_phase(v, length, state)) - target,
            ys[j - 1],
            ys[j],
            xtol=1e-14,
        )
        out.append(y)
        signs.append(1 if m % 4 == 1 else -1)
    return np.array(out), np.array(signs)


def predict_decoupling(geom, state, *, convention=None, y_max=3.0):
    """Decoupled-limit eigenvalues: union of single-interval solutions.

    B (the ``+f`` block) has ``lambda = -tanh(pi y)``; A carries ``-f`` so
    its roots are reflected, ``lambda = tanh(pi y)``.
    """
    t, ell = _lengths(geom, convention)
    lam, owner = [], []
    for name, length, sign in (("B", ell[1, 0], -1.0), ("A", ell[3, 2], 1.0)):
        ys, _ = decoupling_roots(length, state, y_max=y_max)
        lam.extend(sign * np.tanh(np.pi * ys))
        owner.extend([name] * len(ys))
    lam = np.array(lam)
    order = np.argsort(lam, kind="stable")
    lam = lam[order].astype(np.complex128)
    owner = tuple(owner[i] for i in order)
    return RHPrediction(roots=lam, branches=owner, classification="real")


# ---------------------------------------------------------------------------
# mean density and log-determinant


def _density_log(geom, convention):
    _, ell = _lengths(geom, convention)
    return math.log(
        ell[2, 3] * ell[2, 0] * ell[1, 0] * ell[1, 3] / (ell[2, 1] * ell[3, 0])
    )


def mean_density(lam, geom, *, convention=None):
    """Mean eigenvalue density ``log(l23 l20 l10 l13 / (l21 l30)) / (pi^2 (1 - lam^2))``."""
    lam = np.asarray(lam, dtype=float)
    if np.any(np.abs(lam) >= 1):
        raise DomainError("mean density needs |lambda| < 1")
    out = _density_log(geom, convention) / (math.pi**2 * (1 - lam**2))
    return out if out.ndim else float(out)


def integrated_density(a, b, geom, *, convention=None):
    """``int_a^b mean_density`` in closed form (``artanh`` primitive)."""
    if not -1 < a <= b < 1:
        raise DomainError("integration window must lie inside (-1, 1)")
    return _density_log(geom, convention) / math.pi**2 * (math.atanh(b) - math.atanh(a))


def log_det_factor(geom, *, convention=None):
    """``log(l21 l30 / (l23 l20 l10 l31))``."""
    _, ell = _lengths(geom, convention)
    return math.log(
        ell[2, 1] * ell[3, 0] / (ell[2, 3] * ell[2, 0] * ell[1, 0] * ell[3, 1])
    )


def predict_log_det(lam, geom, state, *, convention=None, weight=FERMI_POINT_WEIGHT):
    """``d/dlambda`` of ``weight * beta(lambda)**2 * log_det_factor``.

    The non-extensive, geometry-dependent part of the resolvent
    ``sum_i 1/(lambda + lambda_i)``.  ``lam`` must stay off ``[-1, 1]``.
    """
    lam = complex(lam)
    if lam.imag == 0 and -1 <= lam.real <= 1:
        raise DomainError("predict_log_det needs lambda off the segment [-1, 1]")
    beta = beta_exponents(lam, state).beta[0]
    dbeta = (1.0 / (lam + 1) - 1.0 / (lam - 1)) / (2j * math.pi)
    return weight * 2 * beta * dbeta * log_det_factor(geom, convention=convention)


# ---------------------------------------------------------------------------
# half filling, equal intervals


def _require_simple_case(geom, state):
    if not state.half_filling:
        raise DomainError("closed forms need half filling")
    if geom.k != geom.l:
        raise DomainError("closed forms need equal intervals (k == l)")


def half_filling_closed_forms(geom, state, *, convention=None):
    """``(parity_class, negativity, im_ratio)`` at half filling, ``k == l``.

    Odd gap gives complex pairs with
    ``E = log^2(l30/l21) / (4 log(4 l20^2 l10^2 / (l30 l21)))`` and
    ``Im lambda / (1 - Re^2 lambda) = pi log(l30/l21) / (2 |log(l30 l21 / (4 l20^2 l10^2))|)``;
    an even gap gives a real spectrum and zero negativity.
    """
    _require_simple_case(geom, state)
    _, ell = _lengths(geom, convention)
    l30, l21, l20, l10 = ell[3, 0], ell[2, 1], ell[2, 0], ell[1, 0]
    den = math.log(4 * l20**2 * l10**2 / (l30 * l21))
    ratio = math.pi * math.log(l30 / l21) / (2 * abs(den))
    if l21 % 2 == 1:
        return "complex-pairs", 0.25 * math.log(l30 / l21) ** 2 / den, ratio
    return "real", 0.0, ratio


def simple_case_roots(geom, *, window=(-0.95, 0.95), convention=None, tol=1e-13):
    """Complex eigenvalue pairs for half filling, equal intervals, odd gap.

    Solves ``4 arg Gamma(1/2 + i x) - 2 x K = c -+ i log(l30/l21) (mod 2 pi)``
    with ``K = log(4 l20^2 l10^2 / (l30 l21))`` by complex Newton iteration.
    ``c`` is ``0`` or ``pi`` according to the sign of the phase bracket at
    ``x = 0``.  Seeds are the real solutions of the unshifted equation,
    displaced by the leading-order imaginary part.
    """
    t, ell = _lengths(geom, convention)
    l30, l21, l20, l10 = ell[3, 0], ell[2, 1], ell[2, 0], ell[1, 0]
    big_k = math.log(4 * l20**2 * l10**2 / (l30 * l21))
    shift = math.log(l30 / l21)
    x_lo, x_hi = _x_window(window)
    bracket0, _ = _bracket_and_sum(0.0, t, ell, math.pi / 2)
    offset = 0.0 if bracket0 > 0 else math.pi

    def lhs(x):
        return 4 * arg_gamma_half(x) - 2 * x * big_k

    xs = np.linspace(x_lo, x_hi, 4001)
    turns = np.floor((np.real(lhs(xs)) - offset) / (2 * math.pi))
    seeds = []
    for j in np.flatnonzero(np.diff(turns) != 0):
        target = offset + 2 * math.pi * max(turns[j], turns[j + 1])
        x0 = scipy.optimize.brentq(
            lambda v: float(np.real(lhs(v))) - target, xs[j], xs[j + 1]
        )
        seeds.append((x0, target))

    roots = []
    for x0, target in seeds:
        slope = 4 * arg_gamma_half_deriv(x0) - 2 * big_k
        z0 = x0 + 1j * shift / slope
        z, ok = _newton(lambda z: lhs(z) - target + 1j * shift, z0, tol=tol)
        if not ok:
            raise ConvergenceError(f"simple-case root near x={x0} did not converge")
        lam = complex(lambda_from_beta_imag(z))
        roots += [complex(lam.real, abs(lam.imag)), complex(lam.real, -abs(lam.imag))]
    lam = np.array(roots, dtype=np.complex128)
    keep = (lam.real >= window[0]) & (lam.real <= window[1])
    lam = lam[keep]
    order = np.lexsort((lam.imag, lam.real))
    return lam[order]


def small_imag_negativity(lam):
    """Leading small-imaginary-part term ``Im^2 / (2 (1 - Re^2))``."""
    lam = np.asarray(lam, dtype=np.complex128)
    return lam.imag**2 / (2 * (1 - lam.real**2))


# ---------------------------------------------------------------------------
# inner-region integrals


def gamma_vector(beta, beta_tilde, w):
    """``(b~ - 1, -b~ - 1, b - 1, -b - 1)`` with ``+1`` added at slot ``w``."""
    g = [beta_tilde - 1, -beta_tilde - 1, beta - 1, -beta - 1]
    g[w] += 1
    return tuple(complex(v) for v in g)


def _power_below_cut(base, p):
    """``base**p`` taken just below the real axis (``arg = -pi`` for base < 0)."""
    base = np.asarray(base, dtype=float)
    mag = np.abs(base)
    phase = np.where(base < 0, -math.pi, 0.0)
    with np.errstate(divide="ignore"):
        return np.exp(p * (np.log(mag) + 1j * phase))


def _log_integrand(i, zeta, t, gamma):
    """Log of the integrand at ``s = c + side * exp(log_delta)``.

    Factors singular at ``c`` get ``log|base| = log_delta`` exactly, so
    the substitution never evaluates ``0**p``.
    """
    shifts = [t[i] - t[j] for j in range(4)]
    powers = [-g - 1 for g in gamma]

    def logh(c, side, log_delta):
        s = c + side * math.exp(log_delta)
        out = -s * zeta
        for j in range(4):
            if c + shifts[j] == 0:
                log_mag, neg = log_delta, side < 0
            else:
                base = s + shifts[j]
                log_mag, neg = math.log(abs(base)), base < 0
            out += powers[j] * complex(log_mag, -math.pi if neg else 0.0)
        return out

    return logh


def _quad_complex(fun, a, b, **kw):
    re = scipy.integrate.quad(lambda s: float(np.real(fun(s))), a, b, **kw)
    im = scipy.integrate.quad(lambda s: float(np.imag(fun(s))), a, b, **kw)
    return complex(re[0], im[0]), math.hypot(re[1], im[1])


def inner_integral(i, zeta, t, gamma, *, epsrel=1e-11, limit=400):
    """``int_0^inf exp(-s zeta) prod_j (s + t_i - t_j)**(-gamma_j - 1) ds`` below the cut.

    Needs ``Re zeta > 0`` and ``Re gamma_j < 0`` wherever the integrand is
    singular on the path.  Near each singular point ``c`` the variable is
    ``s = c +- d exp(-u)``, which turns the algebraic singularity into
    exponential decay in ``u``.
    """
    zeta = complex(zeta)
    if zeta.real <= 0:
        raise DomainError("inner_integral needs Re zeta > 0")
    gamma = tuple(complex(g) for g in gamma)
    logh = _log_integrand(i, zeta, t, gamma)
    sing = sorted({0.0} | {float(t[j] - t[i]) for j in range(4) if t[j] > t[i]})
    for j in range(4):
        c = t[j] - t[i]
        if c >= 0 and gamma[j].real >= 0:
            raise DomainError(f"integrand not integrable at s={c} (Re gamma_{j} >= 0)")

    total, err = 0.0j, 0.0
    kw = dict(epsabs=0.0, epsrel=epsrel, limit=limit)

    def near(c, d, side):
        # integral over [c, c + d] (side=+1) or [c - d, c] (side=-1)
        log_d = math.log(d)
        f = lambda u: np.exp(logh(c, side, log_d - u) + log_d - u)
        return _quad_complex(f, 0.0, np.inf, **kw)

    for a, b in zip(sing[:-1], sing[1:]):
        mid = 0.5 * (b - a)
        for part in (near(a, mid, 1), near(b, mid, -1)):
            total += part[0]
            err += part[1]
    last = sing[-1]
    decay = 1.0 / zeta.real
    part = near(last, decay, 1)
    total += part[0]
    err += part[1]
    tail = lambda s: np.exp(logh(last + decay, 1, math.log(s)))
    part = _quad_complex(tail, 0.0, np.inf, **kw)
    total += part[0]
    err += part[1]
    if not np.isfinite(total) or err > 1e-6 * max(abs(total), 1e-300):
        raise ConvergenceError(f"inner integral quadrature error {err:.2e} for value {total}")
    return total


def inner_integral_asymptote(i, zeta, t, gamma, *, first_order_sign=1.0):
    """Large-``zeta`` expansion of :func:`inner_integral` to first order.

    ``Gamma(-g_i) zeta**g_i prod_{j != i} (t_i - t_j)**(-g_j - 1)
    * (1 + sum_{j != i} g_i (g_j + 1) / ((t_i - t_j) zeta))``.

    Expanding the integrand about ``s = 0`` fixes the ``+`` sign of the
    correction; ``first_order_sign=-1`` evaluates the opposite sign.
    ``arg zeta`` is taken in ``(-pi/2, 3 pi/2]``.
    """
    zeta = complex(zeta)
    gamma = tuple(complex(g) for g in gamma)
    gi = gamma[i]
    arg = math.atan2(zeta.imag, zeta.real)
    if arg <= -math.pi / 2:
        arg += 2 * math.pi
    log_zeta = complex(math.log(abs(zeta)), arg)
    lead = np.exp(log_gamma_any(-gi) + gi * log_zeta)
    corr = 0.0j
    for j in range(4):
        if j == i:
            continue
        d = t[i] - t[j]
        if d == 0:
            raise DomainError("asymptote needs distinct endpoints")
        lead = lead * complex(_power_below_cut(d, -gamma[j] - 1))
        corr += gi * (gamma[j] + 1) / (d * zeta)
    return complex(lead * (1 + first_order_sign * corr))


def log_gamma_any(z):
    """``log Gamma`` on the whole plane minus the poles (reflection for Re z <= 0)."""
    z = complex(z)
    if z.real > 0:
        return complex(log_gamma(z))
    # Gamma(z) = pi / (sin(pi z) Gamma(1 - z)); branch is irrelevant after exp
    return complex(np.log(math.pi / np.sin(np.pi * z)) - log_gamma(1 - z))
