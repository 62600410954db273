"""Solutions with identically vanishing Bohm potential.

In one dimension the continuity equation is solved by any f(x, t) with
f' = A^2 and df/dt = -A^2 S'/m. The Bohm potential vanishes exactly when A is
linear in x, i.e. when

    f = a(t)^2 x^3 / 3 + a(t) b(t) x^2 + b(t)^2 x + c(t),    A = |a x + b|.

Given such an f, the external potential that makes the pair solve the quantum
Hamilton-Jacobi equation is

    V = -( m fdot^2 / (2 f'^2) + m * int_0^x (fdot fdot' / f'^2 - fddot / f') dx + mudot ),

with force F = -V'. The coefficient functions here are polynomials in t, so
every time derivative is exact and the only numerical step is the x-integral.
"""

from dataclasses import dataclass, field as dc_field
import math

import numpy as np
from numpy.polynomial import Polynomial

from .bohm import NODE_RADIUS, bohm_potential
from .errors import InvalidFamilyError, SingularIntegralError, UsageError
from .field import NODE_THRESHOLD, NONNEGATIVE, SIGNED, Grid1D, PolarField, restore_sign

# Gauss-Legendre nodes per grid cell for the x-integrals.
_GL_POINTS = 8
VB_ZERO_TOL = 1e-6


@dataclass(frozen=True)
class TimeFn:
    """Polynomial in t given by ascending coefficients: [c0, c1, ...] -> c0 + c1 t + ..."""

    coeffs: tuple = (0.0,)

    def __post_init__(self):
        coeffs = tuple(float(c) for c in np.atleast_1d(self.coeffs))
        if not coeffs:
            raise UsageError("a TimeFn needs at least one coefficient")
        if not all(math.isfinite(c) for c in coeffs):
            raise UsageError("TimeFn coefficients must be finite")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def poly(self):
        return Polynomial(self.coeffs)

    def __call__(self, t, order=0):
        p = self.poly
        return float(p.deriv(order)(t) if order else p(t))


def _timefn(value):
    if isinstance(value, TimeFn):
        return value
    return TimeFn(tuple(np.atleast_1d(value)))


@dataclass(frozen=True)
class FFamily:
    a: TimeFn = dc_field(default_factory=lambda: TimeFn((0.0,)))
    b: TimeFn = dc_field(default_factory=lambda: TimeFn((1.0,)))
    c: TimeFn = dc_field(default_factory=lambda: TimeFn((0.0,)))
    mu: TimeFn = dc_field(default_factory=lambda: TimeFn((0.0,)))

    def __post_init__(self):
        for name in ("a", "b", "c", "mu"):
            object.__setattr__(self, name, _timefn(getattr(self, name)))

    @classmethod
    def from_lists(cls, a=(0.0,), b=(1.0,), c=(0.0,), mu=(0.0,)):
        return cls(TimeFn(tuple(a)), TimeFn(tuple(b)), TimeFn(tuple(c)), TimeFn(tuple(mu)))

    def x_coefficients(self):
        """f as polynomials in t multiplying x^3, x^2, x, 1."""
        a, b = self.a.poly, self.b.poly
        return (a * a / 3.0, a * b, b * b, self.c.poly)

    def node(self, t):
        """Zero of A = a x + b at time t, or None when a(t) = 0."""
        a = self.a(t)
        return None if a == 0 else -self.b(t) / a

    def check(self, t):
        if self.a(t) == 0 and self.b(t) == 0:
            raise InvalidFamilyError(f"a(t) and b(t) both vanish at t={t}: f' is identically zero")

    def to_dict(self):
        return {k: list(getattr(self, k).coeffs) for k in ("a", "b", "c", "mu")}


@dataclass(frozen=True)
class FValues:
    f: np.ndarray
    fx: np.ndarray
    ft: np.ndarray
    ftx: np.ndarray
    ftt: np.ndarray


def f_eval(fam, x, t):
    """f, f', fdot, fdot', fddot at (x, t), all analytic."""
    x = np.asarray(x, dtype=float)
    k3, k2, k1, k0 = fam.x_coefficients()

    def val(order):
        c3, c2, c1, c0 = (p.deriv(order)(t) if order else p(t) for p in (k3, k2, k1, k0))
        return c3, c2, c1, c0

    c3, c2, c1, c0 = val(0)
    d3, d2, d1, d0 = val(1)
    e3, e2, e1, e0 = val(2)
    f = ((c3 * x + c2) * x + c1) * x + c0
    u = fam.a(t) * x + fam.b(t)
    fx = u * u
    ft = ((d3 * x + d2) * x + d1) * x + d0
    ftx = (3 * d3 * x + 2 * d2) * x + d1
    ftt = ((e3 * x + e2) * x + e1) * x + e0
    return FValues(f, fx, ft, ftx, ftt)


def _velocity_ratio(x, fam, t):
    """fdot / f'."""
    v = f_eval(fam, x, t)
    return v.ft / v.fx


def _potential_integrand(x, fam, t):
    """fdot fdot' / f'^2 - fddot / f'."""
    v = f_eval(fam, x, t)
    return v.ft * v.ftx / v.fx**2 - v.ftt / v.fx


def _check_singularity(fam, grid, t, lo, hi):
    """Raise if the node of A lies in [lo, hi] and the integrands blow up there."""
    xn = fam.node(t)
    if xn is None or not lo <= xn <= hi:
        return
    vals = f_eval(fam, np.array([xn]), t)
    scale = 1.0 + max(abs(fam.a(t)), abs(fam.b(t))) ** 2
    # regular iff fdot and fddot both vanish at the node
    if abs(vals.ft[0]) > 1e-12 * scale or abs(vals.ftt[0]) > 1e-12 * scale:
        raise SingularIntegralError(
            f"f' vanishes at x={xn:.12g} (t={t}) where the integrand is singular", location=xn
        )


def _cumulative_from_zero(func, grid, *args):
    """int_0^{x_i} func(x) dx at every grid point, Gauss-Legendre on each cell."""
    x = grid.x
    if not grid.x_min <= 0.0 <= x[-1]:
        raise UsageError("the integration origin x = 0 must lie on the grid")
    nodes, weights = np.polynomial.legendre.leggauss(_GL_POINTS)

    def cell_integrals(left, right):
        half = 0.5 * (right - left)
        mid = 0.5 * (right + left)
        pts = mid[:, None] + half[:, None] * nodes[None, :]
        vals = func(pts.ravel(), *args).reshape(pts.shape)
        return half * (vals @ weights)

    cells = cell_integrals(x[:-1], x[1:])
    running = np.concatenate(([0.0], np.cumsum(cells)))
    # shift so the integral is anchored at x = 0 (which need not be a grid point)
    j = min(int(np.floor((0.0 - x[0]) / grid.dx)), grid.n - 2)
    partial = cell_integrals(np.array([x[j]]), np.array([0.0]))[0] if x[j] != 0.0 else 0.0
    return running - (running[j] + partial)


def family_to_fields(fam, grid, t, params, mode=NONNEGATIVE):
    """PolarField with f' = A^2 and fdot = -A^2 S'/m.

    A = |a x + b| (``mode="signed"`` gives a x + b instead). The phase is
    S = -m int_0^x fdot/f' dx + mu(t), anchoring S(0, t) = mu(t): the same
    origin as the potential integral, which is what makes the pair satisfy the
    Hamilton-Jacobi equation with that potential.
    """
    fam.check(t)
    _check_singularity(fam, grid, t, grid.x_min, grid.x[-1])
    a, b = fam.a(t), fam.b(t)
    u = a * grid.x + b
    amp = np.abs(u) if mode == NONNEGATIVE else u
    with np.errstate(divide="ignore", invalid="ignore"):
        phase = -params.mass * _cumulative_from_zero(_velocity_ratio, grid, fam, t) + fam.mu(t)
    if not np.all(np.isfinite(phase)):
        raise SingularIntegralError("phase integral is not finite", location=fam.node(t))
    xn = fam.node(t)
    nodes = (xn,) if xn is not None and grid.x_min <= xn <= grid.x[-1] else ()
    return PolarField(grid, amp, phase, mode=mode, time=t, nodes=nodes)


def _check_span(fam, grid, t):
    xn = fam.node(t)
    if xn is None:
        return
    lo, hi = min(0.0, grid.x_min), max(0.0, grid.x[-1])
    _check_singularity(fam, grid, t, lo, hi)


def external_potential_from_f(fam, grid, t, params):
    """V(x, t) that pairs with the family; integral anchored at x = 0."""
    fam.check(t)
    _check_span(fam, grid, t)
    m = params.mass
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = _velocity_ratio(grid.x, fam, t)
        integral = _cumulative_from_zero(_potential_integrand, grid, fam, t)
    V = -(0.5 * m * ratio**2 + m * integral + fam.mu(t, 1))
    return V


def force_from_f(fam, grid, t, params):
    """F = (m fdot^2 / 2f'^2)' + m (fdot fdot'/f'^2 - fddot/f'), evaluated analytically."""
    fam.check(t)
    _check_span(fam, grid, t)
    m = params.mass
    x = grid.x
    v = f_eval(fam, x, t)
    fxx = 2 * fam.a(t) * (fam.a(t) * x + fam.b(t))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = v.ft / v.fx
        ratio_x = v.ftx / v.fx - v.ft * fxx / v.fx**2
        return m * ratio * ratio_x + m * (v.ft * v.ftx / v.fx**2 - v.ftt / v.fx)


@dataclass(frozen=True)
class VBVerdict:
    vanishing: bool
    max_abs_vb: float
    tolerance: float

    @property
    def label(self):
        return "vanishing" if self.vanishing else "non-vanishing"


def vb_zero_check(source, grid, t, params, tol=VB_ZERO_TOL, node_radius=NODE_RADIUS):
    """Decide whether the density f' (an FFamily, or samples of f') has V_B = 0.

    A = sqrt(f') is re-signed across its zeros (so (2x+3)^2 gives 2x+3, not
    |2x+3|) before V_B = -(hbar^2/2m) A''/A is evaluated on unmasked points.
    """
    if isinstance(source, FFamily):
        polar = family_to_fields(source, grid, t, params)
    else:
        density = np.asarray(source, dtype=float)
        if density.shape != (grid.n,):
            raise UsageError("density samples do not match the grid")
        if np.any(density < 0):
            raise InvalidFamilyError("density f' has negative samples")
        amp = restore_sign(np.sqrt(density))
        polar = PolarField(grid, amp, np.zeros(grid.n), mode=SIGNED, time=t)
    vb = bohm_potential(polar, params, threshold=NODE_THRESHOLD, node_radius=node_radius)
    worst = float(np.nanmax(np.abs(vb.values)))
    return VBVerdict(worst < tol, worst, tol)


def random_family(rng, degree=3, span=2.0, margin=0.5):
    """Random polynomial family whose A = a x + b stays >= margin on [-span, span].

    Coefficients are uniform in [-1, 1]; b gets a constant offset of 3 + span
    so the node of A stays off the grid, which keeps fdot/f' bounded.
    """
    while True:
        a = rng.uniform(-1, 1, degree + 1)
        b = rng.uniform(-1, 1, degree + 1)
        b[0] += np.sign(b[0] or 1.0) * (3.0 + span)
        c = rng.uniform(-1, 1, degree + 1)
        mu = rng.uniform(-1, 1, degree + 1)
        fam = FFamily.from_lists(a, b, c, mu)
        ts = np.linspace(0.0, 1.0, 11)
        worst = min(np.min(np.abs(fam.a(t) * np.array([-span, span]) + fam.b(t))) for t in ts)
        if worst >= margin:
            return fam


# Taylor coefficients of (cos u)^(-1/2) in powers of u^2.
_SEC_HALF = (1.0, 1.0 / 4, 7.0 / 96, 139.0 / 5760, 5473.0 / 645120)


def oscillator_family(omega=1.0, repulsive=False):
    """Family member that sees V = +-1/2 m omega^2 x^2 (+ const) for small |t|.

    With a = c = 0, V = -m x^2 (3 bdot^2/b^2 - bddot/b), which equals
    1/2 m omega^2 x^2 for b = (cos omega t)^(-1/2) and the negative of that for
    (cosh omega t)^(-1/2). Both are replaced by their degree-8 Taylor
    polynomials, so the match is good only on a short window around t = 0.
    """
    coeffs = np.zeros(2 * len(_SEC_HALF) - 1)
    for k, c in enumerate(_SEC_HALF):
        sign = (-1) ** k if repulsive else 1
        coeffs[2 * k] = sign * c * omega ** (2 * k)
    return FFamily.from_lists(a=(0.0,), b=coeffs, c=(0.0,), mu=(0.0,))
