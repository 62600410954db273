"""Closed-form solutions: plane wave, Gaussian packet, oscillator eigenstates,
the free accelerating Airy packet and the Morse ground state.

Constructors return a PolarField together with the external potential sampled
on the same grid, so any entry can be fed straight to the residual checks.
"""

from dataclasses import dataclass, field as dc_field
import math
import warnings

import numpy as np

from .bohm import BohmPotentialField
from .errors import DomainError, NoBoundStateError, UsageError
from .field import NONNEGATIVE, SIGNED, ComplexField, PolarField
from .specfun import airy_ai, gamma_fn, hermite

KINDS = ("plane-wave", "gaussian", "ho-eigenstate", "airy", "morse-ground")


class ResolutionWarning(UserWarning):
    pass


def _param(value, params, name, default):
    if value is not None:
        return float(value)
    return float(params.get(name, default))


# -- harmonic oscillator -------------------------------------------------------


def ho_energy(n, params, omega=None):
    omega = _param(omega, params, "omega", 1.0)
    return (n + 0.5) * params.hbar * omega


def ho_eigenstate(n, grid, t, params, omega=None):
    """n-th oscillator eigenstate, signed real amplitude and phase -(n + 1/2) hbar omega t."""
    if int(n) != n or n < 0:
        raise DomainError(f"oscillator level must be a nonnegative integer, got {n}")
    n = int(n)
    omega = _param(omega, params, "omega", 1.0)
    if not omega > 0:
        raise DomainError("omega must be positive")
    hbar, m = params.hbar, params.mass
    x = grid.x
    scale = math.sqrt(m * omega / hbar)
    # (2^n n!)^(-1/2) through logs so large n does not overflow the prefactor
    log_pref = -0.5 * (n * math.log(2.0) + math.lgamma(n + 1)) + 0.25 * math.log(m * omega / (math.pi * hbar))
    amp = math.exp(log_pref) * np.exp(-0.5 * (scale * x) ** 2) * hermite(n, scale * x)
    phase = np.full(grid.n, -(n + 0.5) * hbar * omega * t)
    V = 0.5 * m * omega**2 * x**2
    return PolarField(grid, amp, phase, mode=SIGNED, time=t), V


# -- Airy ----------------------------------------------------------------------


def airy_acceleration(params, beta=None):
    beta = _param(beta, params, "beta", 1.0)
    return beta**3 / (2.0 * params.mass**2)


def airy_solution(grid, t, params, beta=None):
    """Free accelerating Airy packet.

    A = Ai((beta / hbar^(2/3)) (x - beta^3 t^2 / 4m^2)),
    S = (beta^3 t / 2m)(x - beta^3 t^2 / 6m^2), so S(0, 0) = 0.
    """
    beta = _param(beta, params, "beta", 1.0)
    if beta == 0:
        raise DomainError("beta must be nonzero")
    hbar, m = params.hbar, params.mass
    x = grid.x
    shift = beta**3 * t**2 / (4 * m**2)
    amp = airy_ai(beta / hbar ** (2.0 / 3.0) * (x - shift))
    phase = beta**3 * t / (2 * m) * (x - beta**3 * t**2 / (6 * m**2))
    return PolarField(grid, amp, phase, mode=SIGNED, time=t), np.zeros(grid.n)


def airy_bohm_closed_form(grid, t, params, beta=None):
    """V_B = -(beta^3 / 2m)(x - beta^3 t^2 / 4m^2); defined everywhere, nothing masked."""
    beta = _param(beta, params, "beta", 1.0)
    if beta == 0:
        raise DomainError("beta must be nonzero")
    m = params.mass
    vb = -(beta**3 / (2 * m)) * (grid.x - beta**3 * t**2 / (4 * m**2))
    return BohmPotentialField(grid, vb, np.zeros(grid.n, dtype=bool), t)


# -- plane wave ----------------------------------------------------------------


def plane_wave(grid, t, params, k=None, omega=None, amplitude=1.0):
    """A exp(i(kx - omega t)); omega defaults to the dispersion value hbar k^2 / 2m."""
    k = _param(k, params, "k", 1.0)
    if omega is None:
        omega = params.get("omega", params.hbar * k**2 / (2 * params.mass))
    if grid.periodic:
        turns = k * grid.length / (2 * np.pi)
        if abs(turns - round(turns)) > 1e-9:
            raise UsageError(f"k={k} is not commensurate with the periodic box of length {grid.length}")
    amp = np.full(grid.n, float(amplitude))
    phase = params.hbar * (k * grid.x - omega * t)
    return PolarField(grid, amp, phase, mode=NONNEGATIVE, time=t), np.zeros(grid.n)


# -- Gaussian packet -----------------------------------------------------------
# Envelope convention: psi(x, 0) = (2 pi sigma^2)^(-1/4) exp(-(x - x0)^2 / 4 sigma^2 + i k0 x),
# so |psi|^2 has standard deviation sigma.


def _gaussian_parts(grid, t, params, sigma, k0, x0):
    if not sigma > 0:
        raise DomainError("sigma must be positive")
    if sigma < 3 * grid.dx:
        warnings.warn(f"sigma={sigma} is under three grid spacings", ResolutionWarning, stacklevel=3)
    hbar, m = params.hbar, params.mass
    tau = hbar * t / (2 * m * sigma**2)
    X = grid.x - x0 - hbar * k0 / m * t
    width2 = 4 * sigma**2 * (1 + tau**2)
    amp = (2 * np.pi * sigma**2) ** -0.25 * (1 + tau**2) ** -0.25 * np.exp(-(X**2) / width2)
    theta = k0 * grid.x - hbar * k0**2 * t / (2 * m) - 0.5 * math.atan(tau) + X**2 * tau / width2
    return amp, theta


def gaussian_packet(grid, t=0.0, params=None, sigma=None, k0=None, x0=0.0):
    """Unit-normalized free Gaussian packet at time t (exact free spreading)."""
    sigma = _param(sigma, params, "sigma", 1.0)
    k0 = _param(k0, params, "k0", 0.0)
    amp, theta = _gaussian_parts(grid, t, params, sigma, k0, x0)
    return ComplexField(grid, amp * np.exp(1j * theta), t)


def gaussian_polar(grid, t, params, sigma=None, k0=None, x0=0.0):
    """Polar form of :func:`gaussian_packet` with the analytic (unwrapped) phase; V = 0."""
    sigma = _param(sigma, params, "sigma", 1.0)
    k0 = _param(k0, params, "k0", 0.0)
    amp, theta = _gaussian_parts(grid, t, params, sigma, k0, x0)
    return PolarField(grid, amp, params.hbar * theta, mode=NONNEGATIVE, time=t), np.zeros(grid.n)


# -- Morse ---------------------------------------------------------------------


def morse_lambda(params, D=None, alpha=None):
    D = _param(D, params, "D", 8.0)
    alpha = _param(alpha, params, "alpha", 1.0)
    return math.sqrt(2 * params.mass * D) / (alpha * params.hbar)


def morse_ground_energy(params, D=None, alpha=None):
    D = _param(D, params, "D", 8.0)
    alpha = _param(alpha, params, "alpha", 1.0)
    lam = morse_lambda(params, D, alpha)
    return D - (params.hbar * alpha) ** 2 * (lam - 0.5) ** 2 / (2 * params.mass)


def morse_ground(grid, params, D=None, alpha=None, t=0.0):
    """Ground state of V = D (1 - exp(-alpha x))^2.

    With lam = sqrt(2 m D) / (alpha hbar) and y = 2 lam exp(-alpha x) the
    ground state is proportional to y^(lam - 1/2) exp(-y/2), i.e.

        A(x) = N exp(-lam e^(-alpha x) - (lam - 1/2) alpha x),
        N^2  = alpha (2 lam)^(2 lam - 1) / Gamma(2 lam - 1),
        E0   = D - (hbar alpha)^2 (lam - 1/2)^2 / 2m,

    and it exists only for lam > 1/2.
    """
    D = _param(D, params, "D", 8.0)
    alpha = _param(alpha, params, "alpha", 1.0)
    if not (D > 0 and alpha > 0):
        raise DomainError("Morse depth and width must be positive")
    lam = morse_lambda(params, D, alpha)
    if lam <= 0.5:
        raise NoBoundStateError(f"lambda = {lam:.6g} <= 1/2: the Morse well has no bound state")
    x = grid.x
    log_norm = 0.5 * (math.log(alpha) + (2 * lam - 1) * math.log(2 * lam) - math.log(gamma_fn(2 * lam - 1)))
    with np.errstate(over="ignore"):
        expo = -lam * np.exp(-alpha * x) - (lam - 0.5) * alpha * x + log_norm
    amp = np.exp(expo)
    energy = morse_ground_energy(params, D, alpha)
    phase = np.full(grid.n, -energy * t)
    V = D * (1 - np.exp(-alpha * x)) ** 2
    return PolarField(grid, amp, phase, mode=NONNEGATIVE, time=t), V


# -- name-addressable catalog --------------------------------------------------


@dataclass(frozen=True)
class AnalyticSolution:
    """A catalog entry: kind plus its constants, evaluable at any (grid, t)."""

    kind: str
    params: object
    constants: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UsageError(f"unknown solution kind {self.kind!r}; expected one of {KINDS}")
        c = self.constants
        if self.kind == "ho-eigenstate" and c.get("omega", 1.0) <= 0:
            raise DomainError("omega must be positive")
        if self.kind == "airy" and c.get("beta", 1.0) == 0:
            raise DomainError("beta must be nonzero")
        if self.kind == "gaussian" and c.get("sigma", 1.0) <= 0:
            raise DomainError("sigma must be positive")
        if self.kind == "morse-ground" and (c.get("D", 8.0) <= 0 or c.get("alpha", 1.0) <= 0):
            raise DomainError("Morse depth and width must be positive")

    def polar(self, grid, t):
        """(PolarField, V samples) at time t."""
        c, p = self.constants, self.params
        if self.kind == "plane-wave":
            return plane_wave(grid, t, p, k=c.get("k"), omega=c.get("omega"))
        if self.kind == "gaussian":
            return gaussian_polar(grid, t, p, sigma=c.get("sigma"), k0=c.get("k0"))
        if self.kind == "ho-eigenstate":
            return ho_eigenstate(int(c["n"]), grid, t, p, omega=c.get("omega"))
        if self.kind == "airy":
            return airy_solution(grid, t, p, beta=c.get("beta"))
        return morse_ground(grid, p, D=c.get("D"), alpha=c.get("alpha"), t=t)

    def slices(self, grid, t, dt, count=3):
        """`count` PolarFields centred on t with spacing dt, plus V at t."""
        half = count // 2
        fields = [self.polar(grid, t + (j - half) * dt)[0] for j in range(count)]
        return fields, self.polar(grid, t)[1]


def solution_from_name(name, params):
    """Parse the CLI names: airy[:beta], ho:n[,omega], plane:k,omega, gauss:sigma,k0, morse:D,alpha."""
    head, _, tail = name.partition(":")
    try:
        args = [float(v) for v in tail.split(",")] if tail else []
    except ValueError as exc:
        raise UsageError(f"bad numeric argument in solution name {name!r}") from exc
    if head == "airy":
        consts = {"beta": args[0]} if args else {}
        return AnalyticSolution("airy", params, consts)
    if head == "ho":
        if not args or not float(args[0]).is_integer():
            raise UsageError("ho needs an integer level, e.g. ho:2")
        consts = {"n": int(args[0])}
        if len(args) > 1:
            consts["omega"] = args[1]
        return AnalyticSolution("ho-eigenstate", params, consts)
    if head == "plane":
        if len(args) != 2:
            raise UsageError("plane needs k,omega, e.g. plane:1,0.5")
        return AnalyticSolution("plane-wave", params, {"k": args[0], "omega": args[1]})
    if head == "gauss":
        if len(args) != 2:
            raise UsageError("gauss needs sigma,k0, e.g. gauss:1,0")
        return AnalyticSolution("gaussian", params, {"sigma": args[0], "k0": args[1]})
    if head == "morse":
        if len(args) != 2:
            raise UsageError("morse needs D,alpha, e.g. morse:8,1")
        return AnalyticSolution("morse-ground", params, {"D": args[0], "alpha": args[1]})
    raise UsageError(f"unknown solution {name!r}")
