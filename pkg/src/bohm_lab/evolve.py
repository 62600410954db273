"""Split-step Fourier propagator for i hbar psi_t = -(hbar^2/2m) psi'' + V psi.

Symmetric (Strang) splitting on a periodic grid:

    psi <- exp(-i V(t+dt) dt / 2hbar) F^-1 exp(-i hbar k^2 dt / 2m) F exp(-i V(t) dt / 2hbar) psi

Each factor is unitary, so the norm is conserved to roundoff; the scheme is
second order in dt.
"""

from dataclasses import dataclass
import csv
import json
import math

import numpy as np

from .errors import DivergenceError, UsageError
from .field import ComplexField, norm

STRANG = "strang"


@dataclass(frozen=True)
class PropagatorConfig:
    dt: float
    steps: int
    potential: object = None  # None, scalar, array of samples, or callable V(x, t)
    record_every: int = 1
    splitting: str = STRANG

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise UsageError(f"dt must be positive, got {self.dt}")
        if int(self.steps) != self.steps or self.steps < 1:
            raise UsageError(f"steps must be a positive integer, got {self.steps}")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise UsageError(f"record_every must be a positive integer, got {self.record_every}")
        if self.splitting != STRANG:
            raise UsageError(f"only Strang splitting is supported, got {self.splitting!r}")

    @property
    def time_dependent(self):
        return callable(self.potential)


def _sampler(potential, grid):
    """Return V(t) -> samples; static potentials are sampled once."""
    if potential is None:
        zeros = np.zeros(grid.n)
        return lambda t: zeros
    if callable(potential):
        return lambda t: np.asarray(potential(grid.x, t), dtype=float) * np.ones(grid.n)
    arr = np.asarray(potential, dtype=float)
    if arr.ndim == 0:
        arr = np.full(grid.n, float(arr))
    if arr.shape != (grid.n,):
        raise UsageError("potential samples do not match the grid")
    return lambda t: arr


def wavenumbers(grid):
    return 2 * np.pi * np.fft.fftfreq(grid.n, d=grid.dx)


def evolve(psi0, cfg, params):
    """Propagate psi0; returns snapshots at t0 and every ``record_every`` steps.

    The final step is always recorded.
    """
    grid = psi0.grid
    if not grid.periodic:
        raise UsageError("the split-step propagator needs a periodic grid")
    grid.require_power_of_two()
    hbar, m = params.hbar, params.mass
    V = _sampler(cfg.potential, grid)
    kinetic = np.exp(-1j * hbar * wavenumbers(grid) ** 2 * cfg.dt / (2 * m))
    half = -0.5j * cfg.dt / hbar

    t0 = psi0.time
    psi = np.array(psi0.values, dtype=complex)
    series = [psi0]
    v_now = V(t0)
    for step in range(1, cfg.steps + 1):
        t_next = t0 + step * cfg.dt
        psi *= np.exp(half * v_now)
        psi = np.fft.ifft(kinetic * np.fft.fft(psi))
        if cfg.time_dependent:
            v_now = V(t_next)
        psi *= np.exp(half * v_now)
        if not np.all(np.isfinite(psi)):
            raise DivergenceError(f"non-finite wavefunction at step {step}", step=step)
        if step % cfg.record_every == 0 or step == cfg.steps:
            series.append(ComplexField(grid, psi.copy(), t_next))
    return series


@dataclass(frozen=True)
class Observables:
    t: float
    norm: float
    energy: float
    x_peak: float
    x_mean: float

    def to_dict(self):
        return {"t": self.t, "norm": self.norm, "energy": self.energy,
                "x_peak": self.x_peak, "x_mean": self.x_mean}


def kinetic_energy(psi, params):
    """<psi| -hbar^2/2m d^2/dx^2 |psi> (unnormalized) via Parseval."""
    grid = psi.grid
    coeffs = np.fft.fft(psi.values)
    k = wavenumbers(grid)
    return float(np.sum(np.abs(coeffs) ** 2 * k**2) * grid.dx / grid.n
                 * params.hbar**2 / (2 * params.mass))


def peak_position(psi, window=None):
    """Location of the max of |psi|^2, refined by a parabola through log|psi|^2."""
    grid = psi.grid
    dens = np.abs(psi.values) ** 2
    candidates = np.ones(grid.n, dtype=bool)
    if window is not None:
        candidates = (grid.x >= window[0]) & (grid.x <= window[1])
        if not candidates.any():
            raise UsageError("peak window contains no grid points")
    i = int(np.argmax(np.where(candidates, dens, -np.inf)))
    n = grid.n
    if not grid.periodic and (i == 0 or i == n - 1):
        return float(grid.x[i])
    lo, mid, hi = dens[(i - 1) % n], dens[i], dens[(i + 1) % n]
    # no refinement unless the sample is a genuine local maximum (not a window edge)
    if min(lo, mid, hi) <= 0 or lo > mid or hi > mid:
        return float(grid.x[i])
    y0, y1, y2 = np.log(lo), np.log(mid), np.log(hi)
    curv = y0 - 2 * y1 + y2
    offset = 0.0 if curv == 0 else 0.5 * (y0 - y2) / curv
    return float(grid.x[i] + offset * grid.dx)


def observables(series, params, potential=None, peak_window=None):
    """Norm, energy (per unit norm^2), peak position and <x> of each snapshot."""
    out = []
    for psi in series:
        grid = psi.grid
        V = _sampler(potential, grid)(psi.time)
        dens = np.abs(psi.values) ** 2
        n2 = float(dens.sum() * grid.dx)
        pot = float(np.sum(V * dens) * grid.dx)
        energy = (kinetic_energy(psi, params) + pot) / n2
        x_mean = float(np.sum(grid.x * dens) * grid.dx / n2)
        out.append(Observables(psi.time, norm(psi), energy, peak_position(psi, peak_window), x_mean))
    return out


def apodize(values, grid, fraction=0.1):
    """Multiply by a cosine taper that falls from 1 to 0 over the outer ``fraction`` of each edge."""
    if not 0 < fraction < 0.5:
        raise UsageError("taper fraction must be in (0, 0.5)")
    x = grid.x
    width = fraction * grid.length
    left = (x - grid.x_min) / width
    right = (grid.x_min + grid.length - x) / width
    ramp = np.clip(np.minimum(left, right), 0.0, 1.0)
    taper = 0.5 - 0.5 * np.cos(np.pi * ramp)
    return np.asarray(values) * taper


def fit_peak_acceleration(obs, t_max=None):
    """2 x the quadratic coefficient of a least-squares fit to x_peak(t)."""
    ts = np.array([o.t for o in obs])
    xs = np.array([o.x_peak for o in obs])
    if t_max is not None:
        keep = ts <= t_max + 1e-12
        ts, xs = ts[keep], xs[keep]
    if ts.size < 3:
        raise UsageError("need at least three snapshots to fit an acceleration")
    return 2.0 * float(np.polyfit(ts, xs, 2)[0])


def write_series_csv(path, series):
    """Long-format CSV with columns t,x,re,im."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x", "re", "im"])
        for psi in series:
            for x, z in zip(psi.grid.x, psi.values):
                w.writerow([repr(float(psi.time)), repr(float(x)), repr(z.real), repr(z.imag)])


def write_observables_json(path, obs):
    with open(path, "w") as fh:
        json.dump([o.to_dict() for o in obs], fh, indent=2)
        fh.write("\n")
