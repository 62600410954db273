"""Bohm potential, Madelung residuals and Bohmian trajectories."""

from dataclasses import dataclass
import json
import math

import numpy as np

from .errors import DegenerateFieldError, UsageError
from .field import NODE_THRESHOLD, Grid1D, derivative, fd_weights, stencil_reach

# A''/A is needed to ~1e-6 at dx = 0.01 out to |x| ~ 6, which rules out the
# O(dx^2) stencil (error ~ dx^2 x^4 / 12 there). Eighth order keeps the
# truncation term below rounding while staying local, so rounding in A''
# remains relative to the local amplitude rather than to max|A|.
DEFAULT_ACCURACY = 8
NODE_RADIUS = 0.05


@dataclass(frozen=True)
class BohmPotentialField:
    grid: Grid1D
    values: np.ndarray  # NaN at masked points
    mask: np.ndarray
    time: float = 0.0


@dataclass(frozen=True)
class ResidualReport:
    l_inf: float
    l2: float
    masked_fraction: float
    grid: Grid1D
    time: float

    def to_dict(self):
        return {
            "l_inf": self.l_inf,
            "l2": self.l2,
            "masked_fraction": self.masked_fraction,
            "grid": self.grid.to_dict(),
            "time": self.time,
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    truncated: bool = False

    def __post_init__(self):
        if len(self.times) > 1 and np.any(np.diff(self.times) <= 0):
            raise UsageError("trajectory times must be strictly increasing")


# -- masking -------------------------------------------------------------------


def find_nodes(polar, hbar):
    """Locations of amplitude zeros visible in the samples.

    Sign changes of A (linearly interpolated), exact zeros, phase jumps of more
    than pi/2 between neighbours (a node in nonnegative mode) and any nodes
    the field declares explicitly.
    """
    x = polar.grid.x
    amp = polar.amplitude
    locs = [x[amp == 0]]
    a0, a1 = amp[:-1], amp[1:]
    change = a0 * a1 < 0
    if change.any():
        frac = a0[change] / (a0[change] - a1[change])
        locs.append(x[:-1][change] + frac * polar.grid.dx)
    jump = np.diff(polar.phase) / hbar
    jump = (jump + np.pi) % (2 * np.pi) - np.pi
    big = np.abs(jump) > 0.5 * np.pi
    if big.any():
        locs.append(x[:-1][big] + 0.5 * polar.grid.dx)
    locs.append(np.asarray(polar.nodes, dtype=float))
    return np.sort(np.concatenate(locs))


def node_mask(polar, hbar, threshold=NODE_THRESHOLD, radius=NODE_RADIUS, reach=0):
    """Mask of points where A''/A and the phase cannot be trusted.

    Points with |A| <= threshold * max|A| are masked, and so is every point
    within max(radius, reach*dx) of a node.
    """
    mask = polar.node_mask(threshold)
    nodes = find_nodes(polar, hbar)
    if nodes.size:
        r = max(radius, reach * polar.grid.dx)
        x = polar.grid.x
        pos = np.searchsorted(nodes, x)
        left = np.abs(x - nodes[np.clip(pos - 1, 0, nodes.size - 1)])
        right = np.abs(nodes[np.clip(pos, 0, nodes.size - 1)] - x)
        mask |= np.minimum(left, right) <= r
    return mask


def _window_mask(grid, window):
    if window is None:
        return np.ones(grid.n, dtype=bool)
    lo, hi = window
    x = grid.x
    return (x >= lo - 1e-12) & (x <= hi + 1e-12)


def summarize(values, mask, grid, time, window=None):
    """Collapse a residual field into a ResidualReport over unmasked points in `window`."""
    inside = _window_mask(grid, window)
    keep = inside & ~mask
    if not keep.any():
        raise DegenerateFieldError("every point in the evaluation window is masked")
    r = np.abs(values[keep])
    return ResidualReport(
        l_inf=float(r.max()),
        l2=float(math.sqrt(np.mean(r**2))),
        masked_fraction=float((inside & mask).sum() / inside.sum()),
        grid=grid,
        time=float(time),
    )


# -- Bohm potential ------------------------------------------------------------


def bohm_potential(polar, params, *, scheme="fd", accuracy=DEFAULT_ACCURACY,
                   threshold=NODE_THRESHOLD, node_radius=NODE_RADIUS):
    """V_B = -(hbar^2 / 2m) A''/A, masked near nodes and where A is negligible."""
    amp = polar.amplitude
    if np.abs(amp).max() == 0:
        raise DegenerateFieldError("amplitude is identically zero")
    d2 = derivative(amp, polar.grid, 2, scheme=scheme, accuracy=accuracy)
    mask = node_mask(polar, params.hbar, threshold, node_radius,
                     reach=stencil_reach(2, accuracy) if scheme == "fd" else 0)
    if mask.all():
        raise DegenerateFieldError("every grid point is masked")
    with np.errstate(divide="ignore", invalid="ignore"):
        vb = -(params.hbar**2 / (2.0 * params.mass)) * d2 / amp
    vb = np.where(mask, np.nan, vb)
    return BohmPotentialField(polar.grid, vb, mask, polar.time)


def _segment_derivative(values, mask, grid, accuracy):
    """First derivative computed separately on each contiguous unmasked run."""
    out = np.full(grid.n, np.nan)
    good = ~mask
    edges = np.flatnonzero(np.diff(np.concatenate(([0], good.astype(int), [0]))))
    min_len = max(8, 1 + accuracy)
    for start, stop in zip(edges[::2], edges[1::2]):
        if stop - start < min_len:
            continue
        if grid.periodic and start == 0 and stop == grid.n:
            out[:] = derivative(values, grid, 1, accuracy=accuracy)
            continue
        sub = Grid1D(grid.x[start], grid.x[stop - 1], stop - start, False)
        out[start:stop] = derivative(values[start:stop], sub, 1, accuracy=accuracy)
    return out


def bohm_force_and_acceleration(vb, params, accuracy=DEFAULT_ACCURACY):
    """Force -V_B' and acceleration -V_B'/m; NaN at masked points."""
    force = -_segment_derivative(vb.values, vb.mask, vb.grid, accuracy)
    return force, force / params.mass


# -- Madelung residuals --------------------------------------------------------


def _middle(slices):
    if len(slices) < 3 or len(slices) % 2 == 0:
        raise UsageError("need an odd number (>= 3) of time slices")
    grid = slices[0].grid
    if any(s.grid != grid for s in slices):
        raise UsageError("time slices live on different grids")
    t = np.array([s.time for s in slices])
    steps = np.diff(t)
    if np.any(steps <= 0) or not np.allclose(steps, steps[0], rtol=1e-9, atol=0):
        raise UsageError("time slices must be uniformly spaced and increasing")
    return slices[len(slices) // 2], steps[0]


def _time_derivative(samples, dt):
    """Central d/dt at the middle sample, order len(samples) - 1 in dt."""
    half = len(samples) // 2
    weights = fd_weights(list(range(-half, half + 1)), 1)
    return sum(float(w) * s for w, s in zip(weights, samples)) / dt


def _potential_samples(V, grid, t):
    if V is None:
        return np.zeros(grid.n)
    if callable(V):
        return np.asarray(V(grid.x, t), dtype=float) * np.ones(grid.n)
    arr = np.asarray(V, dtype=float)
    if arr.ndim == 0:
        return np.full(grid.n, float(arr))
    if arr.shape != (grid.n,):
        raise UsageError("potential samples do not match the grid")
    return arr


def phase_rate(slices, dt, hbar):
    """Centered dS/dt at the middle slice.

    Each slice's phase is shifted by a multiple of 2 pi hbar, pointwise, to sit
    on the middle slice's branch before differencing.
    """
    ref = slices[len(slices) // 2].phase
    period = 2 * np.pi * hbar
    phases = [s.phase - period * np.round((s.phase - ref) / period) for s in slices]
    return _time_derivative(phases, dt)


def qhj_residual_field(slices, V, params, *, scheme="fd", accuracy=DEFAULT_ACCURACY,
                       threshold=NODE_THRESHOLD, node_radius=NODE_RADIUS):
    """(S')^2/2m + V_B + V + dS/dt at the middle slice; returns (values, mask)."""
    now, dt = _middle(slices)
    vb = bohm_potential(now, params, scheme=scheme, accuracy=accuracy,
                        threshold=threshold, node_radius=node_radius)
    s_x = derivative(now.phase, now.grid, 1, scheme=scheme, accuracy=accuracy)
    s_t = phase_rate(slices, dt, params.hbar)
    pot = _potential_samples(V, now.grid, now.time)
    with np.errstate(invalid="ignore"):
        res = s_x**2 / (2 * params.mass) + vb.values + pot + s_t
    return res, vb.mask


def qhj_residual(slices, V, params, window=None, **kwargs):
    res, mask = qhj_residual_field(slices, V, params, **kwargs)
    mid = slices[len(slices) // 2]
    return summarize(res, mask, mid.grid, mid.time, window)


def continuity_residual_field(slices, params, *, scheme="fd", accuracy=DEFAULT_ACCURACY,
                              threshold=NODE_THRESHOLD, node_radius=NODE_RADIUS):
    """(A^2 S')'/m + d(A^2)/dt at the middle slice; returns (values, mask)."""
    now, dt = _middle(slices)
    grid = now.grid
    rho = now.amplitude**2
    s_x = derivative(now.phase, grid, 1, scheme=scheme, accuracy=accuracy)
    flux_x = derivative(rho * s_x, grid, 1, scheme=scheme, accuracy=accuracy)
    rho_t = _time_derivative([s.amplitude**2 for s in slices], dt)
    res = flux_x / params.mass + rho_t
    reach = 2 * stencil_reach(1, accuracy) if scheme == "fd" else 0
    mask = node_mask(now, params.hbar, threshold, node_radius, reach=reach)
    return res, mask


def continuity_residual(slices, params, window=None, **kwargs):
    res, mask = continuity_residual_field(slices, params, **kwargs)
    mid = slices[len(slices) // 2]
    return summarize(res, mask, mid.grid, mid.time, window)


# -- trajectories --------------------------------------------------------------


def velocity_field(polar, params, scheme="fd", accuracy=DEFAULT_ACCURACY):
    """Bohmian velocity S'/m."""
    return derivative(polar.phase, polar.grid, 1, scheme=scheme, accuracy=accuracy) / params.mass


def integrate_trajectory(series, x0, params, scheme="fd", accuracy=DEFAULT_ACCURACY):
    """Integrate dx/dt = S'(x, t)/m through a uniformly spaced series of PolarFields.

    RK4 with the series spacing as step; the velocity is interpolated linearly
    in x and in t. On a non-periodic grid the run stops when the particle
    leaves the grid and the partial trajectory is returned with
    ``truncated=True``. On a periodic grid positions are left unwrapped.
    """
    if len(series) < 2:
        raise UsageError("need at least two slices to integrate")
    grid = series[0].grid
    times = np.array([p.time for p in series])
    steps = np.diff(times)
    if np.any(steps <= 0) or not np.allclose(steps, steps[0], rtol=1e-9, atol=0):
        raise UsageError("trajectory slices must be uniformly spaced in time")
    if not grid.x_min <= x0 <= grid.x_max:
        raise UsageError(f"start point {x0} lies outside the grid")
    x = grid.x
    vel = [velocity_field(p, params, scheme, accuracy) for p in series]
    period = grid.length if grid.periodic else None

    def v_at(pos, k, frac):
        if not grid.periodic and not grid.x_min <= pos <= grid.x[-1]:
            raise _LeftGrid
        v0 = np.interp(pos, x, vel[k], period=period)
        if frac == 0.0:
            return float(v0)
        v1 = np.interp(pos, x, vel[k + 1], period=period)
        return float((1 - frac) * v0 + frac * v1)

    positions = [float(x0)]
    velocities = [v_at(x0, 0, 0.0)]
    truncated = False
    for k in range(len(series) - 1):
        h = steps[k]
        pos = positions[-1]
        try:
            k1 = v_at(pos, k, 0.0)
            k2 = v_at(pos + 0.5 * h * k1, k, 0.5)
            k3 = v_at(pos + 0.5 * h * k2, k, 0.5)
            k4 = v_at(pos + h * k3, k + 1, 0.0)
            new = pos + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6
            velocities.append(v_at(new, k + 1, 0.0))
        except _LeftGrid:
            truncated = True
            break
        positions.append(new)
    n = len(positions)
    return Trajectory(times[:n], np.array(positions), np.array(velocities[:n]), truncated)


class _LeftGrid(Exception):
    pass


def fit_acceleration(times, positions):
    """Acceleration of the least-squares parabola through x(t)."""
    coeffs = np.polyfit(np.asarray(times), np.asarray(positions), 2)
    return 2.0 * coeffs[0]
