"""Uniform 1-D grids, sampled fields, derivatives and the Madelung (polar) split."""

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
import csv
import math

import numpy as np

from .errors import DegenerateFieldError, UsageError

NODE_THRESHOLD = 1e-8

SIGNED = "signed"
NONNEGATIVE = "nonnegative"
_MODES = (SIGNED, NONNEGATIVE)


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid. Periodic grids omit the right endpoint (it aliases x_min)."""

    x_min: float
    x_max: float
    n: int
    periodic: bool = False

    def __post_init__(self):
        if self.n < 8:
            raise UsageError(f"grid needs at least 8 points, got {self.n}")
        if not self.x_max > self.x_min:
            raise UsageError("x_max must exceed x_min")

    @property
    def dx(self):
        span = self.x_max - self.x_min
        return span / self.n if self.periodic else span / (self.n - 1)

    @property
    def length(self):
        return self.x_max - self.x_min

    @property
    def x(self):
        return self.x_min + self.dx * np.arange(self.n)

    @classmethod
    def from_spacing(cls, x_min, x_max, dx, periodic=False):
        """Grid covering [x_min, x_max] with spacing as close to dx as the span allows."""
        cells = int(round((x_max - x_min) / dx))
        return cls(x_min, x_max, cells if periodic else cells + 1, periodic)

    def index_of(self, x):
        return int(round((x - self.x_min) / self.dx))

    def require_power_of_two(self):
        if self.n & (self.n - 1):
            raise UsageError(f"spectral propagation needs a power-of-two grid, got n={self.n}")

    def to_dict(self):
        return {"x_min": self.x_min, "x_max": self.x_max, "n": self.n, "periodic": self.periodic}


@dataclass(frozen=True)
class PhysicalParams:
    hbar: float = 1.0
    mass: float = 1.0
    extras: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if not self.hbar > 0:
            raise UsageError(f"hbar must be positive, got {self.hbar}")
        if not self.mass > 0:
            raise UsageError(f"mass must be positive, got {self.mass}")

    def get(self, name, default=None):
        return self.extras.get(name, default)


def _frozen(values, dtype):
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ComplexField:
    grid: Grid1D
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        vals = _frozen(self.values, complex)
        if vals.shape != (self.grid.n,):
            raise UsageError(f"expected {self.grid.n} samples, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise UsageError("ComplexField samples must be finite")
        object.__setattr__(self, "values", vals)

    def norm(self):
        return norm(self)


@dataclass(frozen=True)
class PolarField:
    """Madelung pair A, S with psi = A exp(i S / hbar).

    ``nodes`` lists known zeros of A (beyond those visible as sign changes);
    they are excluded from Bohm-potential and residual evaluations.
    """

    grid: Grid1D
    amplitude: np.ndarray
    phase: np.ndarray
    mode: str = SIGNED
    time: float = 0.0
    nodes: tuple = ()

    def __post_init__(self):
        if self.mode not in _MODES:
            raise UsageError(f"mode must be one of {_MODES}, got {self.mode!r}")
        amp = _frozen(self.amplitude, float)
        ph = _frozen(self.phase, float)
        if amp.shape != (self.grid.n,) or ph.shape != (self.grid.n,):
            raise UsageError("amplitude and phase must match the grid size")
        if not (np.all(np.isfinite(amp)) and np.all(np.isfinite(ph))):
            raise UsageError("PolarField samples must be finite")
        if self.mode == NONNEGATIVE and np.any(amp < 0):
            raise UsageError("nonnegative-amplitude field has negative samples")
        object.__setattr__(self, "amplitude", amp)
        object.__setattr__(self, "phase", ph)
        object.__setattr__(self, "nodes", tuple(float(v) for v in self.nodes))

    def node_mask(self, threshold=NODE_THRESHOLD):
        """Points where |A| is too small for the phase or A''/A to mean anything."""
        amp = np.abs(self.amplitude)
        return amp <= threshold * amp.max()


# -- norms ---------------------------------------------------------------------


def norm(psi):
    """sqrt(sum |psi|^2 dx); trapezoid weights on non-periodic grids."""
    dens = np.abs(psi.values) ** 2
    if psi.grid.periodic:
        return math.sqrt(dens.sum() * psi.grid.dx)
    return math.sqrt(np.trapezoid(dens, dx=psi.grid.dx))


# -- polar decomposition -------------------------------------------------------


def polar_decompose(psi, params, mode=NONNEGATIVE, threshold=NODE_THRESHOLD):
    """Split psi into A and S = hbar * (unwrapped phase).

    Unwrapping runs left to right from the first sample, whose phase lies in
    (-pi, pi] (in signed mode (-pi/2, pi/2], the rest going into the sign of
    A). In signed mode a phase jump between neighbours larger than pi/2
    (after removing multiples of 2 pi) is read as a sign change of A, so real
    wavefunctions keep S smooth across their nodes. This assumes the true phase
    advances by less than pi/2 per sample.
    """
    if mode not in _MODES:
        raise UsageError(f"mode must be one of {_MODES}, got {mode!r}")
    vals = psi.values
    mag = np.abs(vals)
    if mag.max() == 0:
        raise DegenerateFieldError("cannot decompose an all-zero field")
    raw = np.angle(vals)
    # The angle of an exact zero is meaningless; carry the neighbour's phase.
    zero = mag == 0
    if zero.any():
        raw = raw.copy()
        idx = np.where(~zero, np.arange(len(raw)), 0)
        np.maximum.accumulate(idx, out=idx)
        raw = raw[idx]
    if mode == NONNEGATIVE:
        theta = np.unwrap(raw)
        amp = mag
    else:
        step = np.diff(raw)
        step = (step + np.pi) % (2 * np.pi) - np.pi
        flip = np.abs(step) > 0.5 * np.pi
        step = np.where(flip, step - np.pi * np.sign(step), step)
        sign = np.concatenate(([1.0], np.where(np.cumsum(flip) % 2 == 1, -1.0, 1.0)))
        # anchor in (-pi/2, pi/2]; a half turn goes into the sign of A, so real fields get S = 0
        start = raw[0]
        if start > 0.5 * np.pi:
            start, sign = start - np.pi, -sign
        elif start <= -0.5 * np.pi:
            start, sign = start + np.pi, -sign
        theta = start + np.concatenate(([0.0], np.cumsum(step)))
        amp = sign * mag
    return PolarField(psi.grid, amp, params.hbar * theta, mode=mode, time=psi.time)


def recompose(polar, params):
    """psi = A exp(i S / hbar)."""
    vals = polar.amplitude * np.exp(1j * polar.phase / params.hbar)
    return ComplexField(polar.grid, vals, polar.time)


def restore_sign(amplitude):
    """Undo |.| on a sampled amplitude: flip sign across interior kinks at zeros.

    At every interior local minimum the three candidate placements of a
    simple zero (none, left of the minimum, right of it) are compared by the
    size of the local second differences; the smoothest one wins.
    """
    amp = np.array(amplitude, dtype=float)
    out = amp.copy()
    n = len(amp)
    interior = np.arange(2, n - 2)
    minima = interior[(amp[interior] <= amp[interior - 1]) & (amp[interior] <= amp[interior + 1])]
    sign = np.ones(n)
    for i in minima:
        window = slice(i - 2, i + 3)
        local = amp[window]

        def roughness(flip_from):
            trial = local.copy()
            if flip_from is not None:
                trial[flip_from:] *= -1
            return np.abs(np.diff(trial, 2)).sum()

        options = {None: roughness(None), 2: roughness(2), 3: roughness(3)}
        if amp[i] == 0:
            options.pop(2)
        best = min(options, key=options.get)
        if best is not None and options[best] < 0.5 * options[None]:
            sign[i - 2 + best:] *= -1
    return out * sign


# -- derivatives ---------------------------------------------------------------


def fd_weights(offsets, order):
    """Exact finite-difference weights (Fornberg) for derivative `order` at 0."""
    offsets = [Fraction(o) for o in offsets]
    m = len(offsets)
    c = [[Fraction(0)] * (order + 1) for _ in range(m)]
    c[0][0] = Fraction(1)
    c1 = Fraction(1)
    for i in range(1, m):
        c2 = Fraction(1)
        row_prev = list(c[i - 1])
        for j in range(i):
            c3 = offsets[i] - offsets[j]
            c2 *= c3
            for k in range(min(i, order), -1, -1):
                lower = c[j][k - 1] if k > 0 else 0
                c[j][k] = (offsets[i] * c[j][k] - k * lower) / c3
        for k in range(min(i, order), -1, -1):
            lower = row_prev[k - 1] if k > 0 else 0
            c[i][k] = c1 * (k * lower - offsets[i - 1] * row_prev[k]) / c2
        c1 = c2
    return [c[j][order] for j in range(m)]


@lru_cache(maxsize=64)
def _stencils(order, accuracy):
    """Central stencil plus one-sided boundary stencils, all of the same accuracy."""
    half = (order + accuracy - 1) // 2
    central = np.array([float(w) for w in fd_weights(range(-half, half + 1), order)])
    width = order + accuracy  # points in a one-sided stencil
    left = []
    for i in range(half):
        offs = [j - i for j in range(width)]
        left.append((np.array(offs), np.array([float(w) for w in fd_weights(offs, order)])))
    return half, central, left


def derivative(values, grid, order=1, scheme="fd", accuracy=2):
    """d^order/dx^order of real samples.

    scheme "fd": central differences of the given even accuracy (2 gives the
    O(dx^2) scheme) with one-sided stencils of equal accuracy at the ends of a
    non-periodic grid. scheme "spectral": Fourier differentiation, periodic
    grids only.
    """
    if order not in (1, 2):
        raise UsageError(f"derivative order must be 1 or 2, got {order}")
    f = np.asarray(values, dtype=float)
    if f.shape != (grid.n,):
        raise UsageError("sample count does not match the grid")
    if scheme == "spectral":
        if not grid.periodic:
            raise UsageError("spectral derivatives need a periodic grid")
        k = 2 * np.pi * np.fft.rfftfreq(grid.n, d=grid.dx)
        fk = np.fft.rfft(f) * (1j * k) ** order
        if order == 1 and grid.n % 2 == 0:
            fk[-1] = 0.0  # Nyquist mode has no odd derivative
        return np.fft.irfft(fk, n=grid.n)
    if scheme != "fd":
        raise UsageError(f"unknown derivative scheme {scheme!r}")
    if accuracy % 2 or accuracy < 2:
        raise UsageError(f"accuracy must be a positive even integer, got {accuracy}")
    half, central, left = _stencils(order, accuracy)
    scale = grid.dx ** order
    if grid.periodic:
        out = np.zeros_like(f)
        for j, w in zip(range(-half, half + 1), central):
            out += w * np.roll(f, -j)
        return out / scale
    if grid.n < order + accuracy:
        raise UsageError("grid too short for the requested stencil")
    out = np.zeros_like(f)
    n = grid.n
    for j, w in zip(range(-half, half + 1), central):
        out[half:n - half] += w * f[half + j:n - half + j]
    for i, (offs, w) in enumerate(left):
        out[i] = np.dot(w, f[i + offs])
        # mirror image for the right end
        out[n - 1 - i] = (-1) ** order * np.dot(w, f[n - 1 - i - offs])
    return out / scale


def stencil_reach(order, accuracy):
    """Number of neighbours on each side used by the central stencil."""
    return (order + accuracy - 1) // 2


# -- CSV -----------------------------------------------------------------------


def write_field_csv(path, fld, params=None):
    """Write `x,re,im` (ComplexField) or `x,A,S` (PolarField), 17 significant digits."""
    x = fld.grid.x
    if isinstance(fld, ComplexField):
        header, cols = ["x", "re", "im"], [x, fld.values.real, fld.values.imag]
    elif isinstance(fld, PolarField):
        header, cols = ["x", "A", "S"], [x, fld.amplitude, fld.phase]
    else:
        raise UsageError(f"cannot serialize {type(fld).__name__}")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in zip(*cols):
            writer.writerow([f"{v:.17g}" for v in row])


def read_field_csv(path, periodic=False, time=0.0, mode=SIGNED):
    """Inverse of :func:`write_field_csv`; the grid is rebuilt from the x column."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = np.array([[float(v) for v in row] for row in reader])
    x = data[:, 0]
    dx = x[1] - x[0]
    grid = Grid1D(x[0], x[-1] + dx, len(x), True) if periodic else Grid1D(x[0], x[-1], len(x), False)
    if header == ["x", "re", "im"]:
        return ComplexField(grid, data[:, 1] + 1j * data[:, 2], time)
    if header == ["x", "A", "S"]:
        return PolarField(grid, data[:, 1], data[:, 2], mode=mode, time=time)
    raise UsageError(f"unrecognized CSV header {header}")
