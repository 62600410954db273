"""Special functions needed by the analytic catalog: Airy Ai, Hermite H_n, Gamma.

Everything here is self-contained (numpy plus the standard library).

Airy Ai
-------
Inside ``|x| <= series_cutoff`` Ai is taken from its Maclaurin series

    Ai(x) = c1 f(x) - c2 g(x)
    f(x) = sum_k 3^k (1/3)_k x^(3k) / (3k)!
    g(x) = sum_k 3^k (2/3)_k x^(3k+1) / (3k+1)!

The terms of f and g grow like exp((2/3)|x|^(3/2)) before they decay, so in
double precision the sum loses up to ~18 digits at |x| = 10. The series is
therefore summed once, in decimal arithmetic, at the nodes of a fixed anchor
lattice (spacing 1/8). Each requested point is then reached from its nearest
anchor by a short Taylor step generated by the Airy equation y'' = x y, which
converges fast and involves no cancellation.

Outside the cutoff the standard large-|x| expansions are used (oscillatory
form for x < 0, exponentially small form for x > 0). With the default cutoff
of 10 the optimally truncated expansions are accurate to ~1e-18 relative,
so the two branches agree to rounding at the handoff.
"""

from dataclasses import dataclass
from decimal import Decimal, localcontext
from functools import lru_cache
import math

import numpy as np

from .errors import DomainError, EvaluationError

__all__ = [
    "AiryEvalConfig",
    "HermiteOrder",
    "airy_ai",
    "airy_ai_series",
    "airy_ai_asymptotic",
    "hermite",
    "gamma_fn",
    "AI0",
    "AIP0",
]

# Ai(0) = 3^(-2/3)/Gamma(2/3) and Ai'(0) = -3^(-1/3)/Gamma(1/3), 60 digits.
_AI0_STR = "0.355028053887817239260063186004183176397979174199177240583327"
_AIP0_STR = "-0.258819403792806798405183560189203963479091138354934582210002"
AI0 = float(_AI0_STR)
AIP0 = float(_AIP0_STR)

_ANCHOR_STEP = 0.125


@dataclass(frozen=True)
class AiryEvalConfig:
    """Controls for :func:`airy_ai`.

    ``series_cutoff`` is the |x| beyond which the asymptotic expansion is
    used. ``tol`` is the relative truncation threshold for every series.
    """

    series_cutoff: float = 10.0
    max_terms: int = 200
    tol: float = 1e-15

    def __post_init__(self):
        if not self.series_cutoff > 0:
            raise DomainError(f"series_cutoff must be > 0, got {self.series_cutoff}")
        if not self.tol > 0:
            raise DomainError(f"tol must be > 0, got {self.tol}")
        if self.max_terms < 1:
            raise DomainError(f"max_terms must be >= 1, got {self.max_terms}")


DEFAULT_AIRY = AiryEvalConfig()


@dataclass(frozen=True)
class HermiteOrder:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise DomainError(f"Hermite order must be a nonnegative integer, got {self.n}")


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("Airy Ai requires finite arguments")
    return arr


def _wrap(result, like):
    return float(result) if np.ndim(like) == 0 else result


# -- Maclaurin anchors --------------------------------------------------------


def _maclaurin_decimal(x0, digits, max_terms):
    """Ai(x0), Ai'(x0) from the Maclaurin series in `digits`-digit decimal arithmetic."""
    with localcontext() as ctx:
        ctx.prec = digits
        x = Decimal(repr(x0))
        x3 = x * x * x
        eps = Decimal(10) ** (-digits + 3)
        # f, g and their derivatives; p, q are the derivative terms
        t, s = Decimal(1), x
        p, q = Decimal(0), Decimal(1)
        f, g, fp, gp = t, s, p, q
        p = x * x / 2
        fp += p
        for k in range(1, max_terms + 1):
            t = t * x3 / ((3 * k - 1) * (3 * k))
            s = s * x3 / ((3 * k) * (3 * k + 1))
            q = q * x3 / ((3 * k - 2) * (3 * k))
            if k > 1:
                p = p * x3 / ((3 * k - 3) * (3 * k - 1))
                fp += p
            f += t
            g += s
            gp += q
            scale = max(abs(f), abs(g), abs(fp), abs(gp), Decimal(1))
            if max(abs(t), abs(s), abs(p), abs(q)) < eps * scale:
                break
        else:
            raise EvaluationError(
                f"Airy Maclaurin series did not converge within {max_terms} terms at x={x0}"
            )
        c1, c2 = Decimal(_AI0_STR), -Decimal(_AIP0_STR)
        return float(c1 * f - c2 * g), float(c1 * fp - c2 * gp)


@lru_cache(maxsize=8)
def _anchors(cutoff, max_terms):
    n_side = int(math.ceil(cutoff / _ANCHOR_STEP))
    nodes = _ANCHOR_STEP * np.arange(-n_side, n_side + 1)
    zeta = (2.0 / 3.0) * cutoff**1.5
    # digits lost to growth of the terms, plus a margin
    digits = 30 + int(math.ceil(2.0 * zeta / math.log(10.0)))
    vals = np.empty_like(nodes)
    ders = np.empty_like(nodes)
    for i, x0 in enumerate(nodes):
        vals[i], ders[i] = _maclaurin_decimal(float(x0), digits, max_terms)
    return nodes, vals, ders


def airy_ai_series(x, cfg=DEFAULT_AIRY):
    """Ai(x) by the Maclaurin route (anchors plus local Taylor steps).

    Valid for any finite x in principle; the anchor lattice only covers
    ``|x| <= cfg.series_cutoff`` so points outside raise ``DomainError``.
    """
    arr = _as_array(x)
    if np.any(np.abs(arr) > cfg.series_cutoff + 0.5 * _ANCHOR_STEP):
        raise DomainError("series branch only covers |x| <= series_cutoff")
    nodes, vals, ders = _anchors(float(cfg.series_cutoff), int(cfg.max_terms))
    idx = np.clip(np.rint((arr - nodes[0]) / _ANCHOR_STEP).astype(int), 0, len(nodes) - 1)
    x0 = nodes[idx]
    h = arr - x0
    # y = sum a_n h^n with (n+2)(n+1) a_{n+2} = x0 a_n + a_{n-1}
    a_prev2 = np.zeros_like(arr)  # a_{n-1}
    a_prev = vals[idx]  # a_n (n = 0)
    a_cur = ders[idx]  # a_{n+1}
    total = a_prev + a_cur * h
    hn = h.copy()
    for n in range(0, cfg.max_terms):
        a_next = (x0 * a_prev + a_prev2) / ((n + 2) * (n + 1))
        hn = hn * h
        term = a_next * hn
        total = total + term
        if np.all(np.abs(term) <= 0.01 * cfg.tol * np.abs(total) + 1e-300):
            break
        a_prev2, a_prev, a_cur = a_prev, a_cur, a_next
    else:
        raise EvaluationError(f"Airy Taylor continuation did not converge in {cfg.max_terms} terms")
    return _wrap(total, x)


# -- asymptotic branch ---------------------------------------------------------


def _u_coefficients(max_terms):
    u = [1.0]
    for k in range(1, max_terms):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k))
    return np.array(u)


def airy_ai_asymptotic(x, cfg=DEFAULT_AIRY):
    """Ai(x) from the large-|x| expansions, optimally truncated.

    Accurate only for large |x|; at |x| = 5 the truncation error is still ~3e-8.
    """
    arr = _as_array(x)
    if np.any(arr == 0):
        raise DomainError("asymptotic branch is undefined at x = 0")
    u = _u_coefficients(cfg.max_terms)
    z = np.abs(arr)
    zeta = (2.0 / 3.0) * z**1.5
    out = np.empty_like(z)

    pos = arr > 0
    if np.any(pos):
        zp = zeta[pos]
        total = np.ones_like(zp)
        term_prev = np.ones_like(zp)
        active = np.ones(zp.shape, dtype=bool)
        for k in range(1, cfg.max_terms):
            term = (-1) ** k * u[k] / zp**k
            growing = np.abs(term) > np.abs(term_prev)
            active &= ~growing
            total = np.where(active, total + term, total)
            active &= np.abs(term) > 0.01 * cfg.tol * np.abs(total)
            term_prev = term
            if not active.any():
                break
        out[pos] = np.exp(-zp) / (2.0 * math.sqrt(math.pi) * z[pos] ** 0.25) * total

    neg = ~pos
    if np.any(neg):
        zn = zeta[neg]
        p_sum = np.ones_like(zn)  # even terms
        q_sum = u[1] / zn  # odd terms
        prev = np.abs(q_sum)
        active = np.ones(zn.shape, dtype=bool)
        for k in range(2, cfg.max_terms):
            term = u[k] / zn**k
            growing = term > prev
            active &= ~growing
            sign = (-1) ** (k // 2)
            if k % 2 == 0:
                p_sum = np.where(active, p_sum + sign * term, p_sum)
            else:
                q_sum = np.where(active, q_sum + sign * term, q_sum)
            active &= term > 0.01 * cfg.tol
            prev = term
            if not active.any():
                break
        phase = zn + 0.25 * math.pi
        out[neg] = (np.sin(phase) * p_sum - np.cos(phase) * q_sum) / (
            math.sqrt(math.pi) * z[neg] ** 0.25
        )
    return _wrap(out, x)


def airy_ai(x, cfg=DEFAULT_AIRY):
    """Airy function Ai(x) for real x (scalar or array)."""
    arr = _as_array(x)
    out = np.empty_like(arr)
    inside = np.abs(arr) <= cfg.series_cutoff
    if np.any(inside):
        out[inside] = airy_ai_series(arr[inside], cfg)
    if np.any(~inside):
        out[~inside] = airy_ai_asymptotic(arr[~inside], cfg)
    return _wrap(out, x)


# -- Hermite -------------------------------------------------------------------


def hermite(n, y):
    """Physicists' Hermite polynomial H_n(y) by ascending three-term recurrence."""
    order = n if isinstance(n, HermiteOrder) else HermiteOrder(int(n) if float(n).is_integer() else n)
    y_arr = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(y_arr)):
        raise DomainError("Hermite argument must be finite")
    h_prev = np.ones_like(y_arr)
    if order.n == 0:
        return _wrap(h_prev, y)
    h = 2.0 * y_arr
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, order.n):
            h_prev, h = h, 2.0 * y_arr * h - 2.0 * k * h_prev
            if not np.all(np.isfinite(h)):
                raise EvaluationError(f"Hermite recurrence overflowed at order {k + 1} (requested {order.n})")
    return _wrap(h, y)


# -- Gamma ---------------------------------------------------------------------

# Lanczos approximation, g = 7, 9 coefficients (relative error ~1e-15 for x > 0).
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _lanczos(x):
    # Gamma(x) for x >= 0.5
    z = x - 1.0
    acc = _LANCZOS[0]
    for i, c in enumerate(_LANCZOS[1:], start=1):
        acc = acc + c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * np.exp((z + 0.5) * np.log(t) - t) * acc


def gamma_fn(x):
    """Gamma function for positive real arguments."""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError("gamma_fn is defined here only for finite x > 0")
    if np.any(arr > 171.0):
        raise EvaluationError("gamma_fn overflows double precision for x > 171")
    small = arr < 0.5
    out = np.empty_like(arr)
    with np.errstate(over="ignore"):
        out[~small] = _lanczos(arr[~small])
        # reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        out[small] = math.pi / (np.sin(math.pi * arr[small]) * _lanczos(1.0 - arr[small]))
    return _wrap(out, x)
