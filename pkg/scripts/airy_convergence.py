"""Convergence of the numerical Airy Bohm potential and the Madelung residuals.

Halves dx (and dt) repeatedly and prints the L-inf errors with the ratio between
successive rows; a ratio near 4 is second order. With --accuracy 8 the V_B error
sits at the roundoff floor (which grows like eps/dx^2) and the residuals are
limited by the O(dt^2) time derivative, so only those keep the ratio of 4.

    python scripts/airy_convergence.py [--accuracy 2] [--levels 4]
"""

import argparse

import numpy as np

from bohm_lab import catalog
from bohm_lab.bohm import bohm_potential, continuity_residual, qhj_residual
from bohm_lab.field import Grid1D, PhysicalParams

T = 1.0  # at t = 0 the phase is flat and the continuity residual is trivially zero


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--accuracy", type=int, default=2, choices=(2, 4, 6, 8))
    ap.add_argument("--levels", type=int, default=4)
    ap.add_argument("--beta", type=float, default=1.0)
    args = ap.parse_args()

    p = PhysicalParams()
    sol = catalog.AnalyticSolution("airy", p, {"beta": args.beta})
    shift = args.beta**3 * T**2 / 4  # the profile drifts with the accelerating frame
    window = (shift - 2.0 / args.beta, shift + 4.0 / args.beta)  # node-free, where V_B is smooth
    print(f"{'dx':>8s} {'|V_B err|':>11s} {'ratio':>6s} {'qhj':>11s} {'ratio':>6s} {'cont':>11s} {'ratio':>6s}")
    prev = None
    dx, dt = 0.02, 2e-3
    for _ in range(args.levels):
        g = Grid1D.from_spacing(-12, 8, dx)
        slices, V = sol.slices(g, T, dt)
        vb = bohm_potential(slices[1], p, accuracy=args.accuracy)
        exact = catalog.airy_bohm_closed_form(g, T, p, args.beta)
        inside = (g.x >= window[0]) & (g.x <= window[1]) & ~vb.mask
        row = (np.max(np.abs(vb.values - exact.values)[inside]),
               qhj_residual(slices, V, p, window, accuracy=args.accuracy).l_inf,
               continuity_residual(slices, p, window, accuracy=args.accuracy).l_inf)
        ratios = ["" if prev is None or b == 0 else f"{a / b:6.2f}" for a, b in zip(prev or row, row)]
        print(f"{dx:8.4f} " + " ".join(f"{v:11.3e} {r:>6s}" for v, r in zip(row, ratios)))
        prev, dx, dt = row, dx / 2, dt / 2


if __name__ == "__main__":
    main()
