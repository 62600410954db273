"""Draw random vanishing-Bohm-potential families and tabulate their residuals.

    python scripts/family_survey.py [--seed 42] [--count 10]
"""

import argparse

import numpy as np

from bohm_lab.bohm import continuity_residual, qhj_residual
from bohm_lab.family import external_potential_from_f, family_to_fields, random_family, vb_zero_check
from bohm_lab.field import Grid1D, PhysicalParams


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--count", type=int, default=10)
    ap.add_argument("--t", type=float, default=0.5)
    args = ap.parse_args()

    p = PhysicalParams()
    g = Grid1D.from_spacing(-2, 2, 0.01)
    rng = np.random.default_rng(args.seed)
    dt, window = 1e-3, (-1.9, 1.9)
    print(f"{'#':>3s} {'node(t)':>9s} {'max|V_B|':>10s} {'continuity':>11s} {'qhj':>10s}  verdict")
    for i in range(args.count):
        fam = random_family(rng)
        slices = [family_to_fields(fam, g, args.t + j * dt, p) for j in (-2, -1, 0, 1, 2)]
        V = external_potential_from_f(fam, g, args.t, p)
        verdict = vb_zero_check(fam, g, args.t, p, tol=1e-8)
        cont = continuity_residual(slices, p, window).l_inf
        qhj = qhj_residual(slices, V, p, window).l_inf
        print(f"{i:3d} {fam.node(args.t):9.3f} {verdict.max_abs_vb:10.2e} {cont:11.2e} {qhj:10.2e}  {verdict.label}")


if __name__ == "__main__":
    main()
