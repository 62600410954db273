"""The eight acceptance criteria, each at its stated tolerance.

Every test records a one-line PASS/FAIL verdict; conftest prints them in the
terminal summary (and each line is also printed when the test runs).
"""

import time

import numpy as np
import pytest

from bohm_lab import catalog
from bohm_lab.bohm import bohm_force_and_acceleration, bohm_potential, continuity_residual, qhj_residual
from bohm_lab.bohm import qhj_residual_field
from bohm_lab.evolve import PropagatorConfig, apodize, evolve, fit_peak_acceleration, observables
from bohm_lab.family import external_potential_from_f, family_to_fields, force_from_f, random_family
from bohm_lab.field import ComplexField, Grid1D, PhysicalParams, derivative
from bohm_lab.specfun import airy_ai

RESULTS = {}
P = PhysicalParams()


def record(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


def test_criterion_1_airy_closed_form_acceleration():
    start = time.perf_counter()
    worst = 0.0
    for beta, m in ((1.0, 1.0), (2.0, 1.0), (1.0, 2.0)):
        p = PhysicalParams(mass=m)
        g = Grid1D.from_spacing(-10, 10, 0.01)
        for t in (0.0, 1.0, 2.0):
            vb = catalog.airy_bohm_closed_form(g, t, p, beta)
            _, acc = bohm_force_and_acceleration(vb, p)
            expected = beta**3 / (2 * m**2)
            worst = max(worst, np.max(np.abs(acc - expected)) / expected)
    elapsed = time.perf_counter() - start
    record(1, worst < 1e-9 and elapsed < 1.0,
           f"max relative error {worst:.2e} (< 1e-9), {elapsed:.2f} s (< 1 s)")


def test_criterion_2_airy_dynamical_acceleration():
    start = time.perf_counter()
    g = Grid1D(-40, 40, 4096, periodic=True)
    psi0 = ComplexField(g, apodize(airy_ai(g.x), g))
    series = evolve(psi0, PropagatorConfig(1e-3, 2000, record_every=50), P)
    fitted = fit_peak_acceleration(observables(series, P))
    elapsed = time.perf_counter() - start
    rel = abs(fitted - 0.5) / 0.5
    record(2, rel < 0.01 and elapsed < 30.0,
           f"fitted acceleration {fitted:.6f} vs 0.5, relative error {rel:.2e} (< 1e-2), {elapsed:.2f} s (< 30 s)")


# (name, solution, grid span, evaluation window, t)
CATALOG = [
    ("airy", catalog.AnalyticSolution("airy", P, {"beta": 1.0}), (-12, 8), (-10, 6), 1.0),
    ("gaussian", catalog.AnalyticSolution("gaussian", P, {"sigma": 2.0, "k0": 1.0}), (-20, 20), (-15, 15), 0.5),
    ("plane-wave", catalog.AnalyticSolution("plane-wave", P, {"k": 1.0, "omega": 0.5}), (-5, 5), None, 0.3),
    ("morse", catalog.AnalyticSolution("morse-ground", P, {"D": 8.0, "alpha": 1.0}), (-3, 8), (-2.5, 7.5), 0.3),
] + [(f"ho-{n}", catalog.AnalyticSolution("ho-eigenstate", P, {"n": n}), (-8, 8), (-6, 6), 0.3)
     for n in range(7)]

# Residuals that vanish identically for the discretization (constant S', static A, ...)
# sit at roundoff and cannot show a convergence rate; below this they count as converged.
ROUNDOFF_FLOOR = 1e-9


def _residuals(sol, span, window, t, dx, dt, accuracy=None):
    g = Grid1D.from_spacing(span[0], span[1], dx)
    slices, V = sol.slices(g, t, dt)
    kw = {} if accuracy is None else {"accuracy": accuracy}
    return (qhj_residual(slices, V, P, window, **kw).l_inf,
            continuity_residual(slices, P, window, **kw).l_inf)


def _shrinks(coarse, fine):
    if coarse < ROUNDOFF_FLOOR and fine < ROUNDOFF_FLOOR:
        return True
    return 3.5 <= coarse / fine <= 4.5


def test_criterion_3_madelung_equivalence():
    failures, worst, ratios = [], 0.0, []
    for name, sol, span, window, t in CATALOG:
        q, c = _residuals(sol, span, window, t, 0.01, 1e-3)
        worst = max(worst, q, c)
        if not (q < 1e-6 and c < 1e-6):
            failures.append(f"{name} residual q={q:.1e} c={c:.1e}")
        # rate measured with the second-order spatial stencil, so space and time share O(h^2)
        q1, c1 = _residuals(sol, span, window, t, 0.01, 1e-3, accuracy=2)
        q2, c2 = _residuals(sol, span, window, t, 0.005, 5e-4, accuracy=2)
        for label, a, b in (("qhj", q1, q2), ("continuity", c1, c2)):
            if not _shrinks(a, b):
                failures.append(f"{name} {label} ratio {a / b:.2f}")
            elif a >= ROUNDOFF_FLOOR:
                ratios.append(a / b)
    detail = (f"max residual {worst:.2e} (< 1e-6) over {len(CATALOG)} solutions; "
              f"refinement ratios {min(ratios):.2f}..{max(ratios):.2f}")
    record(3, not failures, detail if not failures else "; ".join(failures))


def test_criterion_4_ho_shell_identity():
    g = Grid1D.from_spacing(-8, 8, 0.01)
    worst, smallest = 0.0, np.inf
    inside = np.abs(g.x) <= 6
    for n in range(7):
        polar, V = catalog.ho_eigenstate(n, g, 0.0, P)
        vb = bohm_potential(polar, P)
        keep = inside & ~vb.mask
        worst = max(worst, np.max(np.abs(vb.values + 0.5 * g.x**2 - (n + 0.5))[keep]))
        smallest = min(smallest, np.nanmax(np.abs(vb.values)))
    record(4, worst < 1e-6 and smallest > 0.1,
           f"max |V_B + x^2/2 - (n+1/2)| = {worst:.2e} (< 1e-6), min over n of max|V_B| = {smallest:.2f} (> 0.1)")


def test_criterion_5_vanishing_family():
    start = time.perf_counter()
    rng = np.random.default_rng(42)
    g = Grid1D.from_spacing(-2, 2, 0.01)
    window = (-1.9, 1.9)
    inside = (g.x >= window[0]) & (g.x <= window[1])
    t, dt = 0.5, 1e-3
    worst = dict(vb=0.0, continuity=0.0, qhj=0.0, force=0.0)
    for _ in range(20):
        fam = random_family(rng)
        slices = [family_to_fields(fam, g, t + j * dt, P) for j in (-2, -1, 0, 1, 2)]
        V = external_potential_from_f(fam, g, t, P)
        F = force_from_f(fam, g, t, P)
        worst["vb"] = max(worst["vb"], np.nanmax(np.abs(bohm_potential(slices[2], P).values)))
        worst["continuity"] = max(worst["continuity"], continuity_residual(slices, P, window).l_inf)
        worst["qhj"] = max(worst["qhj"], qhj_residual(slices, V, P, window).l_inf)
        gap = np.abs(F + derivative(V, g, 1, accuracy=8))[inside]
        worst["force"] = max(worst["force"], gap.max())
    elapsed = time.perf_counter() - start
    ok = (worst["vb"] < 1e-8 and worst["continuity"] < 1e-8 and worst["qhj"] < 1e-6
          and worst["force"] < 1e-6 and elapsed < 10)
    record(5, ok, f"max|V_B| {worst['vb']:.1e} (< 1e-8), continuity {worst['continuity']:.1e} (< 1e-8), "
                  f"QHJ {worst['qhj']:.1e} (< 1e-6), |F+V'| {worst['force']:.1e} (< 1e-6), {elapsed:.2f} s (< 10 s)")


def test_criterion_6_dispersion_gap():
    g = Grid1D.from_spacing(-5, 5, 0.01)
    worst = 0.0
    for k, omega in ((1.0, 0.5), (1.0, 1.0), (2.0, 0.3), (0.5, 2.0), (1.5, 1.125)):
        sol = catalog.AnalyticSolution("plane-wave", P, {"k": k, "omega": omega})
        slices, V = sol.slices(g, 0.3, 1e-3)
        res, mask = qhj_residual_field(slices, V, P)
        gap = k**2 / 2 - omega
        worst = max(worst, np.max(np.abs(res[~mask] - gap)))
    record(6, worst < 1e-10, f"max |residual - (hbar^2 k^2/2m - hbar omega)| = {worst:.2e} (< 1e-10)")


def test_criterion_7_morse():
    g = Grid1D.from_spacing(-3, 8, 0.01)
    sol = catalog.AnalyticSolution("morse-ground", P, {"D": 8.0, "alpha": 1.0})
    slices, V = sol.slices(g, 0.3, 1e-3)
    q = qhj_residual(slices, V, P, (-2.5, 7.5)).l_inf
    vb = bohm_potential(slices[1], P)
    peak = np.nanmax(np.abs(vb.values[np.abs(g.x) <= 6]))
    record(7, q < 1e-6 and peak > 0.1, f"QHJ residual {q:.2e} (< 1e-6), max|V_B| {peak:.2f} (> 0.1)")


def test_criterion_8_propagator_hygiene():
    g = Grid1D(-16, 16, 512, periodic=True)
    V = 0.5 * g.x**2
    gs = ComplexField(g, np.pi**-0.25 * np.exp(-g.x**2 / 2))
    series = evolve(gs, PropagatorConfig(1e-3, 10_000, potential=V, record_every=1), P)
    norms = np.array([np.sqrt(np.sum(np.abs(s.values) ** 2) * g.dx) for s in series])
    norm_step = np.max(np.abs(np.diff(norms)) / norms[:-1])
    obs = observables(series[::100], P, potential=V)
    energies = np.array([o.energy for o in obs])
    e_drift = np.max(np.abs(energies - energies[0])) / abs(energies[0])

    def coherent(x, t, x0=2.0):
        return np.pi**-0.25 * np.exp(-(x - x0 * np.cos(t)) ** 2 / 2 - 1j * x * x0 * np.sin(t)
                                     + 1j * x0**2 * np.sin(2 * t) / 4 - 0.5j * t)

    errs = []
    for dt in (0.02, 0.01):
        n = int(round(1.0 / dt))
        out = evolve(ComplexField(g, coherent(g.x, 0.0)), PropagatorConfig(dt, n, potential=V, record_every=n), P)
        errs.append(np.max(np.abs(out[-1].values - coherent(g.x, 1.0))))
    ratio = errs[0] / errs[1]
    ok = norm_step < 1e-13 and e_drift < 1e-8 and 3.5 <= ratio <= 4.5
    record(8, ok, f"norm drift/step {norm_step:.1e} (< 1e-13), energy drift {e_drift:.1e} (< 1e-8), "
                  f"dt ratio {ratio:.3f} (in [3.5, 4.5])")
