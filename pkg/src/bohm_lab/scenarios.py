"""Named experiments. Each returns checks, numeric results and field files to write."""

from dataclasses import dataclass, field
import datetime
import json
import logging
import os
import time

import numpy as np

from . import bohm, catalog, evolve, family
from .field import ComplexField, Grid1D, PhysicalParams, derivative, write_field_csv
from .specfun import airy_ai

log = logging.getLogger("bohm_lab")


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    limit: float
    relation: str = "<"  # value < limit, or value > limit

    @property
    def passed(self):
        ok = self.value < self.limit if self.relation == "<" else self.value > self.limit
        return bool(ok) and np.isfinite(self.value)

    def to_dict(self):
        return {"name": self.name, "value": self.value, "limit": self.limit,
                "relation": self.relation, "passed": self.passed}

    def line(self):
        mark = "PASS" if self.passed else "FAIL"
        return f"{mark}  {self.name}: {self.value:.6g} {self.relation} {self.limit:.6g}"


@dataclass
class Outcome:
    checks: list = field(default_factory=list)
    results: dict = field(default_factory=dict)
    writers: dict = field(default_factory=dict)  # file name -> callable(path)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def check(self, name, value, limit, relation="<"):
        c = Check(name, float(value), float(limit), relation)
        self.checks.append(c)
        log.info(c.line())
        return c


def _params(cfg, **extras):
    return PhysicalParams(hbar=cfg["hbar"], mass=cfg["mass"], extras=extras)


def _grid(cfg):
    return Grid1D.from_spacing(cfg["x_min"], cfg["x_max"], cfg["dx"])


def _polar_writer(polar):
    return lambda path: write_field_csv(path, polar)


def run_airy_analytic(cfg):
    out = Outcome()
    beta, t = cfg["beta"], cfg["t"]
    params = _params(cfg)
    m, hbar = params.mass, params.hbar
    expected = catalog.airy_acceleration(params, beta)
    grid = _grid(cfg)

    closed = catalog.airy_bohm_closed_form(grid, t, params, beta)
    _, accel = bohm.bohm_force_and_acceleration(closed, params)
    fitted = float(np.mean(accel))
    out.check("closed_form_acceleration_rel_error", abs(fitted - expected) / abs(expected), 1e-9)
    out.check("closed_form_acceleration_spread", np.ptp(accel) / abs(expected), 1e-9)

    polar, _ = catalog.airy_solution(grid, t, params, beta)
    numeric = bohm.bohm_potential(polar, params)
    scale = hbar ** (2.0 / 3.0) / beta
    shift = beta**3 * t**2 / (4 * m**2)
    z_lo, z_hi = sorted(shift + z * scale for z in cfg["z_window"])
    report = bohm.summarize(numeric.values - closed.values, numeric.mask, grid, t, (z_lo, z_hi))
    out.check("numeric_vs_closed_form_vb_linf", report.l_inf, 1e-4)

    # Bohmian trajectory through the analytic phase, labelled apart from peak tracking
    times = np.arange(0.0, cfg["trajectory_t_max"] + 0.5 * cfg["trajectory_dt"], cfg["trajectory_dt"])
    series = [catalog.airy_solution(grid, tt, params, beta)[0] for tt in times]
    traj = bohm.integrate_trajectory(series, cfg["x0"], params)
    traj_acc = float(bohm.fit_acceleration(traj.times, traj.positions))
    out.check("trajectory_acceleration_rel_error", abs(traj_acc - expected) / abs(expected), 1e-6)

    out.results.update({
        "expected_acceleration": expected,
        "fitted_acceleration": fitted,
        "trajectory_acceleration": traj_acc,
        "trajectory_truncated": traj.truncated,
        "vb_window": [z_lo, z_hi],
        "vb_linf": report.l_inf,
    })
    out.writers["airy_field.csv"] = _polar_writer(polar)

    def write_vb(path):
        np.savetxt(path, np.column_stack([grid.x, numeric.values, closed.values]),
                   delimiter=",", header="x,vb_numeric,vb_closed_form", comments="", fmt="%.17g")
    out.writers["airy_vb.csv"] = write_vb
    return out


def run_airy_dynamic(cfg):
    out = Outcome()
    beta = cfg["beta"]
    params = _params(cfg)
    expected = catalog.airy_acceleration(params, beta)
    half = 0.5 * cfg["box"]
    grid = Grid1D(-half, half, int(cfg["n"]), periodic=True)
    z = beta / params.hbar ** (2.0 / 3.0) * grid.x
    psi0 = ComplexField(grid, evolve.apodize(airy_ai(z), grid, cfg["taper"]), 0.0)
    steps = int(round(cfg["t_max"] / cfg["dt"]))
    stride = max(1, int(round(cfg["record_dt"] / cfg["dt"])))
    series = evolve.evolve(psi0, evolve.PropagatorConfig(cfg["dt"], steps, record_every=stride), params)
    obs = evolve.observables(series, params)
    fitted = evolve.fit_peak_acceleration(obs)
    out.check("peak_acceleration_rel_error", abs(fitted - expected) / abs(expected), cfg["tolerance"])
    drift = max(abs(o.norm - obs[0].norm) for o in obs) / obs[0].norm
    out.check("norm_drift_per_step", drift / steps, 1e-13)
    out.results.update({"expected_acceleration": expected, "fitted_acceleration": fitted,
                        "x_peak_initial": obs[0].x_peak, "x_peak_final": obs[-1].x_peak})
    out.writers["observables.json"] = lambda path: evolve.write_observables_json(path, obs)
    keep = series[:: max(1, len(series) // 4)]
    if keep[-1] is not series[-1]:
        keep = keep + [series[-1]]
    out.writers["snapshots.csv"] = lambda path: evolve.write_series_csv(path, keep)
    return out


def run_ho_shell(cfg):
    out = Outcome()
    omega = cfg["omega"]
    params = _params(cfg)
    grid = _grid(cfg)
    levels = {}
    for n in range(int(cfg["n_max"]) + 1):
        polar, V = catalog.ho_eigenstate(n, grid, 0.0, params, omega)
        vb = bohm.bohm_potential(polar, params)
        energy = catalog.ho_energy(n, params, omega)
        shell = bohm.summarize(vb.values + V - energy, vb.mask, grid, 0.0, cfg["window"])
        peak = float(np.nanmax(np.abs(vb.values)))
        out.check(f"shell_identity_n{n}", shell.l_inf, cfg["tolerance"])
        out.check(f"max_abs_vb_n{n}", peak, cfg["min_vb"], ">")
        levels[str(n)] = {"energy": energy, "shell_linf": shell.l_inf, "max_abs_vb": peak,
                          "masked_fraction": shell.masked_fraction}
        out.writers[f"ho_n{n}.csv"] = _polar_writer(polar)
    out.results["levels"] = levels
    return out


def run_plane_dispersion(cfg):
    out = Outcome()
    k, omega = cfg["k"], cfg["omega"]
    params = _params(cfg)
    hbar, m = params.hbar, params.mass
    grid = _grid(cfg)
    expected = hbar**2 * k**2 / (2 * m) - hbar * omega
    sol = catalog.AnalyticSolution("plane-wave", params, {"k": k, "omega": omega})
    slices, V = sol.slices(grid, cfg["t"], cfg["dt"])
    res, mask = bohm.qhj_residual_field(slices, V, params)
    vals = res[~mask]
    gap = float(np.mean(vals))
    out.check("gap_matches_dispersion", abs(gap - expected), cfg["tolerance"])
    out.check("gap_uniformity", float(np.max(np.abs(vals - gap))), cfg["tolerance"])
    on_shell = catalog.AnalyticSolution("plane-wave", params, {"k": k, "omega": hbar * k**2 / (2 * m)})
    s2, V2 = on_shell.slices(grid, cfg["t"], cfg["dt"])
    zero = bohm.qhj_residual(s2, V2, params)
    out.check("on_shell_residual", zero.l_inf, cfg["tolerance"])
    out.results.update({"expected_gap": expected, "measured_gap": gap, "on_shell_linf": zero.l_inf})
    out.writers["plane_field.csv"] = _polar_writer(slices[1])
    return out


def run_vb_zero_family(cfg):
    out = Outcome()
    params = _params(cfg)
    grid = _grid(cfg)
    t, dt, window = cfg["t"], cfg["dt"], cfg["window"]
    rng = np.random.default_rng(cfg["seed"])
    fams = []
    if "family" in cfg:
        fams.append(family.FFamily.from_lists(**cfg["family"]))
    fams += [family.random_family(rng, span=max(abs(cfg["x_min"]), abs(cfg["x_max"])))
             for _ in range(int(cfg["families"]))]
    rows = []
    worst = {"vb": 0.0, "continuity": 0.0, "qhj": 0.0, "force": 0.0}
    vanishing = 0
    for fam in fams:
        slices = [family.family_to_fields(fam, grid, t + j * dt, params) for j in (-2, -1, 0, 1, 2)]
        V = family.external_potential_from_f(fam, grid, t, params)
        F = family.force_from_f(fam, grid, t, params)
        verdict = family.vb_zero_check(fam, grid, t, params, tol=cfg["vb_tolerance"])
        cont = bohm.continuity_residual(slices, params, window)
        qhj = bohm.qhj_residual(slices, V, params, window)
        dV = derivative(V, grid, 1, accuracy=bohm.DEFAULT_ACCURACY)
        inside = (grid.x >= window[0]) & (grid.x <= window[1])
        gap = float(np.max(np.abs(F + dV)[inside]))
        vanishing += verdict.vanishing
        row = {"family": fam.to_dict(), "verdict": verdict.label, "max_abs_vb": verdict.max_abs_vb,
               "continuity_linf": cont.l_inf, "qhj_linf": qhj.l_inf, "force_gap": gap}
        rows.append(row)
        for key, v in (("vb", verdict.max_abs_vb), ("continuity", cont.l_inf),
                       ("qhj", qhj.l_inf), ("force", gap)):
            worst[key] = max(worst[key], v)
    out.check("vanishing_verdicts_missing", len(fams) - vanishing, 0.5)
    out.check("max_abs_vb", worst["vb"], cfg["vb_tolerance"])
    out.check("continuity_linf", worst["continuity"], cfg["continuity_tolerance"])
    out.check("qhj_linf", worst["qhj"], cfg["qhj_tolerance"])
    out.check("force_gap_linf", worst["force"], cfg["force_tolerance"])
    out.results.update({"vanishing": f"{vanishing}/{len(fams)}", "families": rows})
    return out


def run_morse_check(cfg):
    out = Outcome()
    params = _params(cfg)
    grid = _grid(cfg)
    sol = catalog.AnalyticSolution("morse-ground", params, {"D": cfg["D"], "alpha": cfg["alpha"]})
    slices, V = sol.slices(grid, cfg["t"], cfg["dt"])
    qhj = bohm.qhj_residual(slices, V, params, cfg["window"])
    cont = bohm.continuity_residual(slices, params, cfg["window"])
    vb = bohm.bohm_potential(slices[1], params)
    peak = float(np.nanmax(np.abs(vb.values)))
    out.check("qhj_linf", qhj.l_inf, cfg["tolerance"])
    out.check("continuity_linf", cont.l_inf, cfg["tolerance"])
    out.check("max_abs_vb", peak, cfg["min_vb"], ">")
    out.results.update({"energy": catalog.morse_ground_energy(params, cfg["D"], cfg["alpha"]),
                        "lambda": catalog.morse_lambda(params, cfg["D"], cfg["alpha"]),
                        "qhj": qhj.to_dict(), "continuity": cont.to_dict(), "max_abs_vb": peak})
    out.writers["morse_field.csv"] = _polar_writer(slices[1])
    return out


def run_custom(cfg):
    out = Outcome()
    params = _params(cfg)
    grid = _grid(cfg)
    sol = catalog.solution_from_name(cfg["solution"], params)
    slices, V = sol.slices(grid, cfg["t"], cfg["dt"])
    qhj = bohm.qhj_residual(slices, V, params, cfg["window"])
    cont = bohm.continuity_residual(slices, params, cfg["window"])
    out.check("qhj_linf", qhj.l_inf, cfg["tolerance"])
    out.check("continuity_linf", cont.l_inf, cfg["tolerance"])
    out.results.update({"solution": cfg["solution"], "kind": sol.kind,
                        "qhj": qhj.to_dict(), "continuity": cont.to_dict()})
    out.writers["field.csv"] = _polar_writer(slices[1])
    return out


RUNNERS = {
    "airy-analytic": run_airy_analytic,
    "airy-dynamic": run_airy_dynamic,
    "ho-shell": run_ho_shell,
    "plane-dispersion": run_plane_dispersion,
    "vb-zero-family": run_vb_zero_family,
    "morse-check": run_morse_check,
    "custom": run_custom,
}


def report_text(scenario, outcome, elapsed=None):
    """report.json contents; the timestamp is the only run-dependent line."""
    payload = {
        "scenario": scenario.name,
        "config": scenario.config,
        "checks": [c.to_dict() for c in outcome.checks],
        "results": outcome.results,
        "passed": outcome.passed,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
    }
    return json.dumps(_plain(payload), indent=2, sort_keys=True) + "\n"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def run_scenario(scenario):
    """Run, write report.json, summary.txt and field files; returns the Outcome."""
    start = time.perf_counter()
    outcome = RUNNERS[scenario.name](scenario.config)
    elapsed = time.perf_counter() - start
    os.makedirs(scenario.output_dir, exist_ok=True)
    for name, writer in outcome.writers.items():
        writer(os.path.join(scenario.output_dir, name))
    with open(os.path.join(scenario.output_dir, "report.json"), "w") as fh:
        fh.write(report_text(scenario, outcome))
    lines = [f"scenario: {scenario.name}", f"status: {'PASS' if outcome.passed else 'FAIL'}",
             f"runtime_s: {elapsed:.2f}"] + [c.line() for c in outcome.checks]
    with open(os.path.join(scenario.output_dir, "summary.txt"), "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return outcome
