"""Scenario configuration: TOML files, defaults and validation.

A config file is flat key = value pairs plus an optional ``[family]`` table of
polynomial coefficient lists (ascending powers of t):

    scenario = "vb-zero-family"
    seed = 42
    families = 20

    [family]
    a = [1.0]
    b = [0.0, 2.0]

Keys that a scenario does not use are rejected, so typos surface as errors.
"""

from dataclasses import dataclass, field
import math
import re
import sys

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError, UsageError

COMMON = {"hbar": 1.0, "mass": 1.0, "seed": 0}

DEFAULTS = {
    "airy-analytic": {
        "beta": 1.0, "t": 0.0, "x_min": -12.0, "x_max": 8.0, "dx": 0.01,
        # node-free window in units of the Airy argument
        "z_window": [-2.0, 4.0], "trajectory_t_max": 2.0, "trajectory_dt": 0.01, "x0": 0.0,
    },
    "airy-dynamic": {
        "beta": 1.0, "n": 4096, "box": 80.0, "dt": 1e-3, "t_max": 2.0,
        "record_dt": 0.05, "taper": 0.1, "tolerance": 0.01,
    },
    "ho-shell": {
        "n_max": 6, "omega": 1.0, "x_min": -8.0, "x_max": 8.0, "dx": 0.01,
        "window": [-6.0, 6.0], "tolerance": 1e-6, "min_vb": 0.1,
    },
    "plane-dispersion": {
        "k": 1.0, "omega": 0.75, "x_min": -5.0, "x_max": 5.0, "dx": 0.01,
        "t": 0.3, "dt": 1e-3, "tolerance": 1e-10,
    },
    "vb-zero-family": {
        "seed": 42, "families": 20, "x_min": -2.0, "x_max": 2.0, "dx": 0.01, "t": 0.5, "dt": 1e-3,
        "window": [-1.9, 1.9], "vb_tolerance": 1e-8, "continuity_tolerance": 1e-8,
        "qhj_tolerance": 1e-6, "force_tolerance": 1e-6,
    },
    "morse-check": {
        "D": 8.0, "alpha": 1.0, "x_min": -3.0, "x_max": 8.0, "dx": 0.01, "t": 0.3,
        "dt": 1e-3, "window": [-2.5, 7.5], "tolerance": 1e-6, "min_vb": 0.1,
    },
    "custom": {
        "solution": "ho:0", "x_min": -8.0, "x_max": 8.0, "dx": 0.01, "t": 0.3,
        "dt": 1e-3, "window": [-6.0, 6.0], "tolerance": 1e-6,
    },
}
SCENARIOS = tuple(DEFAULTS)

DESCRIPTIONS = {
    "airy-analytic": "closed-form Airy Bohm potential: uniform acceleration beta^3/2m^2",
    "airy-dynamic": "split-step evolution of an apodized Airy packet; fitted peak acceleration",
    "ho-shell": "oscillator eigenstates: V_B + V equals the level energy",
    "plane-dispersion": "plane wave QHJ residual equals hbar^2 k^2/2m - hbar omega",
    "vb-zero-family": "random polynomial families with vanishing Bohm potential",
    "morse-check": "Morse ground state: exact solution with non-vanishing V_B",
    "custom": "Madelung residuals of a named catalog solution",
}

FAMILY_KEYS = ("a", "b", "c", "mu")
_POSITIVE = {"hbar", "mass", "dx", "dt", "box", "t_max", "record_dt", "tolerance", "omega",
             "D", "alpha", "trajectory_dt", "trajectory_t_max", "vb_tolerance",
             "continuity_tolerance", "qhj_tolerance", "force_tolerance", "min_vb"}
_INTEGER = {"seed", "n", "n_max", "families"}


@dataclass
class Scenario:
    name: str
    config: dict = field(default_factory=dict)
    output_dir: str = "out"

    def __post_init__(self):
        if self.name not in DEFAULTS:
            raise UsageError(f"unknown scenario {self.name!r}; choose from {', '.join(SCENARIOS)}")

    def __getitem__(self, key):
        return self.config[key]


def _is_number(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _check_value(key, value, default):
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"{key} must be a string", field=key)
        return value
    if isinstance(default, list):
        if (not isinstance(value, list) or len(value) != len(default)
                or not all(_is_number(v) for v in value)):
            raise ConfigError(f"{key} must be a list of {len(default)} numbers", field=key)
        value = [float(v) for v in value]
        if value[0] >= value[1]:
            raise ConfigError(f"{key} must be increasing", field=key)
        return value
    if not _is_number(value) or not math.isfinite(value):
        raise ConfigError(f"{key} must be a finite number", field=key)
    if key in _INTEGER:
        if int(value) != value:
            raise ConfigError(f"{key} must be an integer", field=key)
        value = int(value)
        if key != "seed" and value < 0:
            raise ConfigError(f"{key} must be non-negative", field=key)
        return value
    value = float(value)
    if key in _POSITIVE and value <= 0:
        raise ConfigError(f"{key} must be positive, got {value}", field=key)
    if key == "beta" and value == 0:
        raise ConfigError("beta must be nonzero", field=key)
    return value


def _check_family(table):
    if not isinstance(table, dict):
        raise ConfigError("[family] must be a table", field="family")
    out = {}
    for key, value in table.items():
        if key not in FAMILY_KEYS:
            raise ConfigError(f"unknown family key {key!r}", field=f"family.{key}")
        if not isinstance(value, list) or not value or not all(_is_number(v) for v in value):
            raise ConfigError(f"family.{key} must be a non-empty list of numbers", field=f"family.{key}")
        out[key] = [float(v) for v in value]
    return out


def build_scenario(name, overrides=None, output_dir="out"):
    """Validate ``overrides`` against the scenario's defaults and fill in the rest."""
    if name not in DEFAULTS:
        raise UsageError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")
    defaults = {**COMMON, **DEFAULTS[name]}
    cfg = dict(defaults)
    for key, value in (overrides or {}).items():
        if key == "scenario":
            continue
        if key == "family":
            if name not in ("vb-zero-family",):
                raise ConfigError("[family] is only used by vb-zero-family", field="family")
            cfg["family"] = _check_family(value)
            continue
        if key not in defaults:
            raise ConfigError(f"unknown key {key!r} for scenario {name}", field=key)
        cfg[key] = _check_value(key, value, defaults[key])
    for lo, hi in (("x_min", "x_max"),):
        if lo in cfg and cfg[lo] >= cfg[hi]:
            raise ConfigError(f"{lo} must be below {hi}", field=lo)
    return Scenario(name, cfg, output_dir)


def _decode_line(err):
    line = getattr(err, "lineno", None)
    if line is None:
        m = re.search(r"line (\d+)", str(err))
        line = int(m.group(1)) if m else None
    return line


def parse_config_text(text):
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as err:
        line = _decode_line(err)
        raise ConfigError(f"parse error at line {line}: {err}", line=line) from None


def load_config(path, scenario=None, output_dir="out"):
    """Read a TOML config. ``scenario`` overrides (and must agree with) the file's own name."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        raise UsageError(f"cannot read config {path}: {err.strerror}") from None
    data = parse_config_text(text)
    named = data.get("scenario")
    if named is not None and not isinstance(named, str):
        raise ConfigError("scenario must be a string", field="scenario")
    if scenario and named and scenario != named:
        raise UsageError(f"config names scenario {named!r} but {scenario!r} was requested")
    name = scenario or named
    if not name:
        raise ConfigError("config does not name a scenario", field="scenario")
    return build_scenario(name, data, output_dir)
