import json

import pytest

from bohm_lab.cli import EXIT_FAIL, EXIT_PASS, EXIT_USAGE, main
from bohm_lab.config import DEFAULTS, SCENARIOS, build_scenario, load_config, parse_config_text
from bohm_lab.errors import ConfigError, UsageError


def _write(tmp_path, text, name="c.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def _report(out):
    return json.loads((out / "report.json").read_text())


def test_minimal_config_gets_defaults(tmp_path):
    sc = load_config(_write(tmp_path, 'scenario = "ho-shell"\n'))
    assert sc.name == "ho-shell"
    assert sc["hbar"] == 1.0 and sc["mass"] == 1.0
    assert sc["n_max"] == DEFAULTS["ho-shell"]["n_max"]


def test_bad_values_name_the_field(tmp_path):
    with pytest.raises(ConfigError) as info:
        load_config(_write(tmp_path, 'scenario = "ho-shell"\nmass = -1.0\n'))
    assert info.value.field == "mass"
    with pytest.raises(ConfigError) as info:
        load_config(_write(tmp_path, 'scenario = "ho-shell"\nmas = 1.0\n'))
    assert info.value.field == "mas"
    with pytest.raises(ConfigError) as info:
        build_scenario("airy-analytic", {"beta": 0.0})
    assert info.value.field == "beta"
    with pytest.raises(ConfigError):
        build_scenario("ho-shell", {"window": [3.0, -3.0]})
    with pytest.raises(ConfigError):
        build_scenario("ho-shell", {"n_max": 2.5})
    with pytest.raises(ConfigError):
        build_scenario("ho-shell", {"family": {"a": [1.0]}})
    with pytest.raises(ConfigError) as info:
        build_scenario("vb-zero-family", {"family": {"q": [1.0]}})
    assert info.value.field == "family.q"


def test_parse_error_reports_line():
    with pytest.raises(ConfigError) as info:
        parse_config_text('scenario = "ho-shell"\n\nmass = = 1\n')
    assert info.value.line == 3


def test_scenario_name_conflicts(tmp_path):
    path = _write(tmp_path, 'scenario = "ho-shell"\n')
    with pytest.raises(UsageError):
        load_config(path, scenario="morse-check")
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, "mass = 1.0\n", "noname.toml"))
    with pytest.raises(UsageError):
        build_scenario("nonsense")
    with pytest.raises(UsageError):
        load_config(str(tmp_path / "missing.toml"))


def test_family_table(tmp_path):
    text = 'scenario = "vb-zero-family"\nfamilies = 2\n[family]\na = [1.0]\nb = [3.0, 2.0]\n'
    sc = load_config(_write(tmp_path, text))
    assert sc["family"] == {"a": [1.0], "b": [3.0, 2.0]}
    assert sc["seed"] == 42


def test_list(capsys):
    assert main(["list"]) == EXIT_PASS
    out = capsys.readouterr().out
    for name in SCENARIOS:
        assert name in out


def test_unknown_scenario_is_usage_error(tmp_path, capsys):
    assert main(["run", "bogus", "--out", str(tmp_path)]) == EXIT_USAGE
    assert "bogus" in capsys.readouterr().err


def test_validate(tmp_path, capsys):
    assert main(["validate", _write(tmp_path, 'scenario = "morse-check"\nD = 6.0\n')]) == EXIT_PASS
    assert main(["validate", _write(tmp_path, 'scenario = "morse-check"\nD = -6.0\n', "b.toml")]) == EXIT_USAGE
    assert "field D" in capsys.readouterr().err


def test_airy_analytic_report(tmp_path):
    out = tmp_path / "airy"
    assert main(["run", "airy-analytic", "--out", str(out)]) == EXIT_PASS
    rep = _report(out)
    assert rep["passed"] is True
    assert abs(rep["results"]["fitted_acceleration"] - 0.5) < 1e-9
    assert rep["results"]["vb_linf"] < 1e-4
    assert (out / "summary.txt").read_text().startswith("scenario: airy-analytic")
    assert (out / "airy_field.csv").read_text().startswith("x,A,S")


def test_beta_override_propagates(tmp_path):
    cfg = _write(tmp_path, 'scenario = "airy-analytic"\nbeta = 2.0\n')
    out = tmp_path / "b2"
    assert main(["run", "airy-analytic", "--config", cfg, "--out", str(out)]) == EXIT_PASS
    res = _report(out)["results"]
    assert res["expected_acceleration"] == 4.0
    assert res["fitted_acceleration"] == pytest.approx(4.0, rel=1e-9)


def test_plane_dispersion_gap(tmp_path):
    cfg = _write(tmp_path, 'scenario = "plane-dispersion"\nk = 2.0\nomega = 1.5\n')
    out = tmp_path / "pd"
    assert main(["run", "plane-dispersion", "--config", cfg, "--out", str(out)]) == EXIT_PASS
    res = _report(out)["results"]
    assert res["expected_gap"] == pytest.approx(2.0 - 1.5)
    assert res["measured_gap"] == pytest.approx(0.5, abs=1e-10)


def test_vb_zero_family_all_vanishing(tmp_path):
    out = tmp_path / "fam"
    assert main(["run", "vb-zero-family", "--out", str(out), "--seed", "42"]) == EXIT_PASS
    res = _report(out)["results"]
    assert res["vanishing"] == "20/20"
    assert all(r["verdict"] == "vanishing" for r in res["families"])


def test_failed_check_exits_one(tmp_path, capsys):
    cfg = _write(tmp_path, 'scenario = "ho-shell"\ntolerance = 1e-300\n')
    out = tmp_path / "fail"
    assert main(["run", "ho-shell", "--config", cfg, "--out", str(out)]) == EXIT_FAIL
    assert "shell_identity_n0" in capsys.readouterr().err
    assert _report(out)["passed"] is False


def test_report_is_deterministic(tmp_path):
    texts = []
    for name in ("a", "b"):
        main(["run", "vb-zero-family", "--out", str(tmp_path / name)])
        lines = (tmp_path / name / "report.json").read_text().splitlines()
        stamped = [ln for ln in lines if '"timestamp"' in ln]
        assert len(stamped) == 1
        texts.append([ln for ln in lines if '"timestamp"' not in ln])
    assert texts[0] == texts[1]


def test_seed_changes_families(tmp_path):
    main(["run", "vb-zero-family", "--out", str(tmp_path / "s1"), "--seed", "1"])
    main(["run", "vb-zero-family", "--out", str(tmp_path / "s2"), "--seed", "2"])
    f1 = _report(tmp_path / "s1")["results"]["families"][0]["family"]
    f2 = _report(tmp_path / "s2")["results"]["families"][0]["family"]
    assert f1 != f2


@pytest.mark.parametrize("solution", ["ho:2", "airy", "plane:1,0.5", "gauss:2,1", "morse:8,1"])
def test_custom_solutions(tmp_path, solution):
    lo, hi, win = (-20.0, 20.0, [-15.0, 15.0]) if solution.startswith("gauss") else (-12.0, 8.0, [-10.0, 6.0])
    text = (f'scenario = "custom"\nsolution = "{solution}"\nx_min = {lo}\nx_max = {hi}\n'
            f"window = [{win[0]}, {win[1]}]\n")
    out = tmp_path / "custom"
    assert main(["run", "custom", "--config", _write(tmp_path, text), "--out", str(out)]) == EXIT_PASS


def test_verbosity_env(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("BOHM_LAB_VERBOSITY", "0")
    assert main(["run", "morse-check", "--out", str(tmp_path)]) == EXIT_PASS
    assert capsys.readouterr().out == ""
