import json
import subprocess
import sys

import pytest

from stieltjes_pop.cli import ConfigError, config_schema, load_config, main, parse_config, run_scenario

RATES = {
    "beta": {"profile": {"constant": 2.0}, "modulation": None},
    "mu": {"profile": {"constant": 1.0},
           "modulation": {"response": "linear_up", "c": 1.0, "kernel": {"kind": "total"}}},
    "growth": {"profile": {"constant": 1.0}, "modulation": None},
}


def _write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return p


def _errors(capsys):
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


def test_print_schema(capsys):
    assert main(["print-schema"]) == 0
    schema = json.loads(capsys.readouterr().out)
    assert schema == config_schema()
    assert main(["--print-schema"]) == 0


def test_integrate_run(tmp_path):
    doc = {"schema": 1, "kind": "integrate",
           "h": {"grid": [0, 1], "values": [0, 1]}, "g": {"grid": [0, 1], "values": [1, 0]}}
    out = tmp_path / "out"
    assert main(["run", str(_write(tmp_path, doc)), "--out", str(out)]) == 0
    lines = (out / "integral.csv").read_text().splitlines()
    assert lines == ["value,truncation_point,est_tail_error", "0.5,,0"]
    summary = json.loads((out / "summary.json").read_text())
    assert summary["cfg"] == {"panel_points": 512, "tail_tol": 1e-10, "max_domain": 1e6}
    assert summary["solver"]["tol_R"] == 1e-6


def test_function_record_from_file(tmp_path):
    (tmp_path / "g.json").write_text(json.dumps(
        {"grid": [0, 1e-9], "values": [1, 0.999999999], "tail": {"kind": "exponential_decay", "rate": 1.0}}))
    doc = {"schema": 1, "kind": "integrate", "h": {"grid": [0, 1], "values": [1, 1],
                                                  "tail": {"kind": "limit_value", "limit": 1}},
           "g": {"file": "g.json"}}
    out = tmp_path / "out"
    assert main(["integrate", str(_write(tmp_path, doc)), "--out", str(out)]) == 0
    value = float((out / "integral.csv").read_text().splitlines()[1].split(",")[0])
    assert abs(value - 1.0) < 1e-9


def test_missing_referenced_file(tmp_path, capsys):
    doc = {"schema": 1, "kind": "integrate", "h": {"file": "nope.json"},
           "g": {"grid": [0, 1], "values": [1, 0]}}
    assert main(["run", str(_write(tmp_path, doc))]) == 2
    err = _errors(capsys)
    assert err["errors"][0]["path"] == "h.file"


def test_all_config_errors_reported(tmp_path, capsys):
    rates = json.loads(json.dumps(RATES))
    rates["betta"] = rates.pop("beta")
    rates["growth"]["profile"] = {"grid": [0, 1], "values": [1]}
    doc = {"schema": 1, "kind": "threshold", "cfg": {"tail_tol": -1}, "rates": rates}
    assert main(["run", str(_write(tmp_path, doc))]) == 2
    errs = {(e["path"], e["message"]) for e in _errors(capsys)["errors"]}
    paths = {p for p, _ in errs}
    assert {"cfg.tail_tol", "rates.betta", "rates.growth.profile.values"} <= paths
    assert ("rates.betta", "unknown key 'betta'; did you mean 'beta'?") in errs


def test_parse_error_has_position(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"schema": 1,\n  "kind": }')
    assert main(["run", str(p)]) == 2
    msg = _errors(capsys)["errors"][0]["message"]
    assert "line 2" in msg and "column" in msg


def test_semantic_error_in_function(tmp_path):
    doc = {"schema": 1, "kind": "integrate", "h": {"grid": [1, 0], "values": [0, 1]},
           "g": {"grid": [0, 1], "values": [1, 0]}}
    with pytest.raises(ConfigError) as exc:
        parse_config(doc)
    assert exc.value.errors[0]["path"] == "h"


def test_kind_mismatch(tmp_path, capsys):
    doc = {"schema": 1, "kind": "threshold", "rates": RATES}
    assert main(["equilibrium", str(_write(tmp_path, doc))]) == 2


def test_wrong_schema_version(tmp_path):
    with pytest.raises(ConfigError):
        parse_config({"schema": 2, "kind": "threshold", "rates": RATES})


def test_equilibrium_outputs(tmp_path):
    doc = {"schema": 1, "kind": "equilibrium", "rates": RATES, "bracket": [0, 100]}
    out = tmp_path / "eq"
    assert run_scenario(parse_config(doc), out) == 0
    rows = (out / "equilibrium.csv").read_text().splitlines()
    assert rows[0] == "x,u,Pi" and 2 < len(rows) <= 4002
    x0, u0, pi0 = map(float, rows[1].split(","))
    assert x0 == 0.0 and abs(u0 - 2.0) < 1e-4 and pi0 == 1.0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["result"]["status"] == "converged"


def test_threshold_and_reproduction(tmp_path):
    low = json.loads(json.dumps(RATES))
    low["beta"]["profile"]["constant"] = 0.5
    out = tmp_path / "t"
    assert run_scenario(parse_config({"schema": 1, "kind": "threshold", "rates": low}), out) == 0
    assert (out / "threshold.csv").read_text().splitlines()[1].endswith(",excluded,true")
    out = tmp_path / "r"
    doc = {"schema": 1, "kind": "reproduction", "rates": RATES, "density": "zero"}
    assert run_scenario(parse_config(doc), out) == 0
    R = json.loads((out / "summary.json").read_text())["result"]["R"]
    assert abs(R - 2.0) < 1e-6


def test_hm_and_ibp(tmp_path):
    h = {"grid": [0, 1, 2], "values": [0.5, 1, 1.5], "tail": {"kind": "limit_value", "limit": 1.5}}
    g = {"grid": [0, 0.001], "values": [1, 0.9990004998333750],
         "tail": {"kind": "exponential_decay", "rate": 1.0}}
    out = tmp_path / "hm"
    assert run_scenario(parse_config({"schema": 1, "kind": "hm_check", "h": h, "g": g,
                                      "p": [0.5, 1, 2]}), out) == 0
    assert len((out / "hm.csv").read_text().splitlines()) == 4
    out = tmp_path / "ibp"
    assert run_scenario(parse_config({"schema": 1, "kind": "ibp_check", "h": h, "g": g}), out) == 0


def test_prop_suite_and_corrupt_hook(tmp_path):
    doc = {"schema": 1, "kind": "prop_suite", "seed": 3, "n_instances": 4}
    assert run_scenario(parse_config(doc), tmp_path / "ok") == 0
    header = (tmp_path / "ok" / "suite.csv").read_text().splitlines()[0]
    assert header == "instance_id,property,margin,pass,asserted"
    doc["debug_corrupt_integrator"] = True
    assert run_scenario(parse_config(doc), tmp_path / "bad") == 1


def test_r_monotone_suite(tmp_path):
    doc = {"schema": 1, "kind": "r_monotone_suite", "seed": 2, "n_instances": 5}
    assert run_scenario(parse_config(doc), tmp_path) == 0
    assert len((tmp_path / "r_monotone.csv").read_text().splitlines()) == 6


def test_seed_override_and_determinism(tmp_path):
    p = _write(tmp_path, {"schema": 1, "kind": "prop_suite", "seed": 0, "n_instances": 3})
    sc = load_config(p)
    run_scenario(sc, tmp_path / "a", seed=9)
    run_scenario(sc, tmp_path / "b", seed=9)
    run_scenario(sc, tmp_path / "c", seed=10)
    a, b, c = ((tmp_path / d / "suite.csv").read_bytes() for d in "abc")
    assert a == b and a != c
    assert b"\r\n" not in a
    assert json.loads((tmp_path / "a" / "summary.json").read_text())["seed"] == 9


def test_numerical_error_exit_code(tmp_path, capsys):
    rates = json.loads(json.dumps(RATES))
    rates["mu"] = {"profile": {"constant": 0.0}, "modulation": None}
    doc = {"schema": 1, "kind": "threshold", "rates": rates}
    assert main(["run", str(_write(tmp_path, doc)), "--out", str(tmp_path / "o")]) == 2
    assert _errors(capsys)["error"] == "TruncationError"


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "stieltjes_pop", "print-schema"],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0 and json.loads(r.stdout)["title"]
