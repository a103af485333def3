import json
import time

import numpy as np
import pytest

from decodyn.cli import ConfigError, list_presets, main, parse_config, preset_config, run_scenario

REQUIRED_PRESETS = {
    "linear",
    "quadratic",
    "cubic-cat",
    "sine-cat",
    "saturation-scan",
    "hbar-scan",
    "mc-validate",
    "fock-validate",
}


def read_csv(path):
    lines = path.read_text().strip().splitlines()
    header = lines[0].split(",")
    rows = np.array([[float(x) for x in line.split(",")] for line in lines[1:]])
    return header, rows


def small_config(**overrides):
    cfg = {
        "name": "mini",
        "model": {"hbar": 1.0, "beta": None},
        "bath": {"modes": [{"m": 1.0, "omega": 1.0, "c": 1.0}]},
        "coupling": {"variant": "linear", "a": 1.0},
        "state": {"packets": [{"center_q": 0.0, "sigma": 0.5}]},
        "time": {"t_max": 1.0, "n_steps": 20},
    }
    cfg.update(overrides)
    return cfg


def test_list_presets_contains_required_names():
    names = {name for name, _ in list_presets()}
    assert REQUIRED_PRESETS <= names
    for _, desc in list_presets():
        assert desc


def test_every_preset_config_parses():
    for name in REQUIRED_PRESETS:
        parse_config(preset_config(name))


@pytest.mark.parametrize("name", sorted(REQUIRED_PRESETS))
def test_every_preset_runs_within_budget(tmp_path, name):
    start = time.perf_counter()
    paths = run_scenario(name, out_dir=tmp_path)
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0
    assert paths["series"].exists()
    assert paths["manifest"].exists()


def test_run_minimal_config(tmp_path):
    paths = run_scenario(small_config(), out_dir=tmp_path)
    assert set(paths) == {"series", "manifest"}
    header, rows = read_csv(paths["series"])
    assert header == ["t", "B1", "B2", "gamma_c", "gamma_q", "S_c", "S_q",
                      "phase_c", "phase_q", "logmod_c", "logmod_q"]
    assert rows.shape == (20, 11)
    manifest = json.loads(paths["manifest"].read_text())
    assert manifest["grid"]["n_points"] >= 16
    assert manifest["bath"]["n_modes"] == 1
    assert "spacing" in manifest["grid"]
    assert manifest["versions"]["decodyn"]


def test_linear_preset_series_has_matching_sides(tmp_path):
    paths = run_scenario("linear", out_dir=tmp_path)
    header, rows = read_csv(paths["series"])
    col = {name: i for i, name in enumerate(header)}
    assert np.max(np.abs(rows[:, col["gamma_c"]] - rows[:, col["gamma_q"]])) < 1e-12
    assert np.max(np.abs(rows[:, col["S_c"]] - rows[:, col["S_q"]])) < 1e-10


def test_cubic_preset_quantum_decay_without_classical(tmp_path):
    paths = run_scenario("cubic-cat", out_dir=tmp_path)
    header, rows = read_csv(paths["series"])
    col = {name: i for i, name in enumerate(header)}
    assert np.all(rows[:, col["gamma_c"]] == 0.0)
    late = rows[1:, col["gamma_q"]]
    assert np.all(late < 0.0)


def test_sine_preset_classical_decay_without_quantum(tmp_path):
    paths = run_scenario("sine-cat", out_dir=tmp_path)
    header, rows = read_csv(paths["series"])
    col = {name: i for i, name in enumerate(header)}
    gq = np.abs(rows[:, col["gamma_q"]])
    gc = rows[1:, col["gamma_c"]]
    assert np.all(gc < 0.0)
    assert gq.max() < 1e-12 * np.abs(gc).max()


def test_saturation_preset_scan(tmp_path):
    paths = run_scenario("saturation-scan", out_dir=tmp_path)
    header, rows = read_csv(paths["scan"])
    assert header == ["separation", "rate_classical", "rate_quantum", "ratio"]
    classical = rows[:, 1]
    quantum = rows[:, 2]
    assert np.all(np.diff(classical) > 0)
    assert classical[-1] > 10 * classical[0]
    top = quantum[-3:]
    assert (top.max() - top.min()) < 0.05 * top.min()


def test_hbar_preset_scan(tmp_path):
    paths = run_scenario("hbar-scan", out_dir=tmp_path)
    header, rows = read_csv(paths["scan"])
    assert header[0] == "hbar_factor"
    ratios = rows[:, 3]
    assert abs(ratios[0] - ratios[1]) <= 1e-12 * ratios[0]


def test_oracle_outputs_schema(tmp_path):
    paths = run_scenario("mc-validate", out_dir=tmp_path)
    data = json.loads(paths["oracle"].read_text())
    assert set(data) == {"mc"}
    for record in data["mc"]:
        assert {"t", "mean_re", "mean_im", "std_error", "n_samples",
                "analytic_re", "analytic_im", "sigma_distance"} <= set(record)
        assert record["sigma_distance"] < 4.0
    manifest = json.loads(paths["manifest"].read_text())
    assert manifest["oracle"]["mc"]["n_samples"] == 20000

    paths = run_scenario("fock-validate", out_dir=tmp_path)
    data = json.loads(paths["oracle"].read_text())
    for record in data["fock"]:
        assert record["modulus_error"] < 1e-8


def test_deterministic_outputs(tmp_path):
    a = run_scenario("mc-validate", out_dir=tmp_path / "a")
    b = run_scenario("mc-validate", out_dir=tmp_path / "b")
    assert a["series"].read_bytes() == b["series"].read_bytes()
    assert a["oracle"].read_bytes() == b["oracle"].read_bytes()
    assert a["manifest"].read_bytes() == b["manifest"].read_bytes()
    c = run_scenario("mc-validate", out_dir=tmp_path / "c", seed=99)
    assert c["oracle"].read_bytes() != a["oracle"].read_bytes()


def test_seed_override_recorded(tmp_path):
    paths = run_scenario(small_config(), out_dir=tmp_path, seed=42)
    manifest = json.loads(paths["manifest"].read_text())
    assert manifest["seed"] == 42


def test_config_errors_name_fields():
    with pytest.raises(ConfigError, match="config.name"):
        parse_config(small_config() | {"name": None} | {})
    with pytest.raises(ConfigError, match="bath"):
        parse_config({k: v for k, v in small_config().items() if k != "bath"})
    with pytest.raises(ConfigError, match="time.t_max"):
        parse_config(small_config(time={"t_max": -1.0, "n_steps": 10}))
    with pytest.raises(ConfigError, match="state.packets"):
        parse_config(small_config(state={"packets": []}))
    with pytest.raises(ConfigError, match="coupling"):
        parse_config(small_config(coupling={"variant": "nope"}))
    with pytest.raises(ConfigError, match="scan"):
        parse_config(small_config(scan={"separations": [1.0, 2.0]}))
    with pytest.raises(ConfigError, match="oracle.mc.n_samples"):
        parse_config(small_config(oracle={"mc": {"times": [1.0], "n_samples": 64}}))
    with pytest.raises(ConfigError, match="oracle.fock.n_levels"):
        parse_config(small_config(oracle={"fock": {"times": [1.0], "n_levels": 4}}))


def test_main_run_and_exit_codes(tmp_path, capsys):
    cfg_path = tmp_path / "ok.json"
    cfg_path.write_text(json.dumps(small_config()))
    assert main(["run", str(cfg_path), "--out", str(tmp_path / "out")]) == 0

    assert main(["validate", str(cfg_path)]) == 0

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(small_config(time={"n_steps": 10})))
    assert main(["validate", str(bad)]) == 2
    assert "time.t_max" in capsys.readouterr().err

    notjson = tmp_path / "notjson.json"
    notjson.write_text("{nope")
    assert main(["validate", str(notjson)]) == 2

    assert main(["run", "no-such-preset", "--out", str(tmp_path)]) == 2

    # explicit grid too small for the packets -> coverage exit code
    cfg = small_config()
    cfg["state"]["grid"] = {"q_min": -1.0, "q_max": 1.0, "n_points": 64}
    covered = tmp_path / "cover.json"
    covered.write_text(json.dumps(cfg))
    assert main(["run", str(covered), "--out", str(tmp_path / "out2")]) == 3
    assert "coverage" in capsys.readouterr().err


def test_presets_command_writes_configs(tmp_path, capsys):
    assert main(["presets", "--write", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    for name in REQUIRED_PRESETS:
        assert name in out
        assert (tmp_path / f"{name}.json").exists()
        json.loads((tmp_path / f"{name}.json").read_text())


def test_probe_defaults_to_packet_centers(tmp_path):
    cfg = small_config(
        state={"packets": [
            {"center_q": -3.0, "sigma": 0.4},
            {"center_q": 3.0, "sigma": 0.4},
        ]}
    )
    paths = run_scenario(cfg, out_dir=tmp_path)
    manifest = json.loads(paths["manifest"].read_text())
    assert manifest["probe"] == {"q1": -3.0, "q2": 3.0}
