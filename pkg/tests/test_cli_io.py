import csv
import json
import math

import numpy as np
import pytest

from dqdbell.cli import main
from dqdbell.electrostatics import build_coupling_table
from dqdbell.geometry import Geometry
from dqdbell.output import PLOT_FILES, fmt, load_run

HEADER = "t_ps,t_scaled,S_chsh,S_bprv,entropy_bits,eof"


def read_series(path):
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    out = {}
    for r in rows:
        out.setdefault(r["series"], []).append((float(r["x"]), float(r["y"])))
    return out


def test_fmt():
    assert fmt(2 * math.sqrt(2)) == "2.82842712475"
    assert fmt(-0.0) == "0"
    assert fmt(1e-20) == "1e-20"
    assert fmt(float("nan")) == "nan"


def test_simulate_default(tmp_path):
    out = tmp_path / "run.csv"
    assert main(["simulate", "--seed", "42", "--out", str(out)]) == 0
    raw = out.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == HEADER
    assert len(lines) == 501
    meta = json.loads((tmp_path / "run.json").read_text())
    assert meta["config"]["seed"] == 42
    assert meta["software"]["version"]
    assert set(meta["characteristic_times"]) == {"e_rms_A", "e_rms_B", "tau_A", "tau_B", "tau_E"}
    assert len(meta["couplings_eV"]) == 12


def test_simulate_byte_identical(tmp_path):
    for name in ("a", "b"):
        assert main(["simulate", "--seed", "42", "--steps", "100", "--out", str(tmp_path / f"{name}.csv")]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_simulate_env_var_default(tmp_path, monkeypatch):
    monkeypatch.setenv("DQDBELL_OUTPUT_DIR", str(tmp_path))
    assert main(["simulate", "--seed", "3", "--steps", "5"]) == 0
    assert (tmp_path / "run_seed3.csv").exists()


def test_simulate_odd_env_exit_code(tmp_path, capsys):
    rc = main(["simulate", "--seed", "1", "--n-env", "3", "--out", str(tmp_path / "x.csv")])
    assert rc == 2
    assert "n_env" in capsys.readouterr().err


def test_simulate_missing_seed_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["simulate"])
    assert exc.value.code == 2


def test_simulate_custom_angles(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["simulate", "--seed", "1", "--steps", "5", "--chsh-angles", "0,90,45,135",
                 "--mode", "uniform-bloch", "--out", str(out)]) == 0
    meta = json.loads(out.with_suffix(".json").read_text())
    assert meta["config"]["chsh_angles"] == [0, 90, 45, 135]
    assert meta["initial_state"]["mode"] == "uniform-bloch"


def test_metadata_rederives_couplings(tmp_path):
    out = tmp_path / "r.csv"
    main(["simulate", "--seed", "9", "--steps", "5", "--r-over-a", "2.5", "--out", str(out)])
    meta = json.loads(out.with_suffix(".json").read_text())
    J = build_coupling_table(Geometry.from_dict(meta["geometry"]))
    assert np.array_equal(J, np.array(meta["couplings_eV"]))
    rec = load_run(out, out.with_suffix(".json"))
    assert rec.seed == 9 and len(rec.t_ps) == 5


def test_ensemble_single_run(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"r_over_a": [3.0], "replicates": 1, "base_seed": 4, "n_steps": 50}))
    assert main(["ensemble", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    summary = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert summary["collapse"] == {"omitted": "insufficient records"}
    assert summary["n_runs_ok"] == 1
    assert "tau_opt_over_tauE" in summary["fits"]["chsh"]


def test_ensemble_rerun_identical(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"r_over_a": [3.0, 5.0], "replicates": 2, "base_seed": 8, "n_steps": 80}))
    for name in ("a", "b"):
        assert main(["ensemble", "--config", str(cfg), "--out", str(tmp_path / name)]) == 0
    a = (tmp_path / "a" / "summary.json").read_bytes()
    assert a == (tmp_path / "b" / "summary.json").read_bytes()
    s = json.loads(a)
    assert {"mean", "std"} <= set(s["crossings"]["chsh"])
    assert s["collapse"]["n_points"] == 100


def test_ensemble_bad_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"r_over_a": [3.0], "n_env": 5}))
    assert main(["ensemble", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    cfg.write_text("{not json")
    assert main(["ensemble", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2


def test_ensemble_partial_failure(tmp_path, monkeypatch):
    import dqdbell.ensemble as ens

    real = ens.run_single

    def flaky(cfg):
        if cfg.seed == 1:
            raise RuntimeError("boom")
        return real(cfg)

    monkeypatch.setattr(ens, "run_single", flaky)
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"r_over_a": [3.0], "replicates": 3, "n_steps": 20}))
    assert main(["ensemble", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1
    summary = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert summary["n_runs_ok"] == 2
    assert summary["failed"] == [{"seed": 1, "r_over_a": 3.0, "error": "RuntimeError: boom"}]


@pytest.fixture(scope="module")
def default_cli_ensemble(tmp_path_factory):
    out = tmp_path_factory.mktemp("ens")
    assert main(["ensemble", "--out", str(out)]) == 0
    return out


def test_ensemble_default_outputs(default_cli_ensemble):
    runs = sorted((default_cli_ensemble / "runs").glob("*.csv"))
    assert len(runs) == 72
    assert len(list((default_cli_ensemble / "runs").glob("*.json"))) == 72
    s = json.loads((default_cli_ensemble / "summary.json").read_text())
    assert s["fits"]["chsh"]["tau_opt_over_tauE"] > 0
    assert s["fits"]["bprv"]["tau_opt_over_tauE"] > 0
    assert set(s["fits_by_r_over_a"]["chsh"]) == {"2.5", "3", "3.5", "4", "5", "7"}


def test_plotdata(default_cli_ensemble, tmp_path):
    assert main(["plotdata", str(default_cli_ensemble), "--out", str(tmp_path)]) == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == sorted(PLOT_FILES)
    chsh = read_series(tmp_path / "chsh_scaled.csv")
    fit = [v for k, v in chsh.items() if k.startswith("gaussian fit")]
    assert len(fit) == 1 and len(fit[0]) == 200
    assert fit[0][0] == (0.0, pytest.approx(2 * math.sqrt(2), abs=1e-11))
    assert {y for _, y in chsh["chsh local-realism bound"]} == {2.0}
    bprv = read_series(tmp_path / "bprv_scaled.csv")
    assert {y for _, y in bprv["bprv local-realism bound"]} == {7.0}
    assert sum(1 for k in chsh if k.startswith("R/a=")) == 72
    unscaled = read_series(tmp_path / "chsh_unscaled.csv")
    assert any(k.startswith("R/a=2.5 ") for k in unscaled)
    ent = read_series(tmp_path / "entropy_eof.csv")
    assert sum(1 for k in ent if k.startswith("entropy")) == 72
    assert sum(1 for k in ent if k.startswith("eof")) == 72


def test_plotdata_from_simulate_dir(tmp_path):
    main(["simulate", "--seed", "1", "--steps", "100", "--out", str(tmp_path / "r1.csv")])
    main(["simulate", "--seed", "2", "--steps", "100", "--out", str(tmp_path / "r2.csv")])
    assert main(["plotdata", str(tmp_path), "--out", str(tmp_path / "pd")]) == 0
    assert len(list((tmp_path / "pd").glob("*.csv"))) == 4


def test_plotdata_missing_input(tmp_path, capsys):
    assert main(["plotdata", str(tmp_path / "nope")]) == 1


def test_selftest_command(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") >= 7
