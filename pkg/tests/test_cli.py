import json
import os

import numpy as np
import pytest

from nlsquench.cli import main
from nlsquench.core import load_json


def _write(tmp_path, name, payload):
    path = tmp_path / name
    with open(path, "w") as f:
        json.dump(payload, f)
    return str(path)


def _read_csv(path):
    with open(path) as f:
        header = f.readline().strip().split(",")
        rows = [list(map(float, line.strip().split(","))) for line in f]
    return header, np.array(rows)


SCATTER_CFG = {
    "profile": {"builtin": "sech", "A": 1.0, "L": 30.0, "n": 1501,
                "boundary_tol": 1e-9},
    "coupling": {"im": 1.0},
    "kgrid": {"k_max": 3.0, "n": 31},
    "integrator": {"step": 0.02},
}


def test_scatter_soliton_columns(tmp_path):
    cfg = _write(tmp_path, "cfg.json", SCATTER_CFG)
    out = str(tmp_path / "run")
    assert main(["scatter", "--config", cfg, "--out", out]) == 0
    header, rows = _read_csv(os.path.join(out, "scattering.csv"))
    assert header == ["k", "re_a", "im_a", "re_b", "im_b", "abs_rho"]
    a = rows[:, 1] + 1j * rows[:, 2]
    b = rows[:, 3] + 1j * rows[:, 4]
    assert np.max(np.abs(np.abs(a) - 1.0)) < 1e-6
    assert np.max(np.abs(b)) < 1e-6
    data = load_json(os.path.join(out, "scattering.json"))
    assert len(data["zeros"]) == 1
    assert abs(data["zeros"][0]["im"] - 0.5) < 1e-6


def test_scatter_zero_profile(tmp_path):
    cfg = {k: v for k, v in SCATTER_CFG.items() if k != "integrator"}
    cfg["profile"] = {"builtin": "zero", "L": 10.0, "n": 64}
    path = _write(tmp_path, "cfg.json", cfg)
    out = str(tmp_path / "run")
    assert main(["scatter", "--config", path, "--out", out]) == 0
    _, rows = _read_csv(os.path.join(out, "scattering.csv"))
    assert np.max(np.abs(rows[:, 1] - 1.0)) < 1e-12  # a = 1
    assert np.max(np.abs(rows[:, 3:5])) < 1e-12      # b = 0


def test_deterministic_outputs(tmp_path):
    cfg = _write(tmp_path, "cfg.json", SCATTER_CFG)
    out1 = str(tmp_path / "r1")
    out2 = str(tmp_path / "r2")
    assert main(["scatter", "--config", cfg, "--out", out1]) == 0
    assert main(["scatter", "--config", cfg, "--out", out2]) == 0
    for name in ("scattering.json", "scattering.csv", "config.json", "manifest.json"):
        b1 = open(os.path.join(out1, name), "rb").read()
        b2 = open(os.path.join(out2, name), "rb").read()
        assert b1 == b2, name


def test_csv_round_trips_json(tmp_path):
    cfg = _write(tmp_path, "cfg.json", SCATTER_CFG)
    out = str(tmp_path / "run")
    main(["scatter", "--config", cfg, "--out", out])
    data = load_json(os.path.join(out, "scattering.json"))
    _, rows = _read_csv(os.path.join(out, "scattering.csv"))
    # 17 significant digits reproduce the doubles exactly
    assert np.array_equal(rows[:, 0], np.array(data["k"]))
    assert np.array_equal(rows[:, 1], np.array(data["a_re"]))
    assert np.array_equal(rows[:, 4], np.array(data["b_im"]))


def test_missing_files_exit_one(tmp_path):
    out = str(tmp_path / "run")
    assert main(["scatter", "--config", str(tmp_path / "nope.json"), "--out", out]) == 1
    cfg = _write(tmp_path, "cfg.json",
                 {"profile": {"path": str(tmp_path / "missing_profile.json")}})
    assert main(["scatter", "--config", cfg, "--out", out]) == 1


def test_invalid_coupling_exit_one(tmp_path):
    cfg = dict(SCATTER_CFG)
    cfg["coupling"] = {"re": 1.0, "im": 1.0}
    path = _write(tmp_path, "cfg.json", cfg)
    assert main(["scatter", "--config", path, "--out", str(tmp_path / "run")]) == 1


def test_quench_classification(tmp_path):
    cfg = dict(SCATTER_CFG)
    cfg["coupling_new"] = {"im": 2.0}
    cfg["factorization"] = True
    path = _write(tmp_path, "cfg.json", cfg)
    out = str(tmp_path / "run")
    assert main(["quench", "--config", path, "--out", out]) == 0
    rep = load_json(os.path.join(out, "quench.json"))
    assert rep["classification"]["label"] == "pure-multisoliton"
    assert rep["classification"]["found_N"] == 2
    assert rep["classification"]["predicted_N"] == 2
    assert os.path.exists(os.path.join(out, "pre.csv"))
    assert os.path.exists(os.path.join(out, "post.csv"))
    assert rep["factorization_residual"] < 1e-5


def test_zeros_command(tmp_path):
    cfg = dict(SCATTER_CFG)
    cfg["coupling"] = {"im": 2.0}
    cfg["region"] = [-1.0, 1.0, 0.05, 2.2]
    path = _write(tmp_path, "cfg.json", cfg)
    out = str(tmp_path / "run")
    assert main(["zeros", "--config", path, "--out", out]) == 0
    z = load_json(os.path.join(out, "zeros.json"))["zeros"]
    assert [round(v["im"], 4) for v in z] == [0.5, 1.5]


def test_reconstruct_refuses_bound_states(tmp_path):
    cfg = _write(tmp_path, "cfg.json", SCATTER_CFG)
    out = str(tmp_path / "scatter_run")
    main(["scatter", "--config", cfg, "--out", out])
    rcfg = _write(tmp_path, "rcfg.json",
                  {"profile": {"builtin": "zero"},
                   "data_path": os.path.join(out, "scattering.json"),
                   "coupling0": {"re": 0.5}})
    code = main(["reconstruct", "--config", rcfg, "--out", str(tmp_path / "rec")])
    assert code == 1


def test_reconstruct_radiative_data(tmp_path):
    cfg = {
        "profile": {"builtin": "gaussian", "amp": 0.2, "L": 30.0, "n": 1501,
                    "boundary_tol": 1e-9},
        "coupling": {"re": 0.5},
        "kgrid": {"k_max": 5.0, "n": 161},
        "integrator": {"step": 0.02},
    }
    path = _write(tmp_path, "cfg.json", cfg)
    srun = str(tmp_path / "scatter_run")
    assert main(["scatter", "--config", path, "--out", srun]) == 0
    rcfg = _write(tmp_path, "rcfg.json",
                  {"profile": {"builtin": "zero"},
                   "data_path": os.path.join(srun, "scattering.json"),
                   "xgrid": {"L": 4.0, "n": 41}})
    rrun = str(tmp_path / "rec")
    assert main(["reconstruct", "--config", rcfg, "--out", rrun]) == 0
    field = load_json(os.path.join(rrun, "field.json"))
    vals = np.array(field["re"]) + 1j * np.array(field["im"])
    xs = np.linspace(-4, 4, 41)
    assert np.max(np.abs(vals - 0.2 * np.exp(-xs ** 2))) < 5e-3


def test_evolve_snapshots(tmp_path):
    cfg = {
        "profile": {"builtin": "sech", "L": 20.0, "n": 1001, "boundary_tol": 1e-7},
        "coupling": {"im": 1.0},
        "time": 0.02,
        "snapshots": 2,
        "stepper": {"dt": 1e-3, "n_modes": 512},
    }
    path = _write(tmp_path, "cfg.json", cfg)
    out = str(tmp_path / "run")
    assert main(["evolve", "--config", path, "--out", out]) == 0
    snaps = load_json(os.path.join(out, "snapshots.json"))["snapshots"]
    assert [s["time"] for s in snaps] == [0.01, 0.02]
    vals = np.array(snaps[-1]["re"]) + 1j * np.array(snaps[-1]["im"])
    assert abs(np.max(np.abs(vals)) - 1.0) < 1e-4  # soliton peak survives


def test_darboux_command(tmp_path):
    cfg = {
        "profile": {"builtin": "zero", "L": 25.0, "n": 1251},
        "coupling": {"im": 1.0},
        "steps": [{"k0": {"re": 0.0, "im": 0.5}, "mu": {"re": 1.0, "im": 0.0},
                   "mode": "add"}],
    }
    path = _write(tmp_path, "cfg.json", cfg)
    out = str(tmp_path / "run")
    assert main(["darboux", "--config", path, "--out", out]) == 0
    prof = load_json(os.path.join(out, "result_profile.json"))
    vals = np.array(prof["re"]) + 1j * np.array(prof["im"])
    x = np.linspace(-25, 25, 1251)
    assert np.max(np.abs(np.abs(vals) - 1 / np.cosh(x))) < 1e-10


def test_verify_zero_field_passes(tmp_path):
    cfg = {
        "profile": {"builtin": "zero", "L": 10.0, "n": 128},
        "coupling": {"im": 1.0},
        "coupling_new": {"im": 2.0},
        "kgrid": {"k_max": 2.0, "n": 11},
        "factorization": {},
    }
    path = _write(tmp_path, "cfg.json", cfg)
    out = str(tmp_path / "run")
    assert main(["verify", "--config", path, "--out", out]) == 0
    rep = load_json(os.path.join(out, "verify.json"))
    assert rep["passed"] is True
    assert rep["factorization"]["max_residual"] < 1e-12


def test_verify_fails_on_tight_threshold(tmp_path):
    cfg = {
        "profile": {"builtin": "sech", "L": 25.0, "n": 1251, "boundary_tol": 1e-9},
        "coupling": {"im": 1.0},
        "coupling_new": {"im": 2.0},
        "kgrid": {"k_max": 2.0, "n": 11},
        "factorization": {"max_residual": 1e-15},
    }
    path = _write(tmp_path, "cfg.json", cfg)
    out = str(tmp_path / "run")
    assert main(["verify", "--config", path, "--out", out]) == 2


def test_threads_flag_validated(tmp_path):
    cfg = _write(tmp_path, "cfg.json", SCATTER_CFG)
    assert main(["scatter", "--config", cfg, "--out", str(tmp_path / "r"),
                 "--threads", "0"]) == 1
