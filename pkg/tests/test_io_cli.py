import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

import gns
from gns.cli import config_to_text, main, parse_config_text, scenario_id
from gns.errors import ConfigError, CsvError
from gns.io import read_states_csv, read_trajectory_csv, write_states_csv, write_trajectory_csv

FAST_CFG = """\
nu = 0.5
T = 0.2
dt = 1e-3
cutoff = 1
ic = taylor_green
forcing = zero
stride = 5
seed = 0
nonlinear = on
"""

FORCED_CFG = """\
nu = 0.5
T = 0.5
dt = 1e-3
cutoff = 1
ic = beltrami:1
forcing = exponential_decay:0.5:2.0:mode:1,0,0,1,cos
stride = 5
seed = 11
"""

BLOWUP_CFG = """\
nu = 0.01
T = 10.0
dt = 0.5
cutoff = 2
ic = random_band:8:80.0
seed = 3
"""


def run_cli(*args, cwd=None, env=None):
    import os

    full_env = dict(os.environ)
    if env:
        full_env.update(env)
    return subprocess.run(
        [sys.executable, "-m", "gns.cli", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
        env=full_env,
    )


@pytest.fixture()
def fast_cfg(tmp_path):
    path = tmp_path / "fast.cfg"
    path.write_text(FAST_CFG)
    return path


# ---------------------------------------------------------------------------
# config parsing


def test_parse_config_round_trip():
    cfg = parse_config_text(FAST_CFG)
    assert cfg.nu == 0.5 and cfg.cutoff == 1 and cfg.stride == 5
    echoed = config_to_text(cfg)
    assert parse_config_text(echoed) == cfg


def test_parse_config_errors_carry_line_numbers():
    with pytest.raises(ConfigError, match="line 2"):
        parse_config_text("nu = 1.0\nbogus_key = 3\n")
    with pytest.raises(ConfigError, match="line 2"):
        parse_config_text("nu = 1.0\njust words\n")
    with pytest.raises(ConfigError):
        parse_config_text("nu = 1.0\n")  # missing required keys
    with pytest.raises(ConfigError, match="line 3"):
        parse_config_text("nu = 1.0\nT = 1.0\ndt = fast\ncutoff = 1\nic = taylor_green\n")


def test_parse_forcing_and_ic_strings():
    cfg = parse_config_text(FORCED_CFG)
    assert isinstance(cfg.forcing, gns.ExponentialDecayForcing)
    assert cfg.forcing.pattern == gns.SingleModePattern((1, 0, 0), 1, 0)
    assert isinstance(cfg.ic, gns.BeltramiShell)
    with pytest.raises(ConfigError):
        parse_config_text(FAST_CFG.replace("taylor_green", "vortex_soup"))
    with pytest.raises(ConfigError):
        parse_config_text(FAST_CFG.replace("zero", "constant:1.0:mode:9"))


def test_explicit_ic_from_file(tmp_path):
    basis = gns.build_basis(1)
    coeff_path = tmp_path / "c0.txt"
    coeff_path.write_text("\n".join(["0.0"] * basis.n))
    cfg = parse_config_text(FAST_CFG.replace("taylor_green", f"explicit:{coeff_path}"))
    assert isinstance(cfg.ic, gns.ExplicitCoefficients)
    assert len(tuple(cfg.ic.values)) == basis.n


def test_scenario_id_stable():
    a = parse_config_text(FAST_CFG)
    b = parse_config_text(FAST_CFG)
    assert scenario_id(a) == scenario_id(b)
    c = parse_config_text(FAST_CFG.replace("0.5", "0.25"))
    assert scenario_id(a) != scenario_id(c)


# ---------------------------------------------------------------------------
# trajectory / states CSV round trips


def test_trajectory_csv_round_trip(tmp_path):
    traj = gns.simulate(parse_config_text(FAST_CFG))
    path = tmp_path / "traj.csv"
    write_trajectory_csv(traj, path, "abc")
    meta, cols = read_trajectory_csv(path)
    assert meta["cutoff"] == "1" and meta["scenario"] == "abc"
    assert np.array_equal(cols["t"], traj.times)
    assert np.array_equal(cols["E"], traj.energy)
    assert np.array_equal(cols["int_grad4"], traj.int_grad4)


def test_states_csv_round_trip(tmp_path):
    traj = gns.simulate(parse_config_text(FAST_CFG))
    path = tmp_path / "states.csv"
    write_states_csv(traj, path)
    states = read_states_csv(path, traj.states.shape[1], traj.times)
    assert np.array_equal(states, traj.states)


def test_corrupted_row_reports_row_number(tmp_path):
    traj = gns.simulate(parse_config_text(FAST_CFG))
    path = tmp_path / "traj.csv"
    write_trajectory_csv(traj, path)
    lines = path.read_text().splitlines()
    lines[4] = "one,two"
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(CsvError, match="row 5"):
        read_trajectory_csv(path)


# ---------------------------------------------------------------------------
# subcommands, exit codes, round trips


def test_simulate_then_verify_round_trip(tmp_path, fast_cfg):
    r = run_cli("simulate", "--config", str(fast_cfg), "--out-dir", str(tmp_path / "run"))
    assert r.returncode == 0, r.stderr
    assert (tmp_path / "run" / "trajectory.csv").exists()
    manifest = json.loads((tmp_path / "run" / "manifest.json").read_text())
    assert manifest["status"] == "ok"
    for out in manifest["outputs"]:
        assert Path(out).exists()
    r = run_cli(
        "verify",
        "--trajectory", str(tmp_path / "run" / "trajectory.csv"),
        "--config", str(fast_cfg),
        "--report", str(tmp_path / "run" / "report.json"),
    )
    assert r.returncode == 0, r.stderr + r.stdout
    reports = json.loads((tmp_path / "run" / "report.json").read_text())
    assert isinstance(reports, list)
    required = {"name", "lhs", "rhs", "margin", "satisfied", "t"}
    assert all(required <= set(rep) for rep in reports)
    assert all(rep["satisfied"] for rep in reports)


def test_forced_round_trip_with_states(tmp_path):
    cfg_path = tmp_path / "forced.cfg"
    cfg_path.write_text(FORCED_CFG)
    run_dir = tmp_path / "run"
    r = run_cli("simulate", "--config", str(cfg_path), "--out-dir", str(run_dir), "--states")
    assert r.returncode == 0, r.stderr
    r = run_cli(
        "verify",
        "--trajectory", str(run_dir / "trajectory.csv"),
        "--config", str(cfg_path),
        "--states", str(run_dir / "states.csv"),
        "--report", str(run_dir / "report.json"),
    )
    assert r.returncode == 0, r.stderr + r.stdout


def test_forced_verify_without_states_is_usage_error(tmp_path):
    cfg_path = tmp_path / "forced.cfg"
    cfg_path.write_text(FORCED_CFG)
    run_dir = tmp_path / "run"
    assert run_cli("simulate", "--config", str(cfg_path), "--out-dir", str(run_dir)).returncode == 0
    r = run_cli(
        "verify",
        "--trajectory", str(run_dir / "trajectory.csv"),
        "--config", str(cfg_path),
        "--report", str(run_dir / "report.json"),
    )
    assert r.returncode == 2
    assert "states" in r.stderr


def test_dt_zero_exits_2(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(FAST_CFG.replace("dt = 1e-3", "dt = 0"))
    r = run_cli("simulate", "--config", cfg.as_posix(), "--out-dir", str(tmp_path / "o"))
    assert r.returncode == 2
    assert "positive" in r.stderr


def test_blowup_exits_3_with_failure_time(tmp_path):
    cfg = tmp_path / "blow.cfg"
    cfg.write_text(BLOWUP_CFG)
    out = tmp_path / "blow"
    r = run_cli("simulate", "--config", str(cfg), "--out-dir", str(out))
    assert r.returncode == 3
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["status"] == "diverged"
    assert manifest["failure_time"] == pytest.approx(1.5)
    meta, cols = read_trajectory_csv(out / "trajectory.csv")
    assert np.all(np.isfinite(cols["E"]))


def test_verify_corrupted_csv_exits_2(tmp_path, fast_cfg):
    run_dir = tmp_path / "run"
    assert run_cli("simulate", "--config", str(fast_cfg), "--out-dir", str(run_dir)).returncode == 0
    traj = run_dir / "trajectory.csv"
    lines = traj.read_text().splitlines()
    lines[6] = "not,a,row"
    traj.write_text("\n".join(lines) + "\n")
    r = run_cli("verify", "--trajectory", str(traj), "--config", str(fast_cfg),
                "--report", str(run_dir / "report.json"))
    assert r.returncode == 2
    assert "row 7" in r.stderr


def test_verify_injected_violation_exits_1(tmp_path, fast_cfg):
    run_dir = tmp_path / "run"
    assert run_cli("simulate", "--config", str(fast_cfg), "--out-dir", str(run_dir)).returncode == 0
    traj = run_dir / "trajectory.csv"
    lines = traj.read_text().splitlines()
    # scale the energy of one sample by 1.01: breaks the energy identity
    fields = lines[10].split(",")
    fields[1] = format(float(fields[1]) * 1.01, ".17g")
    lines[10] = ",".join(fields)
    traj.write_text("\n".join(lines) + "\n")
    r = run_cli("verify", "--trajectory", str(traj), "--config", str(fast_cfg),
                "--report", str(run_dir / "report.json"))
    assert r.returncode == 1
    assert "energy_identity" in r.stderr


def test_verify_mismatched_cutoff_exits_2(tmp_path, fast_cfg):
    run_dir = tmp_path / "run"
    assert run_cli("simulate", "--config", str(fast_cfg), "--out-dir", str(run_dir)).returncode == 0
    other = tmp_path / "other.cfg"
    other.write_text(FAST_CFG.replace("cutoff = 1", "cutoff = 2"))
    r = run_cli("verify", "--trajectory", str(run_dir / "trajectory.csv"),
                "--config", str(other), "--report", str(run_dir / "report.json"))
    assert r.returncode == 2
    assert "cutoff" in r.stderr


def test_twin_delta_zero_phi_identically_zero(tmp_path, fast_cfg):
    out = tmp_path / "twin"
    r = run_cli("twin", "--config", str(fast_cfg), "--delta", "0.0", "--out-dir", str(out))
    assert r.returncode == 0, r.stderr
    rows = (out / "separation.csv").read_text().strip().splitlines()[1:]
    assert all(float(row.split(",")[1]) == 0.0 for row in rows)


def test_twin_fixture_exits_0(tmp_path, fast_cfg):
    out = tmp_path / "twin"
    r = run_cli("twin", "--config", str(fast_cfg), "--delta", "1e-6",
                "--seed", "7", "--out-dir", str(out))
    assert r.returncode == 0, r.stderr
    header = (out / "separation.csv").read_text().splitlines()[0]
    assert header == "t,phi,envelope,ratio"
    reports = json.loads((out / "report.json").read_text())
    assert any(rep["name"] == "gronwall_envelope" for rep in reports)


def test_refine_outputs(tmp_path):
    cfg = tmp_path / "refine.cfg"
    cfg.write_text("nu = 1.0\nT = 0.1\ndt = 1e-2\ncutoff = 1\nic = taylor_green\nstride = 5\n")
    out = tmp_path / "ref"
    r = run_cli("refine", "--config", str(cfg), "--cutoffs", "1,2", "--out-dir", str(out))
    assert r.returncode == 0, r.stderr
    lines = (out / "convergence.csv").read_text().strip().splitlines()
    assert lines[1].startswith("cutoff,n,sup_diff_prev,")
    assert lines[2].startswith("1,52,,")
    assert lines[3].startswith("2,248,")


def test_refine_rejects_bad_cutoffs(tmp_path, fast_cfg):
    r = run_cli("refine", "--config", str(fast_cfg), "--cutoffs", "2,1",
                "--out-dir", str(tmp_path / "x"))
    assert r.returncode == 2


def test_basis_info_table(tmp_path):
    r = run_cli("basis-info", "--cutoff", "1")
    assert r.returncode == 0
    lines = r.stdout.strip().splitlines()
    assert lines[0] == "j,kx,ky,kz,pol,parity,lambda"
    assert len(lines) == 1 + 52
    first = lines[1].split(",")
    assert first[5] in ("cos", "sin")
    r2 = run_cli("basis-info", "--cutoff", "0")
    assert r2.returncode == 2


def test_tensor_dump(tmp_path):
    out = tmp_path / "tensor.csv"
    r = run_cli("tensor-dump", "--cutoff", "1", "--out", str(out))
    assert r.returncode == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "i,j,m,value"
    tensor = gns.assemble_tensor(gns.build_basis(1))
    assert len(lines) == 1 + tensor.nnz


def test_oracle_subcommand(tmp_path):
    cfg = tmp_path / "stokes.cfg"
    cfg.write_text(
        "nu = 0.5\nT = 0.5\ndt = 1e-3\ncutoff = 1\nic = beltrami:1\n"
        "forcing = exponential_decay:1.0:8.0:mode:1,0,0,1,cos\nnonlinear = off\nstride = 10\n"
    )
    out = tmp_path / "orc"
    r = run_cli("oracle", "--config", str(cfg), "--out-dir", str(out))
    assert r.returncode == 0, r.stderr
    assert (out / "trajectory.csv").exists()
    bad = tmp_path / "bad.cfg"
    bad.write_text(
        "nu = 0.5\nT = 0.5\ndt = 1e-3\ncutoff = 1\nic = beltrami:1\n"
        "forcing = constant:1.0:mode:1,0,0,1,cos\n"
    )
    assert run_cli("oracle", "--config", str(bad), "--out-dir", str(out)).returncode == 2


def test_manifest_echo_reproduces_run(tmp_path, fast_cfg):
    run1 = tmp_path / "r1"
    assert run_cli("simulate", "--config", str(fast_cfg), "--out-dir", str(run1)).returncode == 0
    manifest = json.loads((run1 / "manifest.json").read_text())
    echo_path = tmp_path / "echo.cfg"
    echo_path.write_text(manifest["config"])
    run2 = tmp_path / "r2"
    assert run_cli("simulate", "--config", str(echo_path), "--out-dir", str(run2)).returncode == 0
    assert (run1 / "trajectory.csv").read_bytes() == (run2 / "trajectory.csv").read_bytes()


def test_byte_identical_with_threads_env(tmp_path, fast_cfg):
    runs = []
    for name in ("d1", "d2"):
        out = tmp_path / name
        r = run_cli("simulate", "--config", str(fast_cfg), "--out-dir", str(out),
                    "--states", env={"GNS_THREADS": "1"})
        assert r.returncode == 0
        runs.append(out)
    assert (runs[0] / "trajectory.csv").read_bytes() == (runs[1] / "trajectory.csv").read_bytes()
    assert (runs[0] / "states.csv").read_bytes() == (runs[1] / "states.csv").read_bytes()


def test_bad_threads_env_exits_2(tmp_path, fast_cfg):
    r = run_cli("simulate", "--config", str(fast_cfg), "--out-dir", str(tmp_path / "o"),
                env={"GNS_THREADS": "zero"})
    assert r.returncode == 2


def test_main_in_process(tmp_path, fast_cfg, capsys):
    # exercise main() directly for coverage of the return-code paths
    assert main(["simulate", "--config", str(fast_cfg), "--out-dir", str(tmp_path / "m")]) == 0
    assert main(["verify", "--trajectory", str(tmp_path / "m" / "trajectory.csv"),
                 "--config", str(fast_cfg), "--report", str(tmp_path / "m" / "rep.json")]) == 0
    assert main(["simulate", "--config", str(tmp_path / "missing.cfg"),
                 "--out-dir", str(tmp_path)]) == 2
