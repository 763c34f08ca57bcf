"""CSV and JSON artifacts: trajectories, state dumps, reports, manifests.

Floats are written with 17 significant digits so a read-back reproduces
the binary values exactly; identical runs therefore produce byte
identical files.  Trajectory files start with one ``#`` metadata line
describing the generating scenario, used by the verifier to cross-check
file/config consistency.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import CsvError
from .integrator import RealizedForcing, Trajectory, get_basis

TRAJECTORY_COLUMNS = "t,E,gradE,l4,int_grad2,int_f,int_grad4"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# trajectory CSV


def trajectory_metadata(traj: Trajectory, scenario_id: str = "") -> dict:
    cfg = traj.config
    return {
        "format": "gns-trajectory-v1",
        "cutoff": cfg.cutoff,
        "n": traj.basis.n,
        "nu": cfg.nu,
        "dt": cfg.dt,
        "stride": cfg.stride,
        "seed": cfg.seed,
        "nonlinear": "on" if cfg.nonlinear else "off",
        "scenario": scenario_id,
    }


def write_trajectory_csv(traj: Trajectory, path, scenario_id: str = "") -> None:
    meta = trajectory_metadata(traj, scenario_id)
    meta_line = "# " + ",".join(f"{k}={v}" for k, v in meta.items())
    with open(path, "w", encoding="ascii") as fh:
        fh.write(meta_line + "\n")
        fh.write(TRAJECTORY_COLUMNS + "\n")
        for s in range(traj.n_samples):
            row = (
                traj.times[s],
                traj.energy[s],
                traj.grad2[s],
                traj.l4[s],
                traj.int_grad2[s],
                traj.int_f[s],
                traj.int_grad4[s],
            )
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_trajectory_csv(path):
    """Parse a trajectory CSV; returns (metadata dict, column dict of arrays).

    Raises CsvError with the offending 1-based row number on any
    malformed content.
    """
    meta: dict = {}
    columns = TRAJECTORY_COLUMNS.split(",")
    data: list[list[float]] = []
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.readlines()
    body_seen = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            for part in line[1:].strip().split(","):
                if "=" in part:
                    k, v = part.split("=", 1)
                    meta[k.strip()] = v.strip()
            continue
        if not body_seen:
            if line != TRAJECTORY_COLUMNS:
                raise CsvError(
                    f"unexpected header {line!r}, want {TRAJECTORY_COLUMNS!r}", row=lineno
                )
            body_seen = True
            continue
        parts = line.split(",")
        if len(parts) != len(columns):
            raise CsvError(
                f"expected {len(columns)} fields, found {len(parts)}", row=lineno
            )
        try:
            data.append([float(p) for p in parts])
        except ValueError as exc:
            raise CsvError(f"non-numeric field: {exc}", row=lineno) from None
    if not body_seen or not data:
        raise CsvError("file contains no data rows", row=len(lines))
    arr = np.asarray(data)
    if np.any(np.diff(arr[:, 0]) <= 0):
        raise CsvError("sample times are not strictly increasing")
    return meta, {name: arr[:, i].copy() for i, name in enumerate(columns)}


# ---------------------------------------------------------------------------
# state dump CSV (long format t,j,c_j)


def write_states_csv(traj: Trajectory, path) -> None:
    if traj.states is None:
        raise ValueError("trajectory carries no states to dump")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("t,j,c_j\n")
        for s in range(traj.n_samples):
            t_str = _fmt(traj.times[s])
            for j in range(traj.states.shape[1]):
                fh.write(f"{t_str},{j},{_fmt(traj.states[s, j])}\n")


def read_states_csv(path, n_modes: int, times: np.ndarray) -> np.ndarray:
    """Rebuild the (n_samples, n) state matrix; validates shape and times."""
    rows: list[tuple[float, int, float]] = []
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.readlines()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if lineno == 1 or line == "t,j,c_j":
            if line != "t,j,c_j":
                raise CsvError(f"unexpected header {line!r}", row=lineno)
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise CsvError(f"expected 3 fields, found {len(parts)}", row=lineno)
        try:
            rows.append((float(parts[0]), int(parts[1]), float(parts[2])))
        except ValueError as exc:
            raise CsvError(f"non-numeric field: {exc}", row=lineno) from None
    if len(rows) != len(times) * n_modes:
        raise CsvError(
            f"state dump holds {len(rows)} entries, expected {len(times) * n_modes}"
        )
    states = np.zeros((len(times), n_modes))
    per_sample = n_modes
    for idx, (t, j, value) in enumerate(rows):
        s = idx // per_sample
        if j != idx % per_sample:
            raise CsvError(f"mode index out of order at entry {idx}")
        if abs(t - times[s]) > 1e-9 * max(1.0, abs(times[s])):
            raise CsvError(f"state time {t} does not match trajectory time {times[s]}")
        states[s, j] = value
    return states


def rebuild_trajectory(meta: dict, cols: dict, config, states=None) -> Trajectory:
    """Reconstruct a Trajectory from CSV columns plus the generating config."""
    basis = get_basis(config.cutoff)
    times = cols["t"]
    forcing = RealizedForcing(config.forcing, basis, config.seed)
    if forcing.kind != "zero" and states is not None:
        fu = np.array([float(forcing.vector(float(t)) @ s) for t, s in zip(times, states)])
    else:
        fu = np.zeros_like(times)
    f_norm_vals = np.array([forcing.norm(float(t)) for t in times])
    return Trajectory(
        times=times,
        states=states,
        energy=cols["E"],
        grad2=cols["gradE"],
        l4=cols["l4"],
        fu=fu,
        f_norm=f_norm_vals,
        int_grad2=cols["int_grad2"],
        int_f=cols["int_f"],
        int_grad4=cols["int_grad4"],
        config=config,
        basis=basis,
    )


# ---------------------------------------------------------------------------
# separation, report, manifest, convergence


def write_separation_csv(series, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write("t,phi,envelope,ratio\n")
        for t, p, e, r in zip(series.times, series.phi, series.envelope, series.ratio):
            fh.write(f"{_fmt(t)},{_fmt(p)},{_fmt(e)},{_fmt(r)}\n")


def write_report_json(reports, path) -> None:
    payload = [r.to_dict() for r in reports]
    with open(path, "w", encoding="ascii") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def write_convergence_csv(study, path, max_listed: int = 16) -> None:
    listed = min(max_listed, len(study.mode_labels))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("# modes: " + "; ".join(study.mode_labels[:listed]) + "\n")
        header = "cutoff,n,sup_diff_prev," + ",".join(f"c{j:02d}" for j in range(listed))
        fh.write(header + "\n")
        for row in study.rows:
            diff = "" if row.diff_from_prev is None else _fmt(row.diff_from_prev)
            coeffs = ",".join(_fmt(v) for v in row.coefficients[:listed])
            fh.write(f"{row.cutoff},{row.n},{diff},{coeffs}\n")


@dataclass
class RunManifest:
    """Provenance record for one CLI invocation."""

    scenario_id: str
    config_echo: str
    tool_version: str
    seed: int
    outputs: list
    duration_s: float
    status: str = "ok"
    failure_time: float | None = None
    extra: dict = dc_field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {
            "scenario_id": self.scenario_id,
            "config": self.config_echo,
            "tool_version": self.tool_version,
            "seed": self.seed,
            "outputs": [str(p) for p in self.outputs],
            "duration_s": self.duration_s,
            "status": self.status,
        }
        if self.failure_time is not None:
            d["failure_time"] = self.failure_time
        d.update(self.extra)
        return d


def write_manifest(manifest: RunManifest, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        json.dump(manifest.to_dict(), fh, indent=2)
        fh.write("\n")


class StopWatch:
    def __init__(self):
        self.t0 = time.perf_counter()

    def seconds(self) -> float:
        return time.perf_counter() - self.t0
