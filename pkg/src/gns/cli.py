"""Command line interface.

Subcommands: simulate, verify, twin, refine, basis-info, tensor-dump,
oracle.  Scenario files are flat ``key = value`` text (keys: nu, T, dt,
cutoff, ic, forcing, stride, seed, nonlinear).  Exit codes: 0 success /
all checks satisfied, 1 verification failure, 2 usage or configuration
error, 3 numerical divergence (partial outputs are still written).

The environment variable GNS_THREADS caps internal parallelism; the
default of 1 keeps every kernel single threaded and all outputs bitwise
deterministic.  No current kernel exceeds one thread.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .basis import PARITY_NAMES, build_basis
from .errors import ConfigError, CsvError, DimensionError, DivergenceError
from .field import (
    BeltramiShell,
    ExplicitCoefficients,
    RandomBand,
    TaylorGreen,
)
from .integrator import (
    BandPattern,
    ConstantForcing,
    ExponentialDecayForcing,
    ScenarioConfig,
    SingleModePattern,
    ZeroForcing,
    get_basis,
    get_tensor,
    refine_study,
    simulate,
    stokes_oracle,
)
from .io import (
    RunManifest,
    StopWatch,
    read_states_csv,
    read_trajectory_csv,
    rebuild_trajectory,
    write_convergence_csv,
    write_manifest,
    write_report_json,
    write_separation_csv,
    write_states_csv,
    write_trajectory_csv,
)
from .verifier import (
    apriori_bound,
    assumption_A,
    energy_identity,
    interpolation_check,
    ladyzhenskaya_ratio,
    parseval_sup,
    twin_uniqueness,
    weak_residual,
)

_PARITY_BY_NAME = {"cos": 0, "sin": 1}


# ---------------------------------------------------------------------------
# scenario file parsing and echoing


def parse_ic(text: str, line: int | None = None):
    parts = text.split(":")
    kind = parts[0]
    try:
        if kind == "taylor_green" and len(parts) == 1:
            return TaylorGreen()
        if kind == "beltrami" and len(parts) in (2, 3):
            amp = float(parts[2]) if len(parts) == 3 else 1.0
            return BeltramiShell(shell=int(parts[1]), amplitude=amp)
        if kind == "random_band" and len(parts) in (2, 3):
            amp = float(parts[2]) if len(parts) == 3 else 1.0
            return RandomBand(max_shell=int(parts[1]), amplitude=amp)
        if kind == "explicit" and len(parts) == 2:
            values = [float(v) for v in Path(parts[1]).read_text().split()]
            return ExplicitCoefficients(tuple(values))
    except (ValueError, OSError) as exc:
        raise ConfigError(f"bad initial condition {text!r}: {exc}", line=line) from None
    raise ConfigError(
        f"unknown initial condition {text!r} "
        "(want taylor_green | beltrami:<shell>[:amp] | random_band:<max_shell>[:amp] "
        "| explicit:<path>)",
        line=line,
    )


def parse_pattern(text: str, line: int | None = None):
    if text.startswith("mode:"):
        fields = text[len("mode:") :].split(",")
        if len(fields) != 5:
            raise ConfigError(f"mode pattern needs kx,ky,kz,pol,parity: {text!r}", line=line)
        try:
            k = (int(fields[0]), int(fields[1]), int(fields[2]))
            pol = int(fields[3])
            parity = _PARITY_BY_NAME[fields[4]]
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"bad mode pattern {text!r}: {exc}", line=line) from None
        return SingleModePattern(k, pol, parity)
    if text.startswith("band:"):
        try:
            return BandPattern(max_shell=int(text[len("band:") :]))
        except ValueError as exc:
            raise ConfigError(f"bad band pattern {text!r}: {exc}", line=line) from None
    raise ConfigError(f"unknown forcing pattern {text!r}", line=line)


def parse_forcing(text: str, line: int | None = None):
    if text == "zero":
        return ZeroForcing()
    parts = text.split(":", 3)
    kind = parts[0]
    try:
        if kind == "exponential_decay" and len(parts) == 4:
            return ExponentialDecayForcing(
                amplitude=float(parts[1]),
                rate=float(parts[2]),
                pattern=parse_pattern(parts[3], line),
            )
        if kind == "constant" and len(parts) == 3:
            return ConstantForcing(amplitude=float(parts[1]), pattern=parse_pattern(parts[2], line))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad forcing {text!r}: {exc}", line=line) from None
    raise ConfigError(
        f"unknown forcing {text!r} (want zero | exponential_decay:<amp>:<rate>:<pattern> "
        "| constant:<amp>:<pattern>)",
        line=line,
    )


_CONFIG_KEYS = ("nu", "T", "dt", "cutoff", "ic", "forcing", "stride", "seed", "nonlinear")


def parse_config_text(text: str) -> ScenarioConfig:
    """Parse flat key=value scenario text; errors carry line numbers."""
    raw: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"expected key=value, got {stripped!r}", line=lineno)
        key, value = stripped.split("=", 1)
        key = key.strip()
        value = value.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"unknown key {key!r}", line=lineno)
        if key in raw:
            raise ConfigError(f"duplicate key {key!r}", line=lineno)
        raw[key] = (value, lineno)

    def need(key):
        if key not in raw:
            raise ConfigError(f"missing required key {key!r}")
        return raw[key]

    def number(key, conv):
        value, lineno = need(key)
        try:
            return conv(value)
        except ValueError:
            raise ConfigError(f"bad value for {key}: {value!r}", line=lineno) from None

    nu = number("nu", float)
    horizon = number("T", float)
    dt = number("dt", float)
    cutoff = number("cutoff", int)
    ic = parse_ic(*need("ic"))
    if "forcing" in raw:
        forcing = parse_forcing(*raw["forcing"])
    else:
        forcing = ZeroForcing()
    stride = int(raw["stride"][0]) if "stride" in raw else 1
    seed = int(raw["seed"][0]) if "seed" in raw else 0
    nonlinear = True
    if "nonlinear" in raw:
        value, lineno = raw["nonlinear"]
        if value not in ("on", "off"):
            raise ConfigError(f"nonlinear must be on or off, got {value!r}", line=lineno)
        nonlinear = value == "on"
    try:
        return ScenarioConfig(
            nu=nu,
            horizon=horizon,
            dt=dt,
            cutoff=cutoff,
            ic=ic,
            forcing=forcing,
            stride=stride,
            seed=seed,
            nonlinear=nonlinear,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> ScenarioConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text)


def ic_to_text(ic) -> str:
    if isinstance(ic, TaylorGreen):
        return "taylor_green"
    if isinstance(ic, BeltramiShell):
        return f"beltrami:{ic.shell}:{ic.amplitude:g}"
    if isinstance(ic, RandomBand):
        return f"random_band:{ic.max_shell}:{ic.amplitude:g}"
    if isinstance(ic, ExplicitCoefficients):
        return f"explicit:<{len(tuple(ic.values))} inline values>"
    raise TypeError(f"unknown ic {ic!r}")


def pattern_to_text(p) -> str:
    if isinstance(p, SingleModePattern):
        return f"mode:{p.k[0]},{p.k[1]},{p.k[2]},{p.pol},{PARITY_NAMES[p.parity]}"
    if isinstance(p, BandPattern):
        return f"band:{p.max_shell}"
    raise TypeError(f"unknown pattern {p!r}")


def forcing_to_text(f) -> str:
    if isinstance(f, ZeroForcing):
        return "zero"
    if isinstance(f, ExponentialDecayForcing):
        return f"exponential_decay:{f.amplitude:g}:{f.rate:g}:{pattern_to_text(f.pattern)}"
    if isinstance(f, ConstantForcing):
        return f"constant:{f.amplitude:g}:{pattern_to_text(f.pattern)}"
    raise TypeError(f"unknown forcing {f!r}")


def config_to_text(config: ScenarioConfig) -> str:
    """Canonical echo; feeding it back to the parser reproduces the run."""
    return "\n".join(
        [
            f"nu = {config.nu:.17g}",
            f"T = {config.horizon:.17g}",
            f"dt = {config.dt:.17g}",
            f"cutoff = {config.cutoff}",
            f"ic = {ic_to_text(config.ic)}",
            f"forcing = {forcing_to_text(config.forcing)}",
            f"stride = {config.stride}",
            f"seed = {config.seed}",
            f"nonlinear = {'on' if config.nonlinear else 'off'}",
        ]
    )


def scenario_id(config: ScenarioConfig) -> str:
    return hashlib.sha256(config_to_text(config).encode()).hexdigest()[:12]


# ---------------------------------------------------------------------------
# subcommand implementations


def _threads_from_env() -> int:
    raw = os.environ.get("GNS_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"GNS_THREADS must be an integer, got {raw!r}") from None
    if value < 1:
        raise ConfigError(f"GNS_THREADS must be >= 1, got {value}")
    return value


def cmd_simulate(args) -> int:
    watch = StopWatch()
    config = load_config(args.config)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    traj_path = out_dir / "trajectory.csv"
    manifest_path = out_dir / "manifest.json"
    sid = scenario_id(config)
    outputs = [traj_path]
    try:
        traj = simulate(config)
    except DivergenceError as exc:
        status = f"diverged at t={exc.time:.6g}"
        if exc.partial is not None:
            write_trajectory_csv(exc.partial, traj_path, sid)
            if args.states:
                states_path = out_dir / "states.csv"
                write_states_csv(exc.partial, states_path)
                outputs.append(states_path)
        outputs.append(manifest_path)
        manifest = RunManifest(
            scenario_id=sid,
            config_echo=config_to_text(config),
            tool_version=__version__,
            seed=config.seed,
            outputs=outputs,
            duration_s=watch.seconds(),
            status="diverged",
            failure_time=exc.time,
        )
        write_manifest(manifest, manifest_path)
        print(status, file=sys.stderr)
        return 3
    write_trajectory_csv(traj, traj_path, sid)
    if args.states:
        states_path = out_dir / "states.csv"
        write_states_csv(traj, states_path)
        outputs.append(states_path)
    outputs.append(manifest_path)
    manifest = RunManifest(
        scenario_id=sid,
        config_echo=config_to_text(config),
        tool_version=__version__,
        seed=config.seed,
        outputs=outputs,
        duration_s=watch.seconds(),
    )
    write_manifest(manifest, manifest_path)
    print(f"wrote {traj_path} ({traj.n_samples} samples)")
    return 0


def _verify_reports(traj, eps_values=(0.1, 1.0, 10.0)):
    reports = []
    reports += energy_identity(traj)
    reports += apriori_bound(traj)
    reports.append(parseval_sup(traj))
    reports.append(assumption_A(traj))
    if traj.states is not None:
        # states present: per-state interpolation checks and the weak residual
        energy = np.einsum("sj,sj->s", traj.states, traj.states)
        consistency = float(np.max(np.abs(energy - traj.energy)))
        scale = max(float(np.max(energy)), 1e-300)
        from .verifier import BoundReport

        reports.append(
            BoundReport("state_energy_consistency", consistency, 1e-9 * scale)
        )
        worst = None
        for s in range(traj.n_samples):
            c = traj.state_at(s)
            if float(np.linalg.norm(c.values)) == 0.0:
                continue
            rep = ladyzhenskaya_ratio(c)
            rep.t = float(traj.times[s])
            if worst is None or rep.lhs > worst.lhs:
                worst = rep
            for eps in eps_values:
                rep_eps = interpolation_check(c, eps)
                if not rep_eps.satisfied:
                    rep_eps.t = float(traj.times[s])
                    reports.append(rep_eps)
        if worst is not None:
            reports.append(worst)
        _, residual_report = weak_residual(traj)
        reports.append(residual_report)
    return reports


def cmd_verify(args) -> int:
    config = load_config(args.config)
    meta, cols = read_trajectory_csv(args.trajectory)
    if "cutoff" in meta and int(meta["cutoff"]) != config.cutoff:
        raise ConfigError(
            f"trajectory cutoff {meta['cutoff']} does not match config cutoff {config.cutoff}"
        )
    if "nu" in meta and abs(float(meta["nu"]) - config.nu) > 1e-12 * max(1.0, config.nu):
        raise ConfigError(
            f"trajectory nu {meta['nu']} does not match config nu {config.nu}"
        )
    states = None
    if args.states:
        basis = get_basis(config.cutoff)
        states = read_states_csv(args.states, basis.n, cols["t"])
    forcing_is_zero = isinstance(config.forcing, ZeroForcing)
    if not forcing_is_zero and states is None:
        raise ConfigError(
            "forced scenarios need --states to reconstruct (f, u) for the energy identity"
        )
    traj = rebuild_trajectory(meta, cols, config, states)
    reports = _verify_reports(traj)
    report_path = Path(args.report)
    write_report_json(reports, report_path)
    bad = [r for r in reports if not r.satisfied]
    print(f"wrote {report_path}: {len(reports)} checks, {len(bad)} failed")
    for r in bad:
        print(f"FAILED {r.name} lhs={r.lhs:.6g} rhs={r.rhs:.6g} t={r.t}", file=sys.stderr)
    return 0 if not bad else 1


def cmd_twin(args) -> int:
    watch = StopWatch()
    config = load_config(args.config)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    series, reports = twin_uniqueness(config, args.delta, seed=args.seed)
    sep_path = out_dir / "separation.csv"
    report_path = out_dir / "report.json"
    write_separation_csv(series, sep_path)
    write_report_json(reports, report_path)
    manifest = RunManifest(
        scenario_id=scenario_id(config),
        config_echo=config_to_text(config),
        tool_version=__version__,
        seed=args.seed,
        outputs=[sep_path, report_path],
        duration_s=watch.seconds(),
        extra={"delta": args.delta},
    )
    write_manifest(manifest, out_dir / "manifest.json")
    envelope_ok = all(r.satisfied for r in reports if r.name == "gronwall_envelope")
    print(f"wrote {sep_path}; envelope {'respected' if envelope_ok else 'VIOLATED'}")
    return 0 if envelope_ok else 1


def cmd_refine(args) -> int:
    config = load_config(args.config)
    cutoffs = [int(v) for v in args.cutoffs.split(",") if v.strip()]
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        study = refine_study(config, cutoffs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    path = out_dir / "convergence.csv"
    write_convergence_csv(study, path)
    print(f"wrote {path} ({len(study.rows)} cutoffs)")
    return 0


def cmd_basis_info(args) -> int:
    try:
        basis = build_basis(args.cutoff)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    lines = ["j,kx,ky,kz,pol,parity,lambda"]
    for j, mode in enumerate(basis.modes):
        k = mode.index.k
        lines.append(
            f"{j},{k[0]},{k[1]},{k[2]},{mode.index.pol},"
            f"{PARITY_NAMES[mode.index.parity]},{mode.lam:.17g}"
        )
    _emit(lines, args.out)
    return 0


def cmd_tensor_dump(args) -> int:
    try:
        tensor = get_tensor(args.cutoff)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    lines = ["i,j,m,value"]
    for i, j, m, v in zip(tensor.i, tensor.j, tensor.m, tensor.values):
        lines.append(f"{i},{j},{m},{v:.17g}")
    _emit(lines, args.out)
    return 0


def cmd_oracle(args) -> int:
    watch = StopWatch()
    config = load_config(args.config)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        traj = stokes_oracle(config)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    traj_path = out_dir / "trajectory.csv"
    write_trajectory_csv(traj, traj_path, scenario_id(config))
    if args.states:
        write_states_csv(traj, out_dir / "states.csv")
    manifest = RunManifest(
        scenario_id=scenario_id(config),
        config_echo=config_to_text(config),
        tool_version=__version__,
        seed=config.seed,
        outputs=[traj_path],
        duration_s=watch.seconds(),
        extra={"kind": "stokes_oracle"},
    )
    write_manifest(manifest, out_dir / "manifest.json")
    print(f"wrote {traj_path} ({traj.n_samples} samples, closed form)")
    return 0


def _emit(lines, out_path) -> None:
    text = "\n".join(lines) + "\n"
    if out_path:
        Path(out_path).write_text(text, encoding="ascii")
        print(f"wrote {out_path} ({len(lines) - 1} rows)")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gns",
        description="Spectral Galerkin Navier-Stokes solver and estimate certifier",
    )
    parser.add_argument("--version", action="version", version=f"gns {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate a scenario and write trajectory.csv")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--states", action="store_true", help="also dump states.csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="certify every estimate on a stored trajectory")
    p.add_argument("--trajectory", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--states", default=None, help="states.csv for state-level checks")
    p.add_argument("--report", default="report.json")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("twin", help="twin-solution separation experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_twin)

    p = sub.add_parser("refine", help="resolution refinement study")
    p.add_argument("--config", required=True)
    p.add_argument("--cutoffs", required=True, help="comma separated, increasing")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("basis-info", help="print the mode table as CSV")
    p.add_argument("--cutoff", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_basis_info)

    p = sub.add_parser("tensor-dump", help="dump triad tensor entries as CSV")
    p.add_argument("--cutoff", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_tensor_dump)

    p = sub.add_parser("oracle", help="closed-form linear trajectory for cross-checks")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--states", action="store_true")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _threads_from_env()
        return args.func(args)
    except (ConfigError, CsvError, DimensionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
