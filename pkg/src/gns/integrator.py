"""Time integration of the Galerkin coefficient system.

The state obeys

    dc_m/dt = -nu * lambda_m * c_m - N_m(c) + f_m(t),

stiff on the viscous diagonal and quadratic through the triad tensor.
Stepping is integrating-factor Runge-Kutta 4: the diagonal part is
integrated exactly through exp(-nu lambda dt) factors and classical RK4
acts on the transformed variable, so with the nonlinearity and forcing
switched off the scheme reproduces exponential decay to rounding.

Trajectories record per-sample diagnostics (energy, enstrophy, L4 norm,
forcing data) plus running integrals of ||grad u||^2, ||f|| and
||grad u||^4 accumulated by the trapezoid rule on the sample grid; the
verifier module consumes exactly these.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np

from .basis import BasisSet, ModeIndex, build_basis
from .errors import DimensionError, DivergenceError
from .field import CoefficientVector, InitialCondition, norm_l4, project_initial
from .nonlinear import TriadTensor, assemble_tensor, nonlinear_term_raw


# ---------------------------------------------------------------------------
# forcing schedules


@dataclass(frozen=True)
class SingleModePattern:
    """Forcing concentrated on one basis mode, identified by (k, pol, parity)."""

    k: tuple[int, int, int]
    pol: int
    parity: int


@dataclass(frozen=True)
class BandPattern:
    """Seeded random pattern on all modes with |k|^2 <= max_shell, unit L2 norm."""

    max_shell: int
    seed: int | None = None


ForcingPattern = Union[SingleModePattern, BandPattern]


@dataclass(frozen=True)
class ZeroForcing:
    pass


@dataclass(frozen=True)
class ExponentialDecayForcing:
    """f(t) = amplitude * exp(-rate * t) * pattern with rate > 0.

    The forcing-norm accumulation integral is bounded uniformly in time
    by amplitude / rate, so the schedule keeps the forcing assumption
    satisfiable on arbitrarily long horizons.
    """

    amplitude: float
    rate: float
    pattern: ForcingPattern

    def __post_init__(self):
        if self.rate <= 0:
            raise ValueError(f"decay rate must be positive, got {self.rate}")


@dataclass(frozen=True)
class ConstantForcing:
    """f(t) = amplitude * pattern; accumulation grows linearly in the horizon."""

    amplitude: float
    pattern: ForcingPattern


ForcingSchedule = Union[ZeroForcing, ExponentialDecayForcing, ConstantForcing]


def _realize_pattern(pattern: ForcingPattern, basis: BasisSet, default_seed: int) -> np.ndarray:
    if isinstance(pattern, SingleModePattern):
        vec = np.zeros(basis.n)
        vec[basis.position(ModeIndex(tuple(pattern.k), pattern.pol, pattern.parity))] = 1.0
        return vec
    if isinstance(pattern, BandPattern):
        mask = basis.eigenvalues <= pattern.max_shell
        if not np.any(mask):
            raise ValueError(f"no modes with |k|^2 <= {pattern.max_shell} in basis")
        seed = pattern.seed if pattern.seed is not None else default_seed
        rng = np.random.default_rng(seed)
        vec = np.zeros(basis.n)
        vec[mask] = rng.standard_normal(int(np.count_nonzero(mask)))
        vec /= np.linalg.norm(vec)
        return vec
    raise TypeError(f"unknown forcing pattern {pattern!r}")


class RealizedForcing:
    """A forcing schedule bound to a basis; supplies f(t) and closed forms."""

    def __init__(self, schedule: ForcingSchedule, basis: BasisSet, default_seed: int = 0):
        self.schedule = schedule
        if isinstance(schedule, ZeroForcing):
            self.kind = "zero"
            self.pattern_vec = None
            self.amplitude = 0.0
            self.rate = None
        elif isinstance(schedule, ExponentialDecayForcing):
            self.kind = "exponential_decay"
            self.pattern_vec = _realize_pattern(schedule.pattern, basis, default_seed)
            self.amplitude = float(schedule.amplitude)
            self.rate = float(schedule.rate)
        elif isinstance(schedule, ConstantForcing):
            self.kind = "constant"
            self.pattern_vec = _realize_pattern(schedule.pattern, basis, default_seed)
            self.amplitude = float(schedule.amplitude)
            self.rate = None
        else:
            raise TypeError(f"unknown forcing schedule {schedule!r}")

    def vector(self, t: float) -> Optional[np.ndarray]:
        if self.kind == "zero":
            return None
        if self.kind == "exponential_decay":
            return (self.amplitude * math.exp(-self.rate * t)) * self.pattern_vec
        return self.amplitude * self.pattern_vec

    def norm(self, t: float) -> float:
        """||f(t)|| in L2 (patterns are unit vectors)."""
        if self.kind == "zero":
            return 0.0
        if self.kind == "exponential_decay":
            return abs(self.amplitude) * math.exp(-self.rate * t)
        return abs(self.amplitude)

    def accumulation_bound(self) -> Optional[float]:
        """Closed-form sup over all horizons of the accumulated forcing norm.

        None means the accumulation grows without bound as the horizon
        does (constant nonzero forcing).
        """
        if self.kind == "zero":
            return 0.0
        if self.kind == "exponential_decay":
            return abs(self.amplitude) / self.rate
        return 0.0 if self.amplitude == 0.0 else None

    @property
    def bounded_forever(self) -> bool:
        return self.accumulation_bound() is not None


# ---------------------------------------------------------------------------
# scenario configuration and trajectories


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to reproduce one simulation run."""

    nu: float
    horizon: float
    dt: float
    cutoff: int
    ic: InitialCondition
    forcing: ForcingSchedule = ZeroForcing()
    stride: int = 1
    seed: int = 0
    nonlinear: bool = True

    def __post_init__(self):
        if self.nu <= 0:
            raise ValueError(f"viscosity must be positive, got {self.nu}")
        if self.dt <= 0:
            raise ValueError(f"time step must be positive, got {self.dt}")
        if self.horizon <= 0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        if self.dt > self.horizon:
            raise ValueError(f"time step {self.dt} exceeds horizon {self.horizon}")
        if self.stride < 1:
            raise ValueError(f"sample stride must be >= 1, got {self.stride}")
        if self.cutoff < 1:
            raise ValueError(f"cutoff must be >= 1, got {self.cutoff}")


@dataclass
class Trajectory:
    """Sampled run: times, states, pointwise diagnostics, running integrals.

    ``states`` is (n_samples, n) with one coefficient vector per row; it
    may be None for trajectories rebuilt from a diagnostics-only CSV.
    Integrals are trapezoid accumulations over the recorded sample
    times, so their accuracy is governed by stride * dt.
    """

    times: np.ndarray
    states: Optional[np.ndarray]
    energy: np.ndarray          # E = ||u||^2
    grad2: np.ndarray           # ||grad u||^2
    l4: np.ndarray              # ||u||_L4
    fu: np.ndarray              # (f(t), u(t))
    f_norm: np.ndarray          # ||f(t)||
    int_grad2: np.ndarray
    int_f: np.ndarray
    int_grad4: np.ndarray
    config: Optional[ScenarioConfig]
    basis: Optional[BasisSet]

    @property
    def n_samples(self) -> int:
        return len(self.times)

    def state_at(self, sample: int) -> CoefficientVector:
        if self.states is None:
            raise ValueError("trajectory carries no state dump")
        return CoefficientVector(self.states[sample], self.basis)

    def final_state(self) -> CoefficientVector:
        return self.state_at(self.n_samples - 1)


def _cumtrapz(y: np.ndarray, t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(y)
    if len(t) > 1:
        out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(t))
    return out


# caches keyed by cutoff; contents are immutable, so concurrent reads are safe
_BASIS_CACHE: dict[int, BasisSet] = {}
_TENSOR_CACHE: dict[int, TriadTensor] = {}


def get_basis(cutoff: int) -> BasisSet:
    b = _BASIS_CACHE.get(cutoff)
    if b is None:
        b = build_basis(cutoff)
        _BASIS_CACHE[cutoff] = b
    return b


def get_tensor(cutoff: int) -> TriadTensor:
    t = _TENSOR_CACHE.get(cutoff)
    if t is None:
        t = assemble_tensor(get_basis(cutoff))
        _TENSOR_CACHE[cutoff] = t
    return t


class _StepContext:
    """Precomputed per-run data: exponential factors, tensor, forcing."""

    def __init__(self, config: ScenarioConfig, basis: BasisSet):
        self.nu = config.nu
        self.lam = basis.eigenvalues
        self.tensor = get_tensor(config.cutoff) if config.nonlinear else None
        self.forcing = RealizedForcing(config.forcing, basis, config.seed)
        self._dt = None
        self._e_half = None
        self._e_full = None

    def factors(self, dt: float):
        if dt != self._dt:
            self._dt = dt
            self._e_half = np.exp(-0.5 * self.nu * self.lam * dt)
            self._e_full = np.exp(-self.nu * self.lam * dt)
        return self._e_half, self._e_full

    def rhs(self, values: np.ndarray, t: float) -> np.ndarray:
        """Non-stiff right-hand side g = -N(c) + f(t)."""
        if self.tensor is not None:
            g = -nonlinear_term_raw(self.tensor, values)
        else:
            g = np.zeros_like(values)
        f = self.forcing.vector(t)
        if f is not None:
            g = g + f
        return g


# beyond this magnitude the quartic diagnostics overflow doubles, so the
# state is declared divergent while everything recorded is still finite
_DIVERGENCE_LIMIT = 1e75


def _diverged(values: np.ndarray) -> bool:
    return not np.all(np.isfinite(values)) or float(np.max(np.abs(values))) > _DIVERGENCE_LIMIT


def _step_raw(values: np.ndarray, t: float, dt: float, ctx: _StepContext) -> np.ndarray:
    e_half, e_full = ctx.factors(dt)
    g1 = ctx.rhs(values, t)
    u2 = e_half * (values + (0.5 * dt) * g1)
    g2 = ctx.rhs(u2, t + 0.5 * dt)
    u3 = e_half * values + (0.5 * dt) * g2
    g3 = ctx.rhs(u3, t + 0.5 * dt)
    u4 = e_full * values + dt * (e_half * g3)
    g4 = ctx.rhs(u4, t + dt)
    return e_full * values + (dt / 6.0) * (e_full * g1 + 2.0 * e_half * (g2 + g3) + g4)


def step(c: CoefficientVector, t: float, dt: float, config: ScenarioConfig) -> CoefficientVector:
    """One integrating-factor RK4 step from time t.

    Raises DivergenceError (naming t + dt) if the step produces a
    non-finite state.
    """
    basis = c.basis
    if basis.cutoff != config.cutoff:
        raise DimensionError(
            f"state cutoff {basis.cutoff} does not match config cutoff {config.cutoff}"
        )
    ctx = _StepContext(config, basis)
    with np.errstate(over="ignore", invalid="ignore"):
        out = _step_raw(c.values, t, dt, ctx)
    if _diverged(out):
        raise DivergenceError(t + dt)
    return CoefficientVector(out, basis)


def _sample_indices(n_steps: int, stride: int) -> list[int]:
    idx = list(range(0, n_steps + 1, stride))
    if idx[-1] != n_steps:
        idx.append(n_steps)
    return idx


def _assemble_trajectory(times, states, config, basis, forcing) -> Trajectory:
    times = np.asarray(times, dtype=float)
    states = np.asarray(states, dtype=float)
    energy = np.einsum("sj,sj->s", states, states)
    grad2 = states**2 @ basis.eigenvalues
    l4 = np.array([norm_l4(CoefficientVector(s, basis)) for s in states])
    f_norm = np.array([forcing.norm(t) for t in times])
    if forcing.kind == "zero":
        fu = np.zeros_like(times)
    else:
        fu = np.array([float(forcing.vector(t) @ s) for t, s in zip(times, states)])
    return Trajectory(
        times=times,
        states=states,
        energy=energy,
        grad2=grad2,
        l4=l4,
        fu=fu,
        f_norm=f_norm,
        int_grad2=_cumtrapz(grad2, times),
        int_f=_cumtrapz(f_norm, times),
        int_grad4=_cumtrapz(grad2**2, times),
        config=config,
        basis=basis,
    )


def simulate(config: ScenarioConfig) -> Trajectory:
    """Fixed-step march over [0, horizon], sampling every ``stride`` steps.

    The number of steps is round(horizon / dt); the final step is always
    sampled.  Deterministic: identical configs produce bitwise identical
    trajectories.  A non-finite state aborts with DivergenceError
    carrying the failure time and the partial trajectory up to the last
    finite sample.
    """
    basis = get_basis(config.cutoff)
    ctx = _StepContext(config, basis)
    c = project_initial(config.ic, basis, default_seed=config.seed).values.copy()

    n_steps = int(round(config.horizon / config.dt))
    n_steps = max(n_steps, 1)
    wanted = set(_sample_indices(n_steps, config.stride))

    times = [0.0]
    states = [c.copy()]
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, n_steps + 1):
            t_prev = (k - 1) * config.dt
            c = _step_raw(c, t_prev, config.dt, ctx)
            if _diverged(c):
                partial = _assemble_trajectory(times, states, config, basis, ctx.forcing)
                raise DivergenceError(k * config.dt, partial)
            if k in wanted:
                times.append(k * config.dt)
                states.append(c.copy())
    return _assemble_trajectory(times, states, config, basis, ctx.forcing)


def stokes_oracle(config: ScenarioConfig) -> Trajectory:
    """Closed-form trajectory of the linear (advection-free) system.

    Supports zero forcing and exponential-decay forcing on a single
    mode, where the forced coefficient follows the explicit relaxation
    integral; other schedules raise ValueError.  Sampling and the
    trapezoid accumulators match :func:`simulate` exactly, so residual
    checks against the oracle isolate quadrature error.
    """
    basis = get_basis(config.cutoff)
    forcing = RealizedForcing(config.forcing, basis, config.seed)
    if forcing.kind == "constant":
        raise ValueError("stokes_oracle supports zero or exponential-decay forcing only")
    if forcing.kind == "exponential_decay" and not isinstance(
        config.forcing.pattern, SingleModePattern
    ):
        raise ValueError("stokes_oracle requires a single-mode forcing pattern")

    c0 = project_initial(config.ic, basis, default_seed=config.seed).values
    n_steps = max(int(round(config.horizon / config.dt)), 1)
    sample_idx = _sample_indices(n_steps, config.stride)
    times = np.array([k * config.dt for k in sample_idx])

    lam = basis.eigenvalues
    decay = np.exp(-config.nu * np.outer(times, lam))
    states = decay * c0[None, :]
    if forcing.kind == "exponential_decay":
        p = config.forcing.pattern
        jf = basis.position(ModeIndex(tuple(p.k), p.pol, p.parity))
        a = forcing.amplitude
        r = forcing.rate
        s = config.nu * lam[jf]
        if abs(s - r) > 1e-13 * max(abs(s), abs(r), 1.0):
            duhamel = a * (np.exp(-r * times) - np.exp(-s * times)) / (s - r)
        else:
            duhamel = a * times * np.exp(-r * times)
        states[:, jf] += duhamel
    return _assemble_trajectory(times, states, config, basis, forcing)


# ---------------------------------------------------------------------------
# resolution refinement study


@dataclass
class RefinementRow:
    cutoff: int
    n: int
    coefficients: np.ndarray       # final-time coefficients on the shared low modes
    diff_from_prev: Optional[float]  # sup difference against the previous cutoff


@dataclass
class RefinementStudy:
    rows: list
    mode_labels: list


def refine_study(base_config: ScenarioConfig, cutoffs) -> RefinementStudy:
    """Run the same scenario at increasing cutoffs and difference the low modes.

    The comparison set is the full basis of the smallest cutoff; modes
    are matched by identity (k, pol, parity), which is stable across
    cutoffs.  The initial condition must be expressible at the smallest
    cutoff so every run starts from the same field.
    """
    cutoffs = [int(k) for k in cutoffs]
    if not cutoffs:
        raise ValueError("cutoff list is empty")
    if any(b <= a for a, b in zip(cutoffs, cutoffs[1:])):
        raise ValueError(f"cutoffs must be strictly increasing, got {cutoffs}")
    shared = get_basis(cutoffs[0]).modes
    labels = [
        f"k=({m.index.k[0]},{m.index.k[1]},{m.index.k[2]})|p{m.index.pol}|{('cos', 'sin')[m.index.parity]}"
        for m in shared
    ]
    rows = []
    prev = None
    for K in cutoffs:
        cfg = replace(base_config, cutoff=K)
        traj = simulate(cfg)
        b = traj.basis
        final = traj.states[-1]
        coeffs = np.array([final[b.position(m.index)] for m in shared])
        diff = None if prev is None else float(np.max(np.abs(coeffs - prev)))
        rows.append(RefinementRow(K, b.n, coeffs, diff))
        prev = coeffs
    return RefinementStudy(rows, labels)
