"""Picard fixed-point iteration coupling the two propagators.

One sweep of the iteration map takes a trajectory iterate (psi, A) to

    psi' = homogeneous magnetic evolution of psi0 under the input A
    A'   = forced wave evolution of (A0, A1) under the source built
           from the input trajectory's own currents

so a fixed point solves the coupled system self-consistently.  Distances
between iterates are measured in the composite metric

    d = max( ||dpsi||_{Linf L2}, ||dA||_{Linf H^1/2}, ||dA||_{L4 L4} )

and the iteration starts from the time-frozen initial data.  A horizon on
which the map fails to contract is rejected rather than forced; the adaptive
driver halves the horizon and, optionally, chains solved segments.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .errors import HorizonTooLarge, IterationLimitExceeded
from .fields import FieldState, PhysicalParams, TrajectoryPair, WaveFunction, _atomic_write
from .klein_gordon import kg_propagate_all, kg_source
from .schrodinger import CoulombSpec, MagneticHamiltonian, StepperConfig, evolve_schrodinger
from .spectral import ScalarField, VectorField, lebesgue_norm, sobolev_norm, spacetime_norm

__all__ = [
    "PicardConfig",
    "InitialData",
    "ZMetricReport",
    "PicardLogEntry",
    "AdaptiveResult",
    "z_metric",
    "phi_map",
    "picard_solve",
    "adaptive_horizon",
    "write_convergence_csv",
]

CONVERGENCE_SCHEMA = "msfield-convergence-v1"


@dataclass(frozen=True)
class PicardConfig:
    """Iteration controls for one horizon."""

    T: float
    n_t: int
    tol: float = 1e-8
    max_iters: int = 50
    contraction_guard: float = 0.9
    horizon_shrink: float = 0.5
    min_horizon: "float | None" = None
    radius_psi: "float | None" = None
    radius_field: "float | None" = None

    def __post_init__(self) -> None:
        if not (self.T > 0 and np.isfinite(self.T)):
            raise ValueError(f"horizon T must be positive, got {self.T}")
        if self.n_t < 2:
            raise ValueError(f"need at least two time nodes, got n_t = {self.n_t}")
        if not (0 < self.tol < 1):
            raise ValueError(f"tolerance must be in (0, 1), got {self.tol}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if not (0 < self.contraction_guard < 1):
            raise ValueError(f"contraction guard must be in (0, 1), got {self.contraction_guard}")
        if not (0 < self.horizon_shrink < 1):
            raise ValueError(f"horizon shrink must be in (0, 1), got {self.horizon_shrink}")


@dataclass(frozen=True)
class InitialData:
    """Cauchy data for the coupled system."""

    psi0: WaveFunction
    A0: VectorField
    A1: VectorField

    def __post_init__(self) -> None:
        if self.A0.grid != self.A1.grid:
            raise ValueError("A0 and A1 must share a grid")
        if self.psi0.grid.points != self.A0.grid.points or self.psi0.grid.length != self.A0.grid.length:
            raise ValueError("wavefunction and field grids must share points and length")


@dataclass(frozen=True)
class ZMetricReport:
    """Componentwise distance between two trajectories."""

    d_psi: float
    d_A_half: float
    d_A_44: float

    @property
    def d(self) -> float:
        return max(self.d_psi, self.d_A_half, self.d_A_44)


@dataclass(frozen=True)
class PicardLogEntry:
    """One iteration record; ratio is None on the first row."""

    iteration: int
    d: float
    d_psi: float
    d_A_half: float
    d_A_44: float
    ratio: "float | None"
    wall_time: float


@dataclass(frozen=True)
class AdaptiveResult:
    """Outcome of the horizon-adaptive driver."""

    T_used: float
    trajectory: TrajectoryPair
    logs: tuple[tuple[PicardLogEntry, ...], ...]
    shrink_events: int

    @property
    def log(self) -> tuple[PicardLogEntry, ...]:
        return self.logs[-1]


def z_metric(traj_a: TrajectoryPair, traj_b: TrajectoryPair) -> ZMetricReport:
    """Composite trajectory distance; trajectories must share time and space grids."""
    if traj_a.n_nodes != traj_b.n_nodes or not np.allclose(traj_a.times, traj_b.times, rtol=1e-12, atol=0.0):
        raise ValueError("trajectories must share the time grid")
    psi_grid = traj_a.psi_grid
    diffs_psi = [ScalarField(psi_grid, a.values - b.values) for a, b in zip(traj_a.psis, traj_b.psis)]
    diffs_a = [a.A - b.A for a, b in zip(traj_a.fields, traj_b.fields)]
    d_psi = spacetime_norm(traj_a.times, diffs_psi, np.inf, 0.0, 2.0)
    d_half = spacetime_norm(traj_a.times, diffs_a, np.inf, 0.5, 2.0)
    d_44 = spacetime_norm(traj_a.times, diffs_a, 4.0, 0.0, 4.0)
    return ZMetricReport(d_psi, d_half, d_44)


def frozen_trajectory(init: InitialData, times: np.ndarray) -> TrajectoryPair:
    """Starting iterate: initial data held constant across the time grid."""
    times = np.asarray(times, dtype=float)
    state = FieldState(init.A0, init.A1)
    return TrajectoryPair(times, (init.psi0,) * times.size, (state,) * times.size)


def phi_map(
    traj: TrajectoryPair,
    init: InitialData,
    params: PhysicalParams,
    coulomb: "CoulombSpec | None" = None,
    stepper: StepperConfig = StepperConfig(),
    ham: "MagneticHamiltonian | None" = None,
) -> TrajectoryPair:
    """One sweep of the iteration map."""
    source = kg_source(traj, params)
    fields = kg_propagate_all(init.A0, init.A1, source, traj.times, params.c)
    psis = evolve_schrodinger(
        init.psi0, traj.a_samples(), traj.times, params, coulomb, stepper, ham=ham
    )
    return TrajectoryPair(traj.times, tuple(psis), tuple(fields))


def _monitor_radii(traj: TrajectoryPair, config: PicardConfig) -> list[str]:
    """Norm-ball monitors; informative only, never enforced."""
    warnings = []
    if config.radius_psi is not None:
        worst = max(sobolev_norm(p, 2.0) for p in traj.psis)
        if worst > config.radius_psi:
            warnings.append(f"psi H^2 norm {worst:.6g} exceeded the monitor radius {config.radius_psi:.6g}")
    if config.radius_field is not None:
        worst = 0.0
        for state in traj.fields:
            worst = max(
                worst,
                sobolev_norm(state.A, 1.0),
                lebesgue_norm(state.A, 4.0),
                lebesgue_norm(state.Adot, 4.0),
            )
        if worst > config.radius_field:
            warnings.append(f"field norm {worst:.6g} exceeded the monitor radius {config.radius_field:.6g}")
    return warnings


def picard_solve(
    init: InitialData,
    params: PhysicalParams,
    config: PicardConfig,
    coulomb: "CoulombSpec | None" = None,
    stepper: StepperConfig = StepperConfig(),
    start: "TrajectoryPair | None" = None,
    t_start: float = 0.0,
) -> tuple[TrajectoryPair, list[PicardLogEntry], list[str]]:
    """Iterate the map on one horizon until the distance drops below tolerance.

    Returns (trajectory, log, warnings). Raises HorizonTooLarge after three
    consecutive distance ratios above the contraction guard (or any
    non-finite distance), IterationLimitExceeded when the budget runs out.
    """
    times = t_start + np.linspace(0.0, config.T, config.n_t + 1)
    ham = MagneticHamiltonian(init.psi0.grid, params, coulomb)
    current = start if start is not None else frozen_trajectory(init, times)
    log: list[PicardLogEntry] = []
    warnings: list[str] = []
    previous_d: "float | None" = None
    guard_strikes = 0
    for iteration in range(1, config.max_iters + 1):
        tic = time.perf_counter()
        candidate = phi_map(current, init, params, coulomb, stepper, ham=ham)
        report = z_metric(candidate, current)
        wall = time.perf_counter() - tic
        ratio = None if previous_d is None or previous_d == 0.0 else report.d / previous_d
        log.append(
            PicardLogEntry(iteration, report.d, report.d_psi, report.d_A_half, report.d_A_44, ratio, wall)
        )
        warnings.extend(_monitor_radii(candidate, config))
        if not np.isfinite(report.d):
            raise HorizonTooLarge(
                f"iteration diverged (non-finite distance) at iteration {iteration}", log
            )
        if report.d <= config.tol:
            return candidate, log, warnings
        if ratio is not None and ratio > config.contraction_guard:
            guard_strikes += 1
            if guard_strikes >= 3:
                raise HorizonTooLarge(
                    f"distance ratio exceeded {config.contraction_guard} on three consecutive "
                    f"iterations (last ratio {ratio:.4g}); the horizon T = {config.T:.6g} is too large",
                    log,
                )
        else:
            guard_strikes = 0
        current = candidate
        previous_d = report.d
    raise IterationLimitExceeded(
        f"no convergence to {config.tol} within {config.max_iters} iterations (last d = {log[-1].d:.4g})",
        log,
    )


def _concatenate(segments: list[TrajectoryPair]) -> TrajectoryPair:
    """Join segments that share junction nodes into one trajectory."""
    times = [segments[0].times]
    psis = list(segments[0].psis)
    fields = list(segments[0].fields)
    for seg in segments[1:]:
        if abs(seg.times[0] - times[-1][-1]) > 1e-9 * max(1.0, abs(seg.times[0])):
            raise ValueError("segments do not share a junction node")
        times.append(seg.times[1:])
        psis.extend(seg.psis[1:])
        fields.extend(seg.fields[1:])
    return TrajectoryPair(np.concatenate(times), tuple(psis), tuple(fields))


def adaptive_horizon(
    init: InitialData,
    params: PhysicalParams,
    config: PicardConfig,
    coulomb: "CoulombSpec | None" = None,
    stepper: StepperConfig = StepperConfig(),
    continuation: bool = False,
) -> AdaptiveResult:
    """Solve on the largest workable horizon, shrinking after each rejection.

    The node spacing dt = T / n_t is preserved across shrinks (the horizon is
    shortened by dropping nodes), so stitched trajectories stay uniform.  With
    ``continuation`` the solved segment's terminal data seed further segments
    until the requested total time is covered. Raises HorizonTooLarge once the
    horizon falls below the floor (min_horizon, default T / 1024).
    """
    floor = config.min_horizon if config.min_horizon is not None else config.T / 1024.0
    dt = config.T / config.n_t
    total_nodes = config.n_t
    segments: list[TrajectoryPair] = []
    logs: list[tuple[PicardLogEntry, ...]] = []
    shrink_events = 0
    done_nodes = 0
    seg_init = init
    horizon_nodes = config.n_t
    t_used = config.T
    while done_nodes < total_nodes:
        remaining = total_nodes - done_nodes
        n_t = min(horizon_nodes, remaining)
        if n_t < 2:
            raise HorizonTooLarge(
                f"cannot cover the remaining {remaining * dt:.6g} with horizon {horizon_nodes * dt:.6g} "
                "while keeping at least two intervals per segment"
            )
        seg_config = PicardConfig(
            T=n_t * dt,
            n_t=n_t,
            tol=config.tol,
            max_iters=config.max_iters,
            contraction_guard=config.contraction_guard,
            horizon_shrink=config.horizon_shrink,
            min_horizon=config.min_horizon,
            radius_psi=config.radius_psi,
            radius_field=config.radius_field,
        )
        try:
            traj, log, _ = picard_solve(seg_init, params, seg_config, coulomb, stepper, t_start=done_nodes * dt)
        except HorizonTooLarge as err:
            shrink_events += 1
            horizon_nodes = max(2, int(np.floor(n_t * config.horizon_shrink)))
            if horizon_nodes * dt < floor or (horizon_nodes == n_t):
                raise HorizonTooLarge(
                    f"horizon fell below the floor {floor:.6g} after {shrink_events} shrink event(s)",
                    err.log,
                ) from err
            continue
        segments.append(traj)
        logs.append(tuple(log))
        done_nodes += n_t
        t_used = n_t * dt
        if not continuation:
            break
        seg_init = InitialData(traj.psis[-1], traj.fields[-1].A, traj.fields[-1].Adot)
    trajectory = _concatenate(segments) if len(segments) > 1 else segments[0]
    return AdaptiveResult(t_used, trajectory, tuple(logs), shrink_events)


def write_convergence_csv(path: str, log, segment_boundaries: "list[int] | None" = None) -> None:
    """Convergence log as CSV with a schema-version header comment.

    The wall_time column is environment-dependent by nature and is the one
    column exempt from bit-level reproducibility.
    """
    lines = [f"# {CONVERGENCE_SCHEMA}", "iteration,d,d_psi,d_A_half,d_A_44,ratio,wall_time"]
    entries = list(log)
    boundaries = set(segment_boundaries or [])
    for pos, entry in enumerate(entries):
        if pos in boundaries:
            lines.append(f"# segment boundary at entry {pos}")
        ratio = "" if entry.ratio is None else repr(float(entry.ratio))
        lines.append(
            f"{entry.iteration},{float(entry.d)!r},{float(entry.d_psi)!r},{float(entry.d_A_half)!r},"
            f"{float(entry.d_A_44)!r},{ratio},{float(entry.wall_time)!r}"
        )
    payload = ("\n".join(lines) + "\n").encode()
    _atomic_write(path, payload)
