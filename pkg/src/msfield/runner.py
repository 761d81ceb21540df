"""End-to-end scenario driver: config in, CSV tables (and snapshots) out.

Validation happens before anything touches the filesystem, so a rejected
configuration leaves no partial output behind.  All writes are atomic
(temp file plus rename).
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .config import RunConfig, build_run, load_config
from .coupler import AdaptiveResult, adaptive_horizon, picard_solve, write_convergence_csv
from .diagnostics import DiagnosticsRecord, compute_diagnostics, write_diagnostics_csv
from .errors import ConfigError
from .fields import save_snapshot
from .helmholtz import divergence_residual

__all__ = ["RunResult", "run_scenario"]

# Initial field data must be transverse; anything above this is a setup bug,
# not roundoff.
INITIAL_DIV_GATE = 1e-10


@dataclass
class RunResult:
    """What a completed run produced and where it landed."""

    out_dir: str
    T_used: float
    iterations: int
    final_distance: float
    shrink_events: int
    diagnostics_path: str
    convergence_path: str
    snapshot_paths: tuple[str, ...]
    record: DiagnosticsRecord
    result: AdaptiveResult

    def summary(self) -> str:
        lines = [
            f"horizon        {self.T_used!r}",
            f"iterations     {self.iterations}",
            f"final distance {self.final_distance:.3e}",
            f"shrink events  {self.shrink_events}",
            f"diagnostics    {self.diagnostics_path}",
            f"convergence    {self.convergence_path}",
        ]
        for path in self.snapshot_paths:
            lines.append(f"snapshot       {path}")
        return "\n".join(lines)


def run_scenario(
    cfg: "RunConfig | str",
    out_dir: "str | None" = None,
    seed: "int | None" = None,
) -> RunResult:
    """Execute one configured run and write its output tables.

    ``out_dir`` and ``seed`` are the only permitted overrides of the file.
    Raises ConfigError before any output exists; contraction and iteration
    failures propagate from the solver.
    """
    if isinstance(cfg, str):
        cfg = load_config(cfg)
    if seed is not None:
        doc = dict(cfg.raw)
        doc["seed"] = seed
        from .config import parse_config

        cfg = parse_config(doc)
    params, init, picard_cfg, coulomb, stepper = build_run(cfg)

    div0 = divergence_residual(init.A0)
    div1 = divergence_residual(init.A1)
    if max(div0, div1) > INITIAL_DIV_GATE:
        raise ConfigError(
            [f"initial field is not divergence-free (residuals {div0:.3e}, {div1:.3e})"]
        )

    directory = out_dir if out_dir is not None else cfg.output.get("directory", "out")
    os.makedirs(directory, exist_ok=True)

    adaptive = bool(cfg.picard.get("adaptive", True))
    continuation = bool(cfg.picard.get("continuation", False))
    if adaptive:
        result = adaptive_horizon(init, params, picard_cfg, coulomb, stepper, continuation=continuation)
    else:
        traj, log, _ = picard_solve(init, params, picard_cfg, coulomb, stepper)
        result = AdaptiveResult(picard_cfg.T, traj, (tuple(log),), 0)

    record = compute_diagnostics(result.trajectory, params, coulomb, symmetry_sign=cfg.symmetry_sign)

    diagnostics_path = os.path.join(directory, "diagnostics.csv")
    convergence_path = os.path.join(directory, "convergence.csv")
    write_diagnostics_csv(diagnostics_path, record)

    flat_log = [entry for seg in result.logs for entry in seg]
    boundaries = []
    pos = 0
    for seg in result.logs[:-1]:
        pos += len(seg)
        boundaries.append(pos)
    write_convergence_csv(convergence_path, flat_log, segment_boundaries=boundaries or None)

    snapshot_paths: list[str] = []
    if bool(cfg.output.get("snapshots", False)):
        traj = result.trajectory
        for label, index in (("initial", 0), ("final", traj.n_nodes - 1)):
            path = os.path.join(directory, f"state_{label}.msnap")
            state = traj.fields[index]
            save_snapshot(
                path,
                {
                    "psi": traj.psis[index].values,
                    "A": state.A.values,
                    "Adot": state.Adot.values,
                },
                meta={
                    "time": float(traj.times[index]),
                    "points": traj.psi_grid.points,
                    "length": traj.psi_grid.length,
                    "n_particles": params.n_particles,
                    "seed": cfg.seed,
                },
            )
            snapshot_paths.append(path)

    return RunResult(
        out_dir=directory,
        T_used=result.T_used,
        iterations=len(flat_log),
        final_distance=float(flat_log[-1].d) if flat_log else 0.0,
        shrink_events=result.shrink_events,
        diagnostics_path=diagnostics_path,
        convergence_path=convergence_path,
        snapshot_paths=tuple(snapshot_paths),
        record=record,
        result=result,
    )
