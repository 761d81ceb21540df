"""Fast self-checks, one small deterministic exercise per subsystem.

Each check runs in well under a second on one core and compares a computed
quantity against an independent expectation (closed forms, conserved
quantities, round trips).  The registry backs the command-line ``verify``
subcommand; individual check functions are importable so a harness can feed
them deliberately broken inputs and watch them fail.
"""

from __future__ import annotations

import io
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .coupler import InitialData, PicardConfig, picard_solve
from .current import current_density
from .fields import FieldState, PhysicalParams, WaveFunction, load_snapshot, normalize, save_snapshot
from .helmholtz import divergence_residual, project
from .initial_data import gaussian_packet, plane_wave_field, random_band_scalar, random_transverse_field
from .klein_gordon import kg_energy, kg_evolve_free
from .schrodinger import StepperConfig, evolve_schrodinger
from .spectral import (
    SpectralGrid,
    VectorField,
    forward_transform,
    inverse_transform,
    sobolev_norm,
)

__all__ = ["CheckResult", "MODULE_CHECKS", "run_checks", "format_report", "transversality_check"]

_SEED = 20260817


@dataclass
class CheckResult:
    module: str
    name: str
    measured: float
    gate: float

    @property
    def passed(self) -> bool:
        return np.isfinite(self.measured) and self.measured <= self.gate

    def line(self) -> str:
        status = "pass" if self.passed else "FAIL"
        return f"[{status}] {self.module:<12} {self.name:<38} {self.measured:.3e} <= {self.gate:.1e}"


def _rng(tag: int) -> np.random.Generator:
    return np.random.default_rng([_SEED, tag])


def transversality_check(field: VectorField, module: str = "helmholtz", gate: float = 1e-10) -> CheckResult:
    """Divergence residual of a field that is supposed to be transverse."""
    return CheckResult(module, "divergence residual", divergence_residual(field), gate)


def _checks_spectral() -> list[CheckResult]:
    grid = SpectralGrid(16, 2.0 * np.pi, 3)
    rng = _rng(1)
    f = random_band_scalar(grid, rng, band=0.45)
    hat = forward_transform(f)
    parseval = abs(
        np.sum(np.abs(f) ** 2) * grid.cell_volume - np.sum(np.abs(hat) ** 2) * grid.volume / grid.points**6
    )
    back = inverse_transform(hat)
    round_trip = float(np.max(np.abs(back - f)))
    const = np.full(grid.shape, 0.7 + 0.0j)
    norm_err = abs(sobolev_norm(WaveFunction(grid, const), 2.0) - 0.7 * np.sqrt(grid.volume))
    return [
        CheckResult("spectral", "Parseval identity", parseval, 1e-10),
        CheckResult("spectral", "transform round trip", round_trip, 1e-12),
        CheckResult("spectral", "constant-field Sobolev norm", norm_err, 1e-12),
    ]


def _checks_helmholtz() -> list[CheckResult]:
    grid = SpectralGrid(16, 2.0 * np.pi, 3)
    rng = _rng(2)
    raw = VectorField(grid, np.stack([random_band_scalar(grid, rng, 1.0).real for _ in range(3)]))
    projected = project(raw)
    twice = project(projected)
    idem = float(np.max(np.abs(twice.values - projected.values)))
    scale = float(np.max(np.abs(projected.values))) or 1.0
    return [
        transversality_check(projected),
        CheckResult("helmholtz", "projection idempotence", idem / scale, 1e-12),
    ]


def _checks_klein_gordon() -> list[CheckResult]:
    grid = SpectralGrid(8, 2.0 * np.pi, 3)
    c = 7.0
    a0 = plane_wave_field(grid, 0.3, (1, 2, 0), (0.0, 0.0, 1.0))
    state = FieldState(a0, VectorField.zero(grid))
    t = 0.37
    moved = kg_evolve_free(state, c, t)
    k_sq = float((2.0 * np.pi / grid.length) ** 2 * (1 + 4))
    omega = c * np.sqrt(1.0 + k_sq)
    exact = VectorField(grid, a0.values * np.cos(omega * t))
    mode_err = float(np.max(np.abs(moved.A.values - exact.values)))
    energy_drift = abs(kg_energy(moved, c) - kg_energy(state, c))
    return [
        CheckResult("klein-gordon", "single-mode closed form", mode_err, 1e-12),
        CheckResult("klein-gordon", "energy conservation", energy_drift, 1e-12),
    ]


def _checks_schrodinger() -> list[CheckResult]:
    grid = SpectralGrid(16, 2.0 * np.pi, 3)
    params = PhysicalParams(hbar=1.0, c=10.0, masses=(1.0,), charges=(0.0,))
    packet = gaussian_packet(grid, params, [(np.pi, np.pi, np.pi)], [0.9], [(1, 0, 0)])
    times = np.linspace(0.0, 0.5, 9)
    states = evolve_schrodinger(packet, None, times, params, config=StepperConfig())
    hat0 = forward_transform(packet.values)
    phase = np.exp(-0.5j * params.hbar * grid.k_squared * times[-1] / params.masses[0])
    exact = inverse_transform(hat0 * phase)
    free_err = float(np.max(np.abs(states[-1].values - exact)))
    norm_drift = abs(sobolev_norm(states[-1], 0.0) - 1.0)
    return [
        CheckResult("schrodinger", "free packet vs Fourier flow", free_err, 1e-9),
        CheckResult("schrodinger", "norm preservation", norm_drift, 1e-12),
    ]


def _checks_current() -> list[CheckResult]:
    grid = SpectralGrid(8, 2.0 * np.pi, 3)
    params = PhysicalParams(hbar=1.0, c=10.0, masses=(1.5,), charges=(0.8,))
    rng = _rng(3)
    real_psi = normalize(WaveFunction(grid, random_band_scalar(grid, rng, 0.45).real + 0.0j))
    j = current_density(real_psi, None, 1, params)
    stationary = float(np.max(np.abs(j.values)))
    mode_psi = normalize(
        WaveFunction(
            grid,
            np.exp(2j * np.broadcast_to(grid.axis_coordinate(0), grid.shape)).astype(np.complex128),
        )
    )
    j_mode = current_density(mode_psi, None, 1, params)
    # plane wave e^{2ix}: J = (q hbar k / m) |psi|^2 with k = 2, |psi|^2 = 1/V
    expected = params.charges[0] * params.hbar * 2.0 / (params.masses[0] * grid.volume)
    mode_err = float(
        max(
            np.max(np.abs(j_mode.values[0] - expected)),
            np.max(np.abs(j_mode.values[1:])),
        )
    )
    return [
        CheckResult("current", "real state carries no current", stationary, 1e-13),
        CheckResult("current", "plane-wave closed form", mode_err, 1e-12),
    ]


def _checks_coupler() -> list[CheckResult]:
    grid = SpectralGrid(8, 2.0 * np.pi, 3)
    params = PhysicalParams(hbar=1.0, c=5.0, masses=(1.0,), charges=(0.0,))
    packet = gaussian_packet(grid, params, [(np.pi, np.pi, np.pi)], [0.9], [(0, 0, 1)])
    field_grid = SpectralGrid(8, 2.0 * np.pi, 3)
    init = InitialData(packet, VectorField.zero(field_grid), VectorField.zero(field_grid))
    config = PicardConfig(T=0.25, n_t=8, tol=1e-10, max_iters=6)
    _, log, _ = picard_solve(init, params, config)
    # uncharged data decouples, so the map lands on the fixed point immediately
    iters = float(len(log))
    return [CheckResult("coupler", "uncharged data fixed in two sweeps", iters, 2.0)]


def _checks_fields() -> list[CheckResult]:
    grid = SpectralGrid(8, 2.0 * np.pi, 3)
    rng = _rng(4)
    arrays = {
        "psi": random_band_scalar(grid, rng, 1.0),
        "A": random_transverse_field(grid, rng).values.astype(np.complex128),
    }
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "probe.msnap")
        save_snapshot(path, arrays, {"points": 8, "length": grid.length})
        loaded, meta = load_snapshot(path)
    worst = 0.0
    for name, values in arrays.items():
        if not np.array_equal(loaded[name], values):
            worst = max(worst, float(np.max(np.abs(loaded[name] - values))) or np.inf)
    if meta.get("points") != 8:
        worst = np.inf
    return [CheckResult("fields", "snapshot bit round trip", worst, 0.0)]


def _checks_initial_data() -> list[CheckResult]:
    grid3 = SpectralGrid(16, 2.0 * np.pi, 3)
    params = PhysicalParams(hbar=1.0, c=10.0, masses=(1.0,), charges=(1.0,))
    packet = gaussian_packet(grid3, params, [(2.0, 3.0, 4.0)], [0.7], [(0, 1, -1)])
    norm_err = abs(sobolev_norm(packet, 0.0) - 1.0)
    wave = plane_wave_field(grid3, 0.4, (1, 1, 0), (1.0, 0.0, 0.0))
    rng = _rng(5)
    rand = random_transverse_field(grid3, rng, amplitude=0.5)
    return [
        CheckResult("initial-data", "packet normalization", norm_err, 1e-12),
        transversality_check(wave, module="initial-data"),
        transversality_check(rand, module="initial-data"),
    ]


MODULE_CHECKS = {
    "spectral": _checks_spectral,
    "helmholtz": _checks_helmholtz,
    "klein-gordon": _checks_klein_gordon,
    "schrodinger": _checks_schrodinger,
    "current": _checks_current,
    "coupler": _checks_coupler,
    "fields": _checks_fields,
    "initial-data": _checks_initial_data,
}


def run_checks(subset: "list[str] | None" = None) -> list[CheckResult]:
    """Run the registered checks, optionally restricted to named modules.

    Unknown module names raise ValueError; an explicitly empty subset yields
    an empty report.
    """
    if subset is None:
        names = list(MODULE_CHECKS)
    else:
        unknown = [s for s in subset if s not in MODULE_CHECKS]
        if unknown:
            raise ValueError(
                f"unknown check module(s) {unknown}; available: {', '.join(MODULE_CHECKS)}"
            )
        names = list(subset)
    results: list[CheckResult] = []
    for name in names:
        results.extend(MODULE_CHECKS[name]())
    return results


def format_report(results: list[CheckResult]) -> str:
    buf = io.StringIO()
    for result in results:
        buf.write(result.line() + "\n")
    failed = sum(1 for r in results if not r.passed)
    buf.write(f"{len(results)} checks, {failed} failed\n")
    return buf.getvalue()
