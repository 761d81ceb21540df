"""Invariant monitors: energies, residuals, symmetry, gauge-phase transforms.

Residuals substitute a trajectory back into the two evolution equations with
centered second-order time differences, so interior nodes of an exact
solution leave an O(dt^2) defect; endpoints carry no residual value.  Every
residual is reported relative to the solution's own scale, so the zero
trajectory reports zero and refinement studies are scale-free.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.special import lambertw

from .fields import (
    FieldState,
    PhysicalParams,
    TrajectoryPair,
    WaveFunction,
    _atomic_write,
    exchange_map,
)
from .helmholtz import curl_norm, divergence_residual
from .klein_gordon import kg_source
from .schrodinger import CoulombSpec, MagneticHamiltonian
from .spectral import (
    ScalarField,
    forward_transform,
    inverse_transform,
    lebesgue_norm,
    sobolev_norm,
)

__all__ = [
    "DiagnosticsRecord",
    "field_energy",
    "gauge_phase_transform",
    "residual_check",
    "symmetry_residual",
    "h2_growth_constant",
    "compute_diagnostics",
    "write_diagnostics_csv",
    "SCHRODINGER_RESIDUAL_GATE",
    "KG_RESIDUAL_GATE",
]

DIAGNOSTICS_SCHEMA = "msfield-diagnostics-v1"

# Coarse sanity gates for converged trajectories. Residuals scale with dt^2,
# so these are deliberately loose; refinement studies pin the actual order.
SCHRODINGER_RESIDUAL_GATE = 0.05
KG_RESIDUAL_GATE = 0.05


def field_energy(state: FieldState, c: float) -> float:
    """Electromagnetic energy (1/8 pi) int |curl A|^2 + |Adot / c|^2."""
    curl_sq = curl_norm(state.A) ** 2
    dot_sq = sobolev_norm(state.Adot, 0) ** 2 / (c * c)
    return (curl_sq + dot_sq) / (8.0 * np.pi)


def gauge_phase_transform(traj: TrajectoryPair, params: PhysicalParams, direction: str) -> TrajectoryPair:
    """Multiply psi by the accumulated field-energy phase.

    ``to_energy_gauged`` attaches exp(-(i/hbar) int_0^t E_field ds), turning a
    solution of the reduced system (no field-energy term in the Hamiltonian)
    into one of the full system; ``to_reduced`` removes the phase again. The
    time integral is the trapezoid rule on the trajectory's own nodes.
    """
    if direction not in ("to_energy_gauged", "to_reduced"):
        raise ValueError(f"unknown direction {direction!r}")
    energies = np.array([field_energy(state, params.c) for state in traj.fields])
    dt = traj.dt
    accumulated = np.concatenate([[0.0], np.cumsum(0.5 * dt * (energies[1:] + energies[:-1]))])
    sign = -1.0 if direction == "to_energy_gauged" else +1.0
    psis = tuple(
        replace(psi, values=np.exp(1j * sign * phase / params.hbar) * psi.values)
        for psi, phase in zip(traj.psis, accumulated)
    )
    return TrajectoryPair(traj.times, psis, traj.fields)


def symmetry_residual(psi: WaveFunction, sign: int) -> float:
    """Relative defect ||psi - sign * psi o exchange|| / ||psi||, in [0, 2]."""
    if sign not in (+1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    norm = sobolev_norm(psi, 0)
    if norm == 0.0:
        return 0.0
    swapped = exchange_map(psi)
    defect = WaveFunction(psi.grid, psi.values - sign * swapped.values)
    return sobolev_norm(defect, 0) / norm


def _vector_sobolev(grid, values: np.ndarray, s: float) -> float:
    """H^s norm of a complex 3-component field given as a raw (3, ...) array."""
    power = np.zeros(grid.shape)
    for comp in range(values.shape[0]):
        power += np.abs(forward_transform(values[comp])) ** 2
    if s != 0:
        power = power * (1.0 + grid.k_squared) ** s
    weight = grid.volume / grid.points ** (2 * grid.dim)
    return float(np.sqrt(weight * power.sum()))


def residual_check(
    traj: TrajectoryPair,
    params: PhysicalParams,
    coulomb: "CoulombSpec | None" = None,
    include_field_energy: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """Relative PDE residuals at each node (NaN at the two endpoints).

    Schrodinger: || i hbar d_t psi - H psi ||_L2 over the largest
    || i hbar d_t psi ||_L2 along the trajectory; with
    ``include_field_energy`` the field energy enters the Hamiltonian, which
    is the form the energy-gauged trajectory satisfies.

    Wave equation: || c^-2 d_tt A - Lap A + A - F ||_{H^-1/2} over the scale
    max(||c^-2 d_tt A||, ||F||) in H^-1/2, with F the trajectory's own source.
    """
    n = traj.n_nodes
    dt = traj.dt
    schr = np.full(n, np.nan)
    wave = np.full(n, np.nan)
    if n < 3:
        return schr, wave

    ham = MagneticHamiltonian(traj.psi_grid, params, coulomb)
    energies = (
        np.array([field_energy(state, params.c) for state in traj.fields])
        if include_field_energy
        else np.zeros(n)
    )
    defects = []
    scale = 0.0
    for i in range(1, n - 1):
        dpsi_dt = (traj.psis[i + 1].values - traj.psis[i - 1].values) / (2.0 * dt)
        lhs = 1j * params.hbar * dpsi_dt
        rhs = ham.bound(traj.fields[i].A)(traj.psis[i].values)
        if include_field_energy:
            rhs = rhs + energies[i] * traj.psis[i].values
        defects.append(lhs - rhs)
        scale = max(scale, sobolev_norm(ScalarField(traj.psi_grid, lhs), 0))
    scale = max(scale, 1e-300)
    for i, defect in enumerate(defects, start=1):
        schr[i] = sobolev_norm(ScalarField(traj.psi_grid, defect), 0) / scale

    grid3 = traj.field_grid
    source = kg_source(traj, params)
    inv_c_sq = 1.0 / params.c**2
    k_sq = grid3.k_squared
    wave_rows = []
    wave_scale = 0.0
    for i in range(1, n - 1):
        accel = inv_c_sq * (
            traj.fields[i + 1].A.values - 2.0 * traj.fields[i].A.values + traj.fields[i - 1].A.values
        ) / (dt * dt)
        a_i = traj.fields[i].A.values
        lap = np.stack(
            [np.real(inverse_transform(-k_sq * forward_transform(a_i[comp]))) for comp in range(3)]
        )
        defect = accel - lap + a_i - source[i].values
        wave_rows.append(defect)
        wave_scale = max(
            wave_scale,
            _vector_sobolev(grid3, accel.astype(np.complex128), -0.5),
            _vector_sobolev(grid3, source[i].values.astype(np.complex128), -0.5),
        )
    wave_scale = max(wave_scale, 1e-300)
    for i, defect in enumerate(wave_rows, start=1):
        wave[i] = _vector_sobolev(grid3, defect.astype(np.complex128), -0.5) / wave_scale
    return schr, wave


def h2_growth_constant(traj: TrajectoryPair, params: PhysicalParams) -> float:
    """Fitted constant C in the bound H2(t) <= C * H2(0) * exp(C * I(t)).

    I(t) integrates (1 + ||A||_L4) * ||Adot||_L4 over time.  The fit returns
    the smallest C making the bound hold at every node (via the Lambert W
    function), so it is finite exactly when the trajectory is, and its size
    gauges how violently the wavefunction roughens under the field.
    """
    h2 = np.array([sobolev_norm(p, 2.0) for p in traj.psis])
    if not np.isfinite(h2).all():
        return float("inf")
    a4 = np.array([lebesgue_norm(state.A, 4.0) for state in traj.fields])
    adot4 = np.array([lebesgue_norm(state.Adot, 4.0) for state in traj.fields])
    integrand = (1.0 + a4) * adot4
    dt = traj.dt
    integral = np.concatenate([[0.0], np.cumsum(0.5 * dt * (integrand[1:] + integrand[:-1]))])
    base = max(h2[0], 1e-300)
    fitted = 1.0
    for growth, accumulated in zip(h2[1:] / base, integral[1:]):
        if growth <= 1.0:
            continue
        if accumulated > 0.0:
            needed = float(np.real(lambertw(growth * accumulated)) / accumulated)
        else:
            needed = float(growth)
        fitted = max(fitted, needed)
    return float(fitted)


@dataclass(frozen=True)
class DiagnosticsRecord:
    """Per-node diagnostic table for one trajectory."""

    times: np.ndarray
    l2_norm: np.ndarray
    h2_norm: np.ndarray
    field_energy: np.ndarray
    div_residual_A: np.ndarray
    div_residual_Adot: np.ndarray
    symmetry_residual: np.ndarray
    schrodinger_residual: np.ndarray
    kg_residual: np.ndarray


def compute_diagnostics(
    traj: TrajectoryPair,
    params: PhysicalParams,
    coulomb: "CoulombSpec | None" = None,
    symmetry_sign: "int | None" = None,
) -> DiagnosticsRecord:
    """Evaluate the standard monitor set along a trajectory.

    ``symmetry_sign`` enables the exchange-defect column for two identical
    particles; it is NaN otherwise, as are residuals at the endpoints.
    """
    n = traj.n_nodes
    l2 = np.array([sobolev_norm(p, 0.0) for p in traj.psis])
    h2 = np.array([sobolev_norm(p, 2.0) for p in traj.psis])
    energy = np.array([field_energy(state, params.c) for state in traj.fields])
    div_a = np.array([divergence_residual(state.A) for state in traj.fields])
    div_adot = np.array([divergence_residual(state.Adot) for state in traj.fields])
    if symmetry_sign is not None and params.n_particles == 2 and params.identical_particles:
        sym = np.array([symmetry_residual(p, symmetry_sign) for p in traj.psis])
    else:
        sym = np.full(n, np.nan)
    schr, wave = residual_check(traj, params, coulomb)
    return DiagnosticsRecord(traj.times.copy(), l2, h2, energy, div_a, div_adot, sym, schr, wave)


def write_diagnostics_csv(path: str, record: DiagnosticsRecord) -> None:
    """Diagnostics table as CSV with a schema-version header comment.

    NaN entries (inapplicable columns, endpoint residuals) are written as
    empty cells; all other cells use shortest round-trip float formatting so
    repeated runs of the same configuration are bit-identical.
    """
    columns = [
        "time",
        "l2_norm",
        "h2_norm",
        "field_energy",
        "div_residual_A",
        "div_residual_Adot",
        "symmetry_residual",
        "schrodinger_residual",
        "kg_residual",
    ]
    arrays = [
        record.times,
        record.l2_norm,
        record.h2_norm,
        record.field_energy,
        record.div_residual_A,
        record.div_residual_Adot,
        record.symmetry_residual,
        record.schrodinger_residual,
        record.kg_residual,
    ]
    lines = [f"# {DIAGNOSTICS_SCHEMA}", ",".join(columns)]
    for i in range(record.times.size):
        cells = []
        for arr in arrays:
            value = float(arr[i])
            cells.append("" if np.isnan(value) else repr(value))
        lines.append(",".join(cells))
    _atomic_write(path, ("\n".join(lines) + "\n").encode())
