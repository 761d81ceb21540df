"""Mass-one Klein-Gordon propagation of the transverse gauge field.

The field equation is (c^{-2} d_tt - Laplace + 1) B = F.  Every Fourier mode
is an independent oscillator with frequency omega(k) = c sqrt(1 + |k|^2), so
the homogeneous flow is exact:

    Bhat(t)  = cos(omega t) A0hat + sin(omega t)/omega A1hat
    Bdothat  = -omega sin(omega t) A0hat + cos(omega t) A1hat

and the forced part is the Duhamel integral c^2 int_0^t sin(omega (t-s))/omega
Fhat(s) ds, discretized by the trapezoid rule on the trajectory's time nodes.
The all-node propagator uses angle-addition prefix sums, which reproduces the
per-node trapezoid exactly while touching each source sample once.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .current import projected_total_current
from .fields import FieldState, PhysicalParams, TrajectoryPair
from .helmholtz import curl_norm
from .spectral import (
    SpectralGrid,
    VectorField,
    forward_transform,
    inverse_transform,
    sobolev_norm,
    spacetime_norm,
)

__all__ = [
    "kg_evolve_free",
    "kg_propagate",
    "kg_propagate_all",
    "kg_source",
    "kg_energy",
    "strichartz_monitor",
]


def _omega(grid: SpectralGrid, c: float) -> np.ndarray:
    return c * np.sqrt(1.0 + grid.k_squared)


def _stack_hat(v: VectorField) -> np.ndarray:
    return np.stack([forward_transform(v.values[a]) for a in range(3)])


def _unstack(grid: SpectralGrid, hat: np.ndarray) -> VectorField:
    spatial = np.stack([inverse_transform(hat[a]) for a in range(3)])
    return VectorField.from_complex(grid, spatial)


def _check_times(times: np.ndarray) -> float:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 1:
        raise ValueError("need a one-dimensional, non-empty time sample array")
    if times.size == 1:
        return 0.0
    steps = np.diff(times)
    if not (steps > 0).all():
        raise ValueError("time samples must be strictly increasing")
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        raise ValueError("time samples must be uniformly spaced")
    return float(steps[0])


def kg_evolve_free(state: FieldState, c: float, t: float) -> FieldState:
    """Exact homogeneous flow applied for time t."""
    grid = state.grid
    om = _omega(grid, c)
    cos_t, sin_t = np.cos(om * t), np.sin(om * t)
    a0, a1 = _stack_hat(state.A), _stack_hat(state.Adot)
    b = cos_t * a0 + (sin_t / om) * a1
    bdot = -om * sin_t * a0 + cos_t * a1
    return FieldState(_unstack(grid, b), _unstack(grid, bdot))


def kg_propagate_all(
    A0: VectorField,
    A1: VectorField,
    source: Sequence[VectorField],
    times: np.ndarray,
    c: float,
) -> list[FieldState]:
    """Forced flow sampled at every node of a uniform time grid.

    ``source`` holds one sample per node. The running prefix integrals
    C(t) = int cos(omega s) Fhat ds and S(t) = int sin(omega s) Fhat ds give
    the Duhamel term as c^2 (sin(omega t) C - cos(omega t) S)/omega and its
    time derivative as c^2 (cos(omega t) C + sin(omega t) S).
    """
    times = np.asarray(times, dtype=float)
    dt = _check_times(times)
    if len(source) != times.size:
        raise ValueError(f"{len(source)} source samples for {times.size} nodes")
    grid = A0.grid
    om = _omega(grid, c)
    a0, a1 = _stack_hat(A0), _stack_hat(A1)
    c_sq = c * c

    out: list[FieldState] = []
    prefix_cos = np.zeros_like(a0)
    prefix_sin = np.zeros_like(a0)
    prev_hat = None
    prev_tau = 0.0
    for i, t in enumerate(times):
        tau = float(t - times[0])
        f_hat = _stack_hat(source[i])
        if i == 0:
            # the flow at the seed node is the identity; keep the input bits
            out.append(FieldState(A0, A1))
            prev_hat = f_hat
            continue
        half = 0.5 * dt
        prefix_cos += half * (np.cos(om * prev_tau) * prev_hat + np.cos(om * tau) * f_hat)
        prefix_sin += half * (np.sin(om * prev_tau) * prev_hat + np.sin(om * tau) * f_hat)
        cos_t, sin_t = np.cos(om * tau), np.sin(om * tau)
        b = cos_t * a0 + (sin_t / om) * a1 + c_sq * (sin_t * prefix_cos - cos_t * prefix_sin) / om
        bdot = -om * sin_t * a0 + cos_t * a1 + c_sq * (cos_t * prefix_cos + sin_t * prefix_sin)
        out.append(FieldState(_unstack(grid, b), _unstack(grid, bdot)))
        prev_hat = f_hat
        prev_tau = tau
    return out


def kg_propagate(
    A0: VectorField,
    A1: VectorField,
    source: Sequence[VectorField],
    times: np.ndarray,
    t_index: int,
    c: float,
) -> FieldState:
    """Forced flow at a single node, by direct trapezoid over [t_0, t_index]."""
    times = np.asarray(times, dtype=float)
    dt = _check_times(times)
    if not 0 <= t_index < times.size:
        raise ValueError(f"t_index {t_index} out of range for {times.size} nodes")
    if t_index == 0:
        return FieldState(A0, A1)
    grid = A0.grid
    om = _omega(grid, c)
    t = float(times[t_index] - times[0])
    cos_t, sin_t = np.cos(om * t), np.sin(om * t)
    a0, a1 = _stack_hat(A0), _stack_hat(A1)
    b = cos_t * a0 + (sin_t / om) * a1
    bdot = -om * sin_t * a0 + cos_t * a1
    duhamel = np.zeros_like(a0)
    duhamel_dot = np.zeros_like(a0)
    for i in range(t_index + 1):
        w = dt * (0.5 if i in (0, t_index) else 1.0)
        lag = t - float(times[i] - times[0])
        f_hat = _stack_hat(source[i])
        duhamel += w * (np.sin(om * lag) / om) * f_hat
        duhamel_dot += w * np.cos(om * lag) * f_hat
    b = b + c * c * duhamel
    bdot = bdot + c * c * duhamel_dot
    return FieldState(_unstack(grid, b), _unstack(grid, bdot))


def kg_source(traj: TrajectoryPair, params: PhysicalParams) -> list[VectorField]:
    """Wave-equation source along a trajectory.

    Each node contributes (4 pi / c) times the projected total current plus
    the field sample itself; the latter compensates the unit mass added to
    the wave operator, so a fixed point solves the massless wave equation.
    """
    out = []
    for psi, state in zip(traj.psis, traj.fields):
        current = projected_total_current(psi, state.A, params)
        out.append((4.0 * np.pi / params.c) * current + state.A)
    return out


def kg_energy(state: FieldState, c: float) -> float:
    """Discrete oscillator energy (1/8 pi) int |curl B|^2 + |Bdot/c|^2 + |B|^2.

    Conserved exactly by the free flow on transverse fields; the |B|^2 term
    accounts for the unit mass in the wave operator.
    """
    curl_sq = curl_norm(state.A) ** 2
    mass_sq = sobolev_norm(state.A, 0) ** 2
    dot_sq = sobolev_norm(state.Adot, 0) ** 2 / (c * c)
    return (curl_sq + mass_sq + dot_sq) / (8.0 * np.pi)


def strichartz_monitor(
    states: Sequence[FieldState],
    times: np.ndarray,
    q0: float,
    r0: float,
    sigma: float,
) -> float:
    """Dispersive space-time norm max_k ||d_t^k B||_{L^q0 W^{sigma-k-2/q0, r0}}.

    The pair (q0, r0) must be wave-admissible: 0 <= 2/q0 = 1 - 2/r0 < 1.
    Inadmissible exponents are rejected. Diagnostic only; nothing is enforced.
    """
    inv_q = 0.0 if np.isinf(q0) else 2.0 / q0
    if not (q0 >= 2 and r0 >= 2):
        raise ValueError(f"inadmissible exponents (q0={q0}, r0={r0}): need q0, r0 >= 2")
    inv_r = 0.0 if np.isinf(r0) else 2.0 / r0
    if abs(inv_q - (1.0 - inv_r)) > 1e-12 or not inv_q < 1.0:
        raise ValueError(
            f"inadmissible exponents (q0={q0}, r0={r0}): need 0 <= 2/q0 = 1 - 2/r0 < 1"
        )
    b_norm = spacetime_norm(times, [st.A for st in states], q0, sigma - inv_q, r0)
    bdot_norm = spacetime_norm(times, [st.Adot for st in states], q0, sigma - 1.0 - inv_q, r0)
    return max(b_norm, bdot_norm)
