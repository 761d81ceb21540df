"""Magnetic many-body Schrodinger evolution under a frozen-in-time field.

The Hamiltonian applied to psi on the 3N-dimensional grid is

    H[A] psi = sum_j (1/2 m_j) [ -hbar^2 Lap_j psi
                                 + i hbar (Q_j/c) (div_j(A psi) + A . grad_j psi)
                                 + (Q_j/c)^2 |A(x_j)|^2 psi ]
               + sum_{j<k} Q_j Q_k v(x_j - x_k) psi

with A evaluated at particle j's coordinates. The cross term is the
symmetrized average of the divergence and advection forms; the two agree
whenever div A = 0, and the average is exactly Hermitian on the grid (a
spectral derivative is anti-Hermitian, multiplication by a real field is
Hermitian, so their anticommutator times i*hbar is Hermitian), which keeps
every propagator unitary to roundoff.

Time stepping is a Lanczos (Krylov) approximation of exp(-i dt H / hbar)
with full reorthogonalization and an a-posteriori residual estimate; steps
whose estimate exceeds the tolerance are bisected.  The field sample is
frozen at the midpoint average of the surrounding nodes, which is what makes
the per-interval propagator second-order accurate in dt.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .errors import NumericalAbort
from .fields import PhysicalParams, WaveFunction, particle_axes
from .spectral import SpectralGrid, VectorField, forward_transform, inverse_transform

__all__ = [
    "CoulombSpec",
    "StepperConfig",
    "MagneticHamiltonian",
    "coulomb_kernel",
    "coulomb_pair_potential",
    "hamiltonian_apply",
    "schrodinger_step",
    "evolve_schrodinger",
    "evolve_schrodinger_inhomogeneous",
]


@dataclass(frozen=True)
class CoulombSpec:
    """Pair-interaction discretization.

    ``spectral`` uses the bare periodic kernel 4 pi / |k|^2 with the zero mode
    removed (so the kernel has zero mean over the box); ``smeared`` convolves
    both charge positions with a normalized Gaussian bump of width ``radius``,
    which regularizes the on-site value.
    """

    mode: str = "spectral"
    radius: float = 0.5

    def __post_init__(self) -> None:
        if self.mode not in ("spectral", "smeared"):
            raise ValueError(f"unknown Coulomb mode {self.mode!r}")
        if self.mode == "smeared" and not (self.radius > 0):
            raise ValueError(f"smearing radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class StepperConfig:
    """Krylov propagator controls."""

    krylov_dim: int = 12
    krylov_tol: float = 1e-9
    substeps: int = 1
    max_halvings: int = 16

    def __post_init__(self) -> None:
        if self.krylov_dim < 2:
            raise ValueError(f"krylov_dim must be >= 2, got {self.krylov_dim}")
        if not (0 < self.krylov_tol < 1):
            raise ValueError(f"krylov_tol must be in (0, 1), got {self.krylov_tol}")
        if self.substeps < 1:
            raise ValueError(f"substeps must be >= 1, got {self.substeps}")


def coulomb_kernel(grid3: SpectralGrid, spec: CoulombSpec) -> np.ndarray:
    """Periodic pair kernel v on the 3-dimensional grid, zero-mean by construction."""
    if grid3.dim != 3:
        raise ValueError("Coulomb kernel lives on the 3-dimensional grid")
    k_sq = grid3.k_squared
    with np.errstate(divide="ignore"):
        v_hat = np.where(k_sq > 0, 4.0 * np.pi / np.where(k_sq > 0, k_sq, 1.0), 0.0)
    if spec.mode == "smeared":
        v_hat = v_hat * np.exp(-spec.radius**2 * k_sq)
    # unnormalized-forward convention: ifftn carries 1/M^3, the kernel needs 1/volume
    kernel = inverse_transform(v_hat * (grid3.points**3 / grid3.volume))
    return np.ascontiguousarray(kernel.real)


def coulomb_pair_potential(grid: SpectralGrid, params: PhysicalParams, spec: "CoulombSpec | None"):
    """Total pair potential sum_{j<k} Q_j Q_k v(x_j - x_k) on the 3N grid.

    Returns the scalar 0.0 when there is at most one particle or no spec, so
    callers can skip the multiplication entirely.
    """
    n = params.n_particles
    if spec is None or n < 2:
        return 0.0
    if grid.dim != 3 * n:
        raise ValueError(f"grid dimension {grid.dim} does not match 3N = {3 * n}")
    grid3 = SpectralGrid(grid.points, grid.length, 3)
    kernel = coulomb_kernel(grid3, spec)
    m = grid.points
    diff = (np.arange(m)[:, None] - np.arange(m)[None, :]) % m
    total = np.zeros(grid.shape)
    for j in range(1, n + 1):
        for k in range(j + 1, n + 1):
            coupling = params.charges[j - 1] * params.charges[k - 1]
            if coupling == 0.0:
                continue
            jx, jy, jz = particle_axes(j, n)
            kx, ky, kz = particle_axes(k, n)
            index = []
            for ax_j, ax_k in ((jx, kx), (jy, ky), (jz, kz)):
                shape = [1] * grid.dim
                shape[ax_j] = m
                shape[ax_k] = m
                want = [1, 1]
                want[0 if ax_j < ax_k else 1] = m
                index.append(diff.reshape(shape) if ax_j < ax_k else diff.T.reshape(shape))
            total = total + coupling * kernel[tuple(index)]
    return total


class MagneticHamiltonian:
    """Reusable applier of H[A] on a fixed grid.

    Construction precomputes the kinetic multiplier and the pair potential;
    ``bound(A)`` captures one field sample and returns a closure suitable for
    the Krylov stepper. ``A = None`` means zero field.
    """

    def __init__(
        self,
        grid: SpectralGrid,
        params: PhysicalParams,
        coulomb: "CoulombSpec | None" = None,
        potential=None,
    ):
        if grid.dim != 3 * params.n_particles:
            raise ValueError(f"grid dimension {grid.dim} does not match 3N = {3 * params.n_particles}")
        self.grid = grid
        self.params = params
        kinetic = np.zeros(grid.shape)
        for j in range(1, params.n_particles + 1):
            scale = params.hbar**2 / (2.0 * params.masses[j - 1])
            for axis in particle_axes(j, params.n_particles):
                kinetic = kinetic + scale * grid.axis_wavenumber(axis) ** 2
        self.kinetic_mult = kinetic
        self.potential = coulomb_pair_potential(grid, params, coulomb) if potential is None else potential
        self._k_axis = [grid.axis_wavenumber(a) for a in range(grid.dim)]

    def _broadcast_field(self, A: VectorField, j: int) -> list[np.ndarray]:
        """A's components reshaped to broadcast over particle j's axes."""
        n = self.params.n_particles
        axes = particle_axes(j, n)
        shape = [1] * self.grid.dim
        for ax in axes:
            shape[ax] = self.grid.points
        return [A.values[c].reshape(shape) for c in range(3)]

    def bound(self, A: "VectorField | None") -> Callable[[np.ndarray], np.ndarray]:
        """Fix the field sample and return psi-values -> (H psi)-values."""
        params = self.params
        static = not (A is not None and any(q != 0.0 for q in params.charges))
        per_particle = []
        if not static:
            for j in range(1, params.n_particles + 1):
                q = params.charges[j - 1]
                if q == 0.0:
                    continue
                comps = self._broadcast_field(A, j)
                a_sq = comps[0] ** 2 + comps[1] ** 2 + comps[2] ** 2
                cross_coeff = 1j * params.hbar * q / (2.0 * params.masses[j - 1] * params.c)
                square_coeff = q**2 / (2.0 * params.masses[j - 1] * params.c**2)
                axes = particle_axes(j, params.n_particles)
                per_particle.append((axes, comps, a_sq, cross_coeff, square_coeff))
        kinetic = self.kinetic_mult
        potential = self.potential
        k_axis = self._k_axis
        scalar_potential = isinstance(potential, float)

        def apply(values: np.ndarray) -> np.ndarray:
            hat = forward_transform(values)
            out = inverse_transform(kinetic * hat)
            for axes, comps, a_sq, cross_coeff, square_coeff in per_particle:
                div_hat = 0.0
                advect = 0.0
                for comp, axis in enumerate(axes):
                    grad = inverse_transform(1j * k_axis[axis] * hat)
                    advect = advect + comps[comp] * grad
                    div_hat = div_hat + 1j * k_axis[axis] * forward_transform(comps[comp] * values)
                out += cross_coeff * (inverse_transform(div_hat) + advect)
                out += (square_coeff * a_sq) * values
            if not scalar_potential:
                out += potential * values
            elif potential != 0.0:
                out += potential * values
            return out

        return apply


def hamiltonian_apply(
    psi: WaveFunction,
    A: "VectorField | None",
    params: PhysicalParams,
    coulomb: "CoulombSpec | None" = None,
) -> np.ndarray:
    """One-shot H[A] psi for tests and diagnostics; returns raw values."""
    ham = MagneticHamiltonian(psi.grid, params, coulomb)
    return ham.bound(A)(psi.values)


def _lanczos_attempt(
    apply_h: Callable[[np.ndarray], np.ndarray],
    values: np.ndarray,
    theta: float,
    m_max: int,
    tol: float,
) -> "np.ndarray | None":
    """One Krylov solve of exp(-i theta H) v; None when the residual stays high.

    theta = dt / hbar (signed).  The estimate beta_next * |theta| * |u_m| bounds
    the integrated defect of the Krylov approximation relative to ||v||.
    """
    beta0 = float(np.linalg.norm(values.ravel()))
    if beta0 == 0.0 or theta == 0.0:
        return values.copy()
    basis = [values / beta0]
    alphas: list[float] = []
    betas: list[float] = []
    w = apply_h(basis[0])
    alphas.append(float(np.vdot(basis[0], w).real))
    w = w - alphas[0] * basis[0]
    while True:
        beta_next = float(np.linalg.norm(w.ravel()))
        eigvals, eigvecs = scipy.linalg.eigh_tridiagonal(alphas, betas)
        u = eigvecs @ (np.exp(-1j * theta * eigvals) * eigvecs[0, :])
        estimate = beta_next * abs(theta) * abs(u[-1])
        if beta_next < 1e-13 * beta0 or estimate <= tol:
            combo = u[0] * basis[0]
            for coeff, vec in zip(u[1:], basis[1:]):
                combo = combo + coeff * vec
            return beta0 * combo
        if len(alphas) == m_max:
            return None
        v_next = w / beta_next
        w = apply_h(v_next) - beta_next * basis[-1]
        alpha = float(np.vdot(v_next, w).real)
        w = w - alpha * v_next
        # full reorthogonalization: cheap at these Krylov sizes, keeps the
        # basis orthonormal so the small eigenproblem stays faithful
        for vec in basis:
            w = w - np.vdot(vec, w) * vec
        w = w - np.vdot(v_next, w) * v_next
        basis.append(v_next)
        alphas.append(alpha)
        betas.append(beta_next)


def krylov_propagate(
    apply_h: Callable[[np.ndarray], np.ndarray],
    values: np.ndarray,
    dt: float,
    hbar: float,
    config: StepperConfig,
) -> np.ndarray:
    """exp(-i dt H / hbar) applied to values, bisecting until the residual passes."""
    theta = dt / hbar
    pieces = 1
    for _ in range(config.max_halvings + 1):
        current = values
        ok = True
        for _ in range(pieces):
            step = _lanczos_attempt(apply_h, current, theta / pieces, config.krylov_dim, config.krylov_tol)
            if step is None:
                ok = False
                break
            current = step
        if ok:
            return current
        pieces *= 2
    raise NumericalAbort(
        f"Krylov residual stayed above {config.krylov_tol} after {config.max_halvings} bisections"
    )


def schrodinger_step(
    psi: WaveFunction,
    A: "VectorField | None",
    dt: float,
    params: PhysicalParams,
    coulomb: "CoulombSpec | None" = None,
    config: StepperConfig = StepperConfig(),
) -> WaveFunction:
    """Single frozen-field step exp(-i dt H[A] / hbar) psi."""
    ham = MagneticHamiltonian(psi.grid, params, coulomb)
    out = krylov_propagate(ham.bound(A), psi.values, dt, params.hbar, config)
    return replace(psi, values=out)


def _midpoint_field(a: "VectorField | None", b: "VectorField | None") -> "VectorField | None":
    if a is None or b is None:
        return None
    return VectorField(a.grid, 0.5 * (a.values + b.values))


def _as_field_list(field_samples, n_nodes: int) -> list:
    if field_samples is None:
        return [None] * n_nodes
    if len(field_samples) != n_nodes:
        raise ValueError(f"{len(field_samples)} field samples for {n_nodes} time nodes")
    return list(field_samples)


def _check_uniform(times: np.ndarray) -> float:
    """Signed uniform step; negative spacing runs the evolution backward."""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 2:
        raise ValueError("need at least two time nodes")
    steps = np.diff(times)
    if (steps > 0).all() or (steps < 0).all():
        if np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
            return float(steps[0])
    raise ValueError("time nodes must be uniformly spaced and monotone")


def evolve_schrodinger(
    psi0: WaveFunction,
    field_samples,
    times: np.ndarray,
    params: PhysicalParams,
    coulomb: "CoulombSpec | None" = None,
    config: StepperConfig = StepperConfig(),
    ham: "MagneticHamiltonian | None" = None,
) -> list[WaveFunction]:
    """Propagate psi0 across a uniform time grid under sampled fields.

    Within each interval the field is frozen at the average of the endpoint
    samples. Decreasing times propagate backward, which is the inverse of the
    forward sweep over the reversed sample list.
    """
    dt = _check_uniform(times)
    n_nodes = len(np.asarray(times))
    fields = _as_field_list(field_samples, n_nodes)
    if ham is None:
        ham = MagneticHamiltonian(psi0.grid, params, coulomb)
    out = [psi0]
    values = psi0.values
    for i in range(n_nodes - 1):
        apply_h = ham.bound(_midpoint_field(fields[i], fields[i + 1]))
        for _ in range(config.substeps):
            values = krylov_propagate(apply_h, values, dt / config.substeps, params.hbar, config)
        out.append(replace(psi0, values=values))
    return out


def evolve_schrodinger_inhomogeneous(
    psi_tau: WaveFunction,
    field_samples,
    f_samples,
    times: np.ndarray,
    params: PhysicalParams,
    coulomb: "CoulombSpec | None" = None,
    config: StepperConfig = StepperConfig(),
    ham: "MagneticHamiltonian | None" = None,
) -> list[WaveFunction]:
    """Duhamel solution of i hbar d_t xi = H xi + f from data psi_tau at times[0].

    Marching form of the trapezoid rule: each step propagates the state plus
    half a step of the local source, then adds the other half at the new node,

        xi_{n+1} = U_n [ xi_n - (i dt / 2 hbar) f_n ] - (i dt / 2 hbar) f_{n+1}

    which telescopes (by the group property of the U_n) into the global
    trapezoid discretization of the Duhamel integral. With f = 0 this is the
    homogeneous evolution exactly.
    """
    dt = _check_uniform(times)
    n_nodes = len(np.asarray(times))
    fields = _as_field_list(field_samples, n_nodes)
    if f_samples is None:
        return evolve_schrodinger(psi_tau, field_samples, times, params, coulomb, config, ham)
    if len(f_samples) != n_nodes:
        raise ValueError(f"{len(f_samples)} source samples for {n_nodes} time nodes")
    sources = [s.values if isinstance(s, WaveFunction) else np.asarray(s) for s in f_samples]
    if ham is None:
        ham = MagneticHamiltonian(psi_tau.grid, params, coulomb)
    half = -0.5j * dt / params.hbar
    out = [psi_tau]
    values = psi_tau.values
    for i in range(n_nodes - 1):
        apply_h = ham.bound(_midpoint_field(fields[i], fields[i + 1]))
        staged = values + half * sources[i]
        for _ in range(config.substeps):
            staged = krylov_propagate(apply_h, staged, dt / config.substeps, params.hbar, config)
        values = staged + half * sources[i + 1]
        out.append(replace(psi_tau, values=values))
    return out
