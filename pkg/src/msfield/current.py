"""Probability currents sourced by the wavefunction.

The per-particle current is minus the charge-to-mass weighted real part of
the covariant momentum density, integrated over every other particle:

    J_j(x) = -(Q_j/m_j) Re [ integral conj(psi) (i hbar grad_j + (Q_j/c) A(x_j)) psi dx' ]

evaluated on the 3-dimensional field grid. Derivatives are spectral.
"""

from __future__ import annotations

import numpy as np

from . import helmholtz
from .fields import PhysicalParams, WaveFunction, marginal_integrate, particle_axes
from .spectral import SpectralGrid, VectorField, forward_transform, inverse_transform

__all__ = ["current_density", "projected_total_current"]


def _field_grid_for(psi: WaveFunction) -> SpectralGrid:
    return SpectralGrid(psi.grid.points, psi.grid.length, 3)


def current_density(psi: WaveFunction, A: "VectorField | None", j: int, params: PhysicalParams) -> VectorField:
    """Current of particle j on the field grid; A = None means zero field."""
    n = psi.n_particles
    if n != params.n_particles:
        raise ValueError(f"wavefunction has {n} particles but params describe {params.n_particles}")
    grid3 = _field_grid_for(psi)
    if A is not None and A.grid != grid3:
        raise ValueError("field grid does not match the wavefunction's per-particle grid")
    q = params.charges[j - 1]
    m = params.masses[j - 1]
    axes = particle_axes(j, n)

    hat = forward_transform(psi.values)
    conj_vals = np.conj(psi.values)
    comps = np.empty((3,) + grid3.shape, dtype=np.complex128)
    for comp, axis in enumerate(axes):
        k = psi.grid.axis_wavenumber(axis)
        grad = inverse_transform(1j * k * hat)
        comps[comp] = marginal_integrate(conj_vals * (1j * params.hbar) * grad, psi.grid, j)
    out = comps.real
    if A is not None and q != 0.0:
        density = marginal_integrate((conj_vals * psi.values).real, psi.grid, j).real
        out = out + (q / params.c) * A.values * density
    return VectorField(grid3, -(q / m) * out)


def projected_total_current(psi: WaveFunction, A: "VectorField | None", params: PhysicalParams) -> VectorField:
    """Divergence-free part of the summed per-particle currents."""
    grid3 = _field_grid_for(psi)
    total = np.zeros((3,) + grid3.shape)
    for j in range(1, params.n_particles + 1):
        total = total + current_density(psi, A, j, params).values
    return helmholtz.project(VectorField(grid3, total))
