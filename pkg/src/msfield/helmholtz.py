"""Leray/Helmholtz projection onto divergence-free vector fields.

The projection acts mode by mode as I - k k^T / |k|^2 using derivative
wavenumbers (Nyquist entries zeroed, see SpectralGrid), which keeps real
fields real; modes with no derivative content, the constant mode included,
pass through whole since they are divergence-free on the torus. Divergence
is measured in the H^{-1} norm so residuals are comparable across grids.
"""

from __future__ import annotations

import numpy as np

from .spectral import SpectralGrid, VectorField, forward_transform, inverse_transform

__all__ = ["project", "divergence_residual", "curl_norm"]


def _projected_spectrum(grid: SpectralGrid, hat: np.ndarray) -> np.ndarray:
    """Apply I - k k^T/|k|^2 to a stacked (3, M, M, M) spectrum."""
    kaxes = grid.derivative_wavenumber_tuple()
    k_dot = sum(kaxes[a] * hat[a] for a in range(3))
    k_sq = sum(kaxes[a] ** 2 for a in range(3))
    positive = k_sq > 0
    scale = np.where(positive, k_dot / np.where(positive, k_sq, 1.0), 0.0)
    out = np.empty_like(hat)
    for a in range(3):
        out[a] = hat[a] - kaxes[a] * scale
    return out


def project(v: VectorField) -> VectorField:
    """Orthogonal projection of a vector field onto its divergence-free part."""
    hat = np.stack([forward_transform(v.values[a]) for a in range(3)])
    out = _projected_spectrum(v.grid, hat)
    spatial = np.stack([inverse_transform(out[a]) for a in range(3)])
    return VectorField.from_complex(v.grid, spatial)


def divergence_residual(v: VectorField) -> float:
    """H^{-1} norm of the spectral divergence i k . vhat."""
    grid = v.grid
    kaxes = grid.derivative_wavenumber_tuple()
    div_hat = sum(kaxes[a] * forward_transform(v.values[a]) for a in range(3))
    power = np.abs(div_hat) ** 2 / (1.0 + grid.k_squared)
    weight = grid.volume / grid.points ** (2 * grid.dim)
    return float(np.sqrt(weight * power.sum()))


def curl_norm(v: VectorField) -> float:
    """L2 norm of curl v, evaluated spectrally via |k x vhat|."""
    grid = v.grid
    kx, ky, kz = grid.derivative_wavenumber_tuple()
    hx, hy, hz = (forward_transform(v.values[a]) for a in range(3))
    power = (
        np.abs(ky * hz - kz * hy) ** 2
        + np.abs(kz * hx - kx * hz) ** 2
        + np.abs(kx * hy - ky * hx) ** 2
    )
    weight = grid.volume / grid.points ** (2 * grid.dim)
    return float(np.sqrt(weight * power.sum()))