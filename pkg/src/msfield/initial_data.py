"""Named initial-data generators plus band-limited random fields for checks.

Wavefunction packets are periodized over the box (nearest-image sum), and
packet momenta are snapped to the momentum lattice 2 pi hbar / L, so every
generated state is smooth on the torus rather than carrying a seam at the
boundary.  Field modes are integer wavevectors with the polarization
projected transverse, hence divergence-free by construction.
"""

from __future__ import annotations

import numpy as np

from .fields import PhysicalParams, WaveFunction, exchange_symmetrize, normalize
from .helmholtz import project
from .spectral import SpectralGrid, VectorField, forward_transform, inverse_transform

__all__ = [
    "gaussian_packet",
    "plane_wave_field",
    "zero_field",
    "random_band_scalar",
    "random_wavefunction",
    "random_transverse_field",
]


def _single_packet(grid3: SpectralGrid, center, width: float, momentum_mode) -> np.ndarray:
    """One periodized Gaussian packet with a lattice-momentum phase, on the 3D grid."""
    length = grid3.length
    x = [np.broadcast_to(grid3.axis_coordinate(a), grid3.shape) for a in range(3)]
    envelope = np.zeros(grid3.shape)
    for ix in (-1, 0, 1):
        for iy in (-1, 0, 1):
            for iz in (-1, 0, 1):
                shift = (ix * length, iy * length, iz * length)
                r_sq = sum((x[a] - center[a] + shift[a]) ** 2 for a in range(3))
                envelope += np.exp(-r_sq / (4.0 * width**2))
    k = 2.0 * np.pi / length
    phase = sum(k * int(momentum_mode[a]) * x[a] for a in range(3))
    return envelope * np.exp(1j * phase)


def gaussian_packet(
    grid: SpectralGrid,
    params: PhysicalParams,
    centers,
    widths,
    momentum_modes,
    symmetry: "str | None" = None,
) -> WaveFunction:
    """Product of per-particle packets, optionally (anti)symmetrized, unit norm.

    ``momentum_modes`` are integer lattice modes; the physical momentum of
    particle j is 2 pi hbar mode_j / L.  ``symmetry`` is one of None,
    "symmetric", "antisymmetric" (the latter two need N = 2).
    """
    n = params.n_particles
    if grid.dim != 3 * n:
        raise ValueError(f"grid dimension {grid.dim} does not match 3N = {3 * n}")
    if not (len(centers) == len(widths) == len(momentum_modes) == n):
        raise ValueError(f"need {n} centers, widths, and momentum modes")
    grid3 = SpectralGrid(grid.points, grid.length, 3)
    values = np.ones((), dtype=np.complex128)
    for j in range(n):
        packet = _single_packet(grid3, centers[j], float(widths[j]), momentum_modes[j])
        shape = [1] * grid.dim
        shape[3 * j : 3 * j + 3] = packet.shape
        values = values * packet.reshape(shape)
    psi = normalize(WaveFunction(grid, np.broadcast_to(values, grid.shape).copy()))
    if symmetry in ("symmetric", "antisymmetric"):
        psi = exchange_symmetrize(psi, +1 if symmetry == "symmetric" else -1)
    elif symmetry not in (None, "none"):
        raise ValueError(f"unknown symmetry {symmetry!r}")
    return psi


def plane_wave_field(
    grid3: SpectralGrid,
    amplitude: float,
    mode,
    polarization,
) -> VectorField:
    """Single transverse cosine mode amplitude * e * cos(k . x).

    ``mode`` is an integer wavevector (k = 2 pi mode / L); the polarization is
    projected orthogonal to it and normalized, so div A = 0 exactly.
    """
    mode = np.asarray(mode, dtype=float)
    if np.allclose(mode, 0.0):
        e = np.asarray(polarization, dtype=float)
        norm = np.linalg.norm(e)
        if norm == 0:
            raise ValueError("polarization must be a nonzero vector")
        values = np.zeros((3,) + grid3.shape)
        for a in range(3):
            values[a] = amplitude * e[a] / norm
        return VectorField(grid3, values)
    k_vec = 2.0 * np.pi * mode / grid3.length
    e = np.asarray(polarization, dtype=float)
    k_hat = k_vec / np.linalg.norm(k_vec)
    e = e - np.dot(e, k_hat) * k_hat
    norm = np.linalg.norm(e)
    if norm < 1e-12:
        raise ValueError("polarization is parallel to the mode vector")
    e = e / norm
    x = [np.broadcast_to(grid3.axis_coordinate(a), grid3.shape) for a in range(3)]
    carrier = np.cos(sum(k_vec[a] * x[a] for a in range(3)))
    values = np.stack([amplitude * e[a] * carrier for a in range(3)])
    return VectorField(grid3, values)


def zero_field(grid3: SpectralGrid) -> VectorField:
    return VectorField.zero(grid3)


def _band_mask(grid: SpectralGrid, band: float) -> np.ndarray:
    """Keep modes with every |index| <= band * (M/2); kills aliasing in products."""
    cutoff = band * (grid.points // 2)
    index = np.abs(np.fft.fftfreq(grid.points) * grid.points)
    mask = np.ones(grid.shape, dtype=bool)
    for a in range(grid.dim):
        shape = [1] * grid.dim
        shape[a] = grid.points
        mask &= index.reshape(shape) <= cutoff
    return mask


def random_band_scalar(grid: SpectralGrid, rng: np.random.Generator, band: float = 0.5) -> np.ndarray:
    """Complex random field with spectrum confined to the given band fraction."""
    raw = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    hat = forward_transform(raw) * _band_mask(grid, band)
    return inverse_transform(hat)


def random_wavefunction(grid: SpectralGrid, rng: np.random.Generator, band: float = 0.5) -> WaveFunction:
    return normalize(WaveFunction(grid, random_band_scalar(grid, rng, band)))


def random_transverse_field(
    grid3: SpectralGrid, rng: np.random.Generator, amplitude: float = 1.0, band: float = 0.5
) -> VectorField:
    """Real divergence-free random field, band-limited, scaled to max amplitude."""
    comps = np.stack([random_band_scalar(grid3, rng, band).real for _ in range(3)])
    field = project(VectorField(grid3, comps))
    peak = float(np.max(np.abs(field.values)))
    if peak == 0.0:
        return field
    return VectorField(grid3, field.values * (amplitude / peak))
