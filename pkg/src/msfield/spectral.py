"""Periodic spectral grids, Fourier multipliers, and the norm toolkit.

Everything downstream runs on a uniform grid over the torus [0, L)^d with an
even number of points per axis.  The discrete transform convention is the
plain unnormalized forward sum with the 1/M^d factor on the inverse, so all
quadrature carries an explicit cell-volume weight (L/M)^d.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
import scipy.fft as _fft

__all__ = [
    "SpectralGrid",
    "ScalarField",
    "VectorField",
    "forward_transform",
    "inverse_transform",
    "apply_multiplier",
    "sobolev_norm",
    "lebesgue_norm",
    "spacetime_norm",
]


def fft_workers() -> int:
    """Worker count for scipy.fft, controlled by MSFIELD_THREADS."""
    raw = os.environ.get("MSFIELD_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform periodic grid on [0, length)^dim.

    ``points`` is the sample count per axis; it must be even and at least 4
    so the wavenumber lattice is symmetric apart from the lone Nyquist mode.
    Grids compare equal iff (points, length, dim) agree, which is the
    compatibility notion used by every operation that mixes fields.
    """

    points: int
    length: float
    dim: int

    def __post_init__(self) -> None:
        if self.points < 4 or self.points % 2 != 0:
            raise ValueError(f"points per axis must be even and >= 4, got {self.points}")
        if not (self.length > 0 and np.isfinite(self.length)):
            raise ValueError(f"box length must be positive and finite, got {self.length}")
        if self.dim < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dim}")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points,) * self.dim

    @property
    def spacing(self) -> float:
        return self.length / self.points

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    @property
    def volume(self) -> float:
        return self.length**self.dim

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Per-axis wavenumbers 2*pi*m/length in FFT ordering, m in [-M/2, M/2)."""
        k = 2.0 * np.pi * np.fft.fftfreq(self.points, d=self.spacing)
        k.flags.writeable = False
        return k

    def axis_wavenumber(self, axis: int) -> np.ndarray:
        """Wavenumbers along one axis, shaped to broadcast over the grid."""
        if not 0 <= axis < self.dim:
            raise ValueError(f"axis {axis} out of range for dim {self.dim}")
        shape = [1] * self.dim
        shape[axis] = self.points
        return self.wavenumbers.reshape(shape)

    @cached_property
    def derivative_wavenumbers(self) -> np.ndarray:
        """Per-axis wavenumbers for first derivatives of real fields.

        The lone Nyquist mode has no mirror partner, so any odd multiplier
        built from it breaks conjugate symmetry; zeroing it keeps first
        derivatives of real fields real while agreeing with the standard
        wavenumbers on every resolved mode.
        """
        k = self.wavenumbers.copy()
        k[self.points // 2] = 0.0
        k.flags.writeable = False
        return k

    def axis_derivative_wavenumber(self, axis: int) -> np.ndarray:
        """Derivative wavenumbers along one axis, shaped to broadcast."""
        if not 0 <= axis < self.dim:
            raise ValueError(f"axis {axis} out of range for dim {self.dim}")
        shape = [1] * self.dim
        shape[axis] = self.points
        return self.derivative_wavenumbers.reshape(shape)

    def derivative_wavenumber_tuple(self) -> tuple[np.ndarray, ...]:
        return tuple(self.axis_derivative_wavenumber(a) for a in range(self.dim))

    def wavenumber_tuple(self) -> tuple[np.ndarray, ...]:
        return tuple(self.axis_wavenumber(a) for a in range(self.dim))

    @cached_property
    def k_squared(self) -> np.ndarray:
        """|k|^2 on the full grid (broadcast sum, cached)."""
        out = np.zeros(self.shape)
        for a in range(self.dim):
            out = out + self.axis_wavenumber(a) ** 2
        out.flags.writeable = False
        return out

    def bessel_weights(self, s: float) -> np.ndarray:
        """<k>^s = (1 + |k|^2)^(s/2) on the full grid."""
        if s == 0:
            return np.ones(self.shape)
        return (1.0 + self.k_squared) ** (0.5 * s)

    def axis_coordinate(self, axis: int) -> np.ndarray:
        """Sample coordinates along one axis, shaped to broadcast over the grid."""
        if not 0 <= axis < self.dim:
            raise ValueError(f"axis {axis} out of range for dim {self.dim}")
        x = np.arange(self.points) * self.spacing
        shape = [1] * self.dim
        shape[axis] = self.points
        return x.reshape(shape)


@dataclass(frozen=True)
class ScalarField:
    """Complex scalar samples on a spectral grid."""

    grid: SpectralGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} does not match grid shape {self.grid.shape}")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class VectorField:
    """Real 3-component vector samples on a 3-dimensional spectral grid."""

    grid: SpectralGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.grid.dim != 3:
            raise ValueError(f"vector fields live on 3-dimensional grids, got dim {self.grid.dim}")
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (3,) + self.grid.shape:
            raise ValueError(f"values shape {v.shape} does not match (3,)+{self.grid.shape}")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_complex(
        cls, grid: SpectralGrid, values: np.ndarray, rel_tol: float = 1e-9, abs_tol: float = 1e-12
    ) -> "VectorField":
        """Strip a roundoff-level imaginary part, rejecting anything larger."""
        values = np.asarray(values)
        if np.iscomplexobj(values):
            scale = float(np.max(np.abs(values)))
            worst = float(np.max(np.abs(values.imag)))
            if worst > rel_tol * scale + abs_tol:
                raise ValueError(
                    f"vector field has non-negligible imaginary part ({worst:.3e} vs scale {scale:.3e})"
                )
            values = values.real
        return cls(grid, values)

    @classmethod
    def zero(cls, grid: SpectralGrid) -> "VectorField":
        return cls(grid, np.zeros((3,) + grid.shape))

    def __add__(self, other: "VectorField") -> "VectorField":
        _require_same_grid(self.grid, other.grid)
        return VectorField(self.grid, self.values + other.values)

    def __sub__(self, other: "VectorField") -> "VectorField":
        _require_same_grid(self.grid, other.grid)
        return VectorField(self.grid, self.values - other.values)

    def __mul__(self, scalar: float) -> "VectorField":
        return VectorField(self.grid, self.values * float(scalar))

    __rmul__ = __mul__


def _require_same_grid(a: SpectralGrid, b: SpectralGrid) -> None:
    if a != b:
        raise ValueError(f"grid mismatch: {a} vs {b}")


def forward_transform(values: np.ndarray) -> np.ndarray:
    """Unnormalized forward FFT over every axis."""
    return _fft.fftn(values, workers=fft_workers())


def inverse_transform(values: np.ndarray) -> np.ndarray:
    """Inverse FFT (carries the 1/M^d factor) over every axis."""
    return _fft.ifftn(values, workers=fft_workers())


def _check_finite(values: np.ndarray, what: str) -> None:
    finite = np.isfinite(values.real) & np.isfinite(values.imag) if np.iscomplexobj(values) else np.isfinite(values)
    if not finite.all():
        idx = tuple(int(i) for i in np.argwhere(~finite)[0])
        raise ValueError(f"{what} contains a non-finite entry, first at index {idx}")


Multiplier = Callable[[tuple[np.ndarray, ...]], "np.ndarray | complex | float"]


def apply_multiplier(field, m: Multiplier):
    """Apply a Fourier multiplier m(k) and return a field of the same type.

    ``m`` receives a tuple of per-axis wavenumber arrays shaped to broadcast
    over the grid, e.g. ``lambda k: sum(ki**2 for ki in k)`` for -Laplacian.
    Vector fields are treated componentwise and must come back real, which
    holds for any multiplier that is real and even in k.
    """
    grid = field.grid
    kvec = grid.wavenumber_tuple()
    symbol = np.asarray(m(kvec))
    _check_finite(symbol, "multiplier symbol")
    if isinstance(field, VectorField):
        _check_finite(field.values, "vector field")
        out = np.empty(field.values.shape, dtype=np.complex128)
        for comp in range(3):
            out[comp] = inverse_transform(symbol * forward_transform(field.values[comp]))
        return VectorField.from_complex(grid, out)
    _check_finite(field.values, "scalar field")
    out = inverse_transform(symbol * forward_transform(field.values))
    return replace(field, values=out)


def _spectral_weight_sq(field) -> "tuple[np.ndarray, SpectralGrid]":
    """Sum over components of |fhat|^2, plus the grid."""
    grid = field.grid
    if isinstance(field, VectorField):
        acc = np.zeros(grid.shape)
        for comp in range(3):
            acc += np.abs(forward_transform(field.values[comp])) ** 2
        return acc, grid
    return np.abs(forward_transform(field.values)) ** 2, grid


def sobolev_norm(field, s: float) -> float:
    """H^s norm: quadrature-weighted l2 of <k>^s fhat.

    With the unnormalized-forward convention the Parseval weight is
    volume / points^(2 dim), so sobolev_norm(f, 0) equals the grid L2 norm.
    """
    power, grid = _spectral_weight_sq(field)
    if s != 0:
        power = power * (1.0 + grid.k_squared) ** s
    weight = grid.volume / grid.points ** (2 * grid.dim)
    return float(np.sqrt(weight * power.sum()))


def _pointwise_magnitude(field) -> np.ndarray:
    if isinstance(field, VectorField):
        return np.sqrt(np.sum(field.values**2, axis=0))
    return np.abs(field.values)


def lebesgue_norm(field, r: float) -> float:
    """L^r norm with cell-volume quadrature; r = inf gives the grid max."""
    if not (r >= 1):
        raise ValueError(f"Lebesgue exponent must satisfy r >= 1, got {r}")
    mag = _pointwise_magnitude(field)
    if np.isinf(r):
        return float(mag.max())
    return float((np.sum(mag**r) * field.grid.cell_volume) ** (1.0 / r))


def _sobolev_lebesgue(field, s: float, r: float) -> float:
    """W^(s,r) surrogate: Bessel multiplier first, then the L^r norm."""
    if s != 0:
        field = apply_multiplier(field, lambda k, _s=s: field.grid.bessel_weights(_s))
    return lebesgue_norm(field, r)


def spacetime_norm(times: Sequence[float], fields: Sequence, q: float, s: float, r: float) -> float:
    """L^q-in-time of the W^(s,r)-in-space norms, by trapezoid (max for q = inf).

    ``times`` must be a uniform, strictly increasing sample set with at least
    two nodes; ``fields`` holds one spatial field per node on a shared grid.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 2:
        raise ValueError("need at least two time samples")
    if len(fields) != times.size:
        raise ValueError(f"{len(fields)} fields for {times.size} time samples")
    steps = np.diff(times)
    if not (steps > 0).all():
        raise ValueError("time samples must be strictly increasing")
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        raise ValueError("time samples must be uniformly spaced")
    grid = fields[0].grid
    for f in fields[1:]:
        _require_same_grid(grid, f.grid)
    if not (q >= 1):
        raise ValueError(f"time exponent must satisfy q >= 1, got {q}")
    weights = np.array([_sobolev_lebesgue(f, s, r) for f in fields])
    if np.isinf(q):
        return float(weights.max())
    return float(np.trapezoid(weights**q, dx=steps[0]) ** (1.0 / q))
