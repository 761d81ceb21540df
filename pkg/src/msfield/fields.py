"""State containers: wavefunctions, gauge field states, trajectories, snapshots.

The N-body wavefunction lives on a 3N-dimensional grid whose axes share the
per-axis sample count and box length with the 3-dimensional field grid.
Particle j (1-based) owns axes 3(j-1), 3(j-1)+1, 3(j-1)+2 in x, y, z order.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, replace

import numpy as np

from .spectral import SpectralGrid, VectorField, sobolev_norm

__all__ = [
    "PhysicalParams",
    "WaveFunction",
    "FieldState",
    "TrajectoryPair",
    "normalize",
    "exchange_symmetrize",
    "marginal_integrate",
    "particle_axes",
    "save_snapshot",
    "load_snapshot",
]

SNAPSHOT_MAGIC = b"MSFSNAP1"
SNAPSHOT_FORMAT = "msfield-snapshot-v1"


@dataclass(frozen=True)
class PhysicalParams:
    """Physical constants and per-particle data, Gaussian units.

    ``dimension_cap`` bounds 3N; the desk-scale default keeps configuration
    space at most six-dimensional so dense grids stay affordable.
    """

    hbar: float
    c: float
    masses: tuple[float, ...]
    charges: tuple[float, ...]
    dimension_cap: int = 6

    def __post_init__(self) -> None:
        object.__setattr__(self, "masses", tuple(float(m) for m in self.masses))
        object.__setattr__(self, "charges", tuple(float(q) for q in self.charges))
        if not (self.hbar > 0 and np.isfinite(self.hbar)):
            raise ValueError(f"hbar must be positive, got {self.hbar}")
        if not (self.c > 0 and np.isfinite(self.c)):
            raise ValueError(f"c must be positive, got {self.c}")
        if len(self.masses) == 0:
            raise ValueError("need at least one particle")
        if len(self.charges) != len(self.masses):
            raise ValueError(f"{len(self.charges)} charges for {len(self.masses)} masses")
        if any(not (m > 0 and np.isfinite(m)) for m in self.masses):
            raise ValueError(f"masses must be positive, got {self.masses}")
        if any(not np.isfinite(q) for q in self.charges):
            raise ValueError(f"charges must be finite, got {self.charges}")
        if 3 * self.n_particles > self.dimension_cap:
            raise ValueError(
                f"3N = {3 * self.n_particles} exceeds the dimension cap {self.dimension_cap}"
            )

    @property
    def n_particles(self) -> int:
        return len(self.masses)

    @property
    def identical_particles(self) -> bool:
        return len(set(self.masses)) == 1 and len(set(self.charges)) == 1


def particle_axes(j: int, n_particles: int) -> tuple[int, int, int]:
    """Configuration-space axes owned by particle j (1-based)."""
    if not 1 <= j <= n_particles:
        raise ValueError(f"particle index {j} out of range 1..{n_particles}")
    base = 3 * (j - 1)
    return (base, base + 1, base + 2)


@dataclass(frozen=True)
class WaveFunction:
    """Complex wavefunction samples on a 3N-dimensional grid."""

    grid: SpectralGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.grid.dim % 3 != 0:
            raise ValueError(f"wavefunction grid dimension must be a multiple of 3, got {self.grid.dim}")
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} does not match grid shape {self.grid.shape}")
        object.__setattr__(self, "values", v)

    @property
    def n_particles(self) -> int:
        return self.grid.dim // 3


def normalize(psi: WaveFunction) -> WaveFunction:
    """Rescale to unit L2 norm; rejects the zero state."""
    norm = sobolev_norm(psi, 0)
    if norm < 1e-300:
        raise ValueError("cannot normalize a zero wavefunction")
    return replace(psi, values=psi.values / norm)


def exchange_map(psi: WaveFunction) -> WaveFunction:
    """Swap the two particle blocks: psi(x1, x2) -> psi(x2, x1)."""
    if psi.n_particles != 2:
        raise ValueError(f"exchange needs exactly two particles, got {psi.n_particles}")
    return replace(psi, values=np.transpose(psi.values, (3, 4, 5, 0, 1, 2)))


def exchange_symmetrize(psi: WaveFunction, sign: int) -> WaveFunction:
    """Project onto the symmetric (+1) or antisymmetric (-1) sector, then normalize."""
    if sign not in (+1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    combined = psi.values + sign * exchange_map(psi).values
    out = WaveFunction(psi.grid, combined)
    if sobolev_norm(out, 0) < 1e-12 * max(sobolev_norm(psi, 0), 1e-300):
        raise ValueError("state has no component in the requested symmetry sector")
    return normalize(out)


def marginal_integrate(values: np.ndarray, grid: SpectralGrid, j: int) -> np.ndarray:
    """Integrate out every particle block except j's (plain Riemann sum).

    Input is any array on the 3N grid (typically conj(psi) * g); the result is
    a complex 3-dimensional array carrying the cell-volume weight of the
    integrated blocks.  For a single particle the input comes back unchanged.
    """
    values = np.asarray(values)
    if values.shape != grid.shape:
        raise ValueError(f"values shape {values.shape} does not match grid shape {grid.shape}")
    n = grid.dim // 3
    keep = particle_axes(j, n)
    if n == 1:
        return values.copy()
    other = tuple(a for a in range(grid.dim) if a not in keep)
    cell3 = grid.spacing**3
    reduced = values.sum(axis=other) * cell3 ** (n - 1)
    # summing drops the kept axes into their original relative order, which is x, y, z
    return np.ascontiguousarray(reduced)


@dataclass(frozen=True)
class FieldState:
    """Gauge field sample pair (A, dA/dt) on the 3-dimensional grid."""

    A: VectorField
    Adot: VectorField

    def __post_init__(self) -> None:
        if self.A.grid != self.Adot.grid:
            raise ValueError("A and Adot must share a grid")

    @property
    def grid(self) -> SpectralGrid:
        return self.A.grid

    @classmethod
    def zero(cls, grid: SpectralGrid) -> "FieldState":
        return cls(VectorField.zero(grid), VectorField.zero(grid))


@dataclass(frozen=True)
class TrajectoryPair:
    """Time-sampled (psi, field) pair on a shared uniform time grid."""

    times: np.ndarray
    psis: tuple[WaveFunction, ...]
    fields: tuple[FieldState, ...]

    def __post_init__(self) -> None:
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or t.size < 2:
            raise ValueError("trajectory needs at least two time nodes")
        steps = np.diff(t)
        if not (steps > 0).all():
            raise ValueError("trajectory times must be strictly increasing")
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
            raise ValueError("trajectory times must be uniformly spaced")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "psis", tuple(self.psis))
        object.__setattr__(self, "fields", tuple(self.fields))
        if len(self.psis) != t.size or len(self.fields) != t.size:
            raise ValueError(
                f"{len(self.psis)} psi samples / {len(self.fields)} field samples for {t.size} nodes"
            )
        pgrid = self.psis[0].grid
        fgrid = self.fields[0].grid
        for p in self.psis:
            if p.grid != pgrid:
                raise ValueError("all wavefunction samples must share a grid")
        for f in self.fields:
            if f.grid != fgrid:
                raise ValueError("all field samples must share a grid")
        if pgrid.points != fgrid.points or pgrid.length != fgrid.length:
            raise ValueError("wavefunction and field grids must share points and length")

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def n_nodes(self) -> int:
        return int(self.times.size)

    @property
    def psi_grid(self) -> SpectralGrid:
        return self.psis[0].grid

    @property
    def field_grid(self) -> SpectralGrid:
        return self.fields[0].grid

    def a_samples(self) -> list[VectorField]:
        return [f.A for f in self.fields]


def _atomic_write(path: str, payload: bytes) -> None:
    """Write via a sibling temp file and rename, so readers never see a torso."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-snapshot-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_snapshot(path: str, arrays: dict[str, np.ndarray], meta: dict) -> None:
    """Write a single-file snapshot: magic, JSON header, raw complex doubles.

    Arrays are coerced to complex128 and stored C-order (axis-major); the
    header records name, shape, and byte offset for each. The format round
    trips bit-exactly.
    """
    table = []
    blobs = []
    offset = 0
    for name, arr in arrays.items():
        data = np.ascontiguousarray(np.asarray(arr, dtype=np.complex128))
        table.append({"name": name, "shape": list(data.shape), "dtype": "complex128", "offset": offset, "nbytes": data.nbytes})
        blobs.append(data.tobytes())
        offset += data.nbytes
    header = json.dumps({"format": SNAPSHOT_FORMAT, "meta": meta, "arrays": table}).encode()
    payload = SNAPSHOT_MAGIC + len(header).to_bytes(8, "little") + header + b"".join(blobs)
    _atomic_write(path, payload)


def load_snapshot(path: str) -> tuple[dict[str, np.ndarray], dict]:
    """Read a snapshot back as (arrays, meta)."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[: len(SNAPSHOT_MAGIC)] != SNAPSHOT_MAGIC:
        raise ValueError(f"{path} is not a snapshot file (bad magic)")
    cursor = len(SNAPSHOT_MAGIC)
    header_len = int.from_bytes(blob[cursor : cursor + 8], "little")
    cursor += 8
    header = json.loads(blob[cursor : cursor + header_len].decode())
    if header.get("format") != SNAPSHOT_FORMAT:
        raise ValueError(f"unsupported snapshot format {header.get('format')!r}")
    cursor += header_len
    arrays = {}
    for entry in header["arrays"]:
        start = cursor + entry["offset"]
        data = np.frombuffer(blob[start : start + entry["nbytes"]], dtype=np.complex128)
        arrays[entry["name"]] = data.reshape(entry["shape"]).copy()
    return arrays, header["meta"]


def snapshot_header(path: str) -> dict:
    """Header dict of a snapshot without loading the payload."""
    with open(path, "rb") as fh:
        magic = fh.read(len(SNAPSHOT_MAGIC))
        if magic != SNAPSHOT_MAGIC:
            raise ValueError(f"{path} is not a snapshot file (bad magic)")
        header_len = int.from_bytes(fh.read(8), "little")
        return json.loads(fh.read(header_len).decode())
