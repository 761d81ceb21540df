"""YAML run configuration: parsing, aggregated validation, object builders.

A config file fully determines a run (the CLI may override only the output
directory and the seed).  Validation collects every problem before raising,
so a bad file is reported in one pass.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import yaml

from .coupler import InitialData, PicardConfig
from .diagnostics import symmetry_residual
from .errors import ConfigError
from .fields import PhysicalParams, WaveFunction, load_snapshot
from .initial_data import gaussian_packet, plane_wave_field, random_transverse_field, zero_field
from .schrodinger import CoulombSpec, StepperConfig
from .spectral import SpectralGrid, VectorField, sobolev_norm

__all__ = ["RunConfig", "load_config", "parse_config", "build_run"]

_SYMMETRIES = (None, "none", "symmetric", "antisymmetric")


@dataclass
class RunConfig:
    """Validated run description, one-to-one with the YAML document."""

    physical: dict
    grid: dict
    coulomb: "dict | None"
    initial: dict
    evolution: dict
    picard: dict
    stepper: dict
    output: dict
    seed: int = 0
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def symmetry(self) -> "str | None":
        sym = self.initial["wavefunction"].get("symmetry")
        return None if sym in (None, "none") else sym

    @property
    def symmetry_sign(self) -> "int | None":
        return {None: None, "symmetric": 1, "antisymmetric": -1}[self.symmetry]


def _require(mapping: dict, key: str, kind, problems: list, where: str, default=None):
    if key not in mapping:
        if default is not None:
            return default
        problems.append(f"{where}: missing required key '{key}'")
        return None
    value = mapping[key]
    if kind is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if kind is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if kind is bool and isinstance(value, bool):
        return value
    if kind is list and isinstance(value, list):
        return value
    if kind is dict and isinstance(value, dict):
        return value
    if kind is str and isinstance(value, str):
        return value
    problems.append(f"{where}: '{key}' must be {kind.__name__}, got {type(value).__name__}")
    return None


def _int_triple(value, problems: list, where: str):
    if (
        isinstance(value, list)
        and len(value) == 3
        and all(isinstance(v, int) and not isinstance(v, bool) for v in value)
    ):
        return [int(v) for v in value]
    problems.append(f"{where}: expected a list of three integers, got {value!r}")
    return None


def _float_triple(value, problems: list, where: str):
    if (
        isinstance(value, list)
        and len(value) == 3
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        return [float(v) for v in value]
    problems.append(f"{where}: expected a list of three numbers, got {value!r}")
    return None


def parse_config(doc: dict) -> RunConfig:
    """Validate a parsed YAML mapping; raises ConfigError listing all problems."""
    problems: list[str] = []
    if not isinstance(doc, dict):
        raise ConfigError(["top level must be a mapping"])

    known = {"physical", "grid", "coulomb", "initial", "evolution", "picard", "stepper", "output", "seed"}
    for key in doc:
        if key not in known:
            problems.append(f"unknown top-level key '{key}'")

    def _reject_unknown(mapping, allowed, where):
        for key in mapping:
            if key not in allowed:
                problems.append(f"{where}: unknown key '{key}'")

    physical = _require(doc, "physical", dict, problems, "top level") or {}
    grid = _require(doc, "grid", dict, problems, "top level") or {}
    initial = _require(doc, "initial", dict, problems, "top level") or {}
    evolution = _require(doc, "evolution", dict, problems, "top level") or {}
    picard = doc.get("picard") or {}
    stepper = doc.get("stepper") or {}
    output = doc.get("output") or {}
    coulomb = doc.get("coulomb")
    _reject_unknown(physical, {"hbar", "c", "masses", "charges"}, "physical")
    _reject_unknown(grid, {"points", "length"}, "grid")
    _reject_unknown(initial, {"wavefunction", "field"}, "initial")
    _reject_unknown(evolution, {"horizon", "nodes"}, "evolution")
    _reject_unknown(
        picard,
        {"tol", "max_iterations", "contraction_guard", "horizon_shrink", "min_horizon", "adaptive", "continuation"},
        "picard",
    )
    _reject_unknown(stepper, {"krylov_dim", "krylov_tol", "substeps", "max_halvings"}, "stepper")
    _reject_unknown(output, {"snapshots", "directory"}, "output")
    seed = doc.get("seed", 0)
    if not (isinstance(seed, int) and not isinstance(seed, bool) and seed >= 0):
        problems.append(f"seed: must be a nonnegative integer, got {seed!r}")
        seed = 0

    masses = _require(physical, "masses", list, problems, "physical") or []
    charges = _require(physical, "charges", list, problems, "physical") or []
    hbar = _require(physical, "hbar", float, problems, "physical", default=1.0)
    c = _require(physical, "c", float, problems, "physical", default=10.0)
    n = len(masses)
    if masses and charges and len(charges) != n:
        problems.append(f"physical: {len(charges)} charges for {n} masses")
    if masses:
        try:
            PhysicalParams(hbar or 1.0, c or 1.0, masses, charges or [0.0] * n)
        except (ValueError, TypeError) as exc:
            problems.append(f"physical: {exc}")

    points = _require(grid, "points", int, problems, "grid")
    length = _require(grid, "length", float, problems, "grid", default=2.0 * np.pi)
    if points is not None:
        if points < 4:
            problems.append(f"grid: points must be at least 4, got {points}")
        elif points % 2 != 0:
            problems.append(f"grid: points must be even for a symmetric spectrum, got {points}")
    if length is not None and not (length > 0):
        problems.append(f"grid: length must be positive, got {length}")

    if coulomb is not None:
        if not isinstance(coulomb, dict):
            problems.append("coulomb: must be a mapping or omitted")
        else:
            _reject_unknown(coulomb, {"mode", "radius", "enabled"}, "coulomb")
            if "enabled" in coulomb and not isinstance(coulomb["enabled"], bool):
                problems.append(f"coulomb: enabled must be a boolean, got {coulomb['enabled']!r}")
            mode = coulomb.get("mode", "spectral")
            if mode not in ("spectral", "smeared"):
                problems.append(f"coulomb: mode must be 'spectral' or 'smeared', got {mode!r}")
            if mode == "smeared":
                radius = _require(coulomb, "radius", float, problems, "coulomb", default=0.5)
                if radius is not None and radius <= 0:
                    problems.append(f"coulomb: radius must be positive, got {radius}")

    wf = _require(initial, "wavefunction", dict, problems, "initial") or {}
    kind = wf.get("kind", "gaussian")
    if kind == "gaussian":
        _reject_unknown(wf, {"kind", "centers", "widths", "momentum_modes", "symmetry"}, "initial.wavefunction")
        centers = _require(wf, "centers", list, problems, "initial.wavefunction") or []
        widths = _require(wf, "widths", list, problems, "initial.wavefunction") or []
        modes = _require(wf, "momentum_modes", list, problems, "initial.wavefunction") or []
        if n and centers and len(centers) != n:
            problems.append(f"initial.wavefunction: {len(centers)} centers for {n} particles")
        if n and widths and len(widths) != n:
            problems.append(f"initial.wavefunction: {len(widths)} widths for {n} particles")
        if n and modes and len(modes) != n:
            problems.append(f"initial.wavefunction: {len(modes)} momentum modes for {n} particles")
        for j, center in enumerate(centers):
            _float_triple(center, problems, f"initial.wavefunction.centers[{j}]")
        for j, width in enumerate(widths):
            if not (isinstance(width, (int, float)) and not isinstance(width, bool) and width > 0):
                problems.append(f"initial.wavefunction.widths[{j}]: must be a positive number, got {width!r}")
        for j, mode in enumerate(modes):
            _int_triple(mode, problems, f"initial.wavefunction.momentum_modes[{j}]")
    elif kind == "snapshot":
        _reject_unknown(wf, {"kind", "path", "symmetry"}, "initial.wavefunction")
        _require(wf, "path", str, problems, "initial.wavefunction")
    else:
        problems.append(
            f"initial.wavefunction: unknown kind {kind!r} (one of 'gaussian', 'snapshot')"
        )
    sym = wf.get("symmetry")
    if sym not in _SYMMETRIES:
        problems.append(f"initial.wavefunction: symmetry must be one of {_SYMMETRIES[1:]}, got {sym!r}")
    elif sym in ("symmetric", "antisymmetric"):
        if n != 2:
            problems.append("initial.wavefunction: exchange symmetry needs exactly two particles")
        elif masses and charges and (masses[0] != masses[1] or charges[0] != charges[1]):
            problems.append("initial.wavefunction: exchange symmetry needs identical particles")

    fld = _require(initial, "field", dict, problems, "initial") or {}
    fkind = fld.get("kind", "zero")
    if fkind == "plane-wave":
        _reject_unknown(fld, {"kind", "amplitude", "mode", "polarization"}, "initial.field")
        _require(fld, "amplitude", float, problems, "initial.field")
        mode = _require(fld, "mode", list, problems, "initial.field")
        if mode is not None:
            _int_triple(mode, problems, "initial.field.mode")
        pol = _require(fld, "polarization", list, problems, "initial.field")
        if pol is not None:
            _float_triple(pol, problems, "initial.field.polarization")
    elif fkind == "random-transverse":
        _reject_unknown(fld, {"kind", "amplitude"}, "initial.field")
        _require(fld, "amplitude", float, problems, "initial.field")
    elif fkind == "snapshot":
        _reject_unknown(fld, {"kind", "path"}, "initial.field")
        _require(fld, "path", str, problems, "initial.field")
    elif fkind == "zero":
        _reject_unknown(fld, {"kind"}, "initial.field")
    else:
        problems.append(
            f"initial.field: unknown kind {fkind!r} "
            "(one of 'zero', 'plane-wave', 'random-transverse', 'snapshot')"
        )

    horizon = _require(evolution, "horizon", float, problems, "evolution")
    nodes = _require(evolution, "nodes", int, problems, "evolution")
    if horizon is not None and not (horizon > 0 and np.isfinite(horizon)):
        problems.append(f"evolution: horizon must be positive and finite, got {horizon}")
    if nodes is not None and nodes < 2:
        problems.append(f"evolution: nodes must be at least 2, got {nodes}")

    for key, lo, hi in (("tol", 0.0, 1.0), ("contraction_guard", 0.0, 1.0), ("horizon_shrink", 0.0, 1.0)):
        if key in picard:
            value = picard[key]
            if not (isinstance(value, (int, float)) and not isinstance(value, bool) and lo < value < hi):
                problems.append(f"picard: {key} must be a number in ({lo}, {hi}), got {value!r}")
    if "max_iterations" in picard:
        value = picard["max_iterations"]
        if not (isinstance(value, int) and not isinstance(value, bool) and value >= 1):
            problems.append(f"picard: max_iterations must be a positive integer, got {value!r}")
    for key in ("adaptive", "continuation"):
        if key in picard and not isinstance(picard[key], bool):
            problems.append(f"picard: {key} must be a boolean, got {picard[key]!r}")
    if "min_horizon" in picard and picard["min_horizon"] is not None:
        value = picard["min_horizon"]
        if not (isinstance(value, (int, float)) and not isinstance(value, bool) and value > 0):
            problems.append(f"picard: min_horizon must be a positive number, got {value!r}")

    if stepper:
        try:
            StepperConfig(
                krylov_dim=stepper.get("krylov_dim", 12),
                krylov_tol=stepper.get("krylov_tol", 1e-9),
                substeps=stepper.get("substeps", 1),
                max_halvings=stepper.get("max_halvings", 16),
            )
        except (ValueError, TypeError) as exc:
            problems.append(f"stepper: {exc}")

    if "snapshots" in output and not isinstance(output["snapshots"], bool):
        problems.append(f"output: snapshots must be a boolean, got {output['snapshots']!r}")
    if "directory" in output and not isinstance(output["directory"], str):
        problems.append(f"output: directory must be a string, got {output['directory']!r}")

    if problems:
        raise ConfigError(problems)
    return RunConfig(physical, grid, coulomb, initial, evolution, picard, stepper, output, seed, doc)


def load_config(path: str) -> RunConfig:
    """Read and validate a YAML config file."""
    try:
        with open(path) as fh:
            doc = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ConfigError([f"not valid YAML: {exc}"]) from exc
    except OSError as exc:
        raise ConfigError([f"cannot read {path}: {exc}"]) from exc
    return parse_config(doc if doc is not None else {})


def _load_snapshot_arrays(path: str, where: str) -> dict:
    try:
        arrays, meta = load_snapshot(path)
    except (OSError, ValueError) as exc:
        raise ConfigError([f"{where}: {exc}"]) from exc
    return arrays


def _wavefunction_from_snapshot(path: str, grid: SpectralGrid, symmetry_sign: "int | None") -> WaveFunction:
    """Stored state, taken verbatim; it must already be admissible."""
    arrays = _load_snapshot_arrays(path, "initial.wavefunction")
    if "psi" not in arrays:
        raise ConfigError([f"initial.wavefunction: snapshot {path} has no 'psi' array"])
    values = arrays["psi"]
    if values.shape != grid.shape:
        raise ConfigError(
            [
                f"initial.wavefunction: snapshot psi shape {list(values.shape)} "
                f"does not match the configured grid {list(grid.shape)}"
            ]
        )
    psi = WaveFunction(grid, values)
    norm = sobolev_norm(psi, 0.0)
    if abs(norm - 1.0) > 1e-8:
        raise ConfigError([f"initial.wavefunction: snapshot state has norm {norm!r}, not 1"])
    if symmetry_sign is not None:
        defect = symmetry_residual(psi, symmetry_sign)
        if defect > 1e-8:
            raise ConfigError(
                [f"initial.wavefunction: snapshot state breaks the declared symmetry (defect {defect:.3e})"]
            )
    return psi


def _field_from_snapshot(path: str, grid3: SpectralGrid) -> tuple[VectorField, VectorField]:
    arrays = _load_snapshot_arrays(path, "initial.field")
    out = []
    for name in ("A", "Adot"):
        if name not in arrays:
            raise ConfigError([f"initial.field: snapshot {path} has no '{name}' array"])
        values = arrays[name]
        if values.shape != (3,) + grid3.shape:
            raise ConfigError(
                [
                    f"initial.field: snapshot {name} shape {list(values.shape)} "
                    f"does not match the configured grid {[3, *grid3.shape]}"
                ]
            )
        if np.any(values.imag != 0.0):
            raise ConfigError([f"initial.field: snapshot {name} is not a real field"])
        out.append(VectorField(grid3, np.ascontiguousarray(values.real)))
    return out[0], out[1]


def build_run(cfg: RunConfig):
    """Materialize simulation objects from a validated config.

    Returns (params, init, picard_config, coulomb, stepper_config).
    """
    params = PhysicalParams(
        hbar=float(cfg.physical.get("hbar", 1.0)),
        c=float(cfg.physical.get("c", 10.0)),
        masses=cfg.physical["masses"],
        charges=cfg.physical["charges"],
    )
    points = cfg.grid["points"]
    length = float(cfg.grid.get("length", 2.0 * np.pi))
    psi_grid = SpectralGrid(points, length, 3 * params.n_particles)
    field_grid = SpectralGrid(points, length, 3)

    wf = cfg.initial["wavefunction"]
    if wf.get("kind", "gaussian") == "snapshot":
        psi0 = _wavefunction_from_snapshot(wf["path"], psi_grid, cfg.symmetry_sign)
    else:
        psi0 = gaussian_packet(
            psi_grid, params, wf["centers"], wf["widths"], wf["momentum_modes"], symmetry=wf.get("symmetry")
        )

    fld = cfg.initial["field"]
    fkind = fld.get("kind", "zero")
    a1 = VectorField.zero(field_grid)
    if fkind == "zero":
        a0 = zero_field(field_grid)
    elif fkind == "plane-wave":
        a0 = plane_wave_field(field_grid, float(fld["amplitude"]), fld["mode"], fld["polarization"])
    elif fkind == "snapshot":
        a0, a1 = _field_from_snapshot(fld["path"], field_grid)
    else:
        rng = np.random.default_rng([cfg.seed, 0xF1E1D])
        a0 = random_transverse_field(field_grid, rng, amplitude=float(fld["amplitude"]))
    init = InitialData(psi0, a0, a1)

    picard = PicardConfig(
        T=float(cfg.evolution["horizon"]),
        n_t=int(cfg.evolution["nodes"]),
        tol=float(cfg.picard.get("tol", 1e-8)),
        max_iters=int(cfg.picard.get("max_iterations", 50)),
        contraction_guard=float(cfg.picard.get("contraction_guard", 0.9)),
        horizon_shrink=float(cfg.picard.get("horizon_shrink", 0.5)),
        min_horizon=cfg.picard.get("min_horizon"),
    )

    coulomb = None
    if cfg.coulomb is not None and cfg.coulomb.get("enabled", True):
        coulomb = CoulombSpec(
            mode=cfg.coulomb.get("mode", "spectral"),
            radius=float(cfg.coulomb.get("radius", 0.5)),
        )

    stepper = StepperConfig(
        krylov_dim=int(cfg.stepper.get("krylov_dim", 12)),
        krylov_tol=float(cfg.stepper.get("krylov_tol", 1e-9)),
        substeps=int(cfg.stepper.get("substeps", 1)),
        max_halvings=int(cfg.stepper.get("max_halvings", 16)),
    )
    return params, init, picard, coulomb, stepper
