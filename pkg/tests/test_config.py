"""YAML configuration parsing, aggregated validation, object building."""

import copy

import numpy as np
import pytest

from msfield.config import build_run, load_config, parse_config
from msfield.coupler import PicardConfig
from msfield.errors import ConfigError
from msfield.fields import PhysicalParams
from msfield.schrodinger import CoulombSpec, StepperConfig

VALID = {
    "physical": {"hbar": 1.0, "c": 10.0, "masses": [1.0], "charges": [0.5]},
    "grid": {"points": 8, "length": 6.283185307179586},
    "initial": {
        "wavefunction": {
            "kind": "gaussian",
            "centers": [[3.14, 3.14, 3.14]],
            "widths": [0.9],
            "momentum_modes": [[0, 0, 1]],
            "symmetry": "none",
        },
        "field": {"kind": "zero"},
    },
    "evolution": {"horizon": 0.5, "nodes": 16},
    "picard": {"tol": 1e-9, "max_iterations": 30},
    "seed": 3,
}


def _variant(**overrides):
    doc = copy.deepcopy(VALID)
    for dotted, value in overrides.items():
        parts = dotted.split("__")
        target = doc
        for p in parts[:-1]:
            target = target[p]
        if value is ...:
            del target[parts[-1]]
        else:
            target[parts[-1]] = value
    return doc


def test_valid_document_parses():
    cfg = parse_config(VALID)
    assert cfg.seed == 3
    assert cfg.symmetry is None
    assert cfg.symmetry_sign is None


def test_load_config_reads_yaml(tmp_path):
    import yaml

    path = tmp_path / "run.yaml"
    path.write_text(yaml.safe_dump(VALID))
    cfg = load_config(str(path))
    assert cfg.grid["points"] == 8


def test_load_config_rejects_broken_yaml(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("physical: [unclosed")
    with pytest.raises(ConfigError, match="YAML"):
        load_config(str(path))


@pytest.mark.parametrize(
    "overrides,needle",
    [
        (dict(grid__points=7), "even"),
        (dict(grid__points=2), "at least 4"),
        (dict(grid__length=-1.0), "positive"),
        (dict(physical__charges=[0.5, 0.5]), "charges"),
        (dict(physical__masses=...), "masses"),
        (dict(evolution__horizon=0.0), "horizon"),
        (dict(evolution__nodes=1), "nodes"),
        (dict(picard__tol=2.0), "tol"),
        (dict(picard__max_iterations=0), "max_iterations"),
        (dict(initial__wavefunction__widths=[-0.5]), "positive"),
        (dict(initial__wavefunction__momentum_modes=[[0.5, 0, 0]]), "integers"),
        (dict(initial__wavefunction__symmetry="twisted"), "symmetry"),
        (dict(initial__field__kind="vortex"), "unknown kind"),
        (dict(seed=-1), "seed"),
    ],
)
def test_invalid_documents_are_rejected(overrides, needle):
    with pytest.raises(ConfigError) as excinfo:
        parse_config(_variant(**overrides))
    assert any(needle in p for p in excinfo.value.problems)


def test_symmetry_requires_two_identical_particles():
    with pytest.raises(ConfigError, match="exactly two"):
        parse_config(_variant(initial__wavefunction__symmetry="symmetric"))
    doc = _variant(
        physical__masses=[1.0, 2.0],
        physical__charges=[0.5, 0.5],
        initial__wavefunction__symmetry="antisymmetric",
    )
    doc["initial"]["wavefunction"]["centers"] = [[1.0, 1.0, 1.0], [2.0, 2.0, 2.0]]
    doc["initial"]["wavefunction"]["widths"] = [0.9, 0.9]
    doc["initial"]["wavefunction"]["momentum_modes"] = [[0, 0, 1], [0, 0, -1]]
    with pytest.raises(ConfigError, match="identical"):
        parse_config(doc)


def test_problems_are_aggregated():
    doc = _variant(grid__points=7, evolution__nodes=1, seed=-2)
    with pytest.raises(ConfigError) as excinfo:
        parse_config(doc)
    assert len(excinfo.value.problems) >= 3


def test_unknown_top_level_keys_are_flagged():
    doc = copy.deepcopy(VALID)
    doc["extras"] = {}
    with pytest.raises(ConfigError, match="unknown top-level key"):
        parse_config(doc)


@pytest.mark.parametrize(
    "block, key",
    [
        ("physical", "mass"),
        ("grid", "spacing"),
        ("coulomb", "cutoff"),
        ("evolution", "dt"),
        ("picard", "tolerance"),
        ("stepper", "krylov"),
        ("output", "format"),
    ],
)
def test_misspelled_nested_keys_are_flagged(block, key):
    # a typo inside a block must be an error, not a silently applied default
    doc = copy.deepcopy(VALID)
    doc.setdefault(block, {})[key] = 1
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config(doc)


@pytest.mark.parametrize("where, key", [("wavefunction", "width"), ("field", "phase")])
def test_misspelled_initial_keys_are_flagged(where, key):
    doc = copy.deepcopy(VALID)
    doc["initial"][where][key] = 1
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config(doc)


def test_build_run_produces_typed_objects():
    cfg = parse_config(VALID)
    params, init, picard, coulomb, stepper = build_run(cfg)
    assert isinstance(params, PhysicalParams)
    assert isinstance(picard, PicardConfig)
    assert isinstance(stepper, StepperConfig)
    assert coulomb is None
    assert init.psi0.grid.dim == 3
    assert picard.T == pytest.approx(0.5)
    assert picard.n_t == 16
    from msfield.spectral import sobolev_norm

    assert sobolev_norm(init.psi0, 0.0) == pytest.approx(1.0, abs=1e-12)


def test_build_run_honors_coulomb_and_field_blocks():
    doc = _variant(
        physical__masses=[1.0, 1.0],
        physical__charges=[0.4, 0.4],
        initial__field={"kind": "plane-wave", "amplitude": 0.1, "mode": [0, 0, 1], "polarization": [1, 0, 0]},
    )
    doc["coulomb"] = {"enabled": True, "mode": "smeared", "radius": 0.4}
    doc["initial"]["wavefunction"]["centers"] = [[1.0, 1.0, 1.0], [2.0, 2.0, 2.0]]
    doc["initial"]["wavefunction"]["widths"] = [0.9, 0.9]
    doc["initial"]["wavefunction"]["momentum_modes"] = [[0, 0, 1], [0, 0, -1]]
    cfg = parse_config(doc)
    params, init, picard, coulomb, stepper = build_run(cfg)
    assert isinstance(coulomb, CoulombSpec)
    assert coulomb.mode == "smeared"
    assert np.max(np.abs(init.A0.values)) > 0.0
    assert init.psi0.grid.dim == 6


def test_random_field_kind_is_seed_deterministic():
    doc = _variant(initial__field={"kind": "random-transverse", "amplitude": 0.2})
    a = build_run(parse_config(doc))[1].A0
    b = build_run(parse_config(doc))[1].A0
    np.testing.assert_array_equal(a.values, b.values)
    doc2 = _variant(initial__field={"kind": "random-transverse", "amplitude": 0.2}, seed=4)
    c = build_run(parse_config(doc2))[1].A0
    assert np.max(np.abs(c.values - a.values)) > 1e-6


class TestSnapshotInitialData:
    def _write_state(self, tmp_path, points=8):
        from msfield.fields import save_snapshot
        from msfield.initial_data import random_transverse_field, random_wavefunction
        from msfield.spectral import SpectralGrid

        grid = SpectralGrid(points, 2.0 * np.pi, 3)
        rng = np.random.default_rng(5)
        psi = random_wavefunction(grid, rng)
        a = random_transverse_field(grid, rng, amplitude=0.3)
        adot = random_transverse_field(grid, rng, amplitude=0.1)
        path = str(tmp_path / "state.msnap")
        save_snapshot(
            path,
            {"psi": psi.values, "A": a.values, "Adot": adot.values},
            meta={"points": points},
        )
        return path, psi, a, adot

    def _doc(self, path):
        doc = copy.deepcopy(VALID)
        doc["initial"]["wavefunction"] = {"kind": "snapshot", "path": path}
        doc["initial"]["field"] = {"kind": "snapshot", "path": path}
        return doc

    def test_state_round_trips_bit_exactly(self, tmp_path):
        path, psi, a, adot = self._write_state(tmp_path)
        params, init, *_ = build_run(parse_config(self._doc(path)))
        np.testing.assert_array_equal(init.psi0.values, psi.values)
        np.testing.assert_array_equal(init.A0.values, a.values)
        np.testing.assert_array_equal(init.A1.values, adot.values)

    def test_missing_file_is_a_config_error(self, tmp_path):
        doc = self._doc(str(tmp_path / "absent.msnap"))
        with pytest.raises(ConfigError, match="initial.wavefunction"):
            build_run(parse_config(doc))

    def test_grid_mismatch_is_a_config_error(self, tmp_path):
        path, *_ = self._write_state(tmp_path, points=4)
        with pytest.raises(ConfigError, match="does not match the configured grid"):
            build_run(parse_config(self._doc(path)))

    def test_non_unit_norm_is_rejected(self, tmp_path):
        from msfield.fields import load_snapshot, save_snapshot

        path, *_ = self._write_state(tmp_path)
        arrays, meta = load_snapshot(path)
        arrays["psi"] = 2.0 * arrays["psi"]
        save_snapshot(path, arrays, meta)
        with pytest.raises(ConfigError, match="norm"):
            build_run(parse_config(self._doc(path)))

    def test_declared_symmetry_is_enforced(self, tmp_path):
        from msfield.fields import save_snapshot
        from msfield.initial_data import gaussian_packet
        from msfield.spectral import SpectralGrid

        pair = PhysicalParams(hbar=1.0, c=10.0, masses=(1.0, 1.0), charges=(0.5, 0.5))
        grid6 = SpectralGrid(8, 2.0 * np.pi, 6)
        psi = gaussian_packet(
            grid6,
            pair,
            [(2.0, 3.0, 3.0), (4.0, 3.0, 3.0)],
            [0.9, 0.9],
            [(0, 0, 1), (0, 0, -1)],
            symmetry="symmetric",
        )
        path = str(tmp_path / "pair.msnap")
        save_snapshot(path, {"psi": psi.values}, meta={})
        doc = self._doc(path)
        doc["physical"]["masses"] = [1.0, 1.0]
        doc["physical"]["charges"] = [0.5, 0.5]
        doc["initial"]["wavefunction"]["symmetry"] = "antisymmetric"
        doc["initial"]["field"] = {"kind": "zero"}
        with pytest.raises(ConfigError, match="breaks the declared symmetry"):
            build_run(parse_config(doc))

    def test_path_is_required(self):
        doc = copy.deepcopy(VALID)
        doc["initial"]["wavefunction"] = {"kind": "snapshot"}
        with pytest.raises(ConfigError, match="missing required key 'path'"):
            parse_config(doc)

    def test_packet_keys_are_rejected_for_snapshots(self):
        doc = copy.deepcopy(VALID)
        doc["initial"]["wavefunction"] = {"kind": "snapshot", "path": "x.msnap", "widths": [0.5]}
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config(doc)
