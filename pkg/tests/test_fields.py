"""Wavefunction containers, exchange symmetry, marginals, snapshots."""

import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from msfield.fields import (
    FieldState,
    PhysicalParams,
    TrajectoryPair,
    WaveFunction,
    exchange_map,
    exchange_symmetrize,
    load_snapshot,
    marginal_integrate,
    normalize,
    particle_axes,
    save_snapshot,
    snapshot_header,
)
from msfield.spectral import SpectralGrid, VectorField, sobolev_norm

TWO_PI = 2.0 * np.pi


class TestPhysicalParams:
    def test_counts_and_identity(self):
        p = PhysicalParams(1.0, 10.0, (1.0, 1.0), (0.5, 0.5))
        assert p.n_particles == 2
        assert p.identical_particles

    def test_distinguishable_particles(self):
        p = PhysicalParams(1.0, 10.0, (1.0, 2.0), (0.5, 0.5))
        assert not p.identical_particles

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(hbar=0.0, c=1.0, masses=(1.0,), charges=(0.0,)),
            dict(hbar=1.0, c=-1.0, masses=(1.0,), charges=(0.0,)),
            dict(hbar=1.0, c=1.0, masses=(), charges=()),
            dict(hbar=1.0, c=1.0, masses=(1.0, -1.0), charges=(0.0, 0.0)),
            dict(hbar=1.0, c=1.0, masses=(1.0,), charges=(0.0, 1.0)),
            dict(hbar=1.0, c=1.0, masses=(1.0, 1.0, 1.0), charges=(0.0, 0.0, 0.0)),
        ],
    )
    def test_rejects_bad_inputs(self, kwargs):
        with pytest.raises(ValueError):
            PhysicalParams(**kwargs)

    def test_particle_axes(self):
        assert particle_axes(1, 2) == (0, 1, 2)
        assert particle_axes(2, 2) == (3, 4, 5)
        with pytest.raises(ValueError):
            particle_axes(3, 2)


class TestExchange:
    def test_exchange_is_an_involution(self, grid6_small, rng):
        psi = WaveFunction(
            grid6_small,
            rng.standard_normal(grid6_small.shape) + 1j * rng.standard_normal(grid6_small.shape),
        )
        twice = exchange_map(exchange_map(psi))
        np.testing.assert_array_equal(twice.values, psi.values)

    def test_exchange_moves_particle_blocks(self, grid6_small, rng):
        # a product state f(x1) g(x2) swaps to g(x1) f(x2)
        grid3 = SpectralGrid(grid6_small.points, grid6_small.length, 3)
        f = rng.standard_normal(grid3.shape)
        g = rng.standard_normal(grid3.shape)
        product = f.reshape(grid3.shape + (1, 1, 1)) * g.reshape((1, 1, 1) + grid3.shape)
        swapped = exchange_map(WaveFunction(grid6_small, product))
        expected = g.reshape(grid3.shape + (1, 1, 1)) * f.reshape((1, 1, 1) + grid3.shape)
        np.testing.assert_allclose(swapped.values, expected, atol=1e-14)

    def test_symmetrize_lands_in_sector_and_normalizes(self, grid6_small, rng):
        psi = WaveFunction(
            grid6_small,
            rng.standard_normal(grid6_small.shape) + 1j * rng.standard_normal(grid6_small.shape),
        )
        for sign in (+1, -1):
            out = exchange_symmetrize(psi, sign)
            assert sobolev_norm(out, 0) == pytest.approx(1.0, abs=1e-13)
            swapped = exchange_map(out)
            np.testing.assert_allclose(swapped.values, sign * out.values, atol=1e-13)

    def test_symmetrize_rejects_empty_sector(self, grid6_small, rng):
        # a symmetric state has no antisymmetric component
        psi = exchange_symmetrize(
            WaveFunction(
                grid6_small,
                rng.standard_normal(grid6_small.shape) + 1j * rng.standard_normal(grid6_small.shape),
            ),
            +1,
        )
        with pytest.raises(ValueError, match="sector"):
            exchange_symmetrize(psi, -1)

    def test_exchange_needs_two_particles(self, grid3_small):
        psi = WaveFunction(grid3_small, np.ones(grid3_small.shape, dtype=np.complex128))
        with pytest.raises(ValueError):
            exchange_map(psi)


class TestMarginal:
    def test_single_particle_identity(self, grid3_small, rng):
        values = rng.standard_normal(grid3_small.shape) + 0j
        out = marginal_integrate(values, grid3_small, 1)
        np.testing.assert_array_equal(out, values)

    def test_product_state_marginal(self, grid6_small, rng):
        # integrating out particle 2 of f(x1) g(x2) leaves f * integral(g)
        grid3 = SpectralGrid(grid6_small.points, grid6_small.length, 3)
        f = rng.standard_normal(grid3.shape)
        g = rng.standard_normal(grid3.shape)
        product = f.reshape(grid3.shape + (1, 1, 1)) * g.reshape((1, 1, 1) + grid3.shape)
        out = marginal_integrate(product, grid6_small, 1)
        expected = f * (g.sum() * grid3.cell_volume)
        np.testing.assert_allclose(out, expected, rtol=1e-12)

    def test_marginal_of_density_integrates_to_one(self, grid6_small, rng):
        psi = normalize(
            WaveFunction(
                grid6_small,
                rng.standard_normal(grid6_small.shape) + 1j * rng.standard_normal(grid6_small.shape),
            )
        )
        density = marginal_integrate(np.abs(psi.values) ** 2, grid6_small, 2)
        total = density.real.sum() * SpectralGrid(grid6_small.points, grid6_small.length, 3).cell_volume
        assert total == pytest.approx(1.0, rel=1e-12)


class TestTrajectoryPair:
    def _make(self, times, n=None):
        grid = SpectralGrid(4, TWO_PI, 3)
        count = n if n is not None else len(times)
        psi = WaveFunction(grid, np.ones(grid.shape, dtype=np.complex128))
        return TrajectoryPair(
            np.asarray(times, dtype=float),
            (psi,) * count,
            (FieldState.zero(grid),) * count,
        )

    def test_accepts_uniform_times(self):
        traj = self._make([0.0, 0.5, 1.0])
        assert traj.dt == pytest.approx(0.5)
        assert traj.n_nodes == 3

    def test_rejects_nonuniform_times(self):
        with pytest.raises(ValueError, match="uniform"):
            self._make([0.0, 0.4, 1.0])

    def test_rejects_decreasing_times(self):
        with pytest.raises(ValueError, match="increasing"):
            self._make([0.0, -0.5, -1.0])

    def test_rejects_sample_count_mismatch(self):
        with pytest.raises(ValueError):
            self._make([0.0, 0.5, 1.0], n=2)


class TestSnapshots:
    def test_round_trip_bit_exact(self, tmp_path, rng):
        path = os.fspath(tmp_path / "state.msnap")
        arrays = {
            "psi": rng.standard_normal((4, 4, 4)) + 1j * rng.standard_normal((4, 4, 4)),
            "A": rng.standard_normal((3, 4, 4, 4)).astype(np.complex128),
        }
        meta = {"time": 0.25, "points": 4, "note": "probe"}
        save_snapshot(path, arrays, meta)
        loaded, got_meta = load_snapshot(path)
        assert got_meta == meta
        assert set(loaded) == set(arrays)
        for name in arrays:
            assert np.array_equal(loaded[name], np.asarray(arrays[name], dtype=np.complex128))

    def test_header_without_payload(self, tmp_path, rng):
        path = os.fspath(tmp_path / "state.msnap")
        save_snapshot(path, {"psi": np.ones((4, 4, 4), dtype=np.complex128)}, {"points": 4})
        header = snapshot_header(path)
        assert header["format"] == "msfield-snapshot-v1"
        assert header["meta"]["points"] == 4
        names = [entry["name"] for entry in header["arrays"]]
        assert names == ["psi"]

    def test_rejects_foreign_files(self, tmp_path):
        path = os.fspath(tmp_path / "not_a_snapshot")
        with open(path, "wb") as fh:
            fh.write(b"PNG\x89 definitely not ours")
        with pytest.raises(ValueError, match="magic"):
            snapshot_header(path)
        with pytest.raises(ValueError, match="magic"):
            load_snapshot(path)

    @settings(max_examples=15, deadline=None)
    @given(
        n=st.integers(min_value=1, max_value=3),
        seed=st.integers(min_value=0, max_value=2**31),
    )
    def test_round_trip_random_payloads(self, tmp_path_factory, n, seed):
        rng = np.random.default_rng(seed)
        arrays = {
            f"block{i}": rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
            for i in range(n)
        }
        path = os.fspath(tmp_path_factory.mktemp("snap") / "s.msnap")
        save_snapshot(path, arrays, {"seed": seed})
        loaded, meta = load_snapshot(path)
        assert meta["seed"] == seed
        for name, values in arrays.items():
            assert np.array_equal(loaded[name], values)
