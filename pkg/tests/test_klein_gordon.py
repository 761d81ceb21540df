"""Massive vector wave flow: closed forms, conservation, Duhamel accuracy.

The dispersion relation omega(k) = c sqrt(1 + |k|^2) gives exact solutions
for single modes, both free and forced; those are the oracles here.
"""

import numpy as np
import pytest

from msfield.fields import FieldState
from msfield.initial_data import plane_wave_field, random_transverse_field
from msfield.klein_gordon import (
    kg_energy,
    kg_evolve_free,
    kg_propagate,
    kg_propagate_all,
    kg_source,
    strichartz_monitor,
)
from msfield.spectral import SpectralGrid, VectorField

TWO_PI = 2.0 * np.pi
C = 7.0


def _omega_for_mode(grid, c, mode):
    k_sq = (TWO_PI / grid.length) ** 2 * float(sum(m * m for m in mode))
    return c * np.sqrt(1.0 + k_sq)


def _single_mode_state(grid, amplitude, mode, polarization):
    wave = plane_wave_field(grid, amplitude, mode, polarization)
    return FieldState(wave, VectorField.zero(grid))


class TestFreeFlow:
    def test_position_seed_closed_form(self, grid3_small):
        mode = (1, 2, 0)
        state = _single_mode_state(grid3_small, 0.3, mode, (0.0, 0.0, 1.0))
        omega = _omega_for_mode(grid3_small, C, mode)
        t = 0.41
        moved = kg_evolve_free(state, C, t)
        np.testing.assert_allclose(moved.A.values, np.cos(omega * t) * state.A.values, atol=1e-13)
        np.testing.assert_allclose(
            moved.Adot.values, -omega * np.sin(omega * t) * state.A.values, atol=1e-12
        )

    def test_velocity_seed_closed_form(self, grid3_small):
        mode = (0, 1, 1)
        wave = plane_wave_field(grid3_small, 0.5, mode, (1.0, 0.0, 0.0))
        state = FieldState(VectorField.zero(grid3_small), wave)
        omega = _omega_for_mode(grid3_small, C, mode)
        t = 0.23
        moved = kg_evolve_free(state, C, t)
        np.testing.assert_allclose(
            moved.A.values, (np.sin(omega * t) / omega) * wave.values, atol=1e-13
        )
        np.testing.assert_allclose(moved.Adot.values, np.cos(omega * t) * wave.values, atol=1e-13)

    def test_energy_conserved_on_random_transverse_data(self, grid3_small, rng):
        state = FieldState(
            random_transverse_field(grid3_small, rng, amplitude=0.8),
            random_transverse_field(grid3_small, rng, amplitude=0.4),
        )
        e0 = kg_energy(state, C)
        for t in (0.1, 0.7, 2.9):
            assert kg_energy(kg_evolve_free(state, C, t), C) == pytest.approx(e0, rel=1e-12)

    def test_flow_composes_and_reverses(self, grid3_small, rng):
        state = FieldState(
            random_transverse_field(grid3_small, rng),
            random_transverse_field(grid3_small, rng),
        )
        there = kg_evolve_free(state, C, 0.6)
        back = kg_evolve_free(there, C, -0.6)
        np.testing.assert_allclose(back.A.values, state.A.values, atol=1e-12)
        np.testing.assert_allclose(back.Adot.values, state.Adot.values, atol=1e-12)
        two_hops = kg_evolve_free(kg_evolve_free(state, C, 0.25), C, 0.35)
        np.testing.assert_allclose(two_hops.A.values, there.A.values, atol=1e-12)


class TestForcedFlow:
    def test_prefix_sums_match_direct_quadrature(self, grid3_small, rng):
        # the running-sum propagator and the single-node O(n) form must agree
        # to roundoff; they discretize the same trapezoid integral
        a0 = random_transverse_field(grid3_small, rng, amplitude=0.5)
        a1 = random_transverse_field(grid3_small, rng, amplitude=0.2)
        times = np.linspace(0.0, 0.8, 9)
        source = [random_transverse_field(grid3_small, rng, amplitude=0.3) for _ in times]
        all_states = kg_propagate_all(a0, a1, source, times, C)
        for idx in (0, 3, 8):
            direct = kg_propagate(a0, a1, source, times, idx, C)
            np.testing.assert_allclose(all_states[idx].A.values, direct.A.values, atol=1e-12)
            np.testing.assert_allclose(all_states[idx].Adot.values, direct.Adot.values, atol=1e-12)

    def test_constant_source_closed_form(self, grid3_small):
        # B'' + omega^2 B = c^2 F with zero data: B = (c^2 F/omega^2)(1 - cos omega t)
        mode = (1, 0, 0)
        forcing = plane_wave_field(grid3_small, 0.4, mode, (0.0, 1.0, 0.0))
        omega = _omega_for_mode(grid3_small, C, mode)
        times = np.linspace(0.0, 0.5, 129)
        zero = VectorField.zero(grid3_small)
        states = kg_propagate_all(zero, zero, [forcing] * times.size, times, C)
        t = times[-1]
        expected = (C**2 / omega**2) * (1.0 - np.cos(omega * t)) * forcing.values
        worst = np.max(np.abs(states[-1].A.values - expected))
        # trapezoid truncation at this dt; the order test below pins the rate
        assert worst < 1e-4 * np.max(np.abs(forcing.values))

    def test_oscillating_source_order_two(self, grid3_small):
        # manufactured forcing c^2 F sin(nu t); exact particular solution known
        mode = (0, 2, 1)
        base = plane_wave_field(grid3_small, 0.7, mode, (1.0, 0.0, 0.0))
        omega = _omega_for_mode(grid3_small, C, mode)
        nu = 2.0
        T = 0.6
        zero = VectorField.zero(grid3_small)

        def solve(n_nodes):
            times = np.linspace(0.0, T, n_nodes)
            source = [VectorField(grid3_small, np.sin(nu * t) * base.values) for t in times]
            states = kg_propagate_all(zero, zero, source, times, C)
            exact = (
                C**2
                * (np.sin(nu * T) - (nu / omega) * np.sin(omega * T))
                / (omega**2 - nu**2)
                * base.values
            )
            return np.max(np.abs(states[-1].A.values - exact))

        err_coarse, err_fine = solve(33), solve(65)
        ratio = err_coarse / err_fine
        assert 3.5 <= ratio <= 4.5


class TestSourceAssembly:
    def test_uncharged_source_is_the_mass_compensator(self, grid3_small, grid6_small, rng):
        # with Q = 0 the current vanishes and the source reduces to A itself
        from msfield.coupler import InitialData, frozen_trajectory
        from msfield.fields import PhysicalParams, WaveFunction, normalize

        params = PhysicalParams(1.0, C, (1.0, 1.0), (0.0, 0.0))
        psi = normalize(
            WaveFunction(
                grid6_small,
                rng.standard_normal(grid6_small.shape) + 1j * rng.standard_normal(grid6_small.shape),
            )
        )
        a0 = random_transverse_field(grid3_small, rng)
        init = InitialData(psi, a0, VectorField.zero(grid3_small))
        traj = frozen_trajectory(init, np.linspace(0.0, 0.2, 3))
        for f in kg_source(traj, params):
            np.testing.assert_allclose(f.values, a0.values, atol=1e-13)


class TestStrichartzMonitor:
    def test_rejects_inadmissible_pairs(self, grid3_small):
        states = [FieldState.zero(grid3_small)] * 3
        times = np.linspace(0.0, 1.0, 3)
        with pytest.raises(ValueError, match="inadmissible"):
            strichartz_monitor(states, times, 2.0, 4.0, 1.0)
        with pytest.raises(ValueError, match="inadmissible"):
            strichartz_monitor(states, times, 1.0, np.inf, 1.0)

    def test_admissible_pair_on_zero_field(self, grid3_small):
        states = [FieldState.zero(grid3_small)] * 3
        times = np.linspace(0.0, 1.0, 3)
        assert strichartz_monitor(states, times, 4.0, 4.0, 1.0) == 0.0
