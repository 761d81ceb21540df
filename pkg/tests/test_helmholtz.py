"""Transverse projection and the vector-calculus residuals built on it.

The projector is checked against hand-built longitudinal and transverse
fields whose classification is known in closed form.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from msfield.helmholtz import curl_norm, divergence_residual, project
from msfield.initial_data import plane_wave_field, random_band_scalar
from msfield.spectral import SpectralGrid, VectorField, sobolev_norm

TWO_PI = 2.0 * np.pi


def _gradient_field(grid, rng):
    """grad phi for a random band-limited phi: purely longitudinal."""
    from msfield.spectral import forward_transform, inverse_transform

    phi = random_band_scalar(grid, rng, band=0.45).real
    hat = forward_transform(phi)
    comps = np.empty((3,) + grid.shape)
    for a in range(3):
        comps[a] = inverse_transform(1j * grid.axis_derivative_wavenumber(a) * hat).real
    return VectorField(grid, comps)


def _component_norm(v):
    return max(sobolev_norm(v, 0.0), 1e-300)


class TestProjection:
    def test_annihilates_gradients(self, grid3, rng):
        grad = _gradient_field(grid3, rng)
        out = project(grad)
        assert sobolev_norm(out, 0.0) <= 1e-10 * _component_norm(grad)

    def test_fixes_transverse_fields(self, grid3):
        wave = plane_wave_field(grid3, 0.7, (1, 2, 0), (0.0, 0.0, 1.0))
        out = project(wave)
        np.testing.assert_allclose(out.values, wave.values, atol=1e-12)

    def test_idempotent(self, grid3, rng):
        raw = VectorField(grid3, np.stack([random_band_scalar(grid3, rng, 1.0).real for _ in range(3)]))
        once = project(raw)
        twice = project(once)
        assert np.max(np.abs(twice.values - once.values)) <= 1e-10 * np.max(np.abs(once.values))

    def test_output_is_divergence_free(self, grid3, rng):
        raw = VectorField(grid3, np.stack([random_band_scalar(grid3, rng, 1.0).real for _ in range(3)]))
        assert divergence_residual(project(raw)) <= 1e-10

    def test_decomposition_is_orthogonal(self, grid3, rng):
        # <P v, (1-P) v> = 0 in L2
        raw = VectorField(grid3, np.stack([random_band_scalar(grid3, rng, 0.45).real for _ in range(3)]))
        trans = project(raw)
        longi = VectorField(grid3, raw.values - trans.values)
        inner = np.sum(trans.values * longi.values) * grid3.cell_volume
        scale = sobolev_norm(trans, 0.0) * sobolev_norm(longi, 0.0) + 1e-300
        assert abs(inner) / scale <= 1e-12

    def test_linearity(self, grid3, rng):
        a = VectorField(grid3, np.stack([random_band_scalar(grid3, rng, 0.45).real for _ in range(3)]))
        b = VectorField(grid3, np.stack([random_band_scalar(grid3, rng, 0.45).real for _ in range(3)]))
        lhs = project(VectorField(grid3, 2.0 * a.values - 3.0 * b.values))
        rhs = 2.0 * project(a).values - 3.0 * project(b).values
        np.testing.assert_allclose(lhs.values, rhs, atol=1e-12)


class TestResiduals:
    def test_divergence_residual_of_gradient_is_large(self, grid3, rng):
        grad = _gradient_field(grid3, rng)
        assert divergence_residual(grad) > 1e-3

    def test_curl_of_gradient_vanishes(self, grid3, rng):
        grad = _gradient_field(grid3, rng)
        assert curl_norm(grad) <= 1e-9 * max(1.0, sobolev_norm(grad, 1.0))

    def test_curl_closed_form_single_mode(self):
        # A = e_z cos(x): curl A = -e_y sin(x), equal L2 size
        grid = SpectralGrid(16, TWO_PI, 3)
        wave = plane_wave_field(grid, 1.0, (1, 0, 0), (0.0, 0.0, 1.0))
        expected = np.sqrt(grid.volume / 2.0)
        assert curl_norm(wave) == pytest.approx(expected, rel=1e-12)

    def test_zero_field(self, grid3):
        z = VectorField.zero(grid3)
        assert divergence_residual(z) == 0.0
        assert curl_norm(z) == 0.0


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**31))
def test_projection_properties_hold_for_any_field(seed):
    grid = SpectralGrid(8, TWO_PI, 3)
    rng = np.random.default_rng(seed)
    raw = VectorField(grid, rng.standard_normal((3,) + grid.shape))
    out = project(raw)
    assert divergence_residual(out) <= 1e-10
    again = project(out)
    assert np.max(np.abs(again.values - out.values)) <= 1e-10 * (np.max(np.abs(out.values)) + 1e-300)
