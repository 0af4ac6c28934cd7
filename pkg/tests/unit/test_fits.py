"""
Unit tests for the fitting routines (mooncat/analysis/fits.py).

Tests cover:
- Exponential decay with fixed and free offset
- Bit-flip scaling and phase-flip affine laws
- Damped cosines, Ramsey quadratures and Wigner fringes
- Thermal and moon-cat Wigner surfaces
- Kerr-detuning regression
"""

import math

import numpy as np
import pytest

from mooncat.analysis.fits import (
    fit_bitflip_scaling,
    fit_damped_cosine,
    fit_exp_decay,
    fit_fringes,
    fit_kerr_detuning,
    fit_moon_wigner,
    fit_phaseflip_affine,
    fit_ramsey,
    fit_report,
    fit_thermal_wigner,
    fringe_model,
    kerr_design,
)
from mooncat.exceptions import InvalidParameterError
from mooncat.quantum import hilbert
from mooncat.quantum.states import moon_cat_states, wigner, wigner_cut


def _decay_samples(t, rate, amplitude, offset=0.0, sigma=1e-3):
    y = offset + (amplitude - offset) * np.exp(-rate * t)
    return np.column_stack([t, y, np.full_like(t, sigma)])


# =============================================================================
# Exponential Decay Tests
# =============================================================================

class TestExpDecay:
    """Tests for fit_exp_decay."""

    @pytest.mark.unit
    def test_exact_decay_recovered(self):
        """Noise-free samples give back the generating rate and amplitude."""
        t = np.linspace(0.0, 5.0, 30)
        fit = fit_exp_decay(_decay_samples(t, 0.7, 0.9))
        assert fit.rate == pytest.approx(0.7, rel=1e-6)
        assert fit.amplitude == pytest.approx(0.9, rel=1e-6)
        assert fit.offset_fixed
        assert fit.n_points == 30

    @pytest.mark.unit
    def test_time_rescaling_divides_rate(self):
        """t -> c t divides the fitted rate by c."""
        t = np.linspace(0.0, 5.0, 30)
        samples = _decay_samples(t, 0.7, 0.9)
        stretched = samples.copy()
        stretched[:, 0] *= 10.0
        base = fit_exp_decay(samples).rate
        assert fit_exp_decay(stretched).rate == pytest.approx(base / 10.0, rel=1e-6)

    @pytest.mark.unit
    def test_free_offset(self):
        """fix_offset=None fits the asymptote too."""
        t = np.linspace(0.0, 4.0, 40)
        fit = fit_exp_decay(_decay_samples(t, 2.0, 0.9, offset=0.1), fix_offset=None)
        assert fit.rate == pytest.approx(2.0, rel=1e-6)
        assert fit.offset == pytest.approx(0.1, abs=1e-6)
        assert not fit.offset_fixed

    @pytest.mark.unit
    def test_too_few_samples(self):
        """Fewer than three samples raise InvalidParameterError."""
        with pytest.raises(InvalidParameterError):
            fit_exp_decay([(0.0, 1.0, 0.1), (1.0, 0.5, 0.1)])

    @pytest.mark.unit
    def test_non_positive_sigma(self):
        """A zero sample error is rejected."""
        with pytest.raises(InvalidParameterError):
            fit_exp_decay([(0.0, 1.0, 0.1), (1.0, 0.5, 0.0), (2.0, 0.25, 0.1)])

    @pytest.mark.unit
    def test_report_is_json_ready(self):
        """fit_report returns a plain dict tagged with the model name."""
        t = np.linspace(0.0, 5.0, 10)
        report = fit_report(fit_exp_decay(_decay_samples(t, 1.0, 1.0)))
        assert report["model"] == "exp_decay"
        assert isinstance(report["rate"], float)


# =============================================================================
# Scaling Law Tests
# =============================================================================

class TestScalingFits:
    """Tests for fit_bitflip_scaling and fit_phaseflip_affine."""

    @pytest.fixture
    def bitflip_points(self):
        """Gamma_Z = 3 exp(-1.5 n) for n = 1..8."""
        n = np.arange(1.0, 9.0)
        return np.column_stack([n, 3.0 * np.exp(-1.5 * n)])

    @pytest.mark.unit
    def test_exponent_and_prefactor(self, bitflip_points):
        """Exact exponential data give gamma = 1.5 and A = 3."""
        fit = fit_bitflip_scaling(bitflip_points)
        assert fit.exponent == pytest.approx(1.5, rel=1e-9)
        assert fit.prefactor == pytest.approx(3.0, rel=1e-9)
        assert fit.n_points == 8

    @pytest.mark.unit
    def test_window_restricts_points(self, bitflip_points):
        """Only points inside the window enter the fit."""
        fit = fit_bitflip_scaling(bitflip_points, window=(2.0, 5.0))
        assert fit.n_points == 4
        assert fit.window == [2.0, 5.0]

    @pytest.mark.unit
    def test_saturated_points_excluded(self, bitflip_points):
        """Rates within the saturation factor of the floor are dropped."""
        fit = fit_bitflip_scaling(bitflip_points, saturation_floor=1e-4)
        assert fit.n_points == 6

    @pytest.mark.unit
    def test_too_few_points_in_window(self, bitflip_points):
        """Fewer than three usable points raise InvalidParameterError."""
        with pytest.raises(InvalidParameterError):
            fit_bitflip_scaling(bitflip_points, window=(1.0, 2.0))

    @pytest.mark.unit
    def test_affine_phase_flip_recovers_kappa1(self):
        """Gamma_X = 2 kappa1 n (1 + 2 n_th) + 2 kappa1 n_th gives kappa1 back."""
        n_th, kappa1 = 0.1, 2e-3
        n = np.array([1.0, 2.0, 3.0, 4.0])
        gamma = 2 * kappa1 * n * (1 + 2 * n_th) + 2 * kappa1 * n_th
        fit = fit_phaseflip_affine(np.column_stack([n, gamma]), n_th)
        assert fit.kappa1 == pytest.approx(kappa1, rel=1e-12)
        assert fit.kappa1_eff == pytest.approx(kappa1 * 1.2, rel=1e-12)
        assert fit.offset == pytest.approx(2 * kappa1 * n_th)
        assert not fit.flagged

    @pytest.mark.unit
    def test_negative_kappa1_is_flagged(self):
        """Decreasing rates produce a flagged fit."""
        points = np.array([[1.0, -1e-3], [2.0, -2e-3], [3.0, -3e-3]])
        assert fit_phaseflip_affine(points, 0.0).flagged


# =============================================================================
# Oscillation Tests
# =============================================================================

class TestOscillationFits:
    """Tests for damped cosines, Ramsey signals and fringes."""

    @pytest.mark.unit
    def test_damped_cosine(self):
        """All five parameters of a clean damped cosine are recovered."""
        t = np.linspace(0.0, 20.0, 200)
        y = 0.9 * np.exp(-0.1 * t) * np.cos(2.0 * t + 0.3) + 0.05
        fit = fit_damped_cosine(t, y)
        assert fit.amplitude == pytest.approx(0.9, abs=1e-6)
        assert fit.rate == pytest.approx(0.1, abs=1e-6)
        assert fit.frequency == pytest.approx(2.0, abs=1e-6)
        assert fit.phase == pytest.approx(0.3, abs=1e-6)
        assert fit.offset == pytest.approx(0.05, abs=1e-6)

    @pytest.mark.unit
    def test_ramsey_quadratures(self):
        """Joint X/Y fit returns T2, detuning and phase."""
        t = np.linspace(0.0, 10.0, 50)
        envelope = np.exp(-t / 5.0)
        x = envelope * np.cos(0.7 * t + 0.2)
        y = envelope * np.sin(0.7 * t + 0.2)
        fit = fit_ramsey(t, x, y, sigma=0.01)
        assert fit.t2 == pytest.approx(5.0, rel=1e-6)
        assert fit.detuning == pytest.approx(0.7, rel=1e-6)
        assert fit.phase == pytest.approx(0.2, abs=1e-6)
        assert fit.amplitude == pytest.approx(1.0, rel=1e-6)

    @pytest.mark.unit
    def test_fringes_joint_fit(self):
        """Fringe lifetime and wavelength come back from synthetic cuts."""
        b = np.linspace(-2.0, 2.0, 81)
        times = np.array([0.0, 10.0, 20.0, 40.0])
        truth = np.array([0.6, math.log(50.0), 0.125, 0.75])
        bb, tt = np.meshgrid(b, times)
        cuts = fringe_model(truth, bb.ravel(), tt.ravel()).reshape(times.size, b.size)
        fit = fit_fringes(b, cuts, times, alpha=2.0, lam=0.5)
        assert fit.t_x == pytest.approx(50.0, rel=1e-6)
        assert fit.wavelength == pytest.approx(0.125, rel=1e-6)
        assert fit.width == pytest.approx(0.75, rel=1e-6)

    @pytest.mark.unit
    def test_fringes_need_two_slices(self):
        """A single time slice is rejected."""
        with pytest.raises(InvalidParameterError):
            fit_fringes(np.linspace(-1, 1, 5), np.ones((1, 5)), [0.0])


# =============================================================================
# Phase-Space Fit Tests
# =============================================================================

class TestWignerFits:
    """Tests for thermal and moon-cat Wigner fits."""

    @pytest.mark.unit
    def test_thermal_cut_gives_occupation(self):
        """A thermal Wigner cut has sigma = sqrt(1 + 2 n_th) / 2."""
        b = np.linspace(-3.0, 3.0, 41)
        values = wigner_cut(hilbert.thermal_state(40, 0.5), b)
        fit = fit_thermal_wigner(b, values)
        assert fit.n_th == pytest.approx(0.5, abs=1e-6)
        assert fit.sigma == pytest.approx(math.sqrt(2.0) / 2.0, rel=1e-6)

    @pytest.mark.slow
    def test_moon_wigner_surface(self):
        """Surface fit recovers alpha and lambda from a nearby start."""
        pair = moon_cat_states(1.5, 0.5, dim=36, auto_grow=False, strict=False)
        grid = wigner(pair.even_state, extent=3.0, points=15)
        fit = fit_moon_wigner(grid, alpha0=1.45, lam0=0.45, dim=36)
        assert fit.alpha == pytest.approx(1.5, abs=1e-4)
        assert fit.lam == pytest.approx(0.5, abs=1e-4)
        assert fit.amplitude == pytest.approx(1.0, abs=1e-4)


# =============================================================================
# Kerr Detuning Tests
# =============================================================================

class TestKerrFit:
    """Tests for fit_kerr_detuning."""

    @pytest.mark.unit
    def test_coefficients_recovered(self):
        """Linear regression returns (Delta, K4, K6)."""
        alpha_abs = np.linspace(0.5, 3.0, 8)
        truth = np.array([0.02, 0.005, -0.001])
        fit = fit_kerr_detuning(alpha_abs, kerr_design(alpha_abs) @ truth)
        assert fit.delta == pytest.approx(0.02, abs=1e-10)
        assert fit.K4 == pytest.approx(0.005, abs=1e-10)
        assert fit.K6 == pytest.approx(-0.001, abs=1e-10)

    @pytest.mark.unit
    def test_needs_three_samples(self):
        """Fewer than three samples raise InvalidParameterError."""
        with pytest.raises(InvalidParameterError):
            fit_kerr_detuning([1.0, 2.0], [0.1, 0.2])
