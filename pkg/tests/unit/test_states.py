"""
Unit tests for cat basis states and Wigner functions (mooncat/quantum/states.py).

Tests cover:
- Kernel-state recurrence, truncation growth and divergence
- Parity support, orthonormality and the kernel residual
- Squeezed cats and the squeezed dissipator
- Photon-number matching
- Wigner grids, cuts and moments
"""

import math

import numpy as np
import pytest

from mooncat.exceptions import InvalidParameterError, TruncationError
from mooncat.quantum import hilbert
from mooncat.quantum.states import (
    apply_moon_dissipator,
    default_state_dim,
    matched_alpha,
    mean_photon_from_wigner,
    mean_photon_number,
    moon_cat_states,
    moon_coefficients,
    pair_mean_photon_number,
    squeezed_cat_states,
    squeezed_dissipator,
    wigner,
    wigner_cut,
)


# =============================================================================
# Kernel State Tests
# =============================================================================

class TestMoonCatStates:
    """Tests for moon_cat_states."""

    @pytest.mark.unit
    def test_zero_deformation_gives_standard_cats(self):
        """lambda = 0 reproduces (|alpha> + |-alpha>) normalized."""
        pair = moon_cat_states(2.0, 0.0)
        plus = hilbert.coherent(pair.dim, 2.0) + hilbert.coherent(pair.dim, -2.0)
        plus /= np.linalg.norm(plus)
        assert hilbert.fidelity(pair.even_state, plus) >= 1 - 1e-9
        assert pair.even_cutoff is None

    @pytest.mark.unit
    @pytest.mark.parametrize("lam", [0.0, 0.5, 0.8])
    def test_parity_support_and_orthonormality(self, lam):
        """Even state lives on even levels, odd on odd; both normalized."""
        pair = moon_cat_states(1.5, lam)
        assert np.all(pair.even_state[1::2] == 0)
        assert np.all(pair.odd_state[0::2] == 0)
        assert np.linalg.norm(pair.even_state) == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.norm(pair.odd_state) == pytest.approx(1.0, abs=1e-12)
        assert np.vdot(pair.even_state, pair.odd_state) == 0

    @pytest.mark.unit
    @pytest.mark.parametrize("lam", [0.0, 0.5, 0.8])
    def test_states_are_annihilated_by_dissipator(self, lam):
        """Both states lie in the kernel of the deformed jump operator."""
        pair = moon_cat_states(2.0, lam)
        for state in (pair.even_state, pair.odd_state):
            assert np.linalg.norm(apply_moon_dissipator(state, 2.0, lam)) < 1e-9

    @pytest.mark.unit
    def test_even_chain_terminates_at_integer_crossing(self):
        """alpha = 2, lambda = 1 zeroes the even chain from level 10."""
        pair = moon_cat_states(2.0, 1.0, dim=40, auto_grow=False, strict=False)
        assert pair.even_cutoff == 10
        assert np.all(pair.even_state[10:] == 0)
        assert np.any(pair.even_state[:10] != 0)

    @pytest.mark.unit
    def test_unit_amplitude_cutoff(self):
        """alpha = 1, lambda = 1 zeroes the even chain from level 4."""
        mu = moon_coefficients(1.0, 1.0, 12)
        assert mu[4] == 0
        pair = moon_cat_states(1.0, 1.0, dim=30, auto_grow=False, strict=False)
        assert pair.even_cutoff == 4

    @pytest.mark.unit
    def test_recurrence_first_terms(self):
        """mu_2 = alpha^2 (1 + lambda) / sqrt(2)."""
        mu = moon_coefficients(1.5, 0.5, 6)
        assert mu[0] == 1 and mu[1] == 1
        assert mu[2] == pytest.approx(2.25 * 1.5 / math.sqrt(2.0))
        assert mu[3] == pytest.approx((2.25 + 0.5 * (2.25 - 1.0)) / math.sqrt(6.0))

    @pytest.mark.unit
    def test_auto_grow_extends_small_start(self):
        """A too-small starting truncation is doubled until converged."""
        pair = moon_cat_states(2.0, 0.0, dim=8)
        assert pair.dim > 8
        assert pair.dim % 8 == 0

    @pytest.mark.unit
    def test_fixed_small_truncation_raises(self):
        """Without growth an unconverged truncation is an error."""
        with pytest.raises(TruncationError):
            moon_cat_states(2.0, 0.0, dim=8, auto_grow=False)

    @pytest.mark.unit
    def test_large_deformation_diverges(self):
        """lambda > 1 without an integer crossing never converges."""
        with pytest.raises(TruncationError):
            moon_cat_states(1.0, 1.5, max_dim=1024)

    @pytest.mark.unit
    def test_negative_alpha_rejected(self):
        """alpha < 0 raises InvalidParameterError."""
        with pytest.raises(InvalidParameterError):
            moon_cat_states(-1.0)

    @pytest.mark.unit
    def test_resized_pair_stays_normalized(self):
        """Resizing pads with zeros and renormalizes."""
        pair = moon_cat_states(1.0, 0.0)
        bigger = pair.resized(pair.dim + 6)
        assert bigger.dim == pair.dim + 6
        assert np.linalg.norm(bigger.even_state) == pytest.approx(1.0)
        np.testing.assert_allclose(bigger.even_state[: pair.dim], pair.even_state, atol=1e-14)

    @pytest.mark.unit
    def test_compact_drops_negligible_tail(self):
        """compact() trims to an even truncation without losing weight."""
        pair = moon_cat_states(1.0, 0.0, dim=64, auto_grow=False)
        small = pair.compact(norm_tol=1e-12)
        assert small.dim < pair.dim
        assert small.dim % 2 == 0
        assert abs(np.vdot(small.even_state, pair.even_state[: small.dim])) ** 2 > 1 - 1e-11

    @pytest.mark.unit
    def test_logical_states_are_orthonormal(self):
        """Which-well states from the parity pair are orthonormal."""
        plus, minus = moon_cat_states(1.5, 0.5).logical_states()
        assert abs(np.vdot(plus, minus)) < 1e-12
        assert np.linalg.norm(plus) == pytest.approx(1.0)

    @pytest.mark.unit
    def test_manifold_mixture_has_unit_trace(self):
        """Equal mixture is a unit-trace density matrix."""
        rho = moon_cat_states(1.0, 0.5).manifold_mixture()
        assert np.real(np.trace(rho)) == pytest.approx(1.0)
        assert hilbert.is_hermitian(rho)


# =============================================================================
# Squeezed Cat Tests
# =============================================================================

class TestSqueezedCats:
    """Tests for squeezed_cat_states and squeezed_dissipator."""

    @pytest.mark.unit
    def test_squeezed_cats_in_dissipator_kernel(self):
        """S(r)|C+-> is annihilated by the squeezed two-photon operator."""
        r = math.atanh(0.25)
        pair = squeezed_cat_states(1.5, r)
        op = squeezed_dissipator(pair.dim, 1.5, r)
        assert pair.kind == "squeezed"
        assert pair.squeeze_r == pytest.approx(r)
        for state in (pair.even_state, pair.odd_state):
            assert np.linalg.norm(op @ state) < 1e-8

    @pytest.mark.unit
    def test_squeezing_keeps_parity(self):
        """Squeezed even cat has no odd-level population."""
        pair = squeezed_cat_states(1.0, 0.2)
        assert np.max(np.abs(pair.even_state[1::2])) < 1e-12
        assert abs(np.vdot(pair.even_state, pair.odd_state)) < 1e-12


# =============================================================================
# Photon Number Tests
# =============================================================================

class TestPhotonNumber:
    """Tests for mean photon numbers and amplitude matching."""

    @pytest.mark.unit
    def test_standard_cat_photon_numbers(self):
        """Even and odd standard cats carry alpha^2 tanh and alpha^2 coth."""
        alpha = 1.2
        pair = moon_cat_states(alpha, 0.0)
        a2 = alpha ** 2
        assert mean_photon_number(pair.even_state) == pytest.approx(a2 * math.tanh(a2), rel=1e-9)
        assert mean_photon_number(pair.odd_state) == pytest.approx(a2 / math.tanh(a2), rel=1e-9)

    @pytest.mark.unit
    @pytest.mark.parametrize("lam", [0.0, 0.5, 1.0])
    def test_matched_alpha_hits_target(self, lam):
        """The matched amplitude reproduces the requested n-bar."""
        n_bar = 4.0
        alpha = matched_alpha(n_bar, lam)
        pair = moon_cat_states(alpha, lam, dim=default_state_dim(alpha, lam), auto_grow=False, strict=False)
        assert pair_mean_photon_number(pair) == pytest.approx(n_bar, abs=1e-8)

    @pytest.mark.unit
    def test_deformation_lowers_matched_alpha(self):
        """Deformed cats reach a given n-bar with a smaller alpha."""
        assert matched_alpha(4.0, 1.0) < matched_alpha(4.0, 0.0) < 2.0

    @pytest.mark.unit
    def test_non_positive_photon_number_rejected(self):
        """n_bar <= 0 raises InvalidParameterError."""
        with pytest.raises(InvalidParameterError):
            matched_alpha(0.0)


# =============================================================================
# Wigner Function Tests
# =============================================================================

class TestWigner:
    """Tests for Wigner grids and cuts."""

    @pytest.mark.unit
    def test_vacuum_and_single_photon_origin_values(self):
        """W(0) is +2/pi for the vacuum and -2/pi for |1>."""
        origin = np.array([0.0])
        vacuum = wigner(hilbert.fock(6, 0), re_axis=origin, im_axis=origin)
        single = wigner(hilbert.fock(6, 1), re_axis=origin, im_axis=origin)
        assert vacuum.values[0, 0] == pytest.approx(2 / math.pi, rel=1e-12)
        assert single.values[0, 0] == pytest.approx(-2 / math.pi, rel=1e-12)

    @pytest.mark.unit
    def test_coherent_state_normalization_and_moment(self):
        """Coherent-state grid integrates to 1 and gives <n> = |beta|^2."""
        grid = wigner(hilbert.coherent(30, 1.0), extent=5.0, points=81)
        assert grid.normalization() == pytest.approx(1.0, abs=1e-6)
        assert mean_photon_from_wigner(grid) == pytest.approx(1.0, abs=1e-4)

    @pytest.mark.unit
    def test_moon_cat_respects_wigner_bound(self):
        """|W| never exceeds 2/pi."""
        pair = moon_cat_states(1.5, 1.0, dim=40, auto_grow=False, strict=False)
        grid = wigner(pair.even_state, extent=3.0, points=31)
        assert np.max(np.abs(grid.values)) <= 2 / math.pi + 1e-9

    @pytest.mark.unit
    def test_cut_matches_grid_column(self):
        """wigner_cut along the imaginary axis equals the Re=0 grid column."""
        rho = moon_cat_states(1.0, 0.5).manifold_mixture()
        b = np.linspace(-2.0, 2.0, 9)
        column = wigner(rho, re_axis=np.array([0.0]), im_axis=b).values[:, 0]
        np.testing.assert_allclose(wigner_cut(rho, b, axis="imag"), column, atol=1e-12)

    @pytest.mark.unit
    def test_grid_frame_layout(self):
        """to_frame flattens the grid into re/im/value columns."""
        grid = wigner(hilbert.fock(4, 0), extent=1.0, points=5)
        frame = grid.to_frame()
        assert list(frame.columns) == ["re", "im", "value"]
        assert len(frame) == 25
        assert grid.values.shape == (5, 5)
