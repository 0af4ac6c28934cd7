"""
Scenario tests for the headline behaviors of the laboratory.

Tests cover:
- Adiabatic elimination of the buffer mode and its breakdown
- Bit-flip suppression of moon cats at equal photon number
- Moon vs squeezed cats: scaling exponents and rates
- The idle phase-flip law with thermal photons
- Spectral Zeno-gate optimum against the first-order formulas
- Repetition-code logical rate below threshold
- Adaptive vs fixed-grid lifetime benchmark and estimator accuracy
- The Beta variance estimator against the exact posterior
"""

import numpy as np
import pytest

from mooncat.analysis.fits import fit_bitflip_scaling
from mooncat.analysis.scaling import sweep_point
from mooncat.analysis.zeno import default_xi_grid, optimal_gate_search, zeno_analytics
from mooncat.estimation.adaptive import (
    SyntheticDecayOracle,
    benchmark_table,
    beta_posterior_variance,
    beta_variance,
    run_adaptive,
)
from mooncat.models import MoonModel, TwoModeModel
from mooncat.qec.repcode import threshold_sweep
from mooncat.quantum.dynamics import (
    adiabatic_comparison,
    build_moon_liouvillian,
    build_two_mode_liouvillian,
    liouvillian_spectrum,
)

# Idle-rate simulation parameters in units of kappa2: kappa_a = 1e-3,
# kappa_phi = 20 kappa_a, K4 = 15 kappa_a
IDLE_BASE = MoonModel(alpha=2.0, kappa2=1.0, kappa1=1e-3, kappa_phi=0.02, K4=0.015)

# =============================================================================
# Memory Physics Scenarios
# =============================================================================

class TestMemoryScenarios:
    """End-to-end checks of the dissipative memory."""

    @pytest.mark.scenario
    @pytest.mark.slow
    def test_buffer_elimination_matches_reduced_model(self):
        """A strongly damped buffer reproduces the reduced phase-flip rate."""
        model = TwoModeModel(g2=0.1, xi_d=-0.1, kappa_b=8.0, kappa1=1e-4, memory_dim=14)
        comparison = adiabatic_comparison(model)
        assert comparison.adiabatic
        assert comparison.gamma_x_two_mode > 0
        assert comparison.relative_deviation < 0.1

    @pytest.mark.scenario
    @pytest.mark.slow
    def test_moon_cat_suppresses_bit_flips(self):
        """At equal n_bar the deformed cat has a smaller Gamma_Z."""
        base = MoonModel(alpha=2.0, kappa2=1.0, kappa1=1e-3)
        standard = sweep_point(base, 3.0, 0.0)
        moon = sweep_point(base, 3.0, 0.5)
        assert 0 < moon["gamma_z"] < standard["gamma_z"]
        assert moon["gamma_x"] == pytest.approx(standard["gamma_x"], rel=0.5)

    @pytest.mark.scenario
    @pytest.mark.slow
    def test_spectral_zeno_optimum_near_first_order(self):
        """The spectral gate error for alpha = 2 is within 20% of p_Z*."""
        model = MoonModel(alpha=2.0, kappa2=1.0, kappa1=1e-3)
        optimum = optimal_gate_search(model, default_xi_grid(model, 9), method="spectral")
        analytics = zeno_analytics(2.0, 0.0, 1.0, 1e-3, 0.0, optimum.optimal_xi)
        assert optimum.phase_flip_error == pytest.approx(analytics.optimal_phase_flip_probability, rel=0.2)
        assert optimum.optimal_xi == pytest.approx(analytics.optimal_xi, rel=0.3)

    @pytest.mark.scenario
    @pytest.mark.slow
    def test_buffer_elimination_breakdown(self):
        """Violating the margins leaves Gamma_X alone but detunes the confinement gap."""
        stiff = TwoModeModel(g2=0.1, xi_d=-0.1, kappa_b=1.6, kappa1=1e-4, memory_dim=14)
        comparison = adiabatic_comparison(stiff)
        assert not comparison.adiabatic
        # dark state is exact for any kappa_b
        assert comparison.relative_deviation < 0.01

        soft = stiff.model_copy(update={"kappa_b": 0.4})
        two_mode = liouvillian_spectrum(build_two_mode_liouvillian(soft), "phaseflip", k=3)
        reduced = liouvillian_spectrum(build_moon_liouvillian(soft.to_reduced_model()), "phaseflip", k=3)
        assert abs(two_mode[2].imag) > abs(two_mode[2].real)
        assert abs(reduced[2].imag) < 1e-6 * abs(reduced[2].real)
        assert abs(abs(two_mode[2].real) - abs(reduced[2].real)) / abs(reduced[2].real) > 0.2

# =============================================================================
# Idle Rate Scenarios
# =============================================================================

class TestIdleRateScenarios:
    """Gamma_Z scaling with n_bar and the idle Gamma_X law."""

    N_BARS = (3.0, 4.0, 5.0)

    def _exponent(self, lam: float) -> float:
        rows = [(n, sweep_point(IDLE_BASE, n, lam)["gamma_z"]) for n in self.N_BARS]
        return fit_bitflip_scaling(rows).exponent

    @pytest.mark.scenario
    @pytest.mark.slow
    def test_standard_cat_exponent(self):
        """The undeformed cat has gamma close to 2 (about 1.67 here)."""
        assert 1.6 <= self._exponent(0.0) <= 2.2

    @pytest.mark.scenario
    @pytest.mark.slow
    def test_exponent_grows_with_lambda(self):
        """gamma rises strictly from lam = 0 through 0.5 to 1."""
        exponents = [self._exponent(lam) for lam in (0.0, 0.5, 1.0)]
        assert exponents[0] < exponents[1] < exponents[2]

    @pytest.mark.scenario
    @pytest.mark.slow
    def test_phase_flip_insensitive_to_lambda(self):
        """At fixed n_bar Gamma_X varies by less than 25% across lam."""
        rates = [sweep_point(IDLE_BASE, 4.0, lam)["gamma_x"] for lam in (0.0, 0.5, 1.0)]
        assert max(rates) / min(rates) < 1.25

    @pytest.mark.scenario
    @pytest.mark.slow
    @pytest.mark.parametrize("n_bar", [3.0, 4.0])
    def test_moon_and_squeezed_rates_comparable(self, n_bar):
        """At lam = 0.5 the moon and squeezed Gamma_Z agree within a factor 2."""
        moon = sweep_point(IDLE_BASE, n_bar, 0.5, kind="moon")["gamma_z"]
        squeezed = sweep_point(IDLE_BASE, n_bar, 0.5, kind="squeezed")["gamma_z"]
        assert 0.5 < moon / squeezed < 2.0

    @pytest.mark.scenario
    @pytest.mark.slow
    @pytest.mark.parametrize("n_th", [0.11, 0.93])
    @pytest.mark.parametrize("n_bar", [2.0, 4.0, 6.0])
    def test_phase_flip_thermal_law(self, n_th, n_bar):
        """Gamma_X follows 2 kappa1 n_bar (1 + 2 n_th) + 2 kappa1 n_th."""
        base = MoonModel(alpha=1.0, kappa2=1.0, kappa1=1e-3, n_th=n_th)
        expected = 2e-3 * n_bar * (1.0 + 2.0 * n_th) + 2e-3 * n_th
        assert sweep_point(base, n_bar, 0.0)["gamma_x"] == pytest.approx(expected, rel=0.05)

# =============================================================================
# Error Correction Scenarios
# =============================================================================

class TestRepetitionCodeScenario:
    """Below threshold the logical rate falls with distance."""

    @pytest.mark.scenario
    @pytest.mark.slow
    def test_logical_rate_falls_with_distance(self):
        """p_ZL(d=3) > p_ZL(d=5) > p_ZL(d=7) for a moon cat at kappa1/kappa2 = 1e-3."""
        rows = threshold_sweep([{"kind": "moon", "n_bar": 4.0, "lam": 1.0}], [3, 5, 7], [1e-3],
                               shots=400000, seed=2, threads=2, min_errors=200)
        rates = [row["p_ZL"] for row in sorted(rows, key=lambda row: row["d"])]
        assert rates[0] > rates[1] > rates[2]

# =============================================================================
# Estimation Scenarios
# =============================================================================

class TestBenchmarkScenario:
    """Adaptive and fixed-grid campaigns side by side."""

    @pytest.mark.scenario
    @pytest.mark.slow
    def test_benchmark_rows(self):
        """Each rate gets one adaptive and one fixed-grid row with positive times."""
        rows = benchmark_table([1.0], campaigns=2, seed=4, target_sigma=0.3)
        assert [row["method"] for row in rows] == ["adaptive", "fixed"]
        for row in rows:
            assert row["mean_total_time"] > 0
            assert row["ratio"] > 0
            assert 0.0 <= row["mle_within_20pct"] <= 1.0

    @pytest.mark.scenario
    @pytest.mark.slow
    @pytest.mark.parametrize("rate", [0.1, 10.0])
    def test_adaptive_estimators_agree(self, rate):
        """Seeded campaigns: MLE within 20%, LSE present and within one joint sigma of it."""
        results = [run_adaptive(SyntheticDecayOracle(rate, c0=0.95, seed=seed)) for seed in range(10)]
        assert sum(abs(r.mle - rate) <= 0.2 * rate for r in results) >= 8
        fitted = [r for r in results if r.lse is not None]
        assert len(fitted) >= 9
        consistent = sum(
            abs(r.mle - r.lse.rate) <= np.hypot(r.mle_sigma, r.lse.rate_sigma) for r in fitted
        )
        assert consistent >= 0.8 * len(fitted)

    @pytest.mark.scenario
    @pytest.mark.slow
    def test_beta_variance_matches_posterior(self):
        """The closed form equals the Beta posterior variance times ((N + 2) / N)^2."""
        for n in range(1, 51):
            for x in range(n + 1):
                expected = beta_posterior_variance(x, n) * ((n + 2.0) / n) ** 2
                assert beta_variance(x, n) == pytest.approx(expected, rel=1e-8)
