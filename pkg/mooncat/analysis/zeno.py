"""
Zeno Z-gate analysis.

This module provides:
- First-order Zeno-gate analytics (Rabi rate, idle and non-adiabatic phase-flip
  rates, closed-form optimum)
- Simulation of the driven parity trace
- Rabi-rate and phase-flip-rate extraction by damped-cosine fit or from the
  slow eigenpair of the driven Liouvillian
- Optimal gate search over a drive-amplitude grid
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from mooncat.analysis.fits import fit_damped_cosine, fit_exp_decay
from mooncat.constants import SECTOR_FULL, SECTOR_PHASEFLIP
from mooncat.exceptions import EigenSolverError, InvalidParameterError, WidenGridError
from mooncat.models import MoonModel, ZenoAnalytics, ZenoOptimum
from mooncat.quantum import dynamics, hilbert
from mooncat.quantum.states import moon_cat_states
from mooncat.utils.timing import time_it

_log = logging.getLogger(__name__)

METHOD_FIT = "fit"
METHOD_SPECTRAL = "spectral"
METHOD_ANALYTIC = "analytic"


# =============================================================================
# Analytics
# =============================================================================

def moon_mean_photon_number(alpha: float, lam: float) -> float:
    """First-order mean photon number alpha^2 + lam^2 / (4 (1 + lam))."""
    return alpha ** 2 + lam ** 2 / (4.0 * (1.0 + lam))


def zeno_analytics(
    alpha: float,
    lam: float,
    kappa2: float,
    kappa1_eff: float,
    n_th: float,
    xi_z: float,
) -> ZenoAnalytics:
    """
    First-order rates of the Zeno gate.

    Omega = 4 xi (alpha - lam^2 / (4 alpha sqrt(1 + lam))) with the leading-order
    limit 4 alpha xi. Gamma_X0 = 2 kappa1_eff n + 2 kappa1 n_th and
    Gamma_X_na = 2 xi^2 / (alpha^2 kappa2 (1 + lam)^2). The optimum balances
    the two rates: Omega* = 4 alpha^3 (1 + lam) sqrt(kappa2 kappa1_eff),
    p_Z* = (pi / (2 alpha (1 + lam))) sqrt(kappa1_eff / kappa2) and
    Gamma_X* = 2 Gamma_X0.

    Args:
        alpha: Cat amplitude (> 0)
        lam: Deformation parameter
        kappa2: Two-photon dissipation rate (> 0)
        kappa1_eff: Effective single-photon loss kappa1 (1 + 2 n_th)
        n_th: Thermal occupation
        xi_z: Zeno drive amplitude

    Returns:
        ZenoAnalytics
    """
    if alpha <= 0 or kappa2 <= 0:
        raise InvalidParameterError("zeno analytics need alpha > 0 and kappa2 > 0")
    n_bar = moon_mean_photon_number(alpha, lam)
    kappa1 = kappa1_eff / (1.0 + 2.0 * n_th)
    rabi = 4.0 * xi_z * (alpha - lam ** 2 / (4.0 * alpha * math.sqrt(1.0 + lam)))
    rabi_leading = 4.0 * alpha * xi_z
    idle = 2.0 * kappa1_eff * n_bar + 2.0 * kappa1 * n_th
    nonadiabatic = 2.0 * xi_z ** 2 / (alpha ** 2 * kappa2 * (1.0 + lam) ** 2)
    total_leading = 2.0 * kappa1_eff * n_bar + 2.0 * xi_z ** 2 / (4.0 * kappa2 * n_bar * (1.0 + lam) ** 2)
    root = math.sqrt(kappa2 * kappa1_eff)
    return ZenoAnalytics(
        rabi=rabi,
        rabi_leading_order=rabi_leading,
        rabi_discrepancy=abs(rabi - rabi_leading),
        gamma_x_idle=idle,
        gamma_x_nonadiabatic=nonadiabatic,
        gamma_x_total_leading_order=total_leading,
        optimal_rabi=4.0 * alpha ** 3 * (1.0 + lam) * root,
        optimal_xi=alpha ** 2 * (1.0 + lam) * root,
        optimal_gamma_x=2.0 * idle,
        optimal_phase_flip_probability=(math.pi / (2.0 * alpha * (1.0 + lam)))
        * math.sqrt(kappa1_eff / kappa2),
        adiabatic_limit_ratio=kappa1_eff / (16.0 * kappa2 * (1.0 + lam)),
    )


def _analytics_for(m: MoonModel, xi_z: float) -> ZenoAnalytics:
    return zeno_analytics(m.alpha, m.lam_real, m.kappa2, m.kappa1_eff, m.n_th, xi_z)


# =============================================================================
# Simulation
# =============================================================================

@time_it
def simulate_zeno(
    m: MoonModel,
    xi_z: float,
    t_grid: Sequence[float],
    method: str = "expm",
    logger: Optional[logging.Logger] = None,
) -> dynamics.TimeSeries:
    """
    Parity trace of the even basis state under the Zeno drive xi_z (a + a-dagger).

    Args:
        m: Moon model
        xi_z: Real drive amplitude
        t_grid: Sample times starting at 0
        method: Integration method passed to evolve
        logger: Optional logger for timing

    Returns:
        TimeSeries with a "parity" column
    """
    pair = moon_cat_states(m.alpha, m.lam, dim=m.truncation, auto_grow=False, strict=False)
    L = dynamics.build_moon_liouvillian(m, drive=xi_z)
    return dynamics.evolve(
        L,
        hilbert.ket_to_dm(pair.even_state),
        t_grid,
        {"parity": hilbert.parity(pair.dim)},
        method=method,
    )


def _fit_rates(m: MoonModel, xi_z: float, t_grid: Optional[Sequence[float]]) -> Tuple[float, float]:
    analytic = _analytics_for(m, xi_z)
    gamma0 = analytic.gamma_x_idle + analytic.gamma_x_nonadiabatic
    if xi_z == 0:
        times = np.linspace(0.0, 3.0 / gamma0, 61) if t_grid is None else np.asarray(t_grid)
        series = simulate_zeno(m, 0.0, times).values["parity"]
        fit = fit_exp_decay([(t, v, 1e-3) for t, v in zip(times, series)], fix_offset=None)
        return 0.0, fit.rate
    if t_grid is None:
        horizon = min(6.0 * math.pi / abs(analytic.rabi), 4.0 / gamma0)
        t_grid = np.linspace(0.0, horizon, 241)
    times = np.asarray(t_grid, dtype=float)
    series = simulate_zeno(m, xi_z, times).values["parity"]
    fit = fit_damped_cosine(times, series, frequency_seed=abs(analytic.rabi), rate_seed=gamma0)
    return fit.frequency, fit.rate


def _spectral_rates(m: MoonModel, xi_z: float) -> Tuple[float, float]:
    if xi_z == 0:
        L = dynamics.build_moon_liouvillian(m)
        return 0.0, dynamics.spectral_gap_rate(L, SECTOR_PHASEFLIP)
    L = dynamics.build_moon_liouvillian(m, drive=xi_z)
    values = dynamics.liouvillian_spectrum(L, SECTOR_FULL)
    values = np.delete(values, int(np.argmin(np.abs(values))))
    scale = max(abs(_analytics_for(m, xi_z).rabi), 1e-300)
    oscillating = values[values.imag > 1e-3 * scale]
    if oscillating.size == 0:
        raise EigenSolverError(f"no oscillating eigenpair found for xi_z={xi_z}")
    slowest = oscillating[int(np.argmin(-oscillating.real))]
    return float(slowest.imag), float(-slowest.real)


def zeno_rates(
    m: MoonModel,
    xi_z: float,
    method: str = METHOD_FIT,
    t_grid: Optional[Sequence[float]] = None,
) -> Tuple[float, float]:
    """
    Rabi rate Omega and phase-flip rate Gamma_X under the Zeno drive.

    Args:
        m: Moon model
        xi_z: Drive amplitude
        method: "fit" (damped-cosine fit of the parity trace), "spectral" (slow
            eigenpair -Gamma_X +- i Omega of the driven Liouvillian) or
            "analytic" (first-order formulas)
        t_grid: Sample times for the fit method

    Returns:
        (Omega, Gamma_X)
    """
    if method == METHOD_FIT:
        return _fit_rates(m, xi_z, t_grid)
    if method == METHOD_SPECTRAL:
        return _spectral_rates(m, xi_z)
    if method == METHOD_ANALYTIC:
        analytic = _analytics_for(m, xi_z)
        return analytic.rabi, analytic.gamma_x_idle + analytic.gamma_x_nonadiabatic
    raise InvalidParameterError(f"unknown zeno rate method '{method}'")


def gate_bitflip_rate(m: MoonModel, xi_z: float) -> float:
    """Slowest non-oscillating decay rate of the driven Liouvillian."""
    L = dynamics.build_moon_liouvillian(m, drive=xi_z)
    values = dynamics.liouvillian_spectrum(L, SECTOR_FULL)
    values = np.delete(values, int(np.argmin(np.abs(values))))
    scale = max(abs(_analytics_for(m, xi_z).rabi), 1e-300)
    real = values[np.abs(values.imag) <= 1e-3 * scale]
    if real.size == 0:
        return 0.0
    return float(max(np.min(-real.real), 0.0))


# =============================================================================
# Optimal Gate Search
# =============================================================================

def _phase_flip_error(rabi: float, gamma_x: float) -> Tuple[float, float]:
    gate_time = math.pi / abs(rabi)
    return gate_time, dynamics.error_probability(gamma_x, gate_time)


def _vertex(xs: np.ndarray, ys: np.ndarray) -> float:
    """Abscissa of the parabola through three points."""
    coeffs = np.polyfit(xs, ys, 2)
    if coeffs[0] <= 0:
        return float(xs[1])
    return float(np.clip(-coeffs[1] / (2.0 * coeffs[0]), xs[0], xs[2]))


@time_it
def optimal_gate_search(
    m: MoonModel,
    xi_grid: Sequence[float],
    method: str = METHOD_SPECTRAL,
    threads: int = 1,
    logger: Optional[logging.Logger] = None,
) -> ZenoOptimum:
    """
    Drive amplitude minimizing the phase-flip error of a Zeno pi gate.

    For every xi the rates give T_pi = pi / Omega and
    eps_X = (1 - exp(-Gamma_X T_pi)) / 2. The grid minimum is refined by a
    parabola in ln(xi) through its neighbors and the rates are re-evaluated
    there.

    Args:
        m: Moon model with kappa1 > 0
        xi_grid: Increasing positive drive amplitudes
        method: "fit", "spectral" or "analytic"
        threads: Worker threads for the grid evaluation
        logger: Optional logger for timing

    Returns:
        ZenoOptimum with the per-xi table

    Raises:
        WidenGridError: If the minimum sits on the grid boundary
    """
    xi_grid = np.asarray(xi_grid, dtype=float)
    if xi_grid.size < 3 or np.any(xi_grid <= 0):
        raise InvalidParameterError("xi grid needs at least three positive amplitudes")

    def evaluate(xi: float) -> Tuple[float, float]:
        return zeno_rates(m, float(xi), method)

    with ThreadPoolExecutor(max_workers=max(int(threads), 1)) as pool:
        rates = list(pool.map(evaluate, xi_grid))

    table: List[Dict[str, float]] = []
    errors = []
    for xi, (rabi, gamma_x) in zip(xi_grid, rates):
        _, eps = _phase_flip_error(rabi, gamma_x)
        errors.append(eps)
        table.append({"xi": float(xi), "rabi": float(rabi), "gamma_x": float(gamma_x), "eps_x": eps})
    errors = np.asarray(errors)
    best = int(np.argmin(errors))
    if best in (0, xi_grid.size - 1):
        raise WidenGridError(
            f"phase-flip error minimum at grid boundary xi={xi_grid[best]:.4g}; widen xi_grid"
        )

    window = slice(best - 1, best + 2)
    ln_xi = _vertex(np.log(xi_grid[window]), errors[window])
    xi_star = math.exp(ln_xi)
    rabi, gamma_x = zeno_rates(m, xi_star, method)
    gate_time, eps = _phase_flip_error(rabi, gamma_x)
    if eps > errors[best]:
        xi_star = float(xi_grid[best])
        rabi, gamma_x = rates[best]
        gate_time, eps = _phase_flip_error(rabi, gamma_x)

    _, idle = zeno_rates(m, 0.0, METHOD_ANALYTIC if method == METHOD_ANALYTIC else METHOD_SPECTRAL)
    bit_flip = 0.0
    if method != METHOD_ANALYTIC:
        bit_flip = dynamics.error_probability(gate_bitflip_rate(m, xi_star), gate_time)

    _log.info(
        f"Zeno optimum xi*={xi_star:.5g} Omega*={rabi:.5g} eps_X*={eps:.4g} ({method})"
    )
    return ZenoOptimum(
        optimal_rabi=float(rabi),
        optimal_xi=float(xi_star),
        gate_time=gate_time,
        phase_flip_error=eps,
        gamma_x=float(gamma_x),
        gamma_x_idle=float(idle),
        bit_flip_error=bit_flip,
        method=method,
        table=table,
    )


def default_xi_grid(m: MoonModel, points: int = 13, decades: float = 1.0) -> np.ndarray:
    """Log-spaced drive amplitudes spanning `decades` around the analytic optimum."""
    center = _analytics_for(m, 0.0).optimal_xi
    return center * np.logspace(-decades / 2.0, decades / 2.0, points)


def quadratic_excess(xi: Sequence[float], gamma_x: Sequence[float], gamma_idle: float) -> Tuple[float, float]:
    """
    Fit Gamma_X(xi) - Gamma_X(0) = c xi^2.

    Returns:
        (c, relative residual norm)
    """
    xi = np.asarray(xi, dtype=float)
    excess = np.asarray(gamma_x, dtype=float) - gamma_idle
    design = xi ** 2
    coeff = float(design @ excess / (design @ design))
    residual = np.linalg.norm(excess - coeff * design) / max(np.linalg.norm(excess), 1e-300)
    return coeff, float(residual)

