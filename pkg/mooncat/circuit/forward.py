"""
Closed-form forward models of the superconducting circuit.

This module provides:
- Mode frequencies of the memory/buffer circuit and the inductance calibration
- Pump-induced couplings (two-photon, longitudinal, spurious, reset)
- Linear drive and Stark shifts of a flux pump
- Compensation-module flux maps with their xi1 zero and phase winding
- Longitudinal-readout histograms and moments
- The Kerr effective detuning

Energies are E/h and rates kappa/2pi, both in Hz; couplings come back as g/2pi.
"""

import logging
import math
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize, stats

from mooncat.constants import REFERENCE_CIRCUIT, REFERENCE_RATES
from mooncat.exceptions import InvalidParameterError
from mooncat.models import CircuitParams, PumpSetting

logger = logging.getLogger(__name__)

# ATS flux bias of the working point (phi_sigma, phi_delta)
WORKING_POINT = (1.5 * math.pi, 0.5 * math.pi)

# Signal speed in the pump cables, m/s
CABLE_SPEED = 2.0e8

SMALL_MODULATION = 0.1


# =============================================================================
# Reference Parameters
# =============================================================================

def reference_circuit_params() -> CircuitParams:
    """Circuit parameters at the working point."""
    return CircuitParams(
        E_Ca=REFERENCE_CIRCUIT["E_Ca"],
        E_Cb=REFERENCE_CIRCUIT["E_Cb"],
        E_Lm=REFERENCE_CIRCUIT["E_Lm"],
        E_L=REFERENCE_CIRCUIT["E_L"],
        E_J=REFERENCE_CIRCUIT["E_J"],
        delta_E_J=REFERENCE_CIRCUIT["delta_E_J_ratio"] * REFERENCE_CIRCUIT["E_J"],
        phi_a=REFERENCE_CIRCUIT["phi_a"],
        phi_b=REFERENCE_CIRCUIT["phi_b"],
        kappa_a=REFERENCE_CIRCUIT["kappa_a"],
        kappa_b=REFERENCE_CIRCUIT["kappa_b"],
    )


def reference_rates() -> dict:
    """Memory and pump rates at the working point (rate / 2pi, Hz)."""
    return dict(REFERENCE_RATES)


# =============================================================================
# Mode Frequencies
# =============================================================================

def bare_frequencies(params: CircuitParams) -> Tuple[float, float]:
    """Uncoupled frequencies sqrt(8 E_Lm E_Ca) and sqrt(8 E_Lm E_Cb)."""
    return math.sqrt(8.0 * params.E_Lm * params.E_Ca), math.sqrt(8.0 * params.E_Lm * params.E_Cb)


def mode_frequencies(omega_a0: float, omega_b0: float, inductance_ratio: float) -> Tuple[float, float]:
    """
    Normal-mode frequencies of the coupled memory/buffer circuit.

    The squared frequencies are the eigenvalues of the 2x2 dynamics matrix,
    with trace w_a0^2 + w_b0^2 (1 + r) and determinant w_a0^2 w_b0^2 r for
    r = L_eff / L_m. The small root is taken as det / large root.

    Args:
        omega_a0: Bare memory frequency
        omega_b0: Bare buffer frequency
        inductance_ratio: L_eff / L_m (>= 0)

    Returns:
        (omega_a, omega_b) with omega_a <= omega_b

    Raises:
        InvalidParameterError: For non-positive frequencies or a negative ratio
    """
    if omega_a0 <= 0 or omega_b0 <= 0 or inductance_ratio < 0:
        raise InvalidParameterError("frequencies must be positive and the inductance ratio non-negative")
    a, b = omega_a0 ** 2, omega_b0 ** 2
    trace = a + b * (1.0 + inductance_ratio)
    det = a * b * inductance_ratio
    discriminant = trace ** 2 - 4.0 * det
    if discriminant < 0:
        logger.warning(f"negative mode discriminant {discriminant:.3g} clipped to zero")
        discriminant = 0.0
    large = 0.5 * (trace + math.sqrt(discriminant))
    small = det / large
    return math.sqrt(small), math.sqrt(large)


def effective_inductance_ratio(
    params: CircuitParams,
    phi_sigma: float = WORKING_POINT[0],
    phi_delta: float = WORKING_POINT[1],
) -> float:
    """
    L_eff / L_m from the curvature of the ATS potential at phi = 0.

    Raises:
        InvalidParameterError: If the curvature is not positive
    """
    curvature = (
        params.E_L
        + 2.0 * params.E_J * math.cos(phi_sigma) * math.cos(phi_delta)
        - 2.0 * params.delta_E_J * math.sin(phi_sigma) * math.sin(phi_delta)
    )
    if curvature <= 0:
        raise InvalidParameterError(f"ATS potential not confining at ({phi_sigma:.3f}, {phi_delta:.3f})")
    return params.E_Lm / curvature


def calibrate_inductance_ratio(
    omega_a0: float,
    omega_b0: float,
    omega_a: float,
    omega_b: float,
    bounds: Tuple[float, float] = (1e-3, 10.0),
) -> float:
    """
    Inductance ratio minimizing the squared log errors of both mode frequencies.
    """
    target = np.log([omega_a, omega_b])

    def cost(ratio: float) -> float:
        return float(np.sum((np.log(mode_frequencies(omega_a0, omega_b0, ratio)) - target) ** 2))

    result = optimize.minimize_scalar(cost, bounds=bounds, method="bounded", options={"xatol": 1e-10})
    return float(result.x)


# =============================================================================
# Pump Couplings
# =============================================================================

class PumpCouplings(NamedTuple):
    """Couplings (g/2pi) of one pump tone and the induced reset rate."""

    g2: float
    g_l: float
    g_sp: float
    g_reset: float
    kappa1_reset: float


def pump_couplings(E_J: float, sigma: float, phi_a: float, phi_b: float,
                   delta_E_J: float, kappa_b: Optional[float] = None) -> PumpCouplings:
    """
    Two-photon, longitudinal, spurious and reset couplings of a sigma pump.

    g2 = E_J s phi_a^2 phi_b / 2, g_l = 2 g2, g_sp = E_J s phi_b^3 / 2 and
    g_reset = dE_J s^2 phi_a phi_b / 8, with s = |sigma|. The reset rate
    4 g_reset^2 / kappa_b is reported when kappa_b is given.
    """
    s = abs(sigma)
    if s > SMALL_MODULATION:
        logger.warning(f"|sigma| = {s:.3g} outside the small-modulation regime")
    g_reset = delta_E_J * s ** 2 * phi_a * phi_b / 8.0
    return PumpCouplings(
        g2=0.5 * E_J * s * phi_a ** 2 * phi_b,
        g_l=E_J * s * phi_a ** 2 * phi_b,
        g_sp=0.5 * E_J * s * phi_b ** 3,
        g_reset=g_reset,
        kappa1_reset=reset_rate(g_reset, kappa_b) if kappa_b else 0.0,
    )


def sigma_for_g2(g2: float, params: CircuitParams) -> float:
    """Pump amplitude giving a target two-photon coupling."""
    return 2.0 * g2 / (params.E_J * params.phi_a ** 2 * params.phi_b)


def kappa2_from_g2(g2: float, kappa_b: float) -> float:
    """Adiabatically eliminated two-photon dissipation 4 g2^2 / kappa_b."""
    return 4.0 * g2 ** 2 / kappa_b


def reset_rate(g_reset: float, kappa_b: float) -> float:
    """Memory dissipation 4 g_reset^2 / kappa_b induced by the reset pump."""
    return 4.0 * g_reset ** 2 / kappa_b


# =============================================================================
# Linear Drive and Stark Shift
# =============================================================================

class DriveResponse(NamedTuple):
    """Linear drives, steady displacements and Stark shifts of both modes."""

    xi1_a: complex
    xi1_b: complex
    zeta_a: complex
    zeta_b: complex
    stark_a: float
    stark_b: float


def linear_drive(sigma: complex, delta: complex, E_J: float, E_L: float, phi: float) -> complex:
    """xi1 = phi (2 E_J sigma - E_L delta)."""
    return phi * (2.0 * E_J * sigma - E_L * delta)


def drive_and_stark(setting: PumpSetting, params: CircuitParams,
                    omega_a: float, omega_b: float) -> DriveResponse:
    """
    Linear drive on each mode and the Stark shifts it causes.

    zeta = -i xi1 / (2i (omega - omega_p) + kappa) is the steady displacement,
    and Delta = (2/3) phi^2 E_J |sigma| (phi_a Re zeta_a + phi_b Re zeta_b).

    Args:
        setting: Pump amplitudes and frequency
        params: Circuit parameters (kappa_a, kappa_b, phi_a, phi_b)
        omega_a: Memory frequency
        omega_b: Buffer frequency

    Returns:
        DriveResponse
    """
    xi_a = linear_drive(setting.sigma, setting.delta, params.E_J, params.E_L, params.phi_a)
    xi_b = linear_drive(setting.sigma, setting.delta, params.E_J, params.E_L, params.phi_b)
    zeta_a = -1j * xi_a / (2j * (omega_a - setting.omega_p) + params.kappa_a)
    zeta_b = -1j * xi_b / (2j * (omega_b - setting.omega_p) + params.kappa_b)
    shared = params.phi_a * zeta_a.real + params.phi_b * zeta_b.real
    scale = (2.0 / 3.0) * params.E_J * abs(setting.sigma)
    return DriveResponse(
        xi1_a=complex(xi_a),
        xi1_b=complex(xi_b),
        zeta_a=complex(zeta_a),
        zeta_b=complex(zeta_b),
        stark_a=float(scale * params.phi_a ** 2 * shared),
        stark_b=float(scale * params.phi_b ** 2 * shared),
    )


# =============================================================================
# Compensation Module
# =============================================================================

class CompensationMap(NamedTuple):
    """Fluxes and linear drive over a (v_att, v_phi) grid, indexed [v_phi, v_att]."""

    v_att: np.ndarray
    v_phi: np.ndarray
    sigma: np.ndarray
    delta: np.ndarray
    xi1: np.ndarray


def compensation_fluxes(v_att, v_phi, mutual: float, delta_l: float, omega_p: float,
                        cable_speed: float = CABLE_SPEED) -> Tuple[np.ndarray, np.ndarray]:
    """
    Common and differential flux amplitudes for a unit input current.

    (sigma, delta) = M/4 [[1, 1], [1, -1]] (-10^-v_att, exp(i (v_phi - omega_p delta_l / c))).
    """
    left = -np.power(10.0, -np.asarray(v_att, dtype=float))
    right = np.exp(1j * (np.asarray(v_phi, dtype=float) - omega_p * delta_l / cable_speed))
    return 0.25 * mutual * (left + right), 0.25 * mutual * (left - right)


def compensation_map(
    v_att: Sequence[float],
    v_phi: Sequence[float],
    mutual: float,
    delta_l: float,
    omega_p: float,
    params: CircuitParams,
    cable_speed: float = CABLE_SPEED,
) -> CompensationMap:
    """xi1 on the memory over a grid of attenuator and phase-shifter settings."""
    att, phi = np.meshgrid(np.asarray(v_att, dtype=float), np.asarray(v_phi, dtype=float))
    sigma, delta = compensation_fluxes(att, phi, mutual, delta_l, omega_p, cable_speed)
    xi1 = linear_drive(sigma, delta, params.E_J, params.E_L, params.phi_a)
    return CompensationMap(np.asarray(v_att, dtype=float), np.asarray(v_phi, dtype=float), sigma, delta, xi1)


def compensation_zero(params: CircuitParams, delta_l: float = 0.0, omega_p: float = 0.0,
                      cable_speed: float = CABLE_SPEED) -> Tuple[float, float]:
    """
    (v_att, v_phi) where xi1 vanishes.

    xi1 is proportional to -(2 E_J - E_L) 10^-v_att + (2 E_J + E_L) e^{i theta},
    which vanishes only for theta = 0 (mod 2pi) and
    10^-v_att = (2 E_J + E_L) / (2 E_J - E_L).

    Raises:
        InvalidParameterError: If 2 E_J <= E_L (no zero exists)
    """
    if 2.0 * params.E_J <= params.E_L:
        raise InvalidParameterError("xi1 has no zero unless 2 E_J > E_L")
    ratio = (2.0 * params.E_J + params.E_L) / (2.0 * params.E_J - params.E_L)
    v_phi = math.remainder(omega_p * delta_l / cable_speed, 2.0 * math.pi)
    return -math.log10(ratio), v_phi


def winding_number(field: np.ndarray) -> int:
    """
    Phase winding of a complex field along the boundary of its grid.

    The loop runs counterclockwise in (column, row) order; phase steps are
    wrapped to (-pi, pi].
    """
    field = np.asarray(field)
    loop = np.concatenate([
        field[0, :],
        field[1:, -1],
        field[-1, -2::-1],
        field[-2:0:-1, 0],
        field[:1, 0],
    ])
    steps = np.angle(loop[1:] / loop[:-1])
    return int(round(steps.sum() / (2.0 * math.pi)))


# =============================================================================
# Longitudinal Readout
# =============================================================================

def _check_populations(populations) -> np.ndarray:
    p = np.asarray(populations, dtype=float)
    if np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-6:
        raise InvalidParameterError("photon distribution must be non-negative and normalized")
    return p


def readout_histogram(populations: Sequence[float], upsilon: float, sigma0: float,
                      signal: Sequence[float]) -> np.ndarray:
    """
    Density of the integrated readout signal: sum_n P(n) N(s; upsilon n, sigma0^2).

    Args:
        populations: Fock-state probabilities P(n)
        upsilon: Signal per photon
        sigma0: Noise width of the empty-memory signal
        signal: Points s at which to evaluate the density

    Returns:
        Density values at `signal`
    """
    p = _check_populations(populations)
    if sigma0 <= 0:
        raise InvalidParameterError("noise width must be positive")
    s = np.asarray(signal, dtype=float)
    centers = upsilon * np.arange(p.size)
    return stats.norm.pdf(s[:, None], loc=centers[None, :], scale=sigma0) @ p


def readout_moments(populations: Sequence[float], upsilon: float, sigma0: float) -> Tuple[float, float]:
    """Mean upsilon <n> and variance sigma0^2 + upsilon^2 Var(n) of the readout signal."""
    p = _check_populations(populations)
    n = np.arange(p.size)
    mean_n = float(p @ n)
    var_n = float(p @ (n - mean_n) ** 2)
    return upsilon * mean_n, sigma0 ** 2 + upsilon ** 2 * var_n


def poisson_populations(n_bar: float, dim: Optional[int] = None) -> np.ndarray:
    """Fock distribution of a coherent state, renormalized on the truncation."""
    dim = dim if dim is not None else int(n_bar + 10.0 * math.sqrt(n_bar + 1.0) + 10)
    p = stats.poisson.pmf(np.arange(dim), n_bar)
    return p / p.sum()


def linear_regime_bound(kappa_b: float, g_l: float, phi_a: float, phi_b: float) -> float:
    """Largest photon number mapped linearly: 2 (kappa_b^2 / 4 g_l^2) (phi_a / phi_b)^2."""
    return 2.0 * kappa_b ** 2 / (4.0 * g_l ** 2) * (phi_a / phi_b) ** 2


# =============================================================================
# Kerr Detuning
# =============================================================================

def kerr_detuning(delta: float, K4: float, K6: float, alpha_abs):
    """Delta_eff = 2 Delta - K4 - 2 K4 |a|^2 - K6 |a|^(3/2) - K6 |a|^(5/2)."""
    a = np.abs(np.asarray(alpha_abs, dtype=float))
    value = 2.0 * delta - K4 - 2.0 * K4 * a ** 2 - K6 * a ** 1.5 - K6 * a ** 2.5
    return float(value) if value.ndim == 0 else value
