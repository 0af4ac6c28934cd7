"""
Data models for the mooncat laboratory.

This module defines Pydantic models for the parameter bundles and report
records passed between modules:
- Memory-mode and memory-buffer physical models
- Fit reports (decays, scalings, fringes, Ramsey, Wigner surfaces)
- Zeno-gate analytics and optimum records
- Lifetime measurement records
- Repetition-code error model
- Superconducting circuit parameters and pump settings
"""

import hashlib
import json
import math
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from mooncat.constants import DISSIPATOR_MOON, DISSIPATOR_SQUEEZED


def canonical_hash(payload: Dict[str, Any]) -> str:
    """Return a SHA-256 hex digest of a JSON-serializable payload."""
    text = json.dumps(payload, sort_keys=True, default=str, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# =============================================================================
# Physical Models
# =============================================================================

class MoonModel(BaseModel):
    """Single-mode memory model stabilized by the engineered two-photon dissipator.

    All rates share one (arbitrary) unit; times are in its inverse.
    """

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(ge=0.0)
    lam: complex = 0j
    kappa2: float = Field(default=1.0, ge=0.0)
    kappa1: float = Field(default=0.0, ge=0.0)
    n_th: float = Field(default=0.0, ge=0.0)
    kappa_phi: float = Field(default=0.0, ge=0.0)
    K4: float = 0.0
    K6: float = 0.0
    delta: float = 0.0
    dissipator: Literal["moon", "squeezed"] = DISSIPATOR_MOON
    dim: Optional[int] = Field(default=None, ge=2)

    @model_validator(mode="after")
    def _check_squeezed_lambda(self) -> "MoonModel":
        if self.dissipator == DISSIPATOR_SQUEEZED:
            if abs(self.lam.imag) > 0 or abs(self.lam.real) >= 2.0:
                raise ValueError("squeezed dissipator needs real lambda with |lambda| < 2")
        return self

    @property
    def lam_real(self) -> float:
        """Real part of the deformation parameter."""
        return float(self.lam.real)

    @property
    def squeeze_r(self) -> float:
        """Squeezing parameter r = atanh(lambda/2) of the equivalent squeezed cat."""
        return math.atanh(self.lam_real / 2.0)

    @property
    def min_dim(self) -> int:
        """Smallest truncation accepted for this model."""
        return 4 * math.ceil(self.alpha ** 2 * (1.0 + abs(self.lam))) + 10

    @property
    def truncation(self) -> int:
        """Truncation in use: the explicit dim or the minimum."""
        return self.dim if self.dim is not None else self.min_dim

    @property
    def kappa_conf(self) -> float:
        """Confinement rate 4 alpha^2 kappa2 (1 + lambda)."""
        return 4.0 * self.alpha ** 2 * self.kappa2 * (1.0 + self.lam_real)

    @property
    def kappa1_eff(self) -> float:
        """Effective single-photon loss kappa1 (1 + 2 n_th)."""
        return self.kappa1 * (1.0 + 2.0 * self.n_th)

    def model_hash(self) -> str:
        """Stable hash of the model parameters."""
        payload = self.model_dump()
        payload["lam"] = [self.lam.real, self.lam.imag]
        return canonical_hash(payload)


class TwoModeModel(BaseModel):
    """Memory-buffer model before adiabatic elimination of the buffer."""

    model_config = ConfigDict(frozen=True)

    g2: complex
    g_l: complex = 0j
    xi_d: complex
    kappa_b: float = Field(gt=0.0)
    memory_dim: int = Field(ge=2)
    buffer_dim: int = Field(default=5, ge=3)
    kappa1: float = Field(default=0.0, ge=0.0)
    n_th: float = Field(default=0.0, ge=0.0)

    @model_validator(mode="after")
    def _check_coupling(self) -> "TwoModeModel":
        if self.g2 == 0:
            raise ValueError("g2 must be nonzero")
        return self

    @property
    def lam(self) -> complex:
        """Deformation lambda = g_l / g2."""
        return self.g_l / self.g2

    @property
    def alpha_squared(self) -> float:
        """Stabilized alpha^2 = -xi_d / (g2 (1 + lambda))."""
        value = -self.xi_d / (self.g2 * (1.0 + self.lam))
        return float(value.real)

    @property
    def alpha(self) -> float:
        """Stabilized cat amplitude."""
        return math.sqrt(max(self.alpha_squared, 0.0))

    @property
    def kappa2(self) -> float:
        """Reduced two-photon dissipation rate 4|g2|^2 / kappa_b."""
        return 4.0 * abs(self.g2) ** 2 / self.kappa_b

    @property
    def composite_dim(self) -> int:
        """Dimension of the memory x buffer space."""
        return self.memory_dim * self.buffer_dim

    @property
    def adiabatic_margin_amplitude(self) -> float:
        """8 |g2 alpha| / kappa_b."""
        return 8.0 * abs(self.g2) * self.alpha / self.kappa_b

    @property
    def adiabatic_margin_drive(self) -> float:
        """8 sqrt(|g2 xi_d|) / kappa_b."""
        return 8.0 * math.sqrt(abs(self.g2 * self.xi_d)) / self.kappa_b

    @property
    def adiabatic(self) -> bool:
        """True when the stricter of the two margins is below 1/5."""
        return max(self.adiabatic_margin_amplitude, self.adiabatic_margin_drive) < 0.2

    def to_reduced_model(self, dim: Optional[int] = None) -> MoonModel:
        """Return the adiabatically eliminated single-mode model."""
        return MoonModel(
            alpha=self.alpha,
            lam=self.lam,
            kappa2=self.kappa2,
            kappa1=self.kappa1,
            n_th=self.n_th,
            dim=dim if dim is not None else self.memory_dim,
        )

    def model_hash(self) -> str:
        """Stable hash of the model parameters."""
        payload = {
            key: ([value.real, value.imag] if isinstance(value, complex) else value)
            for key, value in self.model_dump().items()
        }
        return canonical_hash(payload)


# =============================================================================
# Fit Reports
# =============================================================================

class DecayFit(BaseModel):
    """Exponential decay C_inf + (C0 - C_inf) exp(-rate t)."""

    model: str = "exp_decay"
    rate: float = Field(gt=0.0)
    amplitude: float
    offset: float = 0.0
    rate_sigma: float = Field(ge=0.0)
    amplitude_sigma: float = Field(ge=0.0)
    offset_sigma: float = Field(default=0.0, ge=0.0)
    offset_fixed: bool = True
    residual_norm: float
    n_points: int


class ScalingFit(BaseModel):
    """Bit-flip scaling Gamma_Z(n) = A exp(-gamma n)."""

    model: str = "bitflip_scaling"
    prefactor: float = Field(gt=0.0)
    exponent: float
    exponent_sigma: float = Field(ge=0.0)
    covariance: List[List[float]]  # on (ln A, gamma)
    n_points: int
    window: List[float]


class PhaseFlipFit(BaseModel):
    """Affine phase-flip law Gamma_X(n) = 2 kappa1 n (1 + 2 n_th) + 2 kappa1 n_th."""

    model: str = "phaseflip_affine"
    kappa1: float
    kappa1_sigma: float = Field(ge=0.0)
    kappa1_eff: float
    slope: float
    offset: float
    n_th: float
    flagged: bool = False


class DampedCosineFit(BaseModel):
    """Damped oscillation A exp(-rate t) cos(frequency t + phase) + offset."""

    model: str = "damped_cosine"
    amplitude: float
    rate: float
    frequency: float
    phase: float
    offset: float
    sigmas: Dict[str, float] = Field(default_factory=dict)
    residual_norm: float


class FringeFit(BaseModel):
    """Fringe decay W(ib, t) = A exp(-t/T_X) cos(b/nu) exp(-b^2 / 2 sigma^2)."""

    model: str = "fringes"
    amplitude: float
    t_x: float = Field(gt=0.0)
    wavelength: float
    width: float
    sigmas: Dict[str, float] = Field(default_factory=dict)
    residual_norm: float


class RamseyFit(BaseModel):
    """Quadrature pair X = A e^{-t/T2} cos(D t + phi), Y = A e^{-t/T2} sin(D t + phi)."""

    model: str = "ramsey"
    t2: float = Field(gt=0.0)
    detuning: float
    amplitude: float
    phase: float
    sigmas: Dict[str, float] = Field(default_factory=dict)
    residual_norm: float


class WignerFit(BaseModel):
    """Moon-cat Wigner surface fit."""

    model: str = "moon_wigner"
    alpha: float
    lam: float
    amplitude: float
    n_bar_fit: float
    residual_norm: float


class KerrFit(BaseModel):
    """Kerr effective-detuning fit of (Delta, K4, K6)."""

    model: str = "kerr_detuning"
    delta: float
    K4: float
    K6: float
    covariance: List[List[float]]
    residual_norm: float


# =============================================================================
# Zeno Gate
# =============================================================================

class ZenoAnalytics(BaseModel):
    """First-order Zeno-gate rates and optimum."""

    rabi: float
    rabi_leading_order: float
    rabi_discrepancy: float
    gamma_x_idle: float
    gamma_x_nonadiabatic: float
    gamma_x_total_leading_order: float
    optimal_rabi: float
    optimal_xi: float
    optimal_gamma_x: float
    optimal_phase_flip_probability: float
    adiabatic_limit_ratio: float  # kappa1_eff / (16 kappa2 (1 + lambda))


class ZenoOptimum(BaseModel):
    """Result of the optimal Zeno-gate search."""

    optimal_rabi: float
    optimal_xi: float
    gate_time: float
    phase_flip_error: float
    gamma_x: float
    gamma_x_idle: float
    bit_flip_error: float
    method: str
    table: List[Dict[str, float]] = Field(default_factory=list)


# =============================================================================
# Lifetime Measurements
# =============================================================================

class MeasurementRecord(BaseModel):
    """One batch of shots at a fixed measurement time."""

    model_config = ConfigDict(frozen=True)

    t: float = Field(gt=0.0)
    shots: int = Field(ge=0)
    basis: Literal[0, 1] = 0
    outcome: int = Field(ge=0)

    @model_validator(mode="after")
    def _check_outcome(self) -> "MeasurementRecord":
        if self.outcome > self.shots:
            raise ValueError("outcome count exceeds shots")
        return self


# =============================================================================
# Repetition Code
# =============================================================================

class CircuitErrorModel(BaseModel):
    """Phase-flip probabilities of the repetition-code operations."""

    model_config = ConfigDict(frozen=True)

    p_prep_Z: float = Field(ge=0.0, le=0.5)
    p_meas_Z: float = Field(ge=0.0, le=0.5)
    p_cnot_Zc: float = Field(ge=0.0, le=0.5)
    p_cnot_Zt: float = Field(ge=0.0, le=0.5)
    p_cnot_ZcZt: float = Field(ge=0.0, le=0.5)
    provenance: Dict[str, Any] = Field(default_factory=dict)

    def scaled(self, field: str, factor: float) -> "CircuitErrorModel":
        """Return a copy with one probability multiplied by factor."""
        return self.model_copy(update={field: getattr(self, field) * factor})


# =============================================================================
# Superconducting Circuit
# =============================================================================

class CircuitParams(BaseModel):
    """Circuit energies (E/h in Hz), zero-point fluctuations and rates (kappa/2pi in Hz)."""

    model_config = ConfigDict(frozen=True)

    E_Ca: float = Field(gt=0.0)
    E_Cb: float = Field(gt=0.0)
    E_Lm: float = Field(gt=0.0)
    E_L: float = Field(gt=0.0)
    E_J: float = Field(gt=0.0)
    delta_E_J: float
    phi_a: float = Field(gt=0.0, lt=1.0)
    phi_b: float = Field(gt=0.0, lt=1.0)
    kappa_a: float = Field(ge=0.0)
    kappa_b: float = Field(gt=0.0)


class PumpSetting(BaseModel):
    """Complex flux-modulation amplitudes of one pump tone."""

    model_config = ConfigDict(frozen=True)

    sigma: complex = 0j
    delta: complex = 0j
    omega_p: float = 0.0
