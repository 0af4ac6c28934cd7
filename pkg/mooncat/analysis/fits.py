"""
Weighted least-squares fitting for decay, oscillation and scaling models.

This module provides:
- A shared Levenberg-Marquardt engine with analytic Jacobians and Gauss-Newton
  covariances
- Exponential decays, damped cosines, fringe decays and Ramsey quadratures
- Exponential bit-flip scaling and affine phase-flip laws
- Wigner-surface fits of moon-cat states and Gaussian widths of thermal states
- Kerr effective-detuning regression

Samples are (t, value, sigma) triples or equivalent arrays; sigma are absolute
1-sigma errors.
"""

import logging
import math
from typing import Callable, Dict, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from mooncat.config.defaults import get_default
from mooncat.exceptions import FitFailedError, InvalidParameterError, TruncationError
from mooncat.models import (
    DampedCosineFit,
    DecayFit,
    FringeFit,
    KerrFit,
    PhaseFlipFit,
    RamseyFit,
    ScalingFit,
    WignerFit,
)
from mooncat.quantum.states import (
    mean_photon_from_wigner,
    mean_photon_number,
    moon_cat_states,
    wigner,
)

logger = logging.getLogger(__name__)


# =============================================================================
# Least-Squares Engine
# =============================================================================

class LeastSquaresResult(NamedTuple):
    """Optimum, covariance and weighted residual norm."""

    params: np.ndarray
    covariance: np.ndarray
    residual_norm: float
    nfev: int


def least_squares_fit(
    residuals: Callable[[np.ndarray], np.ndarray],
    x0: Sequence[float],
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    max_iterations: Optional[int] = None,
    ftol: Optional[float] = None,
) -> LeastSquaresResult:
    """
    Levenberg-Marquardt minimization of weighted residuals.

    Args:
        residuals: Weighted residual vector as a function of parameters
        x0: Starting parameters
        jacobian: Analytic Jacobian (forward differences when None)
        max_iterations: Function-evaluation budget
        ftol: Relative cost-reduction tolerance

    Returns:
        LeastSquaresResult with covariance (J^T J)^-1 at the optimum

    Raises:
        FitFailedError: If the optimizer does not converge
    """
    max_iterations = max_iterations or get_default("fit_max_iterations")
    ftol = ftol if ftol is not None else get_default("fit_ftol")
    x0 = np.asarray(x0, dtype=float)
    try:
        result = optimize.least_squares(
            residuals,
            x0,
            jac=jacobian if jacobian is not None else "2-point",
            method="lm",
            ftol=ftol,
            xtol=1e-15,
            gtol=1e-15,
            max_nfev=max_iterations * (1 if jacobian is not None else x0.size + 1),
        )
    except (ValueError, FloatingPointError) as exc:
        raise FitFailedError(f"least-squares evaluation failed: {exc}", last_iterate=x0) from exc
    if result.status <= 0 or not np.all(np.isfinite(result.x)):
        raise FitFailedError(f"fit did not converge: {result.message}", last_iterate=result.x)
    jac = result.jac
    covariance = np.linalg.pinv(jac.T @ jac)
    return LeastSquaresResult(
        params=result.x,
        covariance=covariance,
        residual_norm=float(np.linalg.norm(result.fun)),
        nfev=int(result.nfev),
    )


def _as_samples(samples) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    data = np.asarray(samples, dtype=float)
    if data.ndim != 2 or data.shape[1] not in (2, 3):
        raise InvalidParameterError("samples must be (t, value[, sigma]) rows")
    t, y = data[:, 0], data[:, 1]
    sigma = data[:, 2] if data.shape[1] == 3 else np.ones_like(t)
    if np.any(sigma <= 0):
        raise InvalidParameterError("sample sigmas must be positive")
    return t, y, sigma


def _sigmas(covariance: np.ndarray) -> np.ndarray:
    return np.sqrt(np.clip(np.diag(covariance), 0.0, None))


# =============================================================================
# Exponential Decay
# =============================================================================

def exp_decay_model(params: np.ndarray, t: np.ndarray, fixed_offset: Optional[float]) -> np.ndarray:
    """C_inf + (C0 - C_inf) exp(-Gamma t) with params (ln Gamma, C0[, C_inf])."""
    rate = math.exp(params[0])
    offset = params[2] if fixed_offset is None else fixed_offset
    return offset + (params[1] - offset) * np.exp(-rate * t)


def exp_decay_jacobian(params: np.ndarray, t: np.ndarray, fixed_offset: Optional[float]) -> np.ndarray:
    """Jacobian of exp_decay_model with respect to (ln Gamma, C0[, C_inf])."""
    rate = math.exp(params[0])
    offset = params[2] if fixed_offset is None else fixed_offset
    decay = np.exp(-rate * t)
    columns = [-(params[1] - offset) * rate * t * decay, decay]
    if fixed_offset is None:
        columns.append(1.0 - decay)
    return np.column_stack(columns)


def _half_life_rate(t: np.ndarray, y: np.ndarray, offset: float) -> float:
    order = np.argsort(t)
    t, y = t[order], y[order]
    start = y[0] - offset
    if start == 0:
        return 1.0 / max(np.ptp(t), 1e-300)
    ratio = (y - offset) / start
    below = np.flatnonzero(ratio <= 0.5)
    t_half = t[below[0]] if below.size else t[-1]
    t_half = t_half if t_half > 0 else max(np.ptp(t), 1e-300)
    return math.log(2.0) / t_half


def fit_exp_decay(samples, fix_offset=0.0) -> DecayFit:
    """
    Fit C_inf + (C0 - C_inf) exp(-Gamma t).

    The rate is fitted through ln Gamma, so Gamma > 0 and rescaling t -> c t
    rescales Gamma by 1/c. Starting rates are log-spaced around the data
    half-life; the best-converged start wins.

    Args:
        samples: (t, value, sigma) rows, at least three
        fix_offset: Fixed C_inf (default 0); None fits it (Zeno-gate mode)

    Returns:
        DecayFit

    Raises:
        InvalidParameterError: If fewer than three samples are given
        FitFailedError: If no start converges
    """
    t, y, sigma = _as_samples(samples)
    n_free = 2 if fix_offset is not None else 3
    if t.size < 3 or t.size < n_free:
        raise InvalidParameterError(f"need at least 3 samples, got {t.size}")
    offset_seed = fix_offset if fix_offset is not None else float(y[np.argmax(t)])
    base_rate = _half_life_rate(t, y, offset_seed)
    seeds = base_rate * np.logspace(-1.0, 1.0, int(get_default("fit_rate_seeds")))
    amplitude_seed = float(y[np.argmin(t)])

    def residuals(p):
        return (exp_decay_model(p, t, fix_offset) - y) / sigma

    def jacobian(p):
        return exp_decay_jacobian(p, t, fix_offset) / sigma[:, None]

    best: Optional[LeastSquaresResult] = None
    last_error: Optional[FitFailedError] = None
    for rate in seeds:
        x0 = [math.log(rate), amplitude_seed] + ([] if fix_offset is not None else [offset_seed])
        try:
            result = least_squares_fit(residuals, x0, jacobian)
        except FitFailedError as exc:
            last_error = exc
            continue
        if best is None or result.residual_norm < best.residual_norm:
            best = result
    if best is None:
        raise FitFailedError("exponential decay fit failed for every start",
                             last_iterate=getattr(last_error, "last_iterate", None))

    errors = _sigmas(best.covariance)
    rate = math.exp(best.params[0])
    return DecayFit(
        rate=rate,
        amplitude=float(best.params[1]),
        offset=float(best.params[2]) if fix_offset is None else float(fix_offset),
        rate_sigma=rate * float(errors[0]),
        amplitude_sigma=float(errors[1]),
        offset_sigma=float(errors[2]) if fix_offset is None else 0.0,
        offset_fixed=fix_offset is not None,
        residual_norm=best.residual_norm,
        n_points=int(t.size),
    )


# =============================================================================
# Scaling Laws
# =============================================================================

def fit_bitflip_scaling(
    points,
    window: Optional[Tuple[float, float]] = None,
    saturation_floor: Optional[float] = None,
) -> ScalingFit:
    """
    Fit Gamma_Z(n) = A exp(-gamma n) by linear regression of ln Gamma_Z on n.

    Args:
        points: (n_bar, Gamma_Z) rows
        window: Inclusive n_bar range used for the fit
        saturation_floor: Rates below saturation_factor times this floor are excluded

    Returns:
        ScalingFit with covariance on (ln A, gamma)

    Raises:
        InvalidParameterError: If fewer than three usable points remain
    """
    data = np.asarray(points, dtype=float)
    n_bar, rates = data[:, 0], data[:, 1]
    mask = rates > 0
    if window is not None:
        mask &= (n_bar >= window[0]) & (n_bar <= window[1])
    if saturation_floor is not None:
        mask &= rates > get_default("saturation_factor") * saturation_floor
    if np.count_nonzero(mask) < 3:
        raise InvalidParameterError(
            f"need at least 3 points inside the fit window, got {np.count_nonzero(mask)}"
        )
    x, ln_rate = n_bar[mask], np.log(rates[mask])
    design = np.column_stack([np.ones_like(x), -x])
    coeffs, _, _, _ = np.linalg.lstsq(design, ln_rate, rcond=None)
    residual = ln_rate - design @ coeffs
    dof = max(x.size - 2, 1)
    s2 = float(residual @ residual) / dof
    covariance = s2 * np.linalg.inv(design.T @ design)
    return ScalingFit(
        prefactor=math.exp(coeffs[0]),
        exponent=float(coeffs[1]),
        exponent_sigma=math.sqrt(max(covariance[1, 1], 0.0)),
        covariance=covariance.tolist(),
        n_points=int(x.size),
        window=[float(x.min()), float(x.max())],
    )


def fit_phaseflip_affine(points, n_th: float, sigmas: Optional[Sequence[float]] = None) -> PhaseFlipFit:
    """
    Fit Gamma_X(n) = 2 kappa1 n (1 + 2 n_th) + 2 kappa1 n_th with n_th fixed.

    The only free parameter is kappa1; the slope is 2 kappa1_eff.

    Args:
        points: (n_bar, Gamma_X) rows
        n_th: Thermal occupation, fixed externally
        sigmas: Optional absolute errors of Gamma_X

    Returns:
        PhaseFlipFit (flagged when kappa1 comes out negative)
    """
    data = np.asarray(points, dtype=float)
    n_bar, rates = data[:, 0], data[:, 1]
    basis = 2.0 * n_bar * (1.0 + 2.0 * n_th) + 2.0 * n_th
    weights = np.ones_like(rates) if sigmas is None else 1.0 / np.asarray(sigmas, dtype=float) ** 2
    normal = float(np.sum(weights * basis ** 2))
    kappa1 = float(np.sum(weights * basis * rates)) / normal
    if sigmas is None:
        residual = rates - kappa1 * basis
        dof = max(rates.size - 1, 1)
        kappa1_sigma = math.sqrt(float(residual @ residual) / dof / normal)
    else:
        kappa1_sigma = math.sqrt(1.0 / normal)
    flagged = kappa1 < 0
    if flagged:
        logger.warning(f"phase-flip fit gave negative kappa1={kappa1:.4g}")
    return PhaseFlipFit(
        kappa1=kappa1,
        kappa1_sigma=kappa1_sigma,
        kappa1_eff=kappa1 * (1.0 + 2.0 * n_th),
        slope=2.0 * kappa1 * (1.0 + 2.0 * n_th),
        offset=2.0 * kappa1 * n_th,
        n_th=n_th,
        flagged=flagged,
    )


# =============================================================================
# Oscillations
# =============================================================================

def damped_cosine_model(params: np.ndarray, t: np.ndarray) -> np.ndarray:
    """A exp(-rate t) cos(omega t + phase) + offset with params (A, rate, omega, phase, offset)."""
    amplitude, rate, omega, phase, offset = params
    return amplitude * np.exp(-rate * t) * np.cos(omega * t + phase) + offset


def damped_cosine_jacobian(params: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Jacobian of damped_cosine_model."""
    amplitude, rate, omega, phase, _ = params
    envelope = np.exp(-rate * t)
    cos_term = np.cos(omega * t + phase)
    sin_term = np.sin(omega * t + phase)
    return np.column_stack([
        envelope * cos_term,
        -amplitude * t * envelope * cos_term,
        -amplitude * t * envelope * sin_term,
        -amplitude * envelope * sin_term,
        np.ones_like(t),
    ])


def _dominant_frequency(t: np.ndarray, y: np.ndarray) -> float:
    """Angular frequency of the largest periodogram peak (uniform sampling assumed)."""
    step = float(np.median(np.diff(t)))
    padded = 8 * t.size
    spectrum = np.abs(np.fft.rfft(y - y.mean(), n=padded))
    freqs = np.fft.rfftfreq(padded, d=step)
    return 2.0 * math.pi * float(freqs[1 + int(np.argmax(spectrum[1:]))])


def fit_damped_cosine(
    t: Sequence[float],
    y: Sequence[float],
    sigma: Optional[Sequence[float]] = None,
    frequency_seed: Optional[float] = None,
    rate_seed: Optional[float] = None,
) -> DampedCosineFit:
    """
    Fit A exp(-rate t) cos(omega t + phase) + offset.

    Args:
        t: Sample times (uniform when no frequency seed is given)
        y: Samples
        sigma: Absolute sample errors (unit weights when None)
        frequency_seed: Starting angular frequency
        rate_seed: Starting decay rate

    Returns:
        DampedCosineFit
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    sigma = np.ones_like(t) if sigma is None else np.asarray(sigma, dtype=float)
    omega0 = frequency_seed if frequency_seed is not None else _dominant_frequency(t, y)
    offset0 = 0.0
    rate0 = rate_seed if rate_seed is not None else 1.0 / max(np.ptp(t), 1e-300)
    amplitude0 = float(y[0] - offset0)
    x0 = [amplitude0 if amplitude0 else 1.0, rate0, omega0, 0.0, offset0]

    result = least_squares_fit(
        lambda p: (damped_cosine_model(p, t) - y) / sigma,
        x0,
        lambda p: damped_cosine_jacobian(p, t) / sigma[:, None],
    )
    params = result.params.copy()
    if params[0] < 0:
        params[0] = -params[0]
        params[3] += math.pi
    if params[2] < 0:
        params[2] = -params[2]
        params[3] = -params[3]
    params[3] = (params[3] + math.pi) % (2.0 * math.pi) - math.pi
    errors = _sigmas(result.covariance)
    names = ("amplitude", "rate", "frequency", "phase", "offset")
    return DampedCosineFit(
        amplitude=float(params[0]),
        rate=float(params[1]),
        frequency=float(params[2]),
        phase=float(params[3]),
        offset=float(params[4]),
        sigmas={name: float(err) for name, err in zip(names, errors)},
        residual_norm=result.residual_norm,
    )


def fringe_model(params: np.ndarray, b: np.ndarray, t: np.ndarray) -> np.ndarray:
    """A exp(-t/T_X) cos(b/nu) exp(-b^2 / 2 sigma^2) with params (A, ln T_X, nu, sigma)."""
    amplitude, ln_tx, nu, width = params
    return (amplitude * np.exp(-t * math.exp(-ln_tx)) * np.cos(b / nu)
            * np.exp(-b ** 2 / (2.0 * width ** 2)))


def fringe_jacobian(params: np.ndarray, b: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Jacobian of fringe_model."""
    amplitude, ln_tx, nu, width = params
    rate = math.exp(-ln_tx)
    envelope = np.exp(-t * rate) * np.exp(-b ** 2 / (2.0 * width ** 2))
    cos_term = np.cos(b / nu)
    value = amplitude * envelope * cos_term
    return np.column_stack([
        envelope * cos_term,
        value * t * rate,
        amplitude * envelope * np.sin(b / nu) * b / nu ** 2,
        value * b ** 2 / width ** 3,
    ])


def fit_fringes(
    b: Sequence[float],
    cuts: np.ndarray,
    times: Sequence[float],
    alpha: Optional[float] = None,
    lam: float = 0.0,
    sigma: Optional[float] = None,
) -> FringeFit:
    """
    Joint fit of Wigner cuts W(ib, t) to A exp(-t/T_X) cos(b/nu) exp(-b^2/2 sigma^2).

    nu is the fringe length (1/(4 alpha) for a standard cat); it is seeded
    there when alpha is given, and the envelope width at (1 + lam)/2.

    Args:
        b: Positions along the imaginary axis
        cuts: Array of shape (len(times), len(b))
        times: Slice times, at least two
        alpha: Cat amplitude used to seed nu
        lam: Deformation used to seed the width
        sigma: Absolute error of every sample

    Returns:
        FringeFit
    """
    b = np.asarray(b, dtype=float)
    times = np.asarray(times, dtype=float)
    cuts = np.asarray(cuts, dtype=float)
    if times.size < 2:
        raise InvalidParameterError("fringe fit needs at least two time slices")
    bb, tt = np.meshgrid(b, times)
    bb, tt, values = bb.ravel(), tt.ravel(), cuts.ravel()
    weight = 1.0 / (sigma if sigma is not None else 1.0)

    center = int(np.argmin(np.abs(b)))
    first, last = cuts[0, center], cuts[-1, center]
    if first != 0 and last / first > 0 and last != first:
        tx0 = (times[-1] - times[0]) / math.log(first / last)
    else:
        tx0 = max(np.ptp(times), 1e-12)
    if alpha is not None and alpha > 0:
        nu0 = 1.0 / (4.0 * alpha)
    else:
        nu0 = 1.0 / max(_dominant_frequency(b, cuts[0]), 1e-12)
    x0 = [first if first else 1.0, math.log(abs(tx0)), nu0, 0.5 * (1.0 + lam)]

    result = least_squares_fit(
        lambda p: (fringe_model(p, bb, tt) - values) * weight,
        x0,
        lambda p: fringe_jacobian(p, bb, tt) * weight,
    )
    amplitude, ln_tx, nu, width = result.params
    errors = _sigmas(result.covariance)
    t_x = math.exp(ln_tx)
    return FringeFit(
        amplitude=float(amplitude),
        t_x=t_x,
        wavelength=abs(float(nu)),
        width=abs(float(width)),
        sigmas={"amplitude": float(errors[0]), "t_x": t_x * float(errors[1]),
                "wavelength": float(errors[2]), "width": float(errors[3])},
        residual_norm=result.residual_norm,
    )


def fit_ramsey(
    t: Sequence[float],
    x: Sequence[float],
    y: Sequence[float],
    sigma: Optional[float] = None,
) -> RamseyFit:
    """
    Joint fit of X = A e^{-t/T2} cos(D t + phi), Y = A e^{-t/T2} sin(D t + phi).

    Starts come from the phase slope and log-amplitude slope of X + iY.

    Args:
        t: Shared sample times
        x: In-phase quadrature
        y: Out-of-phase quadrature
        sigma: Absolute error of every sample

    Returns:
        RamseyFit (detuning D, may be negative)
    """
    t = np.asarray(t, dtype=float)
    signal = np.asarray(x, dtype=float) + 1j * np.asarray(y, dtype=float)
    weight = 1.0 / (sigma if sigma is not None else 1.0)
    usable = np.abs(signal) > 1e-3 * np.max(np.abs(signal))
    phase_slope, phase0 = np.polyfit(t[usable], np.unwrap(np.angle(signal[usable])), 1)
    log_slope, log0 = np.polyfit(t[usable], np.log(np.abs(signal[usable])), 1)
    t2_seed = -1.0 / log_slope if log_slope < 0 else max(np.ptp(t), 1e-12)
    x0 = [math.exp(log0), math.log(t2_seed), phase_slope, phase0]

    def model(p):
        amplitude, ln_t2, detuning, phi = p
        return amplitude * np.exp(-t * math.exp(-ln_t2)) * np.exp(1j * (detuning * t + phi))

    def residuals(p):
        diff = model(p) - signal
        return np.concatenate([diff.real, diff.imag]) * weight

    def jacobian(p):
        amplitude, ln_t2, _, _ = p
        value = model(p)
        rate = math.exp(-ln_t2)
        columns = [value / amplitude, value * t * rate, 1j * t * value, 1j * value]
        stacked = np.column_stack(columns)
        return np.vstack([stacked.real, stacked.imag]) * weight

    result = least_squares_fit(residuals, x0, jacobian)
    amplitude, ln_t2, detuning, phi = result.params
    errors = _sigmas(result.covariance)
    t2 = math.exp(ln_t2)
    return RamseyFit(
        t2=t2,
        detuning=float(detuning),
        amplitude=float(amplitude),
        phase=float(phi),
        sigmas={"amplitude": float(errors[0]), "t2": t2 * float(errors[1]),
                "detuning": float(errors[2]), "phase": float(errors[3])},
        residual_norm=result.residual_norm,
    )


# =============================================================================
# Phase-Space Fits
# =============================================================================

class GaussianFit(NamedTuple):
    """Gaussian cut A exp(-b^2 / 2 sigma^2) and the implied thermal occupation."""

    amplitude: float
    sigma: float
    n_th: float
    residual_norm: float


def fit_thermal_wigner(b: Sequence[float], values: Sequence[float]) -> GaussianFit:
    """
    Fit a centered Gaussian to a thermal-state Wigner cut.

    sigma = sqrt(1 + 2 n_th) / 2, so n_th = 2 sigma^2 - 1/2.
    """
    b = np.asarray(b, dtype=float)
    values = np.asarray(values, dtype=float)

    def residuals(p):
        return p[0] * np.exp(-b ** 2 / (2.0 * p[1] ** 2)) - values

    def jacobian(p):
        gauss = np.exp(-b ** 2 / (2.0 * p[1] ** 2))
        return np.column_stack([gauss, p[0] * gauss * b ** 2 / p[1] ** 3])

    amplitude0 = float(values[np.argmin(np.abs(b))])
    result = least_squares_fit(residuals, [amplitude0, 0.5], jacobian)
    width = abs(float(result.params[1]))
    return GaussianFit(
        amplitude=float(result.params[0]),
        sigma=width,
        n_th=2.0 * width ** 2 - 0.5,
        residual_norm=result.residual_norm,
    )


def fit_moon_wigner(
    w,
    alpha0: Optional[float] = None,
    lam0: Optional[float] = None,
    dim: Optional[int] = None,
    parity: str = "even",
) -> WignerFit:
    """
    Fit the analytic moon-cat Wigner surface to a sampled grid.

    Parameters are (alpha, lam, amplitude); the Jacobian is taken by forward
    differences. Without starts, alpha is seeded from the photon-number moment
    on a coarse lam scan.

    Args:
        w: WignerGrid
        alpha0: Starting amplitude
        lam0: Starting deformation
        dim: Truncation of the model states
        parity: "even" or "odd" basis state

    Returns:
        WignerFit with the mean photon number of the fitted state
    """
    target = w.values.ravel()
    n_moment = max(mean_photon_from_wigner(w), 0.05)

    def state_of(alpha: float, lam: float) -> np.ndarray:
        size = dim if dim is not None else 4 * math.ceil(alpha ** 2 * (1.0 + abs(lam))) + 20
        pair = moon_cat_states(abs(alpha), lam, dim=size, auto_grow=False, strict=False)
        return pair.even_state if parity == "even" else pair.odd_state

    def surface(alpha: float, lam: float) -> np.ndarray:
        return wigner(state_of(alpha, lam), w.re_axis, w.im_axis).values.ravel()

    def residuals(p):
        try:
            return p[2] * surface(p[0], p[1]) - target
        except TruncationError:
            return np.full_like(target, 1e3)

    if alpha0 is None or lam0 is None:
        candidates = [lam0] if lam0 is not None else [0.0, 0.25, 0.5, 0.75, 1.0]
        best = None
        for lam in candidates:
            alpha = alpha0 if alpha0 is not None else math.sqrt(
                max(n_moment - lam ** 2 / (4.0 * (1.0 + lam)), 0.05))
            cost = float(np.linalg.norm(residuals([alpha, lam, 1.0])))
            if best is None or cost < best[0]:
                best = (cost, alpha, lam)
        _, alpha0, lam0 = best

    result = least_squares_fit(residuals, [alpha0, lam0, 1.0])
    alpha, lam, amplitude = result.params
    return WignerFit(
        alpha=abs(float(alpha)),
        lam=float(lam),
        amplitude=float(amplitude),
        n_bar_fit=mean_photon_number(state_of(alpha, lam)),
        residual_norm=result.residual_norm,
    )


# =============================================================================
# Kerr Detuning
# =============================================================================

def kerr_design(alpha_abs: np.ndarray) -> np.ndarray:
    """Columns multiplying (Delta, K4, K6) in the effective-detuning formula."""
    alpha_abs = np.asarray(alpha_abs, dtype=float)
    return np.column_stack([
        2.0 * np.ones_like(alpha_abs),
        -(1.0 + 2.0 * alpha_abs ** 2),
        -(alpha_abs ** 1.5 + alpha_abs ** 2.5),
    ])


def fit_kerr_detuning(
    alpha_abs: Sequence[float],
    delta_eff: Sequence[float],
    sigma: Optional[Sequence[float]] = None,
) -> KerrFit:
    """
    Linear least-squares fit of (Delta, K4, K6) to effective-detuning samples.

    Args:
        alpha_abs: Cat amplitudes |alpha|
        delta_eff: Measured effective detunings
        sigma: Optional absolute errors

    Returns:
        KerrFit
    """
    design = kerr_design(alpha_abs)
    target = np.asarray(delta_eff, dtype=float)
    if target.size < 3:
        raise InvalidParameterError("Kerr fit needs at least three samples")
    weights = np.ones_like(target) if sigma is None else 1.0 / np.asarray(sigma, dtype=float)
    coeffs, _, _, _ = np.linalg.lstsq(design * weights[:, None], target * weights, rcond=None)
    residual = (design @ coeffs - target) * weights
    dof = max(target.size - 3, 1)
    scale = 1.0 if sigma is not None else float(residual @ residual) / dof
    weighted = design * weights[:, None]
    covariance = scale * np.linalg.pinv(weighted.T @ weighted)
    return KerrFit(
        delta=float(coeffs[0]),
        K4=float(coeffs[1]),
        K6=float(coeffs[2]),
        covariance=covariance.tolist(),
        residual_norm=float(np.linalg.norm(residual)),
    )


def fit_report(fit) -> Dict:
    """JSON-ready dictionary of a fit report."""
    return fit.model_dump()
