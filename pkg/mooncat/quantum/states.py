"""
Moon-cat, standard-cat and squeezed-cat basis states, and Wigner functions.

This module provides:
- The even/odd kernel states of the deformed two-photon dissipator, built from
  their Fock-coefficient recurrence with automatic truncation growth
- Squeezed-cat states S(r)|C+-> for the squeezed-dissipator comparison
- Wigner functions evaluated as displaced-parity expectations
- Photon-number moments from Wigner grids and amplitude matching by n-bar
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import pandas as pd
from scipy import optimize, special

from mooncat.config.defaults import get_default
from mooncat.constants import DISSIPATOR_MOON, DISSIPATOR_SQUEEZED
from mooncat.exceptions import InvalidParameterError, TruncationError
from mooncat.quantum import hilbert

logger = logging.getLogger(__name__)


# =============================================================================
# Data Types
# =============================================================================

@dataclass(frozen=True)
class MoonCatPair:
    """Even/odd parity basis states of a cat qubit.

    Attributes:
        alpha: Cat amplitude (alpha' for squeezed cats)
        lam: Deformation parameter (0 for standard and squeezed cats)
        dim: Fock truncation of the state vectors
        even_state: Normalized state supported on even Fock indices
        odd_state: Normalized state supported on odd Fock indices
        norm_even: Normalization constant N+ applied to the raw coefficients
        norm_odd: Normalization constant N- applied to the raw coefficients
        even_cutoff: First even index at which the even chain vanishes exactly
        kind: "moon" or "squeezed"
        squeeze_r: Squeeze parameter of squeezed cats
    """

    alpha: float
    lam: complex
    dim: int
    even_state: np.ndarray
    odd_state: np.ndarray
    norm_even: float
    norm_odd: float
    even_cutoff: Optional[int] = None
    kind: str = DISSIPATOR_MOON
    squeeze_r: float = 0.0

    def resized(self, dim: int) -> "MoonCatPair":
        """Re-express the pair at another truncation (zero-padded or cut, renormalized)."""
        return MoonCatPair(
            alpha=self.alpha,
            lam=self.lam,
            dim=dim,
            even_state=_normalize(_fit_length(self.even_state, dim)),
            odd_state=_normalize(_fit_length(self.odd_state, dim)),
            norm_even=self.norm_even,
            norm_odd=self.norm_odd,
            even_cutoff=self.even_cutoff,
            kind=self.kind,
            squeeze_r=self.squeeze_r,
        )

    def compact(self, norm_tol: float = 1e-12) -> "MoonCatPair":
        """Smallest even truncation keeping all but norm_tol of both states' weight."""
        weights = np.abs(self.even_state) ** 2 + np.abs(self.odd_state) ** 2
        tail = 0.5 * (weights.sum() - np.cumsum(weights))
        keep = int(np.argmax(tail < norm_tol)) + 1 if np.any(tail < norm_tol) else self.dim
        keep = min(max(keep + keep % 2, 4), self.dim)
        return self if keep == self.dim else self.resized(keep)

    def density_matrices(self) -> Tuple[np.ndarray, np.ndarray]:
        """Return (|C+><C+|, |C-><C-|)."""
        return hilbert.ket_to_dm(self.even_state), hilbert.ket_to_dm(self.odd_state)

    def logical_states(self) -> Tuple[np.ndarray, np.ndarray]:
        """Return the which-well states (|C+> + |C->)/sqrt2 and (|C+> - |C->)/sqrt2."""
        plus = (self.even_state + self.odd_state) / math.sqrt(2.0)
        minus = (self.even_state - self.odd_state) / math.sqrt(2.0)
        return plus, minus

    def manifold_mixture(self) -> np.ndarray:
        """Equal mixture of the two basis states."""
        rho_even, rho_odd = self.density_matrices()
        return 0.5 * (rho_even + rho_odd)


@dataclass(frozen=True)
class WignerGrid:
    """Wigner function sampled on a rectangular phase-space grid.

    Attributes:
        re_axis: Sample points of Re(beta)
        im_axis: Sample points of Im(beta)
        values: W(beta) with shape (len(im_axis), len(re_axis))
    """

    re_axis: np.ndarray
    im_axis: np.ndarray
    values: np.ndarray

    @property
    def cell_area(self) -> float:
        """Area element of the grid."""
        return float((self.re_axis[1] - self.re_axis[0]) * (self.im_axis[1] - self.im_axis[0]))

    def normalization(self) -> float:
        """Discretized integral of W over the grid (1 for a well-covered state)."""
        return float(self.values.sum() * self.cell_area)

    def betas(self) -> np.ndarray:
        """Complex grid points with the same shape as values."""
        re, im = np.meshgrid(self.re_axis, self.im_axis)
        return re + 1j * im

    def to_frame(self) -> pd.DataFrame:
        """Flatten to a (re, im, value) table."""
        re, im = np.meshgrid(self.re_axis, self.im_axis)
        return pd.DataFrame({"re": re.ravel(), "im": im.ravel(), "value": self.values.ravel()})


# =============================================================================
# Helpers
# =============================================================================

def _normalize(vector: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(vector)
    return vector / norm if norm > 0 else vector


def _fit_length(vector: np.ndarray, dim: int) -> np.ndarray:
    out = np.zeros(dim, dtype=complex)
    n = min(dim, vector.shape[0])
    out[:n] = vector[:n]
    return out


def moon_coefficients(alpha: float, lam: complex, length: int) -> np.ndarray:
    """
    Raw Fock coefficients of the dissipator's kernel.

    mu_{n+2} = [alpha^2 + lam (alpha^2 - n)] / sqrt((n+2)(n+1)) mu_n, mu_0 = mu_1 = 1.
    Even entries span |C+>, odd entries |C->.

    Args:
        alpha: Cat amplitude
        lam: Deformation parameter
        length: Number of coefficients to produce

    Returns:
        Complex coefficient array (non-finite entries signal divergence)
    """
    n = np.arange(length - 2, dtype=float)
    a2 = alpha ** 2
    factors = (a2 + lam * (a2 - n)) / np.sqrt((n + 2.0) * (n + 1.0))
    mu = np.zeros(length, dtype=complex)
    with np.errstate(over="ignore", invalid="ignore"):
        mu[0::2] = np.concatenate(([1.0], np.cumprod(factors[0::2])))[: mu[0::2].shape[0]]
        mu[1::2] = np.concatenate(([1.0], np.cumprod(factors[1::2])))[: mu[1::2].shape[0]]
    return mu


def apply_moon_dissipator(psi: np.ndarray, alpha: float, lam: complex) -> np.ndarray:
    """
    Apply (a^2 - alpha^2 + lam (a-dagger a - alpha^2)) to a truncated vector.

    The vector is treated as the restriction of an infinite one with zero
    tail, so the result has the exact truncation defect of the state.
    """
    dim = psi.shape[0]
    n = np.arange(dim, dtype=float)
    out = (lam * n - alpha ** 2 * (1.0 + lam)) * psi
    out[: dim - 2] += np.sqrt((n[: dim - 2] + 2.0) * (n[: dim - 2] + 1.0)) * psi[2:]
    return out


def _even_cutoff(mu: np.ndarray) -> Optional[int]:
    even = mu[0::2]
    zeros = np.flatnonzero(even == 0)
    return int(2 * zeros[0]) if zeros.size else None


def _convergence(mu: np.ndarray, alpha: float, lam: complex) -> Tuple[float, float]:
    """Return (tail ratio, normalized kernel residual) over both parity chains."""
    tail = 0.0
    residual = 0.0
    for chain in (0, 1):
        part = np.zeros_like(mu)
        part[chain::2] = mu[chain::2]
        peak = np.max(np.abs(part))
        tail = max(tail, float(np.max(np.abs(part[-2:])) / peak))
        residual = max(residual, float(np.linalg.norm(apply_moon_dissipator(_normalize(part), alpha, lam))))
    return tail, residual


def default_state_dim(alpha: float, lam: complex) -> int:
    """Starting truncation for the kernel states."""
    return 4 * math.ceil(alpha ** 2 * (1.0 + abs(lam))) + int(get_default("dim_margin")) + 10


# =============================================================================
# Cat States
# =============================================================================

def moon_cat_states(
    alpha: float,
    lam: complex = 0.0,
    dim: Optional[int] = None,
    auto_grow: bool = True,
    strict: bool = True,
    tol: Optional[float] = None,
    kernel_tol: Optional[float] = None,
    max_dim: Optional[int] = None,
) -> MoonCatPair:
    """
    Even and odd kernel states of the moon-cat dissipator.

    For lam = 0 these are the standard even/odd cat states. The truncation is
    accepted once the tail ratio |mu_dim| / max|mu| and the normalized kernel
    residual of both chains are below their tolerances; with auto_grow the
    dimension doubles until then.

    Args:
        alpha: Cat amplitude (>= 0)
        lam: Deformation parameter
        dim: Starting (or fixed, without auto_grow) truncation
        auto_grow: Grow the truncation until converged
        strict: Raise when not converged; otherwise return the truncated,
            renormalized states at dim
        tol: Tail-ratio tolerance
        kernel_tol: Kernel-residual tolerance (residual divided by sqrt(kappa2))
        max_dim: Largest truncation tried

    Returns:
        MoonCatPair

    Raises:
        InvalidParameterError: If alpha < 0
        TruncationError: If coefficients do not converge within max_dim
    """
    if alpha < 0:
        raise InvalidParameterError(f"alpha must be >= 0, got {alpha}")
    tol = tol if tol is not None else get_default("state_tol")
    kernel_tol = kernel_tol if kernel_tol is not None else get_default("kernel_tol")
    max_dim = max_dim if max_dim is not None else get_default("max_state_dim")
    current = int(dim) if dim is not None else default_state_dim(alpha, lam)
    current = max(current, 4)

    while True:
        mu = moon_coefficients(alpha, lam, current)
        finite = bool(np.all(np.isfinite(mu)))
        if finite:
            tail, residual = _convergence(mu, alpha, lam)
            if (tail < tol and residual < kernel_tol) or not strict:
                break
        if not strict and not finite:
            raise TruncationError(f"kernel coefficients diverge for alpha={alpha}, lambda={lam}")
        if not auto_grow or current >= max_dim:
            detail = "diverge" if not finite else f"tail={tail:.2e}, residual={residual:.2e}"
            raise TruncationError(
                f"kernel states not converged at dim={current} for alpha={alpha}, "
                f"lambda={lam} ({detail})"
            )
        current = min(2 * current, max_dim)

    even = np.zeros(current, dtype=complex)
    odd = np.zeros(current, dtype=complex)
    even[0::2] = mu[0::2]
    odd[1::2] = mu[1::2]
    norm_even = 1.0 / float(np.linalg.norm(even))
    norm_odd = 1.0 / float(np.linalg.norm(odd))
    return MoonCatPair(
        alpha=float(alpha),
        lam=lam,
        dim=current,
        even_state=even * norm_even,
        odd_state=odd * norm_odd,
        norm_even=norm_even,
        norm_odd=norm_odd,
        even_cutoff=_even_cutoff(mu),
    )


def squeezed_cat_states(
    alpha_prime: float,
    r: float,
    dim: Optional[int] = None,
    auto_grow: bool = True,
) -> MoonCatPair:
    """
    Squeezed-cat basis states S(r)|C+-_{alpha'}>.

    They span the kernel of S(r)(a^2 - alpha'^2)S-dagger(r).

    Args:
        alpha_prime: Amplitude of the unsqueezed cat
        r: Squeeze parameter
        dim: Truncation (grown if the underlying cat needs more)
        auto_grow: Grow the truncation of the underlying cat

    Returns:
        MoonCatPair with kind "squeezed"
    """
    start = dim if dim is not None else max(default_state_dim(alpha_prime, 0.0),
                                            4 * math.ceil(math.exp(2.0 * abs(r))))
    cats = moon_cat_states(alpha_prime, 0.0, dim=start, auto_grow=auto_grow)
    squeezer = hilbert.squeeze(cats.dim, r)
    return MoonCatPair(
        alpha=float(alpha_prime),
        lam=0.0,
        dim=cats.dim,
        even_state=squeezer @ cats.even_state,
        odd_state=squeezer @ cats.odd_state,
        norm_even=cats.norm_even,
        norm_odd=cats.norm_odd,
        even_cutoff=None,
        kind=DISSIPATOR_SQUEEZED,
        squeeze_r=float(r),
    )


def squeezed_dissipator(dim: int, alpha_prime: float, r: float) -> np.ndarray:
    """
    Engineered squeezed-cat operator S(r)(a^2 - alpha'^2)S-dagger(r) / cosh^2 r.

    Multiply by sqrt(kappa2) for the jump operator.
    """
    a = hilbert.ladder(dim)
    squeezer = hilbert.squeeze(dim, r)
    core = a @ a - alpha_prime ** 2 * np.eye(dim)
    return squeezer @ core @ hilbert.dag(squeezer) / math.cosh(r) ** 2


def mean_photon_number(state: np.ndarray) -> float:
    """Operator expectation <a-dagger a> of a vector or density matrix."""
    dim = state.shape[0]
    return float(np.real(hilbert.expect(hilbert.number(dim), state)))


def pair_mean_photon_number(pair: MoonCatPair) -> float:
    """Mean photon number of the equal mixture of the two basis states."""
    return 0.5 * (mean_photon_number(pair.even_state) + mean_photon_number(pair.odd_state))


def matched_alpha(
    n_bar: float,
    lam: float = 0.0,
    kind: str = DISSIPATOR_MOON,
    dim: Optional[int] = None,
) -> float:
    """
    Amplitude whose qubit-manifold mixture has mean photon number n_bar.

    For moon cats the states are evaluated at the given truncation without
    convergence checks, consistent with a Liouvillian built at that truncation.
    For squeezed cats the squeeze parameter is atanh(lam/2).

    Args:
        n_bar: Target mean photon number (> 0)
        lam: Deformation parameter
        kind: "moon" or "squeezed"
        dim: Truncation used for the photon-number evaluation

    Returns:
        The matching alpha (alpha' for squeezed cats)
    """
    if n_bar <= 0:
        raise InvalidParameterError(f"n_bar must be positive, got {n_bar}")
    r = math.atanh(lam / 2.0) if kind == DISSIPATOR_SQUEEZED else 0.0

    def photon_gap(alpha: float) -> float:
        if kind == DISSIPATOR_SQUEEZED:
            cats = moon_cat_states(alpha, 0.0, dim=dim, auto_grow=dim is None)
            squeezer = hilbert.squeeze(cats.dim, r)
            pair_n = 0.5 * (
                mean_photon_number(squeezer @ cats.even_state)
                + mean_photon_number(squeezer @ cats.odd_state)
            )
        else:
            size = dim if dim is not None else default_state_dim(alpha, lam)
            pair = moon_cat_states(alpha, lam, dim=size, auto_grow=False, strict=False)
            pair_n = pair_mean_photon_number(pair)
        return pair_n - n_bar

    upper = math.sqrt(n_bar) + 2.0
    return float(optimize.brentq(photon_gap, 1e-3, upper, xtol=1e-12))


# =============================================================================
# Wigner Functions
# =============================================================================

def displacement_element(n: int, m: int, gamma: np.ndarray) -> np.ndarray:
    """
    Closed-form <n|D(gamma)|m> for an array of complex gamma.

    Uses generalized Laguerre polynomials, exact on the infinite space.
    """
    x = np.abs(gamma) ** 2
    if n >= m:
        log_ratio = 0.5 * (special.gammaln(m + 1) - special.gammaln(n + 1))
        return (np.exp(log_ratio) * gamma ** (n - m) * np.exp(-0.5 * x)
                * special.eval_genlaguerre(m, n - m, x))
    log_ratio = 0.5 * (special.gammaln(n + 1) - special.gammaln(m + 1))
    return (np.exp(log_ratio) * (-np.conj(gamma)) ** (m - n) * np.exp(-0.5 * x)
            * special.eval_genlaguerre(n, m - n, x))


def _wigner_values(rho: np.ndarray, betas: np.ndarray) -> np.ndarray:
    """(2/pi) Tr[D(-beta) rho D(beta) P] = (2/pi) sum rho_mn (-1)^m <n|D(2 beta)|m>."""
    gamma = 2.0 * betas
    dim = rho.shape[0]
    total = np.zeros(betas.shape, dtype=float)
    scale = np.max(np.abs(rho))
    for m in range(dim):
        for n in range(m, dim):
            rho_mn = rho[m, n]
            if abs(rho_mn) <= 1e-16 * scale:
                continue
            term = rho_mn * (-1.0) ** m * displacement_element(n, m, gamma)
            total += term.real if n == m else 2.0 * term.real
    return 2.0 / np.pi * total


def grid_axis(extent: Optional[float] = None, points: Optional[int] = None) -> np.ndarray:
    """Symmetric sample axis [-extent, extent] with the given number of points."""
    extent = extent if extent is not None else get_default("wigner_extent")
    points = points if points is not None else get_default("wigner_points")
    return np.linspace(-extent, extent, int(points))


def wigner(
    rho: np.ndarray,
    re_axis: Optional[np.ndarray] = None,
    im_axis: Optional[np.ndarray] = None,
    extent: Optional[float] = None,
    points: Optional[int] = None,
) -> WignerGrid:
    """
    Wigner function W(beta) = (2/pi) Tr[D(-beta) rho D(beta) P] on a grid.

    Args:
        rho: Density matrix or state vector
        re_axis: Re(beta) samples (default symmetric axis from extent/points)
        im_axis: Im(beta) samples (default equal to re_axis)
        extent: Half-width of the default axes
        points: Number of samples of the default axes

    Returns:
        WignerGrid
    """
    if rho.ndim == 1:
        rho = hilbert.ket_to_dm(rho)
    re_axis = np.asarray(re_axis, dtype=float) if re_axis is not None else grid_axis(extent, points)
    im_axis = np.asarray(im_axis, dtype=float) if im_axis is not None else re_axis.copy()
    re, im = np.meshgrid(re_axis, im_axis)
    values = _wigner_values(rho, re + 1j * im)
    return WignerGrid(re_axis=re_axis, im_axis=im_axis, values=values)


def wigner_cut(rho: np.ndarray, b: np.ndarray, axis: str = "imag") -> np.ndarray:
    """
    Wigner function along a phase-space axis.

    Args:
        rho: Density matrix or state vector
        b: Sample positions along the axis
        axis: "imag" for W(i b), "real" for W(b)

    Returns:
        Real array of W values
    """
    if rho.ndim == 1:
        rho = hilbert.ket_to_dm(rho)
    b = np.asarray(b, dtype=float)
    betas = 1j * b if axis == "imag" else b.astype(complex)
    return _wigner_values(rho, betas)


def mean_photon_from_wigner(w: WignerGrid, normalization_tol: float = 5e-2) -> float:
    """
    Mean photon number from the Wigner moment: integral W |beta|^2 - 1/2.

    Args:
        w: Sampled Wigner function
        normalization_tol: Allowed normalization defect before warning

    Returns:
        Discretized photon-number estimate
    """
    defect = abs(w.normalization() - 1.0)
    if defect > normalization_tol:
        logger.warning(f"Wigner grid under-resolved: normalization defect {defect:.3g}")
    betas = w.betas()
    return float(np.sum(w.values * np.abs(betas) ** 2) * w.cell_area - 0.5)
