"""
Truncated Fock-space operator algebra.

This module provides the dense operator and state constructors every other
module builds on:
- Ladder, number, parity and identity operators
- Displacement and squeeze unitaries (scipy matrix exponentials)
- Fock, coherent and thermal states
- Expectation values, commutators, hermiticity and fidelity checks

Operators are plain complex ``numpy`` arrays of shape (dim, dim); pure states
are complex vectors of length dim and mixed states (dim, dim) density matrices.
All constructors are pure functions: equal inputs give bit-identical outputs.
"""

import logging
import math

import numpy as np
from scipy import linalg

from mooncat.constants import HERMITIAN_TOL
from mooncat.exceptions import InvalidDimensionError

logger = logging.getLogger(__name__)


def _check_dim(dim: int) -> int:
    if int(dim) != dim or dim < 2:
        raise InvalidDimensionError(f"Fock dimension must be an integer >= 2, got {dim}")
    return int(dim)


# =============================================================================
# Operators
# =============================================================================

def ladder(dim: int) -> np.ndarray:
    """
    Annihilation operator a with <n-1|a|n> = sqrt(n).

    Args:
        dim: Fock truncation N (>= 2)

    Returns:
        Complex (dim, dim) matrix; a-dagger is its conjugate transpose

    Raises:
        InvalidDimensionError: If dim < 2
    """
    dim = _check_dim(dim)
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


def number(dim: int) -> np.ndarray:
    """Number operator a-dagger a."""
    dim = _check_dim(dim)
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def identity(dim: int) -> np.ndarray:
    """Identity on the truncated space."""
    return np.eye(_check_dim(dim), dtype=complex)


def parity(dim: int) -> np.ndarray:
    """
    Photon-number parity exp(i pi a-dagger a).

    Args:
        dim: Fock truncation N (>= 2)

    Returns:
        Diagonal matrix with entries (+1, -1, +1, ...)
    """
    dim = _check_dim(dim)
    signs = np.where(np.arange(dim) % 2 == 0, 1.0, -1.0)
    return np.diag(signs).astype(complex)


def dag(op: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return op.conj().T


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Commutator [a, b]."""
    return a @ b - b @ a


def is_hermitian(op: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    """Return True when max|M - M^dagger| < tol."""
    return bool(np.max(np.abs(op - dag(op))) < tol)


def displacement(dim: int, beta: complex) -> np.ndarray:
    """
    Displacement operator D(beta) = exp(beta a-dagger - beta* a).

    The generator is anti-Hermitian on the truncated space too, so the
    result is unitary to machine precision; the truncation only limits how
    faithfully it displaces high-amplitude states.

    Args:
        dim: Fock truncation N
        beta: Complex displacement amplitude

    Returns:
        Complex (dim, dim) unitary
    """
    dim = _check_dim(dim)
    if abs(beta) ** 2 > dim / 4.0:
        logger.warning(f"displacement |beta|^2={abs(beta) ** 2:.3g} exceeds dim/4 at dim={dim}")
    a = ladder(dim)
    return linalg.expm(beta * dag(a) - np.conj(beta) * a)


def squeeze(dim: int, r: float) -> np.ndarray:
    """
    Squeeze operator S(r) = exp((r/2)(a^2 - a-dagger^2)).

    With this convention S(r)|0> has Var[(a + a-dagger)/2] = exp(-2r)/4 and
    S a S-dagger = a cosh(r) + a-dagger sinh(r).

    Args:
        dim: Fock truncation N
        r: Real squeeze parameter

    Returns:
        Complex (dim, dim) unitary
    """
    dim = _check_dim(dim)
    if abs(r) > 2.0:
        logger.warning(f"squeeze parameter |r|={abs(r):.3g} is outside the supported range")
    if dim < 4 * math.ceil(math.exp(2.0 * abs(r))):
        logger.warning(f"squeeze r={r:.3g} is poorly resolved at dim={dim}")
    a = ladder(dim)
    a2 = a @ a
    return linalg.expm(0.5 * r * (a2 - dag(a2)))


# =============================================================================
# States
# =============================================================================

def fock(dim: int, n: int) -> np.ndarray:
    """Fock state |n> as a vector."""
    dim = _check_dim(dim)
    if not 0 <= n < dim:
        raise InvalidDimensionError(f"Fock index {n} outside truncation {dim}")
    psi = np.zeros(dim, dtype=complex)
    psi[n] = 1.0
    return psi


def coherent(dim: int, beta: complex) -> np.ndarray:
    """Coherent state D(beta)|0>."""
    return displacement(dim, beta)[:, 0].copy()


def thermal_state(dim: int, n_th: float) -> np.ndarray:
    """
    Thermal density matrix with mean occupation n_th.

    The distribution is renormalized on the truncated space.
    """
    dim = _check_dim(dim)
    if n_th <= 0:
        return ket_to_dm(fock(dim, 0))
    ratio = n_th / (1.0 + n_th)
    populations = ratio ** np.arange(dim)
    return np.diag(populations / populations.sum()).astype(complex)


def ket_to_dm(psi: np.ndarray) -> np.ndarray:
    """Density matrix |psi><psi|."""
    return np.outer(psi, psi.conj())


def expect(op: np.ndarray, state: np.ndarray) -> complex:
    """
    Expectation value of op in a pure state (vector) or density matrix.

    Args:
        op: Operator matrix
        state: State vector or density matrix

    Returns:
        Complex expectation value
    """
    if state.ndim == 1:
        return complex(np.vdot(state, op @ state))
    return complex(np.trace(op @ state))


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """
    Uhlmann fidelity between two states (vectors or density matrices).

    Returns the squared-overlap convention: |<a|b>|^2 for pure states.
    """
    if a.ndim == 1 and b.ndim == 1:
        return float(abs(np.vdot(a, b)) ** 2)
    if a.ndim == 1:
        return float(np.real(np.vdot(a, b @ a)))
    if b.ndim == 1:
        return float(np.real(np.vdot(b, a @ b)))
    sqrt_a = linalg.sqrtm(a)
    inner = linalg.sqrtm(sqrt_a @ b @ sqrt_a)
    return float(np.real(np.trace(inner)) ** 2)
