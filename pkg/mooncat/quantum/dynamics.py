"""
Lindblad master-equation dynamics.

This module provides:
- Liouvillian assembly for the single-mode moon model and the memory-buffer model
- Time integration of the vectorized master equation
- Steady states with kernel-degeneracy detection
- Symmetry-sectored Liouvillian spectra and decay-rate extraction
- Adiabatic-elimination comparison between the two models

Superoperators act on column-stacked density matrices (vec(AXB) = (B^T x A) vec(X))
and are stored as scipy sparse CSR matrices.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import integrate, linalg, sparse
from scipy.sparse import linalg as sparse_linalg

from mooncat.config.defaults import get_default
from mooncat.constants import (
    DISSIPATOR_SQUEEZED,
    SECTOR_BITFLIP,
    SECTOR_FULL,
    SECTOR_PHASEFLIP,
    SECTORS,
)
from mooncat.exceptions import (
    EigenSolverError,
    InvalidDimensionError,
    InvalidParameterError,
    StiffnessError,
    TruncationError,
)
from mooncat.models import MoonModel, TwoModeModel
from mooncat.quantum import hilbert
from mooncat.quantum.states import moon_cat_states, squeezed_dissipator
from mooncat.utils.timing import time_it

_log = logging.getLogger(__name__)


# =============================================================================
# Data Types
# =============================================================================

@dataclass(frozen=True)
class Liouvillian:
    """Vectorized Lindblad generator.

    Attributes:
        matrix: (dim^2, dim^2) sparse superoperator
        dim: Hilbert-space dimension
        parity_labels: Memory photon-number parity of each basis state
        provenance: Hash of the generating model
        hamiltonian: Dense Hamiltonian used in the generator
        jump_operators: Dense jump operators used in the generator
        mode_dims: Dimensions of the tensor factors (memory first)
    """

    matrix: sparse.csr_matrix
    dim: int
    parity_labels: np.ndarray
    provenance: str = ""
    hamiltonian: Optional[np.ndarray] = None
    jump_operators: Tuple[np.ndarray, ...] = ()
    mode_dims: Tuple[int, ...] = ()

    def sector_indices(self, sector: str) -> np.ndarray:
        """Indices of vec(rho) entries in a symmetry sector.

        Element rho_ij belongs to the phase-flip (even) block when the memory
        parities of i and j agree and to the bit-flip (odd) block otherwise.
        """
        if sector not in SECTORS:
            raise InvalidParameterError(f"unknown sector '{sector}', expected one of {SECTORS}")
        size = self.dim * self.dim
        if sector == SECTOR_FULL:
            return np.arange(size)
        labels = np.add.outer(self.parity_labels, self.parity_labels) % 2
        # column stacking: k = i + j * dim
        flat = labels.reshape(-1, order="F")
        wanted = 0 if sector == SECTOR_PHASEFLIP else 1
        return np.flatnonzero(flat == wanted)

    def block(self, sector: str) -> sparse.csr_matrix:
        """Restriction of the superoperator to a symmetry sector."""
        idx = self.sector_indices(sector)
        return self.matrix[idx][:, idx].tocsr()


class TimeSeries(NamedTuple):
    """Observable expectation values along a trajectory."""

    times: np.ndarray
    values: Dict[str, np.ndarray]
    final_state: np.ndarray
    trace_drift: float

    def to_frame(self) -> pd.DataFrame:
        """Table with a t column and one real column per observable."""
        data = {"t": self.times}
        data.update({name: np.real(series) for name, series in self.values.items()})
        return pd.DataFrame(data)


@dataclass
class SteadyState:
    """Kernel of a Liouvillian.

    Attributes:
        rho: Unique normalized steady state, None when the kernel is degenerate
        basis: Kernel vectors reshaped to matrices
        degenerate: True when the kernel has more than one dimension
        kernel_dim: Number of kernel vectors found
        residual: ||L rho|| of the returned state (or the largest basis residual)
    """

    rho: Optional[np.ndarray]
    basis: List[np.ndarray] = field(default_factory=list)
    degenerate: bool = False
    kernel_dim: int = 1
    residual: float = 0.0


class DecayRates(NamedTuple):
    """Bit-flip and phase-flip rates of a model."""

    bitflip: float
    phaseflip: float


class AdiabaticComparison(NamedTuple):
    """Two-mode vs reduced-model phase-flip rates."""

    gamma_x_two_mode: float
    gamma_x_reduced: float
    relative_deviation: float
    margin_amplitude: float
    margin_drive: float
    adiabatic: bool


# =============================================================================
# Vectorization Helpers
# =============================================================================

def vec(rho: np.ndarray) -> np.ndarray:
    """Column-stack a matrix."""
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvec(vector: np.ndarray, dim: int) -> np.ndarray:
    """Inverse of vec."""
    return vector.reshape(dim, dim, order="F")


def _spre_post(left: np.ndarray, right: np.ndarray) -> sparse.csr_matrix:
    """Superoperator of rho -> left rho right."""
    return sparse.kron(sparse.csr_matrix(right.T), sparse.csr_matrix(left), format="csr")


def _assemble(hamiltonian: np.ndarray, jumps: Sequence[np.ndarray]) -> sparse.csr_matrix:
    dim = hamiltonian.shape[0]
    eye = np.eye(dim, dtype=complex)
    matrix = -1j * (_spre_post(hamiltonian, eye) - _spre_post(eye, hamiltonian))
    for jump in jumps:
        jump_dag = hilbert.dag(jump)
        product = jump_dag @ jump
        matrix = matrix + _spre_post(jump, jump_dag)
        matrix = matrix - 0.5 * _spre_post(product, eye) - 0.5 * _spre_post(eye, product)
    matrix = sparse.csr_matrix(matrix)
    matrix.eliminate_zeros()
    return matrix


def _check_trace_preservation(matrix: sparse.csr_matrix, dim: int) -> None:
    defect = np.max(np.abs(matrix.T.conj() @ vec(np.eye(dim)))) if dim else 0.0
    if defect > 1e-10 * max(1.0, abs(matrix).max()):
        _log.warning(f"Liouvillian trace-preservation defect {defect:.3e}")


# =============================================================================
# Model Assembly
# =============================================================================

def moon_jump_operator(m: MoonModel, dim: Optional[int] = None) -> np.ndarray:
    """
    Engineered two-photon jump operator of the model.

    Moon: sqrt(kappa2) (a^2 - alpha^2 + lam (a-dagger a - alpha^2)).
    Squeezed: (sqrt(kappa2) / cosh^2 r) S(r) (a^2 - alpha'^2) S-dagger(r), r = atanh(lam/2).
    """
    dim = dim if dim is not None else m.truncation
    if m.dissipator == DISSIPATOR_SQUEEZED:
        return math.sqrt(m.kappa2) * squeezed_dissipator(dim, m.alpha, m.squeeze_r)
    a = hilbert.ladder(dim)
    core = a @ a + m.lam * hilbert.number(dim) - m.alpha ** 2 * (1.0 + m.lam) * np.eye(dim)
    return math.sqrt(m.kappa2) * core


def moon_hamiltonian(m: MoonModel, drive: complex = 0.0, dim: Optional[int] = None) -> np.ndarray:
    """
    H = Delta a-dagger a - (K4/2) a-dagger^2 a^2 - (K6/6) a-dagger^3 a^3 + drive a-dagger + h.c.

    Args:
        m: Moon model
        drive: Complex drive amplitude xi (Zeno drive for real xi)
        dim: Truncation override

    Returns:
        Dense Hermitian matrix
    """
    dim = dim if dim is not None else m.truncation
    a = hilbert.ladder(dim)
    ad = hilbert.dag(a)
    h = m.delta * hilbert.number(dim)
    if m.K4:
        h = h - 0.5 * m.K4 * (ad @ ad @ a @ a)
    if m.K6:
        h = h - (m.K6 / 6.0) * (ad @ ad @ ad @ a @ a @ a)
    if drive:
        h = h + drive * ad + np.conj(drive) * a
    return h


def _loss_operators(a: np.ndarray, kappa1: float, n_th: float, kappa_phi: float) -> List[np.ndarray]:
    ad = hilbert.dag(a)
    jumps = []
    if kappa1 > 0:
        jumps.append(math.sqrt(kappa1 * (1.0 + n_th)) * a)
        if n_th > 0:
            jumps.append(math.sqrt(kappa1 * n_th) * ad)
    if kappa_phi > 0:
        jumps.append(math.sqrt(2.0 * kappa_phi) * (ad @ a))
    return jumps


def build_moon_liouvillian(m: MoonModel, drive: complex = 0.0) -> Liouvillian:
    """
    Liouvillian of the reduced single-mode moon model.

    Jump operators: the engineered two-photon operator, sqrt(kappa1 (1+n_th)) a,
    sqrt(kappa1 n_th) a-dagger and sqrt(2 kappa_phi) a-dagger a; rates equal to
    zero are dropped.

    Args:
        m: Moon model
        drive: Optional resonant drive amplitude added as drive a-dagger + h.c.

    Returns:
        Liouvillian

    Raises:
        TruncationError: If an explicit truncation is below the model minimum
    """
    dim = m.truncation
    if m.dim is not None and m.dim < m.min_dim:
        raise TruncationError(
            f"dim={m.dim} below the minimum {m.min_dim} for alpha={m.alpha}, lambda={m.lam}"
        )
    a = hilbert.ladder(dim)
    jumps = []
    if m.kappa2 > 0:
        jumps.append(moon_jump_operator(m, dim))
    jumps.extend(_loss_operators(a, m.kappa1, m.n_th, m.kappa_phi))
    hamiltonian = moon_hamiltonian(m, drive, dim)
    matrix = _assemble(hamiltonian, jumps)
    _check_trace_preservation(matrix, dim)
    return Liouvillian(
        matrix=matrix,
        dim=dim,
        parity_labels=np.arange(dim) % 2,
        provenance=m.model_hash(),
        hamiltonian=hamiltonian,
        jump_operators=tuple(jumps),
        mode_dims=(dim,),
    )


def build_two_mode_liouvillian(m: TwoModeModel, composite_cap: Optional[int] = None) -> Liouvillian:
    """
    Liouvillian of the memory-buffer model.

    H = g2 a^2 b-dagger + g_l a-dagger a b-dagger + xi_d b-dagger + h.c., with buffer
    loss sqrt(kappa_b) b and memory loss/heating at kappa1, n_th.

    Args:
        m: Two-mode model
        composite_cap: Largest allowed memory x buffer dimension

    Returns:
        Liouvillian on memory (x) buffer

    Raises:
        InvalidDimensionError: If the composite dimension exceeds the cap
    """
    cap = composite_cap if composite_cap is not None else get_default("composite_dim_cap")
    if m.composite_dim > cap:
        raise InvalidDimensionError(f"composite dimension {m.composite_dim} exceeds cap {cap}")
    a_m = hilbert.ladder(m.memory_dim)
    b_b = hilbert.ladder(m.buffer_dim)
    a = np.kron(a_m, np.eye(m.buffer_dim))
    b = np.kron(np.eye(m.memory_dim), b_b)
    ad, bd = hilbert.dag(a), hilbert.dag(b)
    coupling = m.g2 * (a @ a @ bd) + m.g_l * (ad @ a @ bd) + m.xi_d * bd
    hamiltonian = coupling + hilbert.dag(coupling)
    jumps = [math.sqrt(m.kappa_b) * b] + _loss_operators(a, m.kappa1, m.n_th, 0.0)
    matrix = _assemble(hamiltonian, jumps)
    dim = m.composite_dim
    _check_trace_preservation(matrix, dim)
    if not m.adiabatic:
        _log.warning(
            f"buffer elimination margins {m.adiabatic_margin_amplitude:.3g} (amplitude) and "
            f"{m.adiabatic_margin_drive:.3g} (drive) are not below 0.2"
        )
    return Liouvillian(
        matrix=matrix,
        dim=dim,
        parity_labels=(np.arange(dim) // m.buffer_dim) % 2,
        provenance=m.model_hash(),
        hamiltonian=hamiltonian,
        jump_operators=tuple(jumps),
        mode_dims=(m.memory_dim, m.buffer_dim),
    )


def apply_liouvillian(L: Liouvillian, rho: np.ndarray) -> np.ndarray:
    """Return L(rho) as a matrix."""
    return unvec(L.matrix @ vec(rho), L.dim)


# =============================================================================
# Time Evolution
# =============================================================================

def _observable_series(
    states: np.ndarray, dim: int, observables: Mapping[str, np.ndarray]
) -> Dict[str, np.ndarray]:
    series = {}
    for name, op in observables.items():
        # Tr(O rho) = sum_ij O_ji rho_ij = vec(O^T) . vec(rho)
        weights = vec(op.T)
        values = weights @ states
        series[name] = np.real(values) if hilbert.is_hermitian(op, 1e-10) else values
    return series


@time_it
def evolve(
    L: Liouvillian,
    rho0: np.ndarray,
    t_grid: Sequence[float],
    observables: Union[Mapping[str, np.ndarray], Sequence[np.ndarray], None] = None,
    method: Optional[str] = None,
    rtol: Optional[float] = None,
    atol: Optional[float] = None,
    logger: Optional[logging.Logger] = None,
) -> TimeSeries:
    """
    Integrate d vec(rho)/dt = L vec(rho) and record observables.

    rho0 is the state at t_grid[0].

    Args:
        L: Liouvillian
        rho0: Initial density matrix or state vector
        t_grid: Increasing sample times
        observables: Named operators (a sequence is named O0, O1, ...)
        method: RK45, DOP853, BDF or expm (default from configuration)
        rtol: Relative tolerance of the adaptive integrators
        atol: Absolute tolerance of the adaptive integrators
        logger: Optional logger for timing

    Returns:
        TimeSeries with Tr(O rho(t)) per observable

    Raises:
        StiffnessError: If the integrator cannot control its step size
    """
    method = method or get_default("ode_method")
    rtol = rtol if rtol is not None else get_default("ode_rtol")
    atol = atol if atol is not None else get_default("ode_atol")
    times = np.asarray(t_grid, dtype=float)
    if rho0.ndim == 1:
        rho0 = hilbert.ket_to_dm(rho0)
    if observables is None:
        observables = {}
    elif not isinstance(observables, Mapping):
        observables = {f"O{i}": op for i, op in enumerate(observables)}
    y0 = vec(rho0)

    if method == "expm":
        states = _evolve_expm(L.matrix, y0, times)
    else:
        solution = integrate.solve_ivp(
            lambda _t, y: L.matrix @ y,
            (times[0], times[-1]),
            y0,
            method=method,
            t_eval=times,
            rtol=rtol,
            atol=atol,
        )
        if solution.status != 0:
            raise StiffnessError(
                f"{method} integration failed ({solution.message}); try method='BDF' "
                "or 'expm', smaller rate ratios, or spectral_gap_rate"
            )
        states = solution.y

    traces = vec(np.eye(L.dim)) @ states
    drift = float(np.max(np.abs(traces - traces[0])))
    if drift > get_default("trace_drift_tol"):
        _log.warning(f"trace drift {drift:.3e} during evolution")
    final = unvec(states[:, -1], L.dim)
    return TimeSeries(
        times=times,
        values=_observable_series(states, L.dim, observables),
        final_state=final,
        trace_drift=drift,
    )


def _evolve_expm(matrix: sparse.csr_matrix, y0: np.ndarray, times: np.ndarray) -> np.ndarray:
    steps = np.diff(times)
    if steps.size and np.allclose(steps, steps[0], rtol=1e-12, atol=0.0):
        out = sparse_linalg.expm_multiply(
            matrix, y0, start=0.0, stop=times[-1] - times[0], num=times.size, endpoint=True
        )
        return np.asarray(out).T
    states = np.empty((y0.size, times.size), dtype=complex)
    states[:, 0] = y0
    current = y0
    for k, step in enumerate(steps, start=1):
        current = sparse_linalg.expm_multiply(matrix * step, current)
        states[:, k] = current
    return states


# =============================================================================
# Steady States
# =============================================================================

def _dense_null_space(block: sparse.csr_matrix, rel_tol: float) -> np.ndarray:
    if block.shape[0] == 0:
        return np.zeros((0, 0), dtype=complex)
    return linalg.null_space(block.toarray(), rcond=rel_tol)


@time_it
def steady_state(
    L: Liouvillian,
    rel_tol: Optional[float] = None,
    dense_cap: Optional[int] = None,
    logger: Optional[logging.Logger] = None,
) -> SteadyState:
    """
    Kernel of the Liouvillian.

    Both symmetry blocks are searched; a kernel of dimension one yields the
    normalized steady state. Decay rates below rel_tol times the generator
    scale count as kernel.

    Args:
        L: Liouvillian
        rel_tol: Relative singular-value threshold of the kernel
        dense_cap: Largest block handled by dense SVD
        logger: Optional logger for timing

    Returns:
        SteadyState record
    """
    rel_tol = rel_tol if rel_tol is not None else get_default("kernel_rel_tol")
    dense_cap = dense_cap if dense_cap is not None else get_default("dense_eig_cap")
    dim = L.dim
    basis: List[np.ndarray] = []

    even_idx = L.sector_indices(SECTOR_PHASEFLIP)
    odd_idx = L.sector_indices(SECTOR_BITFLIP)
    if even_idx.size <= dense_cap:
        for idx in (even_idx, odd_idx):
            null = _dense_null_space(L.matrix[idx][:, idx], rel_tol)
            for column in null.T:
                full = np.zeros(dim * dim, dtype=complex)
                full[idx] = column
                basis.append(unvec(full, dim))
    else:
        for idx, sector in ((even_idx, SECTOR_PHASEFLIP), (odd_idx, SECTOR_BITFLIP)):
            null = _sparse_null_space(L.block(sector), rel_tol)
            for column in null.T:
                full = np.zeros(dim * dim, dtype=complex)
                full[idx] = column
                basis.append(unvec(full, dim))
        if len(basis) == 1:
            # single kernel: solve with the trace row instead of keeping the ARPACK vector
            basis = [_sparse_steady_state(L, even_idx)]

    kernel_dim = len(basis)
    if kernel_dim == 0:
        raise EigenSolverError("no kernel vector found; loosen kernel_rel_tol")
    if kernel_dim > 1:
        residual = max(float(np.linalg.norm(L.matrix @ vec(b))) for b in basis)
        _log.info(f"degenerate steady-state kernel of dimension {kernel_dim}")
        return SteadyState(rho=None, basis=basis, degenerate=True, kernel_dim=kernel_dim,
                           residual=residual)

    rho = basis[0] / np.trace(basis[0])
    rho = 0.5 * (rho + hilbert.dag(rho))
    residual = float(np.linalg.norm(L.matrix @ vec(rho)))
    return SteadyState(rho=rho, basis=[rho], degenerate=False, kernel_dim=1, residual=residual)


def _sparse_steady_state(L: Liouvillian, even_idx: np.ndarray) -> np.ndarray:
    dim = L.dim
    block = L.matrix[even_idx][:, even_idx].tolil()
    diagonal = np.arange(dim) * (dim + 1)
    trace_row = np.isin(even_idx, diagonal).astype(complex)
    block[0, :] = trace_row
    rhs = np.zeros(even_idx.size, dtype=complex)
    rhs[0] = 1.0
    solution = sparse_linalg.spsolve(block.tocsc(), rhs)
    full = np.zeros(dim * dim, dtype=complex)
    full[even_idx] = solution
    return unvec(full, dim)


def _shift(block: sparse.csr_matrix) -> float:
    scale = float(np.max(np.abs(block.diagonal()))) if block.shape[0] else 1.0
    return 1e-6 * max(scale, 1e-12)


def _sparse_null_space(block: sparse.csr_matrix, rel_tol: float) -> np.ndarray:
    """Orthonormal near-kernel vectors of a block from shift-invert ARPACK."""
    k = min(int(get_default("eigs_count")), block.shape[0] - 2)
    if k < 1:
        return _dense_null_space(block, rel_tol)
    values, vectors = _sparse_eigs(block, k, vectors=True)
    scale = float(np.max(np.abs(block.diagonal())))
    kept = vectors[:, np.abs(values) < rel_tol * scale]
    if kept.shape[1] == 0:
        return kept
    return linalg.orth(kept)


# =============================================================================
# Spectra
# =============================================================================

def _sparse_eigs(block: sparse.csr_matrix, k: int, vectors: bool = False):
    try:
        return sparse_linalg.eigs(
            block.tocsc(), k=k, sigma=_shift(block), which="LM", return_eigenvectors=vectors
        )
    except (sparse_linalg.ArpackNoConvergence, sparse_linalg.ArpackError) as exc:
        raise EigenSolverError(f"shift-invert ARPACK failed: {exc}") from exc


def _block_spectrum(
    block: sparse.csr_matrix, k: Optional[int], dense_cap: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of a block ordered by decay rate -Re(lambda)."""
    size = block.shape[0]
    if size <= dense_cap:
        try:
            values, vectors = linalg.eig(block.toarray())
        except linalg.LinAlgError as exc:
            raise EigenSolverError(f"dense eigensolver failed: {exc}") from exc
    else:
        count = min(k or int(get_default("eigs_count")), size - 2)
        values, vectors = _sparse_eigs(block, count, vectors=True)
    order = np.lexsort((np.abs(values.imag), -values.real))
    values, vectors = values[order], vectors[:, order]
    if k is not None:
        values, vectors = values[:k], vectors[:, :k]
    return values, vectors


def liouvillian_spectrum(
    L: Liouvillian, sector: str = SECTOR_FULL, k: Optional[int] = None,
    dense_cap: Optional[int] = None,
) -> np.ndarray:
    """
    Slowest eigenvalues of a Liouvillian sector, ordered by -Re(lambda).

    Args:
        L: Liouvillian
        sector: "bitflip", "phaseflip" or "full"
        k: Number of eigenvalues returned (all for dense blocks when None)
        dense_cap: Largest block handled by dense LAPACK

    Returns:
        Complex eigenvalues
    """
    dense_cap = dense_cap if dense_cap is not None else get_default("dense_eig_cap")
    values, _ = _block_spectrum(L.block(sector), k, dense_cap)
    return values


def _tie_break_observable(L: Liouvillian, sector: str, idx: np.ndarray) -> np.ndarray:
    """Sector-restricted vec of the observable used to break rate ties."""
    memory_dim = L.mode_dims[0] if L.mode_dims else L.dim
    rest = L.dim // memory_dim
    a = np.kron(hilbert.ladder(memory_dim), np.eye(rest))
    op = a + hilbert.dag(a) if sector == SECTOR_BITFLIP else np.kron(hilbert.parity(memory_dim), np.eye(rest))
    return vec(op)[idx]


@time_it
def spectral_gap_rate(
    L: Liouvillian,
    sector: str,
    dense_cap: Optional[int] = None,
    logger: Optional[logging.Logger] = None,
) -> float:
    """
    Decay rate carried by a symmetry sector.

    "bitflip" returns -Re of the slowest eigenvalue of the parity-odd block
    (Gamma_Z). "phaseflip" returns -Re of the slowest eigenvalue of the
    parity-even block after removing the stationary one (Gamma_X). "full"
    uses the unsectored spectrum without its stationary eigenvalue. Eigenvalues
    tied within the degeneracy tolerance are resolved by overlap with
    a + a-dagger (bit-flip) or the parity (phase-flip).

    Args:
        L: Liouvillian
        sector: "bitflip", "phaseflip" or "full"
        dense_cap: Largest block handled by dense LAPACK
        logger: Optional logger for timing

    Returns:
        Non-negative rate

    Raises:
        EigenSolverError: If the eigensolver does not converge
    """
    dense_cap = dense_cap if dense_cap is not None else get_default("dense_eig_cap")
    idx = L.sector_indices(sector)
    values, vectors = _block_spectrum(L.block(sector), None, dense_cap)
    if sector != SECTOR_BITFLIP:
        stationary = int(np.argmin(np.abs(values)))
        keep = np.arange(values.size) != stationary
        values, vectors = values[keep], vectors[:, keep]
    if values.size == 0:
        raise EigenSolverError(f"sector '{sector}' has no decaying eigenvalue")

    rates = -values.real
    slowest = float(np.min(rates))
    tol = get_default("degeneracy_rel_tol") * max(abs(slowest), 1e-300)
    tied = np.flatnonzero(rates <= slowest + tol)
    if tied.size > 1 and sector != SECTOR_FULL:
        observable = _tie_break_observable(L, sector, idx)
        overlaps = np.abs(vectors[:, tied].conj().T @ observable)
        choice = tied[int(np.argmax(overlaps))]
        return max(float(rates[choice]), 0.0)
    return max(slowest, 0.0)


def slow_eigenvalue(L: Liouvillian, sector: str, dense_cap: Optional[int] = None) -> complex:
    """Slowest non-stationary eigenvalue of a sector, with its imaginary part."""
    dense_cap = dense_cap if dense_cap is not None else get_default("dense_eig_cap")
    values, _ = _block_spectrum(L.block(sector), None, dense_cap)
    if sector != SECTOR_BITFLIP:
        values = np.delete(values, int(np.argmin(np.abs(values))))
    order = np.lexsort((-values.imag, -values.real))
    return complex(values[order[0]])


# =============================================================================
# Rates and Lifetimes
# =============================================================================

def _time_domain_rates(m: MoonModel, spectral: DecayRates) -> DecayRates:
    """Refit rates from integrated Z and parity traces."""
    from mooncat.analysis.fits import fit_exp_decay

    pair = moon_cat_states(m.alpha, m.lam, dim=m.truncation, auto_grow=False, strict=False)
    L = build_moon_liouvillian(m)
    plus, _ = pair.logical_states()
    z_op = np.outer(pair.even_state, pair.odd_state.conj())
    z_op = z_op + hilbert.dag(z_op)
    parity = hilbert.parity(pair.dim)
    results = []
    for rate, rho0, op, offset in (
        (spectral.bitflip, hilbert.ket_to_dm(plus), z_op, 0.0),
        (spectral.phaseflip, hilbert.ket_to_dm(pair.even_state), parity, None),
    ):
        times = np.linspace(0.0, 3.0 / rate, 31)
        series = evolve(L, rho0, times, {"obs": op}, method="expm").values["obs"]
        samples = [(t, v, 1e-3) for t, v in zip(times, series)]
        results.append(fit_exp_decay(samples, fix_offset=offset).rate)
    return DecayRates(bitflip=results[0], phaseflip=results[1])


def decay_rates(m: MoonModel, method: str = "spectral") -> DecayRates:
    """
    Bit-flip and phase-flip rates of a moon model.

    Args:
        m: Moon model
        method: "spectral" (Liouvillian gaps), "fit" (exponential fits of
            integrated traces) or "auto" (fit only when both spectral rates
            exceed time_fit_rate_floor * kappa2)

    Returns:
        DecayRates(bitflip=Gamma_Z, phaseflip=Gamma_X)
    """
    L = build_moon_liouvillian(m)
    spectral = DecayRates(
        bitflip=spectral_gap_rate(L, SECTOR_BITFLIP),
        phaseflip=spectral_gap_rate(L, SECTOR_PHASEFLIP),
    )
    if method == "spectral":
        return spectral
    floor = get_default("time_fit_rate_floor") * m.kappa2
    if method == "auto" and min(spectral) < floor:
        return spectral
    if method not in ("fit", "auto"):
        raise InvalidParameterError(f"unknown rate method '{method}'")
    return _time_domain_rates(m, spectral)


def adiabatic_comparison(m: TwoModeModel, dense_cap: Optional[int] = None) -> AdiabaticComparison:
    """
    Compare the two-mode Gamma_X with that of the adiabatically reduced model.

    Args:
        m: Two-mode model
        dense_cap: Largest block handled by dense LAPACK

    Returns:
        AdiabaticComparison with both margins and the relative deviation
    """
    two_mode = spectral_gap_rate(build_two_mode_liouvillian(m), SECTOR_PHASEFLIP, dense_cap=dense_cap)
    reduced_model = m.to_reduced_model()
    reduced = spectral_gap_rate(build_moon_liouvillian(reduced_model), SECTOR_PHASEFLIP,
                                dense_cap=dense_cap)
    deviation = abs(two_mode - reduced) / reduced
    _log.info(f"Gamma_X two-mode={two_mode:.6g} reduced={reduced:.6g} deviation={deviation:.3%}")
    return AdiabaticComparison(
        gamma_x_two_mode=two_mode,
        gamma_x_reduced=reduced,
        relative_deviation=deviation,
        margin_amplitude=m.adiabatic_margin_amplitude,
        margin_drive=m.adiabatic_margin_drive,
        adiabatic=m.adiabatic,
    )


def lifetime(rate: float) -> float:
    """T = 1 / Gamma."""
    return math.inf if rate <= 0 else 1.0 / rate


def coherence_time_t2(kappa1: float, kappa_phi: float) -> float:
    """T2 = 1 / (kappa1/2 + kappa_phi)."""
    return lifetime(0.5 * kappa1 + kappa_phi)


def error_probability(rate: float, duration: float) -> float:
    """Per-operation error probability (1 - exp(-Gamma t)) / 2."""
    return 0.5 * (1.0 - math.exp(-rate * duration))
