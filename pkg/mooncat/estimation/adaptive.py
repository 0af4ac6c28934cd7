"""
Bayesian adaptive design for bit-flip lifetime estimation.

This module provides:
- A grid posterior over (ln Gamma_Z, C0, C_inf) with log-space updates
- Binomial outcome likelihoods of the two preparation bases
- Expected information flow and measurement-time selection
- Adaptive and fixed-grid campaigns against a stochastic oracle, with
  posterior-mode (MLE) and least-squares (LSE) estimates
- Beta-posterior variance estimators and the optimal measurement-time bound
- Random-telegraph trajectories for the trajectory-limit benchmark
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, special, stats

from mooncat.analysis.fits import fit_exp_decay
from mooncat.config.defaults import get_default
from mooncat.constants import BASIS_ONE, BASIS_ZERO, PROBABILITY_CLAMP_TOL
from mooncat.exceptions import FitFailedError, InvalidParameterError, PosteriorUnderflowError
from mooncat.models import DecayFit, MeasurementRecord
from mooncat.utils.timing import time_it

logger = logging.getLogger(__name__)

SUPPORT_FLOOR = 1e-15


# =============================================================================
# Likelihood
# =============================================================================

def outcome_probability(t: float, basis: int, rate, c0, cinf) -> np.ndarray:
    """
    Probability of outcome 1 for one shot: (1 + C_inf + (C_inf +- C0) e^{-Gamma t}) / 2.

    The + sign applies to basis 0 and the - sign to basis 1.
    """
    sign = 1.0 if basis == BASIS_ZERO else -1.0
    return 0.5 * (1.0 + cinf + (cinf + sign * c0) * np.exp(-rate * t))


def _binomial_log_pmf(y: np.ndarray, n: int, p: np.ndarray) -> np.ndarray:
    log_comb = special.gammaln(n + 1) - special.gammaln(y + 1) - special.gammaln(n - y + 1)
    return log_comb + special.xlogy(y, p) + special.xlog1py(n - y, -p)


def _clamp(p: np.ndarray, active: Optional[np.ndarray] = None) -> np.ndarray:
    outside = (p < -PROBABILITY_CLAMP_TOL) | (p > 1.0 + PROBABILITY_CLAMP_TOL)
    if active is not None:
        outside &= active
    if np.any(outside):
        raise InvalidParameterError("outcome probability outside [0, 1] for a parameter in the support")
    return np.clip(p, 0.0, 1.0)


def outcome_likelihood(record: MeasurementRecord, theta: Tuple[float, float, float]) -> float:
    """
    Binomial probability of a record given theta = (Gamma_Z, C0, C_inf).

    Computed in log space, so N up to 1e5 is exact to rounding.

    Raises:
        InvalidParameterError: If p leaves [0, 1] beyond the clamping tolerance
    """
    rate, c0, cinf = theta
    p = _clamp(np.asarray(outcome_probability(record.t, record.basis, rate, c0, cinf)))
    return float(np.exp(_binomial_log_pmf(np.asarray(record.outcome), record.shots, p)))


# =============================================================================
# Posterior Grid
# =============================================================================

@dataclass
class PosteriorGrid:
    """Discretized joint distribution over (ln Gamma_Z, C0, C_inf).

    Attributes:
        log_rate: Uniform axis of ln Gamma_Z
        c0: Contrast axis
        cinf: Asymptote axis (the singleton {0} outside Zeno mode)
        prob: Normalized probabilities, shape (len(log_rate), len(c0), len(cinf))
    """

    log_rate: np.ndarray
    c0: np.ndarray
    cinf: np.ndarray
    prob: np.ndarray

    @classmethod
    def uniform(
        cls,
        rate_min: Optional[float] = None,
        rate_max: Optional[float] = None,
        points: Optional[int] = None,
        zeno: bool = False,
    ) -> "PosteriorGrid":
        """
        Uniform prior in ln Gamma_Z, C0 and (in Zeno mode) C_inf.

        Points where an outcome probability would leave [0, 1]
        (2 |C_inf| > 1 - C0) get zero prior mass.
        """
        rate_min = rate_min if rate_min is not None else get_default("rate_min")
        rate_max = rate_max if rate_max is not None else get_default("rate_max")
        points = points if points is not None else get_default("rate_grid_points")
        if not 0 < rate_min < rate_max:
            raise InvalidParameterError("rate range must satisfy 0 < rate_min < rate_max")
        log_rate = np.linspace(math.log(rate_min), math.log(rate_max), int(points))
        c0 = np.linspace(get_default("c0_min"), get_default("c0_max"), get_default("c0_grid_points"))
        if zeno:
            span = get_default("cinf_span")
            cinf = np.linspace(-span, span, get_default("cinf_grid_points"))
        else:
            cinf = np.zeros(1)
        valid = 2.0 * np.abs(cinf)[None, :] <= 1.0 - c0[:, None] + 1e-12
        prob = np.broadcast_to(valid[None, :, :], (log_rate.size, c0.size, cinf.size)).astype(float)
        return cls(log_rate=log_rate, c0=c0, cinf=cinf, prob=prob / prob.sum())

    @property
    def rates(self) -> np.ndarray:
        """Gamma_Z axis."""
        return np.exp(self.log_rate)

    def rate_marginal(self) -> np.ndarray:
        """Marginal distribution over ln Gamma_Z."""
        return self.prob.sum(axis=(1, 2))

    def mode_rate(self) -> float:
        """Gamma_Z at the maximum of the marginal (MLE under a flat prior)."""
        return float(self.rates[int(np.argmax(self.rate_marginal()))])

    def log_rate_mean(self) -> float:
        """Posterior mean of ln Gamma_Z."""
        return float(self.rate_marginal() @ self.log_rate)

    def log_rate_sigma(self) -> float:
        """Posterior standard deviation of ln Gamma_Z."""
        marginal = self.rate_marginal()
        mean = marginal @ self.log_rate
        return float(math.sqrt(max(marginal @ (self.log_rate - mean) ** 2, 0.0)))

    def cell_width(self) -> float:
        """Spacing of the ln Gamma_Z axis."""
        return float(self.log_rate[1] - self.log_rate[0]) if self.log_rate.size > 1 else 0.0

    def support_rates(self) -> Tuple[float, float]:
        """Smallest and largest Gamma_Z with non-negligible marginal mass."""
        marginal = self.rate_marginal()
        support = np.flatnonzero(marginal > SUPPORT_FLOOR * marginal.max())
        return float(self.rates[support[0]]), float(self.rates[support[-1]])

    def _support(self) -> Tuple[np.ndarray, ...]:
        return np.nonzero(self.prob > SUPPORT_FLOOR * self.prob.max())


def _log_likelihood_grid(grid: PosteriorGrid, record: MeasurementRecord) -> np.ndarray:
    rate = grid.rates[:, None, None]
    p = outcome_probability(record.t, record.basis, rate, grid.c0[None, :, None], grid.cinf[None, None, :])
    p = _clamp(p, active=grid.prob > 0)
    return _binomial_log_pmf(np.asarray(record.outcome, dtype=float), record.shots, p)


def posterior_update(prior: PosteriorGrid, record: MeasurementRecord) -> PosteriorGrid:
    """
    Bayes update of the grid by one record, carried out in log space.

    Raises:
        PosteriorUnderflowError: If the posterior vanishes on every grid point
    """
    if record.shots == 0:
        return prior
    with np.errstate(divide="ignore"):
        log_post = np.log(prior.prob) + _log_likelihood_grid(prior, record)
    peak = np.max(log_post)
    if not np.isfinite(peak):
        raise PosteriorUnderflowError(
            f"posterior vanished after record t={record.t:.4g}, N={record.shots}, "
            f"y={record.outcome}, basis={record.basis}; widen the rate range"
        )
    post = np.exp(log_post - peak)
    return PosteriorGrid(prior.log_rate, prior.c0, prior.cinf, post / post.sum())


# =============================================================================
# Information Flow
# =============================================================================

def _mutual_information(prior: PosteriorGrid, t: float, shots: int, basis: int) -> float:
    """Information (bits) between the ln Gamma_Z marginal and the outcome count."""
    idx_r, idx_c, idx_k = prior._support()
    weights = prior.prob[idx_r, idx_c, idx_k]
    p = outcome_probability(t, basis, prior.rates[idx_r], prior.c0[idx_c], prior.cinf[idx_k])
    p = np.clip(p, 0.0, 1.0)
    y = np.arange(shots + 1, dtype=float)
    likelihood = np.exp(_binomial_log_pmf(y[None, :], shots, p[:, None]))
    # joint over (rate index, y) after marginalizing the nuisance axes
    joint = np.zeros((prior.log_rate.size, shots + 1))
    np.add.at(joint, idx_r, weights[:, None] * likelihood)
    rate_marginal = joint.sum(axis=1, keepdims=True)
    outcome_marginal = joint.sum(axis=0, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = joint / (rate_marginal * outcome_marginal)
        info = np.nansum(special.xlogy(joint, ratio)) / math.log(2.0)
    return max(float(info), 0.0)


def expected_info_flow(prior: PosteriorGrid, t: float, shots: int) -> float:
    """
    Expected information gain about ln Gamma_Z per unit measurement time (bits/time).

    The gain is the mutual information between the ln Gamma_Z marginal and the
    outcome count, exactly summed over y in 0..shots and averaged over both
    preparation bases.
    """
    if t <= 0:
        raise InvalidParameterError("measurement time must be positive")
    gain = 0.5 * sum(_mutual_information(prior, t, shots, basis) for basis in (BASIS_ZERO, BASIS_ONE))
    return gain / t


def candidate_times(prior: PosteriorGrid, count: Optional[int] = None) -> np.ndarray:
    """Log-spaced times over [0.1 / Gamma_hi, 3 / Gamma_lo] of the current support."""
    count = count if count is not None else get_default("candidate_times")
    rate_lo, rate_hi = prior.support_rates()
    return np.logspace(math.log10(0.1 / rate_hi), math.log10(3.0 / rate_lo), int(count))


def select_time(
    prior: PosteriorGrid, candidates: Optional[Sequence[float]] = None, shots: Optional[int] = None
) -> float:
    """
    Candidate time maximizing the expected information flow.

    Ties go to the smallest time.
    """
    shots = shots if shots is not None else get_default("shots_per_round") // 2
    times = np.sort(np.asarray(candidates if candidates is not None else candidate_times(prior), dtype=float))
    if times.size == 1:
        return float(times[0])
    flows = np.array([expected_info_flow(prior, t, shots) for t in times])
    best = flows.max()
    tied = np.flatnonzero(flows >= best - 1e-12 * max(abs(best), 1e-300))
    return float(times[tied[0]])


# =============================================================================
# Estimators
# =============================================================================

def beta_variance(x: int, n: int) -> float:
    """
    Variance estimate (1 + x)(1 + N - x) / (N^2 (N + 3)) of a binomial fraction.

    Strictly positive, unlike p(1 - p)/N at x = 0 or x = N.
    """
    if n < 1 or not 0 <= x <= n:
        raise InvalidParameterError(f"need 0 <= x <= N and N >= 1, got x={x}, N={n}")
    return (1.0 + x) * (1.0 + n - x) / (n ** 2 * (n + 3.0))


def bayesian_estimate(x: int, n: int) -> float:
    """Posterior mean (x + 1) / (N + 2) under a flat prior."""
    return (x + 1.0) / (n + 2.0)


def beta_posterior_variance(x: int, n: int) -> float:
    """Variance of the Beta(x + 1, N - x + 1) posterior by numerical quadrature."""
    density = stats.beta(x + 1, n - x + 1).pdf
    mean, _ = integrate.quad(lambda p: p * density(p), 0.0, 1.0, epsabs=0.0, epsrel=1e-13, limit=200)
    var, _ = integrate.quad(lambda p: (p - mean) ** 2 * density(p), 0.0, 1.0,
                            epsabs=0.0, epsrel=1e-13, limit=200)
    return var


def t_meas_opt(t_z: float, nu: float) -> float:
    """Shortest total measurement time 2 T_Z / nu^2 reaching coefficient of variation nu."""
    if t_z <= 0 or not 0 < nu <= 1:
        raise InvalidParameterError("need T_Z > 0 and 0 < nu <= 1")
    return 2.0 * t_z / nu ** 2


def least_squares_estimate(records: Sequence[MeasurementRecord]) -> Optional[DecayFit]:
    """
    Exponential fit of the differential signal p0 - p1 = C0 exp(-Gamma t).

    Records are paired by time; per-point variances are the sum of the two
    Beta variances. Returns None when the fit cannot be made.
    """
    pairs: Dict[float, Dict[int, MeasurementRecord]] = {}
    for record in records:
        if record.shots:
            pairs.setdefault(record.t, {})[record.basis] = record
    samples = []
    for t, pair in sorted(pairs.items()):
        if BASIS_ZERO not in pair or BASIS_ONE not in pair:
            continue
        zero, one = pair[BASIS_ZERO], pair[BASIS_ONE]
        signal = zero.outcome / zero.shots - one.outcome / one.shots
        variance = beta_variance(zero.outcome, zero.shots) + beta_variance(one.outcome, one.shots)
        samples.append((t, signal, math.sqrt(variance)))
    if len(samples) < 3:
        return None
    try:
        return fit_exp_decay(samples, fix_offset=0.0)
    except (FitFailedError, InvalidParameterError) as exc:
        logger.warning(f"least-squares lifetime estimate failed: {exc}")
        return None


# =============================================================================
# Oracles and Campaigns
# =============================================================================

class SyntheticDecayOracle:
    """Binomial experiment with a known decay, for seeded campaigns."""

    def __init__(self, rate: float, c0: float = 1.0, cinf: float = 0.0,
                 seed: int = 0, deterministic: bool = False):
        self.rate = rate
        self.c0 = c0
        self.cinf = cinf
        self.deterministic = deterministic
        self._rng = np.random.default_rng(seed)

    def measure(self, t: float, shots: int, basis: int) -> int:
        """Number of 1 outcomes in `shots` runs at time t."""
        p = float(np.clip(outcome_probability(t, basis, self.rate, self.c0, self.cinf), 0.0, 1.0))
        if self.deterministic:
            return int(round(shots * p))
        return int(self._rng.binomial(shots, p))


@dataclass
class CampaignResult:
    """Outcome of a lifetime-estimation campaign.

    Attributes:
        posterior: Final grid posterior
        mle: Posterior-marginal mode of Gamma_Z
        mle_sigma: Posterior sigma of ln Gamma_Z times the mode
        lse: Least-squares decay fit of the differential signal (None if unavailable)
        total_time: Cumulative measurement time including overheads
        rounds: Number of rounds performed
        converged: True when the target sigma was reached within budget
        log: One row per record
    """

    posterior: PosteriorGrid
    mle: float
    mle_sigma: float
    lse: Optional[DecayFit]
    total_time: float
    rounds: int
    converged: bool
    records: List[MeasurementRecord] = field(default_factory=list)
    log: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def flagged(self) -> bool:
        """Partial result: budget exhausted before the target."""
        return not self.converged


def _campaign(
    oracle,
    next_time,
    prior: Optional[PosteriorGrid],
    shots: Optional[int],
    target_sigma: Optional[float],
    budget: Optional[float],
    max_rounds: Optional[int],
    overhead: Optional[float],
) -> CampaignResult:
    posterior = prior if prior is not None else PosteriorGrid.uniform()
    shots = shots if shots is not None else get_default("shots_per_round")
    target_sigma = target_sigma if target_sigma is not None else get_default("target_sigma")
    max_rounds = max_rounds if max_rounds is not None else get_default("max_rounds")
    overhead = overhead if overhead is not None else get_default("round_overhead")
    per_basis = max(shots // 2, 1)

    records: List[MeasurementRecord] = []
    log: List[Dict[str, Any]] = []
    cumulative = 0.0
    converged = False
    rounds = 0
    while rounds < max_rounds:
        t = next_time(posterior, rounds, per_basis)
        if budget is not None and cumulative + 2 * per_basis * t + overhead > budget:
            break
        rounds += 1
        cumulative += 2 * per_basis * t + overhead
        for basis in (BASIS_ZERO, BASIS_ONE):
            record = MeasurementRecord(t=t, shots=per_basis, basis=basis,
                                       outcome=oracle.measure(t, per_basis, basis))
            posterior = posterior_update(posterior, record)
            records.append(record)
            log.append({
                "round": rounds,
                "t": t,
                "N": per_basis,
                "basis": basis,
                "y": record.outcome,
                "posterior_mode": posterior.mode_rate(),
                "posterior_sigma": posterior.log_rate_sigma(),
                "cumulative_time": cumulative,
            })
        if posterior.log_rate_sigma() <= target_sigma:
            converged = True
            break

    if not converged:
        logger.warning(f"campaign stopped after {rounds} rounds at sigma={posterior.log_rate_sigma():.3g}")
    mle = posterior.mode_rate()
    return CampaignResult(
        posterior=posterior,
        mle=mle,
        mle_sigma=mle * posterior.log_rate_sigma(),
        lse=least_squares_estimate(records),
        total_time=cumulative,
        rounds=rounds,
        converged=converged,
        records=records,
        log=log,
    )


@time_it
def run_adaptive(
    oracle,
    budget: Optional[float] = None,
    target_sigma: Optional[float] = None,
    prior: Optional[PosteriorGrid] = None,
    shots: Optional[int] = None,
    max_rounds: Optional[int] = None,
    overhead: Optional[float] = None,
    logger: Optional[logging.Logger] = None,
) -> CampaignResult:
    """
    Adaptive campaign: select t by EIF, measure both bases, update, repeat.

    Stops when the posterior sigma of ln Gamma_Z reaches target_sigma, or
    flags a partial result when the time budget or round cap runs out.

    Args:
        oracle: Object with measure(t, shots, basis) -> outcome count
        budget: Cap on cumulative measurement time
        target_sigma: Target posterior sigma of ln Gamma_Z
        prior: Starting grid (uniform default)
        shots: Shots per round, split evenly over the two bases
        max_rounds: Cap on rounds
        overhead: Constant time added per round
        logger: Optional logger for timing

    Returns:
        CampaignResult
    """
    return _campaign(
        oracle,
        lambda posterior, _round, per_basis: select_time(posterior, shots=per_basis),
        prior, shots, target_sigma, budget, max_rounds, overhead,
    )


def run_fixed_grid(
    oracle,
    times: Sequence[float],
    budget: Optional[float] = None,
    target_sigma: Optional[float] = None,
    prior: Optional[PosteriorGrid] = None,
    shots: Optional[int] = None,
    max_rounds: Optional[int] = None,
    overhead: Optional[float] = None,
) -> CampaignResult:
    """Non-adaptive campaign cycling through a fixed list of times."""
    times = [float(t) for t in times]
    return _campaign(
        oracle,
        lambda _posterior, round_index, _per_basis: times[round_index % len(times)],
        prior, shots, target_sigma, budget, max_rounds, overhead,
    )


def campaign_log_lines(result: CampaignResult) -> List[Dict[str, Any]]:
    """Campaign rows ready for JSON-lines output."""
    return list(result.log)


# =============================================================================
# Benchmarks
# =============================================================================

def telegraph_trajectories(p_flip: float, steps: int, trajectories: int, seed: int = 0) -> np.ndarray:
    """
    Random-telegraph Z(t) records starting at +1.

    Each step flips the sign with probability p_flip, so
    E[Z(k)] = (1 - 2 p_flip)^k ~ exp(-2 p_flip k).

    Returns:
        Array of shape (trajectories, steps + 1) with entries +-1
    """
    if not 0 <= p_flip <= 0.5:
        raise InvalidParameterError("flip probability must lie in [0, 0.5]")
    rng = np.random.default_rng(seed)
    flips = rng.random((trajectories, steps)) < p_flip
    parity = np.cumsum(flips, axis=1) % 2
    z = np.ones((trajectories, steps + 1))
    z[:, 1:] = 1.0 - 2.0 * parity
    return z


def telegraph_rate(z: np.ndarray, dt: float = 1.0) -> DecayFit:
    """Fit exp(-Gamma t) to the trajectory-averaged telegraph signal."""
    mean = z.mean(axis=0)
    sigma = np.maximum(z.std(axis=0) / math.sqrt(z.shape[0]), 1e-6)
    times = dt * np.arange(z.shape[1])
    return fit_exp_decay(np.column_stack([times, mean, sigma]), fix_offset=0.0)


def benchmark_table(
    rates: Sequence[float],
    campaigns: int,
    seed: int = 0,
    c0: float = 0.95,
    target_sigma: Optional[float] = None,
    fixed_points: int = 12,
) -> List[Dict[str, Any]]:
    """
    Adaptive vs fixed-grid campaigns against the T_meas^opt bound.

    Each row reports the mean total time, its ratio to 2 T_Z / nu^2 (nu the
    target sigma) and the fraction of MLEs within 20% of the truth.
    """
    target_sigma = target_sigma if target_sigma is not None else get_default("target_sigma")
    rows = []
    for rate in rates:
        bound = t_meas_opt(1.0 / rate, target_sigma)
        fixed_times = np.logspace(math.log10(0.1 / rate), math.log10(3.0 / rate), fixed_points)
        for kind in ("adaptive", "fixed"):
            totals, hits = [], 0
            for k in range(campaigns):
                oracle = SyntheticDecayOracle(rate, c0=c0, seed=seed + k)
                if kind == "adaptive":
                    result = run_adaptive(oracle, target_sigma=target_sigma)
                else:
                    result = run_fixed_grid(oracle, fixed_times, target_sigma=target_sigma)
                totals.append(result.total_time)
                hits += abs(result.mle - rate) <= 0.2 * rate
            mean_total = float(np.mean(totals))
            rows.append({
                "rate": rate,
                "method": kind,
                "campaigns": campaigns,
                "mean_total_time": mean_total,
                "t_meas_opt": bound,
                "ratio": mean_total / bound,
                "mle_within_20pct": hits / campaigns,
            })
    return rows
