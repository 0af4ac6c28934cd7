"""
Phase-flip repetition code Monte Carlo.

This module provides:
- The operation error model of standard and moon cat qubits
- A vectorized Pauli-frame simulator of the syndrome-extraction circuit
- A detector error model from single-fault enumeration, decoded with pymatching
- Logical error-rate estimation with Wilson intervals and seeded shards
- Exhaustive maximum-likelihood and first-order enumeration oracles

Circuit: data qubits d_0..d_{d-1}, ancillas a_0..a_{d-2} measuring X_i X_{i+1}.
Each round prepares the ancillas in |+>, applies CNOT(a_i -> d_i) then
CNOT(a_i -> d_{i+1}) and measures X. Z faults act after each operation.
The d noisy rounds are closed by an ideal X readout of the data.
"""

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pymatching
from statsmodels.stats.proportion import proportion_confint

from mooncat.config.defaults import get_default
from mooncat.constants import CAT_MOON, CAT_STANDARD
from mooncat.exceptions import InvalidParameterError, ModelOutOfRangeError
from mooncat.models import CircuitErrorModel
from mooncat.utils.timing import time_it

_log = logging.getLogger(__name__)

# Fault slots per ancilla and round, in circuit order
SLOT_PREP = 0
SLOT_CNOT1_C, SLOT_CNOT1_T, SLOT_CNOT1_CT = 1, 2, 3
SLOT_CNOT2_C, SLOT_CNOT2_T, SLOT_CNOT2_CT = 4, 5, 6
SLOT_MEAS = 7
N_SLOTS = 8

SLOT_FIELDS = (
    "p_prep_Z",
    "p_cnot_Zc", "p_cnot_Zt", "p_cnot_ZcZt",
    "p_cnot_Zc", "p_cnot_Zt", "p_cnot_ZcZt",
    "p_meas_Z",
)
SLOT_NAMES = ("prep", "cnot1_Zc", "cnot1_Zt", "cnot1_ZcZt", "cnot2_Zc", "cnot2_Zt", "cnot2_ZcZt", "meas")

SAMPLE_BATCH = 5000


# =============================================================================
# Error Model
# =============================================================================

def build_error_model(
    kind: str,
    n_bar: float,
    lam: float = 0.0,
    kappa1_over_kappa2: float = 1e-3,
    gate_time: float = 1.0,
) -> CircuitErrorModel:
    """
    Phase-flip probabilities of the repetition-code operations.

    Every operation lasts T = gate_time / kappa2. The CNOT control error
    carries the idle term plus the non-adiabatic term pi^2 / (64 n kappa2 (1 + lam)^2 T).

    Args:
        kind: "standard" (lam forced to 0) or "moon"
        n_bar: Mean photon number
        lam: Moon deformation
        kappa1_over_kappa2: Single-photon loss relative to two-photon dissipation
        gate_time: Operation time in units of 1/kappa2

    Returns:
        CircuitErrorModel

    Raises:
        InvalidParameterError: For unknown kinds or non-positive inputs
        ModelOutOfRangeError: If any probability exceeds 0.5
    """
    if kind not in (CAT_STANDARD, CAT_MOON):
        raise InvalidParameterError(f"unknown cat kind {kind!r}")
    if n_bar <= 0 or gate_time <= 0 or kappa1_over_kappa2 < 0 or lam < 0:
        raise InvalidParameterError("n_bar and gate_time must be positive, kappa1/kappa2 and lam non-negative")
    lam = lam if kind == CAT_MOON else 0.0
    idle = n_bar * kappa1_over_kappa2 * gate_time
    nonadiabatic = math.pi ** 2 / (64.0 * n_bar * (1.0 + lam) ** 2 * gate_time)
    probabilities = {
        "p_prep_Z": idle,
        "p_meas_Z": idle,
        "p_cnot_Zc": idle + nonadiabatic,
        "p_cnot_Zt": 0.5 * idle,
        "p_cnot_ZcZt": 0.5 * idle,
    }
    too_large = {k: v for k, v in probabilities.items() if v > 0.5}
    if too_large:
        raise ModelOutOfRangeError(f"error probabilities above 0.5: {too_large}")
    return CircuitErrorModel(
        **probabilities,
        provenance={
            "kind": kind,
            "n_bar": n_bar,
            "lam": lam,
            "kappa1_over_kappa2": kappa1_over_kappa2,
            "gate_time": gate_time,
        },
    )


def bitflip_logical_rate(p_bit: float, d: int) -> float:
    """First-order logical bit-flip probability: p_bit times the (2d - 1) x d space-time volume."""
    return p_bit * (2 * d - 1) * d


def y_logical_rate(p_xl: float, p_zl: float) -> float:
    """Logical Y probability as the product of independent X and Z logical probabilities."""
    return p_xl * p_zl


# =============================================================================
# Pauli-Frame Simulation
# =============================================================================

@dataclass
class SyndromeHistory:
    """Detection events of a batch of shots.

    Attributes:
        detection_events: Bits indexed (shot, round 0..d, stabilizer 0..d-2);
            round d is the ideal data readout
        logical_flip: True final Z frame on the logical observable (data qubit 0)
    """

    detection_events: np.ndarray
    logical_flip: np.ndarray

    @property
    def distance(self) -> int:
        return self.detection_events.shape[2] + 1

    @property
    def shots(self) -> int:
        return self.detection_events.shape[0]

    def flat(self) -> np.ndarray:
        """Detector bits flattened to (shot, round * (d - 1) + stabilizer)."""
        return self.detection_events.reshape(self.shots, -1).astype(np.uint8)


def _check_distance(d: int) -> None:
    if d < 3 or d % 2 == 0:
        raise InvalidParameterError(f"distance must be odd and >= 3, got {d}")


def location_probabilities(d: int, model: CircuitErrorModel) -> np.ndarray:
    """Fault probability of every location, ordered (round, slot, ancilla)."""
    per_slot = np.array([getattr(model, field) for field in SLOT_FIELDS])
    return np.broadcast_to(per_slot[None, :, None], (d, N_SLOTS, d - 1)).ravel().copy()


def location_label(d: int, index: int) -> Tuple[int, str, int]:
    """(round, slot name, ancilla) of a flat fault index."""
    r, rest = divmod(index, N_SLOTS * (d - 1))
    slot, ancilla = divmod(rest, d - 1)
    return r, SLOT_NAMES[slot], ancilla


def propagate_faults(d: int, faults: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Propagate explicit Z faults through the syndrome-extraction circuit.

    CNOT(c -> t) maps Z_t to Z_c Z_t and leaves Z_c alone, so data Z errors
    reach the ancillas and ancilla errors never reach the data.

    Args:
        d: Code distance
        faults: Boolean array (shots, d * 8 * (d - 1)) of fired fault locations

    Returns:
        (detection events of shape (shots, d + 1, d - 1), final Z frame of data qubit 0)
    """
    m = d - 1
    shots = faults.shape[0]
    f = faults.reshape(shots, d, N_SLOTS, m)
    z_data = np.zeros((shots, d), dtype=bool)
    syndromes = np.zeros((shots, d + 1, m), dtype=bool)
    for r in range(d):
        anc = f[:, r, SLOT_PREP].copy()
        anc ^= z_data[:, :m]
        anc ^= f[:, r, SLOT_CNOT1_C] ^ f[:, r, SLOT_CNOT1_CT]
        z_data[:, :m] ^= f[:, r, SLOT_CNOT1_T] ^ f[:, r, SLOT_CNOT1_CT]
        anc ^= z_data[:, 1:]
        anc ^= f[:, r, SLOT_CNOT2_C] ^ f[:, r, SLOT_CNOT2_CT]
        z_data[:, 1:] ^= f[:, r, SLOT_CNOT2_T] ^ f[:, r, SLOT_CNOT2_CT]
        syndromes[:, r] = anc ^ f[:, r, SLOT_MEAS]
    syndromes[:, d] = z_data[:, :m] ^ z_data[:, 1:]
    detections = syndromes.copy()
    detections[:, 1:] ^= syndromes[:, :-1]
    return detections, z_data[:, 0].copy()


def _sample(d: int, probabilities: np.ndarray, rng: np.random.Generator, shots: int) -> SyndromeHistory:
    detections, flips = [], []
    for start in range(0, shots, SAMPLE_BATCH):
        batch = min(SAMPLE_BATCH, shots - start)
        faults = rng.random((batch, probabilities.size)) < probabilities
        events, flip = propagate_faults(d, faults)
        detections.append(events)
        flips.append(flip)
    return SyndromeHistory(np.concatenate(detections), np.concatenate(flips))


def sample_history(d: int, model: CircuitErrorModel, seed: int = 0, shots: int = 1) -> SyndromeHistory:
    """
    Sample detection-event histories with the model's fault probabilities.

    Args:
        d: Odd code distance >= 3
        model: Operation error model
        seed: RNG seed
        shots: Number of independent histories

    Returns:
        SyndromeHistory with `shots` histories
    """
    _check_distance(d)
    rng = np.random.default_rng(seed)
    return _sample(d, location_probabilities(d, model), rng, shots)


def expected_detection_probabilities(d: int, model: CircuitErrorModel) -> np.ndarray:
    """
    Exact firing probability of each detector, shape (d + 1, d - 1).

    A detector fires when an odd number of its independent mechanisms fire,
    with probability (1 - prod(1 - 2 p_i)) / 2.
    """
    _check_distance(d)
    probabilities = location_probabilities(d, model)
    active = np.flatnonzero(probabilities > 0)
    keep = np.ones((d + 1) * (d - 1))
    if active.size:
        faults = np.zeros((active.size, probabilities.size), dtype=bool)
        faults[np.arange(active.size), active] = True
        events, _ = propagate_faults(d, faults)
        signs = np.where(events.reshape(active.size, -1), 1.0 - 2.0 * probabilities[active][:, None], 1.0)
        keep = signs.prod(axis=0)
    return (0.5 * (1.0 - keep)).reshape(d + 1, d - 1)


# =============================================================================
# Detector Error Model and Decoding
# =============================================================================

@dataclass(frozen=True)
class ErrorMechanism:
    """Merged fault class: fired detectors, observable flip and probability."""

    detectors: Tuple[int, ...]
    flips_observable: bool
    probability: float


def single_fault_signatures(d: int, model: CircuitErrorModel) -> List[Tuple[int, np.ndarray, bool]]:
    """(location, detection events, observable flip) of every location with p > 0."""
    _check_distance(d)
    probabilities = location_probabilities(d, model)
    active = np.flatnonzero(probabilities > 0)
    faults = np.zeros((active.size, probabilities.size), dtype=bool)
    faults[np.arange(active.size), active] = True
    events, flips = propagate_faults(d, faults)
    return [(int(loc), events[k], bool(flips[k])) for k, loc in enumerate(active)]


def detector_error_model(d: int, model: CircuitErrorModel) -> List[ErrorMechanism]:
    """
    Merge single faults with identical detector sets into independent mechanisms.

    Faults with the same detectors combine as p = p_a + p_b - 2 p_a p_b; the
    observable flag follows the more probable constituent.
    """
    probabilities = location_probabilities(d, model)
    classes: Dict[Tuple[int, ...], List[float]] = {}
    for loc, events, flip in single_fault_signatures(d, model):
        detectors = tuple(int(k) for k in np.flatnonzero(events.ravel()))
        if not detectors:
            if flip:
                _log.warning(f"undetectable logical fault at {location_label(d, loc)}")
            continue
        if len(detectors) > 2:
            _log.warning(f"fault {location_label(d, loc)} fires {len(detectors)} detectors; not matchable")
            continue
        p = float(probabilities[loc])
        # entries: combined probability, probability mass with and without observable flip
        entry = classes.setdefault(detectors, [0.0, 0.0, 0.0])
        entry[0] = entry[0] + p - 2.0 * entry[0] * p
        entry[1 if flip else 2] += p
    return [
        ErrorMechanism(detectors, flips_observable=mass_flip > mass_keep, probability=p)
        for detectors, (p, mass_flip, mass_keep) in sorted(classes.items())
    ]


def build_decoder(d: int, model: CircuitErrorModel) -> pymatching.Matching:
    """Matching graph with edge weights ln((1 - p) / p); fault id 0 marks observable flips."""
    _check_distance(d)
    matching = pymatching.Matching()
    for mechanism in detector_error_model(d, model):
        fault_ids = {0} if mechanism.flips_observable else set()
        p = mechanism.probability
        weight = math.log((1.0 - p) / p)
        if len(mechanism.detectors) == 2:
            matching.add_edge(*mechanism.detectors, fault_ids=fault_ids, weight=weight, error_probability=p)
        else:
            matching.add_boundary_edge(mechanism.detectors[0], fault_ids=fault_ids, weight=weight,
                                       error_probability=p)
    matching.ensure_num_fault_ids(1)
    return matching


def decode_detectors(matching: pymatching.Matching, detectors: np.ndarray) -> np.ndarray:
    """Predicted observable flips for flattened detector rows."""
    if matching.num_edges == 0:
        return np.zeros(detectors.shape[0], dtype=bool)
    # detectors beyond the graph never fire
    predictions = matching.decode_batch(detectors[:, :matching.num_detectors])
    return predictions[:, 0].astype(bool)


def decode(history: SyndromeHistory, model: CircuitErrorModel,
           matching: Optional[pymatching.Matching] = None) -> np.ndarray:
    """
    Minimum-weight perfect matching prediction of the logical flip, per shot.

    Args:
        history: Sampled histories
        model: Error model the matching graph is built from
        matching: Prebuilt decoder for this distance and model

    Returns:
        Boolean predictions of shape (shots,)
    """
    matching = matching if matching is not None else build_decoder(history.distance, model)
    return decode_detectors(matching, history.flat())


# =============================================================================
# Logical Error Rate
# =============================================================================

@dataclass(frozen=True)
class LogicalErrorEstimate:
    """Logical phase-flip rate with its Wilson interval.

    Attributes:
        d: Code distance
        shots: Shots simulated
        errors: Shots where the decoder prediction differs from the truth
        rate: errors / shots
        ci_lo, ci_hi: Wilson interval at the requested confidence
        upper_bound: True when no error was observed and only ci_hi is meaningful
    """

    d: int
    shots: int
    errors: int
    rate: float
    ci_lo: float
    ci_hi: float
    upper_bound: bool

    @property
    def flagged(self) -> bool:
        return self.upper_bound


def wilson_interval(errors: int, shots: int, confidence: Optional[float] = None) -> Tuple[float, float]:
    """Wilson score interval of a binomial proportion."""
    confidence = confidence if confidence is not None else get_default("confidence")
    lo, hi = proportion_confint(errors, shots, alpha=1.0 - confidence, method="wilson")
    return float(lo), float(hi)


def _shard_errors(d: int, probabilities: np.ndarray, matching: pymatching.Matching,
                  seed: int, shard: int, shots: int) -> int:
    rng = np.random.default_rng(np.random.SeedSequence([seed, shard]))
    history = _sample(d, probabilities, rng, shots)
    return int(np.count_nonzero(decode_detectors(matching, history.flat()) != history.logical_flip))


@time_it
def logical_error_rate(
    d: int,
    model: CircuitErrorModel,
    shots: Optional[int] = None,
    seed: int = 0,
    min_errors: Optional[int] = None,
    min_shots: Optional[int] = None,
    threads: int = 1,
    confidence: Optional[float] = None,
    logger: Optional[logging.Logger] = None,
) -> LogicalErrorEstimate:
    """
    Stream seeded shards until enough logical errors are seen or the shot cap is hit.

    Shard k of fixed size draws from SeedSequence([seed, k]), and shards are
    reduced in index order, so the estimate is independent of `threads`.

    Args:
        d: Odd code distance >= 3
        model: Operation error model
        shots: Shot cap (default from configuration)
        seed: Base seed
        min_errors: Logical errors to collect before stopping
        min_shots: Shots to simulate before stopping
        threads: Worker threads for shards
        confidence: Wilson interval confidence
        logger: Optional logger for timing

    Returns:
        LogicalErrorEstimate
    """
    _check_distance(d)
    cap = int(shots if shots is not None else get_default("max_shots"))
    min_errors = int(min_errors if min_errors is not None else get_default("min_logical_errors"))
    min_shots = int(min(min_shots if min_shots is not None else get_default("min_shots"), cap))
    shard_size = int(get_default("shard_size"))
    if cap < 1:
        raise InvalidParameterError("shot cap must be positive")

    probabilities = location_probabilities(d, model)
    matching = build_decoder(d, model)
    total_shots, total_errors = 0, 0
    if np.any(probabilities > 0):
        sizes = [min(shard_size, cap - start) for start in range(0, cap, shard_size)]
        batch = max(int(threads), 1)
        with ThreadPoolExecutor(max_workers=batch) as executor:
            done = False
            for first in range(0, len(sizes), batch):
                shard_ids = range(first, min(first + batch, len(sizes)))
                counts = list(executor.map(
                    lambda k: _shard_errors(d, probabilities, matching, seed, k, sizes[k]), shard_ids))
                for k, count in zip(shard_ids, counts):
                    total_shots += sizes[k]
                    total_errors += count
                    if total_errors >= min_errors and total_shots >= min_shots:
                        done = True
                        break
                if done:
                    break
    else:
        total_shots = cap

    ci_lo, ci_hi = wilson_interval(total_errors, total_shots, confidence)
    if total_errors == 0:
        _log.warning(
            f"no logical errors in {total_shots} shots at d={d}; reporting upper bound {ci_hi:.3g}")
    return LogicalErrorEstimate(
        d=d,
        shots=total_shots,
        errors=total_errors,
        rate=total_errors / total_shots,
        ci_lo=ci_lo,
        ci_hi=ci_hi,
        upper_bound=total_errors == 0,
    )


# =============================================================================
# Enumeration Oracles
# =============================================================================

def _fault_sets(d: int, model: CircuitErrorModel, weight: int):
    """Syndromes, observable flips and probabilities of every fault set of one weight."""
    probabilities = location_probabilities(d, model)
    active = np.flatnonzero(probabilities > 0)
    base = float(np.prod(1.0 - probabilities[active]))
    signatures = single_fault_signatures(d, model)
    n_det = (d + 1) * (d - 1)
    single = np.zeros((len(signatures), n_det), dtype=bool)
    for k, (_, events, _) in enumerate(signatures):
        single[k] = events.ravel()
    flips = np.array([flip for _, _, flip in signatures], dtype=bool)
    odds = probabilities[active] / (1.0 - probabilities[active])
    if weight == 0:
        return np.zeros((1, n_det), dtype=bool), np.zeros(1, dtype=bool), np.array([base])
    combos = np.array(list(itertools.combinations(range(active.size), weight)), dtype=int)
    if combos.size == 0:
        return np.zeros((0, n_det), dtype=bool), np.zeros(0, dtype=bool), np.zeros(0)
    syndromes = np.bitwise_xor.reduce(single[combos], axis=1)
    observable = np.bitwise_xor.reduce(flips[combos], axis=1)
    weights = base * np.prod(odds[combos], axis=1)
    return syndromes, observable, weights


@dataclass
class MaximumLikelihoodTable:
    """Most likely logical class of every syndrome reachable up to a fault weight."""

    syndromes: np.ndarray
    prediction: np.ndarray
    probability: np.ndarray  # total probability of each syndrome


def exhaustive_ml_decode(d: int, model: CircuitErrorModel, max_weight: int = 2) -> MaximumLikelihoodTable:
    """
    Maximum-likelihood decoding by enumerating every fault set up to max_weight.

    Probabilities are summed per (syndrome, logical class); the prediction is
    the heavier class.
    """
    _check_distance(d)
    parts = [_fault_sets(d, model, w) for w in range(max_weight + 1)]
    syndromes = np.concatenate([p[0] for p in parts])
    observable = np.concatenate([p[1] for p in parts])
    weights = np.concatenate([p[2] for p in parts])
    unique, inverse = np.unique(syndromes, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    mass_flip = np.bincount(inverse, weights=weights * observable, minlength=len(unique))
    mass_keep = np.bincount(inverse, weights=weights * ~observable, minlength=len(unique))
    return MaximumLikelihoodTable(unique, mass_flip > mass_keep, mass_flip + mass_keep)


def ml_agreement(d: int, model: CircuitErrorModel, max_weight: int = 2) -> float:
    """Probability-weighted fraction of fault configurations where matching and ML agree."""
    table = exhaustive_ml_decode(d, model, max_weight)
    predicted = decode_detectors(build_decoder(d, model), table.syndromes.astype(np.uint8))
    return float(table.probability[predicted == table.prediction].sum() / table.probability.sum())


def first_order_logical_rate(d: int, model: CircuitErrorModel, weight: Optional[int] = None) -> float:
    """
    Leading-order logical error probability: the total probability of the
    weight-ceil((d + 1) / 2) fault sets that the matching decoder gets wrong.
    """
    _check_distance(d)
    weight = weight if weight is not None else math.ceil((d + 1) / 2)
    syndromes, observable, weights = _fault_sets(d, model, weight)
    if weights.size == 0:
        return 0.0
    predicted = decode_detectors(build_decoder(d, model), syndromes.astype(np.uint8))
    return float(weights[predicted != observable].sum())


# =============================================================================
# Sweeps
# =============================================================================

def threshold_sweep(
    settings: Sequence[Dict[str, Any]],
    distances: Sequence[int],
    ratios: Sequence[float],
    shots: Optional[int] = None,
    seed: int = 0,
    threads: int = 1,
    min_errors: Optional[int] = None,
) -> List[Dict[str, Any]]:
    """
    Logical phase-flip rate over cat kinds, distances and kappa1/kappa2.

    Args:
        settings: One dict per cat kind with keys kind, n_bar and optional lam
        distances: Code distances
        ratios: kappa1/kappa2 values
        shots: Shot cap per point
        seed: Base seed, shared by every point
        threads: Worker threads per point
        min_errors: Logical errors to collect per point

    Returns:
        Rows (kind, d, kappa1_over_kappa2, shots, errors, p_ZL, ci_lo, ci_hi, flagged)
    """
    rows = []
    for setting in settings:
        for ratio in ratios:
            model = build_error_model(setting["kind"], setting["n_bar"], setting.get("lam", 0.0), ratio)
            for d in distances:
                estimate = logical_error_rate(d, model, shots=shots, seed=seed,
                                              min_errors=min_errors, threads=threads)
                rows.append({
                    "kind": setting["kind"],
                    "d": d,
                    "kappa1_over_kappa2": ratio,
                    "shots": estimate.shots,
                    "errors": estimate.errors,
                    "p_ZL": estimate.rate,
                    "ci_lo": estimate.ci_lo,
                    "ci_hi": estimate.ci_hi,
                    "flagged": estimate.flagged,
                })
    return rows
