"""
Idle decay-rate sweeps over photon number and deformation.

Each sweep point matches the cat amplitude to the requested mean photon
number, builds the memory Liouvillian and reads Gamma_Z and Gamma_X from its
spectral gaps. Per-series scaling fits follow.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence

import numpy as np

from mooncat.analysis.fits import fit_bitflip_scaling, fit_phaseflip_affine
from mooncat.constants import DISSIPATOR_MOON, DISSIPATOR_SQUEEZED
from mooncat.exceptions import InvalidParameterError
from mooncat.models import MoonModel
from mooncat.quantum.dynamics import decay_rates
from mooncat.quantum.states import matched_alpha

logger = logging.getLogger(__name__)


def sweep_point(base: MoonModel, n_bar: float, lam: float, kind: str = DISSIPATOR_MOON,
                method: str = "spectral") -> Dict[str, float]:
    """Rates of one (n_bar, lam, kind) point; other parameters come from `base`."""
    if kind not in (DISSIPATOR_MOON, DISSIPATOR_SQUEEZED):
        raise InvalidParameterError(f"unknown dissipator kind {kind!r}")
    alpha = matched_alpha(n_bar, lam, kind=kind)
    model = base.model_copy(update={"alpha": alpha, "lam": complex(lam), "dissipator": kind, "dim": None})
    rates = decay_rates(model, method=method)
    return {
        "kind": kind,
        "n_bar": float(n_bar),
        "lam": float(lam),
        "alpha": alpha,
        "gamma_z": float(rates.bitflip),
        "gamma_x": float(rates.phaseflip),
    }


def scaling_sweep(
    base: MoonModel,
    n_bars: Sequence[float],
    lams: Sequence[float],
    kinds: Sequence[str] = (DISSIPATOR_MOON,),
    method: str = "spectral",
    threads: int = 1,
) -> List[Dict[str, float]]:
    """
    Gamma_Z and Gamma_X over the (kind, lam, n_bar) grid.

    Rows come back in sweep-index order whatever the thread count.
    """
    grid = [(kind, lam, n) for kind in kinds for lam in lams for n in n_bars]
    with ThreadPoolExecutor(max_workers=max(int(threads), 1)) as pool:
        rows = list(pool.map(lambda p: sweep_point(base, p[2], p[1], p[0], method), grid))
    logger.info(f"scaling sweep finished: {len(rows)} points")
    return rows


def fit_sweep(rows: Sequence[Dict[str, float]], kappa1: float, n_th: float,
              window: Optional[Sequence[float]] = None,
              saturation_floor: Optional[float] = None) -> List[Dict]:
    """
    Bit-flip scaling and phase-flip affine fits per (kind, lam) series.

    Series where a fit cannot be made are reported with an error entry.
    Bit-flip rates at or below saturation_factor times saturation_floor are
    left out of the exponential fit.
    """
    results = []
    series = sorted({(row["kind"], row["lam"]) for row in rows})
    for kind, lam in series:
        points = [row for row in rows if row["kind"] == kind and row["lam"] == lam]
        bitflip = np.array([(p["n_bar"], p["gamma_z"]) for p in points])
        phaseflip = np.array([(p["n_bar"], p["gamma_x"]) for p in points])
        entry: Dict = {"kind": kind, "lam": lam}
        try:
            entry["bitflip"] = fit_bitflip_scaling(
                bitflip, window=tuple(window) if window else None, saturation_floor=saturation_floor,
            ).model_dump()
        except InvalidParameterError as exc:
            entry["bitflip"] = {"error": str(exc)}
        if kappa1 > 0:
            entry["phaseflip"] = fit_phaseflip_affine(phaseflip, n_th).model_dump()
        results.append(entry)
    return results
