"""
Analysis modules: experiment-style fits, Zeno-gate optimization and
decay-rate scaling sweeps.
"""

from mooncat.analysis.fits import (
    fit_bitflip_scaling,
    fit_exp_decay,
    fit_phaseflip_affine,
)
from mooncat.analysis.zeno import default_xi_grid, optimal_gate_search, zeno_analytics
from mooncat.analysis.scaling import fit_sweep, scaling_sweep

__all__ = [
    "fit_bitflip_scaling",
    "fit_exp_decay",
    "fit_phaseflip_affine",
    "default_xi_grid",
    "optimal_gate_search",
    "zeno_analytics",
    "fit_sweep",
    "scaling_sweep",
]
