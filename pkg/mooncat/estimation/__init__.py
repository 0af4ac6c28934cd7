"""
Adaptive Bayesian estimation of bit-flip lifetimes.
"""

from mooncat.estimation.adaptive import (
    PosteriorGrid,
    SyntheticDecayOracle,
    posterior_update,
    run_adaptive,
    run_fixed_grid,
    select_time,
)

__all__ = [
    "PosteriorGrid",
    "SyntheticDecayOracle",
    "posterior_update",
    "run_adaptive",
    "run_fixed_grid",
    "select_time",
]
