"""
Truncated-Fock-space quantum modules: operator algebra, cat states and
Lindblad dynamics.
"""

from mooncat.quantum import hilbert
from mooncat.quantum.states import (
    MoonCatPair,
    WignerGrid,
    matched_alpha,
    moon_cat_states,
    squeezed_cat_states,
    wigner,
)
from mooncat.quantum.dynamics import (
    Liouvillian,
    build_moon_liouvillian,
    build_two_mode_liouvillian,
    decay_rates,
    evolve,
    spectral_gap_rate,
    steady_state,
)

__all__ = [
    "hilbert",
    "MoonCatPair",
    "WignerGrid",
    "matched_alpha",
    "moon_cat_states",
    "squeezed_cat_states",
    "wigner",
    "Liouvillian",
    "build_moon_liouvillian",
    "build_two_mode_liouvillian",
    "decay_rates",
    "evolve",
    "spectral_gap_rate",
    "steady_state",
]
