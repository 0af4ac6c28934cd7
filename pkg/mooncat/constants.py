"""
Laboratory-wide constants for the mooncat package.

This module defines constant values used throughout the package for:
- Numerical tolerances shared by several modules
- Symmetry-sector and cat-kind identifiers
- Reference device parameters (superconducting circuit and memory rates)
"""

import math

# Numerical tolerances
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-9
POSITIVITY_TOL = -1e-9
PROBABILITY_CLAMP_TOL = 1e-12

# Liouvillian symmetry sectors (action of a -> -a, i.e. rho -> P rho P)
SECTOR_BITFLIP = "bitflip"  # parity-odd block, carries Gamma_Z
SECTOR_PHASEFLIP = "phaseflip"  # parity-even block, carries Gamma_X
SECTOR_FULL = "full"
SECTORS = (SECTOR_BITFLIP, SECTOR_PHASEFLIP, SECTOR_FULL)

# Engineered dissipator kinds
DISSIPATOR_MOON = "moon"
DISSIPATOR_SQUEEZED = "squeezed"

# Cat kinds for the repetition code
CAT_STANDARD = "standard"
CAT_MOON = "moon"

# Preparation bases for lifetime measurements
BASIS_ZERO = 0
BASIS_ONE = 1

# Superconducting circuit at the working point, energies as E/h in Hz
REFERENCE_CIRCUIT = {
    "E_Ca": 9.6e6,
    "E_Cb": 110e6,
    "E_Lm": 35.3e9,
    "E_L": 33.0e9,
    "E_J": 18.1e9,
    "delta_E_J_ratio": -0.0295,
    "omega_a": 1.08e9,  # memory frequency / 2pi
    "omega_b": 7.90e9,  # buffer frequency / 2pi
    "kappa_a": 2.3e3,
    "kappa_b": 18.2e6,
    "phi_a": 0.098,
    "phi_b": 0.234,
}

# Memory and pump rates, all as rate / 2pi in Hz
REFERENCE_RATES = {
    "g2": 1.3e6,
    "kappa2": 0.37e6,
    "g_l": 0.76e6,
    "kappa_a": 2.3e3,
    "kappa_a_2ph": 3.65e3,
    "kappa_phi": 10.5e3,
    "kappa_phi_2ph": 18.8e3,
    "K4": 14.7e3,
    "K6": 6.8,
    "n_th": 0.93,
    "n_th_reset": 0.11,
    "n_th_buffer": 0.02,
}

# Reduced-model rates used for the idle-rate simulations (units of kappa_a)
SIM_KAPPA2_OVER_KAPPA_A = 1e3
SIM_KAPPA_PHI_OVER_KAPPA_A = 20.0
SIM_K4_OVER_KAPPA_A = 15.0

TWO_PI = 2.0 * math.pi
