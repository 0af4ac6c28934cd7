"""
mooncat - Numerical laboratory for dissipative moon-cat qubits

Simulates two-photon-dissipation-stabilized cat qubits with a squeezing-like
deformation, extracts their bit-flip and phase-flip rates, optimizes Zeno
gates, designs Bayesian lifetime measurements and runs repetition-code
Monte Carlo on top of the resulting error model.
"""

__version__ = "1.0.0"
__author__ = "mooncat-lab Team"
