"""
Superconducting-circuit forward model of the moon-cat device.
"""
