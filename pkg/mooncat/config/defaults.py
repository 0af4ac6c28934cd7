"""
Default configuration values for the mooncat laboratory.

This module defines default values and their expected data types for every
tunable numerical setting. They apply whenever a value is not given in the
run configuration file or as a keyword argument.

Format: CONFIG_DEFAULTS[key] = (default_value, data_type)
"""

CONFIG_DEFAULTS = {
    # Logging and run control
    "log_level": ("INFO", str),
    "seed": (0, int),
    "threads": (0, int),  # 0 means os.cpu_count()

    # Truncated Fock space
    "state_tol": (1e-10, float),
    "kernel_tol": (1e-9, float),
    "max_state_dim": (65536, int),
    "dim_margin": (10, int),

    # Liouvillian assembly and spectra
    "composite_dim_cap": (400, int),
    "dense_eig_cap": (2500, int),
    "kernel_rel_tol": (1e-9, float),
    "degeneracy_rel_tol": (1e-6, float),
    "eigs_count": (8, int),
    "buffer_dim": (5, int),

    # Time integration
    "ode_method": ("RK45", str),
    "ode_rtol": (1e-8, float),
    "ode_atol": (1e-10, float),
    "trace_drift_tol": (1e-7, float),
    "time_fit_rate_floor": (1e-4, float),  # in units of kappa2

    # Least-squares engine
    "fit_max_iterations": (200, int),
    "fit_ftol": (1e-12, float),
    "fit_rate_seeds": (5, int),
    "saturation_factor": (3.0, float),
    "saturation_floor": (0.0, float),  # absolute Gamma_Z floor, 0 disables the cut

    # Wigner grids
    "wigner_points": (61, int),
    "wigner_extent": (4.0, float),

    # Adaptive design
    "rate_grid_points": (240, int),
    "rate_min": (1e-4, float),
    "rate_max": (1e3, float),
    "c0_grid_points": (21, int),
    "c0_min": (0.5, float),
    "c0_max": (1.0, float),
    "cinf_grid_points": (21, int),
    "cinf_span": (0.3, float),
    "shots_per_round": (20, int),
    "candidate_times": (60, int),
    "target_sigma": (0.1, float),
    "max_rounds": (400, int),
    "round_overhead": (0.0, float),

    # Repetition code
    "distance": (3, int),
    "min_logical_errors": (1000, int),
    "min_shots": (1000, int),
    "max_shots": (1000000, int),
    "shard_size": (50000, int),
    "confidence": (0.95, float),
}


def get_default(key: str):
    """
    Get the default value for a configuration key.

    Args:
        key: Configuration key name

    Returns:
        The default value, or None if key is not found
    """
    if key in CONFIG_DEFAULTS:
        return CONFIG_DEFAULTS[key][0]
    return None


def get_type(key: str):
    """
    Get the expected data type for a configuration key.

    Args:
        key: Configuration key name

    Returns:
        The expected data type, or str if key is not found
    """
    if key in CONFIG_DEFAULTS:
        return CONFIG_DEFAULTS[key][1]
    return str
