"""
Phase-flip repetition code: circuit-level sampling and matching decoding.
"""

from mooncat.qec.repcode import (
    build_error_model,
    decode,
    logical_error_rate,
    sample_history,
    threshold_sweep,
)

__all__ = [
    "build_error_model",
    "decode",
    "logical_error_rate",
    "sample_history",
    "threshold_sweep",
]
