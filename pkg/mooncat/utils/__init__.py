"""
Utility modules for logging, timing and artifact output.
"""

from mooncat.utils.logger import setup_logger
from mooncat.utils.timing import time_it
from mooncat.utils.output import provenance, read_csv, read_jsonl, write_csv, write_json, write_jsonl

__all__ = [
    "setup_logger",
    "time_it",
    "provenance",
    "read_csv",
    "read_jsonl",
    "write_csv",
    "write_json",
    "write_jsonl",
]
