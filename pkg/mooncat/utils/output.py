"""
Artifact writers for the mooncat laboratory.

This module provides:
- CSV tables (pandas) with a leading provenance comment header
- JSON reports with sorted keys and an embedded provenance block
- JSON-lines campaign logs

Floats are written with a fixed format so identical inputs produce
byte-identical files.
"""

import json
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Sequence, Union

import numpy as np
import pandas as pd

from mooncat import __version__

FLOAT_FORMAT = "%.12e"

PathLike = Union[str, Path]


def provenance(config_hash: str, seed: int, extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Provenance block embedded in every artifact."""
    block = {"config_hash": config_hash, "seed": int(seed), "version": __version__}
    if extra:
        block.update(extra)
    return block


def _encode(value: Any) -> Any:
    """JSON fallback for numpy values and complex numbers."""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (int, float, str, bool)) or value is None:
        return value
    if hasattr(value, "model_dump"):
        return value.model_dump()
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _prepare(path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def to_frame(rows: Union[pd.DataFrame, Sequence[Dict[str, Any]]]) -> pd.DataFrame:
    """DataFrame from row dicts; complex columns are split into _re/_im pairs."""
    frame = rows.copy() if isinstance(rows, pd.DataFrame) else pd.DataFrame(list(rows))
    for column in list(frame.columns):
        if frame[column].dtype.kind == "c":
            position = frame.columns.get_loc(column)
            values = frame.pop(column)
            frame.insert(position, f"{column}_im", values.to_numpy().imag)
            frame.insert(position, f"{column}_re", values.to_numpy().real)
    return frame


def write_csv(path: PathLike, rows: Union[pd.DataFrame, Sequence[Dict[str, Any]]],
              meta: Dict[str, Any]) -> Path:
    """
    Write a table with a '# key=value' provenance header.

    Args:
        path: Output file
        rows: DataFrame or list of row dicts
        meta: Provenance block

    Returns:
        The written path
    """
    path = _prepare(path)
    frame = to_frame(rows)
    with open(path, "w", newline="") as handle:
        for key in sorted(meta):
            handle.write(f"# {key}={meta[key]}\n")
        frame.to_csv(handle, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def read_csv(path: PathLike) -> pd.DataFrame:
    """Read a table written by write_csv."""
    return pd.read_csv(path, comment="#")


def write_json(path: PathLike, payload: Dict[str, Any], meta: Dict[str, Any]) -> Path:
    """Write a report with sorted keys and a 'provenance' block."""
    path = _prepare(path)
    document = dict(payload)
    document["provenance"] = meta
    with open(path, "w") as handle:
        json.dump(document, handle, sort_keys=True, indent=2, default=_encode)
        handle.write("\n")
    return path


def write_jsonl(path: PathLike, rows: Iterable[Dict[str, Any]], meta: Dict[str, Any]) -> Path:
    """Write one JSON object per line, led by a provenance line."""
    path = _prepare(path)
    with open(path, "w") as handle:
        handle.write(json.dumps({"provenance": meta}, sort_keys=True, default=_encode) + "\n")
        for row in rows:
            handle.write(json.dumps(row, sort_keys=True, default=_encode) + "\n")
    return path


def read_jsonl(path: PathLike):
    """Read a JSON-lines log, returning (provenance, rows)."""
    with open(path) as handle:
        lines = [json.loads(line) for line in handle if line.strip()]
    return lines[0].get("provenance", {}), lines[1:]
