"""
Unit tests for the utility helpers (mooncat/utils).

Tests cover:
- CSV, JSON and JSON-lines artifacts with provenance
- The timing decorator
- Logger setup
"""

import json
import logging
from unittest.mock import MagicMock

import numpy as np
import pandas as pd
import pytest

from mooncat import __version__
from mooncat.utils.logger import LOGGER_NAME, setup_logger
from mooncat.utils.output import (
    provenance,
    read_csv,
    read_jsonl,
    to_frame,
    write_csv,
    write_json,
    write_jsonl,
)
from mooncat.utils.timing import time_it


@pytest.fixture
def meta():
    """A provenance block."""
    return provenance("abc123", 7, {"command": "kernel"})


# =============================================================================
# Output Tests
# =============================================================================

class TestOutput:
    """Tests for artifact writers."""

    @pytest.mark.unit
    def test_provenance_block(self, meta):
        """Provenance carries hash, seed, version and extras."""
        assert meta == {"config_hash": "abc123", "seed": 7, "version": __version__, "command": "kernel"}

    @pytest.mark.unit
    def test_csv_header_and_table(self, tmp_path, meta):
        """CSV files start with '# key=value' lines and read back as a table."""
        path = write_csv(tmp_path / "sub" / "table.csv", [{"a": 1.5, "b": 2}, {"a": 0.25, "b": 3}], meta)
        lines = path.read_text().splitlines()
        assert lines[0] == "# command=kernel"
        assert "# seed=7" in lines
        frame = read_csv(path)
        assert list(frame.columns) == ["a", "b"]
        assert frame["a"].tolist() == [1.5, 0.25]

    @pytest.mark.unit
    def test_complex_columns_are_split(self):
        """Complex columns become _re and _im pairs in place."""
        frame = to_frame(pd.DataFrame({"x": [1.0], "z": [1 + 2j], "y": [0.0]}))
        assert list(frame.columns) == ["x", "z_re", "z_im", "y"]
        assert frame["z_im"].iloc[0] == 2.0

    @pytest.mark.unit
    def test_json_report(self, tmp_path, meta):
        """JSON reports embed provenance and serialize numpy values."""
        path = write_json(tmp_path / "report.json",
                          {"rate": np.float64(0.5), "grid": np.arange(3), "ok": np.bool_(True), "z": 1j}, meta)
        document = json.loads(path.read_text())
        assert document["provenance"]["seed"] == 7
        assert document["grid"] == [0, 1, 2]
        assert document["ok"] is True
        assert document["z"] == [0.0, 1.0]

    @pytest.mark.unit
    def test_jsonl_log(self, tmp_path, meta):
        """JSON-lines logs lead with provenance and keep row order."""
        rows = [{"round": 1, "t": 0.5}, {"round": 2, "t": 1.0}]
        path = write_jsonl(tmp_path / "log.jsonl", rows, meta)
        prov, back = read_jsonl(path)
        assert prov == meta
        assert back == rows

    @pytest.mark.unit
    def test_unserializable_value(self, tmp_path, meta):
        """Objects without an encoding raise TypeError."""
        with pytest.raises(TypeError):
            write_json(tmp_path / "bad.json", {"x": object()}, meta)


# =============================================================================
# Timing Tests
# =============================================================================

class TestTimeIt:
    """Tests for the time_it decorator."""

    @pytest.mark.unit
    def test_logs_when_logger_given(self, mock_logger):
        """Execution time is reported through the logger keyword."""
        @time_it
        def work(x, logger=None):
            return 2 * x

        assert work(3, logger=mock_logger) == 6
        assert len(mock_logger._logs["info"]) == 1
        assert mock_logger._logs["info"][0].startswith("work executed in")

    @pytest.mark.unit
    def test_silent_without_logger(self):
        """Without a logger nothing is logged and the result passes through."""
        @time_it
        def work(x, logger=None):
            return x

        assert work("a") == "a"
        assert work.__name__ == "work"


# =============================================================================
# Logger Tests
# =============================================================================

class TestLogger:
    """Tests for setup_logger."""

    @pytest.mark.unit
    def test_setup_attaches_one_handler(self):
        """Repeated setup does not duplicate handlers."""
        loader = MagicMock()
        loader.get_log_level.return_value = "WARNING"
        setup_logger(loader)
        logger = setup_logger(loader)
        assert logger.name == LOGGER_NAME
        assert logger.level == logging.WARNING
        assert len(logger.handlers) == 1
        assert logging.getLogger("mooncat").level == logging.WARNING

    @pytest.mark.unit
    def test_file_logging(self, tmp_path):
        """log_to_file writes through a rotating file handler."""
        loader = MagicMock()
        loader.get_log_level.return_value = "INFO"
        logger = setup_logger(loader, log_to_file=True, file_name=str(tmp_path / "run.log"))
        logger.info("hello")
        for handler in logger.handlers:
            handler.flush()
        assert "hello" in (tmp_path / "run.log").read_text()
        for handler in list(logger.handlers):
            handler.close()
            logger.removeHandler(handler)
