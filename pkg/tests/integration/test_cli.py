"""
Integration tests for the mooncat command line (mooncat/cli.py).

Tests cover:
- Every subcommand end to end with small configurations
- Artifacts and their provenance headers
- Exit codes for configuration, range and flagged outcomes
- Reproducibility across repeated runs and thread counts
"""

import json

import pytest

from mooncat.cli import build_parser, main
from mooncat.exceptions import EXIT_FLAGGED
from mooncat.utils.output import read_csv, read_jsonl


def _run(write_config, text, command, out, *extra):
    path = write_config(text, f"{command}.ini")
    return main([command, "--config", path, "--out", str(out), *extra])


# =============================================================================
# Subcommand Runs
# =============================================================================

class TestSubcommands:
    """One small run per subcommand."""

    @pytest.mark.integration
    def test_kernel(self, tmp_path, write_config, config_text):
        """kernel writes one table per (alpha, lambda) and a residual report."""
        assert _run(write_config, config_text["kernel"], "kernel", tmp_path) == 0
        table = read_csv(tmp_path / "kernel_moon_a2_l0.5.csv")
        assert list(table.columns) == ["n", "even_re", "even_im", "odd_re", "odd_im"]
        report = json.loads((tmp_path / "kernel_residuals.json").read_text())
        assert len(report["points"]) == 4
        assert all(point["converged"] for point in report["points"])
        assert report["provenance"]["seed"] == 3

    @pytest.mark.integration
    def test_wigner(self, tmp_path, write_config, config_text):
        """wigner writes the grid and a report within the 2/pi bound."""
        assert _run(write_config, config_text["wigner"], "wigner", tmp_path) == 0
        assert len(read_csv(tmp_path / "wigner.csv")) == 21 * 21
        report = json.loads((tmp_path / "wigner_report.json").read_text())
        assert report["within_bound"]
        assert report["normalization"] == pytest.approx(1.0, abs=1e-2)

    @pytest.mark.integration
    def test_scaling(self, tmp_path, write_config, config_text):
        """scaling writes rates and fits."""
        code = _run(write_config, config_text["scaling"], "scaling", tmp_path)
        assert code in (0, EXIT_FLAGGED)
        rates = read_csv(tmp_path / "scaling_rates.csv")
        assert rates["n_bar"].tolist() == [1.0, 1.5, 2.0]
        fits = json.loads((tmp_path / "scaling_fits.json").read_text())
        assert len(fits["fits"]) == 1

    @pytest.mark.integration
    def test_scaling_saturation_floor_reaches_fit(self, tmp_path, write_config, config_text):
        """A floor above every Gamma_Z empties the bit-flip fit and flags the run."""
        text = config_text["scaling"] + "saturation_floor = 1.0\n"
        assert _run(write_config, text, "scaling", tmp_path) == EXIT_FLAGGED
        fits = json.loads((tmp_path / "scaling_fits.json").read_text())
        assert fits["fits"][0]["bitflip"]["error"].endswith("got 0")

    @pytest.mark.integration
    def test_zeno(self, tmp_path, write_config, config_text):
        """zeno writes the per-xi table and the optimum with analytics."""
        assert _run(write_config, config_text["zeno"], "zeno", tmp_path) == 0
        assert len(read_csv(tmp_path / "zeno_table.csv")) == 9
        optimum = json.loads((tmp_path / "zeno_optimum.json").read_text())
        assert optimum["method"] == "analytic"
        assert optimum["optimal_xi"] == pytest.approx(optimum["analytics"]["optimal_xi"], rel=1e-6)

    @pytest.mark.integration
    def test_adaptive_partial_campaign_is_flagged(self, tmp_path, write_config, config_text):
        """Two rounds cannot reach the target; the run exits flagged."""
        assert _run(write_config, config_text["adaptive"], "adaptive", tmp_path) == EXIT_FLAGGED
        prov, rows = read_jsonl(tmp_path / "adaptive_campaign.jsonl")
        assert prov["seed"] == 11
        assert len(rows) == 4
        assert rows[0]["N"] == 25
        summary = json.loads((tmp_path / "adaptive_summary.json").read_text())
        assert summary["rounds"] == 2
        assert not summary["converged"]

    @pytest.mark.integration
    def test_repcode(self, tmp_path, write_config, config_text):
        """repcode writes one sweep row per point."""
        code = _run(write_config, config_text["repcode"], "repcode", tmp_path)
        assert code in (0, EXIT_FLAGGED)
        sweep = read_csv(tmp_path / "repcode_sweep.csv")
        assert len(sweep) == 1
        assert sweep["kind"].iloc[0] == "moon"
        assert sweep["ci_lo"].iloc[0] <= sweep["p_ZL"].iloc[0] <= sweep["ci_hi"].iloc[0]

    @pytest.mark.integration
    def test_circuit(self, tmp_path, write_config, config_text):
        """circuit writes the compensation map and the forward-model report."""
        assert _run(write_config, config_text["circuit"], "circuit", tmp_path) == 0
        assert len(read_csv(tmp_path / "compensation_map.csv")) == 7 * 7
        report = json.loads((tmp_path / "circuit_report.json").read_text())
        assert report["sigma"] == pytest.approx(0.0639, rel=2e-3)
        assert report["compensation_zero"][0] == pytest.approx(-1.335, abs=1e-3)
        assert report["mode_frequencies_calibrated"][0] == pytest.approx(1.08e9, rel=5e-2)
        assert report["mode_frequencies_forward"][0] == pytest.approx(1.181e9, rel=2e-3)
        assert report["forward_relative_error"][0] == pytest.approx(0.094, abs=3e-3)


# =============================================================================
# Exit Code Tests
# =============================================================================

class TestExitCodes:
    """Tests for error-to-exit-code mapping."""

    @pytest.mark.integration
    def test_missing_config_file(self, tmp_path):
        """A missing configuration file exits with 2."""
        assert main(["kernel", "--config", str(tmp_path / "absent.ini"), "--out", str(tmp_path)]) == 2

    @pytest.mark.integration
    def test_unknown_key(self, tmp_path, write_config):
        """An unknown key exits with 2 and writes nothing."""
        assert _run(write_config, "[kernel]\nflavour = strange\n", "kernel", tmp_path / "out") == 2
        assert not (tmp_path / "out").exists()

    @pytest.mark.integration
    def test_grid_boundary_minimum(self, tmp_path, write_config):
        """A drive grid below the optimum exits with 5."""
        text = (
            "[moon]\nalpha = 1.5\nkappa1 = 1e-3\n"
            "[zeno]\nmethod = analytic\nxi_min = 1e-4\nxi_max = 1e-3\nxi_points = 5\n"
        )
        assert _run(write_config, text, "zeno", tmp_path) == 5

    @pytest.mark.integration
    def test_error_model_out_of_range(self, tmp_path, write_config):
        """Probabilities above 1/2 exit with 5."""
        text = "[repcode]\nkinds = standard\nstandard_n_bar = 0.01\ndistances = 3\nratios = 1e-3\n"
        assert _run(write_config, text, "repcode", tmp_path) == 5

    @pytest.mark.integration
    def test_unknown_command_is_a_usage_error(self):
        """argparse rejects commands outside the list."""
        with pytest.raises(SystemExit) as exc_info:
            build_parser().parse_args(["teleport"])
        assert exc_info.value.code == 2


# =============================================================================
# Reproducibility Tests
# =============================================================================

class TestReproducibility:
    """Tests for seeded, thread-independent artifacts."""

    @pytest.mark.integration
    def test_repcode_identical_across_threads(self, tmp_path, write_config, config_text):
        """The sweep CSV is byte-identical for one and four threads."""
        _run(write_config, config_text["repcode"], "repcode", tmp_path / "one", "--threads", "1")
        _run(write_config, config_text["repcode"], "repcode", tmp_path / "four", "--threads", "4")
        one = (tmp_path / "one" / "repcode_sweep.csv").read_text()
        four = (tmp_path / "four" / "repcode_sweep.csv").read_text()
        assert one == four

    @pytest.mark.integration
    def test_adaptive_same_seed_same_log(self, tmp_path, write_config, config_text):
        """Repeating a seeded campaign reproduces its log."""
        _run(write_config, config_text["adaptive"], "adaptive", tmp_path / "a")
        _run(write_config, config_text["adaptive"], "adaptive", tmp_path / "b")
        assert (tmp_path / "a" / "adaptive_campaign.jsonl").read_text() == \
            (tmp_path / "b" / "adaptive_campaign.jsonl").read_text()

    @pytest.mark.integration
    def test_seed_flag_changes_provenance(self, tmp_path, write_config, config_text):
        """--seed overrides [Common] and is recorded in the artifacts."""
        _run(write_config, config_text["adaptive"], "adaptive", tmp_path, "--seed", "99")
        prov, _ = read_jsonl(tmp_path / "adaptive_campaign.jsonl")
        assert prov["seed"] == 99
