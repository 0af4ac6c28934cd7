"""
Command-line frontend of the mooncat laboratory.

Subcommands: kernel, wigner, scaling, zeno, adaptive, repcode, circuit.
Every run reads an INI configuration (--config), applies the --seed, --out
and --threads flags, and writes CSV/JSON artifacts stamped with the config
hash, seed and version.

Exit codes: 0 ok, 2 configuration, 3 truncation, 4 numerical failure,
5 model out of range or widen grid, 6 flagged partial result, 1 other.
"""

import argparse
import logging
import math
import sys
import traceback
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from mooncat.analysis import zeno
from mooncat.analysis.scaling import fit_sweep, scaling_sweep
from mooncat.circuit import forward
from mooncat.config.loader import ConfigLoader
from mooncat.config.run_config import COMMANDS, RunConfig
from mooncat.constants import REFERENCE_CIRCUIT
from mooncat.estimation import adaptive
from mooncat.exceptions import EXIT_FLAGGED, MoonCatError
from mooncat.models import PumpSetting
from mooncat.qec import repcode
from mooncat.quantum import hilbert, states
from mooncat.utils.logger import LOGGER_NAME, setup_logger
from mooncat.utils.output import provenance, write_csv, write_json, write_jsonl

WIGNER_BOUND = 2.0 / math.pi


def _meta(config: RunConfig) -> Dict:
    return provenance(config.config_hash(), config.seed, {"command": config.command})


def _out(config: RunConfig, name: str) -> Path:
    return Path(config.out) / name


# =============================================================================
# Subcommands
# =============================================================================

def cmd_kernel(config: RunConfig, logger: logging.Logger) -> bool:
    """Kernel states per (alpha, lambda): coefficient tables and residual report."""
    settings = config.kernel
    report: List[Dict] = []
    flagged = False
    for alpha in settings.alphas:
        for lam in settings.lams:
            if settings.kind == "squeezed":
                r = math.atanh(lam / 2.0)
                pair = states.squeezed_cat_states(alpha, r)
                op = states.squeezed_dissipator(pair.dim, alpha, r)
                residuals = [float(np.linalg.norm(op @ psi)) for psi in (pair.even_state, pair.odd_state)]
            else:
                pair = states.moon_cat_states(alpha, lam, tol=settings.tol, kernel_tol=settings.kernel_tol)
                residuals = [float(np.linalg.norm(states.apply_moon_dissipator(psi, alpha, lam)))
                             for psi in (pair.even_state, pair.odd_state)]
            write_csv(
                _out(config, f"kernel_{settings.kind}_a{alpha:g}_l{lam:g}.csv"),
                pd.DataFrame({"n": np.arange(pair.dim), "even": pair.even_state, "odd": pair.odd_state}),
                _meta(config),
            )
            ok = max(residuals) < settings.kernel_tol
            flagged |= not ok
            report.append({
                "alpha": alpha,
                "lam": lam,
                "kind": settings.kind,
                "dim": pair.dim,
                "residual_even": residuals[0],
                "residual_odd": residuals[1],
                "n_bar": states.pair_mean_photon_number(pair),
                "converged": ok,
            })
            logger.info(f"kernel alpha={alpha} lambda={lam}: dim={pair.dim}, residual={max(residuals):.2e}")
    write_json(_out(config, "kernel_residuals.json"), {"points": report}, _meta(config))
    return flagged


def _wigner_state(pair: states.MoonCatPair, which: str) -> np.ndarray:
    if which == "mixture":
        return pair.manifold_mixture()
    plus, minus = pair.logical_states()
    vectors = {"even": pair.even_state, "odd": pair.odd_state, "plus": plus, "minus": minus}
    return hilbert.ket_to_dm(vectors[which])


def cmd_wigner(config: RunConfig, logger: logging.Logger) -> bool:
    """Wigner function of one basis state on a square grid."""
    settings = config.wigner
    if settings.kind == "squeezed":
        pair = states.squeezed_cat_states(settings.alpha, math.atanh(settings.lam / 2.0))
    else:
        pair = states.moon_cat_states(settings.alpha, settings.lam)
    pair = pair.compact()
    rho = _wigner_state(pair, settings.state)
    grid = states.wigner(rho, extent=settings.extent, points=settings.points)
    max_abs = float(np.max(np.abs(grid.values)))
    write_csv(_out(config, "wigner.csv"), grid.to_frame(), _meta(config))
    within_bound = max_abs <= WIGNER_BOUND + 1e-6
    write_json(_out(config, "wigner_report.json"), {
        "alpha": settings.alpha,
        "lam": settings.lam,
        "state": settings.state,
        "dim": pair.dim,
        "max_abs": max_abs,
        "within_bound": within_bound,
        "normalization": grid.normalization(),
        "n_bar_wigner": states.mean_photon_from_wigner(grid),
        "n_bar_operator": states.mean_photon_number(rho),
    }, _meta(config))
    logger.info(f"wigner grid {settings.points}x{settings.points}, max|W|={max_abs:.4f}")
    return not within_bound


def cmd_scaling(config: RunConfig, logger: logging.Logger) -> bool:
    """Gamma_Z and Gamma_X over (n_bar, lambda) with scaling fits."""
    settings = config.scaling
    rows = scaling_sweep(config.moon, settings.n_bars, settings.lams, settings.kinds,
                         method=settings.method, threads=config.worker_count())
    write_csv(_out(config, "scaling_rates.csv"), rows, _meta(config))
    fits = fit_sweep(rows, config.moon.kappa1, config.moon.n_th, window=settings.window or None,
                     saturation_floor=settings.saturation_floor or None)
    write_json(_out(config, "scaling_fits.json"), {"fits": fits}, _meta(config))
    flagged = any("error" in fit["bitflip"] for fit in fits)
    flagged |= any(fit.get("phaseflip", {}).get("flagged", False) for fit in fits)
    logger.info(f"scaling: {len(rows)} points, {len(fits)} series")
    return flagged


def cmd_zeno(config: RunConfig, logger: logging.Logger) -> bool:
    """Optimal Zeno gate search with analytic comparison."""
    settings = config.zeno
    m = config.moon
    if settings.xi_min is not None and settings.xi_max is not None:
        grid = np.logspace(math.log10(settings.xi_min), math.log10(settings.xi_max), settings.xi_points)
    else:
        grid = zeno.default_xi_grid(m, settings.xi_points, settings.xi_decades)
    optimum = zeno.optimal_gate_search(m, grid, method=settings.method,
                                       threads=config.worker_count(), logger=logger)
    analytics = zeno.zeno_analytics(m.alpha, m.lam_real, m.kappa2, m.kappa1_eff, m.n_th, optimum.optimal_xi)
    write_csv(_out(config, "zeno_table.csv"), optimum.table, _meta(config))
    payload = optimum.model_dump(exclude={"table"})
    payload["analytics"] = analytics.model_dump()
    write_json(_out(config, "zeno_optimum.json"), payload, _meta(config))
    return False


def cmd_adaptive(config: RunConfig, logger: logging.Logger) -> bool:
    """Adaptive lifetime campaign, or the adaptive vs fixed-grid benchmark."""
    settings = config.adaptive
    if settings.mode == "benchmark":
        rows = adaptive.benchmark_table(settings.benchmark_rates, settings.campaigns, seed=config.seed,
                                        c0=settings.c0, target_sigma=settings.target_sigma)
        write_csv(_out(config, "adaptive_benchmark.csv"), rows, _meta(config))
        return False

    prior = adaptive.PosteriorGrid.uniform(settings.rate_min, settings.rate_max, zeno=settings.zeno)
    oracle = adaptive.SyntheticDecayOracle(settings.rate, c0=settings.c0, cinf=settings.cinf,
                                           seed=config.seed, deterministic=settings.deterministic)
    result = adaptive.run_adaptive(
        oracle,
        budget=settings.budget,
        target_sigma=settings.target_sigma,
        prior=prior,
        shots=settings.shots,
        max_rounds=settings.max_rounds,
        overhead=settings.overhead,
        logger=logger,
    )
    write_jsonl(_out(config, "adaptive_campaign.jsonl"), adaptive.campaign_log_lines(result), _meta(config))
    write_json(_out(config, "adaptive_summary.json"), {
        "truth": settings.rate,
        "mle": result.mle,
        "mle_sigma": result.mle_sigma,
        "lse": result.lse.model_dump() if result.lse is not None else None,
        "log_rate_sigma": result.posterior.log_rate_sigma(),
        "total_time": result.total_time,
        "t_meas_opt": adaptive.t_meas_opt(1.0 / result.mle, min(settings.target_sigma, 1.0)),
        "rounds": result.rounds,
        "converged": result.converged,
    }, _meta(config))
    return result.flagged


def cmd_repcode(config: RunConfig, logger: logging.Logger) -> bool:
    """Logical phase-flip rates over cat kinds, distances and kappa1/kappa2."""
    settings = config.repcode
    rows = repcode.threshold_sweep(
        settings.settings(),
        settings.distances,
        settings.ratios,
        shots=settings.shots,
        seed=config.seed,
        threads=config.worker_count(),
        min_errors=settings.min_errors,
    )
    write_csv(_out(config, "repcode_sweep.csv"), rows, _meta(config))
    logger.info(f"repcode: {len(rows)} points")
    return any(row["flagged"] for row in rows)


def cmd_circuit(config: RunConfig, logger: logging.Logger) -> bool:
    """Circuit forward model at the working point and the compensation map."""
    settings = config.circuit
    params = forward.reference_circuit_params()
    rates = forward.reference_rates()
    omega_a0, omega_b0 = forward.bare_frequencies(params)
    curvature_ratio = forward.effective_inductance_ratio(params)
    calibrated = forward.calibrate_inductance_ratio(omega_a0, omega_b0, REFERENCE_CIRCUIT["omega_a"],
                                                    REFERENCE_CIRCUIT["omega_b"])
    omega_a, omega_b = forward.mode_frequencies(omega_a0, omega_b0, calibrated)
    forward_a, forward_b = forward.mode_frequencies(omega_a0, omega_b0, curvature_ratio)
    sigma = forward.sigma_for_g2(settings.g2_target, params)
    couplings = forward.pump_couplings(params.E_J, sigma, params.phi_a, params.phi_b,
                                       params.delta_E_J, kappa_b=params.kappa_b)
    # delta = 2 E_J sigma / E_L cancels the linear drive
    pump_tone = 2.0 * omega_a - omega_b
    bare = forward.drive_and_stark(PumpSetting(sigma=sigma, omega_p=pump_tone), params, omega_a, omega_b)
    cancelled = forward.drive_and_stark(
        PumpSetting(sigma=sigma, delta=2.0 * params.E_J * sigma / params.E_L, omega_p=pump_tone),
        params, omega_a, omega_b,
    )

    v_att = np.linspace(settings.v_att_min, settings.v_att_max, settings.points)
    v_phi = np.linspace(settings.v_phi_min, settings.v_phi_max, settings.points)
    cmap = forward.compensation_map(v_att, v_phi, settings.mutual, settings.delta_l, settings.omega_p, params)
    zero = forward.compensation_zero(params, settings.delta_l, settings.omega_p)
    winding = forward.winding_number(cmap.xi1)
    att, phi = np.meshgrid(v_att, v_phi)
    write_csv(_out(config, "compensation_map.csv"), [
        {"v_att": a, "v_phi": p, "abs_xi1": abs(x), "arg_xi1": float(np.angle(x))}
        for a, p, x in zip(att.ravel(), phi.ravel(), cmap.xi1.ravel())
    ], _meta(config))
    write_json(_out(config, "circuit_report.json"), {
        "bare_frequencies": [omega_a0, omega_b0],
        "inductance_ratio_curvature": curvature_ratio,
        "mode_frequencies_forward": [forward_a, forward_b],
        "forward_relative_error": [forward_a / REFERENCE_CIRCUIT["omega_a"] - 1.0,
                                   forward_b / REFERENCE_CIRCUIT["omega_b"] - 1.0],
        "inductance_ratio_calibrated": calibrated,
        "mode_frequencies_calibrated": [omega_a, omega_b],
        "sigma": sigma,
        "couplings": couplings._asdict(),
        "kappa2": forward.kappa2_from_g2(couplings.g2, params.kappa_b),
        "drive_uncompensated": {"xi1_a": bare.xi1_a, "stark_a": bare.stark_a, "stark_b": bare.stark_b},
        "drive_compensated": {"xi1_a": cancelled.xi1_a, "stark_a": cancelled.stark_a,
                              "stark_b": cancelled.stark_b},
        "linear_regime_bound": forward.linear_regime_bound(params.kappa_b, settings.g_l,
                                                           params.phi_a, params.phi_b),
        "compensation_zero": list(zero),
        "winding": winding,
        "kerr_detuning_n4": forward.kerr_detuning(0.0, rates["K4"], rates["K6"], 2.0),
    }, _meta(config))
    logger.info(f"circuit: omega_a={omega_a:.4g} Hz, omega_b={omega_b:.4g} Hz, winding={winding}")
    return False


COMMAND_HANDLERS: Dict[str, Callable[[RunConfig, logging.Logger], bool]] = {
    "kernel": cmd_kernel,
    "wigner": cmd_wigner,
    "scaling": cmd_scaling,
    "zeno": cmd_zeno,
    "adaptive": cmd_adaptive,
    "repcode": cmd_repcode,
    "circuit": cmd_circuit,
}


# =============================================================================
# Entry Point
# =============================================================================

def build_parser() -> argparse.ArgumentParser:
    """Argument parser for the mooncat command."""
    parser = argparse.ArgumentParser(
        description="mooncat - numerical laboratory for dissipative moon-cat qubits",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("command", choices=COMMANDS, help="Laboratory run to perform")
    parser.add_argument("--config", default=None, help="INI configuration file")
    parser.add_argument("--seed", type=int, default=None, help="Base seed (overrides [Common] seed)")
    parser.add_argument("--out", default=None, help="Output directory (overrides [Common] out)")
    parser.add_argument("--threads", type=int, default=None,
                        help="Worker threads, 0 for all cores (overrides [Common] threads)")
    parser.add_argument("--log_file", default=None, help="Log to this rotating file instead of the console")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand and return its exit code."""
    args = build_parser().parse_args(argv)
    logger = logging.getLogger(LOGGER_NAME)
    try:
        loader = ConfigLoader(args.config)
        logger = setup_logger(loader, log_to_file=args.log_file is not None,
                              file_name=args.log_file or "mooncat.log")
        config = RunConfig.from_loader(loader, args.command, seed=args.seed, out=args.out, threads=args.threads)
        logger.info(f"mooncat {config.command}: seed={config.seed}, config_hash={config.config_hash()[:12]}")
        flagged = COMMAND_HANDLERS[config.command](config, logger)
    except MoonCatError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        logger.debug(traceback.format_exc())
        return exc.exit_code
    except Exception as exc:
        logger.error(f"unexpected error: {exc}")
        logger.debug(traceback.format_exc())
        return 1
    if flagged:
        logger.warning("run finished with flagged results")
        return EXIT_FLAGGED
    return 0


def main_entry() -> None:
    """Console-script entry point."""
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
