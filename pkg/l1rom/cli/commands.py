"""Batch commands. Each one writes its artifacts and returns the run manifest."""

import json
import logging
import time
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from scipy.stats import pearsonr

from l1rom.application.use_cases.experiments import Experiment, ExperimentKind, build_experiment
from l1rom.application.use_cases.greedy_sampling import GreedySamplingUseCase
from l1rom.application.use_cases.pod_comparison import PodComparisonUseCase
from l1rom.application.use_cases.rom import AffineResidual
from l1rom.application.use_cases.verification import check_scheme_properties, verify_burgers_error_bound
from l1rom.cli.config import ExperimentConfig
from l1rom.cli.manifest import ArtifactWriter, RunManifest
from l1rom.domain.entities.dictionary import Dictionary
from l1rom.domain.entities.greedy import GreedyHistory
from l1rom.domain.entities.grid import Grid1D, GridField, Trajectory
from l1rom.domain.entities.minimize import Constraint
from l1rom.domain.entities.problems import FluxId, SchemeConfig
from l1rom.domain.entities.rom import RomMethod, RomTrajectory
from l1rom.domain.errors import ConfigError, GreedyAbortedError
from l1rom.domain.repositories.dictionary_repository import DictionaryRepository
from l1rom.domain.services.hdm import mach_number, primitive_variables, rankine_hugoniot_speed, track_shock
from l1rom.infrastructure.repositories.text_dictionary_repository import TextDictionaryRepository

logger = logging.getLogger(__name__)

# fraction of the largest coefficient above which a coordinate counts as active
SIGNIFICANT_FRACTION = 0.01


def get_dictionary_repository() -> DictionaryRepository:
    return TextDictionaryRepository()


def _start(command: str, cfg: ExperimentConfig) -> ArtifactWriter:
    manifest = RunManifest(command=command, config=json.loads(cfg.json()))
    return ArtifactWriter(cfg.output_dir, manifest)


def solution_frame(trajectory: Trajectory, names: List[str]) -> pd.DataFrame:
    """x, then one column per component per stored time"""
    columns: Dict[str, np.ndarray] = {"x": trajectory.grid.centers}
    for n, state in enumerate(trajectory.states):
        for c, name in enumerate(names):
            columns[f"{name}_t{n}"] = state.component(c)
    return pd.DataFrame(columns)


def primitive_frame(field: GridField, gamma: float, with_mach: bool = False) -> pd.DataFrame:
    rho, u, p = primitive_variables(field, gamma)
    columns = {"x": field.grid.centers, "rho": rho, "u": u, "p": p}
    if with_mach:
        columns["mach"] = mach_number(field, gamma)
    return pd.DataFrame(columns)


def _shock_summary(trajectory: Trajectory) -> Dict[str, float]:
    """Late-time shock speed against the Rankine-Hugoniot speed of the final state"""
    positions = track_shock(trajectory)
    late = slice(3 * len(positions) // 4, None)
    speed = float(np.polyfit(trajectory.times[late], positions[late], 1)[0])
    return {"shock_speed": speed, "rankine_hugoniot_speed": rankine_hugoniot_speed(trajectory.final_state)}


def cmd_hdm(cfg: ExperimentConfig) -> RunManifest:
    """Solve the HDM at one parameter and write its trajectory"""
    experiment = cfg.build_experiment()
    mu = cfg.hdm_mu(experiment)
    writer = _start("hdm", cfg)

    with writer.phase("hdm"):
        trajectory = experiment.solve_hdm(mu)
    with writer.phase("write"):
        get_dictionary_repository().save(Dictionary(entries=[trajectory], seed=cfg.seed), writer.path("hdm.dict"))
        writer.record("hdm.dict")
        writer.write_csv("solution.csv", solution_frame(trajectory, experiment.component_names))
        if len(experiment.component_names) == 3:
            writer.write_csv(
                "primitives.csv",
                primitive_frame(
                    trajectory.final_state, experiment.gamma, with_mach=experiment.kind == ExperimentKind.NOZZLE
                ),
            )

    writer.manifest.summary = {"mu": mu, "n_cells": trajectory.grid.n_cells, "n_times": len(trajectory.times)}
    if experiment.kind == ExperimentKind.BURGERS:
        writer.manifest.summary.update(_shock_summary(trajectory))
    return writer.finish()


def history_frames(history: GreedyHistory):
    """greedy_history.csv and indicator_vs_error.csv contents"""
    n = len(history.indicator_max)
    has_errors = bool(history.error_max)
    summary = pd.DataFrame(
        {
            "iteration": np.arange(n),
            "selected_mu": [history.selected[i][0] for i in range(n)],
            "max_indicator": history.indicator_max,
            "max_error": history.error_max if has_errors else [np.nan] * n,
            "mean_error": history.error_mean if has_errors else [np.nan] * n,
        }
    )
    rows = []
    for i, indicators in enumerate(history.indicator_tables):
        for j, indicator in enumerate(indicators):
            error = history.error_tables[i][j] if has_errors else np.nan
            rows.append({"iteration": i, "mu": history.candidates[j][0], "indicator": indicator, "error": error})
    return summary, pd.DataFrame(rows, columns=["iteration", "mu", "indicator", "error"])


def indicator_correlation(history: GreedyHistory) -> Dict[str, float]:
    """Pearson coefficients between indicator and true error"""
    result = {}
    if len(history.error_max) >= 2 and np.ptp(history.indicator_max) > 0 and np.ptp(history.error_max) > 0:
        result["pearson_max"] = float(pearsonr(history.indicator_max, history.error_max)[0])
    indicators = np.concatenate(history.indicator_tables) if history.indicator_tables else np.empty(0)
    errors = np.concatenate(history.error_tables) if history.error_tables else np.empty(0)
    if errors.size >= 2 and np.ptp(indicators) > 0 and np.ptp(errors) > 0:
        result["pearson_all"] = float(pearsonr(indicators, errors)[0])
    return result


def _write_history(writer: ArtifactWriter, history: GreedyHistory) -> None:
    summary, table = history_frames(history)
    writer.write_csv("greedy_history.csv", summary)
    writer.write_csv("indicator_vs_error.csv", table)


def cmd_greedy(cfg: ExperimentConfig) -> RunManifest:
    """Greedy sampling; writes the dictionary and the selection history"""
    experiment = cfg.build_experiment()
    greedy_cfg = cfg.greedy_config(experiment)
    writer = _start("greedy", cfg)

    try:
        with writer.phase("greedy"):
            d, history = GreedySamplingUseCase(experiment, compute_errors=cfg.compare_truth).execute(greedy_cfg)
    except GreedyAbortedError as e:
        _write_history(writer, e.history)
        writer.manifest.passed = False
        writer.finish()
        raise

    with writer.phase("write"):
        get_dictionary_repository().save(d, writer.path("dictionary.dict"))
        writer.record("dictionary.dict")
        _write_history(writer, history)

    writer.manifest.summary = {
        "members": [mu[0] for mu in history.selected],
        "iterations": history.iterations,
        **indicator_correlation(history),
    }
    return writer.finish()


def _load_dictionary(cfg: ExperimentConfig, experiment: Experiment) -> Dictionary:
    if cfg.dict_file:
        return get_dictionary_repository().load(cfg.dict_file, seed=cfg.seed)
    return experiment.build_dictionary(cfg.dictionary_mus(experiment), seed=cfg.seed)


def _significant(coords: np.ndarray) -> int:
    magnitude = np.abs(coords)
    peak = float(np.max(magnitude))
    if peak == 0.0:
        return 0
    return int(np.count_nonzero(magnitude > SIGNIFICANT_FRACTION * peak))


def _left_velocity(field: GridField) -> float:
    components = field.as_components()
    return float(components[1, 0] / components[0, 0])


def cmd_rom(cfg: ExperimentConfig) -> RunManifest:
    """ROM solve at the target parameter with one method or the full method table"""
    experiment = cfg.build_experiment()
    writer = _start("rom", cfg)
    mu = cfg.rom_target(experiment)

    with writer.phase("dictionary"):
        d = _load_dictionary(cfg, experiment)
    truth = None
    if cfg.compare_truth:
        with writer.phase("truth"):
            truth = experiment.solve_hdm(mu)

    methods = list(RomMethod) if cfg.method_table else [cfg.rom_cfg.method]
    grid = d.grid
    reconstruction = {"x": grid.centers}
    if truth is not None:
        index = min(len(truth.times), d.n_times) - 1
        for c, name in enumerate(experiment.component_names):
            reconstruction[f"hdm_{name}"] = truth.states[index].component(c)
    reports, coords = [], []

    for method in methods:
        update = {"method": method}
        if method == RomMethod.GALERKIN and cfg.rom_cfg.constraint != Constraint.NONE:
            update["constraint"] = Constraint.NONE
        affine = not experiment.is_steady or isinstance(experiment.residual(mu), AffineResidual)
        if method == RomMethod.L1_LP and not affine and cfg.method_table:
            logger.warning("skipping l1_lp: the %s residual is not affine", experiment.kind.value)
            continue
        rom_cfg = cfg.rom_cfg.copy(update=update)
        start = time.perf_counter()
        with writer.phase(f"rom_{method.value}"):
            trajectory: RomTrajectory = experiment.rom(d, mu, rom_cfg)
        elapsed = (time.perf_counter() - start) * 1000.0

        final = trajectory.final_state
        for c, name in enumerate(experiment.component_names):
            reconstruction[f"{method.value}_{name}"] = final.component(c)
        final_coords = trajectory.reduced_coords[-1]
        for fit, row in enumerate(final_coords):
            for member, value in zip(trajectory.member_mus, row):
                coords.append({"method": method.value, "fit": fit, "member_mu": member[0], "coefficient": value})

        report = {
            "method": method.value,
            "relative_error": experiment.relative_error(trajectory, truth) if truth is not None else np.nan,
            "density_error": np.nan,
            "objective": float(sum(r.objective for r in trajectory.reports)),
            "cumulative_residual": trajectory.cumulative_residual,
            "iterations": trajectory.total_iterations,
            "converged": all(r.converged for r in trajectory.reports),
            "n_significant": _significant(final_coords),
            "perturbed": any(trajectory.perturbed),
            "wall_time_ms": elapsed,
        }
        if len(experiment.component_names) == 3 and truth is not None:
            report["density_error"] = experiment.relative_error(trajectory, truth, component=0)
        if experiment.kind == ExperimentKind.EULER:
            report["left_velocity_t0"] = _left_velocity(trajectory.reconstructed[0])
        reports.append(report)

    with writer.phase("write"):
        writer.write_csv("reconstruction.csv", pd.DataFrame(reconstruction))
        writer.write_csv("coords.csv", pd.DataFrame(coords, columns=["method", "fit", "member_mu", "coefficient"]))
        writer.write_csv("report.csv", pd.DataFrame(reports))
    writer.manifest.summary = {"mu": mu, "members": [m[0] for m in d.mus], "methods": [r["method"] for r in reports]}
    return writer.finish()


def _check_row(check: str, failures: int, worst_margin: float = np.nan, passed: Optional[bool] = None) -> dict:
    return {
        "check": check,
        "passed": failures == 0 if passed is None else passed,
        "failures": failures,
        "worst_margin": worst_margin,
    }


def cmd_verify(cfg: ExperimentConfig) -> RunManifest:
    """Monotone-scheme properties and the ROM error estimate; manifest.passed reflects failures"""
    if cfg.experiment not in (ExperimentKind.BURGERS, ExperimentKind.ADVECTION):
        raise ConfigError("verify needs a scalar experiment (burgers or advection)")
    writer = _start("verify", cfg)
    cfl = cfg.hdm.cfl if cfg.hdm.cfl is not None else 0.9
    if cfg.experiment == ExperimentKind.BURGERS:
        scheme = SchemeConfig(cfl=cfl, flux_id=FluxId.GODUNOV_BURGERS, allow_unstable=cfl > 1.0)
        grid = Grid1D(x_min=0.0, x_max=2.0 * np.pi, n_cells=64, periodic=True)
    else:
        scheme = SchemeConfig(cfl=cfl, flux_id=FluxId.UPWIND_ADVECTION, allow_unstable=cfl > 1.0)
        grid = Grid1D(x_min=0.0, x_max=1.0, n_cells=64, periodic=True)

    rows = []
    with writer.phase("scheme_properties"):
        props = check_scheme_properties(scheme, n_pairs=100, seed=cfg.seed, grid=grid)
    rows.append(_check_row("l1_contraction", props.contraction_failures, props.worst_contraction_margin))
    rows.append(_check_row("order_preservation", props.order_failures))
    rows.append(_check_row("total_variation", props.tv_failures))

    if cfg.experiment == ExperimentKind.BURGERS:
        # the ROM runs on a stable HDM even when the scheme check is a negative control
        parameters = cfg.hdm.dict(exclude={"mu"})
        if cfl > 1.0:
            parameters["cfl"] = None
        experiment = build_experiment(cfg.experiment, **parameters)
        members = tuple(cfg.dict_samples) if cfg.dict_samples else (0.4, 0.6)
        with writer.phase("error_bound"):
            bound = verify_burgers_error_bound(experiment, cfg.rom_cfg, cfg.target_mu, members)
        for name, report in (("error_bound", bound.free), ("error_bound_simplex", bound.simplex)):
            failures = sum(1 for m in report.margins if m < 0)
            rows.append(_check_row(name, failures, report.worst_margin, report.passed))
        sharp = bound.simplex.sharp_margins or []
        rows.append(
            _check_row(
                "sharp_error_bound",
                sum(1 for m in sharp if m < 0),
                min(sharp) if sharp else np.nan,
                bool(bound.simplex.sharp_passed),
            )
        )

    with writer.phase("write"):
        writer.write_csv("verify.csv", pd.DataFrame(rows, columns=["check", "passed", "failures", "worst_margin"]))
    writer.manifest.passed = all(row["passed"] for row in rows)
    writer.manifest.summary = {"failed_checks": [row["check"] for row in rows if not row["passed"]]}
    return writer.finish()


def cmd_pod_compare(cfg: ExperimentConfig) -> RunManifest:
    """Greedy sampling replayed with POD bases at several energy tolerances"""
    experiment = cfg.build_experiment()
    if not experiment.is_steady:
        raise ConfigError("pod-compare needs a steady experiment")
    greedy_cfg = cfg.greedy_config(experiment)
    writer = _start("pod-compare", cfg)

    greedy = GreedySamplingUseCase(experiment, compute_errors=True)
    with writer.phase("greedy"):
        d, history = greedy.execute(greedy_cfg)
    with writer.phase("pod"):
        rows = PodComparisonUseCase(experiment).execute(d, history, greedy_cfg.rom_cfg, truth=greedy.truth)

    with writer.phase("write"):
        frame = pd.DataFrame([row.dict() for row in rows])
        writer.write_csv("pod_comparison.csv", frame)
        _write_history(writer, history)

    dictionary = frame[frame["basis"] == "dictionary"]
    writer.manifest.summary = {
        "dictionary_error_non_increasing": bool(np.all(np.diff(dictionary["max_error"].to_numpy()) <= 1e-12)),
        "pod_dimensions": {
            basis: group["basis_dim"].tolist() for basis, group in frame.groupby("basis", sort=False)
        },
    }
    return writer.finish()


COMMANDS = {
    "hdm": cmd_hdm,
    "greedy": cmd_greedy,
    "rom": cmd_rom,
    "verify": cmd_verify,
    "pod-compare": cmd_pod_compare,
}
