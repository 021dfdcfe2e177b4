import os
from typing import Any, Dict, List, Optional

from prefect import flow, get_run_logger, task

from l1rom.application.use_cases.experiments import BurgersExperiment, NozzleExperiment
from l1rom.application.use_cases.rom import Reconstruction
from l1rom.cli.commands import cmd_greedy, cmd_hdm, cmd_pod_compare, cmd_rom, cmd_verify
from l1rom.cli.config import ExperimentConfig, load_experiment_config
from l1rom.cli.manifest import RunManifest


def experiment_config(experiment: str, output_dir: str, seed: int, **update: Any) -> ExperimentConfig:
    """Default configuration of one experiment with field overrides"""
    cfg = load_experiment_config(None, {"experiment": experiment, "seed": seed, "out": output_dir})
    rom_update = update.pop("rom", None)
    if rom_update:
        update["rom_cfg"] = cfg.rom_cfg.copy(update=rom_update)
    return cfg.copy(update=update)


def _report(manifest: RunManifest) -> Dict[str, Any]:
    logger = get_run_logger()
    logger.info("%s finished: %s", manifest.command, manifest.summary)
    return manifest.summary


@task(name="Advection Greedy Sampling")
def advection_greedy(output_dir: str, seed: int, max_samples: int) -> str:
    cfg = experiment_config("advection", os.path.join(output_dir, "greedy"), seed, max_samples=max_samples)
    _report(cmd_greedy(cfg))
    return os.path.join(cfg.output_dir, "dictionary.dict")


@task(name="Advection Method Table")
def advection_methods(output_dir: str, seed: int, dictionary_path: str) -> Dict[str, Any]:
    cfg = experiment_config(
        "advection", os.path.join(output_dir, "methods"), seed, dict_file=dictionary_path, method_table=True
    )
    return _report(cmd_rom(cfg))


@task(name="Advection POD Comparison")
def advection_pod(output_dir: str, seed: int, max_samples: int) -> Dict[str, Any]:
    cfg = experiment_config("advection", os.path.join(output_dir, "pod"), seed, max_samples=max_samples)
    return _report(cmd_pod_compare(cfg))


@task(name="Burgers Dictionaries")
def burgers_dictionaries(output_dir: str, seed: int) -> Dict[str, Any]:
    """ROM over the base dictionary, its refinement, and the local window of the refinement"""
    runs = {
        "base": {"dict_samples": BurgersExperiment.dictionary_mus},
        "refined": {"dict_samples": BurgersExperiment.refined_mus},
        "refined_local": {
            "dict_samples": BurgersExperiment.refined_mus,
            "rom": {"local_window": BurgersExperiment.refined_window},
        },
    }
    summaries = {}
    for name, update in runs.items():
        cfg = experiment_config("burgers", os.path.join(output_dir, name), seed, **dict(update))
        summaries[name] = _report(cmd_rom(cfg))
    return summaries


@task(name="Burgers Verification")
def burgers_verify(output_dir: str, seed: int) -> bool:
    cfg = experiment_config("burgers", os.path.join(output_dir, "verify"), seed)
    manifest = cmd_verify(cfg)
    _report(manifest)
    return manifest.passed


@task(name="Euler Reconstructions")
def euler_reconstructions(output_dir: str, seed: int) -> Dict[str, Any]:
    summaries = {}
    for reconstruction in (Reconstruction.SINGLE_EXPANSION, Reconstruction.PER_VARIABLE):
        cfg = experiment_config(
            "euler", os.path.join(output_dir, reconstruction.value), seed, reconstruction=reconstruction
        )
        summaries[reconstruction.value] = _report(cmd_rom(cfg))
    return summaries


@task(name="Nozzle Flows")
def nozzle_flows(output_dir: str, seed: int, targets: List[float]) -> Dict[str, Any]:
    summaries = {}
    for mu in targets:
        hdm_cfg = experiment_config("nozzle", os.path.join(output_dir, f"hdm_{mu:g}"), seed)
        hdm_cfg = hdm_cfg.copy(update={"hdm": hdm_cfg.hdm.copy(update={"mu": mu})})
        _report(cmd_hdm(hdm_cfg))
        cfg = experiment_config("nozzle", os.path.join(output_dir, f"rom_{mu:g}"), seed, target_mu=mu)
        summaries[f"{mu:g}"] = _report(cmd_rom(cfg))
    return summaries


@flow(name="L1 ROM Studies")
def study_pipeline(
    output_dir: str = "results",
    seed: int = 0,
    experiments: Optional[List[str]] = None,
    max_samples: int = 10,
):
    """
    Prefect flow running the numerical studies:
    1. Advection greedy sampling, method table and POD comparison
    2. Burgers ROM over the base, refined and local dictionaries plus the scheme and error-bound checks
    3. Euler shock tube with both reconstruction strategies
    4. Nozzle flows with a shock and fully subsonic

    Args:
        output_dir: Root directory; each experiment writes into its own subdirectory
        seed: Seed for rank perturbations
        experiments: Subset of advection, burgers, euler, nozzle to run (default all)
        max_samples: Greedy iterations for the advection study
    """
    logger = get_run_logger()
    selected = experiments or ["advection", "burgers", "euler", "nozzle"]
    results: Dict[str, Any] = {}

    if "advection" in selected:
        root = os.path.join(output_dir, "advection")
        dictionary_path = advection_greedy(root, seed, max_samples)
        results["advection"] = {
            "methods": advection_methods(root, seed, dictionary_path),
            "pod": advection_pod(root, seed, max_samples),
        }
    if "burgers" in selected:
        root = os.path.join(output_dir, "burgers")
        results["burgers"] = {"dictionaries": burgers_dictionaries(root, seed), "verified": burgers_verify(root, seed)}
    if "euler" in selected:
        results["euler"] = euler_reconstructions(os.path.join(output_dir, "euler"), seed)
    if "nozzle" in selected:
        targets = [NozzleExperiment.target_mu, NozzleExperiment.subsonic_mu]
        results["nozzle"] = nozzle_flows(os.path.join(output_dir, "nozzle"), seed, targets)

    logger.info("Pipeline completed successfully. Results written to %s", output_dir)
    return results


if __name__ == "__main__":
    study_pipeline()
