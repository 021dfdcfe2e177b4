"""Experiment configuration files.

A configuration is a ``KEY = value`` text file read with python-dotenv.
Keys are grouped by prefix (``HDM_``, ``DICT_``, ``GREEDY_``, ``ROM_``);
unknown keys are rejected. Command-line flags override file values and every
experiment falls back to the defaults of its study.
"""

import os
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
from dotenv import dotenv_values
from pydantic import BaseModel, ValidationError, validator

from l1rom.application.use_cases.experiments import Experiment, ExperimentKind, build_experiment, experiment_class
from l1rom.application.use_cases.rom import Reconstruction
from l1rom.config.settings import Settings, get_settings
from l1rom.domain.entities.greedy import GreedyConfig
from l1rom.domain.entities.minimize import Constraint
from l1rom.domain.entities.rom import RomConfig, RomMethod
from l1rom.domain.errors import ConfigError

PARAMETER_RANGES = {
    ExperimentKind.ADVECTION: (0.3, 0.5),
    ExperimentKind.BURGERS: (0.0, 1.0),
    ExperimentKind.EULER: (0.0, 1.0),
    ExperimentKind.NOZZLE: (1.1, 1.8),
}

_HDM_KEYS = {
    "HDM_MU": "mu",
    "HDM_N_CELLS": "n_cells",
    "HDM_K": "k",
    "HDM_CFL": "cfl",
    "HDM_T_FINAL": "t_final",
    "HDM_GAMMA": "gamma",
}
_KNOWN_KEYS = {
    "EXPERIMENT",
    "SEED",
    "OUTPUT_DIR",
    *_HDM_KEYS,
    "DICT_SAMPLES",
    "DICT_LOCAL_WINDOW",
    "DICT_FILE",
    "GREEDY_CANDIDATES",
    "GREEDY_CANDIDATE_FILE",
    "GREEDY_N_CANDIDATES",
    "GREEDY_MU0",
    "GREEDY_MAX_SAMPLES",
    "GREEDY_EPS_STOP",
    "ROM_METHOD",
    "ROM_CONSTRAINT",
    "ROM_ETA",
    "ROM_EPS_TOL",
    "ROM_PERTURB_EPS",
    "ROM_TARGET_MU",
    "ROM_COMPARE_TRUTH",
    "ROM_RECONSTRUCTION",
}
_TRUE = {"1", "true", "yes", "on"}


class HdmParameters(BaseModel):
    mu: Optional[float] = None
    n_cells: Optional[int] = None
    k: Optional[float] = None
    cfl: Optional[float] = None
    t_final: Optional[float] = None
    gamma: Optional[float] = None

    @validator("n_cells")
    def enough_cells(cls, v):
        if v is not None and v < 2:
            raise ValueError("HDM_N_CELLS must be at least 2")
        return v


class ExperimentConfig(BaseModel):
    """Everything a command needs to run one experiment"""

    experiment: ExperimentKind
    seed: int = 0
    output_dir: str = "results"
    hdm: HdmParameters = HdmParameters()
    dict_samples: Optional[List[float]] = None
    dict_file: Optional[str] = None
    candidates: Optional[List[float]] = None
    n_candidates: int = 21
    mu0: Optional[float] = None
    max_samples: int = 10
    eps_stop: float = 0.0
    rom_cfg: RomConfig = RomConfig()
    method_table: bool = False
    target_mu: Optional[float] = None
    compare_truth: bool = True
    reconstruction: Optional[Reconstruction] = None
    threads: int = 1

    @validator("candidates")
    def non_empty_candidates(cls, v):
        if v is not None and not v:
            raise ValueError("the candidate list is empty")
        return v

    @validator("dict_samples")
    def non_empty_samples(cls, v):
        if v is not None and not v:
            raise ValueError("DICT_SAMPLES is empty")
        return v

    def build_experiment(self) -> Experiment:
        parameters = self.hdm.dict(exclude={"mu"})
        if self.reconstruction is not None:
            parameters["reconstruction"] = self.reconstruction
        return build_experiment(self.experiment, **parameters)

    def hdm_mu(self, experiment: Experiment) -> float:
        return experiment.target_mu if self.hdm.mu is None else self.hdm.mu

    def rom_target(self, experiment: Experiment) -> float:
        return experiment.target_mu if self.target_mu is None else self.target_mu

    def dictionary_mus(self, experiment: Experiment) -> List[float]:
        return list(experiment.dictionary_mus) if self.dict_samples is None else list(self.dict_samples)

    def greedy_config(self, experiment: Experiment) -> GreedyConfig:
        if self.candidates is not None:
            candidates = list(self.candidates)
        elif self.experiment == ExperimentKind.ADVECTION and self.n_candidates == len(experiment.candidates):
            candidates = list(experiment.candidates)
        else:
            low, high = PARAMETER_RANGES[self.experiment]
            candidates = [float(mu) for mu in np.linspace(low, high, self.n_candidates)]
        mu0 = self.mu0
        if mu0 is None:
            mu0 = getattr(experiment, "mu0", candidates[len(candidates) // 2])
        try:
            return GreedyConfig(
                candidates=[(mu,) for mu in candidates],
                mu0=(mu0,),
                eps_stop=self.eps_stop,
                max_samples=self.max_samples,
                rom_cfg=self.rom_cfg,
                threads=self.threads,
            )
        except ValidationError as e:
            raise ConfigError(f"invalid greedy settings: {e}") from None


def _float_list(key: str, raw: str) -> List[float]:
    try:
        return [float(token) for token in raw.replace(";", ",").split(",") if token.strip()]
    except ValueError:
        raise ConfigError(f"{key} must be a comma-separated list of numbers") from None


def _read_candidate_file(path: str) -> List[float]:
    if not os.path.exists(path):
        raise ConfigError(f"candidate file {path} does not exist")
    try:
        frame = pd.read_csv(path, header=None, comment="#")
    except pd.errors.EmptyDataError:
        raise ConfigError(f"candidate file {path} is empty") from None
    values = frame.iloc[:, 0].astype(float).tolist()
    if not values:
        raise ConfigError(f"candidate file {path} is empty")
    return values


def _read_file(path: str) -> Dict[str, Optional[str]]:
    if not os.path.exists(path):
        raise ConfigError(f"config file {path} does not exist")
    values = dict(dotenv_values(path))
    unknown = sorted(set(values) - _KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    missing = [key for key, value in values.items() if value is None or value == ""]
    if missing:
        raise ConfigError(f"config keys without a value: {', '.join(missing)}")
    return values


def _rom_config(values: Dict[str, str], overrides: Dict[str, Any], settings: Settings, seed: int, experiment: ExperimentKind):
    default = experiment_class(experiment)
    method = overrides.get("method") or values.get("ROM_METHOD", default.default_method.value)
    constraint = values.get("ROM_CONSTRAINT", default.default_constraint.value)
    return RomConfig(
        method=RomMethod(method),
        constraint=Constraint(constraint),
        eta=float(values.get("ROM_ETA", settings.default_eta)),
        eps_tol=float(values.get("ROM_EPS_TOL", settings.default_eps_tol)),
        local_window=float(values["DICT_LOCAL_WINDOW"]) if "DICT_LOCAL_WINDOW" in values else None,
        perturb_eps=float(values.get("ROM_PERTURB_EPS", settings.perturb_eps)),
        seed=seed,
        max_iterations=settings.irls_max_iterations,
        lp_max_rows=settings.lp_max_rows,
        rank_tol=settings.rank_tol,
    )


def load_experiment_config(path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """
    Read a config file and apply command-line overrides

    Args:
        path: optional ``KEY = value`` file
        overrides: flag values (experiment, seed, out, method, mu, threads); None means unset

    Returns:
        Validated experiment configuration

    Raises:
        ConfigError: unknown keys, malformed values, empty candidate sets
    """
    settings = get_settings()
    overrides = {key: value for key, value in (overrides or {}).items() if value is not None}
    values = _read_file(path) if path else {}

    experiment = overrides.get("experiment") or values.get("EXPERIMENT")
    if experiment is None:
        raise ConfigError("no experiment selected; set EXPERIMENT or pass one on the command line")

    try:
        kind = ExperimentKind(experiment)
        seed = int(overrides.get("seed", values.get("SEED", settings.default_seed)))
        hdm = HdmParameters(**{name: values[key] for key, name in _HDM_KEYS.items() if key in values})
        method = overrides.get("method")
        method_table = method == "all"
        if method_table:
            overrides.pop("method")
        rom_cfg = _rom_config(values, overrides, settings, seed, kind)

        candidates = None
        if "GREEDY_CANDIDATES" in values:
            candidates = _float_list("GREEDY_CANDIDATES", values["GREEDY_CANDIDATES"])
            if not candidates:
                raise ConfigError("GREEDY_CANDIDATES is empty")
        elif "GREEDY_CANDIDATE_FILE" in values:
            candidates = _read_candidate_file(values["GREEDY_CANDIDATE_FILE"])

        target = overrides.get("mu", values.get("ROM_TARGET_MU"))
        if "mu" in overrides:
            hdm = hdm.copy(update={"mu": float(overrides["mu"])})

        return ExperimentConfig(
            experiment=kind,
            seed=seed,
            output_dir=overrides.get("out", values.get("OUTPUT_DIR", settings.output_dir)),
            hdm=hdm,
            dict_samples=_float_list("DICT_SAMPLES", values["DICT_SAMPLES"]) if "DICT_SAMPLES" in values else None,
            dict_file=values.get("DICT_FILE"),
            candidates=candidates,
            n_candidates=int(values.get("GREEDY_N_CANDIDATES", 21)),
            mu0=float(values["GREEDY_MU0"]) if "GREEDY_MU0" in values else None,
            max_samples=int(values.get("GREEDY_MAX_SAMPLES", 10)),
            eps_stop=float(values.get("GREEDY_EPS_STOP", 0.0)),
            rom_cfg=rom_cfg,
            method_table=method_table,
            target_mu=None if target is None else float(target),
            compare_truth=str(values.get("ROM_COMPARE_TRUTH", "true")).lower() in _TRUE,
            reconstruction=Reconstruction(values["ROM_RECONSTRUCTION"]) if "ROM_RECONSTRUCTION" in values else None,
            threads=int(overrides.get("threads", settings.threads)),
        )
    except ValidationError as e:
        raise ConfigError(str(e)) from None
    except ValueError as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(str(e)) from None
