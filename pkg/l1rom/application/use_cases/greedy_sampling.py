import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Tuple

import numpy as np

from l1rom.application.use_cases.experiments import Experiment
from l1rom.domain.entities.dictionary import Dictionary
from l1rom.domain.entities.greedy import GreedyConfig, GreedyHistory
from l1rom.domain.entities.grid import Trajectory
from l1rom.domain.entities.rom import RomConfig
from l1rom.domain.errors import GreedyAbortedError, L1RomError

logger = logging.getLogger(__name__)


def error_indicator(d: Dictionary, mu: float, rom_cfg: RomConfig, experiment: Experiment) -> float:
    """Cumulated L1 residual of the ROM trajectory of mu"""
    return experiment.rom(d, mu, rom_cfg).cumulative_residual


class GreedySamplingUseCase:
    """Grow a dictionary by repeatedly adding the candidate with the largest indicator"""

    def __init__(self, experiment: Experiment, compute_errors: bool = False):
        self.experiment = experiment
        self.compute_errors = compute_errors
        self._truth: Dict[float, Trajectory] = {}

    @property
    def truth(self) -> Dict[float, Trajectory]:
        """HDM trajectories solved so far, keyed by parameter"""
        return self._truth

    def _hdm(self, mu: float) -> Trajectory:
        if mu not in self._truth:
            self._truth[mu] = self.experiment.solve_hdm(mu)
        return self._truth[mu]

    def _evaluate(self, d: Dictionary, mu: float, cfg: GreedyConfig) -> Tuple[float, Optional[float]]:
        rom = self.experiment.rom(d, mu, cfg.rom_cfg)
        error = None
        if self.compute_errors:
            error = self.experiment.relative_error(rom, self._hdm(mu))
        return rom.cumulative_residual, error

    def _evaluate_all(self, d: Dictionary, cfg: GreedyConfig, mus: List[float]):
        if cfg.threads > 1:
            with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
                return list(pool.map(lambda mu: self._evaluate(d, mu, cfg), mus))
        return [self._evaluate(d, mu, cfg) for mu in mus]

    def execute(self, cfg: GreedyConfig) -> Tuple[Dictionary, GreedyHistory]:
        """
        Run greedy sampling over the candidate set

        Args:
            cfg: candidates, seed parameter, stopping rule and ROM settings

        Returns:
            The final dictionary and the per-iteration history

        Raises:
            GreedyAbortedError: an HDM solve failed; carries the partial results
        """
        mus = [float(c[0]) for c in cfg.candidates]
        history = GreedyHistory(candidates=list(cfg.candidates))
        d = None
        if self.compute_errors:
            # truth of every candidate is needed anyway, solve it once up front
            for mu in mus:
                self._try_hdm(mu, d, history)

        d = Dictionary(entries=[self._try_hdm(float(cfg.mu0[0]), d, history)], seed=cfg.rom_cfg.seed)
        history.selected.append(tuple(cfg.mu0))
        selected = {cfg.candidate_index(cfg.mu0)}

        while True:
            results = self._evaluate_all(d, cfg, mus)
            indicators = [indicator for indicator, _ in results]
            history.indicator_tables.append(indicators)
            history.indicator_max.append(max(indicators))
            if self.compute_errors:
                errors = [error for _, error in results]
                history.error_tables.append(errors)
                history.error_max.append(max(errors))
                history.error_mean.append(float(np.mean(errors)))
            logger.info(
                "greedy iteration %d: %d members, max indicator %.4e",
                history.iterations,
                len(d),
                history.indicator_max[-1],
            )

            remaining = [i for i in range(len(mus)) if i not in selected]
            if not remaining or len(d) - 1 >= cfg.max_samples:
                break
            # argmax over unselected candidates, lowest index on ties
            best = max(remaining, key=lambda i: (indicators[i], -i))
            if indicators[best] <= cfg.eps_stop:
                break
            d = d.with_entry(self._try_hdm(mus[best], d, history))
            selected.add(best)
            history.selected.append(tuple(cfg.candidates[best]))

        logger.info("greedy sampling selected %s", [mu[0] for mu in history.selected])
        return d, history

    def _try_hdm(self, mu: float, d: Optional[Dictionary], history: GreedyHistory) -> Trajectory:
        try:
            return self._hdm(mu)
        except L1RomError as e:
            logger.error("HDM solve failed at mu=%s: %s", mu, e)
            raise GreedyAbortedError(f"HDM solve failed at mu={mu}: {e}", dictionary=d, history=history) from e


def greedy_sample(
    cfg: GreedyConfig, experiment: Experiment, compute_errors: bool = False
) -> Tuple[Dictionary, GreedyHistory]:
    return GreedySamplingUseCase(experiment, compute_errors).execute(cfg)
