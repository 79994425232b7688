"""Experiment coordinator: runs trials in a worker pool and collects rows."""

from __future__ import annotations

import asyncio
import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .config import RunConfig
from .const import DEFAULT_TRIAL_RETRIES
from .exceptions import InvalidTargetError, PairGenerationError, TrialFailed

_LOGGER = logging.getLogger(__name__)

# Errors that depend on the random draw; anything else fails the trial at once.
RETRYABLE_ERRORS = (PairGenerationError, InvalidTargetError)


@dataclass(frozen=True)
class Trial:
    """One unit of work: ``fn(rng, *args)``."""

    trial_id: int
    fn: Callable[..., Any]
    args: tuple = field(default=())


@dataclass(frozen=True)
class TrialResult:
    trial_id: int
    value: Any
    attempts: int


class ExperimentCoordinator:
    """Run independent trials concurrently with per-trial seeds.

    Trial ``i`` draws from ``SeedSequence(seed).spawn(n)[i]``, so results
    depend on the seed and the trial order only.
    """

    def __init__(self, config: RunConfig, retries: int = DEFAULT_TRIAL_RETRIES) -> None:
        self._config = config
        self._retries = retries

    @property
    def config(self) -> RunConfig:
        return self._config

    # ------------------------------------------------------------------
    # Trial execution (runs in executor)
    # ------------------------------------------------------------------

    def _run_trial(self, trial: Trial, seed: np.random.SeedSequence) -> TrialResult:
        """Run one trial, retrying random-input failures with child seeds (blocking)."""
        last_err: Exception | None = None
        for attempt in range(1, self._retries + 2):
            rng = np.random.default_rng(seed if attempt == 1 else seed.spawn(1)[0])
            try:
                return TrialResult(trial.trial_id, trial.fn(rng, *trial.args), attempt)
            except RETRYABLE_ERRORS as err:
                last_err = err
                _LOGGER.debug(
                    "Trial %d attempt %d/%d failed: %s",
                    trial.trial_id,
                    attempt,
                    self._retries + 1,
                    err,
                )
            except Exception as err:
                raise TrialFailed(f"trial {trial.trial_id} failed: {err}") from err
        raise TrialFailed(f"trial {trial.trial_id} gave up after {self._retries + 1} attempts") from last_err

    # ------------------------------------------------------------------
    # Coordinator interface
    # ------------------------------------------------------------------

    async def async_run(self, trials: Sequence[Trial]) -> list[TrialResult]:
        """Run every trial in a thread pool and return results sorted by id."""
        loop = asyncio.get_running_loop()
        seeds = np.random.SeedSequence(self._config.seed).spawn(len(trials))
        with ThreadPoolExecutor(max_workers=self._config.workers) as pool:
            results = await asyncio.gather(
                *(loop.run_in_executor(pool, self._run_trial, trial, seed) for trial, seed in zip(trials, seeds))
            )
        retried = sum(1 for r in results if r.attempts > 1)
        if retried:
            _LOGGER.info("%d of %d trials needed a retry", retried, len(results))
        return sorted(results, key=lambda r: r.trial_id)


def run_trials(config: RunConfig, trials: Sequence[Trial], retries: int = DEFAULT_TRIAL_RETRIES) -> list[TrialResult]:
    """Synchronous wrapper around :meth:`ExperimentCoordinator.async_run`."""
    return asyncio.run(ExperimentCoordinator(config, retries).async_run(trials))
