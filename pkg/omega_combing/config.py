"""Run configuration for omega-combing experiments."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
from dataclasses import dataclass
from typing import Any

import voluptuous as vol

from .const import (
    CONF_CALIBRATION,
    CONF_OUT,
    CONF_P,
    CONF_PAIR_ATTEMPTS,
    CONF_RADIUS,
    CONF_SEED,
    CONF_STEP,
    CONF_WORKERS,
    DEFAULT_CALIBRATION,
    DEFAULT_OUT,
    DEFAULT_P,
    DEFAULT_PAIR_ATTEMPTS,
    DEFAULT_RADIUS,
    DEFAULT_SEED,
    DEFAULT_STEP,
    DEFAULT_WORKERS,
)
from .omega_model import ModelParams
from .psl2_group import is_prime

_LOGGER = logging.getLogger(__name__)


def _prime(value: Any) -> int:
    value = int(value)
    if not is_prime(value):
        raise vol.Invalid(f"{value} is not prime")
    return value


def _above_one(value: float) -> float:
    if not value > 1:
        raise vol.Invalid(f"calibration must exceed 1, got {value}")
    return value


def _positive(value: float) -> float:
    if not value > 0:
        raise vol.Invalid(f"must be positive, got {value}")
    return value


RUN_CONFIG_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_P, default=DEFAULT_P): _prime,
        vol.Optional(CONF_CALIBRATION, default=DEFAULT_CALIBRATION): vol.All(vol.Coerce(float), _above_one),
        vol.Optional(CONF_RADIUS, default=DEFAULT_RADIUS): vol.All(vol.Coerce(int), vol.Range(min=0)),
        vol.Optional(CONF_STEP, default=DEFAULT_STEP): vol.All(vol.Coerce(float), _positive),
        vol.Optional(CONF_SEED, default=DEFAULT_SEED): vol.Coerce(int),
        vol.Optional(CONF_OUT, default=DEFAULT_OUT): str,
        vol.Optional(CONF_WORKERS, default=DEFAULT_WORKERS): vol.All(vol.Coerce(int), vol.Range(min=1)),
        vol.Optional(CONF_PAIR_ATTEMPTS, default=DEFAULT_PAIR_ATTEMPTS): vol.All(vol.Coerce(int), vol.Range(min=1)),
    }
)


@dataclass(frozen=True)
class RunConfig:
    """Validated settings shared by every subcommand."""

    p: int = DEFAULT_P
    calibration: float = DEFAULT_CALIBRATION
    radius: int = DEFAULT_RADIUS
    step: float = DEFAULT_STEP
    seed: int = DEFAULT_SEED
    out: str = DEFAULT_OUT
    workers: int = DEFAULT_WORKERS
    pair_attempts: int = DEFAULT_PAIR_ATTEMPTS

    @classmethod
    def from_mapping(cls, data: dict[str, Any]) -> RunConfig:
        """Validate ``data`` against :data:`RUN_CONFIG_SCHEMA`.

        Raises ``vol.Invalid`` naming the offending key.
        """
        try:
            validated = RUN_CONFIG_SCHEMA(dict(data))
        except vol.MultipleInvalid as err:
            first = err.errors[0]
            key = ".".join(str(part) for part in first.path) or "config"
            raise vol.Invalid(f"{key}: {first.msg}", path=first.path) from err
        return cls(**validated)

    @property
    def params(self) -> ModelParams:
        return ModelParams(self.p, self.calibration)

    def as_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    def config_hash(self) -> str:
        """First 16 hex digits of the SHA-256 of the sorted-key JSON.

        ``out`` and ``workers`` do not enter the hash.
        """
        data = {k: v for k, v in self.as_dict().items() if k not in (CONF_OUT, CONF_WORKERS)}
        text = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()[:16]
