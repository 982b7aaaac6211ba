"""
Simulation configuration.

All settings live in one validated :class:`SimConfig` tree. Values are
layered defaults < scenario ``set`` lines < CLI flags via
:func:`apply_overrides`, which takes dotted keys (``"network.loss_rate"``) and
re-validates the whole tree.
"""

from __future__ import annotations

# =============================================================================
# METADATA
# =============================================================================
__author__ = "Yeremia Gunawan Adhisantoso"
__email__ = "adhisant@tnt.uni-hannover.de"
__license__ = "Clear BSD"

# =============================================================================
# STANDARD LIBRARY IMPORTS
# =============================================================================
import datetime as dt
from collections.abc import Mapping
from typing import Annotated, Any

# =============================================================================
# THIRD-PARTY IMPORTS
# =============================================================================
from loguru import logger
from pydantic import (
    Field,
    NonNegativeInt,
    PositiveFloat,
    PositiveInt,
    ValidationError,
    field_validator,
    model_validator,
)

# =============================================================================
# LOCAL IMPORTS
# =============================================================================
from .at_codec import MAX_SLOT_INDEX, PhoneNumber
from .errors import ConfigError
from .models import SimBaseModel
from .timing import DEFAULT_EPOCH, US_PER_S

# =============================================================================
# CONSTANTS
# =============================================================================
MAX_SMS_DELAY_US = 3 * US_PER_S
MAX_RESPONSE_LATENCY_US = 500


class NetworkConfig(SimBaseModel):
    """Cellular delivery delay bounds and loss probability."""

    delay_min_us: NonNegativeInt = 1_000_000
    delay_max_us: NonNegativeInt = 2_500_000
    loss_rate: Annotated[float, Field(ge=0.0, le=1.0)] = 0.0

    @field_validator("delay_max_us")
    @classmethod
    def _clamp_delay_max(cls, value: int) -> int:
        if value > MAX_SMS_DELAY_US:
            logger.warning(
                "SMS delay bound {}us clamped to {}us", value, MAX_SMS_DELAY_US
            )
            return MAX_SMS_DELAY_US
        return value

    @model_validator(mode="after")
    def _check_bounds(self) -> NetworkConfig:
        if self.delay_min_us > self.delay_max_us:
            raise ValueError(
                f"delay_min_us ({self.delay_min_us}) exceeds "
                f"delay_max_us ({self.delay_max_us})"
            )
        return self


class ModemConfig(SimBaseModel):
    capacity: Annotated[int, Field(ge=1, le=MAX_SLOT_INDEX)] = 10
    response_latency_us: Annotated[int, Field(ge=0, le=MAX_RESPONSE_LATENCY_US)] = 300
    home_number: PhoneNumber = "+60100000000"
    baud: PositiveFloat = 9600.0


class ControllerConfig(SimBaseModel):
    fosc_hz: PositiveInt = 20_000_000
    spbrg: Annotated[int, Field(ge=0, le=255)] = 32
    response_timeout_us: PositiveInt = 1_000_000
    #? None means every sender is authorised.
    whitelist: frozenset[PhoneNumber] | None = None
    #? Extra command-table entries, KEY -> action text ("load 1 on").
    extra_commands: dict[str, str] = Field(default_factory=dict)


class SimConfig(SimBaseModel):
    """Complete, validated configuration of one simulated run."""

    seed: int = 0
    settle_us: NonNegativeInt = 10 * US_PER_S
    epoch: dt.datetime = DEFAULT_EPOCH
    network: NetworkConfig = Field(default_factory=NetworkConfig)
    modem: ModemConfig = Field(default_factory=ModemConfig)
    controller: ControllerConfig = Field(default_factory=ControllerConfig)


def apply_overrides(config: SimConfig, overrides: Mapping[str, Any]) -> SimConfig:
    """Return a re-validated copy of ``config`` with dotted-key overrides.

    Parameters
    ----------
    config : SimConfig
        Base configuration.
    overrides : Mapping[str, Any]
        Keys such as ``"seed"`` or ``"network.loss_rate"``; ``None`` values
        are skipped so unset CLI flags can be passed straight through.

    Raises
    ------
    ConfigError
        If a key is unknown or the merged tree fails validation.

    Examples
    --------
    >>> apply_overrides(SimConfig(), {"network.loss_rate": 0.5}).network.loss_rate
    0.5
    """
    data = config.model_dump()
    for key, value in overrides.items():
        if value is None:
            continue
        node = data
        *parents, leaf = key.split(".")
        for part in parents:
            child = node.get(part)
            if not isinstance(child, dict):
                raise ConfigError(f"unknown configuration key {key!r}")
            node = child
        if leaf not in node:
            raise ConfigError(f"unknown configuration key {key!r}")
        node[leaf] = value
    try:
        return SimConfig.model_validate(data)
    except ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}"
            for err in exc.errors()
        )
        raise ConfigError(f"invalid configuration: {problems}") from None


__all__ = [
    "NetworkConfig",
    "ModemConfig",
    "ControllerConfig",
    "SimConfig",
    "apply_overrides",
    "MAX_SMS_DELAY_US",
]
