import logging
import os
from typing import Literal, Optional

import msgspec
from dotenv import load_dotenv

from core.catalog import SUITES
from core.errors import ConfigError

load_dotenv()

logger = logging.getLogger(__name__)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _int_env(name, default, minimum=1):
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{name}={raw!r} is not an integer")
    if value < minimum:
        raise ConfigError(f"{name}={value} must be at least {minimum}")
    return value


class Settings(msgspec.Struct, frozen=True):
    order: Optional[int] = None
    parallel: int = 4
    table_max: int = 100
    log_level: str = "WARNING"
    assets: Optional[str] = None

    @classmethod
    def from_env(cls) -> "Settings":
        log_level = (os.getenv("RANKFORGE_LOG_LEVEL") or "WARNING").upper()
        if log_level not in LOG_LEVELS:
            raise ConfigError(f"RANKFORGE_LOG_LEVEL={log_level!r} is not a logging level")
        assets = os.getenv("RANKFORGE_ASSETS") or None
        if assets is not None and not os.path.isdir(assets):
            raise ConfigError(f"RANKFORGE_ASSETS={assets!r} is not a directory")
        return cls(
            order=_int_env("RANKFORGE_ORDER", None),
            parallel=_int_env("RANKFORGE_PARALLEL", 4),
            table_max=_int_env("RANKFORGE_TABLE_MAX", 100, minimum=0),
            log_level=log_level,
            assets=assets,
        )


class RunConfig(msgspec.Struct):
    suite: str = "all"
    order: Optional[int] = None
    chi: Optional[Literal["a", "b"]] = None
    odd_sign: Optional[Literal["plus", "minus"]] = None
    format: Literal["text", "json"] = "text"
    parallel: int = 4
    output: Optional[str] = None

    def validate(self) -> "RunConfig":
        if self.suite != "all" and self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}, expected all or one of {', '.join(SUITES)}")
        if self.order is not None and self.order < 1:
            raise ConfigError(f"order must be positive, got {self.order}")
        if self.parallel < 1:
            raise ConfigError(f"parallel must be positive, got {self.parallel}")
        if (self.chi is None) != (self.odd_sign is None):
            raise ConfigError("--chi and --odd-sign must be given together")
        return self
