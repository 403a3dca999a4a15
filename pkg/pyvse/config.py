import os
from typing import Optional

from loguru import logger
from pydantic import BaseModel, Field

DEFAULT_MAX_STATES = 3**14
# seconds for the unrestricted basis before the transcribed one is used
DEFAULT_GB_TIME_BUDGET = 30.0


def default_cache_dir() -> str:
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(
        os.path.expanduser("~"), ".cache"
    )
    return os.path.join(base, "pyvse")


class Settings(BaseModel):
    cache_dir: Optional[str] = Field(default_factory=default_cache_dir)
    max_states: int = Field(default=DEFAULT_MAX_STATES, gt=0)
    oracle_max_crossings: int = Field(default=16, ge=0)
    # seconds; None runs Buchberger to completion
    gb_time_budget: Optional[float] = Field(default=DEFAULT_GB_TIME_BUDGET, ge=0)
    level_time_budget: Optional[float] = Field(default=None, ge=0)
    workers: int = Field(default=1, ge=1)

    @classmethod
    def from_env(cls, **overrides) -> "Settings":
        values: dict = {}
        if os.environ.get("VSE_GB_CACHE"):
            values["cache_dir"] = os.environ["VSE_GB_CACHE"]
        if os.environ.get("VSE_MAX_STATES"):
            values["max_states"] = int(os.environ["VSE_MAX_STATES"])
        if os.environ.get("VSE_WORKERS"):
            values["workers"] = int(os.environ["VSE_WORKERS"])
        if os.environ.get("VSE_GB_TIME_BUDGET"):
            values["gb_time_budget"] = float(os.environ["VSE_GB_TIME_BUDGET"])
        if os.environ.get("VSE_LEVEL_TIME_BUDGET"):
            values["level_time_budget"] = float(os.environ["VSE_LEVEL_TIME_BUDGET"])
        values.update({key: value for key, value in overrides.items() if value is not None})
        settings = cls(**values)
        logger.debug(f"Settings: {settings}")
        return settings
