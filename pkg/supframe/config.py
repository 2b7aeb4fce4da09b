import logging
import os
from typing import Literal, Optional

from pydantic import BaseModel, Field, field_validator

THREADS_ENV = "SUPFRAME_THREADS"
LOG_LEVEL_ENV = "SUPFRAME_LOG_LEVEL"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

LogLevel = Literal["DEBUG", "INFO", "WARNING", "ERROR"]


class Settings(BaseModel):
    threads: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)
    log_level: LogLevel = "WARNING"

    @field_validator("log_level", mode="before")
    @classmethod
    def upper_case_level(cls, v):
        return v.upper() if isinstance(v, str) else v

    @classmethod
    def from_env(cls, threads: Optional[int] = None, log_level: Optional[str] = None) -> "Settings":
        """Flags win over environment, environment wins over defaults."""
        values = {}
        env_threads = os.environ.get(THREADS_ENV)
        if threads is not None:
            values["threads"] = threads
        elif env_threads:
            values["threads"] = env_threads
        env_level = os.environ.get(LOG_LEVEL_ENV)
        if log_level is not None:
            values["log_level"] = log_level
        elif env_level:
            values["log_level"] = env_level
        return cls(**values)


def configure_logging(settings: Settings) -> None:
    logging.basicConfig(level=getattr(logging, settings.log_level), format=LOG_FORMAT)
