import os
import logging
from functools import lru_cache
from typing import List, Literal, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

load_dotenv()


class Settings(BaseModel):
    """Process-wide knobs read from the environment (.env supported)"""

    threads: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)
    diagnostic_tol: float = Field(default=1e-6, gt=0)
    overflow: float = Field(default=1e280, gt=0)
    log_level: str = "INFO"

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        value = value.upper()
        if not isinstance(logging.getLevelName(value), int):
            raise ValueError(f"unknown log level {value!r}")
        return value

    @classmethod
    def from_env(cls) -> "Settings":
        raw = {
            "threads": os.getenv("CDKLAB_THREADS"),
            "diagnostic_tol": os.getenv("CDKLAB_DIAGNOSTIC_TOL"),
            "overflow": os.getenv("CDKLAB_OVERFLOW"),
            "log_level": os.getenv("CDKLAB_LOG_LEVEL"),
        }
        return cls(**{k: v for k, v in raw.items() if v not in (None, "")})


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings.from_env()


def configure_logging(level: str = None) -> None:
    """Send lab logs to stderr; stdout is reserved for tables"""
    logging.basicConfig(
        level=level or get_settings().log_level,
        format="%(levelname)s %(name)s: %(message)s",
    )


class ExperimentConfig(BaseModel):
    """One CLI run: which model, which grids, where the table goes"""

    command: str
    model: Optional[str] = None
    n: List[int] = Field(default_factory=lambda: [1000])
    x: List[float] = Field(default_factory=lambda: [0.0])
    u: List[float] = Field(default_factory=lambda: [0.0])
    v: List[float] = Field(default_factory=lambda: [0.0])
    output: Optional[str] = None
    format: Literal["csv", "json"] = "csv"
    seed: int = 0

    @field_validator("x", "u", "v")
    @classmethod
    def _non_empty(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("grids must be non-empty")
        return value

    @field_validator("n")
    @classmethod
    def _increasing(cls, value: List[int]) -> List[int]:
        if not value:
            raise ValueError("n list must be non-empty")
        if value[0] <= 0 or any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError(f"n values must be positive and increasing, got {value}")
        return value
