"""Runtime settings read from the environment (and an optional ``.env`` file)."""

from __future__ import annotations

import os
from functools import lru_cache
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field


class Settings(BaseModel):
    """Process-wide defaults; command-line flags override them."""

    rank_tol: Optional[float] = Field(
        default=None, ge=0, description="Relative rank tolerance; None means max(m, n) * eps"
    )
    cond_warn: float = Field(default=1e8, gt=0, description="Warn when kappa(A) exceeds this")
    log_level: str = Field(default="INFO", description="Root log level")
    log_dir: str = Field(default="logs", description="Directory for the log file")
    workers: int = Field(default=1, ge=1, description="Thread count for parameter sweeps")


def _optional_float(name: str) -> Optional[float]:
    value = os.getenv(name)
    if value is None or value.strip() == "":
        return None
    return float(value)


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Load settings once per process."""
    load_dotenv()
    return Settings(
        rank_tol=_optional_float("SPARSIFY_RANK_TOL"),
        cond_warn=float(os.getenv("SPARSIFY_COND_WARN", "1e8")),
        log_level=os.getenv("SPARSIFY_LOG_LEVEL", "INFO"),
        log_dir=os.getenv("SPARSIFY_LOG_DIR", "logs"),
        workers=int(os.getenv("SPARSIFY_WORKERS", "1")),
    )
