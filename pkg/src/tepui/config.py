"""Run configuration: tolerances, seeds, bounds.  TEPUI_SEED and
TEPUI_THREADS are read from the environment."""

from __future__ import annotations

import os
from dataclasses import dataclass, field


def env_seed() -> int:
    try:
        return int(os.environ.get("TEPUI_SEED", "0"))
    except ValueError:
        return 0


def env_threads() -> int:
    try:
        n = int(os.environ.get("TEPUI_THREADS", "1"))
    except ValueError:
        return 1
    return max(1, n)


@dataclass
class Config:
    seed: int = field(default_factory=env_seed)
    threads: int = field(default_factory=env_threads)
    float_tol: float = 1e-9
    rk4_step: float = 1e-3
    residual_tol: float = 1e-5
    dedup_tol: float = 1e-6
    degree_bound: int = 2
    invisible_samples: int = 500
    partition_samples: int = 1000


DEFAULTS = Config()
