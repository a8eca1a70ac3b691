from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class RunReport:
    """Outcome of one optimisation run.

    ``trace`` holds ``(iteration, best_value)`` after each completed outer
    iteration; the initial population is not a trace point.
    """

    function_id: str
    algorithm: str
    seed: int
    best_value: float
    best_position: np.ndarray
    iterations_used: int
    ticks: int
    wall_seconds: float = 0.0
    trace: list[tuple[int, float]] = field(default_factory=list)
    ledger: dict[str, int] = field(default_factory=dict)
    stop_reason: str = ""
