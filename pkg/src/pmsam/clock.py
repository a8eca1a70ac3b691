"""Logical rule-firing clock and its closed-form cost model.

One maximally parallel firing of a rule costs its stage price once, however
many membranes or monkeys fire it. The sequential baseline pays the price
once per monkey.

Stage labels are ``"<phase>.<rule>"``; ledgers can be summed per phase.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from .errors import ContractViolation

# Per-step climb rules, in firing order. With the default prices one climb
# step advances the clock 3 -> 4 -> 5 -> 7 -> 8 -> 11 -> 12 -> 14 on the
# n=20, m=4 trace.
CLIMB_STEP_STAGES = (
    "climb.evolution",
    "climb.random_injection",
    "climb.objective_breakdown",
    "climb.objective",
    "climb.sign",
    "climb.update_position",
    "climb.checker",
    "climb.comparison",
)
CLIMB_CLOSE_STAGES = ("climb.optimal_solution", "climb.time_elimination")
SETUP_STAGES = ("init.division", "init.membrane_creation", "init.distribution")
MIGRATION_STAGES = ("migration.migrate", "migration.time_updating")
WATCH_STAGES = ("watch.update_position", "watch.objective_breakdown", "watch.comparison")
SOMERSAULT_STAGES = (
    "somersault.division",
    "somersault.summation",
    "somersault.pivot",
    "somersault.pivot_process",
    "somersault.alfa",
    "somersault.new_positions",
    "somersault.objective_breakdown",
    "somersault.repetition_checker",
    "somersault.feasibility_checking",
)
ITERATION_END_STAGES = (
    "termination.solution_elimination",
    "termination.comparison",
    "termination.iteration_check",
)
FINAL_STAGES = ("termination.dissolution",)

DEFAULT_OBJECTIVE_COST = 2


def _default_prices() -> dict[str, int]:
    prices = {
        stage: 1
        for group in (
            CLIMB_STEP_STAGES,
            CLIMB_CLOSE_STAGES,
            SETUP_STAGES,
            MIGRATION_STAGES,
            WATCH_STAGES,
            SOMERSAULT_STAGES,
            ITERATION_END_STAGES,
            FINAL_STAGES,
        )
        for stage in group
    }
    prices["climb.sign"] = 3
    for stage in prices:
        if stage.endswith(".objective_breakdown"):
            prices[stage] = DEFAULT_OBJECTIVE_COST
    return prices


@dataclass(frozen=True)
class TickModel:
    """Tick price of every engine stage.

    ``objective_costs`` overrides the price of the ``*.objective_breakdown``
    stages per function id: the number of rule firings the objective needs.
    """

    ticks_per_stage: Mapping[str, int] = field(default_factory=_default_prices)
    objective_costs: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        for stage, cost in {**self.ticks_per_stage, **self.objective_costs}.items():
            if int(cost) < 1:
                raise ContractViolation(f"tick price for {stage!r} must be a positive integer")

    def cost(self, stage: str, function_id: str | None = None) -> int:
        if stage not in self.ticks_per_stage:
            raise ContractViolation(f"unknown stage {stage!r}")
        if stage.endswith(".objective_breakdown") and function_id in self.objective_costs:
            return int(self.objective_costs[function_id])
        return int(self.ticks_per_stage[stage])

    def total(self, stages, function_id: str | None = None) -> int:
        return sum(self.cost(s, function_id) for s in stages)


DEFAULT_MODEL = TickModel()


@dataclass
class LogicalClock:
    """Monotone tick counter with a per-stage ledger; ``t == sum(ledger)``."""

    model: TickModel = DEFAULT_MODEL
    function_id: str | None = None
    t: int = 0
    ledger: dict[str, int] = field(default_factory=dict)

    def tick(self, stage: str, parallel_width: int = 1, repeat: int = 1) -> "LogicalClock":
        # parallel_width is validated but never priced
        if parallel_width < 1:
            raise ContractViolation("parallel width must be at least 1")
        if repeat < 0:
            raise ContractViolation("repeat count must be non-negative")
        delta = self.model.cost(stage, self.function_id) * repeat
        self.t += delta
        self.ledger[stage] = self.ledger.get(stage, 0) + delta
        return self

    def copy(self) -> "LogicalClock":
        return LogicalClock(self.model, self.function_id, self.t, dict(self.ledger))

    def phase_total(self, phase: str) -> int:
        prefix = phase + "."
        return sum(v for k, v in self.ledger.items() if k.startswith(prefix))

    def phases(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for stage, v in self.ledger.items():
            phase = stage.split(".", 1)[0]
            out[phase] = out.get(phase, 0) + v
        return out


def merge(global_clock: LogicalClock, *local_clocks: LogicalClock) -> LogicalClock:
    """Keep whichever clock is furthest ahead.

    Every local clock starts as a copy of the global one, so the winner's
    ledger already contains the global history and ``t == sum(ledger)`` holds.
    """
    best = global_clock
    for c in local_clocks:
        if c.t > best.t:
            best = c
    return best.copy()


# closed forms -------------------------------------------------------------


def migration_rounds(m: int) -> int:
    """Pairwise merge rounds needed to reduce ``m`` membranes to one."""
    if m < 1:
        raise ContractViolation("membrane count must be positive")
    return math.ceil(math.log2(m)) if m > 1 else 0


def climb_pass_ticks(params, model: TickModel = DEFAULT_MODEL, function_id=None) -> int:
    """Cost of ``climb_number`` lockstep climb steps by one membrane."""
    return params.climb_number * model.total(CLIMB_STEP_STAGES, function_id)


def pmsam_breakdown(n, m, params, model=DEFAULT_MODEL, function_id=None, iterations=None):
    """Per-phase ticks of a full PMSAM run (``iterations`` defaults to the cyclic number).

    Nothing here depends on ``n``: every phase is a parallel firing.
    """
    if not 1 <= m <= n:
        raise ContractViolation("need 1 <= m <= n")
    iterations = params.cyclic_number if iterations is None else iterations
    climb_phase = climb_pass_ticks(params, model, function_id) + model.total(
        CLIMB_CLOSE_STAGES, function_id
    )
    rounds = migration_rounds(m)
    per_iter = {
        "init": model.total(SETUP_STAGES, function_id),
        "climb": climb_phase * (1 + rounds),
        "migration": model.total(MIGRATION_STAGES, function_id) * rounds,
        "watch": model.total(WATCH_STAGES, function_id) * rounds,
        "somersault": model.total(SOMERSAULT_STAGES, function_id),
        "termination": model.total(ITERATION_END_STAGES, function_id),
    }
    out = {k: v * iterations for k, v in per_iter.items()}
    out["termination"] += model.total(FINAL_STAGES, function_id)
    return out


def pmsam_ticks(n, m, params, model=DEFAULT_MODEL, function_id=None, iterations=None, phase=None):
    parts = pmsam_breakdown(n, m, params, model, function_id, iterations)
    return parts[phase] if phase else sum(parts.values())


def ma_breakdown(n, params, model=DEFAULT_MODEL, function_id=None, iterations=None):
    """Per-phase ticks of the sequential baseline: every stage is paid once per monkey.

    One cycle is climb, watch-jump, climb, somersault.
    """
    if n < 1:
        raise ContractViolation("population size must be positive")
    iterations = params.cyclic_number if iterations is None else iterations
    per_monkey = {
        "climb": 2 * climb_pass_ticks(params, model, function_id),
        "watch": model.total(WATCH_STAGES, function_id),
        "somersault": model.total(SOMERSAULT_STAGES, function_id),
    }
    return {k: v * n * iterations for k, v in per_monkey.items()}


def ma_ticks(n, params, model=DEFAULT_MODEL, function_id=None, iterations=None, phase=None):
    parts = ma_breakdown(n, params, model, function_id, iterations)
    return parts[phase] if phase else sum(parts.values())
