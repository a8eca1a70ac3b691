"""Membrane-parallel Monkey Algorithm.

A global region owns the population, the best-so-far solution and the global
clock. Each outer iteration it creates ``m`` local membranes, deals the
monkeys out to them, lets every membrane climb concurrently, then merges
membranes pairwise (keeping the better local optimum) with a watch-jump and a
climb after every merge round, until one membrane is left. That membrane
somersaults and dissolves back into the global region.
"""
from __future__ import annotations

import enum
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import clock as clk
from .errors import ConfigurationError, ContractViolation
from .monkey import (
    MaParams,
    MonkeyState,
    best_index,
    climb_population,
    random_positions,
    somersault_population,
    watch_jump_population,
)
from .objective import ObjectiveDescriptor, evaluate_batch
from .report import RunReport
from .streams import check_seed, membrane_stream, root_stream

FEASIBLE_TOLERANCE = 1e-9


class Charge(str, enum.Enum):
    POSITIVE = "+"
    NEGATIVE = "-"
    NEUTRAL = "0"


class Decision(str, enum.Enum):
    CONTINUE = "continue"
    STOP_TIME = "stop_time"
    STOP_ITERATIONS = "stop_iterations"
    STOP_FEASIBLE = "stop_feasible"


@dataclass(frozen=True)
class PmsamConfig:
    ma: MaParams = field(default_factory=MaParams)
    membranes: int = 10
    t_max: int = 10**12
    target_value: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.membranes < 1:
            raise ConfigurationError("number of membranes must be positive", key="m")
        if self.membranes > self.ma.n:
            raise ConfigurationError(
                f"m={self.membranes} exceeds n={self.ma.n}: every membrane needs a monkey",
                key="m",
            )
        if self.t_max < 0:
            raise ConfigurationError("t_max must be non-negative", key="t_max")
        check_seed(self.seed)

    def with_seed(self, seed: int) -> "PmsamConfig":
        return replace(self, seed=seed)


@dataclass
class Membrane:
    """A local search space.

    ``ids`` index into the global population. ``record`` is the best monkey
    the membrane has produced so far (its local optimum object); it can be
    better than every current monkey once a somersault has moved them.
    """

    label: int
    stream: np.random.Generator
    clock: clk.LogicalClock
    ids: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=int))
    positions: np.ndarray | None = None
    values: np.ndarray | None = None
    record: MonkeyState | None = None
    charge: Charge = Charge.NEUTRAL

    @property
    def size(self) -> int:
        return int(self.ids.size)

    @property
    def monkeys(self) -> list[MonkeyState]:
        if self.positions is None:
            return []
        return [MonkeyState(p.copy(), float(v)) for p, v in zip(self.positions, self.values)]

    def local_best(self, desc: ObjectiveDescriptor) -> MonkeyState:
        if self.size == 0:
            raise ContractViolation(f"membrane {self.label} holds no monkeys")
        i = best_index(self.values, desc)
        return MonkeyState(self.positions[i].copy(), float(self.values[i]))

    def update_record(self, desc: ObjectiveDescriptor) -> None:
        cand = self.local_best(desc)
        s = desc.sense.sign
        if self.record is None or s * cand.value > s * self.record.value:
            self.record = cand


@dataclass
class GlobalRegion:
    config: PmsamConfig
    desc: ObjectiveDescriptor
    positions: np.ndarray
    values: np.ndarray
    global_best: MonkeyState
    clock: clk.LogicalClock
    iteration: int = 0
    threshold: int | None = None
    membranes: list[Membrane] = field(default_factory=list)


@dataclass
class TraceEvent:
    phase: str
    t: int
    membranes: int
    iteration: int


def _log(log, region: GlobalRegion, phase: str, membranes: int) -> None:
    if log is not None:
        log.append(TraceEvent(phase, region.clock.t, membranes, region.iteration))


def initialize(config: PmsamConfig, desc: ObjectiveDescriptor,
               model: clk.TickModel = clk.DEFAULT_MODEL) -> GlobalRegion:
    """Random initial population in the global region, clock at t=0."""
    if desc.dimension != config.ma.d:
        desc = desc.with_dimension(config.ma.d)
    rng = root_stream(config.seed)
    pos = random_positions(desc, config.ma.n, rng)
    vals = evaluate_batch(desc, pos)
    b = best_index(vals, desc)
    return GlobalRegion(
        config=config,
        desc=desc,
        positions=pos,
        values=vals,
        global_best=MonkeyState(pos[b].copy(), float(vals[b])),
        clock=clk.LogicalClock(model, desc.id),
    )


def compute_threshold(n: int, m: int, clock: clk.LogicalClock | None = None) -> int:
    """Monkeys per local membrane, floor(n / m)."""
    if not 1 <= m <= n:
        raise ConfigurationError(f"need 1 <= m <= n, got n={n}, m={m}", key="m")
    if clock is not None:
        clock.tick("init.division")
    return n // m


def create_membranes(region: GlobalRegion) -> list[Membrane]:
    if region.membranes:
        raise ContractViolation("local membranes already exist")
    cfg = region.config
    region.clock.tick("init.membrane_creation")
    region.membranes = [
        Membrane(
            label=label,
            stream=membrane_stream(cfg.seed, region.iteration, label),
            clock=region.clock.copy(),
        )
        for label in range(1, cfg.membranes + 1)
    ]
    return region.membranes


def distribute(region: GlobalRegion, membranes: list[Membrane]) -> list[Membrane]:
    """Deal monkeys out in index order, ``threshold`` per membrane; the last
    membrane also takes the remainder."""
    if any(mem.size for mem in membranes):
        raise ContractViolation("membranes must be empty before distribution")
    n = region.positions.shape[0]
    th = region.threshold if region.threshold is not None else n // len(membranes)
    region.clock.tick("init.distribution")
    for k, mem in enumerate(membranes):
        stop = n if k == len(membranes) - 1 else (k + 1) * th
        ids = np.arange(k * th, stop)
        mem.ids = ids
        mem.positions = region.positions[ids].copy()
        mem.values = region.values[ids].copy()
        mem.record = None
        mem.update_record(region.desc)
        mem.clock = region.clock.copy()
    return membranes


def _charge_climb(clock: clk.LogicalClock, params: MaParams) -> None:
    # membranes climb in lockstep: the full climb number is paid even when
    # every monkey stopped early
    for stage in clk.CLIMB_STEP_STAGES:
        clock.tick(stage, repeat=params.climb_number)
    for stage in clk.CLIMB_CLOSE_STAGES:
        clock.tick(stage)


def _climb_one(mem: Membrane, desc, params: MaParams) -> Membrane:
    mem.positions, mem.values = climb_population(desc, mem.positions, mem.values, params,
                                                 mem.stream)
    mem.update_record(desc)
    _charge_climb(mem.clock, params)
    return mem


def _map(fn, membranes, workers: int):
    if workers > 1 and len(membranes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, membranes))
    return [fn(mem) for mem in membranes]


def parallel_climb(membranes, desc, params: MaParams, workers: int = 1) -> list[Membrane]:
    """Climb every monkey of every membrane; membranes run independently.

    Each membrane advances only its own clock, by the cost of one climb phase.
    """
    for mem in membranes:
        if mem.size == 0:
            raise ContractViolation(f"membrane {mem.label} is empty")
    return _map(lambda mem: _climb_one(mem, desc, params), membranes, workers)


def barrier(region: GlobalRegion, membranes) -> None:
    """Reconcile local clocks into the global clock after a parallel phase."""
    region.clock = clk.merge(region.clock, *(mem.clock for mem in membranes))


def time_update(region: GlobalRegion, membranes) -> None:
    region.clock.tick("migration.time_updating")
    for mem in membranes:
        mem.clock = region.clock.copy()


def migrate(membranes, desc: ObjectiveDescriptor,
            clock: clk.LogicalClock | None = None) -> list[Membrane]:
    """Merge consecutive label pairs into the member with the better local optimum.

    Ties go to the lower label; an odd membrane out passes through unmerged.
    """
    if len(membranes) < 2:
        raise ContractViolation("migration needs at least two membranes")
    ordered = sorted(membranes, key=lambda mem: mem.label)
    s = desc.sense.sign
    out = []
    for k in range(0, len(ordered) - 1, 2):
        lo, hi = ordered[k], ordered[k + 1]
        lo_best, hi_best = lo.local_best(desc).value, hi.local_best(desc).value
        survivor = hi if s * hi_best > s * lo_best else lo
        survivor.ids = np.concatenate([lo.ids, hi.ids])
        survivor.positions = np.concatenate([lo.positions, hi.positions])
        survivor.values = np.concatenate([lo.values, hi.values])
        records = [r for r in (lo.record, hi.record) if r is not None]
        survivor.record = None
        for r in records:
            if survivor.record is None or s * r.value > s * survivor.record.value:
                survivor.record = r
        out.append(survivor)
    if len(ordered) % 2:
        out.append(ordered[-1])
    if clock is not None:
        clock.tick("migration.migrate")
    return out


def watch_jump_round(membrane: Membrane, desc, params: MaParams) -> Membrane:
    membrane.positions, membrane.values = watch_jump_population(
        desc, membrane.positions, membrane.values, params, membrane.stream)
    membrane.update_record(desc)
    for stage in clk.WATCH_STAGES:
        membrane.clock.tick(stage, parallel_width=max(membrane.size, 1))
    return membrane


def somersault_final(membranes, desc, params: MaParams, alpha=None) -> Membrane:
    """Somersault the whole population once a single membrane remains."""
    if isinstance(membranes, Membrane):
        membranes = [membranes]
    if len(membranes) != 1:
        raise ContractViolation(
            f"somersault needs exactly one live membrane, found {len(membranes)}")
    mem = membranes[0]
    mem.positions, mem.values = somersault_population(
        desc, mem.positions, mem.values, params, mem.stream, alpha=alpha)
    mem.update_record(desc)
    for stage in clk.SOMERSAULT_STAGES:
        mem.clock.tick(stage, parallel_width=max(mem.size, 1))
    return mem


def eliminate_to_global(membrane: Membrane, region: GlobalRegion) -> GlobalRegion:
    """Dissolve the last membrane: monkeys, optimum and clock pass to the global region."""
    live = region.membranes
    if live and (len(live) != 1 or live[0] is not membrane):
        raise ContractViolation("elimination expects the single live membrane")
    region.positions[membrane.ids] = membrane.positions
    region.values[membrane.ids] = membrane.values
    region.clock = clk.merge(region.clock, membrane.clock)
    region.clock.tick("termination.solution_elimination")
    incoming = membrane.record or membrane.local_best(region.desc)
    s = region.desc.sense.sign
    region.clock.tick("termination.comparison")
    if s * incoming.value > s * region.global_best.value:
        region.global_best = MonkeyState(incoming.position.copy(), float(incoming.value))
    region.membranes = []
    return region


def _reached(region: GlobalRegion) -> bool:
    target = region.config.target_value
    if target is None:
        return False
    s = region.desc.sense.sign
    return s * region.global_best.value >= s * target - FEASIBLE_TOLERANCE


def check_termination(region: GlobalRegion) -> Decision:
    """Stopping criteria, checked in order: time, feasible solution, iterations.

    On ``CONTINUE`` the iteration counter is advanced.
    """
    cfg = region.config
    if region.clock.t >= cfg.t_max:
        return Decision.STOP_TIME
    if _reached(region):
        return Decision.STOP_FEASIBLE
    if region.iteration >= cfg.ma.cyclic_number:
        return Decision.STOP_ITERATIONS
    region.iteration += 1
    return Decision.CONTINUE


def run_iteration(region: GlobalRegion, workers: int = 1, log=None) -> None:
    cfg, desc, params = region.config, region.desc, region.config.ma
    region.threshold = compute_threshold(params.n, cfg.membranes, region.clock)
    _log(log, region, "division", 0)
    membranes = create_membranes(region)
    _log(log, region, "membrane_creation", len(membranes))
    distribute(region, membranes)
    _log(log, region, "distribution", len(membranes))

    parallel_climb(membranes, desc, params, workers)
    barrier(region, membranes)
    _log(log, region, "climb", len(membranes))

    while len(membranes) > 1:
        membranes = migrate(membranes, desc, region.clock)
        region.membranes = membranes
        _log(log, region, "migration", len(membranes))
        time_update(region, membranes)
        _map(lambda mem: watch_jump_round(mem, desc, params), membranes, workers)
        parallel_climb(membranes, desc, params, workers)
        barrier(region, membranes)
        _log(log, region, "watch_jump_climb", len(membranes))

    mem = somersault_final(membranes, desc, params)
    barrier(region, membranes)
    _log(log, region, "somersault", 1)
    eliminate_to_global(mem, region)
    region.clock.tick("termination.iteration_check")
    _log(log, region, "elimination", 0)


def run_pmsam(desc: ObjectiveDescriptor, config: PmsamConfig,
              model: clk.TickModel = clk.DEFAULT_MODEL, workers: int = 1,
              log: list | None = None) -> RunReport:
    started = time.perf_counter()
    region = initialize(config, desc, model)
    _log(log, region, "initialize", 0)
    trace = []
    while (decision := check_termination(region)) is Decision.CONTINUE:
        run_iteration(region, workers, log)
        trace.append((region.iteration, region.global_best.value))
    region.clock.tick("termination.dissolution")
    _log(log, region, "dissolution", 0)
    return RunReport(
        function_id=region.desc.id,
        algorithm="pmsam",
        seed=config.seed,
        best_value=region.global_best.value,
        best_position=region.global_best.position.copy(),
        iterations_used=region.iteration,
        ticks=region.clock.t,
        wall_seconds=time.perf_counter() - started,
        trace=trace,
        ledger=dict(region.clock.ledger),
        stop_reason=decision.value,
    )
