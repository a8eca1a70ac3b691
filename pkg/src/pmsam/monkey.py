"""Monkey Algorithm processes: climb, watch-jump, somersault.

The formulas are written for maximisation of a *score*; a minimisation
objective is scored as ``-f``. Population-level functions work on a
``(k, d)`` position array plus a ``(k,)`` cached-value array and return new
arrays; the single-monkey functions are thin wrappers over them.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import clock as clk
from .errors import ConfigurationError, ContractViolation
from .objective import ObjectiveDescriptor, evaluate_batch, feasible_rows
from .report import RunReport
from .streams import root_stream


@dataclass(frozen=True)
class MaParams:
    n: int = 60
    d: int = 30
    step_length: float = 1e-4
    eyesight: float = 1.0
    somersault_lo: float = -1.0
    somersault_hi: float = 1.0
    climb_number: int = 50
    cyclic_number: int = 20
    climb_epsilon: float = 1e-9
    max_resample: int = 100

    def __post_init__(self):
        checks = [
            ("n", self.n >= 1, "population size must be positive"),
            ("d", self.d >= 1, "dimension must be positive"),
            ("step_length", self.step_length > 0, "step length must be positive"),
            ("eyesight", self.eyesight >= 0, "eyesight must be non-negative"),
            ("somersault_hi", self.somersault_lo < self.somersault_hi,
             "somersault interval must satisfy lo < hi"),
            ("climb_number", self.climb_number >= 0, "climb number must be non-negative"),
            ("n_max", self.cyclic_number >= 0, "cyclic number must be non-negative"),
            ("climb_epsilon", self.climb_epsilon >= 0, "climb epsilon must be non-negative"),
            ("max_resample", self.max_resample >= 1, "max_resample must be positive"),
        ]
        for key, ok, msg in checks:
            if not ok:
                raise ConfigurationError(msg, key=key)


@dataclass
class MonkeyState:
    position: np.ndarray
    value: float


def sign(x: float) -> int:
    if x > 0:
        return 1
    if x < 0:
        return -1
    return 0


def better(a: float, b: float, desc: ObjectiveDescriptor) -> bool:
    """True if value ``a`` is at least as good as ``b``."""
    s = desc.sense.sign
    return s * a >= s * b


def best_index(values: np.ndarray, desc: ObjectiveDescriptor) -> int:
    """Index of the best value; ties go to the lowest index."""
    return int(np.argmax(desc.sense.sign * np.asarray(values)))


def random_positions(desc: ObjectiveDescriptor, n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(desc.lower, desc.upper, size=(n, desc.dimension))


def _perturbations(rng, shape, a: float) -> np.ndarray:
    # heads (draw < 1/2) -> +a
    return np.where(rng.random(shape) < 0.5, a, -a)


def generate_climb_perturbation(rng, d: int, a: float) -> np.ndarray:
    """Random climb vector: each coordinate is +a or -a with probability 1/2."""
    if d < 1 or a <= 0:
        raise ContractViolation("need d >= 1 and a > 0")
    return _perturbations(rng, (d,), a)


def pseudo_gradient(desc: ObjectiveDescriptor, p, dp, rng=None) -> np.ndarray:
    """Component j is (f(p + dp) - f(p - dp)) / (2 dp_j).

    Works on a single position or row-wise on a ``(k, d)`` stack.
    """
    p = np.asarray(p, dtype=float)
    dp = np.asarray(dp, dtype=float)
    if np.any(dp == 0):
        raise ContractViolation("perturbation has a zero component")
    diff = evaluate_batch(desc, p + dp, rng) - evaluate_batch(desc, p - dp, rng)
    return np.asarray(diff)[..., None] / (2.0 * dp)


def climb_population(desc, positions, values, params: MaParams, rng):
    """Climb every monkey for up to ``climb_number`` steps.

    A step moves to y = p + a * sign(score gradient) when y is feasible and no
    worse than p. A monkey stops early once its value changes by less than
    ``climb_epsilon`` in one step.
    """
    pos = np.array(positions, dtype=float, copy=True)
    vals = np.array(values, dtype=float, copy=True)
    a = params.step_length
    s = desc.sense.sign
    active = np.ones(len(pos), dtype=bool)
    for _ in range(params.climb_number):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        p = pos[idx]
        dp = _perturbations(rng, p.shape, a)
        g = pseudo_gradient(desc, p, dp, rng)
        y = p + a * np.sign(s * g)
        fy = evaluate_batch(desc, y)
        accept = feasible_rows(desc, y) & (s * fy >= s * vals[idx])
        new_vals = np.where(accept, fy, vals[idx])
        change = np.abs(new_vals - vals[idx])
        pos[idx[accept]] = y[accept]
        vals[idx] = new_vals
        active[idx[change < params.climb_epsilon]] = False
    return pos, vals


def watch_jump_population(desc, positions, values, params: MaParams, rng):
    """Look around within the eyesight and jump to a feasible point at least as good.

    Each monkey gets up to ``max_resample`` draws; on exhaustion it stays put.
    """
    pos = np.array(positions, dtype=float, copy=True)
    vals = np.array(values, dtype=float, copy=True)
    b = params.eyesight
    s = desc.sense.sign
    pending = np.ones(len(pos), dtype=bool)
    for _ in range(params.max_resample):
        idx = np.flatnonzero(pending)
        if idx.size == 0:
            break
        y = pos[idx] + rng.uniform(-b, b, size=pos[idx].shape)
        fy = evaluate_batch(desc, y)
        ok = feasible_rows(desc, y) & (s * fy >= s * vals[idx])
        pos[idx[ok]] = y[ok]
        vals[idx[ok]] = fy[ok]
        pending[idx[ok]] = False
    return pos, vals


def somersault_pivot(monkeys) -> np.ndarray:
    """Coordinate-wise mean of the population's positions."""
    if isinstance(monkeys, np.ndarray):
        positions = monkeys
    else:
        if len(monkeys) == 0:
            raise ContractViolation("somersault pivot of an empty population")
        positions = np.stack([np.asarray(m.position, dtype=float) for m in monkeys])
    if positions.shape[0] == 0:
        raise ContractViolation("somersault pivot of an empty population")
    return positions.mean(axis=0)


def somersault_population(desc, positions, values, params: MaParams, rng, alpha=None,
                          pivot=None):
    """Somersault every monkey towards (or across) the pivot.

    Each monkey draws its own alpha from the somersault interval and is
    redrawn while the landing point is infeasible, up to ``max_resample``
    times. A fixed ``alpha`` gets a single attempt. The pivot defaults to the
    mean of ``positions``.
    """
    pos = np.array(positions, dtype=float, copy=True)
    vals = np.array(values, dtype=float, copy=True)
    pivot = somersault_pivot(pos) if pivot is None else np.asarray(pivot, dtype=float)
    pending = np.ones(len(pos), dtype=bool)
    attempts = 1 if alpha is not None else params.max_resample
    for _ in range(attempts):
        idx = np.flatnonzero(pending)
        if idx.size == 0:
            break
        if alpha is None:
            al = rng.uniform(params.somersault_lo, params.somersault_hi, size=idx.size)
        else:
            al = np.full(idx.size, float(alpha))
        y = pos[idx] + al[:, None] * (pivot - pos[idx])
        ok = feasible_rows(desc, y)
        pos[idx[ok]] = y[ok]
        pending[idx[ok]] = False
    moved = ~pending
    if moved.any():
        vals[moved] = evaluate_batch(desc, pos[moved])
    return pos, vals


def _single(fn, desc, monkey: MonkeyState, params, rng, **kw) -> MonkeyState:
    pos, vals = fn(desc, np.asarray(monkey.position, dtype=float)[None, :],
                   np.array([monkey.value], dtype=float), params, rng, **kw)
    return MonkeyState(pos[0], float(vals[0]))


def climb_process(desc, monkey: MonkeyState, params: MaParams, rng) -> MonkeyState:
    return _single(climb_population, desc, monkey, params, rng)


def watch_jump(desc, monkey: MonkeyState, params: MaParams, rng) -> MonkeyState:
    return _single(watch_jump_population, desc, monkey, params, rng)


def somersault(desc, monkeys, params: MaParams, rng, alpha=None) -> list[MonkeyState]:
    pos = np.stack([np.asarray(m.position, dtype=float) for m in monkeys])
    vals = np.array([m.value for m in monkeys], dtype=float)
    pos, vals = somersault_population(desc, pos, vals, params, rng, alpha=alpha)
    return [MonkeyState(p, float(v)) for p, v in zip(pos, vals)]


def run_ma(desc, params: MaParams, seed: int, model: clk.TickModel = clk.DEFAULT_MODEL) -> RunReport:
    """Sequential baseline: climb, watch-jump, climb, somersault, one monkey at a time."""
    if desc.dimension != params.d:
        desc = desc.with_dimension(params.d)
    started = time.perf_counter()
    rng = root_stream(seed)
    clock = clk.LogicalClock(model, desc.id)
    pos = random_positions(desc, params.n, rng)
    vals = evaluate_batch(desc, pos)
    b = best_index(vals, desc)
    best_pos, best_val = pos[b].copy(), float(vals[b])
    trace = []

    def track():
        nonlocal best_pos, best_val
        i = best_index(vals, desc)
        if desc.sense.sign * vals[i] > desc.sense.sign * best_val:
            best_pos, best_val = pos[i].copy(), float(vals[i])

    def per_monkey(fn, stages, repeat=1):
        for i in range(params.n):
            pos[i:i + 1], vals[i:i + 1] = fn(desc, pos[i:i + 1], vals[i:i + 1], params, rng)
            for stage in stages:
                clock.tick(stage, repeat=repeat)
        track()

    for cycle in range(1, params.cyclic_number + 1):
        per_monkey(climb_population, clk.CLIMB_STEP_STAGES, params.climb_number)
        per_monkey(watch_jump_population, clk.WATCH_STAGES)
        per_monkey(climb_population, clk.CLIMB_STEP_STAGES, params.climb_number)
        pivot = somersault_pivot(pos)
        for i in range(params.n):
            pos[i:i + 1], vals[i:i + 1] = somersault_population(
                desc, pos[i:i + 1], vals[i:i + 1], params, rng, pivot=pivot)
            for stage in clk.SOMERSAULT_STAGES:
                clock.tick(stage)
        track()
        trace.append((cycle, best_val))

    return RunReport(
        function_id=desc.id,
        algorithm="ma",
        seed=int(seed),
        best_value=best_val,
        best_position=best_pos,
        iterations_used=params.cyclic_number,
        ticks=clock.t,
        wall_seconds=time.perf_counter() - started,
        trace=trace,
        ledger=dict(clock.ledger),
        stop_reason="iterations",
    )

