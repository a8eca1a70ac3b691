"""Benchmark objective functions and their feasible boxes.

All functions accept an array of shape ``(..., d)`` and reduce over the last
axis, so a whole population can be evaluated in one call.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import ConfigurationError, ContractViolation

DEFAULT_DIMENSION = 30


class Sense(str, enum.Enum):
    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"

    @property
    def sign(self) -> float:
        """Multiplier turning an objective value into a score to maximize."""
        return -1.0 if self is Sense.MINIMIZE else 1.0


def sphere(x):
    x = np.asarray(x, dtype=float)
    return np.sum(x * x, axis=-1)


def max_abs(x):
    x = np.asarray(x, dtype=float)
    return np.max(np.abs(x), axis=-1)


def double_sum(x):
    """Sum over i of the squared partial sums x_1 + ... + x_i."""
    x = np.asarray(x, dtype=float)
    c = np.cumsum(x, axis=-1)
    return np.sum(c * c, axis=-1)


def rastrigin(x):
    x = np.asarray(x, dtype=float)
    return np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x) + 10.0, axis=-1)


def quartic(x):
    """Noise-free part of the noisy quartic; the noise is added by ``evaluate``."""
    x = np.asarray(x, dtype=float)
    i = np.arange(1, x.shape[-1] + 1)
    return np.sum(i * x**4, axis=-1)


def schwefel(x):
    x = np.asarray(x, dtype=float)
    return np.sum(-x * np.sin(np.sqrt(np.abs(x))), axis=-1)


def griewank(x):
    x = np.asarray(x, dtype=float)
    i = np.arange(1, x.shape[-1] + 1)
    return np.sum(x * x, axis=-1) / 4000.0 - np.prod(np.cos(x / np.sqrt(i)), axis=-1) + 1.0


def rosenbrock(x):
    x = np.asarray(x, dtype=float)
    head, tail = x[..., :-1], x[..., 1:]
    return np.sum(100.0 * (head * head - tail) ** 2 + (head - 1.0) ** 2, axis=-1)


def abs_sum_prod(x):
    x = np.asarray(x, dtype=float)
    a = np.abs(x)
    return np.sum(a, axis=-1) + np.prod(a, axis=-1)


MICHALEWICZ_STEEPNESS = 10


def michalewicz(x):
    # leading minus so that the tabulated negative minimum is reachable
    x = np.asarray(x, dtype=float)
    i = np.arange(1, x.shape[-1] + 1)
    return -np.sum(
        np.sin(x) * np.sin(i * x * x / np.pi) ** (2 * MICHALEWICZ_STEEPNESS), axis=-1
    )


def ackley(x):
    # standard form: the cosine term carries coefficient 1 so that f(0) = 0
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    rms = np.sqrt(np.sum(x * x, axis=-1) / d)
    mean_cos = np.sum(np.cos(2.0 * np.pi * x), axis=-1) / d
    return -20.0 * np.exp(-0.2 * rms) - np.exp(mean_cos) + 20.0 + np.e


def sin_exp(x):
    x = np.asarray(x, dtype=float)
    s = np.sum(np.sin(x) ** 2, axis=-1)
    g = np.exp(-np.sum(x * x, axis=-1))
    h = np.exp(-np.sum(np.sin(np.sqrt(np.abs(x))) ** 2, axis=-1))
    return (s - g) * h


@dataclass(frozen=True)
class ObjectiveDescriptor:
    id: str
    func: Callable[[np.ndarray], np.ndarray]
    lower: float
    upper: float
    dimension: int = DEFAULT_DIMENSION
    known_min: float | None = None
    stochastic: bool = False
    sense: Sense = Sense.MINIMIZE

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ConfigurationError(f"{self.id}: lower bound must be below upper bound")
        if self.dimension < 1:
            raise ConfigurationError(f"{self.id}: dimension must be positive")

    def with_dimension(self, d: int) -> "ObjectiveDescriptor":
        return replace(self, dimension=int(d))


# (id, func, lower, upper, known_min per coordinate-count, stochastic)
_TABLE = [
    ("f1", sphere, -100.0, 100.0, lambda d: 0.0, False),
    ("f2", max_abs, -100.0, 100.0, lambda d: 0.0, False),
    ("f3", double_sum, -100.0, 100.0, lambda d: 0.0, False),
    ("f4", rastrigin, -5.12, 5.12, lambda d: 0.0, False),
    ("f5", quartic, -1.28, 1.28, lambda d: 0.0, True),
    ("f6", schwefel, -500.0, 500.0, lambda d: -418.883 * d, False),
    ("f7", griewank, -600.0, 600.0, lambda d: 0.0, False),
    ("f8", rosenbrock, -5.0, 10.0, lambda d: 0.0, False),
    ("f9", abs_sum_prod, -10.0, 10.0, lambda d: 0.0, False),
    ("f10", michalewicz, 0.0, np.pi, lambda d: -4.687, False),
    ("f11", ackley, -32.0, 32.0, lambda d: 0.0, False),
    ("f12", sin_exp, -10.0, 10.0, lambda d: -1.0, False),
]


def builtin_suite(dimension: int = DEFAULT_DIMENSION) -> list[ObjectiveDescriptor]:
    """The twelve standard benchmarks, ordered f1..f12."""
    return [
        ObjectiveDescriptor(
            id=fid,
            func=func,
            lower=lo,
            upper=hi,
            dimension=dimension,
            known_min=float(fmin(dimension)),
            stochastic=noisy,
        )
        for fid, func, lo, hi, fmin, noisy in _TABLE
    ]


_REGISTRY: dict[str, ObjectiveDescriptor] = {}


def register(desc: ObjectiveDescriptor) -> None:
    """Make a custom objective addressable by id (e.g. from the CLI)."""
    if desc.id in builtin_ids():
        raise ConfigurationError(f"cannot shadow built-in objective {desc.id!r}")
    _REGISTRY[desc.id] = desc


def builtin_ids() -> list[str]:
    return [row[0] for row in _TABLE]


def known_ids() -> list[str]:
    return builtin_ids() + sorted(_REGISTRY)


def get_objective(function_id: str, dimension: int | None = None) -> ObjectiveDescriptor:
    fid = str(function_id).lower()
    for desc in builtin_suite():
        if desc.id == fid:
            return desc if dimension is None else desc.with_dimension(dimension)
    if fid in _REGISTRY:
        desc = _REGISTRY[fid]
        return desc if dimension is None else desc.with_dimension(dimension)
    raise ConfigurationError(f"unknown function id {function_id!r}", key="function")


def _check_point(desc: ObjectiveDescriptor, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.shape[0] != desc.dimension:
        raise ContractViolation(
            f"{desc.id}: expected a position of length {desc.dimension}, got shape {p.shape}"
        )
    return p


def evaluate(desc: ObjectiveDescriptor, p, rng: np.random.Generator | None = None) -> float:
    """Objective value at a single position.

    For stochastic objectives one uniform [0, 1) noise term is drawn from
    ``rng`` per call; passing ``rng=None`` evaluates the noise-free part.
    """
    p = _check_point(desc, p)
    if not np.all(np.isfinite(p)):
        raise ContractViolation(f"{desc.id}: position has non-finite coordinates")
    value = float(desc.func(p))
    if desc.stochastic and rng is not None:
        value += float(rng.random())
    return value


def evaluate_batch(desc: ObjectiveDescriptor, points, rng: np.random.Generator | None = None):
    """Vectorised ``evaluate`` over the rows of a ``(k, d)`` array.

    No per-row contract checks; the engine only passes finite, well-shaped arrays.
    """
    values = np.asarray(desc.func(points), dtype=float)
    if desc.stochastic and rng is not None:
        values = values + rng.random(values.shape)
    return values


def is_feasible(desc: ObjectiveDescriptor, p) -> bool:
    p = _check_point(desc, p)
    return bool(np.all((p >= desc.lower) & (p <= desc.upper)))


def feasible_rows(desc: ObjectiveDescriptor, points) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    return np.all((points >= desc.lower) & (points <= desc.upper), axis=-1)
