"""Deterministic random substreams keyed by (seed, purpose, ...)."""
import numpy as np

from .errors import ConfigurationError

ROOT = 0
MEMBRANE = 1


def check_seed(seed) -> int:
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ConfigurationError("seed must be an unsigned 64-bit integer", key="seed")
    return seed


def make_stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for ``key`` under ``seed``; equal keys give equal streams."""
    seq = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(seq))


def root_stream(seed: int) -> np.random.Generator:
    return make_stream(seed, ROOT)


def membrane_stream(seed: int, iteration: int, label: int) -> np.random.Generator:
    return make_stream(seed, MEMBRANE, iteration, label)
