"""Seeded random streams and the variates the model draws.

Every random draw in a replication comes from a stream keyed by
``(seed, purpose, day)``.  Keying streams per day keeps two runs that share a
seed synchronized even after their histories diverge, which is what makes the
paired (common-random-number) testing multipliers low-variance.
"""

from __future__ import annotations

import numpy as np

# Stable integer ids; never renumber (that would change every published seed).
STREAMS = {
    "schedule": 0,
    "infection": 1,
    "confounding": 2,
    "testing": 3,
    "test_result": 4,
    "initial": 5,
}


# Burn-in days before the outbreak are negative; shift keys to stay non-negative.
_DAY_OFFSET = 10_000


def stream(seed: int, purpose: str, day: int = 0) -> np.random.Generator:
    """Generator for one (seed, purpose, day) stream; creation is pure."""
    if seed < 0 or day < -_DAY_OFFSET:
        raise ValueError(f"invalid stream key: seed={seed!r}, day={day!r}")
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(STREAMS[purpose], day + _DAY_OFFSET))
    return np.random.Generator(np.random.PCG64(ss))


def _check_prob(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability out of [0, 1]: {p!r}")


def bernoulli(rng: np.random.Generator, p: float, size: int | None = None):
    _check_prob(p)
    if size is None:
        return int(rng.random() < p)
    return rng.random(size) < p


def binomial(rng: np.random.Generator, n: int, p: float) -> int:
    _check_prob(p)
    if n < 0:
        raise ValueError(f"negative trial count: {n!r}")
    if n == 0 or p == 0.0:
        return 0
    if p == 1.0:
        return int(n)
    return int(rng.binomial(n, p))


def poisson(rng: np.random.Generator, mean: float, size: int | None = None):
    # numpy's sampler is exact (multiplication method below lam=10, PTRS above).
    if mean < 0:
        raise ValueError(f"negative Poisson mean: {mean!r}")
    return rng.poisson(mean, size)


def shifted_poisson(rng: np.random.Generator, mean_minus_one: float, size: int | None = None):
    """Poisson(mean_minus_one) + 1, so the draw is at least one day."""
    return poisson(rng, mean_minus_one, size) + 1


def geometric0(rng: np.random.Generator, mean: float, size: int | None = None):
    """Failures before the first success, with the given mean (0 when mean is 0)."""
    if mean < 0:
        raise ValueError(f"negative mean: {mean!r}")
    if mean == 0:
        return np.zeros(size, dtype=np.int64) if size is not None else 0
    return rng.geometric(1.0 / (1.0 + mean), size) - 1


def rounded_normal(rng: np.random.Generator, mean: float, sd: float) -> int:
    """Normal draw rounded half-up to an integer and clamped below at zero."""
    if sd < 0:
        raise ValueError(f"negative standard deviation: {sd!r}")
    x = mean if sd == 0 else rng.normal(mean, sd)
    return max(0, int(np.floor(x + 0.5)))


def sample_without_replacement(rng: np.random.Generator, universe: np.ndarray, k: int) -> np.ndarray:
    """Uniform k-subset of ``universe`` (returned sorted, so order carries no information)."""
    n = len(universe)
    if k > n:
        raise ValueError(f"cannot sample {k} items from {n}")
    if k == 0:
        return universe[:0]
    if k == n:
        return np.sort(universe)
    return np.sort(rng.choice(universe, size=k, replace=False))
