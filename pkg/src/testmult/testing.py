"""Symptoms-prioritized testing, delayed results, and the detected-case ledger."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import kernels
from .epidemic import Population
from .kernels import (ASYMPTOMATIC, DEAD, INCUBATING, MILD, NEVER, POOL_ASYMPTOMATIC, POOL_MILD, POOL_SEVERE,
                      SEVERE)
from .stochastic import sample_without_replacement

ACTIVE_STATES = (INCUBATING, SEVERE, MILD, ASYMPTOMATIC)


class Reported(NamedTuple):
    cases: int
    active: int
    deaths: int
    tests: int
    positives: int
    positivity: float


@dataclass
class DetectionLedger:
    """What the health-care system knows.

    ``detected_day[j]`` is the day agent ``j`` entered the detected-case list
    (``NEVER`` if not yet); ``last_test[j]`` is the day of its most recent
    test.  Positive results wait in ``pending`` keyed by the day they return.
    """

    pop: Population
    d: int
    detected_day: np.ndarray = field(init=False)
    last_test: np.ndarray = field(init=False)
    pending: dict[int, np.ndarray] = field(default_factory=dict, init=False)
    pool: np.ndarray = field(init=False)
    pool_counts: np.ndarray = field(init=False)
    _pools_day: int = field(default=-NEVER, init=False)

    def __post_init__(self) -> None:
        n = self.pop.n
        self.detected_day = np.full(n, NEVER, dtype=np.int32)
        self.last_test = np.full(n, -NEVER, dtype=np.int32)
        self.pool = np.zeros(n, dtype=np.int8)
        self.pool_counts = np.zeros(kernels.N_POOLS, dtype=np.int64)

    @property
    def detected(self) -> np.ndarray:
        return self.pop.detected

    def is_pending(self, t: int) -> np.ndarray:
        """Agents tested within the last ``d`` days (empty when ``d == 0``)."""
        return (self.last_test >= t - self.d) & (self.last_test < t)

    def refresh_pools(self, t: int) -> None:
        """Sort agents into testing pools from their state at ``t``; call after progression."""
        kernels.testing_pools(t, self.d, self.pop.state, self.pop.detected, self.last_test, self.pool, self.pool_counts)
        self._pools_day = t

    def _pool_ids(self, t: int, which: int) -> np.ndarray:
        if self._pools_day != t:
            self.refresh_pools(t)
        if self.pool_counts[which] == 0:
            return np.empty(0, dtype=np.int64)
        return np.flatnonzero(self.pool == which)

    def resolve(self, t: int) -> np.ndarray:
        """Move positives whose results return on day ``t`` into the detected list."""
        ids = self.pending.pop(t, None)
        if ids is None or len(ids) == 0:
            return np.empty(0, dtype=np.int64)
        assert not np.any(self.pop.detected[ids])
        self.pop.detected[ids] = True
        self.detected_day[ids] = t
        # keep the day's detected-state tallies in step with the new detections
        np.add.at(self.pop.det_counts, (self.pop.group[ids], self.pop.state[ids]), 1)
        return ids


def select_severe_tests(ledger: DetectionLedger, t: int) -> np.ndarray:
    """Every alive severe symptomatic agent (either disease) not detected and not pending."""
    return ledger._pool_ids(t, POOL_SEVERE)


def select_nonsevere_tests(ledger: DetectionLedger, capacity: int, rng: np.random.Generator, t: int) -> tuple[np.ndarray, np.ndarray]:
    """Mild symptomatics first, then the remaining capacity on everyone else eligible."""
    if capacity <= 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty
    mild_pool = ledger._pool_ids(t, POOL_MILD)
    mild = sample_without_replacement(rng, mild_pool, min(capacity, len(mild_pool)))
    left = capacity - len(mild)
    if left <= 0:
        return mild, np.empty(0, dtype=np.int64)
    asym_pool = ledger._pool_ids(t, POOL_ASYMPTOMATIC)
    asym = sample_without_replacement(rng, asym_pool, min(left, len(asym_pool)))
    return mild, asym


def administer_and_resolve(ledger: DetectionLedger, tests: np.ndarray, alpha: float, rng: np.random.Generator, t: int) -> np.ndarray:
    """Run ``tests`` on day ``t``; returns the ids that will test positive.

    Only an active epidemic infection can test positive, and it does so with
    probability ``1 - alpha``.  Results join the detected list on ``t + d``.
    """
    pop = ledger.pop
    tests = np.asarray(tests, dtype=np.int64)
    assert not np.any(pop.detected[tests]) and not np.any(ledger.is_pending(t)[tests])
    ledger.last_test[tests] = t
    state = pop.state[tests]
    active = (state >= INCUBATING) & (state <= ASYMPTOMATIC)
    hit = rng.random(len(tests)) < 1.0 - alpha
    positives = np.sort(tests[active & hit])
    if len(positives):
        day = t + ledger.d
        prev = ledger.pending.get(day)
        ledger.pending[day] = positives if prev is None else np.union1d(prev, positives)
    if ledger.d == 0:
        ledger.resolve(t)
    return positives


def isolated_mask(pop: Population) -> np.ndarray:
    """Detected agents whose epidemic infection is still active are isolated."""
    state = pop.state
    return pop.detected & (state >= INCUBATING) & (state <= ASYMPTOMATIC)


def reported_counts(pop: Population) -> np.ndarray:
    """Per group: (detected cases, detected active, detected deaths)."""
    det = pop.det_counts
    return np.stack([det.sum(axis=1), det[:, INCUBATING:ASYMPTOMATIC + 1].sum(axis=1), det[:, DEAD]], axis=1)


def reported_series(pop: Population, batch_size: int, positives: int) -> Reported:
    c, i, d = reported_counts(pop).sum(axis=0)
    positivity = positives / batch_size if batch_size else 0.0
    return Reported(int(c), int(i), int(d), int(batch_size), int(positives), positivity)
