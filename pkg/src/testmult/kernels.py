"""Per-agent daily kernels.

Two interchangeable implementations: explicit loops compiled with numba, and
vectorized numpy.  Set ``TESTMULT_NUMBA=0`` to force the numpy path.  Both
return identical integers, so results do not depend on which one ran.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_AVAILABLE = numba is not None
USE_NUMBA = NUMBA_AVAILABLE and os.environ.get("TESTMULT_NUMBA", "1") != "0"

NEVER = np.int32(2**30)

# individual state codes
SUSCEPTIBLE = 0
INCUBATING = 1
SEVERE = 2
MILD = 3
ASYMPTOMATIC = 4
DEAD = 5
RECOVERED = 6
F_SEVERE = 7
F_MILD = 8
F_DEAD = 9
F_RECOVERED = 10
N_STATES = 11

# testing pools
NOT_ELIGIBLE = 0
POOL_SEVERE = 1
POOL_MILD = 2
POOL_ASYMPTOMATIC = 3
N_POOLS = 4


def _jit(func):
    if NUMBA_AVAILABLE:
        return numba.njit(cache=True, nogil=True)(func)
    return func


def _classify_loop(t, group, epi_day, sym, epi_death, p_lag, k_lag, q_lag,
                   conf_day, conf_severe, conf_death, k_f, q_f, detected,
                   state, counts, det_counts):
    counts[:, :] = 0
    det_counts[:, :] = 0
    for j in range(epi_day.shape[0]):
        g = group[j]
        e = t - epi_day[j]
        if e >= 0:
            if epi_death[j]:
                dead = e >= k_lag[j]
                rec = False
            else:
                dead = False
                rec = e >= q_lag[j]
            if dead:
                code = DEAD
            elif rec:
                code = RECOVERED
            elif e < p_lag[j]:
                code = INCUBATING
            else:
                code = SEVERE + sym[j]
        else:
            ef = t - conf_day[j]
            if ef >= 0:
                if conf_death[j]:
                    if ef >= k_f:
                        code = F_DEAD
                    elif conf_severe[j]:
                        code = F_SEVERE
                    else:
                        code = F_MILD
                elif ef >= q_f:
                    code = F_RECOVERED
                elif conf_severe[j]:
                    code = F_SEVERE
                else:
                    code = F_MILD
            else:
                code = SUSCEPTIBLE
        state[j] = code
        counts[g, code] += 1
        if detected[j]:
            det_counts[g, code] += 1


def _classify_numpy(t, group, epi_day, sym, epi_death, p_lag, k_lag, q_lag,
                    conf_day, conf_severe, conf_death, k_f, q_f, detected,
                    state, counts, det_counts):
    n_groups = counts.shape[0]
    e = t - epi_day
    infected = e >= 0
    dead = infected & epi_death & (e >= k_lag)
    rec = infected & ~epi_death & (e >= q_lag)
    inc = infected & ~dead & ~rec & (e < p_lag)
    code = np.where(infected, SEVERE + sym.astype(np.int8), SUSCEPTIBLE).astype(np.int8)
    code[inc] = INCUBATING
    code[dead] = DEAD
    code[rec] = RECOVERED

    ef = t - conf_day
    conf = ~infected & (ef >= 0)
    fdead = conf & conf_death & (ef >= k_f)
    frec = conf & ~conf_death & (ef >= q_f)
    fact = conf & ~fdead & ~frec
    code[fact] = np.where(conf_severe[fact], F_SEVERE, F_MILD)
    code[fdead] = F_DEAD
    code[frec] = F_RECOVERED
    state[:] = code

    key = group.astype(np.int64) * N_STATES + code
    counts[:, :] = np.bincount(key, minlength=n_groups * N_STATES).reshape(n_groups, N_STATES)
    det_counts[:, :] = np.bincount(key[detected], minlength=n_groups * N_STATES).reshape(n_groups, N_STATES)


def _pools_loop(t, d, state, detected, last_test, pool, pool_counts):
    pool_counts[:] = 0
    cutoff = t - d
    for j in range(state.shape[0]):
        code = state[j]
        if detected[j] or last_test[j] >= cutoff or code == DEAD or code == F_DEAD:
            p = NOT_ELIGIBLE
        elif code == SEVERE or code == F_SEVERE:
            p = POOL_SEVERE
        elif code == MILD or code == F_MILD:
            p = POOL_MILD
        else:
            p = POOL_ASYMPTOMATIC
        pool[j] = p
        pool_counts[p] += 1


def _pools_numpy(t, d, state, detected, last_test, pool, pool_counts):
    p = np.full(state.shape[0], POOL_ASYMPTOMATIC, dtype=np.int8)
    p[(state == SEVERE) | (state == F_SEVERE)] = POOL_SEVERE
    p[(state == MILD) | (state == F_MILD)] = POOL_MILD
    blocked = detected | (last_test >= t - d) | (state == DEAD) | (state == F_DEAD)
    p[blocked] = NOT_ELIGIBLE
    pool[:] = p
    pool_counts[:] = np.bincount(p, minlength=N_POOLS)


classify_numba = _jit(_classify_loop)
pools_numba = _jit(_pools_loop)


def classify(*args, use_numba: bool | None = None) -> None:
    """Write each agent's state code at day ``t`` and per-group counts into the output arrays."""
    if USE_NUMBA if use_numba is None else use_numba:
        classify_numba(*args)
    else:
        _classify_numpy(*args)


def testing_pools(*args, use_numba: bool | None = None) -> None:
    """Assign each agent to the severe / mild / asymptomatic testing pool, or none."""
    if USE_NUMBA if use_numba is None else use_numba:
        pools_numba(*args)
    else:
        _pools_numpy(*args)
