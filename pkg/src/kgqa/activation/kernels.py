"""Numeric kernels for one synchronous spreading round over CSR adjacency.

The numba ``@njit`` kernel is the default hot path; a pure-numpy
implementation is kept as a fallback and for environments where JIT
compilation is unwanted.  Selection: ``KGQA_NO_NUMBA=1`` forces numpy, and
numpy is used automatically when numba is missing.  Both paths accumulate
contributions in the same (frontier, CSR-slot) order, so their floating
point results are identical.

Round contract (synchronous update, all reads against pre-round values):

* every frontier node i sends ``a_i * w * DF`` along each incident slot
* slots whose far end is blocked are recorded in ``cr_hits`` instead of
  contributing (crossover relations of the object-side run)
* per-target contributions are summed, then ``temp = a_j + sum``
* ``a_j`` becomes 1 if temp >= 1, temp if AT <= temp < 1, else stays
* returns the newly activated nodes (crossed AT this round), ascending
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        return wrap


def numba_disabled() -> bool:
    return os.environ.get("KGQA_NO_NUMBA", "").strip().lower() in {"1", "true", "yes"}


def active_backend() -> str:
    return "numpy" if (numba_disabled() or not HAVE_NUMBA) else "numba"


@njit(cache=True)
def _round_jit(indptr, nbr, wts, act, frontier, at, df, blocked, cr_hits):
    n = act.shape[0]
    contrib = np.zeros(n, dtype=np.float64)
    for fi in range(frontier.shape[0]):
        i = frontier[fi]
        ai = act[i]
        for p in range(indptr[i], indptr[i + 1]):
            j = nbr[p]
            if blocked[j]:
                cr_hits[p] = True
            else:
                contrib[j] += ai * wts[p] * df
    newly = np.empty(n, dtype=np.int64)
    count = 0
    for j in range(n):
        c = contrib[j]
        if c > 0.0:
            temp = act[j] + c
            if temp >= at:
                if act[j] < at:
                    newly[count] = j
                    count += 1
                act[j] = 1.0 if temp >= 1.0 else temp
    return newly[:count]


def _round_numpy(indptr, nbr, wts, act, frontier, at, df, blocked, cr_hits):
    starts = indptr[frontier]
    ends = indptr[frontier + 1]
    counts = ends - starts
    if counts.sum() == 0:
        return np.empty(0, dtype=np.int64)
    # concatenated CSR slot ranges, in frontier order — matches the jit loop
    pos = np.concatenate([np.arange(s, e) for s, e in zip(starts, ends)])
    src = np.repeat(frontier, counts)
    tgt = nbr[pos]
    hit = blocked[tgt]
    cr_hits[pos[hit]] = True
    keep = ~hit
    contrib = np.zeros(act.shape[0], dtype=np.float64)
    np.add.at(contrib, tgt[keep], act[src[keep]] * wts[pos[keep]] * df)
    temp = act + contrib
    eligible = (contrib > 0.0) & (temp >= at)
    newly = np.flatnonzero(eligible & (act < at)).astype(np.int64)
    act[eligible] = np.minimum(1.0, temp[eligible])
    return newly


def spread_round(indptr, nbr, wts, act, frontier, at, df, blocked, cr_hits,
                 backend: str | None = None):
    """Run one spreading round in place on ``act``; returns newly activated
    node indexes.  ``backend`` overrides the environment selection."""
    chosen = backend or active_backend()
    if chosen == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is unavailable")
        return _round_jit(indptr, nbr, wts, act, frontier, at, df, blocked, cr_hits)
    if chosen == "numpy":
        return _round_numpy(indptr, nbr, wts, act, frontier, at, df, blocked, cr_hits)
    raise ValueError(f"unknown backend {chosen!r}; expected 'numba' or 'numpy'")
