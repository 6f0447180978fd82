"""Hot numeric kernels behind the algebra and tree search.

Two interchangeable implementations live here: numba-compiled loops
(default) and pure numpy. Set BLENDPLAN_DISABLE_NUMBA=1 to force the
numpy path; benchmarks/bench_kernels.py compares both.

The capacity rule: cap[i] = min over columns j with weights[i][j] > 0 of
floor(stock[j] / weights[i][j]), where a ratio within SNAP below an
integer counts as that integer (guards against 5/0.5 = 9.999... artifacts).
"""

from __future__ import annotations

import os

import numpy as np

# Ratios this close below an integer are treated as exactly that integer.
SNAP = 1e-9


def _requirements_numpy(weights: np.ndarray, demand: np.ndarray) -> np.ndarray:
    return demand[:, None] * weights


def _usage_numpy(requirements: np.ndarray) -> np.ndarray:
    return requirements.sum(axis=0)


def _caps_numpy(weights: np.ndarray, stock: np.ndarray) -> np.ndarray:
    positive = weights > 0.0
    safe = np.where(positive, weights, 1.0)
    ratios = stock[None, :] / safe
    floors = np.floor(ratios)
    floors += (ratios - floors) >= (1.0 - SNAP)
    bounded = np.where(positive, floors, np.inf)
    caps = bounded.min(axis=1)
    # rows without any positive weight never occur after validation; cap at 0
    caps = np.where(np.isfinite(caps), caps, 0.0)
    return caps.astype(np.int64)


def _expand_numpy(weights: np.ndarray, stock: np.ndarray):
    stock = stock.copy()
    forced = np.zeros(weights.shape[0], dtype=np.int64)
    caps = _caps_numpy(weights, stock)
    while True:
        positive = np.nonzero(caps > 0)[0]
        if positive.size != 1:
            return forced, stock, caps
        i = int(positive[0])
        q = int(caps[i])
        forced[i] += q
        stock -= q * weights[i]
        np.maximum(stock, 0.0, out=stock)
        caps = _caps_numpy(weights, stock)


def _make_numba_kernels():
    from numba import njit

    @njit(cache=True)
    def requirements(weights, demand):
        n, m = weights.shape
        out = np.empty((n, m), dtype=np.float64)
        for i in range(n):
            for j in range(m):
                out[i, j] = demand[i] * weights[i, j]
        return out

    @njit(cache=True)
    def usage(requirements_matrix):
        n, m = requirements_matrix.shape
        out = np.zeros(m, dtype=np.float64)
        for i in range(n):
            for j in range(m):
                out[j] += requirements_matrix[i, j]
        return out

    @njit(cache=True)
    def caps(weights, stock):
        n, m = weights.shape
        out = np.zeros(n, dtype=np.int64)
        for i in range(n):
            best = -1.0
            for j in range(m):
                w = weights[i, j]
                if w > 0.0:
                    q = stock[j] / w
                    f = np.floor(q)
                    if q - f >= 1.0 - SNAP:
                        f += 1.0
                    if best < 0.0 or f < best:
                        best = f
            if best > 0.0:
                out[i] = np.int64(best)
        return out

    @njit(cache=True)
    def expand(weights, stock0):
        n, m = weights.shape
        stock = stock0.copy()
        forced = np.zeros(n, dtype=np.int64)
        current = caps(weights, stock)
        while True:
            count = 0
            last = -1
            for i in range(n):
                if current[i] > 0:
                    count += 1
                    last = i
            if count != 1:
                return forced, stock, current
            q = current[last]
            forced[last] += q
            for j in range(m):
                stock[j] -= q * weights[last, j]
                if stock[j] < 0.0:
                    stock[j] = 0.0
            current = caps(weights, stock)

    return {"requirements": requirements, "usage": usage, "caps": caps, "expand": expand}


NUMPY_KERNELS = {
    "requirements": _requirements_numpy,
    "usage": _usage_numpy,
    "caps": _caps_numpy,
    "expand": _expand_numpy,
}

NUMBA_KERNELS = None


def _numba_disabled() -> bool:
    return os.environ.get("BLENDPLAN_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}


if not _numba_disabled():
    try:
        NUMBA_KERNELS = _make_numba_kernels()
    except ImportError:
        NUMBA_KERNELS = None

ACTIVE = NUMBA_KERNELS if NUMBA_KERNELS is not None else NUMPY_KERNELS
USING_NUMBA = ACTIVE is NUMBA_KERNELS and NUMBA_KERNELS is not None

requirements_kernel = ACTIVE["requirements"]
usage_kernel = ACTIVE["usage"]
caps_kernel = ACTIVE["caps"]
expand_kernel = ACTIVE["expand"]


def warm_up() -> None:
    """Trigger JIT compilation so timed paths do not pay compile cost.

    The engine passes frozen (read-only) weight and stock arrays, and numba
    compiles one specialization per mutability combination, so warm both.
    """
    w = np.array([[0.5, 0.5], [0.25, 0.75]])
    w.setflags(write=False)
    demand = np.array([1.0, 1.0])
    demand.setflags(write=False)
    stock_ro = np.array([2.0, 3.0])
    stock_ro.setflags(write=False)
    stock_rw = np.array([2.0, 3.0])

    req = np.ascontiguousarray(requirements_kernel(w, demand))
    req.setflags(write=False)
    usage_kernel(req)
    caps_kernel(w, stock_ro)
    caps_kernel(w, stock_rw)
    expand_kernel(w, stock_ro)
    expand_kernel(w, stock_rw)
