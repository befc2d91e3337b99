"""Co-occurrence statistics: PMI, NPMI and Cramér's V.

Scalar functions are the reference definitions; the batch kernels compute
the same statistics over whole edge tables. The batch path is JIT-compiled
with numba when available; set COOCSEARCH_KERNELS=numpy to force the pure
numpy fallback (the two are asserted equivalent in the test suite).

All logs are natural; probabilities are maximum-likelihood document
frequency ratios f/n_docs, unsmoothed.
"""

from __future__ import annotations

import math
import os

import numpy as np

LOG_BASE = "e"


def _check_counts(f_x: int, f_y: int, f_xy: int, n_docs: int) -> None:
    if not (1 <= f_xy <= min(f_x, f_y) <= max(f_x, f_y) <= n_docs):
        raise ValueError(
            f"invalid counts: f_x={f_x} f_y={f_y} f_xy={f_xy} n_docs={n_docs}; "
            "need 1 <= f_xy <= min(f_x, f_y) and f_x, f_y <= n_docs"
        )
    if f_x + f_y - f_xy > n_docs:
        # inclusion-exclusion: x-only + y-only + both cannot exceed the corpus
        raise ValueError(
            f"inconsistent counts: f_x={f_x} f_y={f_y} f_xy={f_xy} n_docs={n_docs}; "
            "need f_x + f_y - f_xy <= n_docs"
        )


def pmi(f_x: int, f_y: int, f_xy: int, n_docs: int) -> float:
    """ln( p(x,y) / (p(x) p(y)) ) with p = f/n_docs."""
    _check_counts(f_x, f_y, f_xy, n_docs)
    return math.log((f_xy * n_docs) / (f_x * f_y))


def npmi(f_x: int, f_y: int, f_xy: int, n_docs: int) -> float:
    """pmi normalized by self-information -ln p(x,y), in [-1, 1].

    When f_xy == n_docs the self-information is 0; by convention the
    association is maximal and 1 is returned.
    """
    _check_counts(f_x, f_y, f_xy, n_docs)
    if f_xy == n_docs:
        return 1.0
    return pmi(f_x, f_y, f_xy, n_docs) / (-math.log(f_xy / n_docs))


def is_degenerate_table(f_x: int, f_y: int, n_docs: int) -> bool:
    """A 2x2 presence/absence table is degenerate when a marginal is 0 or n."""
    return f_x == 0 or f_y == 0 or f_x == n_docs or f_y == n_docs


def cramers_v(f_x: int, f_y: int, f_xy: int, n_docs: int) -> float:
    """sqrt(chi^2 / n) of the 2x2 presence/absence table; |phi| for 2x2.

    Degenerate tables (a marginal equal to 0 or n_docs) return 0; callers
    needing the flag use is_degenerate_table.
    """
    _check_counts(f_x, f_y, f_xy, n_docs)
    if is_degenerate_table(f_x, f_y, n_docs):
        return 0.0
    num = f_xy * n_docs - f_x * f_y
    den = math.sqrt(f_x * (n_docs - f_x) * f_y * (n_docs - f_y))
    return abs(num) / den


def edge_stats_numpy(f_x, f_y, f_xy, n_docs: int):
    """Vectorized (pmi, npmi, cramers_v, degenerate) over edge count arrays."""
    f_x = np.asarray(f_x, dtype=np.float64)
    f_y = np.asarray(f_y, dtype=np.float64)
    f_xy = np.asarray(f_xy, dtype=np.float64)
    n = float(n_docs)
    pmi_v = np.log((f_xy * n) / (f_x * f_y))
    self_info = -np.log(f_xy / n)
    full = f_xy == n
    npmi_v = np.where(full, 1.0, pmi_v / np.where(self_info == 0.0, 1.0, self_info))
    deg = (f_x == n) | (f_y == n)
    den = f_x * (n - f_x) * f_y * (n - f_y)
    phi = np.where(deg, 0.0, np.abs(f_xy * n - f_x * f_y) / np.sqrt(np.where(deg, 1.0, den)))
    return pmi_v, npmi_v, phi, deg


def _edge_stats_python(f_x, f_y, f_xy, n_docs):
    # loop body shared between the numba kernel and its uncompiled form
    m = f_x.shape[0]
    pmi_v = np.empty(m, dtype=np.float64)
    npmi_v = np.empty(m, dtype=np.float64)
    phi = np.empty(m, dtype=np.float64)
    deg = np.empty(m, dtype=np.bool_)
    n = float(n_docs)
    for i in range(m):
        fx = float(f_x[i])
        fy = float(f_y[i])
        fxy = float(f_xy[i])
        p = math.log((fxy * n) / (fx * fy))
        pmi_v[i] = p
        if fxy == n:
            npmi_v[i] = 1.0
        else:
            npmi_v[i] = p / (-math.log(fxy / n))
        d = fx == n or fy == n
        deg[i] = d
        if d:
            phi[i] = 0.0
        else:
            phi[i] = abs(fxy * n - fx * fy) / math.sqrt(fx * (n - fx) * fy * (n - fy))
    return pmi_v, npmi_v, phi, deg


def _select_backend() -> str:
    choice = os.environ.get("COOCSEARCH_KERNELS", "numba").lower()
    if choice == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        return "numpy"
    return "numba"


BACKEND = _select_backend()

if BACKEND == "numba":
    import numba

    _edge_stats_numba = numba.njit(cache=True)(_edge_stats_python)


def edge_stats(f_x, f_y, f_xy, n_docs: int):
    """Batch statistics on the selected backend; see edge_stats_numpy."""
    f_x = np.ascontiguousarray(f_x, dtype=np.int64)
    f_y = np.ascontiguousarray(f_y, dtype=np.int64)
    f_xy = np.ascontiguousarray(f_xy, dtype=np.int64)
    if (
        np.any(f_xy < 1)
        or np.any(f_xy > np.minimum(f_x, f_y))
        or np.any(np.maximum(f_x, f_y) > n_docs)
        or np.any(f_x + f_y - f_xy > n_docs)
    ):
        raise ValueError("invalid counts in batch: need 1 <= f_xy <= min(f_x, f_y) <= n_docs and f_x + f_y - f_xy <= n_docs")
    if BACKEND == "numba":
        return _edge_stats_numba(f_x, f_y, f_xy, n_docs)
    return edge_stats_numpy(f_x, f_y, f_xy, n_docs)
