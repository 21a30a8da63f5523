"""Pure numpy implementations of the hot kernels.

Same signatures and semantics as the compiled ``_kernels`` module; used when
the extension is not built or when LCGF_PURE_PYTHON is set.
"""
from __future__ import annotations

import numpy as np
from scipy.ndimage import maximum_filter1d

BACKEND = "python"


def circular_box_sum(a: np.ndarray, width: int) -> np.ndarray:
    """out[v] = sum of a[(v - k) mod N] over k in {0..width-1}^d."""
    out = np.array(a, dtype=np.float64, copy=True)
    if width == 1:
        return out
    for axis in range(out.ndim):
        n = out.shape[axis]
        head = np.take(out, np.arange(n - width + 1, n), axis=axis)
        ext = np.concatenate([head, out], axis=axis)
        c = np.cumsum(ext, axis=axis)
        zero = np.zeros_like(np.take(c, [0], axis=axis))
        c = np.concatenate([zero, c], axis=axis)
        hi = np.take(c, np.arange(width, width + n), axis=axis)
        lo = np.take(c, np.arange(0, n), axis=axis)
        out = hi - lo
    return out


def _shifted(a: np.ndarray, shift: tuple[int, ...], fill: float) -> np.ndarray:
    """b[v] = a[v + shift] where defined, else fill."""
    out = np.full_like(a, fill)
    src, dst = [], []
    for s, n in zip(shift, a.shape):
        if s >= 0:
            src.append(slice(s, n)), dst.append(slice(0, n - s))
        else:
            src.append(slice(0, n + s)), dst.append(slice(-s, n))
    out[tuple(dst)] = a[tuple(src)]
    return out


def local_max_mask(field: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """True where field[v] >= field[u] for every u = v + offset inside the box."""
    field = np.asarray(field, dtype=np.float64)
    d = field.ndim
    offsets = np.asarray(offsets, dtype=np.int64).reshape(-1, d)
    # the ball is symmetric: each prefix of leading coordinates spans a centred run
    runs: dict[tuple[int, ...], int] = {}
    for o in offsets:
        key = tuple(int(x) for x in o[:-1])
        runs[key] = max(runs.get(key, 0), abs(int(o[-1])))
    filtered: dict[int, np.ndarray] = {}
    best = np.full_like(field, -np.inf)
    for prefix, w in runs.items():
        if w not in filtered:
            filtered[w] = maximum_filter1d(field, 2 * w + 1, axis=d - 1, mode="constant", cval=-np.inf)
        np.maximum(best, _shifted(filtered[w], prefix + (0,), -np.inf), out=best)
    return field >= best


def ball_cluster_sums(field: np.ndarray, centers: np.ndarray, offsets: np.ndarray, beta: float):
    """Per centre c: full-ball and owned-vertex sums of exp(beta (field[u] - field[c])).

    Centres are processed in the given order; a vertex is owned by the first
    centre whose ball contains it.
    """
    field = np.asarray(field, dtype=np.float64)
    shape = field.shape
    flat = field.reshape(-1)
    offsets = np.asarray(offsets, dtype=np.int64).reshape(-1, field.ndim)
    owner = np.zeros(flat.size, dtype=bool)
    full = np.empty(len(centers))
    owned = np.empty(len(centers))
    for k, c in enumerate(np.asarray(centers, dtype=np.int64)):
        pts = offsets + np.array(np.unravel_index(int(c), shape))
        inside = np.all((pts >= 0) & (pts < np.array(shape)), axis=1)
        idx = np.ravel_multi_index(tuple(pts[inside].T), shape)
        w = np.exp(beta * (flat[idx] - flat[c]))
        full[k] = w.sum()
        free = ~owner[idx]
        owned[k] = w[free].sum()
        owner[idx] = True
    return full, owned
