# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; see _kernels_py for the reference semantics."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp

cnp.import_array()

BACKEND = "cython"


def circular_box_sum(a, Py_ssize_t width):
    """out[v] = sum of a[(v - k) mod N] over k in {0..width-1}^d."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] buf = np.array(a, dtype=np.float64, copy=True).reshape(-1)
    shape = np.shape(a)
    if width == 1:
        return buf.reshape(shape)
    cdef Py_ssize_t d = len(shape)
    cdef Py_ssize_t total = buf.shape[0]
    cdef Py_ssize_t axis, n, stride, outer, inner, o, i, k, base
    cdef double s
    cdef cnp.ndarray[cnp.float64_t, ndim=1] line
    cdef double[:] b = buf
    cdef double[:] ln
    for axis in range(d):
        n = shape[axis]
        stride = 1
        for k in range(axis + 1, d):
            stride *= shape[k]
        outer = total // (n * stride)
        line = np.empty(n, dtype=np.float64)
        ln = line
        for o in range(outer):
            for inner in range(stride):
                base = o * n * stride + inner
                for i in range(n):
                    ln[i] = b[base + i * stride]
                s = 0.0
                for k in range(width):
                    s += ln[(n - k) % n]
                # s is the window ending at index 0
                for i in range(n):
                    if i > 0:
                        s += ln[i] - ln[(i - width + n) % n]
                    b[base + i * stride] = s
    return buf.reshape(shape)


def local_max_mask(field, offsets):
    """True where field[v] >= field[u] for every u = v + offset inside the box."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] f = np.ascontiguousarray(field, dtype=np.float64).reshape(-1)
    shape = np.shape(field)
    cdef Py_ssize_t d = len(shape)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] off = np.ascontiguousarray(offsets, dtype=np.int64).reshape(-1, d)
    cdef Py_ssize_t m = off.shape[0]
    cdef Py_ssize_t total = f.shape[0]
    cdef Py_ssize_t dims[4]
    cdef Py_ssize_t strides[4]
    cdef Py_ssize_t coord[4]
    cdef Py_ssize_t a, k, v, x, u
    cdef bint ok
    cdef double fv
    for a in range(d):
        dims[a] = shape[a]
    strides[d - 1] = 1
    for a in range(d - 2, -1, -1):
        strides[a] = strides[a + 1] * dims[a + 1]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] delta = np.zeros(m, dtype=np.int64)
    for k in range(m):
        for a in range(d):
            delta[k] += off[k, a] * strides[a]
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] mask = np.ones(total, dtype=np.uint8)
    for a in range(d):
        coord[a] = 0
    for v in range(total):
        fv = f[v]
        for k in range(m):
            ok = True
            for a in range(d):
                x = coord[a] + off[k, a]
                if x < 0 or x >= dims[a]:
                    ok = False
                    break
            if ok and f[v + delta[k]] > fv:
                mask[v] = 0
                break
        # advance the row-major coordinate counter
        a = d - 1
        while a >= 0:
            coord[a] += 1
            if coord[a] < dims[a]:
                break
            coord[a] = 0
            a -= 1
    return mask.view(np.bool_).reshape(shape)


def ball_cluster_sums(field, centers, offsets, double beta):
    """Per centre c: full-ball and owned-vertex sums of exp(beta (field[u] - field[c]))."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] f = np.ascontiguousarray(field, dtype=np.float64).reshape(-1)
    shape = np.shape(field)
    cdef Py_ssize_t d = len(shape)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] off = np.ascontiguousarray(offsets, dtype=np.int64).reshape(-1, d)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] cs = np.ascontiguousarray(centers, dtype=np.int64).reshape(-1)
    cdef Py_ssize_t m = off.shape[0]
    cdef Py_ssize_t nc = cs.shape[0]
    cdef Py_ssize_t dims[4]
    cdef Py_ssize_t strides[4]
    cdef Py_ssize_t coord[4]
    cdef Py_ssize_t a, k, j, c, x, u, rem
    cdef bint ok
    cdef double fc, w, sfull, sown
    for a in range(d):
        dims[a] = shape[a]
    strides[d - 1] = 1
    for a in range(d - 2, -1, -1):
        strides[a] = strides[a + 1] * dims[a + 1]
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] owner = np.zeros(f.shape[0], dtype=np.uint8)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] full = np.empty(nc, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] owned = np.empty(nc, dtype=np.float64)
    for j in range(nc):
        c = cs[j]
        rem = c
        for a in range(d):
            coord[a] = rem // strides[a]
            rem = rem % strides[a]
        fc = f[c]
        sfull = 0.0
        sown = 0.0
        for k in range(m):
            ok = True
            u = 0
            for a in range(d):
                x = coord[a] + off[k, a]
                if x < 0 or x >= dims[a]:
                    ok = False
                    break
                u += x * strides[a]
            if not ok:
                continue
            w = exp(beta * (f[u] - fc))
            sfull += w
            if owner[u] == 0:
                sown += w
                owner[u] = 1
        full[j] = sfull
        owned[j] = sown
    return full, owned
