# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled geometry and grid-search kernels.

Same algorithms and operation order as ``reference.py``; keep the two in
lockstep when changing either.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, sqrt
from libc.stdlib cimport free, malloc

cnp.import_array()

BACKEND = "compiled"

cdef double SQRT2 = sqrt(2.0)

# Matches reference.NEIGHBOR_OFFSETS.
cdef int[8] OFF_DY = [-1, -1, -1, 0, 0, 1, 1, 1]
cdef int[8] OFF_DX = [-1, 0, 1, -1, 1, -1, 0, 1]
cdef int[8] OFF_DIAG = [1, 0, 1, 0, 0, 1, 0, 1]


cdef bint _point_in_polygon(double x, double y, double[:, :] poly) noexcept nogil:
    cdef Py_ssize_t n = poly.shape[0]
    cdef bint inside = False
    cdef Py_ssize_t i, j
    cdef double xi, yi, xj, yj, x_cross
    j = n - 1
    for i in range(n):
        xi = poly[i, 0]
        yi = poly[i, 1]
        xj = poly[j, 0]
        yj = poly[j, 1]
        if (yi > y) != (yj > y):
            x_cross = (xj - xi) * (y - yi) / (yj - yi) + xi
            if x < x_cross:
                inside = not inside
        j = i
    return inside


def point_in_polygon(double x, double y, double[:, :] poly):
    return bool(_point_in_polygon(x, y, poly))


def fill_polygon_mask(unsigned char[:, :] mask, double[:, :] poly,
                      double origin_x, double origin_y, double resolution):
    cdef Py_ssize_t ny = mask.shape[0]
    cdef Py_ssize_t nx = mask.shape[1]
    cdef Py_ssize_t n = poly.shape[0]
    cdef double min_x = poly[0, 0], max_x = poly[0, 0]
    cdef double min_y = poly[0, 1], max_y = poly[0, 1]
    cdef Py_ssize_t i, ix, iy
    for i in range(1, n):
        if poly[i, 0] < min_x:
            min_x = poly[i, 0]
        if poly[i, 0] > max_x:
            max_x = poly[i, 0]
        if poly[i, 1] < min_y:
            min_y = poly[i, 1]
        if poly[i, 1] > max_y:
            max_y = poly[i, 1]
    cdef Py_ssize_t ix0 = <Py_ssize_t>((min_x - origin_x) / resolution) - 1
    cdef Py_ssize_t ix1 = <Py_ssize_t>((max_x - origin_x) / resolution) + 1
    cdef Py_ssize_t iy0 = <Py_ssize_t>((min_y - origin_y) / resolution) - 1
    cdef Py_ssize_t iy1 = <Py_ssize_t>((max_y - origin_y) / resolution) + 1
    if ix0 < 0:
        ix0 = 0
    if iy0 < 0:
        iy0 = 0
    if ix1 > nx - 1:
        ix1 = nx - 1
    if iy1 > ny - 1:
        iy1 = ny - 1
    cdef double cx, cy
    for iy in range(iy0, iy1 + 1):
        cy = origin_y + (iy + 0.5) * resolution
        for ix in range(ix0, ix1 + 1):
            cx = origin_x + (ix + 0.5) * resolution
            if _point_in_polygon(cx, cy, poly):
                mask[iy, ix] = 1


def polyline_min_distance(double x, double y, double[:, :] pts):
    cdef Py_ssize_t m = pts.shape[0]
    cdef double best, ax, ay, bx, by, dx, dy, seg_sq, t, px, py, d
    cdef Py_ssize_t i
    if m == 1:
        return sqrt((x - pts[0, 0]) ** 2 + (y - pts[0, 1]) ** 2)
    best = INFINITY
    for i in range(m - 1):
        ax = pts[i, 0]
        ay = pts[i, 1]
        bx = pts[i + 1, 0]
        by = pts[i + 1, 1]
        dx = bx - ax
        dy = by - ay
        seg_sq = dx * dx + dy * dy
        if seg_sq > 0.0:
            t = ((x - ax) * dx + (y - ay) * dy) / seg_sq
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
        else:
            t = 0.0
        px = ax + t * dx
        py = ay + t * dy
        d = sqrt((x - px) ** 2 + (y - py) ** 2)
        if d < best:
            best = d
    return best


cdef inline double _orient(double ax, double ay, double bx, double by,
                           double cx, double cy) noexcept nogil:
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


cdef inline bint _on_segment(double ax, double ay, double bx, double by,
                             double px, double py) noexcept nogil:
    cdef double lo_x = ax if ax < bx else bx
    cdef double hi_x = ax if ax > bx else bx
    cdef double lo_y = ay if ay < by else by
    cdef double hi_y = ay if ay > by else by
    return lo_x <= px <= hi_x and lo_y <= py <= hi_y


cdef bint _segments_intersect(double ax, double ay, double bx, double by,
                              double cx, double cy, double dx, double dy) noexcept nogil:
    cdef double d1 = _orient(cx, cy, dx, dy, ax, ay)
    cdef double d2 = _orient(cx, cy, dx, dy, bx, by)
    cdef double d3 = _orient(ax, ay, bx, by, cx, cy)
    cdef double d4 = _orient(ax, ay, bx, by, dx, dy)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and \
            ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return True
    if d1 == 0 and _on_segment(cx, cy, dx, dy, ax, ay):
        return True
    if d2 == 0 and _on_segment(cx, cy, dx, dy, bx, by):
        return True
    if d3 == 0 and _on_segment(ax, ay, bx, by, cx, cy):
        return True
    if d4 == 0 and _on_segment(ax, ay, bx, by, dx, dy):
        return True
    return False


def segment_crosses_polygon(double ax, double ay, double bx, double by,
                            double[:, :] poly):
    cdef Py_ssize_t n = poly.shape[0]
    cdef Py_ssize_t i, j
    j = n - 1
    for i in range(n):
        if _segments_intersect(ax, ay, bx, by,
                               poly[j, 0], poly[j, 1], poly[i, 0], poly[i, 1]):
            return True
        j = i
    return bool(_point_in_polygon(ax, ay, poly) or _point_in_polygon(bx, by, poly))


# Binary heap over (distance, index) keys replicating heapq's sift order so
# the pop sequence, and hence any tie-dependent result, matches the fallback.
cdef struct Heap:
    double* keys
    int* idxs
    Py_ssize_t size
    Py_ssize_t cap


cdef int _heap_push(Heap* h, double key, int idx) except -1 nogil:
    cdef Py_ssize_t pos, parentpos
    cdef double* nk
    cdef int* ni
    if h.size == h.cap:
        h.cap = h.cap * 2
        nk = <double*>malloc(h.cap * sizeof(double))
        ni = <int*>malloc(h.cap * sizeof(int))
        if nk == NULL or ni == NULL:
            with gil:
                raise MemoryError()
        for pos in range(h.size):
            nk[pos] = h.keys[pos]
            ni[pos] = h.idxs[pos]
        free(h.keys)
        free(h.idxs)
        h.keys = nk
        h.idxs = ni
    pos = h.size
    h.size += 1
    # sift toward the root
    while pos > 0:
        parentpos = (pos - 1) >> 1
        if key < h.keys[parentpos] or (key == h.keys[parentpos] and idx < h.idxs[parentpos]):
            h.keys[pos] = h.keys[parentpos]
            h.idxs[pos] = h.idxs[parentpos]
            pos = parentpos
        else:
            break
    h.keys[pos] = key
    h.idxs[pos] = idx
    return 0


cdef void _heap_pop(Heap* h, double* key_out, int* idx_out) noexcept nogil:
    cdef double key = h.keys[0]
    cdef int idx = h.idxs[0]
    cdef double last_key
    cdef int last_idx
    cdef Py_ssize_t pos, child
    key_out[0] = key
    idx_out[0] = idx
    h.size -= 1
    if h.size == 0:
        return
    last_key = h.keys[h.size]
    last_idx = h.idxs[h.size]
    pos = 0
    child = 1
    while child < h.size:
        if child + 1 < h.size:
            if h.keys[child + 1] < h.keys[child] or (
                    h.keys[child + 1] == h.keys[child] and h.idxs[child + 1] < h.idxs[child]):
                child += 1
        if h.keys[child] < last_key or (h.keys[child] == last_key and h.idxs[child] < last_idx):
            h.keys[pos] = h.keys[child]
            h.idxs[pos] = h.idxs[child]
            pos = child
            child = 2 * pos + 1
        else:
            break
    h.keys[pos] = last_key
    h.idxs[pos] = last_idx


def grid_shortest_path(unsigned char[:, :] blocked, sources, double resolution):
    cdef Py_ssize_t ny = blocked.shape[0]
    cdef Py_ssize_t nx = blocked.shape[1]
    cdef Py_ssize_t total = nx * ny
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dist_arr = np.full(total, np.inf, dtype=np.float64)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] parent_arr = np.full(total, -1, dtype=np.int32)
    cdef double[:] dist = dist_arr
    cdef int[:] parent = parent_arr

    src = np.unique(np.asarray(sources, dtype=np.int64))
    cdef long long[:] src_view = src
    cdef Py_ssize_t n_src = src_view.shape[0]

    cdef Heap heap
    heap.cap = 1024
    heap.size = 0
    heap.keys = <double*>malloc(heap.cap * sizeof(double))
    heap.idxs = <int*>malloc(heap.cap * sizeof(int))
    if heap.keys == NULL or heap.idxs == NULL:
        raise MemoryError()

    cdef double diag_cost = resolution * SQRT2
    cdef Py_ssize_t k
    cdef int s, idx, jdx
    cdef Py_ssize_t iy, ix, jy, jx
    cdef double d, nd
    cdef int o

    try:
        with nogil:
            for k in range(n_src):
                s = <int>src_view[k]
                if blocked[s // nx, s % nx]:
                    continue
                if dist[s] > 0.0:
                    dist[s] = 0.0
                    _heap_push(&heap, 0.0, s)
            while heap.size > 0:
                _heap_pop(&heap, &d, &idx)
                if d > dist[idx]:
                    continue
                iy = idx // nx
                ix = idx % nx
                for o in range(8):
                    jy = iy + OFF_DY[o]
                    jx = ix + OFF_DX[o]
                    if jy < 0 or jy >= ny or jx < 0 or jx >= nx:
                        continue
                    jdx = <int>(jy * nx + jx)
                    if blocked[jy, jx]:
                        continue
                    if OFF_DIAG[o] and blocked[iy, jx] and blocked[jy, ix]:
                        continue
                    nd = d + (diag_cost if OFF_DIAG[o] else resolution)
                    if nd < dist[jdx]:
                        dist[jdx] = nd
                        parent[jdx] = idx
                        _heap_push(&heap, nd, jdx)
    finally:
        free(heap.keys)
        free(heap.idxs)

    return dist_arr, parent_arr
