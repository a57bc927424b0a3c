"""Pure-Python geometry and grid-search kernels.

This is the fallback implementation used when the compiled extension is
unavailable (or when WAYSCOUT_KERNELS=python).  The compiled twin in
``_core.pyx`` follows the same algorithms, in the same operation order, so
the two give matching results; the parity tests compare them directly.

Polygons and polylines are float64 numpy arrays of shape (n, 2).
"""

import heapq
import math

import numpy as np

BACKEND = "python"

SQRT2 = math.sqrt(2.0)

# (dy, dx, diagonal?) in a fixed relaxation order shared with the extension.
NEIGHBOR_OFFSETS = (
    (-1, -1, True),
    (-1, 0, False),
    (-1, 1, True),
    (0, -1, False),
    (0, 1, False),
    (1, -1, True),
    (1, 0, False),
    (1, 1, True),
)


def point_in_polygon(x, y, poly) -> bool:
    """Even-odd ray-crossing containment test."""
    n = len(poly)
    inside = False
    j = n - 1
    for i in range(n):
        xi, yi = poly[i, 0], poly[i, 1]
        xj, yj = poly[j, 0], poly[j, 1]
        if (yi > y) != (yj > y):
            x_cross = (xj - xi) * (y - yi) / (yj - yi) + xi
            if x < x_cross:
                inside = not inside
        j = i
    return inside


def fill_polygon_mask(mask, poly, origin_x, origin_y, resolution) -> None:
    """Mark every cell whose center lies inside ``poly`` (mask is ny-by-nx uint8)."""
    ny, nx = mask.shape
    min_x = poly[:, 0].min()
    max_x = poly[:, 0].max()
    min_y = poly[:, 1].min()
    max_y = poly[:, 1].max()
    ix0 = max(0, int((min_x - origin_x) / resolution) - 1)
    ix1 = min(nx - 1, int((max_x - origin_x) / resolution) + 1)
    iy0 = max(0, int((min_y - origin_y) / resolution) - 1)
    iy1 = min(ny - 1, int((max_y - origin_y) / resolution) + 1)
    for iy in range(iy0, iy1 + 1):
        cy = origin_y + (iy + 0.5) * resolution
        for ix in range(ix0, ix1 + 1):
            cx = origin_x + (ix + 0.5) * resolution
            if point_in_polygon(cx, cy, poly):
                mask[iy, ix] = 1


def polyline_min_distance(x, y, pts) -> float:
    """Minimum distance from (x, y) to a polyline (single point allowed)."""
    m = len(pts)
    if m == 1:
        return math.sqrt((x - pts[0, 0]) ** 2 + (y - pts[0, 1]) ** 2)
    best = math.inf
    for i in range(m - 1):
        ax, ay = pts[i, 0], pts[i, 1]
        bx, by = pts[i + 1, 0], pts[i + 1, 1]
        dx, dy = bx - ax, by - ay
        seg_sq = dx * dx + dy * dy
        if seg_sq > 0.0:
            t = ((x - ax) * dx + (y - ay) * dy) / seg_sq
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
        else:
            t = 0.0
        px, py = ax + t * dx, ay + t * dy
        d = math.sqrt((x - px) ** 2 + (y - py) ** 2)
        if d < best:
            best = d
    return best


def _orient(ax, ay, bx, by, cx, cy) -> float:
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _on_segment(ax, ay, bx, by, px, py) -> bool:
    return min(ax, bx) <= px <= max(ax, bx) and min(ay, by) <= py <= max(ay, by)


def _segments_intersect(ax, ay, bx, by, cx, cy, dx, dy) -> bool:
    d1 = _orient(cx, cy, dx, dy, ax, ay)
    d2 = _orient(cx, cy, dx, dy, bx, by)
    d3 = _orient(ax, ay, bx, by, cx, cy)
    d4 = _orient(ax, ay, bx, by, dx, dy)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
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


def segment_crosses_polygon(ax, ay, bx, by, poly) -> bool:
    """True if segment a-b touches the polygon boundary or starts/ends inside."""
    n = len(poly)
    j = n - 1
    for i in range(n):
        if _segments_intersect(
            ax, ay, bx, by, poly[j, 0], poly[j, 1], poly[i, 0], poly[i, 1]
        ):
            return True
        j = i
    return point_in_polygon(ax, ay, poly) or point_in_polygon(bx, by, poly)


def grid_shortest_path(blocked, sources, resolution):
    """Multi-source Dijkstra over an 8-connected grid of cell centers.

    blocked      ny-by-nx uint8 array, nonzero = impassable
    sources      flat cell indices with distance zero
    resolution   cell edge length in meters

    Diagonal steps are disallowed when both adjacent orthogonal cells are
    blocked (no corner cutting).  Returns flat (distance, parent) arrays;
    unreached cells hold inf / -1.
    """
    ny, nx = blocked.shape
    total = nx * ny
    dist = np.full(total, np.inf, dtype=np.float64)
    parent = np.full(total, -1, dtype=np.int32)
    flat = blocked.reshape(-1)
    diag_cost = resolution * SQRT2

    heap = []
    for s in sorted(int(v) for v in sources):
        if flat[s]:
            continue
        if dist[s] > 0.0:
            dist[s] = 0.0
            heapq.heappush(heap, (0.0, s))

    while heap:
        d, idx = heapq.heappop(heap)
        if d > dist[idx]:
            continue
        iy, ix = divmod(idx, nx)
        for dy, dx, diagonal in NEIGHBOR_OFFSETS:
            jy, jx = iy + dy, ix + dx
            if jy < 0 or jy >= ny or jx < 0 or jx >= nx:
                continue
            jdx = jy * nx + jx
            if flat[jdx]:
                continue
            if diagonal and flat[iy * nx + jx] and flat[jy * nx + ix]:
                continue
            nd = d + (diag_cost if diagonal else resolution)
            if nd < dist[jdx]:
                dist[jdx] = nd
                parent[jdx] = idx
                heapq.heappush(heap, (nd, jdx))

    return dist, parent
