"""Kernel dispatch: compiled extension when available, pure Python otherwise.

Set WAYSCOUT_KERNELS=python or WAYSCOUT_KERNELS=compiled to force a choice
(the latter raises if the extension was not built).  ``ACTIVE`` names the
implementation that won.
"""

import os

_choice = os.environ.get("WAYSCOUT_KERNELS", "auto")
if _choice not in ("auto", "compiled", "python"):
    raise ImportError(f"WAYSCOUT_KERNELS must be auto, compiled or python, got {_choice!r}")

if _choice == "python":
    from . import reference as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        if _choice == "compiled":
            raise
        from . import reference as _impl

ACTIVE = _impl.BACKEND

point_in_polygon = _impl.point_in_polygon
fill_polygon_mask = _impl.fill_polygon_mask
polyline_min_distance = _impl.polyline_min_distance
segment_crosses_polygon = _impl.segment_crosses_polygon
grid_shortest_path = _impl.grid_shortest_path

__all__ = [
    "ACTIVE",
    "point_in_polygon",
    "fill_polygon_mask",
    "polyline_min_distance",
    "segment_crosses_polygon",
    "grid_shortest_path",
]
