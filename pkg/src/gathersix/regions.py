"""Coarse board regions: a fixed 3x3 partition with canonical names.

Players describe card locations in region terms ("the very top left
corner", "somewhere in the middle"). Region names are free-form strings
at the common-ground level; this module grounds the nine canonical names
to cells so an agent can navigate toward one.
"""

from __future__ import annotations

import re

Coord = tuple[int, int]

REGION_NAMES = (
    "top-left", "top", "top-right",
    "left", "center", "right",
    "bottom-left", "bottom", "bottom-right",
)

_VERTICAL = {"top": 0, "upper": 0, "bottom": 2, "lower": 2}
_HORIZONTAL = {"left": 0, "right": 2}
_MIDDLE = {"middle", "center", "centre", "central"}

# name → (column band, row band), bands indexed 0..2
_BANDS = {
    name: (col, row)
    for row, row_names in enumerate(
        (REGION_NAMES[0:3], REGION_NAMES[3:6], REGION_NAMES[6:9]))
    for col, name in enumerate(row_names)
}


def _band_of(v: int, size: int) -> int:
    return min(2, 3 * v // size)


def _band_cells(band: int, size: int) -> list[int]:
    return [v for v in range(size) if _band_of(v, size) == band]


def region_of(pos: Coord, width: int, height: int) -> str:
    """Canonical region name containing a cell."""
    col = _band_of(pos[0], width)
    row = _band_of(pos[1], height)
    return (REGION_NAMES[0:3], REGION_NAMES[3:6], REGION_NAMES[6:9])[row][col]


def region_cells(name: str, width: int, height: int) -> list[Coord]:
    """All cells of a named region, row-major order."""
    col, row = _BANDS[name]
    xs = _band_cells(col, width)
    ys = _band_cells(row, height)
    return [(x, y) for y in ys for x in xs]


def region_centroid(name: str, width: int, height: int) -> Coord:
    """Representative cell of a region: the median cell of its band ranges."""
    col, row = _BANDS[name]
    xs = _band_cells(col, width)
    ys = _band_cells(row, height)
    return (xs[len(xs) // 2], ys[len(ys) // 2])


def parse_region_phrase(text: str) -> str | None:
    """Extract a canonical region name from a free-form place phrase.

    Understands modifier words ("very top left corner" → "top-left") and
    middle/center synonyms. Returns None when no region words appear.
    """
    words = re.findall(r"[a-z]+", text.lower())
    vert = next((_VERTICAL[w] for w in words if w in _VERTICAL), None)
    horiz = next((_HORIZONTAL[w] for w in words if w in _HORIZONTAL), None)
    if vert is None and horiz is None:
        if any(w in _MIDDLE for w in words):
            return "center"
        return None
    row = vert if vert is not None else 1
    col = horiz if horiz is not None else 1
    return (REGION_NAMES[0:3], REGION_NAMES[3:6], REGION_NAMES[6:9])[row][col]
