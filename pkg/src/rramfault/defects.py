"""Spatial stuck-at defect masks for crossbar arrays.

Six mask families model clustered fabrication faults: filled circles, rings,
circle complements, centered row and column strips, and a checkerboard. A
mask marks logical cells; applying it forces both members of each marked
pair to one stuck conductance (stuck-on or stuck-off), which zeroes the
pair's differential weight either way.
"""

from dataclasses import dataclass

import numpy as np

from .crossbar import LAYER_SHAPES, N_LAYERS
from .device import G_OFF, G_ON

DEFECT_KINDS = ("circle", "ring", "circle_complement", "row", "column", "checkerboard")
SIZED_KINDS = DEFECT_KINDS[:-1]  # checkerboard has a fixed structure, no size knob
STUCK_MODES = ("stuck_on", "stuck_off")
STUCK_LEVELS = {"stuck_on": G_ON, "stuck_off": G_OFF}

SIZE_INDICES = (1, 2, 3, 4)
CIRCLE_RADII = (0.1, 0.2, 0.3, 0.4)
RING_OUTER_RADIUS = 0.5
RING_INNER_RADII = (0.4, 0.36, 0.32, 0.28)
COMPLEMENT_RADII = (0.4, 0.3, 0.2, 0.1)


def _normalized_grid(n_rows, n_cols):
    """Cell-center coordinates with each axis normalized by its own extent.

    x spans columns, y spans rows; a radius of 0.5 reaches the array edge on
    both axes, so circles render as grid-aligned ellipses on oblong arrays.
    """
    cols = np.arange(n_cols, dtype=float)
    rows = np.arange(n_rows, dtype=float)
    x = (cols - (n_cols - 1) / 2.0) / n_cols
    y = (rows - (n_rows - 1) / 2.0) / n_rows
    return np.meshgrid(x, y)


def mask_circle(shape, radius):
    """Cells within ``radius`` of the array center (boundary included)."""
    if radius < 0:
        raise ValueError("radius must be non-negative")
    n_rows, n_cols = shape
    x, y = _normalized_grid(n_rows, n_cols)
    return x * x + y * y <= radius * radius


def mask_ring(shape, inner_radius, outer_radius=RING_OUTER_RADIUS):
    """Annulus: strictly outside ``inner_radius``, inside ``outer_radius``."""
    if not 0 <= inner_radius <= outer_radius:
        raise ValueError("need 0 <= inner_radius <= outer_radius")
    n_rows, n_cols = shape
    x, y = _normalized_grid(n_rows, n_cols)
    r2 = x * x + y * y
    return (r2 > inner_radius * inner_radius) & (r2 <= outer_radius * outer_radius)


def mask_circle_complement(shape, radius):
    """Everything outside the circle; only a central core stays functional."""
    return ~mask_circle(shape, radius)


def mask_row(shape, k):
    """``k`` consecutive rows masked, centered vertically in the array."""
    n_rows, n_cols = shape
    if not 1 <= k <= n_rows:
        raise ValueError(f"row count must be 1..{n_rows}, got {k}")
    start = (n_rows - k) // 2
    grid = np.zeros(shape, dtype=bool)
    grid[start : start + k, :] = True
    return grid


def mask_column(shape, k):
    """``k`` consecutive columns masked, centered horizontally."""
    n_rows, n_cols = shape
    if not 1 <= k <= n_cols:
        raise ValueError(f"column count must be 1..{n_cols}, got {k}")
    return mask_row((n_cols, n_rows), k).T


def mask_checkerboard(shape):
    """Every other cell masked, (row + column) even."""
    n_rows, n_cols = shape
    rows = np.arange(n_rows)[:, None]
    cols = np.arange(n_cols)[None, :]
    return (rows + cols) % 2 == 0


def strip_width(n, size_index):
    """Rows or columns covered at one severity step: 10% of ``n`` per step.

    Integer half-up rounding; the built-in round's half-even tie-breaking
    would make equal-coverage steps land differently across array sizes.
    """
    if size_index not in SIZE_INDICES:
        raise ValueError(f"size_index must be one of {SIZE_INDICES}")
    return max(1, (size_index * n + 5) // 10)


def defect_mask(kind, shape, size_index=None):
    """Mask for one defect configuration on an array of the given shape."""
    if kind == "checkerboard":
        if size_index is not None:
            raise ValueError("checkerboard is not parameterized by size")
        return mask_checkerboard(shape)
    if kind not in SIZED_KINDS:
        raise ValueError(f"unknown defect kind: {kind!r}")
    if size_index not in SIZE_INDICES:
        raise ValueError(f"size_index must be one of {SIZE_INDICES}")
    s = size_index - 1
    if kind == "circle":
        return mask_circle(shape, CIRCLE_RADII[s])
    if kind == "ring":
        return mask_ring(shape, RING_INNER_RADII[s])
    if kind == "circle_complement":
        return mask_circle_complement(shape, COMPLEMENT_RADII[s])
    if kind == "row":
        return mask_row(shape, strip_width(shape[0], size_index))
    return mask_column(shape, strip_width(shape[1], size_index))


def coverage(mask):
    """Fraction of cells the mask marks defective."""
    grid = np.asarray(mask, dtype=bool)
    if grid.size == 0:
        raise ValueError("empty mask grid")
    return float(grid.sum()) / grid.size


def severity_pairs(mask):
    """Defective-pair count, the severity measure used on report axes."""
    return int(np.asarray(mask, dtype=bool).sum())


def apply_defects(array, mask, stuck_mode):
    """New array with every masked pair stuck at one conductance level.

    Both pair members take the same stuck value, so the differential weight
    of a masked cell is exactly zero in either mode.
    """
    if stuck_mode not in STUCK_MODES:
        raise ValueError(f"stuck_mode must be one of {STUCK_MODES}")
    grid = np.asarray(mask, dtype=bool)
    if grid.shape != array.shape:
        raise ValueError(
            f"mask shape {grid.shape} does not match array shape {array.shape}"
        )
    level = STUCK_LEVELS[stuck_mode]
    faulty = array.copy()
    faulty.g_plus[grid] = level
    faulty.g_minus[grid] = level
    return faulty


@dataclass(frozen=True)
class Defect:
    """One injectable defect: kind, severity, target layer, stuck mode."""

    kind: str
    layer_index: int
    size_index: int = None
    stuck_mode: str = "stuck_off"

    def __post_init__(self):
        if self.kind not in DEFECT_KINDS:
            raise ValueError(f"unknown defect kind: {self.kind!r}")
        if self.kind == "checkerboard":
            if self.size_index is not None:
                raise ValueError("checkerboard is not parameterized by size")
        elif self.size_index not in SIZE_INDICES:
            raise ValueError(f"size_index must be one of {SIZE_INDICES}")
        if self.layer_index not in range(N_LAYERS):
            raise ValueError(f"layer_index must be 0..{N_LAYERS - 1}")
        if self.stuck_mode not in STUCK_MODES:
            raise ValueError(f"stuck_mode must be one of {STUCK_MODES}")

    @property
    def shape(self):
        return LAYER_SHAPES[self.layer_index]

    def mask(self):
        return defect_mask(self.kind, self.shape, self.size_index)

    def coverage(self):
        return coverage(self.mask())

    def severity_pairs(self):
        return severity_pairs(self.mask())

    def apply(self, array):
        if array.shape != self.shape:
            raise ValueError(
                f"defect targets layer {self.layer_index} with shape "
                f"{self.shape}, got array of shape {array.shape}"
            )
        return apply_defects(array, self.mask(), self.stuck_mode)

    def label(self):
        if self.kind == "checkerboard":
            return f"checkerboard-L{self.layer_index}-{self.stuck_mode}"
        return f"{self.kind}-{self.size_index}-L{self.layer_index}-{self.stuck_mode}"

    def to_dict(self):
        return {
            "kind": self.kind,
            "size_index": self.size_index,
            "layer_index": self.layer_index,
            "stuck_mode": self.stuck_mode,
        }

    @classmethod
    def from_dict(cls, payload):
        return cls(
            kind=payload["kind"],
            layer_index=payload["layer_index"],
            size_index=payload.get("size_index"),
            stuck_mode=payload.get("stuck_mode", "stuck_off"),
        )


def mask_to_pgm(mask):
    """Plain-text PGM rendering of a mask, defective cells dark."""
    grid = np.asarray(mask, dtype=bool)
    n_rows, n_cols = grid.shape
    lines = ["P2", f"{n_cols} {n_rows}", "255"]
    for row in grid:
        lines.append(" ".join("0" if cell else "255" for cell in row))
    return "\n".join(lines) + "\n"


def mask_to_csv(mask):
    """0/1 CSV rendering of a mask, 1 = defective."""
    grid = np.asarray(mask, dtype=bool)
    lines = [",".join("1" if cell else "0" for cell in row) for row in grid]
    return "\n".join(lines) + "\n"
