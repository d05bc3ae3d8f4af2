"""Cuts of the unit interval, tile allocations, and configuration points.

A cut with k interior cut-points splits [0, 1] into k+1 closed tiles, some
of which may be degenerate (zero length).  A configuration point pairs a cut
with an allocation of its non-degenerate tiles into boxes; degenerate tiles
are discarded, so two allocations that differ only on degenerate tiles give
the same canonical point.  Canonical points correspond one-to-one with
weighted faces of the variant's complex: cell (box, tile) carries the tile's
length as barycentric weight.

All types are immutable values and every operation is pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .complexes import Variant, is_face

#: tiles at or below this length count as degenerate
DEGENERACY_TOL = 1e-9

Interval = tuple[float, float]


def _clamp01(x: float) -> float:
    return 0.0 if x < 0.0 else (1.0 if x > 1.0 else x)


@dataclass(frozen=True)
class Cut:
    """Non-decreasing cut-points in [0, 1]; tile i is [x_{i-1}, x_i]."""

    points: tuple[float, ...]

    def __post_init__(self):
        pts = tuple(float(p) for p in self.points)
        if any(b < a for a, b in zip(pts, pts[1:])):
            raise ValueError(f"cut-points must be non-decreasing: {pts}")
        if pts and (pts[0] < -1e-12 or pts[-1] > 1 + 1e-12):
            raise ValueError(f"cut-points must lie in [0, 1]: {pts}")
        object.__setattr__(self, "points", tuple(_clamp01(p) for p in pts))

    @property
    def tile_count(self) -> int:
        return len(self.points) + 1

    @cached_property
    def lengths(self) -> tuple[float, ...]:
        bounds = (0.0,) + self.points + (1.0,)
        return tuple(max(0.0, b - a) for a, b in zip(bounds, bounds[1:]))

    def tile(self, label: int) -> Interval:
        bounds = (0.0,) + self.points + (1.0,)
        return (bounds[label - 1], bounds[label])


@dataclass(frozen=True)
class ZPoint:
    """Tile-length vector: a point of the standard simplex."""

    lengths: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.lengths)
        if any(v < -1e-12 for v in vals):
            raise ValueError(f"tile lengths must be non-negative: {vals}")
        total = math.fsum(vals)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"tile lengths must sum to 1, got {total}")
        object.__setattr__(self, "lengths", tuple(max(0.0, v) for v in vals))


def cut_to_z(cut: Cut) -> ZPoint:
    return ZPoint(cut.lengths)


def z_to_cut(z: ZPoint) -> Cut:
    points = []
    acc = 0.0
    for v in z.lengths[:-1]:
        acc += v
        points.append(_clamp01(acc))
    return Cut(tuple(points))


def degenerate_and_essential(
    cut: Cut, tol: float = DEGENERACY_TOL
) -> tuple[frozenset[int], tuple[tuple[Interval, int], ...]]:
    """Split tile labels into degenerate ones and essential (interval, label) pairs."""
    deg = []
    ess = []
    for label, length in enumerate(cut.lengths, start=1):
        if length <= tol:
            deg.append(label)
        else:
            ess.append((cut.tile(label), label))
    return frozenset(deg), tuple(ess)


def essential_intervals(cut: Cut, tol: float = DEGENERACY_TOL) -> tuple[Interval, ...]:
    return tuple(interval for interval, _ in degenerate_and_essential(cut, tol)[1])


def partition_equivalent(a: Cut, b: Cut, tol: float = DEGENERACY_TOL) -> bool:
    """True iff both cuts produce the same set of non-degenerate tiles."""
    ia = essential_intervals(a, tol)
    ib = essential_intervals(b, tol)
    if len(ia) != len(ib):
        return False
    return all(
        abs(x[0] - y[0]) <= tol and abs(x[1] - y[1]) <= tol for x, y in zip(ia, ib)
    )


@dataclass(frozen=True)
class ConfigPoint:
    """Canonical (cut, allocation) pair on one of the board variants.

    The allocation covers exactly the non-degenerate tiles; its support cells
    (box, tile) always form a face of the variant's complex.
    """

    variant: Variant
    cut: Cut
    allocation: tuple[tuple[int, int], ...]  # sorted (tile, box) pairs

    def __post_init__(self):
        if self.cut.tile_count != self.variant.cols:
            raise ValueError(
                f"cut has {self.cut.tile_count} tiles, variant expects {self.variant.cols}"
            )
        alloc = tuple(sorted((int(t), int(b)) for t, b in self.allocation))
        object.__setattr__(self, "allocation", alloc)
        if not is_face(self.variant, self.support_cells):
            raise ValueError(
                f"allocation {dict(alloc)} violates the {self.variant.kind} constraint"
            )

    @property
    def r(self) -> int:
        return self.variant.rows

    @property
    def support_cells(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted((box, tile) for tile, box in self.allocation))

    def allocation_map(self) -> dict[int, int]:
        return dict(self.allocation)

    def boxes(self) -> dict[int, tuple[int, ...]]:
        """Box label -> sorted tiles it holds (occupied boxes only)."""
        out: dict[int, list[int]] = {}
        for tile, box in self.allocation:
            out.setdefault(box, []).append(tile)
        return {b: tuple(sorted(ts)) for b, ts in out.items()}

    def box_lengths(self) -> tuple[float, ...]:
        """Total essential length inside each box, indexed 0..r-1."""
        lengths = self.cut.lengths
        totals = [0.0] * self.r
        for tile, box in self.allocation:
            totals[box - 1] += lengths[tile - 1]
        return tuple(totals)

    def support(self) -> tuple[tuple[tuple[int, int], ...], tuple[float, ...]]:
        """Barycentric representation: support cells with the tile lengths as weights."""
        lengths = self.cut.lengths
        cells = self.support_cells
        return cells, tuple(lengths[tile - 1] for _, tile in cells)

    def to_json(self) -> dict:
        return {
            "variant": self.variant.to_json(),
            "cut": list(self.cut.points),
            "allocation": {str(t): b for t, b in self.allocation},
        }


def canonicalize(
    cut: Cut,
    allocation: Mapping[int, int],
    variant: Variant,
    tol: float = DEGENERACY_TOL,
) -> ConfigPoint:
    """Drop degenerate tiles from an allocation and validate the remainder.

    Idempotent, and constant on the equivalence class generated by
    reassigning degenerate tiles.
    """
    deg, ess = degenerate_and_essential(cut, tol)
    for tile, box in allocation.items():
        if not (1 <= tile <= variant.cols):
            raise ValueError(f"tile label {tile} outside 1..{variant.cols}")
        if not (1 <= box <= variant.rows):
            raise ValueError(f"box label {box} outside 1..{variant.rows}")
    kept = {}
    for _, label in ess:
        if label not in allocation:
            raise ValueError(f"allocation missing non-degenerate tile {label}")
        kept[label] = allocation[label]
    return ConfigPoint(variant, cut, tuple(kept.items()))


def act(sigma: Sequence[int], point: ConfigPoint) -> ConfigPoint:
    """Relabel boxes by a permutation: box b becomes sigma[b-1]; cut unchanged."""
    r = point.r
    if sorted(sigma) != list(range(1, r + 1)):
        raise ValueError(f"{sigma!r} is not a permutation of 1..{r}")
    moved = tuple((tile, sigma[box - 1]) for tile, box in point.allocation)
    return ConfigPoint(point.variant, point.cut, moved)


def point_from_barycentric(
    variant: Variant,
    placement: Iterable[tuple[int, int]],
    weights: Sequence[float],
    tol: float = DEGENERACY_TOL,
) -> ConfigPoint:
    """Rebuild the canonical point of a weighted face of the complex.

    Columns absent from the placement (and columns whose weight falls below
    the degeneracy tolerance) become zero-length tiles, positioned where the
    cut-point ordering forces them; adjacent cut-points then simply collide.
    """
    cells = tuple(placement)
    if len(cells) != len(weights):
        raise ValueError("placement and weights must have equal length")
    if not is_face(variant, cells):
        raise ValueError(f"placement {cells} is not a face of {variant.kind}")
    w = [float(x) for x in weights]
    if any(x < -1e-12 for x in w):
        raise ValueError(f"weights must be non-negative: {w}")
    total = math.fsum(w)
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"weights must sum to 1, got {total}")

    column_weight = {}
    column_row = {}
    for (row, col), weight in zip(cells, w):
        column_weight[col] = max(0.0, weight)
        column_row[col] = row
    z = tuple(column_weight.get(col, 0.0) for col in range(1, variant.cols + 1))
    cut = z_to_cut(ZPoint(z))
    # canonicalize decides degeneracy from the reconstructed lengths, so a
    # weight straddling the tolerance cannot leave an essential tile behind
    return canonicalize(cut, dict(column_row.items()), variant, tol)
