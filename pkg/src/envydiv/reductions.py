"""Lift tile-level preferences onto the configuration spaces.

``psi`` turns an old-style oracle into a box oracle on the shared-last-tile
space (c1): a box inherits the best score of the tiles it holds, and empty
boxes inherit the common degenerate-tile score whenever degenerate tiles
exist.  It requires a source that never prefers a short-but-positive last
tile; that margin is what keeps the lifted scores consistent as the last
tile shrinks to a point.

``phi`` turns a partition-equivalence oracle into a box oracle on the
one-tile-per-box space (c2): the doubled cut is first reduced back to r
tiles by deleting superfluous cut-points, each box is scored by its tile's
score in the reduced cut, and empty boxes split the degenerate score.  The
reduction is computed along two different deletion orders on every query;
any disagreement is reported as a partition-equivalence violation of the
source.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .complexes import chessboard, gorbushka_join
from .configspace import (
    DEGENERACY_TOL,
    ConfigPoint,
    Cut,
    degenerate_and_essential,
)
from .preferences import (
    NEW,
    OLD,
    PREFERENCE_TOL,
    PreferenceMatrix,
    PreferenceValidationError,
    scores,
    validate,
)


class InadmissibleCutError(ValueError):
    """The cut has too few degenerate tiles to be reduced."""


@dataclass
class ReducedPreferences(PreferenceMatrix):
    """A new-style oracle produced by lifting an old-style source."""

    source: PreferenceMatrix | None = None
    epsilon: float | None = None


def eliminate_superfluous(cut: Cut, keep: str = "left", tol: float = DEGENERACY_TOL) -> Cut:
    """Reduce a 2r-2 point cut to r-1 points with the same essential tiles.

    Deletion is deterministic: duplicate cut-points lose all but their
    ``keep`` ("left" or "right") representative, and leftover quota falls on
    cut-points pinned to the interval ends, which only ever bound degenerate
    tiles.  The output is always partition-equivalent to the input.
    """
    if keep not in ("left", "right"):
        raise ValueError("keep must be 'left' or 'right'")
    points = cut.points
    if len(points) < 2 or len(points) % 2:
        raise ValueError(f"expected 2r-2 cut-points, got {len(points)}")
    r = len(points) // 2 + 1
    quota = r - 1

    # maximal runs of (tolerance-)equal values
    blocks: list[list[int]] = [[0]]
    for i in range(1, len(points)):
        if points[i] - points[i - 1] <= tol:
            blocks[-1].append(i)
        else:
            blocks.append([i])

    candidates: list[int] = []
    if keep == "left":
        for block in blocks:
            candidates.extend(block[1:])
        zero_block = blocks[0] if points[blocks[0][0]] <= tol else None
        one_block = blocks[-1] if points[blocks[-1][-1]] >= 1.0 - tol else None
        if zero_block:
            candidates.append(zero_block[0])
        if one_block:
            candidates.append(one_block[0])
    else:
        for block in reversed(blocks):
            candidates.extend(reversed(block[:-1]))
        one_block = blocks[-1] if points[blocks[-1][-1]] >= 1.0 - tol else None
        zero_block = blocks[0] if points[blocks[0][0]] <= tol else None
        if one_block:
            candidates.append(one_block[-1])
        if zero_block:
            candidates.append(zero_block[-1])

    if len(candidates) < quota:
        raise InadmissibleCutError(
            f"cut needs at least {quota} degenerate tiles to reduce, found {len(candidates)}"
        )
    drop = set(candidates[:quota])
    return Cut(tuple(p for i, p in enumerate(points) if i not in drop))


def _normalized_source_scores(source, player, lengths):
    s = scores(source, player, lengths)
    if float(s.sum()) <= 0.0:
        raise PreferenceValidationError(
            "source oracle accepts nothing at a sampled point (covering violated)"
        )
    return s


def psi(
    old_prefs: PreferenceMatrix,
    epsilon: float | None = None,
    check_samples: int = 200,
    seed: int = 0,
) -> ReducedPreferences:
    """Lift an old-style oracle to boxes on the shared-last-tile space (c1).

    Box rules, given the source scores at the point's cut: every empty box
    gets the degenerate-tile score whenever degenerate tiles exist; a box
    with one tile gets that tile's score; a box holding the last tile and
    another tile gets the larger of the two scores.  A box holding the last
    tile alone additionally inherits the degenerate score when degenerate
    tiles exist.  Rows are then normalized to sum 1.

    ``epsilon`` is the length below which the source must give the last
    tile a zero score; sampling enforces this and a breach raises.
    """
    if old_prefs.kind != OLD:
        raise ValueError("psi expects an old-style oracle")
    r = old_prefs.r
    if epsilon is None:
        if old_prefs.model == "hungry":
            epsilon = float(old_prefs.params.get("margin", 1e-3))
        else:
            raise ValueError("psi needs an explicit epsilon for this model")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")

    for prop in ("covering", "p_dte"):
        report = validate(old_prefs, prop, sample_count=check_samples, seed=seed)
        if not report.passed:
            raise PreferenceValidationError(
                f"psi source fails {prop}: {len(report.violations)} violations"
            )
    _check_short_last_tile(old_prefs, epsilon, check_samples, seed)

    def raw(player, point: ConfigPoint):
        if point.cut.tile_count != r:
            raise ValueError(f"expected a point with {r} tiles")
        z = point.cut.lengths
        s = _normalized_source_scores(old_prefs, player, z)
        deg, _ = degenerate_and_essential(point.cut)
        deg_score = float(s[min(deg) - 1]) if deg else 0.0
        boxes = point.boxes()
        out = []
        for box in range(1, r + 1):
            tiles = boxes.get(box, ())
            if not tiles:
                # every empty box carries the full degenerate score; the row
                # normalization spreads the mass, and the value of a box that
                # empties out stays continuous in the empty-box count
                out.append(deg_score if deg else 0.0)
            elif len(tiles) == 2:
                if r not in tiles:
                    raise ValueError("a shared box must contain the last tile")
                out.append(max(float(s[t - 1]) for t in tiles))
            elif tiles[0] != r:
                out.append(float(s[tiles[0] - 1]))
            elif deg:
                out.append(max(float(s[r - 1]), deg_score))
            else:
                out.append(float(s[r - 1]))
        return out

    return ReducedPreferences(
        r=r,
        kind=NEW,
        model=f"psi({old_prefs.model})",
        raw=raw,
        variant=gorbushka_join(r),
        params={"epsilon": epsilon},
        source=old_prefs,
        epsilon=epsilon,
    )


def _check_short_last_tile(old_prefs, epsilon, check_samples, seed):
    """Sample last-tile lengths in (0, epsilon) and demand a zero score."""
    r = old_prefs.r
    rng = np.random.default_rng(seed)
    lows = max(10 * DEGENERACY_TOL, epsilon * 1e-3)
    for i in range(check_samples):
        t = float(lows + (epsilon - lows) * (i + 0.5) / check_samples)
        rest = rng.dirichlet(np.ones(r - 1)) * (1.0 - t)
        z = tuple(float(v) for v in rest) + (t,)
        for j in range(1, r + 1):
            if float(scores(old_prefs, j, z)[r - 1]) > PREFERENCE_TOL:
                raise PreferenceValidationError(
                    f"source prefers the last tile at length {t:.3g} < epsilon={epsilon:.3g}"
                )


def phi(
    old_prefs: PreferenceMatrix,
    keep: str = "left",
    check_samples: int = 120,
    seed: int = 0,
    consistency_tol: float = 1e-9,
) -> ReducedPreferences:
    """Lift a partition-equivalence oracle to boxes on the c2 space.

    Every query reduces the doubled cut with the requested deletion order
    and re-runs the mirrored order; box scores that disagree beyond
    ``consistency_tol`` mean the source is not partition-equivalent and
    raise an error.
    """
    if old_prefs.kind != OLD:
        raise ValueError("phi expects an old-style oracle")
    r = old_prefs.r
    for prop in ("covering", "p_pe"):
        report = validate(old_prefs, prop, sample_count=check_samples, seed=seed)
        if not report.passed:
            raise PreferenceValidationError(
                f"phi source fails {prop}: {len(report.violations)} violations"
            )

    def box_scores(player, point, which):
        reduced = eliminate_superfluous(point.cut, keep=which)
        s = _normalized_source_scores(old_prefs, player, reduced.lengths)
        deg_reduced, ess_reduced = degenerate_and_essential(reduced)
        _, ess_full = degenerate_and_essential(point.cut)
        tile_to_box = point.allocation_map()
        out = [0.0] * r
        occupied = set()
        # the k-th essential interval keeps its identity across the reduction
        for k, (_, full_label) in enumerate(ess_full):
            box = tile_to_box[full_label]
            out[box - 1] = float(s[ess_reduced[k][1] - 1])
            occupied.add(box)
        empty = [b for b in range(1, r + 1) if b not in occupied]
        if deg_reduced and empty:
            deg_score = float(s[min(deg_reduced) - 1])
            if deg_score > PREFERENCE_TOL:
                share = deg_score / len(empty)
                for b in empty:
                    out[b - 1] = share
        return out

    other = "right" if keep == "left" else "left"

    def raw(player, point: ConfigPoint):
        if point.cut.tile_count != 2 * r - 1:
            raise ValueError(f"expected a point with {2 * r - 1} tiles")
        primary = box_scores(player, point, keep)
        mirror = box_scores(player, point, other)
        drift = max(abs(a - b) for a, b in zip(primary, mirror))
        if drift > consistency_tol:
            raise PreferenceValidationError(
                f"superfluous-cut eliminations disagree by {drift:.3g}; "
                "source is not partition-equivalent"
            )
        return primary

    return ReducedPreferences(
        r=r,
        kind=NEW,
        model=f"phi({old_prefs.model})",
        raw=raw,
        variant=chessboard(r, 2 * r - 1),
        params={"keep": keep},
        source=old_prefs,
    )
