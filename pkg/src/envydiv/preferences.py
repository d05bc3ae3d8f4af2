"""Player preferences as continuous score oracles.

An oracle assigns every player, at every domain point, a non-negative score
vector that normalizes to sum 1; a box or tile counts as *preferred* when
its score exceeds ``PREFERENCE_TOL``.  Old-style oracles are functions of a
tile-length vector (r tiles); new-style oracles are functions of a
configuration point and score the r boxes.

Built-in models:

* ``hungry`` -- score grows with length, and pieces shorter than a margin
  score exactly zero, so nobody wants a crumb.
* ``gorbushka`` -- players only want an end slice of the loaf; with
  ``dte=True`` every degenerate tile is equally acceptable as well.
* ``burnt`` -- score falls with length (a mostly-burnt cake), with all
  sufficiently small pieces, including degenerate ones, maximally scored.
* ``piecewise_random`` -- seeded piecewise-linear scores with a positive
  floor, covering and box-label-blind by construction.

Oracles must be pure and deterministic per (player, point); the solver may
evaluate them from many workers at once.  Validation is statistical
(seeded sampling) and can only falsify a property, never prove it; in
particular closedness of preferred sets has no finite certificate for a
black-box oracle, so the ``continuity`` check is a documented heuristic
stand-in.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import complexes
from .complexes import Variant
from .configspace import ConfigPoint, Cut, ZPoint, act, point_from_barycentric

#: scores above this threshold count as "preferred"
PREFERENCE_TOL = 1e-9

OLD = "old"
NEW = "new"

HUNGRY_MARGIN = 1e-3
GORBUSHKA_WIDTH = 1e-3
BURNT_PLATEAU = 0.6
RANDOM_FLOOR = 1.0
RANDOM_AMPLITUDE = 0.25

BUILTIN_MODELS = ("hungry", "gorbushka", "burnt", "piecewise_random")

VALIDATION_PROPERTIES = ("covering", "equivariance", "p_dte", "p_pe", "continuity")


class PreferenceValidationError(ValueError):
    """An oracle failed a property it was required to satisfy."""


@dataclass
class PreferenceMatrix:
    """Score oracle for r players; ``raw`` returns unnormalized scores."""

    r: int
    kind: str
    model: str
    raw: Callable
    variant: Variant | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in (OLD, NEW):
            raise ValueError(f"kind must be {OLD!r} or {NEW!r}, got {self.kind!r}")
        if self.r < 2:
            raise ValueError("need at least two players")


def _as_lengths(point, r: int) -> tuple[float, ...]:
    if isinstance(point, ConfigPoint):
        raise TypeError("old-style oracle queried with a configuration point")
    if isinstance(point, Cut):
        z = point.lengths
    elif isinstance(point, ZPoint):
        z = point.lengths
    else:
        z = tuple(float(v) for v in point)
    if len(z) != r:
        raise ValueError(f"expected {r} tile lengths, got {len(z)}")
    return z


def scores(prefs: PreferenceMatrix, player: int, point) -> np.ndarray:
    """Normalized score vector of one player at one domain point.

    Sums to 1 whenever any raw score is positive; an all-zero vector is
    returned otherwise (the player accepts nothing there, which a covering
    oracle never produces).
    """
    if not 1 <= player <= prefs.r:
        raise ValueError(f"player {player} outside 1..{prefs.r}")
    if prefs.kind == OLD:
        raw = prefs.raw(player, _as_lengths(point, prefs.r))
    else:
        if not isinstance(point, ConfigPoint):
            raise TypeError("new-style oracle queried with a bare cut")
        raw = prefs.raw(player, point)
    raw = [float(v) for v in raw]
    if any(v < 0 for v in raw):
        raise ValueError(f"oracle produced a negative score: {raw}")
    total = math.fsum(raw)
    if total <= 0.0:
        return np.zeros(len(raw))
    return np.array([v / total for v in raw])


# ---------------------------------------------------------------------------
# built-in models


def _ramp(z: float, margin: float) -> float:
    # zero below the margin, identity above twice the margin, linear between
    if z <= margin:
        return 0.0
    if z < 2.0 * margin:
        return 2.0 * (z - margin)
    return z


def _bump(z: float, width: float) -> float:
    # 1 at zero length, fading out linearly by ``width``
    return max(0.0, 1.0 - z / width)


def _plateau(z: float, knee: float) -> float:
    return 1.0 if z <= knee else (1.0 - z) / (1.0 - knee)


def _end_labels(n_tiles: int) -> tuple[int, int]:
    return (1, n_tiles)


def _hungry_old(margin):
    def raw(player, z):
        return [_ramp(v, margin) for v in z]

    return raw


def _hungry_new(margin):
    def raw(player, point: ConfigPoint):
        return [_ramp(v, margin) for v in point.box_lengths()]

    return raw


def _gorbushka_old(width, dte):
    def raw(player, z):
        first, last = _end_labels(len(z))
        out = []
        for label, v in enumerate(z, start=1):
            score = v if label in (first, last) else 0.0
            if dte:
                score += _bump(v, width)
            out.append(score)
        return out

    return raw


def _gorbushka_new(width, dte):
    def raw(player, point: ConfigPoint):
        z = point.cut.lengths
        first, last = _end_labels(len(z))
        degenerate_signal = max(_bump(v, width) for v in z)
        out = []
        boxes = point.boxes()
        for box, content in enumerate(point.box_lengths(), start=1):
            tiles = boxes.get(box, ())
            end_mass = max((z[t - 1] for t in tiles if t in (first, last)), default=0.0)
            if dte:
                out.append(max(end_mass, degenerate_signal * _bump(content, width)))
            else:
                out.append(end_mass)
        return out

    return raw


def _burnt_old(knee):
    def raw(player, z):
        return [_plateau(v, knee) for v in z]

    return raw


def _burnt_new(knee):
    def raw(player, point: ConfigPoint):
        return [_plateau(v, knee) for v in point.box_lengths()]

    return raw


class _PiecewiseTable:
    """Piecewise-linear function on [0, 1] over a fixed breakpoint grid."""

    def __init__(self, xs: Sequence[float], ys: Sequence[float]):
        if len(xs) != len(ys) or len(xs) < 2:
            raise ValueError("need matching x/y breakpoint lists of length >= 2")
        if list(xs) != sorted(xs) or xs[0] != 0.0 or xs[-1] != 1.0:
            raise ValueError("breakpoints must be sorted and span [0, 1]")
        if any(y < 0 for y in ys):
            raise ValueError("piecewise values must be non-negative")
        self.xs = tuple(float(x) for x in xs)
        self.ys = tuple(float(y) for y in ys)

    def __call__(self, z: float) -> float:
        z = min(max(z, 0.0), 1.0)
        hi = bisect_right(self.xs, z)
        if hi >= len(self.xs):
            return self.ys[-1]
        lo = hi - 1
        x0, x1 = self.xs[lo], self.xs[hi]
        y0, y1 = self.ys[lo], self.ys[hi]
        if x1 == x0:
            return y1
        return y0 + (y1 - y0) * (z - x0) / (x1 - x0)


_RANDOM_GRID = tuple(i / 7.0 for i in range(8))


def _random_tables(rng, count, pin_zero):
    tables = []
    for _ in range(count):
        ys = rng.uniform(0.0, RANDOM_AMPLITUDE, size=len(_RANDOM_GRID))
        if pin_zero:
            ys[0] = 0.0  # vanishing tiles must not leave a score behind
        tables.append(_PiecewiseTable(_RANDOM_GRID, ys))
    return tables


def _piecewise_random_old(r, seed):
    rng = np.random.default_rng(seed)
    per_tile = [_random_tables(rng, r, pin_zero=True) for _ in range(r)]

    def raw(player, z):
        tables = per_tile[player - 1]
        return [RANDOM_FLOOR + tables[i](v) for i, v in enumerate(z)]

    return raw


def _piecewise_random_new(r, n_tiles, seed):
    rng = np.random.default_rng(seed)
    tile_tables = [_random_tables(rng, n_tiles, pin_zero=True) for _ in range(r)]
    content_tables = [_random_tables(rng, 1, pin_zero=False)[0] for _ in range(r)]

    def raw(player, point: ConfigPoint):
        z = point.cut.lengths
        tables = tile_tables[player - 1]
        content = content_tables[player - 1]
        boxes = point.boxes()
        out = []
        for box, length in enumerate(point.box_lengths(), start=1):
            tile_part = math.fsum(tables[t - 1](z[t - 1]) for t in boxes.get(box, ()))
            out.append(RANDOM_FLOOR + content(length) + tile_part)
        return out

    return raw


def make_builtin(
    name: str,
    r: int,
    kind: str = OLD,
    params: dict | None = None,
    seed: int = 0,
    variant: Variant | None = None,
) -> PreferenceMatrix:
    """Construct one of the built-in preference models.

    New-style oracles score boxes of a configuration point on any board
    variant; attach ``variant`` so the validators know what to sample.
    """
    params = dict(params or {})
    if name not in BUILTIN_MODELS:
        raise ValueError(f"unknown model {name!r}; expected one of {BUILTIN_MODELS}")
    if kind not in (OLD, NEW):
        raise ValueError(f"kind must be {OLD!r} or {NEW!r}")
    if kind == NEW and variant is None:
        variant = complexes.gorbushka_join(r)

    if name == "hungry":
        margin = float(params.setdefault("margin", HUNGRY_MARGIN))
        raw = _hungry_old(margin) if kind == OLD else _hungry_new(margin)
    elif name == "gorbushka":
        width = float(params.setdefault("width", GORBUSHKA_WIDTH))
        dte = bool(params.setdefault("dte", True))
        raw = _gorbushka_old(width, dte) if kind == OLD else _gorbushka_new(width, dte)
    elif name == "burnt":
        knee = float(params.setdefault("plateau", BURNT_PLATEAU))
        if not 0.0 < knee < 1.0:
            raise ValueError("burnt plateau must lie strictly inside (0, 1)")
        raw = _burnt_old(knee) if kind == OLD else _burnt_new(knee)
    else:  # piecewise_random
        if not isinstance(seed, (int, np.integer)) or seed < 0:
            raise ValueError("piecewise_random needs a non-negative integer seed")
        params.setdefault("seed", int(seed))
        if kind == OLD:
            raw = _piecewise_random_old(r, seed)
        else:
            raw = _piecewise_random_new(r, variant.cols, seed)

    return PreferenceMatrix(
        r=r,
        kind=kind,
        model=name,
        raw=raw,
        variant=variant if kind == NEW else None,
        params=params,
    )


def piecewise_from_tables(r: int, tables: dict) -> PreferenceMatrix:
    """Custom old-style model from explicit breakpoint tables.

    ``tables[player][tile]`` is a list of [length, value] pairs per player
    (1..r) and tile (1..r).
    """
    parsed = {}
    for player in range(1, r + 1):
        per_player = tables.get(str(player), tables.get(player))
        if per_player is None:
            raise ValueError(f"missing piecewise table for player {player}")
        row = []
        for tile in range(1, r + 1):
            pairs = per_player.get(str(tile), per_player.get(tile))
            if pairs is None:
                raise ValueError(f"missing piecewise table for player {player}, tile {tile}")
            xs = [p[0] for p in pairs]
            ys = [p[1] for p in pairs]
            row.append(_PiecewiseTable(xs, ys))
        parsed[player] = row

    def raw(player, z):
        row = parsed[player]
        return [row[i](v) for i, v in enumerate(z)]

    return PreferenceMatrix(r=r, kind=OLD, model="piecewise", raw=raw)


def row_shuffled(prefs: PreferenceMatrix, sigma: Sequence[int] | None = None) -> PreferenceMatrix:
    """Mutation fixture: permute the output vector by a fixed relabeling.

    The result deliberately breaks box-label blindness so validators can be
    shown to catch the defect.
    """
    r = prefs.r
    if sigma is None:
        sigma = tuple(range(2, r + 1)) + (1,)
    if sorted(sigma) != list(range(1, r + 1)):
        raise ValueError(f"{sigma!r} is not a permutation of 1..{r}")

    def raw(player, point):
        vals = list(prefs.raw(player, point))
        return [vals[sigma[i] - 1] for i in range(len(vals))]

    return PreferenceMatrix(
        r=r,
        kind=prefs.kind,
        model=f"{prefs.model}+shuffled",
        raw=raw,
        variant=prefs.variant,
        params=dict(prefs.params),
    )


# ---------------------------------------------------------------------------
# sampling and validation


@dataclass
class ValidationReport:
    """Outcome of a statistical property check on an oracle."""

    property: str
    samples: int
    violations: list
    max_deviation: float

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "property": self.property,
            "samples": self.samples,
            "violations": self.violations[:50],
            "violation_count": len(self.violations),
            "max_deviation": self.max_deviation,
            "passed": self.passed,
        }


def sample_lengths(rng, n_tiles: int, force_degenerate: bool = False) -> tuple[float, ...]:
    z = rng.dirichlet(np.ones(n_tiles))
    if force_degenerate and n_tiles >= 2:
        k = int(rng.integers(1, n_tiles))
        idx = rng.choice(n_tiles, size=k, replace=False)
        z[idx] = 0.0
        z /= z.sum()
    return tuple(float(v) for v in z)


def sample_config_point(rng, variant: Variant, force_degenerate: bool = False) -> ConfigPoint:
    cx = complexes.build_complex(variant)
    facets = cx.maximal_simplices
    facet = facets[int(rng.integers(0, len(facets)))]
    w = rng.dirichlet(np.ones(len(facet)))
    if force_degenerate and len(facet) >= 2:
        k = int(rng.integers(1, len(facet)))
        idx = rng.choice(len(facet), size=k, replace=False)
        w[idx] = 0.0
        w /= w.sum()
    return point_from_barycentric(variant, facet, tuple(float(v) for v in w))


def _sample_domain(rng, prefs, force_degenerate):
    if prefs.kind == OLD:
        return sample_lengths(rng, prefs.r, force_degenerate)
    if prefs.variant is None:
        raise ValueError("new-style oracle needs a variant attached for sampling")
    return sample_config_point(rng, prefs.variant, force_degenerate)


def _random_permutation(rng, r):
    return tuple(int(v) + 1 for v in rng.permutation(r))


def validate(
    prefs: PreferenceMatrix,
    property: str,
    sample_count: int = 1000,
    seed: int = 0,
    tol: float = 1e-9,
    modulus: float = 1e4,
) -> ValidationReport:
    """Falsification-only check of one preference axiom on seeded samples.

    ``covering`` and ``continuity`` apply to both kinds, ``equivariance``
    to new-style oracles only, ``p_dte`` and ``p_pe`` to old-style only.
    """
    if property not in VALIDATION_PROPERTIES:
        raise ValueError(f"unknown property {property!r}")
    if property == "equivariance" and prefs.kind != NEW:
        raise ValueError("equivariance applies to new-style oracles only")
    if property in ("p_dte", "p_pe") and prefs.kind != OLD:
        raise ValueError(f"{property} applies to old-style oracles only")

    rng = np.random.default_rng(seed)
    violations = []
    max_dev = 0.0

    for i in range(sample_count):
        force_deg = i % 2 == 1
        if property == "covering":
            point = _sample_domain(rng, prefs, force_deg)
            worst = 0.0
            for j in range(1, prefs.r + 1):
                worst = max(worst, float(scores(prefs, j, point).max(initial=0.0)))
                if worst > PREFERENCE_TOL:
                    break
            if worst <= PREFERENCE_TOL:
                violations.append(_witness(point))
        elif property == "equivariance":
            point = _sample_domain(rng, prefs, force_deg)
            sigma = _random_permutation(rng, prefs.r)
            moved = act(sigma, point)
            dev = 0.0
            for j in range(1, prefs.r + 1):
                before = scores(prefs, j, point)
                after = scores(prefs, j, moved)
                for idx in range(prefs.r):
                    dev = max(dev, abs(after[sigma[idx] - 1] - before[idx]))
            max_dev = max(max_dev, dev)
            if dev > tol:
                violations.append({"point": _witness(point), "sigma": list(sigma), "deviation": dev})
        elif property == "p_dte":
            z = sample_lengths(rng, prefs.r, force_degenerate=True)
            deg = [i + 1 for i, v in enumerate(z) if v <= PREFERENCE_TOL]
            if len(deg) < 2:
                continue
            dev = 0.0
            for j in range(1, prefs.r + 1):
                s = scores(prefs, j, z)
                vals = [s[d - 1] for d in deg]
                dev = max(dev, max(vals) - min(vals))
            max_dev = max(max_dev, dev)
            if dev > tol:
                violations.append({"lengths": list(z), "deviation": dev})
        elif property == "p_pe":
            z = sample_lengths(rng, prefs.r, force_degenerate=True)
            z_alt = _repad_zeros(rng, z)
            bad = _ppe_clause_violation(prefs, z, z_alt)
            if bad is not None:
                violations.append({"lengths": list(z), "repadded": list(z_alt), "clause": bad})
        else:  # continuity
            dev, dist, witness = _continuity_probe(rng, prefs, force_deg)
            if dist > 0:
                max_dev = max(max_dev, dev)
                if dev > modulus * dist + 1e-12:
                    violations.append({"point": witness, "deviation": dev, "distance": dist})

    return ValidationReport(property, sample_count, violations, max_dev)


def _witness(point):
    if isinstance(point, ConfigPoint):
        return point.to_json()
    return list(point)


def _repad_zeros(rng, z):
    """Move the zero-length tiles to random slots, preserving the partition."""
    ess = [v for v in z if v > PREFERENCE_TOL]
    n_zero = len(z) - len(ess)
    out = list(ess)
    for _ in range(n_zero):
        pos = int(rng.integers(0, len(out) + 1))
        out.insert(pos, 0.0)
    return tuple(out)


def _ppe_clause_violation(prefs, z, z_alt):
    ess = [i + 1 for i, v in enumerate(z) if v > PREFERENCE_TOL]
    ess_alt = [i + 1 for i, v in enumerate(z_alt) if v > PREFERENCE_TOL]
    deg = [i + 1 for i, v in enumerate(z) if v <= PREFERENCE_TOL]
    deg_alt = [i + 1 for i, v in enumerate(z_alt) if v <= PREFERENCE_TOL]
    for j in range(1, prefs.r + 1):
        s = scores(prefs, j, z)
        s_alt = scores(prefs, j, z_alt)
        for a, b in zip(ess, ess_alt):
            if (s[a - 1] > PREFERENCE_TOL) != (s_alt[b - 1] > PREFERENCE_TOL):
                return 1
        likes_deg = any(s[d - 1] > PREFERENCE_TOL for d in deg)
        likes_deg_alt = any(s_alt[d - 1] > PREFERENCE_TOL for d in deg_alt)
        if deg and deg_alt:
            all_deg = all(s[d - 1] > PREFERENCE_TOL for d in deg)
            all_deg_alt = all(s_alt[d - 1] > PREFERENCE_TOL for d in deg_alt)
            if (likes_deg and not all_deg_alt) or (likes_deg_alt and not all_deg):
                return 2
    return None


def _continuity_probe(rng, prefs, force_deg):
    if prefs.kind == OLD:
        z = np.array(sample_lengths(rng, prefs.r, force_deg))
        delta = rng.normal(scale=1e-6, size=prefs.r)
        z_alt = np.clip(z + delta, 0.0, None)
        z_alt /= z_alt.sum()
        dist = float(np.abs(z_alt - z).max())
        dev = 0.0
        for j in range(1, prefs.r + 1):
            dev = max(dev, float(np.abs(scores(prefs, j, tuple(z_alt)) - scores(prefs, j, tuple(z))).max()))
        return dev, dist, list(z)
    point = _sample_domain(rng, prefs, force_deg)
    cells, weights = point.support()
    w = np.array(weights)
    delta = rng.normal(scale=1e-6, size=len(w))
    w_alt = np.clip(w + delta, 0.0, None)
    w_alt /= w_alt.sum()
    moved = point_from_barycentric(point.variant, cells, tuple(float(v) for v in w_alt))
    dist = float(np.abs(w_alt - w).max())
    dev = 0.0
    for j in range(1, prefs.r + 1):
        dev = max(dev, float(np.abs(scores(prefs, j, moved) - scores(prefs, j, point)).max()))
    return dev, dist, point.to_json()


# ---------------------------------------------------------------------------
# preference files


def load_preference_file(source, space: str | None = None, r: int | None = None) -> PreferenceMatrix:
    """Build an oracle from a JSON preference file (or an equivalent dict).

    Recognized keys: r, kind, model, params, seed, tables (for the custom
    piecewise model) and reduction/epsilon to lift an old-style oracle onto
    a configuration space ("psi" targets c1, "phi" targets c2).
    """
    if isinstance(source, (str, Path)):
        spec = json.loads(Path(source).read_text())
    else:
        spec = dict(source)

    file_r = spec.get("r")
    if file_r is None and r is None:
        raise ValueError("preference file must declare r (or pass --r)")
    if file_r is not None and r is not None and int(file_r) != int(r):
        raise ValueError(f"preference file has r={file_r}, command line says r={r}")
    r = int(file_r if file_r is not None else r)

    kind = spec.get("kind", OLD)
    model = spec.get("model")
    params = spec.get("params", {})
    seed = int(spec.get("seed", 0))
    variant = complexes.for_space(space, r) if (space and kind == NEW) else None

    if model == "piecewise":
        prefs = piecewise_from_tables(r, spec["tables"])
    elif model in BUILTIN_MODELS:
        prefs = make_builtin(model, r, kind=kind, params=params, seed=seed, variant=variant)
    else:
        raise ValueError(f"unknown model {model!r}")

    reduction = spec.get("reduction")
    if reduction is not None:
        from . import reductions  # deferred: reductions imports this module

        if reduction == "psi":
            if space is not None and space.lower() != "c1":
                raise ValueError("the psi reduction targets space c1")
            prefs = reductions.psi(prefs, spec.get("epsilon"))
        elif reduction == "phi":
            if space is not None and space.lower() != "c2":
                raise ValueError("the phi reduction targets space c2")
            prefs = reductions.phi(prefs)
        else:
            raise ValueError(f"unknown reduction {reduction!r}")
    return prefs
