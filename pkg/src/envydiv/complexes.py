"""Configuration-space complexes built from rook placements on a board.

Three board variants are used throughout the package.  Cells are ``(row,
column)`` pairs with 1-based indices; rows stand for boxes and columns for
tiles of a cut:

* ``chessboard(m, n)`` -- placements with at most one rook per row and per
  column (non-attacking rooks).
* ``gorbushka_join(r)`` -- the r x r board where columns are still occupied
  at most once, and rows at most once except that a single row may hold two
  rooks provided one of them sits in column ``r`` (the last tile may share
  a box with one other tile).
* ``join_power(r)`` -- the r x r board with at most one rook per column and
  no row restriction (a box may receive any number of tiles).

The module also provides integer reduced homology via Smith normal form and
a pseudomanifold check, both used by the verification suite.
"""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass
from functools import cached_property, lru_cache
from pathlib import Path

Cell = tuple[int, int]
Simplex = tuple[Cell, ...]

CHESSBOARD = "chessboard"
GORBUSHKA_JOIN = "gorbushka_join"
JOIN_POWER = "join_power"

CACHE_ENV_VAR = "ENVYDIV_CACHE_DIR"

#: default cap on the total number of faces a homology computation may touch
MAX_SIMPLICES = 100_000


class ResourceCapExceeded(RuntimeError):
    """A complex is too large for the requested desk-scale computation."""


class NotPureComplexError(ValueError):
    """Raised when an operation requires a pure complex and gets a mixed one."""


@dataclass(frozen=True)
class Variant:
    """Descriptor of one board variant: which face rule, and the board size."""

    kind: str
    rows: int
    cols: int

    def __post_init__(self):
        if self.kind not in (CHESSBOARD, GORBUSHKA_JOIN, JOIN_POWER):
            raise ValueError(f"unknown variant kind {self.kind!r}")
        if self.kind == CHESSBOARD:
            if self.rows < 1 or self.cols < 1:
                raise ValueError("chessboard dimensions must be at least 1")
        else:
            if self.rows < 2 or self.rows != self.cols:
                raise ValueError(f"{self.kind} requires a square board with r >= 2")

    def cells(self) -> tuple[Cell, ...]:
        return tuple(
            (i, j)
            for i in range(1, self.rows + 1)
            for j in range(1, self.cols + 1)
        )

    def to_json(self) -> dict:
        return {"kind": self.kind, "rows": self.rows, "cols": self.cols}


def chessboard(m: int, n: int) -> Variant:
    return Variant(CHESSBOARD, m, n)


def gorbushka_join(r: int) -> Variant:
    return Variant(GORBUSHKA_JOIN, r, r)


def join_power(r: int) -> Variant:
    return Variant(JOIN_POWER, r, r)


def for_space(space: str, r: int) -> Variant:
    """Map a solver space label (c1, c2, c3) to its board variant."""
    space = space.lower()
    if space == "c1":
        return gorbushka_join(r)
    if space == "c2":
        return chessboard(r, 2 * r - 1)
    if space == "c3":
        return join_power(r)
    raise ValueError(f"unknown space {space!r}; expected c1, c2 or c3")


def is_face(variant: Variant, placement) -> bool:
    """True iff the placement of cells satisfies the variant's face rule.

    The predicate is monotone: every subset of a face is again a face.
    Raises ValueError for cells outside the board.
    """
    cells = set()
    for cell in placement:
        i, j = cell
        if not (1 <= i <= variant.rows and 1 <= j <= variant.cols):
            raise ValueError(f"cell {cell} is outside the {variant.rows}x{variant.cols} board")
        cells.add((i, j))

    col_counts: dict[int, int] = {}
    row_cells: dict[int, list[int]] = {}
    for i, j in cells:
        col_counts[j] = col_counts.get(j, 0) + 1
        row_cells.setdefault(i, []).append(j)

    if any(c > 1 for c in col_counts.values()):
        return False
    if variant.kind == JOIN_POWER:
        return True
    if variant.kind == CHESSBOARD:
        return all(len(js) == 1 for js in row_cells.values())
    # gorbushka_join: at most one doubled row, and only with a column-r cell
    doubled = [js for js in row_cells.values() if len(js) > 1]
    if not doubled:
        return True
    if len(doubled) > 1:
        return False
    js = doubled[0]
    return len(js) == 2 and variant.cols in js


def _chessboard_facets(m, n):
    if m <= n:
        for cols in itertools.combinations(range(1, n + 1), m):
            for rows in itertools.permutations(range(1, m + 1)):
                yield tuple(sorted(zip(rows, cols)))
    else:
        for rows in itertools.permutations(range(1, m + 1), n):
            yield tuple(sorted(zip(rows, range(1, n + 1))))


def _gorbushka_facets(r):
    for rows in itertools.permutations(range(1, r + 1), r - 1):
        base = tuple(zip(rows, range(1, r)))
        for extra in range(1, r + 1):
            yield tuple(sorted(base + ((extra, r),)))


def _join_power_facets(r):
    for rows in itertools.product(range(1, r + 1), repeat=r):
        yield tuple(sorted((rows[j - 1], j) for j in range(1, r + 1)))


_FACET_GENERATORS = {
    CHESSBOARD: lambda v: _chessboard_facets(v.rows, v.cols),
    GORBUSHKA_JOIN: lambda v: _gorbushka_facets(v.rows),
    JOIN_POWER: lambda v: _join_power_facets(v.rows),
}


@dataclass(frozen=True)
class SimplicialComplex:
    """A complex given by its vertices and enumerated maximal simplices.

    Completed complexes are immutable and may be shared freely between
    concurrent readers.
    """

    variant: Variant | None
    vertices: tuple[Cell, ...]
    maximal_simplices: tuple[Simplex, ...]

    @cached_property
    def faces(self) -> dict[int, list[Simplex]]:
        """All faces keyed by dimension, each as a sorted cell tuple."""
        seen: dict[int, set[Simplex]] = {}
        for facet in self.maximal_simplices:
            for k in range(1, len(facet) + 1):
                bucket = seen.setdefault(k - 1, set())
                for sub in itertools.combinations(facet, k):
                    bucket.add(sub)
        return {d: sorted(faces) for d, faces in sorted(seen.items())}

    @property
    def dimension(self) -> int:
        return max((len(f) - 1 for f in self.maximal_simplices), default=-1)

    def face_counts(self) -> tuple[int, ...]:
        return tuple(len(self.faces[d]) for d in range(self.dimension + 1))

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * n for d, n in enumerate(self.face_counts()))

    def total_faces(self) -> int:
        return sum(self.face_counts())

    def to_json(self) -> dict:
        return {
            "variant": self.variant.to_json() if self.variant else None,
            "vertices": [list(v) for v in self.vertices],
            "maximal_simplices": [
                [list(c) for c in s] for s in self.maximal_simplices
            ],
        }


def _cache_path(variant: Variant, cache_dir) -> Path | None:
    if not cache_dir:
        return None
    return Path(cache_dir) / f"{variant.kind}_{variant.rows}x{variant.cols}.json"


def build_complex(variant: Variant, cache_dir=None) -> SimplicialComplex:
    """Enumerate the complex for a variant, memoized per process.

    Maximal simplices are generated by backtracking over columns and cached
    on the returned object; the enumeration order is deterministic and other
    modules rely on it for reproducible searches.  With ``cache_dir`` (or
    the ENVYDIV_CACHE_DIR environment variable) set, the enumeration is also
    persisted as JSON on disk.
    """
    directory = cache_dir if cache_dir is not None else os.environ.get(CACHE_ENV_VAR)
    return _build_memoized(variant, str(directory) if directory else None)


@lru_cache(maxsize=64)
def _build_memoized(variant: Variant, cache_dir: str | None) -> SimplicialComplex:
    path = _cache_path(variant, cache_dir)
    if path is not None and path.exists():
        data = json.loads(path.read_text())
        if data.get("variant") == variant.to_json():
            facets = tuple(
                tuple(tuple(c) for c in s) for s in data["maximal_simplices"]
            )
            return SimplicialComplex(variant, variant.cells(), facets)

    facets = tuple(_FACET_GENERATORS[variant.kind](variant))
    cx = SimplicialComplex(variant, variant.cells(), facets)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(cx.to_json(), sort_keys=True))
    return cx


# ---------------------------------------------------------------------------
# integer homology


def smith_invariants(matrix: list[list[int]]) -> list[int]:
    """Nonzero diagonal invariant factors d1 | d2 | ... of an integer matrix.

    Exact arbitrary-precision arithmetic throughout, so torsion is never
    lost to overflow.  The rank of the matrix is ``len(result)``.
    """
    m = [row[:] for row in matrix]
    n_rows = len(m)
    n_cols = len(m[0]) if n_rows else 0
    divisors: list[int] = []
    t = 0
    while t < min(n_rows, n_cols):
        # bring a minimal-magnitude nonzero entry to the pivot position
        pi = pj = -1
        best = 0
        for i in range(t, n_rows):
            for j in range(t, n_cols):
                v = abs(m[i][j])
                if v and (best == 0 or v < best):
                    best = v
                    pi, pj = i, j
            if best == 1:
                break
        if best == 0:
            break
        m[t], m[pi] = m[pi], m[t]
        if pj != t:
            for row in m:
                row[t], row[pj] = row[pj], row[t]

        while True:
            changed = False
            p = m[t][t]
            for i in range(t + 1, n_rows):
                if m[i][t]:
                    q = m[i][t] // p
                    if q:
                        m[i] = [a - q * b for a, b in zip(m[i], m[t])]
                    if m[i][t]:
                        m[t], m[i] = m[i], m[t]
                        p = m[t][t]
                        changed = True
            for j in range(t + 1, n_cols):
                if m[t][j]:
                    q = m[t][j] // p
                    if q:
                        for i in range(n_rows):
                            m[i][j] -= q * m[i][t]
                    if m[t][j]:
                        for i in range(n_rows):
                            m[i][t], m[i][j] = m[i][j], m[i][t]
                        p = m[t][t]
                        changed = True
            if not changed:
                break

        # enforce divisibility of the remaining block by the pivot
        p = m[t][t]
        offender = -1
        for i in range(t + 1, n_rows):
            if any(m[i][j] % p for j in range(t + 1, n_cols)):
                offender = i
                break
        if offender >= 0:
            m[t] = [a + b for a, b in zip(m[t], m[offender])]
            continue
        divisors.append(abs(p))
        t += 1
    return divisors


def boundary_matrix(cx: SimplicialComplex, dim: int) -> list[list[int]]:
    """Oriented boundary matrix from dim-faces to (dim-1)-faces.

    Faces are ordered lexicographically by their sorted cell tuples; the sign
    of a facet of a simplex is (-1)^i for removal of the i-th vertex.
    """
    if dim <= 0 or dim > cx.dimension:
        return []
    lower = {f: idx for idx, f in enumerate(cx.faces[dim - 1])}
    upper = cx.faces[dim]
    rows = [[0] * len(upper) for _ in lower]
    for col, simplex in enumerate(upper):
        for i in range(len(simplex)):
            face = simplex[:i] + simplex[i + 1:]
            rows[lower[face]][col] = (-1) ** i
    return rows


@dataclass(frozen=True)
class HomologyReport:
    """Reduced integer homology: Betti numbers, torsion, Euler characteristic."""

    betti: tuple[int, ...]
    torsion: tuple[tuple[int, ...], ...]
    euler: int

    def to_json(self) -> dict:
        return {
            "betti": list(self.betti),
            "torsion": [list(t) for t in self.torsion],
            "euler": self.euler,
        }


def reduced_homology(cx: SimplicialComplex, max_simplices: int = MAX_SIMPLICES) -> HomologyReport:
    """Reduced homology over the integers via Smith normal form.

    Deterministic; raises ResourceCapExceeded when the total face count goes
    past ``max_simplices``.
    """
    if cx.dimension < 0:
        return HomologyReport((), (), 0)
    if cx.total_faces() > max_simplices:
        raise ResourceCapExceeded(
            f"complex has {cx.total_faces()} faces, cap is {max_simplices}"
        )
    counts = cx.face_counts()
    dim = cx.dimension
    invariants = {k: smith_invariants(boundary_matrix(cx, k)) for k in range(1, dim + 1)}
    ranks = {k: len(invariants[k]) for k in invariants}
    ranks[0] = 1 if counts[0] else 0  # augmentation map onto the integers
    ranks[dim + 1] = 0

    betti = tuple(counts[k] - ranks[k] - ranks[k + 1] for k in range(dim + 1))
    torsion = tuple(
        tuple(d for d in invariants.get(k + 1, []) if d > 1) for k in range(dim + 1)
    )
    return HomologyReport(betti, torsion, cx.euler_characteristic())


def is_pseudomanifold(cx: SimplicialComplex) -> bool:
    """Every ridge in exactly two facets, with a connected facet graph.

    Raises NotPureComplexError when facets have mixed dimensions, so a
    non-pure complex is never silently reported as ``False``.
    """
    facets = cx.maximal_simplices
    if not facets:
        return False
    sizes = {len(f) for f in facets}
    if len(sizes) > 1:
        raise NotPureComplexError(f"facet dimensions are mixed: {sorted(sizes)}")
    d1 = sizes.pop()
    if d1 == 1:
        return len(facets) == 2

    ridge_hosts: dict[Simplex, list[int]] = {}
    for idx, facet in enumerate(facets):
        for i in range(d1):
            ridge = facet[:i] + facet[i + 1:]
            ridge_hosts.setdefault(ridge, []).append(idx)
    if any(len(hosts) != 2 for hosts in ridge_hosts.values()):
        return False

    # connectivity of the facet-adjacency graph, via union-find
    parent = list(range(len(facets)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for hosts in ridge_hosts.values():
        ra, rb = find(hosts[0]), find(hosts[1])
        if ra != rb:
            parent[ra] = rb
    return len({find(i) for i in range(len(facets))}) == 1
