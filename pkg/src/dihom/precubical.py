"""Finite precubical sets, grid models and reachability.

Cube identifiers are arbitrary hashable values.  Grid models use integer
coordinate tuples for vertices and ``(base_corner, directions)`` pairs for
higher cubes, so every downstream basis ordering is reproducible.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import DomainError, ModelError

CubeId = Hashable


@dataclass(frozen=True)
class Cube:
    id: CubeId
    dim: int

    def __post_init__(self):
        if self.dim < 0:
            raise DomainError(f"negative cube dimension {self.dim}")


class PrecubicalSet:
    """Immutable finite precubical set.

    Parameters
    ----------
    cells : sequence of sequences
        ``cells[n]`` lists the ids of the ``n``-dimensional cubes.
    faces : mapping
        ``faces[c] = (lower, upper)`` for every cube of dimension ``n >= 1``,
        where ``lower[i]`` is :math:`d^0_i(c)` and ``upper[i]`` is
        :math:`d^1_i(c)`, ``i = 0..n-1``.
    check : bool
        Also verify the precubical identity exhaustively.
    """

    def __init__(self, cells: Sequence[Sequence[CubeId]], faces: Mapping, check: bool = False):
        self.cells = tuple(tuple(level) for level in cells)
        self._dim = {}
        self._order = {}
        for n, level in enumerate(self.cells):
            for c in level:
                if c in self._dim:
                    raise ModelError(f"duplicate cube id {c!r}")
                self._dim[c] = n
                self._order[c] = len(self._order)
        self._faces = {}
        for n, level in enumerate(self.cells):
            if n == 0:
                continue
            for c in level:
                try:
                    lower, upper = faces[c]
                except KeyError:
                    raise ModelError(f"cube {c!r} of dimension {n} has no faces") from None
                lower, upper = tuple(lower), tuple(upper)
                if len(lower) != n or len(upper) != n:
                    raise ModelError(f"cube {c!r} needs {n} faces per side")
                for f in lower + upper:
                    if self._dim.get(f) != n - 1:
                        raise ModelError(f"face {f!r} of {c!r} is not a stored {n - 1}-cube")
                self._faces[c] = (lower, upper)
        self._corner_cache = {}
        self._by_start = None
        self._slice_cache = {}
        if check:
            bad = check_precubical_identity(self)
            if bad:
                raise ModelError(f"precubical identity fails: {bad[0]}")

    # --- basic queries -------------------------------------------------

    @property
    def max_dim(self) -> int:
        return len(self.cells) - 1

    @property
    def vertices(self):
        return self.cells[0] if self.cells else ()

    def __contains__(self, c) -> bool:
        return c in self._dim

    def __len__(self) -> int:
        return len(self._dim)

    def __iter__(self):
        for level in self.cells:
            yield from level

    def dim(self, c) -> int:
        try:
            return self._dim[c]
        except KeyError:
            raise DomainError(f"unknown cube {c!r}") from None

    def cube(self, c) -> Cube:
        return Cube(c, self.dim(c))

    def order(self, c) -> int:
        """Position of ``c`` in the canonical cell order."""
        return self._order[c]

    def counts(self) -> tuple:
        return tuple(len(level) for level in self.cells)

    def raw_faces(self, c):
        return self._faces[c]

    def cubes_from(self, v):
        """Cubes of dimension >= 1 whose lower corner is ``v``, in canonical order."""
        if self._by_start is None:
            table = {u: [] for u in self.vertices}
            for n in range(1, len(self.cells)):
                for c in self.cells[n]:
                    table[corners(self, c)[0]].append(c)
            self._by_start = {u: tuple(cs) for u, cs in table.items()}
        return self._by_start.get(v, ())

    def edges_from(self, v):
        return tuple(c for c in self.cubes_from(v) if self._dim[c] == 1)

    def is_acyclic(self) -> bool:
        """True when the underlying quiver has no directed cycle (loops included)."""
        indeg = {v: 0 for v in self.vertices}
        for e in self.cells[1] if len(self.cells) > 1 else ():
            indeg[self._faces[e][1][0]] += 1
        queue = deque(v for v, d in indeg.items() if d == 0)
        seen = 0
        while queue:
            v = queue.popleft()
            seen += 1
            for e in self.edges_from(v):
                w = self._faces[e][1][0]
                indeg[w] -= 1
                if indeg[w] == 0:
                    queue.append(w)
        return seen == len(indeg)

    def __repr__(self):
        return f"PrecubicalSet(counts={self.counts()})"


def _cid(c):
    return c.id if isinstance(c, Cube) else c


def face(X: PrecubicalSet, c, eps: int, i: int):
    """Single face :math:`d^\\varepsilon_i(c)`; returns a cube id."""
    c = _cid(c)
    n = X.dim(c)
    if n == 0:
        raise DomainError("a vertex has no faces")
    if eps not in (0, 1):
        raise DomainError(f"eps must be 0 or 1, got {eps!r}")
    if not 0 <= i < n:
        raise DomainError(f"direction {i} out of range for a {n}-cube")
    return X.raw_faces(c)[eps][i]


def iterated_face(X: PrecubicalSet, c, eps: int, directions: Iterable[int]):
    """Apply :math:`d^\\varepsilon_i` for every ``i`` in ``directions``.

    Faces are taken in strictly decreasing direction order so that the
    remaining lower indices keep their meaning.
    """
    c = _cid(c)
    n = X.dim(c)
    dirs = sorted(set(directions), reverse=True)
    if any(not 0 <= i < n for i in dirs):
        raise DomainError(f"directions {sorted(dirs)} not a subset of range({n})")
    for i in dirs:
        c = X.raw_faces(c)[eps][i]
    return c


def corners(X: PrecubicalSet, c):
    """``(d^0(c), d^1(c))``; a vertex is its own pair of corners."""
    c = _cid(c)
    hit = X._corner_cache.get(c)
    if hit is not None:
        return hit
    n = X.dim(c)
    if n == 0:
        result = (c, c)
    else:
        lower, upper = X.raw_faces(c)
        result = (corners(X, lower[0])[0], corners(X, upper[0])[1])
    X._corner_cache[c] = result
    return result


def check_precubical_identity(X: PrecubicalSet) -> list:
    """All violations of d^e_i d^f_j = d^f_{j-1} d^e_i (i < j), as tuples."""
    bad = []
    for n in range(2, len(X.cells)):
        for c in X.cells[n]:
            for j in range(n):
                for i in range(j):
                    for e in (0, 1):
                        for f in (0, 1):
                            lhs = face(X, face(X, c, f, j), e, i)
                            rhs = face(X, face(X, c, e, i), f, j - 1)
                            if lhs != rhs:
                                bad.append((c, e, i, f, j))
    return bad


def is_proper(X: PrecubicalSet) -> bool:
    return not improper_cubes(X)


def improper_cubes(X: PrecubicalSet) -> list:
    """Groups of cubes sharing the same corner set (empty when ``X`` is proper)."""
    seen = {}
    for c in X:
        seen.setdefault(frozenset(corners(X, c)), []).append(c)
    return [group for group in seen.values() if len(group) > 1]


def length_covering(X: PrecubicalSet, lo: int, hi: int) -> PrecubicalSet:
    """Window ``[lo, hi]`` of the non-looping length covering.

    Cells are pairs ``(c, k)`` with faces ``d^e_i(c, k) = (d^e_i(c), k + e)``;
    a cell is kept when all of its iterated faces stay inside the window,
    i.e. when ``lo <= k`` and ``k + dim(c) <= hi``.
    """
    if lo > hi:
        raise DomainError(f"empty level window [{lo}, {hi}]")
    cells = []
    faces = {}
    for n, level in enumerate(X.cells):
        out = []
        for k in range(lo, hi - n + 1):
            for c in level:
                out.append((c, k))
                if n:
                    lower, upper = X.raw_faces(c)
                    faces[(c, k)] = (
                        tuple((f, k) for f in lower),
                        tuple((f, k + 1) for f in upper),
                    )
        cells.append(out)
    while len(cells) > 1 and not cells[-1]:
        cells.pop()
    return PrecubicalSet(cells, faces)


# --- grid models ----------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Box ``[0, k_1] x ... x [0, k_n]`` minus some top-dimensional cells."""

    extents: tuple
    forbidden: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        extents = tuple(int(k) for k in self.extents)
        if any(k < 1 for k in extents):
            raise DomainError(f"extents must be positive, got {extents}")
        forbidden = frozenset(tuple(int(x) for x in cell) for cell in self.forbidden)
        for cell in forbidden:
            if len(cell) != len(extents) or any(not 0 <= x < k for x, k in zip(cell, extents)):
                raise DomainError(f"forbidden cell {cell} outside grid {extents}")
        object.__setattr__(self, "extents", extents)
        object.__setattr__(self, "forbidden", forbidden)

    @property
    def ndim(self) -> int:
        return len(self.extents)

    def to_json(self) -> dict:
        return {"extents": list(self.extents), "forbidden": [list(c) for c in sorted(self.forbidden)]}

    @classmethod
    def from_json(cls, data: Mapping) -> "GridSpec":
        return cls(tuple(data["extents"]), frozenset(tuple(c) for c in data.get("forbidden", ())))


def build_grid(spec: GridSpec, check: bool = False) -> PrecubicalSet:
    """Cubical subdivision of the box with the forbidden top cells removed.

    Only the interiors listed in ``spec.forbidden`` are dropped; their faces
    stay in the complex.
    """
    n = spec.ndim
    cells = []
    faces = {}
    for m in range(n + 1):
        level = []
        for dirs in itertools.combinations(range(n), m):
            ranges = [range(k) if d in dirs else range(k + 1) for d, k in enumerate(spec.extents)]
            for base in itertools.product(*ranges):
                if m == n and base in spec.forbidden:
                    continue
                if m == 0:
                    level.append(base)
                    continue
                cid = (base, dirs)
                lower, upper = [], []
                for i, d in enumerate(dirs):
                    rest = dirs[:i] + dirs[i + 1:]
                    shifted = base[:d] + (base[d] + 1,) + base[d + 1:]
                    lower.append(base if m == 1 else (base, rest))
                    upper.append(shifted if m == 1 else (shifted, rest))
                faces[cid] = (tuple(lower), tuple(upper))
                level.append(cid)
        level.sort()
        cells.append(level)
    return PrecubicalSet(cells, faces, check=check)


# --- reachability ----------------------------------------------------------


@dataclass(frozen=True)
class ReachablePairs:
    """Reflexive-transitive closure of the edge relation."""

    pairs: frozenset

    def __contains__(self, pair) -> bool:
        return tuple(pair) in self.pairs

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def successors(self, v):
        return {w for (u, w) in self.pairs if u == v}


def reachable_from(X: PrecubicalSet, v) -> set:
    seen = {v}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        for e in X.edges_from(u):
            w = X.raw_faces(e)[1][0]
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def reachable_pairs(X: PrecubicalSet) -> ReachablePairs:
    return ReachablePairs(frozenset((v, w) for v in X.vertices for w in reachable_from(X, v)))


def sorted_pairs(X: PrecubicalSet, pairs: Iterable) -> list:
    """Pairs of vertices in canonical cell order."""
    return sorted(pairs, key=lambda p: (X.order(p[0]), X.order(p[1])))


# --- JSON -------------------------------------------------------------------


def id_to_str(c) -> str:
    """Stable text form of a cube id (grid ids become ``"x,y"`` / ``"x,y|d"``)."""
    if isinstance(c, str):
        return c
    if isinstance(c, tuple) and all(isinstance(x, int) for x in c):
        return ",".join(map(str, c))
    if isinstance(c, tuple) and len(c) == 2 and isinstance(c[0], tuple):
        return id_to_str(c[0]) + "|" + ",".join(map(str, c[1]))
    return str(c)


def complex_to_json(X: PrecubicalSet) -> dict:
    cells = [[id_to_str(c) for c in level] for level in X.cells]
    faces = {}
    for n in range(1, len(X.cells)):
        for c in X.cells[n]:
            lower, upper = X.raw_faces(c)
            faces[id_to_str(c)] = {"d0": [id_to_str(f) for f in lower], "d1": [id_to_str(f) for f in upper]}
    return {"dims": X.max_dim, "cells": cells, "faces": faces}


def complex_from_json(data: Mapping, check: bool = False) -> PrecubicalSet:
    try:
        cells = [[str(c) for c in level] for level in data["cells"]]
        faces = {str(c): ([str(f) for f in v["d0"]], [str(f) for f in v["d1"]]) for c, v in data.get("faces", {}).items()}
        dims = data.get("dims", len(cells) - 1)
    except (KeyError, TypeError) as exc:
        raise ModelError(f"malformed complex JSON: {exc}") from None
    if dims != len(cells) - 1:
        raise ModelError(f"'dims' is {dims} but {len(cells)} cell levels were given")
    return PrecubicalSet(cells, faces, check=check)


def load_complex(path) -> PrecubicalSet:
    with open(path) as fh:
        return complex_from_json(json.load(fh))
