"""Chains of obstacles as a combinatorial model of trace-space cohomology.

A box ``[0, k_1] x ... x [0, k_n]`` loses finitely many points with
half-integer coordinates.  Between integer points ``u <= v`` the cohomology
classes are indexed by chains ``O_{i1} < ... < O_{is}`` of obstacles strictly
inside the interval, in trace-space degree ``s * class_degree``.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import DomainError, IntegrityError, ModelError
from .precubical import GridSpec


@dataclass(frozen=True)
class Obstacle:
    id: str
    coords: tuple

    def __post_init__(self):
        coords = tuple(Fraction(x) for x in self.coords)
        for x in coords:
            if (2 * x).denominator != 1 or (2 * x).numerator % 2 == 0:
                raise DomainError(f"obstacle {self.id}: coordinate {x} is not an odd multiple of 1/2")
        object.__setattr__(self, "coords", coords)

    @property
    def ambient_dim(self) -> int:
        return len(self.coords)

    @property
    def cell(self) -> tuple:
        """Index of the unit cube centred on the obstacle."""
        return tuple(math.floor(x) for x in self.coords)

    def __lt__(self, other: "Obstacle") -> bool:
        return all(a < b for a, b in zip(self.coords, other.coords))


@dataclass(frozen=True)
class ChainClass:
    """Chain ``u < O_{i1} < ... < O_{ik} < v``; ``coeff`` carries a sign after products."""

    interval: tuple
    chain: tuple
    coeff: int = 1

    @property
    def size(self) -> int:
        return len(self.chain)

    def label(self) -> str:
        inner = " < ".join(("u",) + tuple(self.chain) + ("v",))
        return ("-" if self.coeff < 0 else "") + f"({inner})"


class ObstacleModel:
    """Ordered obstacles in a box, with the degree each obstacle contributes."""

    def __init__(self, extents: Sequence[int], obstacles: Sequence[Obstacle], class_degree: int | None = None):
        self.extents = tuple(int(k) for k in extents)
        self.obstacles = tuple(obstacles)
        n = len(self.extents)
        if class_degree is None:
            if n not in (2, 3):
                raise DomainError("class_degree must be given outside dimensions 2 and 3")
            class_degree = n - 2
        if class_degree not in (0, 1):
            raise DomainError(f"class_degree must be 0 or 1, got {class_degree}")
        self.class_degree = class_degree
        self._by_id = {}
        for o in self.obstacles:
            if o.ambient_dim != n:
                raise DomainError(f"obstacle {o.id} has {o.ambient_dim} coordinates, box has {n}")
            if any(not 0 < x < k for x, k in zip(o.coords, self.extents)):
                raise DomainError(f"obstacle {o.id} lies outside the box")
            if o.id in self._by_id:
                raise DomainError(f"duplicate obstacle id {o.id}")
            self._by_id[o.id] = o
        for a, b in itertools.combinations(self.obstacles, 2):
            if any(x == y for x, y in zip(a.coords, b.coords)):
                raise DomainError(f"obstacles {a.id} and {b.id} share a coordinate")
        self._pos = {o.id: k for k, o in enumerate(self.obstacles)}

    @property
    def ndim(self) -> int:
        return len(self.extents)

    def __getitem__(self, oid) -> Obstacle:
        return self._by_id[oid]

    def less(self, a, b) -> bool:
        return self._by_id[a] < self._by_id[b]

    def is_chain(self, ids) -> bool:
        ids = self.sort_chain(ids)
        return all(self.less(a, b) for a, b in zip(ids, ids[1:]))

    def sort_chain(self, ids) -> tuple:
        """Order ids along the partial order (ties broken by declaration order)."""
        ids = list(ids)
        return tuple(sorted(ids, key=lambda i: (sum(self._by_id[i].coords), self._pos[i])))

    def inside(self, u, v) -> list:
        """Obstacles strictly inside the interval ``[u, v]``, in declaration order."""
        return [o.id for o in self.obstacles
                if all(a < x < b for a, x, b in zip(u, o.coords, v))]

    def degree_of(self, size: int) -> int:
        """Bimodule degree ``HM^d`` of a chain of ``size`` obstacles."""
        return size * self.class_degree + 1

    def to_grid_spec(self) -> GridSpec:
        return GridSpec(self.extents, frozenset(o.cell for o in self.obstacles))

    def to_json(self) -> dict:
        return {
            "extents": list(self.extents),
            "obstacles": [{"id": o.id, "coords": [str(x) for x in o.coords]} for o in self.obstacles],
            "class_degree": self.class_degree,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "ObstacleModel":
        try:
            obstacles = [Obstacle(str(o["id"]), tuple(Fraction(str(x)) for x in o["coords"])) for o in data["obstacles"]]
            return cls(data["extents"], obstacles, data.get("class_degree"))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise ModelError(f"malformed obstacle model: {exc}") from None

    @classmethod
    def load(cls, path) -> "ObstacleModel":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def _leq(u, v) -> bool:
    return all(a <= b for a, b in zip(u, v))


def enumerate_classes(M: ObstacleModel, u, v) -> dict:
    """Chain classes of the interval grouped by bimodule degree.

    Empty when ``u`` is not below ``v``.
    """
    u, v = tuple(u), tuple(v)
    if not _leq(u, v):
        return {}
    inside = M.inside(u, v)
    out = {}
    for size in range(len(inside) + 1):
        for ids in itertools.combinations(inside, size):
            if M.is_chain(ids):
                out.setdefault(M.degree_of(size), []).append(ChainClass((u, v), M.sort_chain(ids)))
    return out


def betti_profile(M: ObstacleModel, u, v) -> tuple:
    """Ranks of ``HM^1, HM^2, ...`` up to the last non-zero one."""
    classes = enumerate_classes(M, u, v)
    if not classes:
        return ()
    top = max(classes)
    return tuple(len(classes.get(d, [])) for d in range(1, top + 1))


def _inversions(a: Sequence, b: Sequence, M: ObstacleModel) -> int:
    merged = M.sort_chain(list(a) + list(b))
    rank = {oid: k for k, oid in enumerate(merged)}
    return sum(1 for x in a for y in b if rank[y] < rank[x])


def cup(M: ObstacleModel, a: ChainClass, b: ChainClass):
    """Product of two chain classes on the same interval; ``None`` means zero.

    In trace-space degree 0 the product is idempotent (union of chains).  For
    degree-1 generators a repeated obstacle kills the product and the merge
    contributes the sign of its shuffle.
    """
    if a.interval != b.interval:
        raise DomainError("cup product needs classes on the same interval")
    coeff = a.coeff * b.coeff
    if M.class_degree == 0:
        union = set(a.chain) | set(b.chain)
        if not M.is_chain(union):
            return None
        return ChainClass(a.interval, M.sort_chain(union), coeff)
    if set(a.chain) & set(b.chain):
        return None
    union = list(a.chain) + list(b.chain)
    if not M.is_chain(union):
        return None
    sign = -1 if _inversions(a.chain, b.chain, M) % 2 else 1
    return ChainClass(a.interval, M.sort_chain(union), coeff * sign)


def cup_all(M: ObstacleModel, *classes):
    """Iterated cup product, left to right."""
    out = classes[0]
    for c in classes[1:]:
        if out is None:
            return None
        out = cup(M, out, c)
    return out


def cap_chain(M: ObstacleModel, a: ChainClass, b: ChainClass) -> ChainClass:
    """Concatenate a chain on ``(u, beta)`` with a chain on ``(beta, v)``."""
    u, beta = a.interval
    beta2, v = b.interval
    if beta != beta2:
        raise DomainError(f"intervals do not meet: {a.interval} and {b.interval}")
    if not (_leq(u, beta) and _leq(beta, v)):
        raise DomainError("intervals are not ordered")
    for ids, lo, hi in ((a.chain, u, beta), (b.chain, beta, v)):
        inside = set(M.inside(lo, hi))
        if not set(ids) <= inside:
            raise DomainError(f"chain {ids} is not inside the interval {lo}->{hi}")
    chain = tuple(a.chain) + tuple(b.chain)
    if not M.is_chain(chain):
        raise IntegrityError("concatenated chain is not totally ordered")
    return ChainClass((u, v), chain, a.coeff * b.coeff)


def cap_image(M: ObstacleModel, u, beta, v) -> list:
    """All concatenations of classes of ``(u, beta)`` with classes of ``(beta, v)``."""
    left = [c for cs in enumerate_classes(M, u, beta).values() for c in cs]
    right = [c for cs in enumerate_classes(M, beta, v).values() for c in cs]
    out = []
    seen = set()
    for a in left:
        for b in right:
            c = cap_chain(M, a, b)
            if c.chain not in seen:
                seen.add(c.chain)
                out.append(c)
    return out


# --- link with the cube-chain engine (planar models) -----------------------


def _preferred_sides(M: ObstacleModel, ids) -> dict:
    """Side of each obstacle that the avoidance class detects.

    ``"A"`` means the trace passes above-left of the obstacle, ``"B"``
    below-right.  An obstacle with an incomparable neighbour to its lower
    right uses ``"A"``, one with such a neighbour to its upper left uses
    ``"B"``; this keeps the labels of components equal to chains.
    """
    sides = {}
    for i in ids:
        oi = M[i]
        lower_right = any(M[j].coords[0] > oi.coords[0] and M[j].coords[1] < oi.coords[1] for j in ids if j != i)
        upper_left = any(M[j].coords[0] < oi.coords[0] and M[j].coords[1] > oi.coords[1] for j in ids if j != i)
        if lower_right and upper_left:
            raise ModelError(f"obstacle {i} has incomparable neighbours on both sides; no chain labelling")
        sides[i] = "A" if lower_right else "B"
    return sides


def path_side(path, obstacle: Obstacle) -> str:
    """Whether a monotone lattice path passes above-left (``"A"``) or below-right (``"B"``)."""
    ox, oy = obstacle.coords
    pts = path.vertices()
    for a, b in zip(pts, pts[1:]):
        if a[0] < ox < b[0]:
            return "A" if a[1] > oy else "B"
    raise DomainError("path does not cross the obstacle's column")


def component_labels(M: ObstacleModel, X, u, v) -> list:
    """Chain class of every path component between ``u`` and ``v`` (planar only).

    Returns a list aligned with the components of
    :func:`dihom.homology.path_components`.  The labelling is checked to be a
    bijection onto the chains of the interval.
    """
    from .homology import path_components

    if M.ndim != 2:
        raise DomainError("component labelling is implemented for planar models")
    u, v = tuple(u), tuple(v)
    ids = M.inside(u, v)
    sides = _preferred_sides(M, ids)
    comps, _ = path_components(X, u, v)
    labels = []
    for comp in comps:
        seen = set()
        for path in comp:
            seen.add(tuple(i for i in ids if path_side(path, M[i]) == sides[i]))
        if len(seen) != 1:
            raise IntegrityError("paths of one component disagree on their obstacle chain")
        labels.append(ChainClass((u, v), M.sort_chain(seen.pop())))
    expected = {c.chain for cs in enumerate_classes(M, u, v).values() for c in cs}
    if {c.chain for c in labels} != expected or len(labels) != len(expected):
        raise IntegrityError("component labels are not in bijection with chains of obstacles")
    return labels


def chain_cochain(M: ObstacleModel, X, u, v, chain, field=None):
    """Degree-1 cochain of the monomial class of ``chain``.

    It is the sum of the indicators of the components whose label contains
    the chain, so products of avoidance classes become unions of chains.
    """
    from .bimodule import Cochain, cohomology_class
    from .homology import path_components

    comps, _ = path_components(X, tuple(u), tuple(v))
    labels = component_labels(M, X, u, v)
    want = set(chain)
    values = {}
    for comp, lab in zip(comps, labels):
        if want <= set(lab.chain):
            for p in comp:
                values[p] = 1
    rep = Cochain(X, tuple(u), tuple(v), 1, values)
    return cohomology_class(X, tuple(u), tuple(v), 1, rep, field)


def avoidance_class(M: ObstacleModel, X, u, v, oid, field=None):
    return chain_cochain(M, X, u, v, (oid,), field)
