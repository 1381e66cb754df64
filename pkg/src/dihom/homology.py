"""(Co)homology of cube-chain slices and a union-find shortcut for degree 1.

Degrees follow the bimodule convention: ``HM_n`` / ``HM^n`` for ``n >= 1``
is the homology of the slice in chain dimension ``n - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .chains import ChainComplexSlice, check_equal_length, complex_slice, enumerate_chains
from .errors import IntegrityError, ModelError
from .linalg import QQ, EchelonBasis, Field, get_field, rank
from .precubical import PrecubicalSet, id_to_str


@dataclass
class HomologySummary:
    start: object
    end: object
    ranks: dict
    kind: str = "homology"
    representatives: dict = field(default_factory=dict)

    def to_json(self, field: Field = QQ, with_representatives: bool = False) -> dict:
        out = {
            "from": id_to_str(self.start),
            "to": id_to_str(self.end),
            "HM": {str(n): r for n, r in sorted(self.ranks.items())},
        }
        if with_representatives:
            out["representatives"] = {
                str(n): [{str(j): field.to_str(v) for j, v in sorted(vec.items())} for vec in reps]
                for n, reps in sorted(self.representatives.items())
            }
        return out


class UnionFind:
    """Disjoint sets with path halving and union by size."""

    def __init__(self, items=()):
        self.parent = {}
        self.size = {}
        for x in items:
            self.add(x)

    def add(self, x):
        if x not in self.parent:
            self.parent[x] = x
            self.size[x] = 1

    def find(self, x):
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True

    def groups(self) -> list:
        out = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return list(out.values())


def _degrees(sl: ChainComplexSlice, degrees):
    if degrees is None:
        return range(1, sl.top_dim + 2)
    return degrees


def _check_slice(sl: ChainComplexSlice, field: Field, need: int):
    if sl.truncated and need > sl.top_dim:
        raise IntegrityError(f"slice truncated at dimension {sl.top_dim}, degree needs dimension {need}")
    bad = sl.check(field)
    if bad:
        raise IntegrityError(f"inconsistent slice: boundary squares to non-zero in dimension {bad[0]}")


def homology_ranks(sl: ChainComplexSlice, degrees=None, field=None, representatives: bool = False) -> HomologySummary:
    """Ranks of ``HM_n`` for ``n`` in ``degrees`` (default: all available).

    ``HM_n`` is the homology of the slice in dimension ``n - 1``.
    """
    field = get_field(field)
    degrees = list(_degrees(sl, degrees))
    _check_slice(sl, field, max(degrees, default=1))
    ranks = {}
    reps = {}
    for n in degrees:
        i = n - 1
        dim_c = sl.rank_of(i)
        r_out = rank(sl.matrix(i), field)
        r_in = rank(sl.matrix(i + 1), field)
        ranks[n] = dim_c - r_out - r_in
        if representatives:
            reps[n] = _complement(_columns(sl.matrix(i + 1)), _kernel(sl.matrix(i), field), field)
    return HomologySummary(sl.start, sl.end, ranks, "homology", reps)


def cohomology_ranks(sl: ChainComplexSlice, degrees=None, field=None, representatives: bool = False) -> HomologySummary:
    """Ranks of ``HM^n`` computed from the transposed (coboundary) matrices.

    For ``n = 1`` there is nothing below, so the image part is zero.
    """
    field = get_field(field)
    degrees = list(_degrees(sl, degrees))
    _check_slice(sl, field, max(degrees, default=1))
    ranks = {}
    reps = {}
    for n in degrees:
        i = n - 1
        delta_out = sl.matrix(i + 1).transpose()  # C^i -> C^{i+1}
        delta_in = sl.matrix(i).transpose()  # C^{i-1} -> C^i
        dim_c = sl.rank_of(i)
        ranks[n] = dim_c - rank(delta_out, field) - (rank(delta_in, field) if i > 0 else 0)
        if representatives:
            image = _columns(delta_in) if i > 0 else []
            reps[n] = _complement(image, _kernel(delta_out, field), field)
    return HomologySummary(sl.start, sl.end, ranks, "cohomology", reps)


def _columns(M):
    return [c for c in M.cols if c]


def _kernel(M, field):
    from .linalg import kernel_basis

    return kernel_basis(M, field)


def _complement(image, kernel, field) -> list:
    """Canonical representatives of ``span(kernel) / span(image)``."""
    basis = EchelonBasis(field)
    for vec in image:
        basis.add(vec)
    reps = []
    for vec in kernel:
        if basis.add(vec) is None:
            reps.append(vec)
    quotient = EchelonBasis(field)
    for vec in image:
        quotient.add(vec)
    return [dict(sorted(quotient.canonical(v).items())) for v in reps]


def path_components(X: PrecubicalSet, v, w, check: bool = True):
    """Connected components of the dimension-0 chains from ``v`` to ``w``.

    Two directed paths are linked when they are the two faces of a
    one-dimensional chain (a single square swap).  Returns
    ``(components, count)`` with components as lists of chains in basis order.
    """
    if check:
        ok, bad = check_equal_length(X, (v, w))
        if not ok:
            raise ModelError(f"equal-length hypothesis fails for {v!r}->{w!r}: {bad[3]!r} vs {bad[4]!r}")
    sl = complex_slice(X, v, w, 1)
    paths = sl.bases[0]
    uf = UnionFind(range(len(paths)))
    for col in sl.matrix(1).cols:
        rows = list(col)
        for r in rows[1:]:
            uf.union(rows[0], r)
    groups = sorted((sorted(g) for g in uf.groups()), key=lambda g: g[0])
    comps = [[paths[j] for j in g] for g in groups]
    return comps, len(comps)


def component_index(X: PrecubicalSet, v, w) -> dict:
    """Map each dimension-0 chain to the index of its path component."""
    comps, _ = path_components(X, v, w, check=False)
    return {c: k for k, comp in enumerate(comps) for c in comp}


def pair_summary(X: PrecubicalSet, v, w, max_degree: int, field=None, kind: str = "cohomology",
                 representatives: bool = False) -> HomologySummary:
    """Convenience wrapper: build the slice and compute ranks up to ``max_degree``."""
    sl = complex_slice(X, v, w, max_degree)
    fn = cohomology_ranks if kind == "cohomology" else homology_ranks
    return fn(sl, range(1, max_degree + 1), field, representatives)


def full_dimension(X: PrecubicalSet, v, w) -> int:
    """Largest chain dimension occurring between ``v`` and ``w`` (-1 if none)."""
    return len(enumerate_chains(X, v, w)) - 1
