"""Cube chains, their faces and the signed boundary operator."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .errors import DomainError, IntegrityError, ModelError
from .linalg import QQ, Field, SparseMatrix
from .precubical import PrecubicalSet, corners, id_to_str, iterated_face, reachable_from, sorted_pairs


@dataclass(frozen=True)
class CubeChain:
    """A sequence of cubes of dimension >= 1 running from ``start`` to ``end``.

    The empty chain is the constant path at ``start == end``.  Type, length and
    dimension are derived from ``X`` on demand.
    """

    X: PrecubicalSet = field(compare=False, hash=False, repr=False)
    cubes: tuple
    start: object
    end: object

    def __post_init__(self):
        object.__setattr__(self, "cubes", tuple(self.cubes))
        if not self.cubes:
            if self.start != self.end:
                raise DomainError("the empty chain must start and end at the same vertex")
            return
        at = self.start
        for c in self.cubes:
            lo, hi = corners(self.X, c)
            if self.X.dim(c) < 1 or lo != at:
                raise DomainError(f"cube {c!r} does not continue the chain at {at!r}")
            at = hi
        if at != self.end:
            raise DomainError(f"chain ends at {at!r}, not {self.end!r}")

    @classmethod
    def of(cls, X, cubes, start=None):
        """Build a chain from its cubes; ``start`` is only needed for the empty chain."""
        cubes = tuple(cubes)
        if not cubes:
            return cls(X, (), start, start)
        return cls(X, cubes, corners(X, cubes[0])[0], corners(X, cubes[-1])[1])

    @property
    def type(self) -> tuple:
        return tuple(self.X.dim(c) for c in self.cubes)

    @property
    def length(self) -> int:
        return sum(self.type)

    @property
    def dim(self) -> int:
        return sum(self.type) - len(self.cubes)

    def __len__(self):
        return len(self.cubes)

    def sort_key(self):
        t = self.type
        return (sum(t), t, tuple(self.X.order(c) for c in self.cubes))

    def concat(self, other: "CubeChain"):
        """``self`` followed by ``other``, or ``None`` when the ends do not meet."""
        if self.end != other.start:
            return None
        return CubeChain(self.X, self.cubes + other.cubes, self.start, other.end)

    def vertices(self) -> tuple:
        """Start, the junctions between cubes, and end."""
        return (self.start,) + tuple(corners(self.X, c)[1] for c in self.cubes)

    def to_json(self) -> list:
        return [id_to_str(c) for c in self.cubes]

    def __repr__(self):
        body = ", ".join(id_to_str(c) for c in self.cubes)
        return f"CubeChain({id_to_str(self.start)}->{id_to_str(self.end)}: [{body}])"


class FormalChain:
    """Finite linear combination of cube chains sharing endpoints and dimension."""

    __slots__ = ("terms", "start", "end", "dim")

    def __init__(self, terms=None, start=None, end=None, dim=None):
        self.terms = {}
        for c, v in (terms or {}).items():
            if v:
                self.terms[c] = self.terms.get(c, 0) + v
        self.terms = {c: v for c, v in self.terms.items() if v}
        if self.terms:
            sample = next(iter(self.terms))
            start = sample.start if start is None else start
            end = sample.end if end is None else end
            dim = sample.dim if dim is None else dim
            for c in self.terms:
                if (c.start, c.end, c.dim) != (start, end, dim):
                    raise DomainError("formal chain terms must share endpoints and dimension")
        self.start, self.end, self.dim = start, end, dim

    @classmethod
    def single(cls, chain: CubeChain, coef=1):
        return cls({chain: coef}, chain.start, chain.end, chain.dim)

    def _like(self, terms):
        return FormalChain(terms, self.start, self.end, self.dim)

    def __add__(self, other: "FormalChain"):
        if not other.terms:
            return self
        if not self.terms:
            return other
        terms = dict(self.terms)
        for c, v in other.terms.items():
            terms[c] = terms.get(c, 0) + v
        return FormalChain(terms, self.start, self.end, self.dim)

    def __neg__(self):
        return self._like({c: -v for c, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, scalar):
        return self._like({c: scalar * v for c, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, FormalChain):
            return NotImplemented
        return self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def items(self):
        return self.terms.items()

    def coefficient(self, chain) -> object:
        return self.terms.get(chain, 0)

    def reduced(self, field: Field):
        return self._like({c: field.coerce(v) for c, v in self.terms.items()})

    def __repr__(self):
        body = " + ".join(f"{v}*{c!r}" for c, v in sorted(self.terms.items(), key=lambda kv: kv[0].sort_key()))
        return f"FormalChain({body or '0'})"


# --- enumeration -----------------------------------------------------------


def _coreachable(X: PrecubicalSet, w) -> set:
    """Vertices from which ``w`` can be reached."""
    key = ("coreach", w)
    hit = X._slice_cache.get(key)
    if hit is not None:
        return hit
    back = {v: [] for v in X.vertices}
    for e in X.cells[1] if len(X.cells) > 1 else ():
        a, b = corners(X, e)
        back[b].append(a)
    seen = {w}
    queue = deque([w])
    while queue:
        u = queue.popleft()
        for a in back[u]:
            if a not in seen:
                seen.add(a)
                queue.append(a)
    X._slice_cache[key] = seen
    return seen


def _require_acyclic(X: PrecubicalSet):
    key = ("acyclic",)
    ok = X._slice_cache.get(key)
    if ok is None:
        ok = X._slice_cache[key] = X.is_acyclic()
    if not ok:
        raise ModelError("cube chains need a complex without directed loops; use length_covering first")


def enumerate_chains(X: PrecubicalSet, v, w, max_dim: int | None = None) -> list:
    """All cube chains from ``v`` to ``w`` grouped by dimension.

    Returns a list ``out`` where ``out[m]`` holds the ``m``-dimensional chains
    sorted by (length, type, cube order).  With ``max_dim=None`` every
    dimension that occurs is included.
    """
    if v not in X or w not in X:
        raise DomainError("endpoints must be vertices of X")
    _require_acyclic(X)
    cap = float("inf") if max_dim is None else max_dim
    good = _coreachable(X, w)
    found = {}

    def walk(u, prefix, d):
        if u == w:
            found.setdefault(d, []).append(CubeChain(X, tuple(prefix), v, w))
        for c in X.cubes_from(u):
            nd = d + X.dim(c) - 1
            if nd > cap:
                continue
            hi = corners(X, c)[1]
            if hi in good:
                prefix.append(c)
                walk(hi, prefix, nd)
                prefix.pop()

    if v in good:
        walk(v, [], 0)
    top = max(found) if max_dim is None and found else (max_dim if max_dim is not None else 0)
    return [sorted(found.get(m, []), key=CubeChain.sort_key) for m in range(top + 1)]


# --- faces and boundary ---------------------------------------------------


def sgn(directions: Iterable[int]) -> int:
    """+1 iff the sum of the directions has the parity of 1 + 2 + ... + r."""
    directions = list(directions)
    r = len(directions)
    return 1 if (sum(directions) - r * (r + 1) // 2) % 2 == 0 else -1


def chain_face(c: CubeChain, k: int, directions) -> CubeChain:
    """Split the ``k``-th cube (1-based) of ``c`` along the direction set.

    The cube is replaced by its lower face in the complementary directions
    followed by its upper face in ``directions``.
    """
    if not 1 <= k <= len(c.cubes):
        raise DomainError(f"position {k} outside a chain of {len(c.cubes)} cubes")
    cube = c.cubes[k - 1]
    n = c.X.dim(cube)
    chosen = set(directions)
    if any(not 0 <= i < n for i in chosen):
        raise DomainError(f"directions {sorted(chosen)} out of range for a {n}-cube")
    if not 0 < len(chosen) < n:
        raise DomainError("a chain face needs 0 < |I| < n_k")
    rest = set(range(n)) - chosen
    first = iterated_face(c.X, cube, 0, rest)
    second = iterated_face(c.X, cube, 1, chosen)
    cubes = c.cubes[: k - 1] + (first, second) + c.cubes[k:]
    return CubeChain(c.X, cubes, c.start, c.end)


def boundary_terms(c: CubeChain):
    """Yield ``(sign, face)`` for every term of the boundary of ``c``."""
    offset = 0
    for k, cube in enumerate(c.cubes, start=1):
        n = c.X.dim(cube)
        for r in range(1, n):
            for I in itertools.combinations(range(n), r):
                # no r in the exponent: keeping (-1)^(r+1) breaks d^2 = 0 on
                # 3-cubes (the two agree whenever r is odd)
                sign = (-1) ** ((offset + k) % 2) * sgn(I)
                yield sign, chain_face(c, k, I)
        offset += n


def boundary(c) -> FormalChain:
    """Signed boundary of a cube chain or of a formal chain."""
    if isinstance(c, FormalChain):
        out = FormalChain(None, c.start, c.end, None if c.dim is None else c.dim - 1)
        for chain, coef in c.items():
            out = out + coef * boundary(chain)
        return out
    terms = {}
    for sign, f in boundary_terms(c):
        terms[f] = terms.get(f, 0) + sign
    return FormalChain(terms, c.start, c.end, c.dim - 1)


def tensor(c, d):
    """Concatenation product, extended bilinearly; mismatched ends give zero."""
    if isinstance(c, CubeChain):
        c = FormalChain.single(c)
    if isinstance(d, CubeChain):
        d = FormalChain.single(d)
    dim = None if c.dim is None or d.dim is None else c.dim + d.dim
    if c.end != d.start and c.terms and d.terms:
        return FormalChain(None, c.start, d.end, dim)
    terms = {}
    for a, x in c.items():
        for b, y in d.items():
            ab = a.concat(b)
            if ab is not None:
                terms[ab] = terms.get(ab, 0) + x * y
    return FormalChain(terms, c.start, d.end, dim)


# --- slices ------------------------------------------------------------------


class ChainComplexSlice:
    """The chain complex of cube chains from ``start`` to ``end``.

    ``bases[i]`` lists the ``i``-dimensional chains; ``matrix(i)`` is the
    boundary from dimension ``i`` to ``i - 1`` in those bases.
    """

    def __init__(self, X: PrecubicalSet, start, end, bases, matrices, truncated: bool):
        self.X = X
        self.start = start
        self.end = end
        self.bases = bases
        self.matrices = matrices
        self.truncated = truncated
        self.index = [{c: j for j, c in enumerate(level)} for level in bases]

    @property
    def top_dim(self) -> int:
        return len(self.bases) - 1

    def rank_of(self, i: int) -> int:
        return len(self.bases[i]) if 0 <= i < len(self.bases) else 0

    def matrix(self, i: int) -> SparseMatrix:
        """Boundary from dimension ``i`` to ``i - 1`` (empty outside the range)."""
        if i in self.matrices:
            return self.matrices[i]
        return SparseMatrix(self.rank_of(i - 1), self.rank_of(i))

    def sizes(self) -> tuple:
        return tuple(len(b) for b in self.bases)

    def vector(self, chain: FormalChain, field: Field = QQ) -> dict:
        """Coordinates of a formal chain in the basis of its dimension."""
        idx = self.index[chain.dim]
        out = {}
        for c, v in chain.items():
            v = field.coerce(v)
            if v:
                out[idx[c]] = v
        return out

    def chain(self, i: int, vec: dict) -> FormalChain:
        return FormalChain({self.bases[i][j]: v for j, v in vec.items()}, self.start, self.end, i)

    def check(self, field: Field = QQ) -> list:
        """Degrees ``i`` where the composite of boundaries is non-zero."""
        bad = []
        for i in range(2, len(self.bases)):
            if not (self.matrix(i - 1) @ self.matrix(i)).is_zero(field):
                bad.append(i)
        return bad

    def to_json(self, field: Field = QQ) -> dict:
        """Flat basis across dimensions and boundary triplets in global indices."""
        offsets = []
        total = 0
        for level in self.bases:
            offsets.append(total)
            total += len(level)
        basis = [c.to_json() for level in self.bases for c in level]
        dims = [i for i, level in enumerate(self.bases) for _ in level]
        triplets = []
        for i in range(1, len(self.bases)):
            for r, col, v in self.matrix(i).triplets():
                triplets.append([offsets[i - 1] + r, offsets[i] + col, field.to_str(v)])
        return {
            "from": id_to_str(self.start),
            "to": id_to_str(self.end),
            "dims": dims,
            "basis": basis,
            "boundary": triplets,
        }


def complex_slice(X: PrecubicalSet, v, w, max_dim: int | None = None, check: bool = False) -> ChainComplexSlice:
    """Bases and boundary matrices of the cube-chain complex from ``v`` to ``w``.

    Results are cached on ``X``; a slice computed with a larger (or no)
    dimension cap is reused for smaller requests.
    """
    cache = X._slice_cache
    full = cache.get(("slice", v, w, None))
    if full is not None:
        sl = full
    else:
        sl = cache.get(("slice", v, w, max_dim)) if max_dim is not None else None
    if sl is None:
        bases = enumerate_chains(X, v, w, max_dim)
        matrices = {}
        for i in range(1, len(bases)):
            rows = {c: j for j, c in enumerate(bases[i - 1])}
            cols = []
            for c in bases[i]:
                col = {}
                for sign, f in boundary_terms(c):
                    r = rows[f]
                    col[r] = col.get(r, 0) + sign
                cols.append({r: x for r, x in col.items() if x})
            matrices[i] = SparseMatrix(len(bases[i - 1]), len(bases[i]), cols)
        sl = ChainComplexSlice(X, v, w, bases, matrices, truncated=max_dim is not None)
        cache[("slice", v, w, max_dim)] = sl
    if check:
        bad = sl.check()
        if bad:
            raise IntegrityError(f"boundary squares to non-zero in dimension {bad[0]} for {v!r}->{w!r}")
    if max_dim is not None and sl.top_dim > max_dim:
        sl = _truncate(sl, max_dim)
    return sl


def _truncate(sl: ChainComplexSlice, max_dim: int) -> ChainComplexSlice:
    bases = sl.bases[: max_dim + 1]
    matrices = {i: m for i, m in sl.matrices.items() if i <= max_dim}
    return ChainComplexSlice(sl.X, sl.start, sl.end, bases, matrices, truncated=True)


def check_equal_length(X: PrecubicalSet, pairs=None):
    """Whether all chains of one dimension between fixed endpoints share a length.

    Returns ``(ok, counterexample)`` where the counterexample is
    ``(v, w, dim, chain_a, chain_b)`` or ``None``.
    """
    if pairs is None:
        pairs = [(v, w) for v in X.vertices for w in reachable_from(X, v)]
        pairs = sorted_pairs(X, pairs)
    elif isinstance(pairs, tuple) and len(pairs) == 2 and pairs[0] in X and pairs[1] in X:
        pairs = [pairs]
    for v, w in pairs:
        for m, level in enumerate(enumerate_chains(X, v, w)):
            if not level:
                continue
            first = level[0]
            for c in level[1:]:
                if c.length != first.length:
                    return False, (v, w, m, first, c)
    return True, None


def leibniz_defect(c: CubeChain, d: CubeChain) -> FormalChain:
    """``boundary(c (x) d) - boundary(c) (x) d - (-1)^dim(c) c (x) boundary(d)``.

    Zero for every pair of composable chains.
    """
    lhs = boundary(tensor(c, d))
    rhs = tensor(boundary(c), FormalChain.single(d)) + (-1) ** c.dim * tensor(FormalChain.single(c), boundary(d))
    return lhs - rhs


def as_fraction(x):
    return x if isinstance(x, Fraction) else Fraction(x)
