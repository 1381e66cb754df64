"""Path-algebra actions and products on directed (co)homology.

Cochains are finitely supported functionals on the cube chains of one
endpoint pair.  Classes carry the slice they live in, so equality of classes
is decided by exact reduction modulo boundaries or coboundaries.
"""

from __future__ import annotations

from .chains import (
    ChainComplexSlice,
    CubeChain,
    FormalChain,
    boundary,
    check_equal_length,
    complex_slice,
    tensor,
)
from .errors import DomainError, IntegrityError, ModelError, OperandError, UnsupportedDegreeError
from .homology import cohomology_ranks, homology_ranks
from .linalg import QQ, EchelonBasis, Field, SparseMatrix, get_field, kernel_basis, solve
from .precubical import PrecubicalSet, id_to_str

__all__ = [
    "PathAlgebraElement",
    "Cochain",
    "BimoduleClass",
    "coboundary",
    "act",
    "tensor",
    "conc_product",
    "box_tensor",
    "cap",
    "cup0",
    "class_basis",
    "image_rank",
]


class PathAlgebraElement:
    """Linear combination of directed edge paths (dimension-0 cube chains)."""

    def __init__(self, terms=None):
        self.terms = {}
        for p, v in (terms or {}).items():
            if p.dim != 0:
                raise DomainError(f"{p!r} is not a directed path")
            if v:
                self.terms[p] = self.terms.get(p, 0) + v
        self.terms = {p: v for p, v in self.terms.items() if v}

    @classmethod
    def path(cls, chain: CubeChain, coef=1):
        return cls({chain: coef})

    @classmethod
    def unit(cls, X: PrecubicalSet, v):
        """The constant path at ``v`` (the idempotent ``e_v``)."""
        return cls({CubeChain(X, (), v, v): 1})

    def __add__(self, other):
        terms = dict(self.terms)
        for p, v in other.terms.items():
            terms[p] = terms.get(p, 0) + v
        return PathAlgebraElement(terms)

    def __rmul__(self, scalar):
        return PathAlgebraElement({p: scalar * v for p, v in self.terms.items()})

    def __mul__(self, other: "PathAlgebraElement"):
        """Concatenation product ``p x q`` (first ``p``, then ``q``)."""
        if not isinstance(other, PathAlgebraElement):
            return NotImplemented
        terms = {}
        for a, x in self.terms.items():
            for b, y in other.terms.items():
                ab = a.concat(b)
                if ab is not None:
                    terms[ab] = terms.get(ab, 0) + x * y
        return PathAlgebraElement(terms)

    def op_mul(self, other: "PathAlgebraElement"):
        """Product of the opposite algebra: ``p x* q = q x p``."""
        return other * self

    def __eq__(self, other):
        return isinstance(other, PathAlgebraElement) and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def endpoints(self):
        pairs = {(p.start, p.end) for p in self.terms}
        if len(pairs) > 1:
            raise OperandError("path algebra element mixes endpoint pairs")
        return next(iter(pairs)) if pairs else None

    def as_chain(self) -> FormalChain:
        ends = self.endpoints()
        if ends is None:
            return FormalChain()
        return FormalChain(dict(self.terms), ends[0], ends[1], 0)

    def __repr__(self):
        return f"PathAlgebraElement({self.terms!r})"


class Cochain:
    """Functional on the ``degree - 1`` dimensional chains from ``start`` to ``end``."""

    def __init__(self, X: PrecubicalSet, start, end, degree: int, values=None, field: Field = QQ):
        if degree < 1:
            raise DomainError("cochain degrees start at 1")
        self.X = X
        self.start = start
        self.end = end
        self.degree = degree
        self.field = field
        self.values = {}
        for c, v in (values or {}).items():
            if (c.start, c.end, c.dim) != (start, end, degree - 1):
                raise DomainError(f"{c!r} is not a {degree - 1}-chain from {start!r} to {end!r}")
            v = field.coerce(v)
            if v:
                self.values[c] = v

    @property
    def dim(self) -> int:
        return self.degree - 1

    def __call__(self, x):
        if isinstance(x, CubeChain):
            return self.values.get(x, 0)
        total = 0
        for c, v in x.items():
            total += v * self.values.get(c, 0)
        return self.field.coerce(total)

    def _like(self, values):
        return Cochain(self.X, self.start, self.end, self.degree, values, self.field)

    def __add__(self, other: "Cochain"):
        self._same(other)
        values = dict(self.values)
        for c, v in other.values.items():
            values[c] = values.get(c, 0) + v
        return self._like(values)

    def __neg__(self):
        return self._like({c: -v for c, v in self.values.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, scalar):
        return self._like({c: scalar * v for c, v in self.values.items()})

    def __mul__(self, other: "Cochain"):
        """Pointwise product (only meaningful for degree-1 functions on paths)."""
        self._same(other)
        return self._like({c: v * other.values[c] for c, v in self.values.items() if c in other.values})

    def _same(self, other):
        if (self.start, self.end, self.degree) != (other.start, other.end, other.degree):
            raise OperandError("cochains live on different endpoint pairs or degrees")

    def __eq__(self, other):
        if not isinstance(other, Cochain):
            return NotImplemented
        return (self.start, self.end, self.degree) == (other.start, other.end, other.degree) and self.values == other.values

    def __bool__(self):
        return bool(self.values)

    def slice(self, extra: int = 0) -> ChainComplexSlice:
        return complex_slice(self.X, self.start, self.end, self.dim + extra)

    def vector(self, sl: ChainComplexSlice) -> dict:
        idx = sl.index[self.dim] if self.dim < len(sl.index) else {}
        return {idx[c]: v for c, v in self.values.items()}

    @classmethod
    def from_vector(cls, sl: ChainComplexSlice, degree: int, vec: dict, field: Field = QQ):
        basis = sl.bases[degree - 1] if degree - 1 < len(sl.bases) else []
        return cls(sl.X, sl.start, sl.end, degree, {basis[j]: v for j, v in vec.items()}, field)

    @classmethod
    def indicator(cls, X, chains, degree=None, field: Field = QQ):
        chains = list(chains)
        c0 = chains[0]
        return cls(X, c0.start, c0.end, degree or c0.dim + 1, {c: 1 for c in chains}, field)

    def to_json(self) -> dict:
        return {
            "from": id_to_str(self.start),
            "to": id_to_str(self.end),
            "degree": self.degree,
            "values": [[c.to_json(), self.field.to_str(v)] for c, v in sorted(self.values.items(), key=lambda kv: kv[0].sort_key())],
        }

    def __repr__(self):
        return f"Cochain({id_to_str(self.start)}->{id_to_str(self.end)}, degree={self.degree}, support={len(self.values)})"


def coboundary(f: Cochain) -> Cochain:
    """``f o boundary``, a cochain one degree higher on the same endpoints."""
    sl = f.slice(extra=1)
    n = f.dim + 1
    if n >= len(sl.bases):
        return Cochain(f.X, f.start, f.end, f.degree + 1, {}, f.field)
    vec = f.vector(sl)
    values = {}
    for j, col in enumerate(sl.matrix(n).cols):
        total = sum(v * vec.get(r, 0) for r, v in col.items())
        if total:
            values[sl.bases[n][j]] = total
    return Cochain(f.X, f.start, f.end, f.degree + 1, values, f.field)


def _as_path_element(p, X=None, v=None) -> PathAlgebraElement:
    if isinstance(p, PathAlgebraElement):
        return p
    if isinstance(p, CubeChain):
        return PathAlgebraElement.path(p)
    if p is None:
        return PathAlgebraElement.unit(X, v)
    raise TypeError(f"cannot use {p!r} as a path algebra element")


def act(p, x, q):
    """Two-sided action ``p . x . q``.

    On chains this is concatenation.  On a cochain ``f`` on ``(a, b)`` with
    ``p`` a combination of paths ``a -> a'`` and ``q`` of paths ``b' -> b``,
    the result is the cochain on ``(a', b')`` sending ``x`` to
    ``f(p . x . q)``.  Mismatched endpoints give zero.
    """
    if isinstance(x, Cochain):
        return _act_cochain(_as_path_element(p, x.X, x.start), x, _as_path_element(q, x.X, x.end))
    if isinstance(x, CubeChain):
        x = FormalChain.single(x)
    X = next(iter(x.terms)).X if x.terms else None
    pe = _as_path_element(p, X, x.start).as_chain()
    qe = _as_path_element(q, X, x.end).as_chain()
    return tensor(tensor(pe, x), qe)


def _act_cochain(p: PathAlgebraElement, f: Cochain, q: PathAlgebraElement) -> Cochain:
    pe, qe = p.endpoints(), q.endpoints()
    if pe is None or qe is None:
        return Cochain(f.X, f.start, f.end, f.degree, {}, f.field)
    a, a2 = pe
    b2, b = qe
    if a != f.start or b != f.end:
        return Cochain(f.X, a2, b2, f.degree, {}, f.field)
    values = {}
    for y, fy in f.values.items():
        for pa, ca in p.terms.items():
            k = len(pa.cubes)
            if y.cubes[:k] != pa.cubes:
                continue
            for qb, cb in q.terms.items():
                m = len(qb.cubes)
                if len(y.cubes) < k + m or (m and y.cubes[len(y.cubes) - m:] != qb.cubes):
                    continue
                middle = y.cubes[k: len(y.cubes) - m]
                if not middle and a2 != b2:
                    continue
                x = CubeChain(f.X, middle, a2, b2)
                values[x] = values.get(x, 0) + ca * cb * fy
    return Cochain(f.X, a2, b2, f.degree, values, f.field)


# --- classes -----------------------------------------------------------------


class BimoduleClass:
    """A (co)homology class of one endpoint pair with a chosen representative.

    ``degree`` uses the bimodule convention (``HM_n`` / ``HM^n``, n >= 1).
    """

    def __init__(self, variant: str, degree: int, representative, sl: ChainComplexSlice, field: Field = QQ,
                 check: bool = True):
        if variant not in ("homology", "cohomology"):
            raise DomainError(f"unknown variant {variant!r}")
        self.variant = variant
        self.degree = degree
        self.rep = representative
        self.slice = sl
        self.field = field
        self.start, self.end = sl.start, sl.end
        if check and not self.is_closed():
            raise OperandError(f"representative is not a {'cycle' if variant == 'homology' else 'cocycle'}")

    @property
    def X(self):
        return self.slice.X

    def vector(self) -> dict:
        if self.variant == "homology":
            if not self.rep.terms:
                return {}
            return self.slice.vector(self.rep, self.field)
        return {j: self.field.coerce(v) for j, v in self.rep.vector(self.slice).items()}

    def is_closed(self) -> bool:
        i = self.degree - 1
        vec = self.vector()
        if not vec:
            return True
        if self.variant == "homology":
            out = self.slice.matrix(i).apply(vec)
        else:
            out = self.slice.matrix(i + 1).transpose().apply(vec)
        return not any(self.field.coerce(v) for v in out.values())

    def _trivial_basis(self) -> EchelonBasis:
        i = self.degree - 1
        basis = EchelonBasis(self.field)
        if self.variant == "homology":
            for col in self.slice.matrix(i + 1).cols:
                if col:
                    basis.add(col)
        elif i > 0:
            for col in self.slice.matrix(i).transpose().cols:
                if col:
                    basis.add(col)
        return basis

    def canonical(self) -> dict:
        """Representative vector reduced modulo (co)boundaries."""
        return dict(sorted(self._trivial_basis().canonical(self.vector()).items()))

    def is_zero(self) -> bool:
        return not self.canonical()

    def __eq__(self, other):
        if not isinstance(other, BimoduleClass):
            return NotImplemented
        return (
            (self.variant, self.degree, self.start, self.end) == (other.variant, other.degree, other.start, other.end)
            and self.canonical() == other.canonical()
        )

    def to_json(self) -> dict:
        vec = self.canonical()
        return {
            "kind": "HM" if self.variant == "homology" else "HMdual",
            "degree": self.degree,
            "from": id_to_str(self.start),
            "to": id_to_str(self.end),
            "rep": {str(j): self.field.to_str(v) for j, v in vec.items()},
        }

    def __repr__(self):
        kind = "HM" if self.variant == "homology" else "HM^"
        return f"<{kind}{self.degree} class {id_to_str(self.start)}->{id_to_str(self.end)} rep={self.canonical()}>"


def homology_class(X, start, end, degree, rep, field=None) -> BimoduleClass:
    field = get_field(field)
    sl = complex_slice(X, start, end, degree)
    if isinstance(rep, dict):
        rep = sl.chain(degree - 1, rep)
    return BimoduleClass("homology", degree, rep, sl, field)


def cohomology_class(X, start, end, degree, rep, field=None) -> BimoduleClass:
    field = get_field(field)
    sl = complex_slice(X, start, end, degree)
    if isinstance(rep, dict):
        rep = Cochain.from_vector(sl, degree, rep, field)
    return BimoduleClass("cohomology", degree, rep, sl, field)


def class_basis(X: PrecubicalSet, start, end, degree: int, variant: str = "cohomology", field=None) -> list:
    """Canonical basis classes of ``HM_n`` or ``HM^n`` for one endpoint pair."""
    field = get_field(field)
    sl = complex_slice(X, start, end, degree)
    fn = cohomology_ranks if variant == "cohomology" else homology_ranks
    summary = fn(sl, [degree], field, representatives=True)
    out = []
    for vec in summary.representatives[degree]:
        if variant == "cohomology":
            rep = Cochain.from_vector(sl, degree, vec, field)
        else:
            rep = sl.chain(degree - 1, vec)
        out.append(BimoduleClass(variant, degree, rep, sl, field))
    return out


def _zero_class(variant, X, start, end, degree, field):
    sl = complex_slice(X, start, end, degree)
    if variant == "homology":
        rep = FormalChain(None, start, end, degree - 1)
    else:
        rep = Cochain(X, start, end, degree, {}, field)
    return BimoduleClass(variant, degree, rep, sl, field, check=False)


def _require_equal_length(X, pairs):
    ok, bad = check_equal_length(X, pairs)
    if not ok:
        v, w, m, a, b = bad
        raise ModelError(f"equal-length hypothesis fails for {v!r}->{w!r} in dimension {m}: {a!r} vs {b!r}")


def conc_product(a: BimoduleClass, b: BimoduleClass, check: bool = True) -> BimoduleClass:
    """``[c] * [d] = [c (x) d]`` in ``HM_{i+j-1}`` of ``(start(a), end(b))``."""
    if a.variant != "homology" or b.variant != "homology":
        raise OperandError("conc-product takes homology classes")
    degree = a.degree + b.degree - 1
    if a.end != b.start:
        return _zero_class("homology", a.X, a.start, b.end, degree, a.field)
    if check:
        _require_equal_length(a.X, [(a.start, a.end), (b.start, b.end), (a.start, b.end)])
    rep = tensor(a.rep, b.rep)
    sl = complex_slice(a.X, a.start, b.end, degree)
    rep = FormalChain(rep.terms, a.start, b.end, degree - 1)
    return BimoduleClass("homology", degree, rep, sl, a.field)


def box_tensor(f: Cochain, g: Cochain) -> Cochain:
    """Dual tensor: ``(f [x] g)(c (x) d) = f(c) g(d)``, zero on chains avoiding the junction.

    Each chain through the junction factors uniquely there because the
    complex has no directed loops; this is checked.
    """
    if f.X is not g.X:
        raise OperandError("cochains on different complexes")
    X = f.X
    if not X.is_acyclic():
        raise ModelError("dual tensor needs unique factorisation; the complex has directed loops")
    degree = f.degree + g.degree - 1
    if f.end != g.start:
        return Cochain(X, f.start, g.end, degree, {}, f.field)
    values = {}
    for c, x in f.values.items():
        for d, y in g.values.items():
            cd = c.concat(d)
            values[cd] = values.get(cd, 0) + x * y
    return Cochain(X, f.start, g.end, degree, values, f.field)


def _through(chain: CubeChain, beta) -> bool:
    return beta in chain.vertices()


def cap(a: BimoduleClass, b: BimoduleClass) -> BimoduleClass:
    """Cohomology class induced by the dual tensor of representatives.

    The dual tensor is a cocycle on the subcomplex of chains passing through
    the junction ``beta``.  The result is a cocycle on the whole slice that
    restricts to it up to a coboundary, reduced modulo the cocycles whose
    restriction is a coboundary; that reduction makes it independent of all
    choices.  Raises :class:`OperandError` if no such extension exists.
    """
    if a.variant != "cohomology" or b.variant != "cohomology":
        raise OperandError("cap takes cohomology classes")
    X, field = a.X, a.field
    degree = a.degree + b.degree - 1
    if a.end != b.start:
        return _zero_class("cohomology", X, a.start, b.end, degree, field)
    beta = a.end
    m = degree - 1
    sl = complex_slice(X, a.start, b.end, m + 1)
    target = box_tensor(a.rep, b.rep)

    n_h = sl.rank_of(m)
    k_m = [j for j, c in enumerate(sl.bases[m])] if m < len(sl.bases) else []
    k_m = [j for j in k_m if _through(sl.bases[m][j], beta)]
    k_lo = [j for j, c in enumerate(sl.bases[m - 1]) if _through(c, beta)] if m >= 1 else []
    e_col = {j: n_h + t for t, j in enumerate(k_lo)}
    n_vars = n_h + len(k_lo)

    rows = []  # each equation as {variable: coefficient}
    rhs = {}
    for col in sl.matrix(m + 1).cols:
        rows.append(dict(col))
    bd = sl.matrix(m) if m >= 1 else None
    tvec = target.vector(sl)
    for j in k_m:
        eq = {j: 1}
        if bd is not None:
            for z, v in bd.cols[j].items():
                eq[e_col[z]] = eq.get(e_col[z], 0) - v
        if tvec.get(j):
            rhs[len(rows)] = tvec[j]
        rows.append(eq)
    system = SparseMatrix.from_triplets(len(rows), n_vars, ((r, c, v) for r, eq in enumerate(rows) for c, v in eq.items()))
    sol = solve(system, rhs, field)
    if sol is None:
        raise OperandError("the dual tensor does not extend to a cohomology class of the composite pair")
    h = {j: v for j, v in sol.items() if j < n_h}
    ambiguity = EchelonBasis(field)
    for vec in kernel_basis(system, field):
        proj = {j: v for j, v in vec.items() if j < n_h}
        if proj:
            ambiguity.add(proj)
    h = ambiguity.canonical(h)
    rep = Cochain.from_vector(sl, degree, h, field)
    return BimoduleClass("cohomology", degree, rep, complex_slice(X, a.start, b.end, degree), field)


def cup0(a: BimoduleClass, b: BimoduleClass) -> BimoduleClass:
    """Cup product in trace-space degree 0: pointwise product of component functions."""
    if a.variant != "cohomology" or b.variant != "cohomology":
        raise OperandError("cup products take cohomology classes")
    if a.degree != 1 or b.degree != 1:
        raise UnsupportedDegreeError("cup products are only implemented on HM^1")
    if (a.start, a.end) != (b.start, b.end):
        raise OperandError("cup products need classes on the same endpoint pair")
    rep = a.rep * b.rep
    return BimoduleClass("cohomology", 1, rep, a.slice, a.field)


def image_rank(classes) -> int:
    """Dimension of the span of a family of classes of one pair and degree."""
    classes = list(classes)
    if not classes:
        return 0
    basis = classes[0]._trivial_basis()
    start = len(basis)
    for c in classes:
        basis.add(c.vector())
    return len(basis) - start


def pairing(f: Cochain, c) -> object:
    """Evaluation ``<f, c>``."""
    return f(c)


def coboundary_adjoint_defect(f: Cochain, c: FormalChain):
    """``<coboundary f, c> - <f, boundary c>`` (zero for every input)."""
    return f.field.coerce(coboundary(f)(c) - f(boundary(c)))


def ensure_integrity(sl: ChainComplexSlice, field: Field = QQ):
    bad = sl.check(field)
    if bad:
        raise IntegrityError(f"boundary squares to non-zero in dimension {bad[0]}")
