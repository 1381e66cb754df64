"""Exact sparse linear algebra over the rationals or a prime field.

Vectors are ``dict`` objects mapping a coordinate to a non-zero scalar.
Matrices are stored by columns; no floating point is used anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence


class Field:
    """Arithmetic helper for an exact field; scalars are plain Python numbers."""

    name = "field"

    def coerce(self, x):
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    def to_str(self, x) -> str:
        return str(self.coerce(x))


class Rationals(Field):
    """Exact rationals; integral values stay plain ``int`` for speed."""

    name = "QQ"

    def coerce(self, x):
        if type(x) is int:
            return x
        if isinstance(x, Fraction):
            return x.numerator if x.denominator == 1 else x
        if isinstance(x, (int, str)):
            return self.coerce(Fraction(x))
        raise TypeError(f"cannot coerce {x!r} to an exact rational")

    def inv(self, x):
        if x == 1 or x == -1:
            return int(x)
        return self.coerce(Fraction(1) / x)

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "Rationals()"


class PrimeField(Field):
    def __init__(self, p: int):
        if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.name = f"GF({p})"

    def coerce(self, x):
        if isinstance(x, Fraction):
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        if isinstance(x, str):
            return self.coerce(Fraction(x))
        return int(x) % self.p

    def inv(self, x):
        return pow(int(x), -1, self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"


QQ = Rationals()


def get_field(spec) -> Field:
    """``"rationals"``/``"QQ"``/``None`` or a prime (int or ``"GF(p)"``/``"p"``)."""
    if spec is None or isinstance(spec, Rationals):
        return QQ
    if isinstance(spec, Field):
        return spec
    if isinstance(spec, int):
        return PrimeField(spec)
    text = str(spec).strip()
    if text.lower() in ("rationals", "qq", "q"):
        return QQ
    if text.upper().startswith("GF(") and text.endswith(")"):
        text = text[3:-1]
    try:
        return PrimeField(int(text))
    except ValueError:
        raise ValueError(f"unknown field {spec!r}") from None


def clean(vec: dict, field: Field) -> dict:
    out = {}
    for k, v in vec.items():
        v = field.coerce(v)
        if v:
            out[k] = v
    return out


class SparseMatrix:
    """Column-stored sparse matrix with ``nrows x ncols`` shape."""

    def __init__(self, nrows: int, ncols: int, cols: Sequence[dict] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        self.cols = [dict(c) for c in cols] if cols is not None else [{} for _ in range(ncols)]
        if len(self.cols) != ncols:
            raise ValueError("column count mismatch")

    @classmethod
    def from_triplets(cls, nrows, ncols, triplets: Iterable):
        m = cls(nrows, ncols)
        for r, c, v in triplets:
            if v:
                m.cols[c][r] = m.cols[c].get(r, 0) + v
        return m

    @classmethod
    def from_dense(cls, rows):
        rows = [list(r) for r in rows]
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        return cls.from_triplets(nrows, ncols, ((i, j, v) for i, r in enumerate(rows) for j, v in enumerate(r)))

    def triplets(self):
        for j, col in enumerate(self.cols):
            for i in sorted(col):
                yield i, j, col[i]

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix.from_triplets(self.ncols, self.nrows, ((j, i, v) for i, j, v in self.triplets()))

    def to_dense(self):
        rows = [[0] * self.ncols for _ in range(self.nrows)]
        for i, j, v in self.triplets():
            rows[i][j] = v
        return rows

    def apply(self, vec: dict) -> dict:
        """Matrix times a sparse column vector."""
        out = {}
        for j, x in vec.items():
            for i, v in self.cols[j].items():
                out[i] = out.get(i, 0) + v * x
        return {i: v for i, v in out.items() if v}

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return SparseMatrix(self.nrows, other.ncols, [self.apply(c) for c in other.cols])

    def is_zero(self, field: Field | None = None) -> bool:
        field = field or QQ
        return all(not field.coerce(v) for col in self.cols for v in col.values())

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={sum(map(len, self.cols))})"


class EchelonBasis:
    """Incrementally built basis of a subspace, kept in echelon form.

    Every stored vector has its smallest coordinate as pivot, scaled to 1, and
    pivots are pairwise distinct.  ``add`` can track how each reduced vector is
    written in terms of the inputs, which is how kernels are obtained.
    """

    def __init__(self, field: Field = QQ):
        self.field = field
        self.rows = {}  # pivot -> (vector, combination or None)

    def __len__(self):
        return len(self.rows)

    def _axpy(self, vec, coef, other):
        f = self.field
        for k, v in other.items():
            nv = f.coerce(vec.get(k, 0) - coef * v)
            if nv:
                vec[k] = nv
            else:
                vec.pop(k, None)

    def reduce(self, vec: dict, combo: dict | None = None):
        """Reduce ``vec`` until its leading coordinate is not a pivot.

        Returns ``(remainder, combo)``; the remainder is empty iff ``vec`` lies
        in the span.
        """
        vec = clean(vec, self.field)
        combo = dict(combo) if combo is not None else None
        while vec:
            piv = min(vec)
            hit = self.rows.get(piv)
            if hit is None:
                break
            coef = vec[piv]
            self._axpy(vec, coef, hit[0])
            if combo is not None and hit[1] is not None:
                self._axpy(combo, coef, hit[1])
        return vec, combo

    def add(self, vec: dict, combo: dict | None = None):
        """Insert ``vec``.  Returns ``None`` if the span grew, else the dependency."""
        rem, combo = self.reduce(vec, combo)
        if not rem:
            return combo if combo is not None else {}
        f = self.field
        piv = min(rem)
        scale = f.inv(rem[piv])
        rem = {k: f.coerce(v * scale) for k, v in rem.items()}
        if combo is not None:
            combo = {k: f.coerce(v * scale) for k, v in combo.items()}
        self.rows[piv] = (rem, combo)
        return None

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)[0]

    def canonical(self, vec: dict) -> dict:
        """Representative of ``vec`` modulo the span with no pivot coordinates."""
        vec = clean(vec, self.field)
        while True:
            hits = [k for k in vec if k in self.rows]
            if not hits:
                return vec
            k = min(hits)
            self._axpy(vec, vec[k], self.rows[k][0])

    def reduced_rows(self) -> list:
        """The basis in reduced echelon form, ordered by pivot."""
        out = []
        for piv in sorted(self.rows):
            row = dict(self.rows[piv][0])
            del row[piv]
            row = self.canonical(row)
            row[piv] = self.field.coerce(1)
            out.append(dict(sorted(row.items())))
        return out


def rank(M: SparseMatrix, field: Field = QQ) -> int:
    """Exact rank by column elimination."""
    basis = EchelonBasis(field)
    for col in sorted(M.cols, key=len):
        if col:
            basis.add(col)
    return len(basis)


def image_basis(M: SparseMatrix, field: Field = QQ) -> list:
    """Reduced echelon basis of the column space."""
    basis = EchelonBasis(field)
    for col in M.cols:
        if col:
            basis.add(col)
    return basis.reduced_rows()


def kernel_basis(M: SparseMatrix, field: Field = QQ) -> list:
    """Reduced echelon basis of ``{x : M x = 0}`` (vectors indexed by column)."""
    basis = EchelonBasis(field)
    kernel = EchelonBasis(field)
    for j, col in enumerate(M.cols):
        dep = basis.add(col, {j: 1})
        if dep is not None:
            kernel.add(dep)
    return kernel.reduced_rows()


def solve(M: SparseMatrix, rhs: dict, field: Field = QQ):
    """One solution ``x`` of ``M x = rhs`` as a sparse dict, or ``None``."""
    basis = EchelonBasis(field)
    for j, col in enumerate(M.cols):
        basis.add(col, {j: 1})
    rem, combo = basis.reduce(rhs, {})
    if rem:
        return None
    # rhs - sum(combo_j * col_j) = 0 in the reduction bookkeeping sign convention
    return {j: field.coerce(-v) for j, v in combo.items() if field.coerce(v)}
