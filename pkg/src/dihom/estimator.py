"""Estimator-style wrapper: fit a model, transform vertex pairs into rank vectors."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .chains import check_equal_length, complex_slice
from .errors import DomainError, ModelError
from .homology import cohomology_ranks, homology_ranks
from .precubical import reachable_pairs, sorted_pairs
from .validation import check_complex, check_degree, check_field, check_pairs


class DirectedCohomology(TransformerMixin, BaseEstimator, auto_wrap_output_keys=None):
    """Ranks of the directed (co)homology bimodules of a fitted model.

    Parameters
    ----------
    max_degree : int, default=2
        Degrees ``1..max_degree`` are reported.
    field : str or int, default="rationals"
        Coefficient field; a prime selects GF(p).
    kind : {"cohomology", "homology"}, default="cohomology"

    Attributes
    ----------
    model_ : LoadedModel
    pairs_ : list of reachable vertex pairs, in canonical order
    field_ : Field

    Examples
    --------
    >>> from dihom import GridSpec
    >>> est = DirectedCohomology(max_degree=2).fit(GridSpec((1, 1), {(0, 0)}))
    >>> est.transform([((0, 0), (1, 1))])
    array([[2, 0]])
    """

    def __init__(self, max_degree=2, field="rationals", kind="cohomology"):
        self.max_degree = max_degree
        self.field = field
        self.kind = kind

    def fit(self, X, y=None):
        if self.kind not in ("cohomology", "homology"):
            raise DomainError(f"kind must be 'cohomology' or 'homology', got {self.kind!r}")
        self.max_degree_ = check_degree(self.max_degree)
        self.field_ = check_field(self.field)
        self.model_ = check_complex(X)
        self.pairs_ = sorted_pairs(self.model_.X, reachable_pairs(self.model_.X))
        return self

    def transform(self, X=None):
        """Array of shape ``(n_pairs, max_degree)`` for the vertex pairs ``X``.

        ``None`` means every reachable pair, in canonical order.
        """
        check_is_fitted(self, "model_")
        pairs = self.pairs_ if X is None else check_pairs(self.model_, X)
        ok, bad = check_equal_length(self.model_.X, pairs)
        if not ok:
            raise ModelError(f"equal-length hypothesis fails for {bad[0]!r}->{bad[1]!r}")
        fn = cohomology_ranks if self.kind == "cohomology" else homology_ranks
        degrees = range(1, self.max_degree_ + 1)
        out = np.zeros((len(pairs), self.max_degree_), dtype=np.int64)
        for row, (v, w) in enumerate(pairs):
            sl = complex_slice(self.model_.X, v, w, self.max_degree_)
            ranks = fn(sl, degrees, self.field_).ranks
            out[row] = [ranks[n] for n in degrees]
        return out

    def fit_transform(self, X, y=None, pairs=None):
        return self.fit(X).transform(pairs)

    def get_feature_names_out(self, input_features=None):
        prefix = "HM^" if self.kind == "cohomology" else "HM_"
        return np.array([f"{prefix}{n}" for n in range(1, check_degree(self.max_degree) + 1)], dtype=object)
