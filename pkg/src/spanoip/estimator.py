"""scikit-learn style wrapper around the identification pipeline."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import nbsp
from ._validation import as_bitstring, check_candidates
from .decision_tree import evaluate
from .oip import build_instance, identify, string_oracle


class OracleIdentifier(TransformerMixin, BaseEstimator):
    """Learn the phased decision tree for a candidate set, then identify inputs.

    Parameters
    ----------
    weights : WeightTable or None
        Span-program weights; None uses the default table up to the tree depth.
    verify_promise : bool
        Check the recovered string on unqueried indices in :meth:`predict`.

    Attributes
    ----------
    candidates_ : tuple of str
    n_features_in_ : int
    instance_ : OipInstance
    span_program_ : SpanProgram
    """

    def __init__(self, weights=None, verify_promise=False):
        self.weights = weights
        self.verify_promise = verify_promise

    def fit(self, X, y=None):
        """``X`` is the candidate set: bitstrings or a 2-D 0/1 array."""
        self.candidates_ = check_candidates(X)
        self.n_features_in_ = len(self.candidates_[0])
        self.instance_ = build_instance(self.candidates_)
        self.span_program_ = nbsp.build(self.instance_.tree, self.instance_.coloring, self.weights)
        return self

    def _rows(self, X):
        if isinstance(X, (str, bytes)):
            X = [X]
        return [as_bitstring(r, self.n_features_in_) for r in X]

    def predict(self, X):
        """Identify each hidden string in ``X`` by querying it as an oracle."""
        check_is_fitted(self, "instance_")
        out = [identify(self.candidates_, string_oracle(x), verify=self.verify_promise)[0]
               for x in self._rows(X)]
        return np.array(out, dtype=object)

    def transform(self, X):
        """Per input: queries, mismatches, sum sqrt(p), sum sqrt(T), wsize+ and wsize- (exact)."""
        check_is_fitted(self, "instance_")
        feats = []
        for x in self._rows(X):
            st = evaluate(self.instance_.tree, self.instance_.coloring, x)
            rep = nbsp.witness_report(self.span_program_, x, membership=False)
            feats.append([
                st.queries,
                st.red_count,
                sum(np.sqrt(st.mismatches)),
                sum(np.sqrt(st.runs)),
                rep.wsize_plus_exact,
                rep.wsize_minus_exact,
            ])
        return np.asarray(feats, dtype=float)

    def score(self, X, y=None):
        """Fraction of inputs identified correctly (``y`` defaults to ``X``)."""
        truth = self._rows(X if y is None else y)
        return float(np.mean(self.predict(X) == np.array(truth, dtype=object)))

    def complexity(self, X=None):
        """Span-program complexity over ``X`` (default: the candidate set)."""
        check_is_fitted(self, "instance_")
        domain = self.candidates_ if X is None else self._rows(X)
        return nbsp.complexity(self.span_program_, domain)
