import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from spanoip import OracleIdentifier
from spanoip.exceptions import InvalidInputError, PromiseViolationError


def test_params_and_clone():
    est = OracleIdentifier(verify_promise=True)
    assert est.get_params() == {"weights": None, "verify_promise": True}
    c = clone(est)
    assert c.get_params() == est.get_params() and c is not est


def test_fit_predict_transform(worked):
    est = OracleIdentifier().fit(worked)
    assert est.n_features_in_ == 4
    assert list(est.predict(worked)) == list(worked)
    assert est.score(worked) == 1.0
    feats = est.transform(["1111", "0000"])
    assert feats.shape == (2, 6)
    assert feats[0, :2].tolist() == [2, 2]
    assert feats[1, :2].tolist() == [3, 0]
    assert np.all(feats[:, 4:] > 0)


def test_fit_accepts_array(worked):
    X = np.array([[int(b) for b in c] for c in worked])
    est = OracleIdentifier().fit(X)
    assert est.candidates_ == tuple(worked)
    assert est.predict(X[-1:])[0] == "1111"


def test_fit_transform_equals_fit_then_transform(worked):
    a = OracleIdentifier().fit_transform(worked)
    b = OracleIdentifier().fit(worked).transform(worked)
    assert np.array_equal(a, b)


def test_not_fitted():
    with pytest.raises(NotFittedError):
        OracleIdentifier().predict(["01"])


def test_promise_checked_when_asked(worked):
    assert OracleIdentifier().fit(worked).predict("1010")[0] == "0011"
    with pytest.raises(PromiseViolationError):
        OracleIdentifier(verify_promise=True).fit(worked).predict("1010")


def test_bad_inputs(worked):
    with pytest.raises(InvalidInputError):
        OracleIdentifier().fit(["01", "010"])
    with pytest.raises(InvalidInputError):
        OracleIdentifier().fit(worked).predict(["01"])


def test_complexity(worked):
    est = OracleIdentifier().fit(worked)
    assert est.complexity().wsize == pytest.approx(4.56047793232, abs=1e-10)
