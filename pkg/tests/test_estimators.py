import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from qsimnet import CircuitEmulator, EnvelopeTransformer, pauli_to_matrix, propagate

from conftest import SX


def test_params_roundtrip():
    est = CircuitEmulator(psi0=[1, 0], shift_margin=0.5)
    p = est.get_params()
    assert p["psi0"] == [1, 0] and p["shift_margin"] == 0.5 and p["mode"] == "auto"
    c = clone(est).set_params(cap=2.0)
    assert c.cap == 2.0 and est.cap == 1.0
    assert EnvelopeTransformer(squared=False).get_params() == {
        "squared": False, "edge": "predict", "interior_fraction": 0.1,
    }


def test_emulator_predicts_real_part():
    H = pauli_to_matrix((2, 1, 0, 0))
    est = CircuitEmulator(psi0=[1, 0]).fit(H)
    t = np.linspace(0, 5, 51)
    V = est.predict(t)
    np.testing.assert_allclose(V, propagate(H, [1, 0], t).states.real, atol=1e-10)
    np.testing.assert_allclose(est.predict(t[:, None]), V)
    assert est.n_features_in_ == 2 and est.shift_ == 0.0
    assert est.score(t[::-1] + 0.5) > -1e-10


def test_emulator_imag_part_and_shift():
    est = CircuitEmulator(psi0=[1, 1j], part="imag_part", shift_margin=0.5).fit(SX)
    assert est.shift_ == pytest.approx(1.5)
    assert est.hamiltonian_.spectrum().min() == pytest.approx(0.5)
    t = np.linspace(0, 3, 31)
    ref = propagate(est.hamiltonian_, np.array([1, 1j]) / np.sqrt(2), t).states.imag
    np.testing.assert_allclose(est.predict(t), ref, atol=1e-10)


def test_unfitted_and_bad_times():
    with pytest.raises(NotFittedError):
        CircuitEmulator().predict([0.0, 1.0])
    est = CircuitEmulator().fit(np.diag([1.0, 2.0]))
    with pytest.raises(ValueError):
        est.predict(np.zeros((3, 2)))


def test_envelope_transformer_in_pipeline():
    t = np.arange(0, 20001) * 1e-3
    H = pauli_to_matrix((2, 1, 0, 0))
    est = CircuitEmulator(psi0=[1, 0]).fit(H)
    pipe = make_pipeline(FunctionTransformer(est.predict), EnvelopeTransformer())
    P = pipe.fit_transform(t)
    env = pipe[-1]
    m = env.interior_mask(len(t))
    np.testing.assert_allclose(P[m], np.column_stack([np.cos(t), np.sin(t)])[m] ** 2, atol=1e-2)
    with pytest.raises(ValueError):
        env.transform(np.zeros((100, 3)))
    plain = EnvelopeTransformer(squared=False).fit(P)
    np.testing.assert_allclose(plain.transform(P) ** 2, EnvelopeTransformer().fit(P).transform(P))
