import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsimnet import (
    AnalyticTrace,
    InitialData,
    SimulationConfig,
    TraceSet,
    born_from_traces,
    discrete_hilbert,
    envelope,
    initial_conditions,
    pauli_to_matrix,
    propagate,
    second_order_coeffs,
    simulate_second_order,
    verify_against_quantum,
)
from qsimnet.exceptions import DimensionError, SignalError
from qsimnet.signal import interior_mask, one_sided

from conftest import SX

T = np.arange(0, 62832) * 1e-3  # [0, 20 pi]
MASK = interior_mask(T.size)


def circuit_run(H, psi0, t_end=20.0, dt=1e-3):
    cfg = SimulationConfig(t_end=t_end, dt=dt)
    s = second_order_coeffs(H)
    traces = simulate_second_order(s.A, s.B, initial_conditions(H, psi0), cfg)
    return traces, propagate(H, psi0, cfg.times())


def test_cosine_pair():
    h = discrete_hilbert(np.cos(3 * T))
    assert np.max(np.abs(h - np.sin(3 * T))[MASK]) <= 1e-6


def test_cosine_pair_on_whole_periods():
    t = np.linspace(0, 20 * np.pi, 50000, endpoint=False)
    h = discrete_hilbert(np.cos(3 * t), "periodic")
    np.testing.assert_allclose(h, np.sin(3 * t), atol=1e-10)


def test_sine_pair():
    h = discrete_hilbert(np.sin(2 * T))
    assert np.max(np.abs(h + np.cos(2 * T))[MASK]) <= 1e-6


def test_constant_has_no_quadrature():
    np.testing.assert_allclose(discrete_hilbert(np.full(1000, 2.5)), 0, atol=1e-11)
    np.testing.assert_allclose(discrete_hilbert(np.full(1000, 2.5), "periodic"), 0, atol=1e-12)


def test_non_integer_periods_need_prediction():
    t = np.arange(0, 20001) * 1e-3
    x = np.cos(1.3 * t)
    m = interior_mask(t.size)
    err_predict = np.max(np.abs(discrete_hilbert(x) - np.sin(1.3 * t))[m])
    err_periodic = np.max(np.abs(discrete_hilbert(x, "periodic") - np.sin(1.3 * t))[m])
    assert err_predict <= 1e-6
    assert err_periodic > 1e-3


def test_input_validation():
    with pytest.raises(SignalError):
        discrete_hilbert(np.ones(8))
    with pytest.raises(SignalError):
        discrete_hilbert(np.r_[np.ones(20), np.nan])
    with pytest.raises(ValueError):
        discrete_hilbert(np.ones(100), edge="mirror")


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), size=st.integers(8, 500))
def test_double_transform_negates_mean_removed(seed, size):
    # odd length, so there is no Nyquist bin to lose
    x = np.random.default_rng(seed).normal(size=2 * size + 1)
    hh = discrete_hilbert(discrete_hilbert(x, "periodic"), "periodic")
    np.testing.assert_allclose(hh, -(x - x.mean()), atol=1e-8)


def test_double_transform_negates_tones(rng):
    t = np.arange(0, 30001) * 1e-3
    w = rng.uniform(1, 4, 3)
    ph = rng.uniform(0, 2 * np.pi, 3)
    x = sum(np.cos(wk * t + pk) for wk, pk in zip(w, ph))
    hh = discrete_hilbert(discrete_hilbert(x + 0.7))
    m = interior_mask(t.size)
    assert np.max(np.abs(hh + x)[m]) <= 1e-5


def test_linearity(rng):
    t = np.arange(0, 20001) * 1e-3
    x, y = np.cos(1.7 * t), np.sin(0.9 * t + 0.3)
    m = interior_mask(t.size)
    lhs = discrete_hilbert(2 * x - 3 * y)
    rhs = 2 * discrete_hilbert(x) - 3 * discrete_hilbert(y)
    assert np.max(np.abs(lhs - rhs)[m]) <= 1e-6


def test_envelope_examples():
    assert np.max(np.abs(envelope(np.cos(3 * T)) - 1)[MASK]) <= 1e-6
    x = np.cos(2 * T) * np.cos(T)
    assert np.max(np.abs(envelope(x) - np.abs(np.cos(T)))[MASK]) <= 1e-6
    assert not np.any(envelope(np.zeros(100)))


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_envelope_dominates_signal(seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=int(rng.integers(16, 500)))
    e = envelope(x)
    assert np.all(e >= 0)
    assert np.all(e >= np.abs(x) - 1e-9)


def test_parseval_bound(rng):
    x = rng.normal(size=4096)
    assert np.linalg.norm(discrete_hilbert(x, "periodic")) <= np.linalg.norm(x)
    # a windowed tone keeps its energy within 2 %
    t = np.arange(0, 20001) * 1e-3
    tone = np.cos(2.3 * t) * np.hanning(t.size)
    ratio = np.linalg.norm(discrete_hilbert(tone)) / np.linalg.norm(tone)
    assert abs(ratio - 1) <= 2e-2


def test_convention_does_not_change_envelope():
    x = np.cos(2 * T) * np.cos(T)
    plus = AnalyticTrace.from_series(x, "plus")
    minus = AnalyticTrace.from_series(x, "minus")
    np.testing.assert_array_equal(plus.envelope, minus.envelope)
    np.testing.assert_array_equal(plus.hilbert_part, -minus.hilbert_part)
    np.testing.assert_array_equal(plus.as_complex().real, x)
    with pytest.raises(ValueError):
        AnalyticTrace(x, x, "both")


def test_born_for_sigma1_shifted():
    H = pauli_to_matrix((2, 1, 0, 0))
    traces, truth = circuit_run(H, [1, 0])
    # closed-form traces
    t = traces.times
    np.testing.assert_allclose(traces["V1"], np.cos(2 * t) * np.cos(t), atol=1e-10)
    np.testing.assert_allclose(traces["V2"], -np.sin(2 * t) * np.sin(t), atol=1e-10)
    est = born_from_traces(traces)
    m = est.interior_mask
    assert np.max(np.abs(est.p[:, 0] - np.cos(t) ** 2)[m]) <= 1e-2
    assert np.max(np.abs(est.p[:, 1] - np.sin(t) ** 2)[m]) <= 1e-2
    assert np.max(np.abs(est.total() - 1)[m]) <= 2e-2
    assert est.interior().shape == (m.sum(), 2)


def test_born_for_diagonal_basis_state():
    H = np.diag([1.0, 2.0, 3.0])
    traces, _ = circuit_run(H, [0, 1, 0], t_end=10)
    est = born_from_traces(traces)
    np.testing.assert_allclose(est.interior(), np.tile([0, 1, 0], (est.interior_mask.sum(), 1)), atol=1e-5)


def test_born_zero_channel():
    t = np.arange(1000) * 1e-2
    tr = TraceSet(t, np.zeros((1000, 2)), ("V1", "V2"))
    assert not np.any(born_from_traces(tr).p)


def test_verify_exact_traces():
    H = pauli_to_matrix((2, 1, 0, 0))
    traces, truth = circuit_run(H, [1, 0])
    r = verify_against_quantum(traces, truth)
    assert r.max_re_err <= 1e-8
    assert r.max_born_err <= 1e-2 and r.norm_err <= 2e-2
    assert r.spectrum_one_sided and r.im_convention == "minus"
    assert r.all_passed
    d = r.to_dict()
    assert set(d) >= {"max_re_err", "max_im_err", "max_born_err", "norm_err", "spectrum_one_sided"}


def test_verify_reproduces_two_sided_failure():
    traces, truth = circuit_run(SX, [1, 0])
    r = verify_against_quantum(traces, truth)
    assert not r.spectrum_one_sided
    assert r.max_born_err > 0.5
    assert not r.all_passed
    assert r.max_re_err <= 1e-8


def test_verify_is_idempotent():
    H = pauli_to_matrix((2, 1, 0, 0))
    traces, truth = circuit_run(H, [1, 0], t_end=10)
    assert verify_against_quantum(traces, truth) == verify_against_quantum(traces, truth)


def test_verify_needs_matching_grid_and_hamiltonian():
    H = pauli_to_matrix((2, 1, 0, 0))
    traces, truth = circuit_run(H, [1, 0], t_end=5)
    other = propagate(H, [1, 0], traces.times[:-1])
    with pytest.raises(DimensionError):
        verify_against_quantum(traces, other)
    from qsimnet import QuantumTrajectory

    bare = QuantumTrajectory(truth.times, truth.states)
    with pytest.raises(ValueError):
        verify_against_quantum(traces, bare)
    assert verify_against_quantum(traces, bare, hamiltonian=H).spectrum_one_sided


def test_one_sided_examples():
    assert one_sided(np.diag([1.0, 2.0]))
    assert one_sided(np.diag([-1.0, -2.0]))
    assert not one_sided(SX)
    assert not one_sided(np.diag([0.0, 1.0]))
