import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from qsimnet import (
    InitialData,
    SimulationConfig,
    build_first_order,
    decomplexify,
    exact_linear_solution,
    initial_conditions,
    second_order_coeffs,
    simulate_first_order,
    simulate_second_order,
)
from qsimnet.exceptions import DimensionError, SimulationError
from qsimnet.simulate import companion_matrix, linear_flow, time_grid

from conftest import SX, random_hermitian, random_state

SIGMA2_A = np.array([[0.0, 2.0], [-2.0, 0.0]])
METHODS = ("exact_spectral", "rk4", "adaptive")


def test_time_grid_is_index_multiplied():
    t = time_grid(10.0, 1e-3)
    assert len(t) == 10001 and t[0] == 0.0
    np.testing.assert_array_equal(t, np.arange(10001) * 1e-3)
    assert t[-1] <= 10.0 * (1 + 1e-12)
    np.testing.assert_array_equal(time_grid(1.0, 0.3), [0.0, 0.3, 0.6, 0.8999999999999999])


def test_config_validation():
    for bad in ({"t_end": 0}, {"dt": 0}, {"dt": 20.0}, {"method": "euler"}, {"rel_tol": 0}):
        with pytest.raises(ValueError):
            SimulationConfig(**bad)


@pytest.mark.parametrize("method", METHODS)
def test_harmonic_oscillator(method):
    cfg = SimulationConfig(t_end=10, dt=1e-3, method=method)
    tr = simulate_second_order(np.zeros((2, 2)), np.eye(2), InitialData([1, 0], [0, 0]), cfg)
    np.testing.assert_allclose(tr["V1"], np.cos(tr.times), atol=1e-8)
    np.testing.assert_allclose(tr["V2"], 0, atol=1e-12)
    assert tr.labels == ("V1", "V2")


@pytest.mark.parametrize("method", METHODS)
def test_sigma2_closed_form(method):
    cfg = SimulationConfig(t_end=10, dt=1e-3, method=method)
    tr = simulate_second_order(SIGMA2_A, -np.eye(2), InitialData([1, 0], [0, 1]), cfg)
    tol = 1e-12 if method == "exact_spectral" else 1e-8
    np.testing.assert_allclose(tr["V1"], np.cos(tr.times), atol=tol)
    np.testing.assert_allclose(tr["V2"], np.sin(tr.times), atol=tol)


def test_decoupled_oscillators():
    tr = simulate_second_order(np.zeros((2, 2)), np.diag([1.0, 4.0]), InitialData([1, 1], [0, 0]))
    np.testing.assert_allclose(tr.channels, np.column_stack([np.cos(tr.times), np.cos(2 * tr.times)]), atol=1e-12)


def test_defective_companion_falls_back():
    B = np.array([[0.0, 1.0], [0.0, 0.0]])
    q0, qd0 = np.array([0.5, -1.0]), np.array([0.2, 0.3])
    t = np.linspace(0, 3, 31)
    tr = exact_linear_solution(np.zeros((2, 2)), B, InitialData(q0, qd0), t)
    q2 = q0[1] + qd0[1] * t
    q1 = q0[0] + qd0[0] * t - q0[1] * t**2 / 2 - qd0[1] * t**3 / 6
    np.testing.assert_allclose(tr["V1"], q1, atol=1e-12)
    np.testing.assert_allclose(tr["V2"], q2, atol=1e-12)


def test_exact_solution_matches_simulation_bitwise(rng):
    A = rng.normal(size=(3, 3))
    B = rng.normal(size=(3, 3))
    init = InitialData(rng.normal(size=3), rng.normal(size=3))
    cfg = SimulationConfig(t_end=2, dt=1e-2)
    a = simulate_second_order(A, B, init, cfg)
    b = exact_linear_solution(A, B, init, cfg.times())
    np.testing.assert_array_equal(a.channels, b.channels)


def test_exact_solution_against_expm(rng):
    A = rng.normal(size=(4, 4))
    B = rng.normal(size=(4, 4))
    z0 = rng.normal(size=8)
    t = np.linspace(0, 2, 9)
    tr = exact_linear_solution(A, B, InitialData(z0[:4], z0[4:]), t)
    K = companion_matrix(A, B)
    ref = np.array([expm(K * ti) @ z0 for ti in t])[:, :4]
    np.testing.assert_allclose(tr.channels, ref, rtol=1e-9, atol=1e-10)


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        simulate_second_order(np.zeros((2, 2)), np.eye(2), InitialData([1, 0, 0], [0, 0, 0]))


def test_first_order_examples():
    cfg = SimulationConfig(t_end=5, dt=1e-2)
    tr = simulate_first_order(np.zeros((3, 3)), [1, 2, 3], cfg)
    np.testing.assert_array_equal(tr.channels, np.tile([1.0, 2.0, 3.0], (len(tr.times), 1)))
    tr = simulate_first_order(build_first_order(SX), decomplexify([1, 0]).stacked(), cfg)
    t = tr.times
    np.testing.assert_allclose(tr.channels[:, :2], np.column_stack([np.cos(t), 0 * t]), atol=1e-12)
    np.testing.assert_allclose(tr.channels[:, 2:], np.column_stack([0 * t, -np.sin(t)]), atol=1e-12)
    assert tr.labels == ("x1", "x2", "x3", "x4")


@pytest.mark.parametrize("method", METHODS)
def test_antisymmetric_flow_preserves_norm(rng, method):
    G = rng.normal(size=(6, 6))
    x0 = rng.normal(size=6)
    tr = simulate_first_order(G - G.T, x0, SimulationConfig(t_end=10, dt=1e-2, method=method))
    norms = np.linalg.norm(tr.channels, axis=1)
    assert np.max(np.abs(norms - np.linalg.norm(x0))) <= 1e-9 * (1 if method != "rk4" else 1e3)


def _stable_system(rng, n):
    # lossless gyroscopic system scaled so the companion spectrum stays within radius 5
    G = rng.normal(size=(n, n))
    S = rng.normal(size=(n, n))
    A = G - G.T
    B = S @ S.T + 0.1 * np.eye(n)
    K = companion_matrix(A, B)
    r = np.max(np.abs(np.linalg.eigvals(K)))
    return A * (4.0 / r), B * (4.0 / r) ** 2


def test_rk4_agrees_with_exact(rng):
    cfg_e = SimulationConfig(t_end=10, dt=1e-3)
    cfg_r = SimulationConfig(t_end=10, dt=1e-3, method="rk4")
    for n in (2, 3, 5):
        A, B = _stable_system(rng, n)
        init = InitialData(rng.normal(size=n), rng.normal(size=n))
        e = simulate_second_order(A, B, init, cfg_e).channels
        r = simulate_second_order(A, B, init, cfg_r).channels
        assert np.max(np.abs(e - r)) <= 1e-6


def test_adaptive_agrees_with_exact(rng):
    A, B = _stable_system(rng, 4)
    init = InitialData(rng.normal(size=4), rng.normal(size=4))
    e = simulate_second_order(A, B, init, SimulationConfig(t_end=10, dt=1e-2)).channels
    a = simulate_second_order(A, B, init, SimulationConfig(t_end=10, dt=1e-2, method="adaptive")).channels
    assert np.max(np.abs(e - a)) <= 1e-7


def test_gyroscopic_energy_is_conserved(rng):
    A, B = _stable_system(rng, 3)
    init = InitialData(rng.normal(size=3), rng.normal(size=3))
    cfg = SimulationConfig(t_end=10, dt=1e-2)
    t = cfg.times()
    # positions and velocities from the companion flow
    Z = linear_flow(companion_matrix(A, B), np.concatenate([init.q0, init.qdot0]), t)
    np.testing.assert_allclose(Z[:, :3], exact_linear_solution(A, B, init, t).channels, atol=1e-13)
    q, v = Z[:, :3], Z[:, 3:]
    E = 0.5 * np.sum(v * v, axis=1) + 0.5 * np.einsum("ti,ij,tj->t", q, B, q)
    assert np.max(np.abs(E - E[0])) <= 1e-10 * max(1.0, abs(E[0]))


def test_adaptive_failure_reports_time():
    # growth rate 1e3: the state overflows well before t_end
    cfg = SimulationConfig(t_end=10, dt=1e-2, method="adaptive")
    with pytest.raises(SimulationError) as info:
        simulate_second_order(np.zeros((1, 1)), np.array([[-1e6]]), InitialData([1.0], [0.0]), cfg)
    assert 0 < info.value.t_fail < 10


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 5))
def test_first_and_second_order_agree(seed, n):
    rng = np.random.default_rng(seed)
    H = random_hermitian(rng, n)
    if np.linalg.cond(H.real) > 1e6:
        return
    psi0 = random_state(rng, n)
    cfg = SimulationConfig(t_end=5, dt=1e-2)
    s = second_order_coeffs(H)
    x = simulate_first_order(build_first_order(H), decomplexify(psi0).stacked(), cfg).channels
    for k, part in enumerate(("real_part", "imag_part")):
        q = simulate_second_order(s.A, s.B, initial_conditions(H, psi0, part), cfg).channels
        assert np.max(np.abs(q - x[:, k * n:(k + 1) * n])) <= 1e-8
