import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from idest import (
    DegenerateNeighborhood,
    DegenerateQuadratic,
    GeneratorSpec,
    NonPositiveInput,
    PointCloud,
    RegularizedConfig,
    RegularizedState,
    build_neighbor_table,
    divergence,
    generate,
    lb_pointwise_all,
    neighborhood_mean,
    quadratic_coefficients,
    quadratic_update,
    run_regularized,
)
from idest.errors import InvalidConfig, KTooLarge

from conftest import table_from_distances


def residual(s, k, m0, gamma, m):
    a, b, c = quadratic_coefficients(s, k, m0, gamma)
    return abs(a * m * m + b * m + c) / max(abs(a * m * m), abs(b * m), abs(c))


def test_divergence_examples():
    for m in (0.1, 1.0, 7.5):
        assert divergence(m, m) == 0.0
    assert divergence(2.0, 1.0) == pytest.approx(1 - 2 + 2 * math.log(2), abs=1e-15)
    assert divergence(2.0, 1.0) == pytest.approx(0.386294, abs=1e-6)
    assert divergence(1.0, 2.0) == pytest.approx(0.306853, abs=1e-6)
    with pytest.raises(NonPositiveInput):
        divergence(0.0, 1.0)
    with pytest.raises(NonPositiveInput):
        divergence(1.0, -1.0)


@given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
def test_divergence_non_negative(m, m0):
    assert divergence(m, m0) >= -1e-12 * max(m, m0)


def test_divergence_derivative_is_log_ratio():
    m, m0, h = 3.0, 2.0, 1e-6
    numeric = (divergence(m + h, m0) - divergence(m - h, m0)) / (2 * h)
    assert numeric == pytest.approx(math.log(m / m0), rel=1e-8)


def test_neighborhood_mean():
    t = table_from_distances([[1.0, 2.0, 3.0]] * 4)
    idx = t.indices
    state = RegularizedState(m=np.full(4, 2.5), gamma=0.1)
    assert neighborhood_mean(state, t, 0, 3) == 2.5
    m = np.array([9.0, 1.0, 2.0, 3.0])
    state = RegularizedState(m=m, gamma=0.1)
    np.testing.assert_array_equal(idx[0], [1, 2, 3])
    assert neighborhood_mean(state, t, 0, 3) == 2.0
    with pytest.raises(KTooLarge):
        neighborhood_mean(state, t, 0, 4)


def test_neighborhood_mean_random_state(swiss_small):
    table = build_neighbor_table(swiss_small, 12)
    rng = np.random.default_rng(0)
    state = RegularizedState(m=rng.uniform(0.5, 3.0, table.n), gamma=0.2)
    for point in rng.integers(0, table.n, 20):
        expected = sum(state.m[j] for j in table.indices[point, :12]) / 12
        assert neighborhood_mean(state, table, point, 12) == pytest.approx(expected, rel=1e-14)


def test_quadratic_gamma_zero_is_k_over_s():
    for m0 in (0.1, 1.0, 5.0, 80.0):
        assert quadratic_update(2.5, 10, m0, 0.0) == pytest.approx(4.0, rel=1e-15)


def test_quadratic_zero_s():
    # 2*0.5 m^2 - (2*0.5*2 + 10) m - 2*10 = 0  ->  m^2 - 12 m - 20 = 0
    root = quadratic_update(0.0, 10, 2.0, 0.5)
    assert root == pytest.approx(6 + math.sqrt(56), rel=1e-14)
    assert root == pytest.approx(13.4833, abs=1e-4)


@pytest.mark.parametrize("gamma", [0.0, 0.01, 0.5, 1.0, 30.0])
def test_quadratic_agreement_fixed_point(gamma):
    k, m0 = 12, 3.0
    s = k / m0
    # substitution oracle: at m = m0 the polynomial is 2 m0 (s m0 - k)
    a, b, c = quadratic_coefficients(s, k, m0, gamma)
    assert a * m0**2 + b * m0 + c == pytest.approx(2 * m0 * (s * m0 - k), abs=1e-12)
    assert quadratic_update(s, k, m0, gamma) == pytest.approx(m0, rel=1e-14)


def test_quadratic_errors():
    with pytest.raises(DegenerateQuadratic):
        quadratic_update(0.0, 5, 1.0, 0.0)
    with pytest.raises(NonPositiveInput):
        quadratic_update(1.0, 5, 0.0, 0.1)
    with pytest.raises(NonPositiveInput):
        quadratic_update(-1.0, 5, 1.0, 0.1)
    with pytest.raises(InvalidConfig):
        quadratic_update(1.0, 1, 1.0, 0.1)


@settings(max_examples=500)
@given(
    st.floats(0.0, 1e4),
    st.integers(2, 1000),
    st.floats(1e-4, 1e4),
    st.floats(1e-6, 100.0),
)
def test_quadratic_root_positive_and_accurate(s, k, m0, gamma):
    m = quadratic_update(s, k, m0, gamma)
    assert m > 0
    assert residual(s, k, m0, gamma, m) <= 1e-9


@given(st.floats(1e-3, 1e3), st.integers(2, 200), st.floats(1e-3, 1e3), st.floats(1e-3, 10.0))
def test_penalty_pulls_toward_anchor(s, k, m0, gamma):
    unpenalized = k / s
    m = quadratic_update(s, k, m0, gamma)
    lo, hi = sorted((unpenalized, m0))
    assert lo * (1 - 1e-9) <= m <= hi * (1 + 1e-9)


def test_gamma_zero_single_sweep_reproduces_k_over_s(gauss5):
    _, table = gauss5
    for k in (5, 17, 40):
        rep = run_regularized(table, RegularizedConfig(k=k, gamma0=0.0, epsilon=0.0, max_iter=1))
        expected = np.clip(k / (k - 1) * lb_pointwise_all(table, k), 1e-3, 50.0)
        np.testing.assert_allclose(rep.per_point, expected, rtol=1e-12)


def test_report_fields_and_bounds(swiss_small):
    table = build_neighbor_table(swiss_small, 15)
    cfg = RegularizedConfig(k=15, init="seeded_uniform", seed=3)
    rep = run_regularized(table, cfg)
    assert rep.aggregate == pytest.approx(np.mean(rep.per_point), abs=1e-12)
    assert np.all(rep.per_point >= cfg.m_floor)
    assert np.all(rep.per_point <= 10 * table.d)
    gammas = np.array(rep.gamma_history)
    assert gammas[0] == cfg.gamma0
    assert np.all(np.diff(gammas) >= 0)
    assert gammas.max() <= cfg.gamma_cap
    assert rep.gamma_final == gammas[-1]
    assert rep.iterations_used == len(gammas)
    assert rep.metadata["rng"] == "numpy.random.PCG64"


def test_schedule_reaches_cap(swiss_small):
    table = build_neighbor_table(swiss_small, 10)
    rep = run_regularized(table, RegularizedConfig(k=10, tol=1e-300, max_iter=80))
    assert not rep.converged
    assert rep.iterations_used == 80
    assert rep.gamma_final == 1.0
    # 0.05 * 1.05^n reaches 1 after ceil(log 20 / log 1.05) = 62 growth steps
    assert rep.gamma_history.index(1.0) == math.ceil(math.log(20) / math.log(1.05))


def test_literal_schedule_jumps_to_cap(swiss_small):
    table = build_neighbor_table(swiss_small, 10)
    rep = run_regularized(table, RegularizedConfig(k=10, schedule="literal", max_iter=3, tol=1e-300))
    assert rep.gamma_history[0] == 0.05
    assert rep.gamma_history[1] == 1.0


def test_clamping_counts(swiss_small):
    table = build_neighbor_table(swiss_small, 10)
    rep = run_regularized(table, RegularizedConfig(k=10, m_ceiling=2.0))
    assert rep.per_point.max() <= 2.0
    assert rep.clamp_events > 0


def test_determinism(swiss_small):
    table = build_neighbor_table(swiss_small, 12)
    cfg = RegularizedConfig(k=12, init="seeded_uniform", seed=42)
    a, b = run_regularized(table, cfg), run_regularized(table, cfg)
    assert a.per_point.tobytes() == b.per_point.tobytes()
    assert a.aggregate == b.aggregate


def test_initialization_insensitivity(swiss_small):
    table = build_neighbor_table(swiss_small, 15)
    warm = run_regularized(table, RegularizedConfig(k=15))
    for seed in (1, 2):
        cold = run_regularized(table, RegularizedConfig(k=15, init="seeded_uniform", seed=seed))
        assert cold.converged
        assert cold.aggregate == pytest.approx(warm.aggregate, abs=0.05)


def test_jacobi_close_to_gauss_seidel(swiss_small):
    table = build_neighbor_table(swiss_small, 15)
    gs = run_regularized(table, RegularizedConfig(k=15))
    jac = run_regularized(table, RegularizedConfig(k=15, update_order="jacobi"))
    assert jac.aggregate == pytest.approx(gs.aggregate, abs=0.02)


def test_gauss_seidel_matches_scalar_reference(swiss_small):
    """Replays two sweeps with the public scalar building blocks."""
    table = build_neighbor_table(swiss_small, 8)
    cfg = RegularizedConfig(k=8, max_iter=2, tol=1e-300)
    rep = run_regularized(table, cfg)
    from idest import log_distance_ratios

    m = (7 / np.array([log_distance_ratios(table, i, 8) for i in range(table.n)])).copy()
    gamma = cfg.gamma0
    for _ in range(2):
        state = RegularizedState(m=m, gamma=gamma)
        for j in range(table.n):
            m0 = neighborhood_mean(state, table, j, 8)
            m[j] = min(max(quadratic_update(log_distance_ratios(table, j, 8), 8, m0, gamma), cfg.m_floor), 30.0)
        gamma = min(gamma * 1.05, 1.0)
    np.testing.assert_allclose(rep.per_point, m, rtol=1e-12)


def test_invariance(swiss_small):
    ref = run_regularized(build_neighbor_table(swiss_small, 15), RegularizedConfig(k=15))
    rot = Rotation.random(random_state=9).as_matrix()
    moved = PointCloud(swiss_small.points @ rot.T - 4.0)
    for cloud in (moved, PointCloud(swiss_small.points * 0.01)):
        rep = run_regularized(build_neighbor_table(cloud, 15), RegularizedConfig(k=15))
        np.testing.assert_allclose(rep.per_point, ref.per_point, rtol=1e-9)


def test_variance_reduction_gaussian(gauss5):
    _, table = gauss5
    wins = 0
    ks = range(10, 51, 5)
    for k in ks:
        rep = run_regularized(table, RegularizedConfig(k=k))
        assert 4.0 <= rep.aggregate <= 6.0
        wins += rep.variance <= np.var(lb_pointwise_all(table, k), ddof=1)
    assert wins >= 0.8 * len(ks)


def test_swiss_roll_k15():
    cloud = generate(GeneratorSpec("swiss_roll", 2000, seed=0))
    rep = run_regularized(build_neighbor_table(cloud, 15), RegularizedConfig(k=15))
    assert 1.7 <= rep.aggregate <= 2.3


def test_config_validation(swiss_small):
    table = build_neighbor_table(swiss_small, 5)
    bad = [
        dict(k=1),
        dict(k=5, gamma0=2.0),
        dict(k=5, gamma0=-0.1),
        dict(k=5, epsilon=-1.0),
        dict(k=5, tol=0.0),
        dict(k=5, max_iter=0),
        dict(k=5, m_floor=0.0),
        dict(k=5, m_floor=5.0, m_ceiling=4.0),
        dict(k=5, init="zeros"),
        dict(k=5, schedule="linear"),
        dict(k=5, update_order="random"),
    ]
    for kwargs in bad:
        with pytest.raises(InvalidConfig):
            run_regularized(table, RegularizedConfig(**kwargs))
    with pytest.raises(KTooLarge):
        run_regularized(table, RegularizedConfig(k=6))


def test_degenerate_neighborhood_reported():
    t = table_from_distances([[1.0, 2.0, 3.0], [2.0, 2.0, 2.0], [1.0, 2.0, 4.0], [1.0, 3.0, 4.0]])
    with pytest.raises(DegenerateNeighborhood) as exc:
        run_regularized(t, RegularizedConfig(k=3))
    assert exc.value.point == 1
