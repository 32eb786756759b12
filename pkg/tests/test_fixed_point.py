import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slabkin.fixed_point import (IterationConfig, SlabModel, T_map, bump, check_schedule, compute_lambda,
                                 continuation_sweep, initial_state, iterate_to_fixed_point, mollifier_matrix,
                                 normalize, update_theta)
from slabkin.velocity_space import SlabGrid, VelocityGrid, WallModel, incoming_mask

# 1 / int_{xi>0} M_1(v) exp(-4/|xi|) dv for beta=0, mu=1, T=1 (mpmath, 30 digits, frozen)
LAMBDA_ORACLE_T1_MU1 = 30.809329961672160


def test_bump_support():
    assert bump(0.0) == pytest.approx(np.exp(-1.0))
    assert bump(1.0) == 0.0 and bump(-1.5) == 0.0
    assert np.all(bump(np.linspace(-0.99, 0.99, 11)) > 0)


@pytest.mark.parametrize("l", [1.0, 4.0, 8.0, 40.0])
def test_mollifier_rows_sum_to_one(l):
    m = mollifier_matrix(SlabGrid(32), l)
    np.testing.assert_allclose(m.sum(axis=1), 1.0, rtol=0, atol=1e-14)
    assert np.all(m >= 0)
    const = m @ np.full(33, 2.5)
    np.testing.assert_allclose(const, 2.5, rtol=1e-14)


def test_mollifier_rejects_small_index():
    with pytest.raises(ValueError):
        mollifier_matrix(SlabGrid(4), 0.5)


def test_lambda_against_closed_form():
    vg = VelocityGrid.for_walls(32, 1.0, 1.0)
    walls = WallModel.build(1.0, 1.0, vg)
    assert compute_lambda(walls, vg, 0.0, 1.0) == pytest.approx(LAMBDA_ORACLE_T1_MU1, rel=1e-3)


def test_lambda_is_smaller_reciprocal(small_model):
    vg, walls = small_model.vgrid, small_model.walls
    mu = 2.0
    lam = compute_lambda(walls, vg, 0.0, mu)
    w = small_model.weights(mu) * np.exp(-(2 + 2 * mu) / np.abs(vg.xi))
    masses = [float(np.sum((walls.maxwellian_at(s) * w)[incoming_mask(vg, s)])) for s in (-1, 1)]
    assert lam * max(masses) == pytest.approx(1.0, rel=1e-14)
    # pointwise lower bound integrated over the slab width 2 gives the A floor
    assert 2 * lam * sum(masses) >= 1.0


def test_normalize(small_model):
    F = np.ones((small_model.sgrid.size, small_model.vgrid.size))
    wm = small_model.weighted_mass(F, 2.0)
    g, s = normalize(F, 1.0, small_model, 2.0)
    assert s == pytest.approx(wm, rel=1e-15)
    assert small_model.weighted_mass(g, 2.0) == pytest.approx(1.0, rel=1e-14)
    g2, s2 = normalize(g, 1.0, small_model, 2.0)
    np.testing.assert_allclose(g2, g, rtol=1e-14)
    assert s2 == pytest.approx(1.0, rel=1e-14)
    g3, _ = normalize(F, 3.0, small_model, 2.0)
    assert small_model.weighted_mass(g3, 2.0) == pytest.approx(3.0, rel=1e-14)
    with pytest.raises(ValueError):
        normalize(np.zeros_like(F), 1.0, small_model, 2.0)


def _outflow_field(vg, left, right, rows=5):
    f = np.zeros((rows, vg.size))
    f[0, vg.xi < 0] = left
    f[-1, vg.xi > 0] = right
    return f


def test_update_theta_examples():
    vg = VelocityGrid(4, 2.0)
    assert update_theta(_outflow_field(vg, 1.0, 1.0), vg) == pytest.approx(0.5, abs=1e-15)
    assert update_theta(_outflow_field(vg, 0.0, 0.0), vg) == 0.5
    assert update_theta(_outflow_field(vg, 1.0, 0.0), vg) == 1.0
    assert update_theta(_outflow_field(vg, 3.0, 1.0), vg) == pytest.approx(0.75, abs=1e-15)


@settings(max_examples=30)
@given(st.integers(0, 2**31))
def test_update_theta_range(seed):
    vg = VelocityGrid(4, 2.0)
    f = np.random.default_rng(seed).random((3, vg.size))
    assert 0.0 <= update_theta(f, vg) <= 1.0


def test_config_validation():
    for bad in ({"delta": -1.0}, {"j": 0.5}, {"l": 0.0}, {"tol": 0.0}, {"mass_A": 0.0}, {"rho": 0.0},
                {"rho": 1.5}, {"max_iter": 0}):
        with pytest.raises(ValueError):
            IterationConfig(**bad)
    assert IterationConfig(j=np.inf).j == np.inf


def test_T_map_properties(small_model):
    cfg = IterationConfig()
    state = initial_state(small_model, cfg)
    image, sol = T_map(state, cfg, small_model)
    mu = cfg.trunc.mu
    assert small_model.weighted_mass(image.g_A, mu) == pytest.approx(cfg.mass_A, rel=1e-12)
    assert small_model.weighted_mass(image.g_B, mu) == pytest.approx(cfg.mass_B, rel=1e-12)
    assert 0.0 <= image.theta <= 1.0
    # floor on the unnormalized masses; holds on the solutions, not only the bound
    assert small_model.weighted_mass(sol.F_A, mu) >= 1.0
    assert small_model.weighted_mass(sol.F_B, mu) >= 1.0
    assert np.all(image.g_A >= 0) and np.all(image.g_B >= 0)
    again, _ = T_map(state, cfg, small_model)
    np.testing.assert_array_equal(again.g_A, image.g_A)
    np.testing.assert_array_equal(again.g_B, image.g_B)
    assert again.theta == image.theta


def test_fixed_point_result(small_result, small_model, small_cfg):
    st_ = small_result.state
    mu = small_cfg.trunc.mu
    assert small_model.weighted_mass(st_.g_A, mu) == pytest.approx(1.0, rel=1e-12)
    assert small_model.weighted_mass(st_.g_B, mu) == pytest.approx(1.0, rel=1e-12)
    assert 0.0 < st_.theta < 1.0
    assert st_.scale_A >= 1.0 and st_.scale_B >= 1.0
    res = np.array(st_.residuals)
    assert res[-1] < small_cfg.tol
    tail = res[-8:]
    assert np.all(np.diff(tail) < 0)
    assert len(small_result.history) == small_result.iterations


def test_fixed_point_is_stationary(small_result, small_model, small_cfg):
    image, _ = T_map(small_result.state, small_cfg, small_model)
    st_ = small_result.state
    assert abs(image.theta - st_.theta) < 1e-7
    l1 = np.sum(np.abs(image.g_B - st_.g_B)) / np.sum(st_.g_B)
    assert l1 < 1e-7


def test_warm_start_converges_immediately(small_result, small_model, small_cfg):
    res = iterate_to_fixed_point(small_cfg, small_model, small_result.state)
    assert res.converged and res.iterations <= 2


def test_not_converged_flagged(small_model):
    res = iterate_to_fixed_point(IterationConfig(max_iter=2), small_model)
    assert not res.converged and res.iterations == 2
    assert np.all(np.isfinite(res.f_A))


@pytest.mark.parametrize("name,values", [("delta", [0.1, 0.2]), ("j", [10, 5]), ("l", [4, 4]),
                                         ("r", [0.1, 0.2]), ("n", []), ("bogus", [1, 2])])
def test_schedule_rejected(name, values):
    with pytest.raises(ValueError):
        check_schedule(name, values)


@pytest.mark.parametrize("name,values", [("delta", [0.1, 0.01]), ("j", [10, 100, np.inf]), ("mu", [2, 4])])
def test_schedule_accepted(name, values):
    check_schedule(name, values)


def test_delta_sweep(small_model):
    cfg = IterationConfig(rho=1.0)
    seen = []
    steps = continuation_sweep(cfg, small_model, "delta", [0.1, 0.01],
                               diagnose=lambda r, c, m: seen.append(c.delta) or {"delta": c.delta})
    assert seen == [0.1, 0.01]
    assert [s.value for s in steps] == [0.1, 0.01]
    assert all(s.error is None and s.result.converged for s in steps)
    assert steps[0].l1_to_previous is None and steps[1].l1_to_previous > 0
    for s in steps:
        assert small_model.weighted_mass(s.result.f_A, 2.0) == pytest.approx(1.0, rel=1e-12)
        assert small_model.weighted_mass(s.result.f_B, 2.0) == pytest.approx(1.0, rel=1e-12)
        assert s.report == {"delta": s.value}
