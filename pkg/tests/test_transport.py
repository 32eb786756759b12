import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slabkin.transport import (BoundaryCondition, TransportProblem, WallCondition, apply_diffuse_bc,
                               apply_indata_bc, green_identity_defect, solve_characteristic, transport_sweep)
from slabkin.velocity_space import SlabGrid, VelocityGrid, WallModel, half_space_flux, incoming_mask

M_T1_AT_UNIT_XI = 0.09653235263005391  # exp(-1/2) / (2 pi)


@pytest.fixture(scope="module")
def setup():
    vg = VelocityGrid(6, 4.0)
    walls = WallModel.build(1.0, 2.0, vg)
    return vg, walls


def _problem(vg, walls, cells, delta=0.0, source=0.0, nu=0.0, bc=None):
    sg = SlabGrid(cells)
    return TransportProblem(delta, source, nu, bc or BoundaryCondition.indata(0.0), vg, sg, walls)


def test_indata_example():
    vg = VelocityGrid(2, 2.0)  # axis = (-1, 1)
    walls = WallModel.build(1.0, 1.0, vg)
    inflow = apply_indata_bc(1.0, walls, vg, -1)
    node = np.flatnonzero((vg.nodes[:, 0] == 1.0) & (vg.nodes[:, 1] == 1.0) & (vg.nodes[:, 2] == 1.0))[0]
    # |v|^2 = 3 on this grid; the (1,0,0) value follows from the same formula
    assert inflow[node] == pytest.approx(np.exp(-1.5) / (2 * np.pi), rel=1e-15)
    assert walls.maxwellian_at(-1)[node] * np.exp(1.0) == pytest.approx(M_T1_AT_UNIT_XI, rel=1e-15)
    assert np.all(inflow[vg.xi < 0] == 0)
    assert np.all(apply_indata_bc(0.0, walls, vg, -1) == 0)
    np.testing.assert_array_equal(apply_indata_bc(2.0, walls, vg, 1), 2 * apply_indata_bc(1.0, walls, vg, 1))
    with pytest.raises(ValueError):
        apply_indata_bc(-1.0, walls, vg, 1)


def test_diffuse_bc(setup):
    vg, walls = setup
    assert np.all(apply_diffuse_bc(np.zeros(vg.size), walls, vg, -1) == 0)
    out = np.where(vg.xi < 0, walls.m_minus, 0.0)
    inflow = apply_diffuse_bc(out, walls, vg, -1)
    phi_in = float(np.sum((np.abs(vg.xi) * inflow * vg.weights)[vg.xi > 0]))
    assert phi_in == pytest.approx(half_space_flux(out, vg, -1), rel=1e-14)
    rng = np.random.default_rng(0)
    inflow = apply_diffuse_bc(rng.random(vg.size), walls, vg, 1)
    ratio = inflow[incoming_mask(vg, 1)] / walls.m_plus[incoming_mask(vg, 1)]
    assert np.ptp(ratio) <= 1e-14 * ratio.max()


def test_boundary_condition_validation():
    with pytest.raises(ValueError):
        BoundaryCondition.theta_split(1.0, 1.5)
    with pytest.raises(ValueError):
        WallCondition("specular")
    with pytest.raises(ValueError):
        WallCondition("indata", -1.0)
    bc = BoundaryCondition.theta_split(2.0, 0.25)
    assert bc.left.amplitude == 0.5 and bc.right.amplitude == 1.5


def test_problem_validation(setup):
    vg, walls = setup
    with pytest.raises(ValueError):
        _problem(vg, walls, 4, source=-1.0)
    with pytest.raises(ValueError):
        _problem(vg, walls, 4, nu=np.inf)
    with pytest.raises(ValueError):
        _problem(vg, walls, 4, delta=-0.1)


def test_zero_problem(setup):
    vg, walls = setup
    F, _ = transport_sweep(_problem(vg, walls, 8))
    assert np.all(F == 0)


def test_pure_decay(setup):
    vg, walls = setup
    nu0 = 0.7
    prob = _problem(vg, walls, 32, nu=nu0)
    node = int(np.argmax(vg.xi))
    xi = vg.xi[node]
    prof = solve_characteristic(prob, 3.0, node)
    np.testing.assert_allclose(prof, 3.0 * np.exp(-nu0 * (prob.sgrid.x + 1) / xi), rtol=1e-12)
    node = int(np.argmin(vg.xi))
    prof = solve_characteristic(prob, 3.0, node)
    np.testing.assert_allclose(prof, 3.0 * np.exp(-nu0 * (1 - prob.sgrid.x) / abs(vg.xi[node])), rtol=1e-12)


def test_constant_equilibrium(setup):
    vg, walls = setup
    rng = np.random.default_rng(1)
    F_eq = rng.random(vg.size)
    nu = 0.5 + rng.random((17, vg.size))
    inflow_amp = F_eq
    prob = _problem(vg, walls, 16, nu=nu, source=nu * F_eq)
    for node in (0, 50, vg.size - 1):
        prof = solve_characteristic(prob, inflow_amp[node], node)
        np.testing.assert_allclose(prof, F_eq[node], rtol=1e-13)


def test_theta_split_boundary_lines(setup):
    vg, walls = setup
    lam, theta = 3.0, 0.3
    prob = _problem(vg, walls, 8, nu=0.2, bc=BoundaryCondition.theta_split(lam, theta))
    F, _ = transport_sweep(prob)
    inc_l, inc_r = incoming_mask(vg, -1), incoming_mask(vg, 1)
    np.testing.assert_allclose(F[0, inc_l], theta * lam * walls.m_minus[inc_l], rtol=1e-15)
    np.testing.assert_allclose(F[-1, inc_r], (1 - theta) * lam * walls.m_plus[inc_r], rtol=1e-15)
    F0, _ = transport_sweep(_problem(vg, walls, 8, nu=0.2, bc=BoundaryCondition.theta_split(lam, 0.0)))
    assert np.all(F0[0, inc_l] == 0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31), st.floats(0.0, 1.0), st.floats(0.05, 1.0), st.floats(1.0, 4.0))
def test_positivity_and_lower_bound(seed, delta, k, mu):
    vg = VelocityGrid(4, 3.0)
    walls = WallModel.build(1.0, 2.0, vg)
    sg = SlabGrid(12)
    rng = np.random.default_rng(seed)
    nu = rng.random((sg.size, vg.size))
    # scale so that int (delta + nu) dx <= 2 + 2 mu for every node
    budget = 2 + 2 * mu
    nu *= max(budget - 2 * delta, 0.0) / max(float(np.max(sg.weights @ nu)), 1e-300)
    G = rng.random((sg.size, vg.size)) * rng.integers(0, 2)
    prob = TransportProblem(delta, G, nu, BoundaryCondition.indata(k), vg, sg, walls)
    F, _ = transport_sweep(prob)
    assert np.all(F >= 0)
    for side in (-1, 1):
        inc = incoming_mask(vg, side)
        bound = k * walls.maxwellian_at(side)[inc] * np.exp(-budget / np.abs(vg.xi[inc]))
        assert np.all(F[:, inc] >= bound[None, :] * (1 - 1e-12))


def test_diffuse_walls_conserve_flux(setup):
    vg, walls = setup
    rng = np.random.default_rng(4)
    sg_cells = 16
    nu = 0.5 + rng.random((sg_cells + 1, vg.size))
    G = rng.random((sg_cells + 1, vg.size))
    for delta in (0.1, 0.0):
        prob = _problem(vg, walls, sg_cells, delta=delta, source=G, nu=nu, bc=BoundaryCondition.diffuse())
        F, info = transport_sweep(prob)
        assert info.converged
        for side, row in ((-1, F[0]), (1, F[-1])):
            out = half_space_flux(row, vg, side)
            inc = incoming_mask(vg, side)
            phi_in = float(np.sum((np.abs(vg.xi) * row * vg.weights)[inc]))
            assert abs(phi_in - out) <= 1e-8 * out
        defect, scale = green_identity_defect(F, prob)
        assert abs(defect) <= 1e-2 * scale


def test_mixed_walls(setup):
    vg, walls = setup
    bc = BoundaryCondition(WallCondition("indata", 1.0), WallCondition("diffuse"))
    F, info = transport_sweep(_problem(vg, walls, 8, nu=0.3, bc=bc))
    assert info.wall_iterations >= 1 and np.all(F >= 0)


def _manufactured_error(cells, vg, delta=0.1):
    """Max nodal error against a smooth exact solution with a consistent source."""
    sg = SlabGrid(cells)
    walls = WallModel.build(1.0, 2.0, vg)
    x = sg.x[:, None]
    xi = vg.xi[None, :]
    prof = np.exp(-vg.speed2 / 4)
    F = prof * (1.5 + np.sin(np.pi * x / 2 + 0.3))
    dF = prof * (np.pi / 2) * np.cos(np.pi * x / 2 + 0.3)
    nu = 1.0 + 0.5 * np.sin(x) ** 2 + 3 * np.abs(xi)
    G = delta * F + xi * dF + nu * F
    prob = TransportProblem(delta, G, nu, BoundaryCondition.indata(0.0), vg, sg, walls)
    out = np.empty_like(F)
    for node in range(vg.size):
        inflow = F[0, node] if vg.xi[node] > 0 else F[-1, node]
        out[:, node] = solve_characteristic(prob, inflow, node)
    return float(np.max(np.abs(out - F)))


def test_manufactured_second_order(setup):
    vg, walls = setup
    errs = [_manufactured_error(c, vg) for c in (32, 64, 128)]
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders >= 1.9)


def test_xi_zero_rejected(setup):
    vg, walls = setup

    class AxisGrid(VelocityGrid):
        @property
        def xi(self):
            xi = super().xi.copy()
            xi[0] = 0.0
            return xi

    with pytest.raises(ValueError, match="xi = 0"):
        _problem(AxisGrid(vg.n, vg.vmax), walls, 4)
