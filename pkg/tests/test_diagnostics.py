import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slabkin.collision import KernelConfig, collision_terms
from slabkin.diagnostics import TestFunction as Probe
from slabkin.diagnostics import TestFunctionFamily as ProbeFamily
from slabkin.diagnostics import (K_VALUES, SpeciesRHS, check_collision_invariants,
                                 collision_rhs, diagnose, entropy_balance, entropy_density, entropy_productions,
                                 gain_loss_inequality, log_truncated, renormalized_residual, wall_fluxes,
                                 weak_form_residual)
from slabkin.velocity_space import SlabGrid, VelocityGrid, WallModel, species_maxwellian


def _zero_rhs(n_x, n_v, delta=0.0):
    z = np.zeros((n_x, n_v))
    return SpeciesRHS(delta, {"A": z, "B": z}, {"A": z, "B": z}, {"A": z, "B": z})


def test_entropy_density_values():
    assert entropy_density(1.0, np.inf) == pytest.approx(-1.0, abs=1e-15)
    assert entropy_density(0.0, np.inf) == 0.0
    assert entropy_density(0.0, 10.0) == 0.0
    # H_j -> H_inf as j grows, with O(f^2 / j) difference
    f = np.array([0.3, 1.0, 2.0])
    d = np.abs(entropy_density(f, 1e8) - entropy_density(f, np.inf))
    assert np.all(d <= 1e-7)
    np.testing.assert_allclose(log_truncated(f, np.inf), np.log(f), rtol=1e-15)
    np.testing.assert_allclose(log_truncated(f, 2.0), np.log(f / (1 + f / 2)), rtol=1e-15)


def test_zero_fields(coarse_ops):
    vg, ops = coarse_ops
    z = np.zeros((3, vg.size))
    inv = check_collision_invariants(z, z, ops)
    assert all(v["abs"] == 0.0 for v in inv.values())
    sg = SlabGrid(2)
    prods = entropy_productions(z, z, ops, np.inf, sg)
    assert prods["combined"] == 0.0 and prods["all_nonnegative"]
    bal = entropy_balance(z, z, np.inf, collision_rhs(z, z, ops, np.inf), prods, vg, sg)
    assert bal["boundary"] == 0.0 and bal["interior"] == 0.0 and bal["holds"]


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**31))
def test_productions_nonnegative_and_gain_loss(coarse_ops, seed):
    vg, ops = coarse_ops
    rng = np.random.default_rng(seed)
    base = species_maxwellian(vg.nodes, 1.0, 1.0)
    fA = base * (0.2 + rng.random((3, vg.size)))
    fB = base * (0.2 + rng.random((3, vg.size)))
    sg = SlabGrid(2)
    prods = entropy_productions(fA, fB, ops, np.inf, sg)
    assert prods["all_nonnegative"]
    terms = collision_terms({"A": fA, "B": fB}, ops, np.inf)
    for K in K_VALUES:
        assert gain_loss_inequality(terms, prods, sg, vg, K)["holds_complete"]


def test_gain_loss_rejects_small_K(coarse_ops):
    vg, ops = coarse_ops
    f = species_maxwellian(vg.nodes, 1.0, 1.0)[None]
    terms = collision_terms({"A": f, "B": f}, ops, np.inf)
    prods = entropy_productions(f, f, ops, np.inf, None)
    with pytest.raises(ValueError):
        gain_loss_inequality(terms, prods, SlabGrid(1), vg, 1.0)


def test_j_infinite_has_no_loss_truncation(coarse_ops):
    vg, ops = coarse_ops
    sg = SlabGrid(2)
    f = np.tile(species_maxwellian(vg.nodes, 1.0, 1.2), (3, 1))
    rhs = collision_rhs(f, f, ops, np.inf)
    bal = entropy_balance(f, f, np.inf, rhs, entropy_productions(f, f, ops, np.inf, sg), vg, sg)
    assert bal["remainder_loss_truncation"] == 0.0
    # x-constant fields: no boundary flux of entropy
    assert abs(bal["boundary"]) <= 1e-14


def test_wall_fluxes_of_wall_maxwellian():
    vg = VelocityGrid(8, 4.0)
    walls = WallModel.build(1.0, 2.0, vg)
    f = np.vstack([walls.m_minus, walls.m_plus])
    fl = wall_fluxes(f, vg)
    assert fl["minus"]["mass_in"] == pytest.approx(fl["minus"]["mass_out"], rel=1e-14)
    assert fl["plus"]["mass_in"] == pytest.approx(fl["plus"]["mass_out"], rel=1e-14)
    assert fl["plus"]["energy_out"] > fl["minus"]["energy_out"]


@pytest.fixture(scope="module")
def slab():
    vg = VelocityGrid(8, 4.0)
    walls = WallModel.build(1.0, 1.0, vg)
    return vg, SlabGrid(64), walls


def test_default_family_validates(slab):
    vg, sg, _ = slab
    fam = ProbeFamily.default(vg)
    assert len(fam.functions) == 12
    fam.validate(vg, sg)
    assert {tf.profile for tf in fam.functions} == {"ramp", "spline"}


def test_family_rejects_bump_near_grazing(slab):
    vg, sg, _ = slab
    fam = ProbeFamily([Probe((0.2, 0.0, 0.0), 1.0, "spline")], vg.xi_min)
    with pytest.raises(ValueError):
        fam.validate(vg, sg)


def test_residual_of_vanishing_test_function(slab):
    vg, sg, walls = slab
    fam = ProbeFamily([Probe((50.0, 0.0, 0.0), 1.0, "ramp")], vg.xi_min)
    f = np.random.default_rng(2).random((sg.size, vg.size))
    amps = {"A": {-1: 1.0, 1: 1.0}, "B": {-1: 1.0, 1: 1.0}}
    res = weak_form_residual(f, f, amps, fam, _zero_rhs(sg.size, vg.size), walls, vg, sg)
    assert res["max_abs"] == 0.0


@pytest.mark.parametrize("renorm", [False, True])
def test_residual_of_x_constant_equilibrium(slab, renorm):
    vg, sg, walls = slab
    k = 0.7
    f = np.tile(k * walls.m_minus, (sg.size, 1))
    amps = {s: {-1: k, 1: k} for s in "AB"}
    fam = ProbeFamily.default(vg)
    res = weak_form_residual(f, f, amps, fam, _zero_rhs(sg.size, vg.size), walls, vg, sg, renormalized=renorm)
    spline = [r for r in res["per_function"] if r["profile"] == "spline"]
    # odd derivative on a symmetric grid: the transport term cancels to rounding
    assert max(abs(r["residual"]) for r in spline) <= 1e-15
    assert res["max_rel"] <= 1e-3


def test_renormalized_guards(slab):
    vg, sg, walls = slab
    f = np.ones((sg.size, vg.size))
    amps = {s: {-1: 1.0, 1: 1.0} for s in "AB"}
    fam = ProbeFamily.default(vg)
    rhs = _zero_rhs(sg.size, vg.size)
    with pytest.raises(ValueError, match="soft"):
        renormalized_residual(f, f, amps, fam, rhs, walls, vg, sg, KernelConfig(beta=0.0))
    with pytest.raises(ValueError, match="-3"):
        renormalized_residual(f, f, amps, fam, rhs, walls, vg, sg, KernelConfig(beta=-3.0))
    with pytest.raises(ValueError, match="positive"):
        renormalized_residual(0 * f, f, amps, fam, rhs, walls, vg, sg, KernelConfig(beta=-1.0))
    out = renormalized_residual(f, f, amps, fam, rhs, walls, vg, sg, KernelConfig(beta=-1.0))
    assert np.isfinite(out["max_abs"])


@pytest.fixture(scope="module")
def small_report(small_result, small_cfg, small_model):
    return diagnose(small_result, small_cfg, small_model)


def test_report_checks_pass(small_report):
    failed = [c for c in small_report.checks() if not c[1]]
    assert not failed, failed


def test_report_contents(small_report, small_result):
    rep = small_report
    assert rep.masses["max_rel_defect"] <= 1e-12
    assert rep.closure["sigma_defect"] <= 1e-12
    assert rep.closure["A_amplitude_defect"] <= 1e-12
    assert rep.positivity["negative_count"] == 0
    assert rep.renormalized_residual is None
    assert rep.state["theta"] == small_result.theta
    assert len(rep.gain_loss) == len(K_VALUES)
    assert rep.net_flux["holds"]
    json.dumps(rep.to_dict())
