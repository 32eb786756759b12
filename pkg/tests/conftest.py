import numpy as np
import pytest

from slabkin.collision import KernelConfig, KernelTruncation, Species, build_operators
from slabkin.fixed_point import IterationConfig, SlabModel, iterate_to_fixed_point
from slabkin.velocity_space import VelocityGrid, species_maxwellian

SPECIES = {"A": Species(1.0, label="A"), "B": Species(2.0, label="B")}


@pytest.fixture(scope="session")
def small_model():
    return SlabModel.build(n_v=8, cells=16)


@pytest.fixture(scope="session")
def small_cfg():
    return IterationConfig(rho=1.0)


@pytest.fixture(scope="session")
def small_result(small_model, small_cfg):
    res = iterate_to_fixed_point(small_cfg, small_model)
    assert res.converged
    return res


@pytest.fixture(scope="session")
def coarse_ops():
    vg = VelocityGrid(8, 3.5)
    return vg, build_operators(vg, SPECIES, KernelConfig(), KernelTruncation(n=64.0))


@pytest.fixture(scope="session")
def coarse_pair(coarse_ops):
    vg, _ = coarse_ops
    fA = species_maxwellian(vg.nodes, 1.0, 1.0, 1.0, (0.4, 0.0, 0.0))[None]
    fB = species_maxwellian(vg.nodes, 2.0, 1.3, 0.8, (-0.2, 0.1, 0.0))[None]
    return fA, fB


def rand_unit(rng, k):
    om = rng.normal(size=(k, 3))
    return om / np.linalg.norm(om, axis=1, keepdims=True)


# one PASS/FAIL line per acceptance criterion, printed in the terminal summary
_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
