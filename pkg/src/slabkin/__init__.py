"""Stationary two-species kinetic slab solver.

Discrete-velocity collision operators for a binary mixture, characteristic
transport on ``[-1, 1]`` with wall Maxwellians, a normalized fixed-point
iteration and diagnostics for the conservation, entropy and weak-form
properties of the converged states.
"""
from .collision import KernelConfig, KernelTruncation, Species, build_operators
from .diagnostics import DiagnosticsReport, diagnose
from .fixed_point import FixedPointResult, IterationConfig, SlabModel, continuation_sweep, iterate_to_fixed_point
from .kernels import compiled_available
from .transport import BoundaryCondition, TransportProblem, transport_sweep
from .velocity_space import SlabGrid, VelocityGrid, WallModel, maxwellian

__version__ = "0.1.0"

__all__ = [
    "BoundaryCondition", "DiagnosticsReport", "FixedPointResult", "IterationConfig", "KernelConfig",
    "KernelTruncation", "SlabGrid", "SlabModel", "Species", "TransportProblem", "VelocityGrid", "WallModel",
    "build_operators", "compiled_available", "continuation_sweep", "diagnose", "iterate_to_fixed_point",
    "maxwellian", "transport_sweep",
]
