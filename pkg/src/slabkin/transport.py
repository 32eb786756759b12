"""Linear slab transport ``delta F + xi dF/dx = G - nu F`` along characteristics.

Each velocity node is integrated cell by cell in exponential form. With
``a = delta + nu`` and cell-end averages ``a_bar``, ``G_bar``,

    F_{k+1} = F_k exp(-tau) + (G_bar dx / |xi|) phi1(tau),    tau = a_bar dx / |xi|,

where ``phi1(t) = (1 - exp(-t)) / t``. The update is second order, keeps
constant equilibria exact, and never produces negative values from
nonnegative data.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .velocity_space import SlabGrid, VelocityGrid, WallModel, half_space_flux, incoming_mask

WALL_TOL = 1e-12
WALL_MAX_ITER = 10_000


@dataclass(frozen=True)
class WallCondition:
    """Inflow rule at one wall: ``"indata"`` (``amplitude * M_wall``) or ``"diffuse"``."""

    kind: str
    amplitude: float = 0.0

    def __post_init__(self):
        if self.kind not in ("indata", "diffuse"):
            raise ValueError(f"unknown wall condition {self.kind!r}")
        if not self.amplitude >= 0:
            raise ValueError("wall amplitude must be nonnegative")


@dataclass(frozen=True)
class BoundaryCondition:
    """Per-wall inflow rules; ``label`` records how the pair was built."""

    left: WallCondition
    right: WallCondition
    label: str = "custom"
    theta: float | None = None

    @classmethod
    def indata(cls, k: float) -> "BoundaryCondition":
        return cls(WallCondition("indata", k), WallCondition("indata", k), "indata")

    @classmethod
    def diffuse(cls) -> "BoundaryCondition":
        return cls(WallCondition("diffuse"), WallCondition("diffuse"), "diffuse")

    @classmethod
    def theta_split(cls, lam: float, theta: float) -> "BoundaryCondition":
        """``theta lam M_-`` enters at ``x=-1`` and ``(1-theta) lam M_+`` at ``x=1``."""
        if not 0.0 <= theta <= 1.0:
            raise ValueError(f"theta must lie in [0, 1], got {theta}")
        return cls(WallCondition("indata", theta * lam), WallCondition("indata", (1.0 - theta) * lam),
                   "theta_split", theta)

    def at(self, side: int) -> WallCondition:
        return self.left if side == -1 else self.right

    @property
    def has_diffuse(self) -> bool:
        return self.left.kind == "diffuse" or self.right.kind == "diffuse"


@dataclass
class TransportProblem:
    """Frozen-coefficient problem on ``sgrid x vgrid``; fields are ``(n_x, n_v)``."""

    delta: float
    source: np.ndarray
    attenuation: np.ndarray
    bc: BoundaryCondition
    vgrid: VelocityGrid
    sgrid: SlabGrid
    walls: WallModel

    def __post_init__(self):
        shape = (self.sgrid.size, self.vgrid.size)
        self.source = np.broadcast_to(np.asarray(self.source, dtype=float), shape)
        self.attenuation = np.broadcast_to(np.asarray(self.attenuation, dtype=float), shape)
        if not self.delta >= 0:
            raise ValueError("damping delta must be nonnegative")
        for name, arr in (("source", self.source), ("attenuation", self.attenuation)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} field must be finite")
            if np.any(arr < 0):
                raise ValueError(f"{name} field must be nonnegative")
        if np.any(self.vgrid.xi == 0):
            raise ValueError("velocity grid has a node with xi = 0")


@dataclass
class SweepInfo:
    wall_iterations: int = 0
    wall_flux_left: float = 0.0
    wall_flux_right: float = 0.0
    damped: bool = False
    converged: bool = True
    history: list = field(default_factory=list)


def _phi1(t):
    small = t < 1e-8
    safe = np.where(small, 1.0, t)
    return np.where(small, 1.0 - 0.5 * t, -np.expm1(-safe) / safe)


def _cell_factors(problem: TransportProblem):
    """Per-cell decay ``E`` and source increment ``S`` for every velocity node."""
    a = problem.delta + problem.attenuation
    g = problem.source
    a_bar = 0.5 * (a[1:] + a[:-1])
    g_bar = 0.5 * (g[1:] + g[:-1])
    step = problem.sgrid.widths[:, None] / np.abs(problem.vgrid.xi)[None, :]
    tau = a_bar * step
    decay = np.exp(-tau)
    incr = g_bar * step * _phi1(tau)
    return decay, incr


def _march(decay, incr, inflow_left, inflow_right, xi):
    """Run the recurrences; rightward for ``xi > 0`` and leftward for ``xi < 0``."""
    nc, nv = decay.shape
    out = np.empty((nc + 1, nv))
    pos = xi > 0
    neg = ~pos
    out[0, pos] = inflow_left[pos]
    for k in range(nc):
        out[k + 1, pos] = out[k, pos] * decay[k, pos] + incr[k, pos]
    out[nc, neg] = inflow_right[neg]
    for k in range(nc - 1, -1, -1):
        out[k, neg] = out[k + 1, neg] * decay[k, neg] + incr[k, neg]
    return out


def apply_indata_bc(k: float, walls: WallModel, vgrid: VelocityGrid, side: int) -> np.ndarray:
    """``k M_wall`` on the nodes entering through wall ``side``, zero elsewhere."""
    if not k >= 0:
        raise ValueError("indata amplitude must be nonnegative")
    return np.where(incoming_mask(vgrid, side), k * walls.maxwellian_at(side), 0.0)


def _emission_flux(walls: WallModel, vgrid: VelocityGrid, side: int) -> float:
    """Discrete incoming flux of the wall Maxwellian at ``side``."""
    inc = incoming_mask(vgrid, side)
    return float(np.sum((np.abs(vgrid.xi) * walls.maxwellian_at(side) * vgrid.weights)[inc]))


def apply_diffuse_bc(outgoing_slice: np.ndarray, walls: WallModel, vgrid: VelocityGrid, side: int) -> np.ndarray:
    """Re-emit the outgoing mass flux at wall ``side`` with the wall Maxwellian.

    The profile is renormalized to unit discrete flux, so the re-emitted flux
    equals the outgoing one to rounding.
    """
    phi = half_space_flux(np.asarray(outgoing_slice, dtype=float), vgrid, side)
    return apply_indata_bc(phi / _emission_flux(walls, vgrid, side), walls, vgrid, side)


def solve_characteristic(problem: TransportProblem, inflow: float, v_node: int) -> np.ndarray:
    """Profile along the slab for one velocity node entering with value ``inflow``."""
    xi = problem.vgrid.xi[v_node]
    if xi == 0:
        raise ValueError("characteristic with xi = 0")
    decay, incr = _cell_factors(problem)
    d, s = decay[:, v_node], incr[:, v_node]
    out = np.empty(len(d) + 1)
    if xi > 0:
        out[0] = inflow
        for k in range(len(d)):
            out[k + 1] = out[k] * d[k] + s[k]
    else:
        out[-1] = inflow
        for k in range(len(d) - 1, -1, -1):
            out[k] = out[k + 1] * d[k] + s[k]
    return out


def transport_sweep(problem: TransportProblem, tol: float = WALL_TOL, max_iter: int = WALL_MAX_ITER):
    """Solve every characteristic; returns ``(F, SweepInfo)``.

    Diffuse walls are closed by fixed-point iteration on the two scalar
    re-emitted fluxes. Only wall values are propagated during that loop
    (the map is affine), then one full sweep builds the field.
    """
    vg, walls = problem.vgrid, problem.walls
    xi = vg.xi
    decay, incr = _cell_factors(problem)
    info = SweepInfo()
    bc = problem.bc

    emit = {side: _emission_flux(walls, vg, side) for side in (-1, 1)}

    def inflows(phi_l, phi_r):
        left = bc.left
        right = bc.right
        a_l = phi_l / emit[-1] if left.kind == "diffuse" else left.amplitude
        a_r = phi_r / emit[1] if right.kind == "diffuse" else right.amplitude
        return (apply_indata_bc(a_l, walls, vg, -1), apply_indata_bc(a_r, walls, vg, 1))

    if bc.has_diffuse:
        pos, neg = xi > 0, xi < 0
        trans_pos = np.prod(decay[:, pos], axis=0)
        trans_neg = np.prod(decay[:, neg], axis=0)
        zero = np.zeros(vg.size)
        part = _march(decay, incr, zero, zero, xi)
        part_right, part_left = part[-1, pos], part[0, neg]
        w_pos = xi[pos] * vg.weights[pos]
        w_neg = -xi[neg] * vg.weights[neg]
        phi = np.zeros(2)
        last_step = None
        damp = 1.0
        for it in range(1, max_iter + 1):
            in_l, in_r = inflows(phi[0], phi[1])
            out_left = trans_neg * in_r[neg] + part_left
            out_right = trans_pos * in_l[pos] + part_right
            new = np.array([w_neg @ out_left, w_pos @ out_right])
            step = new - phi
            if last_step is not None and np.any(step * last_step < 0) and damp == 1.0:
                damp = 0.5
                info.damped = True
            phi = phi + damp * step
            last_step = step
            info.history.append(phi.copy())
            scale = max(np.max(np.abs(phi)), np.finfo(float).tiny)
            if np.max(np.abs(step)) <= tol * scale or np.max(np.abs(step)) == 0.0:
                break
        else:
            info.converged = False
        info.wall_iterations = it
        info.wall_flux_left, info.wall_flux_right = float(phi[0]), float(phi[1])
        in_l, in_r = inflows(phi[0], phi[1])
    else:
        in_l, in_r = inflows(0.0, 0.0)
    F = _march(decay, incr, in_l, in_r, xi)
    return F, info


def green_identity_defect(F: np.ndarray, problem: TransportProblem) -> tuple[float, float]:
    """``delta iint F + [int xi F]_{-1}^{1} - iint (G - nu F)`` and its scale."""
    vg, sg = problem.vgrid, problem.sgrid
    w = vg.weights
    xi = vg.xi
    boundary = (F[-1] * xi) @ w - (F[0] * xi) @ w
    bulk = sg.weights @ ((problem.source - problem.attenuation * F - problem.delta * F) @ w)
    scale = abs(boundary) + sg.weights @ ((problem.source + (problem.attenuation + problem.delta) * F) @ w)
    return float(boundary - bulk), float(scale)
