"""Approximation pipeline: lambda floor, solve-and-normalize map, damped Picard.

The iterate carries, besides the normalized fields ``g_A, g_B`` and the split
``theta``, the scale ``s = weighted_mass(F) / M`` of the last unnormalized
solution. In the approximate problems the gain's first slot is the unknown
``F`` itself; freezing it at ``s * g`` makes ``F = s f`` hold exactly at a
fixed point, so the converged triple solves the normalized equations with
wall amplitudes ``k_A = lambda / s_A`` and ``lambda' = lambda / s_B``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .collision import (KernelConfig, KernelTruncation, Species, SphereRule, build_operators,
                        truncate_j)
from .transport import BoundaryCondition, TransportProblem, transport_sweep
from .velocity_space import (SlabGrid, VelocityGrid, WallModel, beta_weight, half_space_flux,
                             incoming_mask, weighted_mass)

log = logging.getLogger(__name__)

SWEEP_PARAMS = ("delta", "j", "l", "r", "mu", "n")
# direction in which each schedule must move (toward the limit)
_SWEEP_DIRECTION = {"delta": -1, "j": 1, "l": 1, "r": -1, "mu": 1, "n": 1}


@dataclass(frozen=True)
class IterationConfig:
    delta: float = 0.01
    j: float = 100.0
    l: float = 8.0
    trunc: KernelTruncation = field(default_factory=KernelTruncation)
    mass_A: float = 1.0
    mass_B: float = 1.0
    tol: float = 1e-8
    max_iter: int = 200
    rho: float = 0.5

    def __post_init__(self):
        if not self.delta >= 0:
            raise ValueError("delta must be >= 0")
        if not self.j >= 1:
            raise ValueError("j must be >= 1 (or inf)")
        if not self.l >= 1:
            raise ValueError("mollifier index l must be >= 1")
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")
        if not (self.mass_A > 0 and self.mass_B > 0):
            raise ValueError("target masses must be positive")
        if not 0 < self.rho <= 1:
            raise ValueError("Picard damping rho must lie in (0, 1]")
        if int(self.max_iter) < 1:
            raise ValueError("max_iter must be >= 1")

    def target(self, species: str) -> float:
        return self.mass_A if species == "A" else self.mass_B


class SlabModel:
    """Grids, walls, species and kernel; collision operators cached per truncation."""

    def __init__(self, vgrid: VelocityGrid, sgrid: SlabGrid, walls: WallModel,
                 species: dict, kernel: KernelConfig, sphere: SphereRule | None = None):
        self.vgrid = vgrid
        self.sgrid = sgrid
        self.walls = walls
        self.species = species
        self.kernel = kernel
        self.sphere = sphere or SphereRule()
        self._ops = {}
        self._moll = {}

    @classmethod
    def build(cls, m_A=1.0, m_B=2.0, t_minus=1.0, t_plus=2.0, n_v=16, vmax=None, cells=64,
              kernel: KernelConfig | None = None, d_A=1.0, d_B=1.0, sphere=None) -> "SlabModel":
        vg = VelocityGrid.for_walls(n_v, t_minus, t_plus, vmax)
        sg = SlabGrid(cells)
        walls = WallModel.build(t_minus, t_plus, vg)
        species = {"A": Species(m_A, d_A, "A"), "B": Species(m_B, d_B, "B")}
        return cls(vg, sg, walls, species, kernel or KernelConfig(), sphere)

    def operators(self, trunc: KernelTruncation) -> dict:
        if trunc not in self._ops:
            self._ops[trunc] = build_operators(self.vgrid, self.species, self.kernel, trunc, self.sphere)
        return self._ops[trunc]

    def mollifier(self, l: float) -> np.ndarray:
        if l not in self._moll:
            self._moll[l] = mollifier_matrix(self.sgrid, l)
        return self._moll[l]

    def weights(self, mu: float) -> np.ndarray:
        """Velocity quadrature weights times ``min(mu, (1+|v|)^beta)``."""
        return beta_weight(self.vgrid.nodes, self.kernel.beta, mu) * self.vgrid.weights

    def weighted_mass(self, f, mu: float) -> float:
        return weighted_mass(f, self.vgrid, self.sgrid, self.kernel.beta, mu)


@dataclass
class IterationState:
    g_A: np.ndarray
    g_B: np.ndarray
    theta: float
    scale_A: float
    scale_B: float
    lam: float
    residuals: list = field(default_factory=list)

    @property
    def k_A(self) -> float:
        return self.lam / self.scale_A

    @property
    def lam_prime(self) -> float:
        return self.lam / self.scale_B

    @property
    def sigma(self) -> dict:
        """B-wall split ``{-1: theta, 1: 1 - theta}``."""
        return {-1: self.theta, 1: 1.0 - self.theta}

    def field(self, species: str) -> np.ndarray:
        return self.g_A if species == "A" else self.g_B

    def copy(self) -> "IterationState":
        return replace(self, g_A=self.g_A.copy(), g_B=self.g_B.copy(), residuals=list(self.residuals))


@dataclass
class ApproxSolution:
    """Unnormalized solutions of the frozen problems plus their coefficients."""

    F_A: np.ndarray
    F_B: np.ndarray
    gain: dict
    nu: dict
    sweep_info: dict


@dataclass
class FixedPointResult:
    state: IterationState
    converged: bool
    iterations: int
    history: list
    last: ApproxSolution | None = None

    @property
    def f_A(self):
        return self.state.g_A

    @property
    def f_B(self):
        return self.state.g_B

    @property
    def theta(self):
        return self.state.theta


def bump(x):
    """Unnormalized C-infinity bump ``exp(-1/(1-x^2))`` on ``(-1, 1)``."""
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < 1.0
    safe = np.where(inside, 1.0 - x * x, 1.0)
    return np.where(inside, np.exp(-1.0 / safe), 0.0)


def mollifier_matrix(sgrid: SlabGrid, l: float) -> np.ndarray:
    """Row-stochastic matrix of ``phi_l(x_i - x_k)`` times trapezoid weights.

    Rows are renormalized to sum to one, which keeps constants fixed up to the
    walls where the kernel support is cut.
    """
    if not l >= 1:
        raise ValueError("mollifier index l must be >= 1")
    x = sgrid.x
    w = l * bump(l * (x[:, None] - x[None, :])) * sgrid.weights[None, :]
    # support narrower than a cell: fall back to the identity
    empty = w.sum(axis=1) == 0
    w[empty] = np.eye(len(x))[empty]
    return w / w.sum(axis=1, keepdims=True)


def mollify(f: np.ndarray, l: float, sgrid: SlabGrid, matrix: np.ndarray | None = None) -> np.ndarray:
    m = mollifier_matrix(sgrid, l) if matrix is None else matrix
    return m @ np.asarray(f, dtype=float)


def compute_lambda(walls: WallModel, vgrid: VelocityGrid, beta: float, mu: float) -> float:
    """Amplitude floor: the smaller of the two reciprocal attenuated wall integrals."""
    w = beta_weight(vgrid.nodes, beta, mu) * vgrid.weights
    att = np.exp(-(2.0 + 2.0 * mu) / np.abs(vgrid.xi))
    cands = []
    for side in (-1, 1):
        m = incoming_mask(vgrid, side)
        cands.append(1.0 / float(np.sum(walls.maxwellian_at(side)[m] * w[m] * att[m])))
    return min(cands)


def normalize(F: np.ndarray, target: float, model: SlabModel, mu: float) -> tuple[np.ndarray, float]:
    """``(target * F / wm(F), wm(F) / target)``."""
    wm = model.weighted_mass(F, mu)
    if not wm > 0:
        raise ValueError("cannot normalize a field with zero weighted mass")
    return F * (target / wm), wm / target


def update_theta(f_B: np.ndarray, vgrid: VelocityGrid) -> float:
    """Share of the B outflow leaving through ``x=-1``; 1/2 when both fluxes vanish."""
    phi_minus = half_space_flux(f_B[0], vgrid, -1)
    phi_plus = half_space_flux(f_B[-1], vgrid, 1)
    tot = phi_minus + phi_plus
    if tot == 0:
        return 0.5
    return float(phi_minus / tot)


def initial_state(model: SlabModel, cfg: IterationConfig) -> IterationState:
    """Wall-Maxwellian mixture with amplitude lambda, normalized; ``theta = 1/2``."""
    mu = cfg.trunc.mu
    lam = compute_lambda(model.walls, model.vgrid, model.kernel.beta, mu)
    base = np.tile(0.5 * lam * (model.walls.m_minus + model.walls.m_plus), (model.sgrid.size, 1))
    g_A, s_A = normalize(base, cfg.mass_A, model, mu)
    g_B, s_B = normalize(base, cfg.mass_B, model, mu)
    return IterationState(g_A, g_B, 0.5, s_A, s_B, lam)


def frozen_coefficients(state: IterationState, cfg: IterationConfig, model: SlabModel):
    """Gain sources and loss frequencies of the frozen problems, keyed by species."""
    ops = model.operators(cfg.trunc)
    moll = model.mollifier(cfg.l)
    partner = {s: truncate_j(moll @ state.field(s), cfg.j) for s in "AB"}
    first = {"A": truncate_j(state.scale_A * state.g_A, cfg.j),
             "B": truncate_j(state.scale_B * state.g_B, cfg.j)}
    gain, nu = {}, {}
    for s in "AB":
        gain[s] = sum(ops[s + o].gain(first[s], partner[o]) for o in "AB")
        nu[s] = sum(ops[s + o].frequency(partner[o]) for o in "AB")
    return gain, nu


def solve_approx_problem(state: IterationState, cfg: IterationConfig, model: SlabModel) -> ApproxSolution:
    gain, nu = frozen_coefficients(state, cfg, model)
    bcs = {"A": BoundaryCondition.indata(state.lam),
           "B": BoundaryCondition.theta_split(state.lam, state.theta)}
    out, infos = {}, {}
    for s in "AB":
        prob = TransportProblem(cfg.delta, gain[s], nu[s], bcs[s], model.vgrid, model.sgrid, model.walls)
        out[s], infos[s] = transport_sweep(prob)
    return ApproxSolution(out["A"], out["B"], gain, nu, infos)


def T_map(state: IterationState, cfg: IterationConfig, model: SlabModel):
    """One application of the solve-normalize-theta map; returns ``(state', solution)``."""
    sol = solve_approx_problem(state, cfg, model)
    f_A, s_A = normalize(sol.F_A, cfg.mass_A, model, cfg.trunc.mu)
    f_B, s_B = normalize(sol.F_B, cfg.mass_B, model, cfg.trunc.mu)
    theta = update_theta(f_B, model.vgrid)
    return IterationState(f_A, f_B, theta, s_A, s_B, state.lam, list(state.residuals)), sol


def _l1(model: SlabModel, f) -> float:
    return float(model.sgrid.weights @ (np.abs(f) @ model.vgrid.weights))


def residual_parts(old: IterationState, new: IterationState, model: SlabModel) -> dict:
    """Relative L1 change per species (plus relative scale change) and ``|d theta|``."""
    out = {}
    for s in "AB":
        g_old, g_new = old.field(s), new.field(s)
        sc_old = old.scale_A if s == "A" else old.scale_B
        sc_new = new.scale_A if s == "A" else new.scale_B
        out["residual_" + s] = _l1(model, g_new - g_old) / _l1(model, g_old) + abs(sc_new - sc_old) / sc_old
    out["dtheta"] = abs(new.theta - old.theta)
    out["total"] = out["residual_A"] + out["residual_B"] + out["dtheta"]
    return out


def _blend(old: IterationState, new: IterationState, rho: float) -> IterationState:
    c = 1.0 - rho
    return IterationState(c * old.g_A + rho * new.g_A, c * old.g_B + rho * new.g_B,
                          c * old.theta + rho * new.theta,
                          c * old.scale_A + rho * new.scale_A, c * old.scale_B + rho * new.scale_B,
                          old.lam, old.residuals)


def iterate_to_fixed_point(cfg: IterationConfig, model: SlabModel,
                           state: IterationState | None = None, callback=None) -> FixedPointResult:
    """Damped Picard iteration ``state <- (1-rho) state + rho T(state)``.

    Stops when the residual of ``T`` at the current state drops below
    ``cfg.tol``; the returned state is then the last ``T`` image, so its
    masses are exact. Without convergence the best iterate is returned,
    flagged.
    """
    lam = compute_lambda(model.walls, model.vgrid, model.kernel.beta, cfg.trunc.mu)
    if state is None:
        state = initial_state(model, cfg)
    else:
        state = state.copy()
        state.lam = lam
    history = []
    best = None
    for it in range(1, int(cfg.max_iter) + 1):
        image, sol = T_map(state, cfg, model)
        parts = residual_parts(state, image, model)
        row = {"iteration": it, **parts, "theta": image.theta, "k_A": image.k_A, "lam_prime": image.lam_prime}
        history.append(row)
        if callback is not None:
            callback(row)
        log.debug("iter %d residual %.3e", it, parts["total"])
        if best is None or parts["total"] < best[0]:
            best = (parts["total"], image, sol, it)
        if parts["total"] < cfg.tol:
            image.residuals = [h["total"] for h in history]
            return FixedPointResult(image, True, it, history, sol)
        state = _blend(state, image, cfg.rho)
    _, image, sol, _ = best
    image.residuals = [h["total"] for h in history]
    return FixedPointResult(image, False, int(cfg.max_iter), history, sol)


@dataclass
class SweepStep:
    value: float
    result: FixedPointResult | None
    l1_to_previous: float | None
    error: str | None = None
    report: dict | None = None


def _with_param(cfg: IterationConfig, name: str, value: float) -> IterationConfig:
    if name in ("delta", "j", "l"):
        return replace(cfg, **{name: float(value)})
    trunc = replace(cfg.trunc, **{"m_sharp" if name == "m" else name: float(value)})
    return replace(cfg, trunc=trunc)


def check_schedule(name: str, values) -> None:
    if name not in SWEEP_PARAMS:
        raise ValueError(f"sweep parameter must be one of {SWEEP_PARAMS}, got {name!r}")
    vals = [float(v) for v in values]
    if not vals:
        raise ValueError("sweep needs at least one value")
    d = np.diff(vals) * _SWEEP_DIRECTION[name]
    if np.any(d <= 0):
        way = "decreasing" if _SWEEP_DIRECTION[name] < 0 else "increasing"
        raise ValueError(f"{name} schedule must be strictly {way}")


def continuation_sweep(cfg: IterationConfig, model: SlabModel, param: str, values,
                       state: IterationState | None = None, diagnose=None) -> list[SweepStep]:
    """Warm-started solves along a schedule; failures are recorded, not raised.

    ``diagnose(result, cfg, model)``, if given, fills ``SweepStep.report``.
    """
    check_schedule(param, values)
    steps = []
    prev = None
    for v in values:
        try:
            step_cfg = _with_param(cfg, param, v)
            res = iterate_to_fixed_point(step_cfg, model, state)
        except (ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
            steps.append(SweepStep(float(v), None, None, error=str(exc)))
            continue
        dist = None
        if prev is not None:
            dist = _l1(model, res.f_A - prev.f_A) + _l1(model, res.f_B - prev.f_B)
        report = diagnose(res, step_cfg, model) if diagnose is not None else None
        steps.append(SweepStep(float(v), res, dist, report=report))
        state = res.state
        prev = res
    return steps
