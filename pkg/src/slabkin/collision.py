"""Binary-mixture collision machinery.

Microscopic transforms, raw and truncated kernels, the smooth cutoff
``chi``, and :class:`CollisionOperator`, which evaluates gain, loss and
entropy-production quadratures through the compiled core (or its NumPy
fallback).

Post-collision velocities use the momentum-conserving coefficients
``2 m_b/(m_a+m_b)`` for ``v'`` and ``2 m_a/(m_a+m_b)`` for ``v_*'``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from . import kernels
from .velocity_space import VelocityGrid

PREFACTOR = 1.0 / (4.0 * np.sqrt(2.0 * np.pi))
UNIT_TOL = 1e-10
LOG_FLOOR = 1e-300


@dataclass(frozen=True)
class Species:
    mass: float
    diameter: float = 1.0
    label: str = "A"

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError(f"species {self.label}: mass must be positive")
        if not self.diameter > 0:
            raise ValueError(f"species {self.label}: diameter must be positive")


@dataclass(frozen=True)
class KernelConfig:
    """Potential exponent and angular law ``b``.

    ``b_law`` is ``"constant"`` (b = 1) or ``"cosine"`` (b = 1 + eps cos theta).
    """

    beta: float = 0.0
    b_law: str = "constant"
    b_eps: float = 0.0
    c_floor: float = 0.5

    def __post_init__(self):
        if not (0.0 <= self.beta < 2.0 or -3.0 <= self.beta < 0.0):
            raise ValueError(
                f"beta={self.beta} outside both admissible ranges: "
                "hard forces 0 <= beta < 2, soft forces -3 <= beta < 0")
        if self.b_law not in ("constant", "cosine"):
            raise ValueError(f"unknown angular law {self.b_law!r}")
        if not self.c_floor > 0:
            raise ValueError("angular floor c must be positive")
        if self.b_law == "constant" and self.c_floor > 1.0:
            raise ValueError("b = 1 violates the floor c > 1")
        if self.b_law == "cosine" and 1.0 - abs(self.b_eps) < self.c_floor:
            raise ValueError(f"b = 1 + {self.b_eps} cos(theta) drops below the floor c={self.c_floor}")

    @property
    def hard(self) -> bool:
        return self.beta >= 0.0

    def b(self, theta):
        theta = np.asarray(theta, dtype=float)
        if self.b_law == "constant":
            return np.ones_like(theta)
        return 1.0 + self.b_eps * np.cos(theta)


@dataclass(frozen=True)
class KernelTruncation:
    r: float = 0.05
    m_sharp: float = 40.0
    n: float = 400.0
    mu: float = 2.0

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("truncation r must be positive")
        if not self.m_sharp >= 1:
            raise ValueError("truncation m_sharp must be >= 1")
        if not self.n > 0:
            raise ValueError("truncation n must be positive")
        if not self.mu >= 1:
            raise ValueError("truncation mu must be >= 1")

    @property
    def sqrt_n(self) -> float:
        return float(np.sqrt(self.n))


@dataclass(frozen=True)
class CollisionSample:
    """Batch of collision configurations; arrays of shape ``(3,)`` or ``(k, 3)``."""

    v: np.ndarray
    vs: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        for name in ("v", "vs", "omega"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        norm = np.sqrt(np.sum(self.omega**2, axis=-1))
        if np.any(np.abs(norm - 1.0) > UNIT_TOL):
            raise ValueError("omega must be a unit vector")

    @property
    def cos_theta(self):
        g = self.v - self.vs
        gn = np.sqrt(np.sum(g * g, axis=-1))
        with np.errstate(invalid="ignore", divide="ignore"):
            c = np.sum(g * self.omega, axis=-1) / gn
        return np.where(gn > 0, c, 0.0)

    @property
    def theta(self):
        return np.arccos(np.clip(self.cos_theta, -1.0, 1.0))

    @property
    def phi(self):
        u = _unit(self.v - self.vs)
        e1, e2 = orthonormal_frame(u)
        return np.arctan2(np.sum(self.omega * e2, axis=-1), np.sum(self.omega * e1, axis=-1))

    def swapped(self) -> "CollisionSample":
        return CollisionSample(self.vs, self.v, self.omega)


def _unit(g):
    gn = np.sqrt(np.sum(g * g, axis=-1, keepdims=True))
    return np.divide(g, gn, out=np.zeros_like(g), where=gn > 0)


def orthonormal_frame(u):
    """Deterministic ``(e1, e2)`` completing ``u`` to a right-handed frame.

    The seed axis is ``e_x`` unless ``|u_x| > 0.9``, then ``e_y``; the
    compiled core uses the same rule.
    """
    u = np.asarray(u, dtype=float)
    seed = np.zeros_like(u)
    use_y = np.abs(u[..., 0]) > 0.9
    seed[..., 0] = np.where(use_y, 0.0, 1.0)
    seed[..., 1] = np.where(use_y, 1.0, 0.0)
    e1 = seed - np.sum(seed * u, axis=-1, keepdims=True) * u
    e1 = e1 / np.sqrt(np.sum(e1 * e1, axis=-1, keepdims=True))
    e2 = np.cross(u, e1)
    return e1, e2


def mass_coefficients(alpha: Species, beta_s: Species) -> tuple[float, float]:
    tot = alpha.mass + beta_s.mass
    return 2.0 * beta_s.mass / tot, 2.0 * alpha.mass / tot


def post_collision_velocities(v, vs, omega, alpha: Species, beta_s: Species):
    """Post-collision ``(v', v_*')`` for an ``alpha`` particle hitting ``beta_s``."""
    v, vs, omega = (np.asarray(a, dtype=float) for a in (v, vs, omega))
    norm = np.sqrt(np.sum(omega**2, axis=-1))
    if np.any(np.abs(norm - 1.0) > UNIT_TOL):
        raise ValueError("omega must be a unit vector")
    c1, c2 = mass_coefficients(alpha, beta_s)
    dot = np.sum((vs - v) * omega, axis=-1, keepdims=True)
    return v + c1 * dot * omega, vs - c2 * dot * omega


def involution_J(sample: CollisionSample, alpha: Species, beta_s: Species) -> CollisionSample:
    vp, vsp = post_collision_velocities(sample.v, sample.vs, sample.omega, alpha, beta_s)
    return CollisionSample(vp, vsp, -sample.omega)


def kernel_base(v, vs, theta, pair: tuple[Species, Species], cfg: KernelConfig):
    """Raw kernel ``(1/(4 sqrt(2 pi))) ((d_a+d_b)/2)^2 |v-v_*|^beta b(theta)``."""
    a, b = pair
    g = np.sqrt(np.sum((np.asarray(v, float) - np.asarray(vs, float)) ** 2, axis=-1))
    if not cfg.hard and np.any(g == 0):
        raise ValueError("soft kernel is singular at v = v_*")
    d2 = (0.5 * (a.diameter + b.diameter)) ** 2
    return PREFACTOR * d2 * g**cfg.beta * cfg.b(theta)


def smooth_step(t):
    """C1 cubic ramp: 0 for t <= 0, 1 for t >= 1, ``3t^2 - 2t^3`` between."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


def axial_speeds(sample: CollisionSample, pair):
    """The four ``|xi|`` values entering the cutoff for one species pairing."""
    vp, vsp = post_collision_velocities(sample.v, sample.vs, sample.omega, *pair)
    return np.stack([np.abs(sample.v[..., 0]), np.abs(sample.vs[..., 0]),
                     np.abs(vp[..., 0]), np.abs(vsp[..., 0])], axis=-1)


def chi_cutoff(sample: CollisionSample, pair, trunc: KernelTruncation):
    """Smooth small-``xi`` cutoff for the pairing ``pair``.

    Built from ``q = min(|xi|, |xi_*|, |xi'|, |xi_*'|)`` of that pairing, so it is
    exactly invariant under the pairing's involution and under the swap
    ``(v, v_*, pair) -> (v_*, v, reversed pair)``.
    """
    q = np.min(axial_speeds(sample, pair), axis=-1)
    return smooth_step(trunc.m_sharp * (q - trunc.r) + 1.0)


def pair_energy(v, vs, pair):
    """Collision-invariant energy measure; reduces to ``v^2 + v_*^2`` for equal masses."""
    a, b = pair
    v2 = np.sum(np.asarray(v, float) ** 2, axis=-1)
    vs2 = np.sum(np.asarray(vs, float) ** 2, axis=-1)
    return 2.0 * (a.mass * v2 + b.mass * vs2) / (a.mass + b.mass)


def truncated_kernel(sample: CollisionSample, pair, cfg: KernelConfig, trunc: KernelTruncation):
    """Capped kernel with C1 energy and angular cutoffs; values in ``[0, mu]``."""
    g = sample.v - sample.vs
    gn = np.sqrt(np.sum(g * g, axis=-1))
    live = gn > 0
    c = np.abs(sample.cos_theta)
    safe = np.where(live, gn, 1.0)
    a, b = pair
    d2 = (0.5 * (a.diameter + b.diameter)) ** 2
    base = PREFACTOR * d2 * safe**cfg.beta * cfg.b(sample.theta)
    capped = np.minimum(base, trunc.mu)
    e = pair_energy(sample.v, sample.vs, pair)
    sn = trunc.sqrt_n
    energy_ramp = smooth_step((sn - e) / (0.5 * sn))
    m2 = 2.0 * trunc.m_sharp
    low = smooth_step((c - 0.5 / trunc.m_sharp) * m2)
    high = smooth_step(((1.0 - 0.5 / trunc.m_sharp) - c) * m2)
    return np.where(live, capped * energy_ramp * low * high, 0.0)


def truncate_j(f, j):
    """``f / (1 + f/j)``; identity for ``j = inf``."""
    if np.isinf(j):
        return np.asarray(f, dtype=float)
    return f / (1.0 + f / j)


@dataclass(frozen=True)
class SphereRule:
    """Product rule on S^2: Gauss-Legendre in ``cos theta`` x uniform azimuth.

    ``omega`` and ``-omega`` produce the same collision, so only the
    ``cos theta > 0`` polar nodes are kept; ``weights_plus``/``weights_minus``
    carry the Gauss weight for the node and its mirror.
    """

    n_polar: int = 8
    n_azimuth: int = 8
    cos_t: np.ndarray = field(init=False, repr=False)
    w_gauss: np.ndarray = field(init=False, repr=False)
    phi: np.ndarray = field(init=False, repr=False)
    w_az: float = field(init=False)

    def __post_init__(self):
        if self.n_polar < 2 or self.n_polar % 2:
            raise ValueError("polar node count must be even")
        if self.n_azimuth < 1:
            raise ValueError("azimuth node count must be positive")
        x, w = np.polynomial.legendre.leggauss(self.n_polar)
        keep = x > 0
        object.__setattr__(self, "cos_t", x[keep][::-1].copy())
        object.__setattr__(self, "w_gauss", w[keep][::-1].copy())
        object.__setattr__(self, "phi", 2.0 * np.pi * np.arange(self.n_azimuth) / self.n_azimuth)
        object.__setattr__(self, "w_az", 2.0 * np.pi / self.n_azimuth)

    def full_nodes(self):
        """All ``(cos theta, phi, weight)`` nodes on the full sphere."""
        x, w = np.polynomial.legendre.leggauss(self.n_polar)
        ct, ph = np.meshgrid(x, self.phi, indexing="ij")
        ww = np.repeat(w, self.n_azimuth) * self.w_az
        return ct.ravel(), ph.ravel(), ww


def omega_from_angles(u, cos_t, phi):
    """Unit vector at polar angle ``arccos(cos_t)`` about axis ``u``."""
    e1, e2 = orthonormal_frame(u)
    st = np.sqrt(np.maximum(0.0, 1.0 - cos_t * cos_t))
    ct = np.asarray(cos_t)[..., None]
    st = np.asarray(st)[..., None]
    ph = np.asarray(phi)[..., None]
    return ct * u + st * (np.cos(ph) * e1 + np.sin(ph) * e2)


@dataclass(frozen=True)
class PairParams:
    """Flat numeric bundle consumed by both kernel backends."""

    c1: float
    c2: float
    m_a: float
    m_b: float
    pref: float
    beta: float
    mu: float
    r: float
    m_sharp: float
    sqrt_n: float
    axis: np.ndarray
    h: float
    n: int
    w_vstar: float
    cos_t: np.ndarray
    w_gauss: np.ndarray
    b_plus: np.ndarray
    b_minus: np.ndarray
    cos_p: np.ndarray
    sin_p: np.ndarray
    w_az: float
    # consumed only by the NumPy fallback, which rebuilds weights from the primitives
    pair: tuple = None
    cfg: KernelConfig = None
    trunc: KernelTruncation = None


class CollisionOperator:
    """Quadrature of ``Q_{alpha beta}`` on a velocity grid.

    All field arguments are x-major arrays ``(n_x, n_v)`` already passed
    through the j-truncation by the caller (see :func:`truncate_j`).
    """

    def __init__(self, vgrid: VelocityGrid, alpha: Species, beta_s: Species,
                 cfg: KernelConfig, trunc: KernelTruncation, sphere: SphereRule | None = None):
        self.vgrid = vgrid
        self.alpha = alpha
        self.beta_s = beta_s
        self.cfg = cfg
        self.trunc = trunc
        self.sphere = sphere or SphereRule()
        c1, c2 = mass_coefficients(alpha, beta_s)
        theta = np.arccos(self.sphere.cos_t)
        self.params = PairParams(
            c1=c1, c2=c2, m_a=alpha.mass, m_b=beta_s.mass,
            pref=PREFACTOR * (0.5 * (alpha.diameter + beta_s.diameter)) ** 2,
            beta=cfg.beta, mu=trunc.mu, r=trunc.r, m_sharp=trunc.m_sharp, sqrt_n=trunc.sqrt_n,
            axis=vgrid.axis, h=vgrid.h, n=vgrid.n, w_vstar=vgrid.h**3,
            cos_t=self.sphere.cos_t, w_gauss=self.sphere.w_gauss,
            b_plus=cfg.b(theta), b_minus=cfg.b(np.pi - theta),
            cos_p=np.cos(self.sphere.phi), sin_p=np.sin(self.sphere.phi), w_az=self.sphere.w_az,
            pair=(alpha, beta_s), cfg=cfg, trunc=trunc,
        )
        self.row_ptr, self.cols = self._support()

    @property
    def pair(self):
        return (self.alpha, self.beta_s)

    def _support(self):
        """CSR list of ``(i, k)`` node pairs, ``i != k``, inside the energy cutoff."""
        s2 = self.vgrid.speed2
        ma, mb = self.alpha.mass, self.beta_s.mass
        bound = 0.5 * (ma + mb) * self.trunc.sqrt_n
        order = np.argsort(mb * s2, kind="stable")
        sorted_e = (mb * s2)[order]
        nv = self.vgrid.size
        counts = np.searchsorted(sorted_e, bound - ma * s2, side="left")
        row_ptr = np.zeros(nv + 1, dtype=np.int64)
        cols = []
        for i in range(nv):
            ks = np.sort(order[: counts[i]])
            ks = ks[ks != i]
            cols.append(ks)
            row_ptr[i + 1] = row_ptr[i] + len(ks)
        cols = np.concatenate(cols).astype(np.int32) if cols else np.zeros(0, np.int32)
        return row_ptr, cols

    @property
    def n_pairs(self) -> int:
        return int(self.row_ptr[-1])

    def _pad(self, f):
        """x-major ``(n_x, n_v)`` -> v-major zero-ringed ``((n+2)^3, n_x)``."""
        f = np.atleast_2d(np.asarray(f, dtype=float))
        n = self.vgrid.n
        nx = f.shape[0]
        out = np.zeros((n + 2, n + 2, n + 2, nx))
        out[1:-1, 1:-1, 1:-1, :] = f.T.reshape(n, n, n, nx)
        return out.reshape((n + 2) ** 3, nx)

    def _rows(self, rows):
        if rows is None:
            return np.arange(self.vgrid.size, dtype=np.int64)
        return np.atleast_1d(np.asarray(rows, dtype=np.int64))

    @cached_property
    def loss_matrix(self) -> sp.csr_matrix:
        """``L[i, k] = sum_omega chi B w_omega w_k``, so that ``nu = L @ partner``."""
        vals = kernels.loss_weights(self.params, self.row_ptr, self.cols)
        nv = self.vgrid.size
        return sp.csr_matrix((vals, self.cols, self.row_ptr), shape=(nv, nv))

    def gain(self, first, partner, rows=None) -> np.ndarray:
        """``sum chi B first(v') partner(v_*')``, shape ``(n_x, len(rows))``."""
        rows = self._rows(rows)
        fa = self._pad(first)
        fb = self._pad(partner)
        out = np.zeros((len(rows), fa.shape[1]))
        kernels.gain_rows(self.params, fa, fb, rows, self.row_ptr, self.cols, out)
        return out.T

    def frequency(self, partner) -> np.ndarray:
        partner = np.atleast_2d(partner)
        return np.asarray((self.loss_matrix @ partner.T).T)

    def entropy_density(self, first, partner, rows=None):
        """Per-node ``sum chi B (X' - X) log(X'/X)`` and the count of floored logs."""
        rows = self._rows(rows)
        fa = self._pad(first)
        fb = self._pad(partner)
        out = np.zeros((len(rows), fa.shape[1]))
        floors = kernels.entropy_rows(self.params, fa, fb, rows, self.row_ptr, self.cols, out, LOG_FLOOR)
        return out.T, int(floors)


def build_operators(vgrid, species: dict, cfg, trunc, sphere=None) -> dict:
    """Operators for the four ordered pairs ``AA, AB, BA, BB``."""
    ops = {}
    for a in "AB":
        for b in "AB":
            ops[a + b] = CollisionOperator(vgrid, species[a], species[b], cfg, trunc, sphere)
    return ops


def _single_node(op, fields, x_cell, j):
    fa, fb = fields
    return truncate_j(np.atleast_2d(fa)[x_cell : x_cell + 1], j), truncate_j(np.atleast_2d(fb)[x_cell : x_cell + 1], j)


def gain_term(f_alpha, f_beta, x_cell: int, v_node: int, op: CollisionOperator, j=np.inf) -> float:
    """Gain ``Q^{j+}`` at one ``(x, v)`` node."""
    a, b = _single_node(op, (f_alpha, f_beta), x_cell, j)
    return float(op.gain(a, b, rows=[v_node])[0, 0])


def loss_term(f_alpha, f_beta, x_cell: int, v_node: int, op: CollisionOperator, j=np.inf) -> float:
    """Loss ``Q^{j-}``: untruncated ``f_alpha`` times the truncated-partner frequency."""
    _, b = _single_node(op, (f_alpha, f_beta), x_cell, j)
    nu = op.frequency(b)[0, v_node]
    return float(np.atleast_2d(f_alpha)[x_cell, v_node] * nu)


def collision_frequency(fields: dict, species: str, ops: dict, j=np.inf) -> np.ndarray:
    """``nu_alpha = sum_beta int B^{alpha beta} f_beta``, shape ``(n_x, n_v)``."""
    total = 0.0
    for other in "AB":
        total = total + ops[species + other].frequency(truncate_j(fields[other], j))
    return total


def collision_terms(fields: dict, ops: dict, j=np.inf) -> dict:
    """Gain and loss arrays for every ordered pair, keyed ``"AB"`` etc."""
    trunc = {s: truncate_j(np.atleast_2d(fields[s]), j) for s in "AB"}
    out = {}
    for key, op in ops.items():
        a, b = key
        gain = op.gain(trunc[a], trunc[b])
        loss = np.atleast_2d(fields[a]) * op.frequency(trunc[b])
        out[key] = (gain, loss)
    return out


def entropy_production(f_alpha, f_beta, op: CollisionOperator, j=np.inf, sgrid=None) -> tuple[float, int]:
    """``I_{alpha beta}``: slab- and velocity-integrated entropy production.

    Returns ``(value, floored_terms)``. Without ``sgrid`` every row of the
    fields is summed with unit weight (a single x-slice is the usual case).
    """
    dens, floors = op.entropy_density(truncate_j(np.atleast_2d(f_alpha), j),
                                      truncate_j(np.atleast_2d(f_beta), j))
    per_x = dens @ op.vgrid.weights
    value = float(sgrid.weights @ per_x) if sgrid is not None else float(per_x.sum())
    return value, floors
