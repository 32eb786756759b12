"""Velocity and slab discretizations, wall Maxwellians and moment quadratures.

Fields are stored as arrays of shape ``(n_x, n_v)``: one row per slab node,
one column per velocity node (C-ordered ``(ix, iy, iz)`` flattening of the
tensor grid).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class VelocityGrid:
    """Uniform midpoint tensor grid on ``[-vmax, vmax]^3``.

    An even node count per axis keeps every node off the ``xi = 0`` plane and
    makes the grid symmetric under ``xi -> -xi`` and ``v -> -v``.
    """

    n: int
    vmax: float
    axis: np.ndarray = field(init=False, repr=False)
    h: float = field(init=False)
    nodes: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 2 or self.n % 2:
            raise ValueError(f"velocity nodes per axis must be even and >= 2, got {self.n}")
        if not self.vmax > 0:
            raise ValueError(f"vmax must be positive, got {self.vmax}")
        h = 2.0 * self.vmax / self.n
        axis = -self.vmax + (np.arange(self.n) + 0.5) * h
        # exact mirror symmetry, independent of rounding in the arange path
        axis = 0.5 * (axis - axis[::-1])
        gx, gy, gz = np.meshgrid(axis, axis, axis, indexing="ij")
        nodes = np.stack([gx.ravel(), gy.ravel(), gz.ravel()], axis=1)
        object.__setattr__(self, "axis", axis)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", np.full(len(nodes), h**3))

    @property
    def size(self) -> int:
        return self.n**3

    @property
    def xi(self) -> np.ndarray:
        return self.nodes[:, 0]

    @property
    def speed2(self) -> np.ndarray:
        return np.einsum("ij,ij->i", self.nodes, self.nodes)

    @property
    def xi_min(self) -> float:
        return float(np.min(np.abs(self.axis)))

    def mirror_index(self) -> np.ndarray:
        """Index of the node with ``xi`` negated (same ``eta``, ``zeta``)."""
        idx = np.arange(self.size).reshape(self.n, self.n, self.n)
        return idx[::-1, :, :].ravel()

    @classmethod
    def for_walls(cls, n: int, t_minus: float, t_plus: float, vmax: float | None = None):
        if vmax is None:
            vmax = 6.0 * np.sqrt(max(t_minus, t_plus))
        return cls(n, float(vmax))


@dataclass(frozen=True)
class SlabGrid:
    """Uniform nodes ``x_0 = -1 < ... < x_N = 1`` with trapezoid weights."""

    cells: int = 64
    x: np.ndarray = field(init=False, repr=False)
    widths: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.cells < 1:
            raise ValueError(f"slab cells must be >= 1, got {self.cells}")
        x = np.linspace(-1.0, 1.0, self.cells + 1)
        x[0], x[-1] = -1.0, 1.0
        widths = np.diff(x)
        w = np.zeros_like(x)
        w[:-1] += 0.5 * widths
        w[1:] += 0.5 * widths
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "widths", widths)
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return self.cells + 1

    @property
    def dx(self) -> float:
        return 2.0 / self.cells


def maxwellian(T, v):
    """Flux-normalized wall Maxwellian ``exp(-|v|^2 / 2T) / (2 pi T^2)``.

    ``v`` may be a single 3-vector or an ``(n, 3)`` array.
    """
    if not np.all(np.asarray(T) > 0):
        raise ValueError(f"wall temperature must be positive, got {T}")
    v = np.asarray(v, dtype=float)
    s2 = np.sum(v * v, axis=-1)
    return np.exp(-s2 / (2.0 * T)) / (2.0 * np.pi * T * T)


def species_maxwellian(v, mass: float, T: float, density: float = 1.0, drift=(0.0, 0.0, 0.0)):
    """Mass-weighted Maxwellian ``n (m / 2 pi T)^{3/2} exp(-m |v - u|^2 / 2T)``."""
    v = np.asarray(v, dtype=float) - np.asarray(drift, dtype=float)
    s2 = np.sum(v * v, axis=-1)
    return density * (mass / (2.0 * np.pi * T)) ** 1.5 * np.exp(-mass * s2 / (2.0 * T))


def beta_weight(v, beta: float, mu: float):
    """``min(mu, (1 + |v|)^beta)`` for a 3-vector or an ``(n, 3)`` array."""
    if mu < 1:
        raise ValueError(f"mu must be >= 1, got {mu}")
    if not -3 < beta < 2:
        raise ValueError(f"beta must lie in (-3, 2), got {beta}")
    speed = np.sqrt(np.sum(np.asarray(v, dtype=float) ** 2, axis=-1))
    return np.minimum(mu, (1.0 + speed) ** beta)


def weighted_mass(f: np.ndarray, vgrid: VelocityGrid, sgrid: SlabGrid, beta: float, mu: float) -> float:
    """Slab-integrated beta-weighted mass of a single-species field."""
    w = beta_weight(vgrid.nodes, beta, mu) * vgrid.weights
    return float(sgrid.weights @ (np.asarray(f) @ w))


def half_space_flux(slice_v: np.ndarray, vgrid: VelocityGrid, side: int) -> float:
    """Outgoing mass flux through a wall.

    ``side=-1`` is the wall at ``x=-1`` (outgoing half-space ``xi < 0``),
    ``side=+1`` the wall at ``x=1`` (outgoing ``xi > 0``).
    """
    if side not in (-1, 1):
        raise ValueError("side must be -1 or +1")
    xi = vgrid.xi
    mask = (xi * side) > 0
    return float(np.sum(np.abs(xi[mask]) * slice_v[..., mask] * vgrid.weights[mask], axis=-1))


def incoming_mask(vgrid: VelocityGrid, side: int) -> np.ndarray:
    """Velocity nodes entering the slab through the wall at ``x = side``."""
    return (vgrid.xi * side) < 0


@dataclass(frozen=True)
class WallModel:
    t_minus: float
    t_plus: float
    m_minus: np.ndarray = field(repr=False)
    m_plus: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, t_minus: float, t_plus: float, vgrid: VelocityGrid) -> "WallModel":
        if not (t_minus > 0 and t_plus > 0):
            raise ValueError("wall temperatures must be positive")
        return cls(t_minus, t_plus, maxwellian(t_minus, vgrid.nodes), maxwellian(t_plus, vgrid.nodes))

    def maxwellian_at(self, side: int) -> np.ndarray:
        return self.m_minus if side == -1 else self.m_plus

    def temperature_at(self, side: int) -> float:
        return self.t_minus if side == -1 else self.t_plus


@dataclass
class DistributionField:
    """Two-species field on the slab x velocity grid."""

    A: np.ndarray
    B: np.ndarray
    normalized: bool = False

    def weighted_masses(self, vgrid, sgrid, beta, mu) -> tuple[float, float]:
        return (weighted_mass(self.A, vgrid, sgrid, beta, mu),
                weighted_mass(self.B, vgrid, sgrid, beta, mu))

    def copy(self) -> "DistributionField":
        return DistributionField(self.A.copy(), self.B.copy(), self.normalized)
