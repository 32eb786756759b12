"""Pure NumPy collision kernels (fallback for the compiled core).

Weights are rebuilt from the public primitives in :mod:`slabkin.collision`
(``chi_cutoff``, ``truncated_kernel``, ``post_collision_velocities``) rather
than from the flat parameter bundle, so this path doubles as an independent
check on the compiled one.
"""
from __future__ import annotations

import numpy as np

_CHUNK_PAIRS = 20000


def _nodes(p):
    g = np.meshgrid(p.axis, p.axis, p.axis, indexing="ij")
    return np.stack([a.ravel() for a in g], axis=1)


def _pairs(rows, row_ptr, cols):
    """Yield ``(local_row, i, k)`` in chunks of at most ``_CHUNK_PAIRS`` pairs."""
    buf_l, buf_i, buf_k, size = [], [], [], 0
    for local, i in enumerate(rows):
        ks = cols[row_ptr[i]:row_ptr[i + 1]]
        if len(ks) == 0:
            continue
        buf_l.append(np.full(len(ks), local))
        buf_i.append(np.full(len(ks), i))
        buf_k.append(ks.astype(np.int64))
        size += len(ks)
        if size >= _CHUNK_PAIRS:
            yield np.concatenate(buf_l), np.concatenate(buf_i), np.concatenate(buf_k)
            buf_l, buf_i, buf_k, size = [], [], [], 0
    if size:
        yield np.concatenate(buf_l), np.concatenate(buf_i), np.concatenate(buf_k)


def _collisions(p, v, vs):
    """Yield ``(W, v', v_*')`` for every half-sphere node."""
    from .collision import (CollisionSample, chi_cutoff, omega_from_angles,
                            post_collision_velocities, truncated_kernel, _unit)

    u = _unit(v - vs)
    for jp, ct in enumerate(p.cos_t):
        for phi in np.arctan2(p.sin_p, p.cos_p):
            omega = omega_from_angles(u, np.full(len(v), ct), np.full(len(v), phi))
            omega /= np.sqrt(np.sum(omega * omega, axis=1, keepdims=True))
            s_plus = CollisionSample(v, vs, omega)
            s_minus = CollisionSample(v, vs, -omega)
            kern = truncated_kernel(s_plus, p.pair, p.cfg, p.trunc) + truncated_kernel(s_minus, p.pair, p.cfg, p.trunc)
            w = chi_cutoff(s_plus, p.pair, p.trunc) * kern * p.w_gauss[jp] * p.w_az * p.w_vstar
            vp, vsp = post_collision_velocities(v, vs, omega, *p.pair)
            yield w, vp, vsp


def _interp(p, f_pad, c):
    """Trilinear interpolation on the zero-ringed grid; zero outside it."""
    n2 = p.n + 2
    y0 = p.axis[0] - p.h
    t = (c - y0) / p.h
    i0 = np.floor(t).astype(np.int64)
    fr = t - i0
    ok = np.all((i0 >= 0) & (i0 <= p.n), axis=1)
    i0 = np.where(ok[:, None], i0, 0)
    out = np.zeros((len(c), f_pad.shape[1]))
    for dx in (0, 1):
        wx = fr[:, 0] if dx else 1.0 - fr[:, 0]
        for dy in (0, 1):
            wy = fr[:, 1] if dy else 1.0 - fr[:, 1]
            for dz in (0, 1):
                wz = fr[:, 2] if dz else 1.0 - fr[:, 2]
                idx = ((i0[:, 0] + dx) * n2 + i0[:, 1] + dy) * n2 + i0[:, 2] + dz
                out += (wx * wy * wz)[:, None] * f_pad[idx]
    out[~ok] = 0.0
    return out


def _real_index(p, i):
    n = p.n
    ix, iy, iz = i // (n * n), (i // n) % n, i % n
    n2 = n + 2
    return ((ix + 1) * n2 + iy + 1) * n2 + iz + 1


def gain_rows(p, fa_pad, fb_pad, rows, row_ptr, cols, out):
    nodes = _nodes(p)
    for loc, i, k in _pairs(rows, row_ptr, cols):
        for w, vp, vsp in _collisions(p, nodes[i], nodes[k]):
            contrib = w[:, None] * _interp(p, fa_pad, vp) * _interp(p, fb_pad, vsp)
            np.add.at(out, loc, contrib)


def loss_weights(p, row_ptr, cols):
    nodes = _nodes(p)
    rows = np.arange(len(row_ptr) - 1)
    vals = np.zeros(len(cols))
    pos = 0
    for _, i, k in _pairs(rows, row_ptr, cols):
        acc = np.zeros(len(i))
        for w, _, _ in _collisions(p, nodes[i], nodes[k]):
            acc += w
        vals[pos:pos + len(i)] = acc
        pos += len(i)
    return vals


def entropy_rows(p, fa_pad, fb_pad, rows, row_ptr, cols, out, floor):
    nodes = _nodes(p)
    floors = 0
    for loc, i, k in _pairs(rows, row_ptr, cols):
        x_pre = fa_pad[_real_index(p, i)] * fb_pad[_real_index(p, k)]
        for w, vp, vsp in _collisions(p, nodes[i], nodes[k]):
            x_post = _interp(p, fa_pad, vp) * _interp(p, fb_pad, vsp)
            lo = np.minimum(x_pre, x_post)
            floors += int(np.count_nonzero((lo < floor) & (np.maximum(x_pre, x_post) > 0) & (w[:, None] > 0)))
            ratio = np.maximum(x_post, floor) / np.maximum(x_pre, floor)
            term = w[:, None] * (x_post - x_pre) * np.log(ratio)
            np.add.at(out, loc, term)
    return floors
