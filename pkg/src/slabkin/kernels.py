"""Collision-kernel backend selection.

The compiled core ``slabkin._kernels`` is used when it imports; otherwise,
or when ``SLABKIN_PURE_PYTHON=1``, the NumPy fallback in
``slabkin._kernels_py`` is used. ``SLABKIN_THREADS`` caps the OpenMP thread
count of the compiled core (0 or unset means the runtime default).
Results do not depend on the thread count.
"""
from __future__ import annotations

import os

from . import _kernels_py


def _want_pure() -> bool:
    return os.environ.get("SLABKIN_PURE_PYTHON", "").strip().lower() in ("1", "true", "yes")


def _threads() -> int:
    raw = os.environ.get("SLABKIN_THREADS", "").strip()
    if not raw:
        return 0
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"SLABKIN_THREADS must be an integer, got {raw!r}") from None
    return max(n, 0)


_compiled = None
if not _want_pure():
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"


def compiled_available() -> bool:
    try:
        from . import _kernels  # noqa: F401
    except ImportError:
        return False
    return True


def get_backend(name: str | None = None):
    """Module implementing the kernels: ``"compiled"``, ``"python"`` or the active one."""
    name = name or BACKEND
    if name == "python":
        return _kernels_py
    if name == "compiled":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown kernel backend {name!r}")


def gain_rows(p, fa_pad, fb_pad, rows, row_ptr, cols, out, backend: str | None = None):
    mod = get_backend(backend)
    if mod is _kernels_py:
        return mod.gain_rows(p, fa_pad, fb_pad, rows, row_ptr, cols, out)
    return mod.gain_rows(p, fa_pad, fb_pad, rows, row_ptr, cols, out, _threads())


def loss_weights(p, row_ptr, cols, backend: str | None = None):
    mod = get_backend(backend)
    if mod is _kernels_py:
        return mod.loss_weights(p, row_ptr, cols)
    return mod.loss_weights(p, row_ptr, cols, _threads())


def entropy_rows(p, fa_pad, fb_pad, rows, row_ptr, cols, out, floor, backend: str | None = None):
    mod = get_backend(backend)
    if mod is _kernels_py:
        return mod.entropy_rows(p, fa_pad, fb_pad, rows, row_ptr, cols, out, floor)
    return mod.entropy_rows(p, fa_pad, fb_pad, rows, row_ptr, cols, out, floor, _threads())
