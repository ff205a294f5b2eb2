"""Kernel backend selection: compiled extension when available, NumPy fallback.

The compiled module is optional; ``pip install`` tolerates a missing C
compiler and the package then runs on the pure-NumPy kernel. Selection
happens once at import and can be forced with the environment variable
``L1RANKONE_KERNEL=cy`` / ``L1RANKONE_KERNEL=py`` (default ``auto``).
"""

from __future__ import annotations

import os

from . import _jacobi_py

try:
    from . import _jacobi as _jacobi_cy
except ImportError:  # extension not built
    _jacobi_cy = None


def available_backends() -> tuple[str, ...]:
    return ("cy", "py") if _jacobi_cy is not None else ("py",)


def _select(name: str):
    if name == "py":
        return _jacobi_py, "py"
    if name == "cy":
        if _jacobi_cy is None:
            raise ImportError("compiled kernel requested but not built")
        return _jacobi_cy, "cy"
    if name == "auto":
        return (_jacobi_cy, "cy") if _jacobi_cy is not None else (_jacobi_py, "py")
    raise ValueError(f"unknown kernel backend {name!r}")


_module, _active = _select(os.environ.get("L1RANKONE_KERNEL", "auto"))


def active_backend() -> str:
    """Name of the kernel backend in use: 'cy' or 'py'."""
    return _active


def set_backend(name: str) -> str:
    """Switch backend at runtime (used by tests and the benchmark)."""
    global _module, _active
    _module, _active = _select(name)
    return _active


def cyclic_jacobi(a, v, off_tol, max_sweeps):
    return _module.cyclic_jacobi(a, v, off_tol, max_sweeps)
