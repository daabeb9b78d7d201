"""Kernel backend selection.

The heavy numerics (Si/Ci and pairwise impedance assembly) exist twice with
identical call signatures: a numba-compiled module and a pure numpy/scipy one.
The active module is chosen on first use from the DSASIM_BACKEND environment
variable ("numba", the default, or "numpy") and can be switched
programmatically for tests and benchmarks.
"""

import os
import warnings

from .exceptions import DomainError

_ENV_VAR = "DSASIM_BACKEND"
_active_name: str | None = None
_active_module = None


def set_backend(name: str) -> None:
    """Force a kernel backend. Raises DomainError for unknown names and
    ImportError if numba is requested but cannot be loaded."""
    global _active_name, _active_module
    if name == "numba":
        from . import _kernels_numba as mod
    elif name == "numpy":
        from . import _kernels_numpy as mod
    else:
        raise DomainError(f"unknown kernel backend {name!r}; use 'numba' or 'numpy'")
    _active_name = name
    _active_module = mod


def kernels():
    """The active kernel module, resolving the environment on first call."""
    if _active_module is None:
        requested = os.environ.get(_ENV_VAR, "numba").strip().lower()
        try:
            set_backend(requested)
        except (DomainError, ImportError) as exc:
            if requested == "numpy":
                raise
            warnings.warn(
                f"kernel backend {requested!r} unavailable ({exc}); "
                "falling back to numpy", RuntimeWarning, stacklevel=2)
            set_backend("numpy")
    return _active_module


def backend_name() -> str:
    kernels()
    assert _active_name is not None
    return _active_name
