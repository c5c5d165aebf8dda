"""Kernel backend selection.

The compiled extension ``coprime_doa._core`` is used when it imports; the
numpy implementation in ``coprime_doa._pure`` is the fallback.  Setting the
environment variable ``COPRIME_DOA_PURE=1`` forces the fallback.
"""

import importlib
import os

from . import _pure

__all__ = ["BACKEND", "get_backend", "available_backends",
           "project_lifts", "grid_argmin", "music_spectrum"]


def _load_compiled():
    try:
        return importlib.import_module("coprime_doa._core")
    except ImportError:
        return None


_compiled = _load_compiled()


def available_backends():
    """Names of the backends importable in this environment."""
    return ["compiled", "pure"] if _compiled is not None else ["pure"]


def get_backend(name=None):
    """Return the kernel module for ``name`` ("compiled" or "pure").

    With ``name=None`` the active backend is returned.
    """
    if name is None:
        name = BACKEND
    if name == "pure":
        return _pure
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernels are not built; "
                              "run `pip install -e . --no-build-isolation`")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


if os.environ.get("COPRIME_DOA_PURE") or _compiled is None:
    BACKEND = "pure"
else:
    BACKEND = "compiled"

_active = get_backend(BACKEND)
project_lifts = _active.project_lifts
grid_argmin = _active.grid_argmin
music_spectrum = _active.music_spectrum
