"""Stationary laws of reflected Brownian motion in the quadrant.

The simulation kernel is compiled when the Cython extension is available;
otherwise a pure-Python kernel with the same interface is used.  Set
``SRBM_SIMCORE=python`` to force the fallback.
"""

from __future__ import annotations

import importlib
import os

from .errors import *  # noqa: F401,F403
from .model import QuadrantModel, WedgeModel, boundary_masses, check, to_wedge, validate  # noqa: F401

__version__ = "0.1.0"

BACKENDS = ("cython", "python")


def _load(name: str):
    if name == "cython":
        return importlib.import_module("._simcore", __name__)
    if name == "python":
        return importlib.import_module("._simcore_py", __name__)
    raise ValueError(f"unknown simulation backend {name!r}; expected one of {BACKENDS}")


def _select():
    wanted = os.environ.get("SRBM_SIMCORE")
    if wanted:
        return wanted, _load(wanted)
    try:
        return "cython", _load("cython")
    except ImportError:
        return "python", _load("python")


_BACKEND, _SIMCORE = _select()


def get_simcore(name: str | None = None):
    """The module providing ``euler_block``; the import-time choice by default."""
    if name is None or name == _BACKEND:
        return _SIMCORE
    return _load(name)


def simcore_backend() -> str:
    """The backend chosen at import: ``"cython"`` or ``"python"``."""
    return _BACKEND
