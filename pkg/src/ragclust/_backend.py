"""Kernel backend chosen at import.

The compiled core is used when it imports cleanly; set ``RAG_BACKEND=python``
to force the numpy fallback.
"""
from __future__ import annotations

import importlib
import logging
import os

from . import _fallback

log = logging.getLogger(__name__)


def load(name: str | None = None):
    """Return the kernel module for ``name`` (``"cython"``, ``"python"`` or auto)."""
    name = (name or os.environ.get("RAG_BACKEND", "auto")).lower()
    if name == "python":
        return _fallback
    try:
        return importlib.import_module("ragclust._core")
    except ImportError:
        if name == "cython":
            raise
        log.debug("compiled core unavailable, using numpy fallback")
        return _fallback


kernels = load()
BACKEND = kernels.NAME


def available() -> list[str]:
    names = ["python"]
    try:
        load("cython")
    except ImportError:
        pass
    else:
        names.insert(0, "cython")
    return names
