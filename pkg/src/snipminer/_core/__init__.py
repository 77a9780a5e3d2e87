"""Hot-kernel selection: compiled Cython extensions with pure-Python twins.

The compiled and pure implementations are interchangeable (same interfaces,
same randomness consumption); which one is active is decided once at import
time. Set SNIPMINER_BACKEND=python to force the fallback, or =compiled to
fail loudly when the extensions are missing.
"""

from __future__ import annotations

import os
import sys
from contextlib import contextmanager

from ..snippets import View

__all__ = [
    "BACKEND",
    "SnippetExtractor",
    "CutForest",
    "make_extractor",
    "make_forest",
    "use_backend",
    "available_backends",
]

_VIEW_CODES = {View.ID: 0, View.LABEL: 1, View.ORDER: 2}

_choice = os.environ.get("SNIPMINER_BACKEND", "auto").strip().lower() or "auto"
if _choice not in ("auto", "compiled", "c", "python", "py"):
    raise ValueError(
        f"SNIPMINER_BACKEND must be one of auto/compiled/python, got {_choice!r}"
    )

BACKEND = "python"
if _choice in ("auto", "compiled", "c"):
    try:
        from ._extract import SnippetExtractor  # type: ignore[attr-defined]
        from ._rcf import CutForest  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        if _choice != "auto":
            raise ImportError(
                "SNIPMINER_BACKEND=compiled but the compiled kernels are not "
                "built; reinstall the package or use SNIPMINER_BACKEND=python"
            ) from None

if BACKEND == "python":
    from .py_extract import SnippetExtractor
    from .py_rcf import CutForest


def make_extractor(delta_max: float | None, k_max: int, view: View):
    """Extraction kernel for the active backend; ``delta_max`` is unused
    when ``k_max == 1``."""
    cls = SnippetExtractor
    limit = getattr(sys.modules.get(cls.__module__), "K_MAX_LIMIT", None)
    if limit is not None and k_max > limit:
        from .py_extract import SnippetExtractor as cls
    return cls(float(delta_max or 0.0), k_max, _VIEW_CODES[view])


def make_forest(tree_count: int, capacity: int, seed: int):
    """Cut forest for the active backend."""
    return CutForest(tree_count, capacity, seed)


def _twin(name: str):
    if name in ("python", "py"):
        from . import py_extract, py_rcf

        return py_extract.SnippetExtractor, py_rcf.CutForest
    if name in ("compiled", "c"):
        from . import _extract, _rcf  # type: ignore[attr-defined]

        return _extract.SnippetExtractor, _rcf.CutForest
    raise ValueError(f"unknown backend {name!r}")


def available_backends() -> list[str]:
    names = ["python"]
    try:
        _twin("compiled")
    except ImportError:
        pass
    else:
        names.append("compiled")
    return names


@contextmanager
def use_backend(name: str):
    """Temporarily route kernel construction to a specific backend.

    Single-threaded use only; meant for benchmarks and parity tests.
    """
    global SnippetExtractor, CutForest
    previous = (SnippetExtractor, CutForest)
    SnippetExtractor, CutForest = _twin(name)
    try:
        yield
    finally:
        SnippetExtractor, CutForest = previous
