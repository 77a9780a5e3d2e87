"""Pure-Python snippet-extraction kernel (fallback for the compiled twin)."""

from __future__ import annotations

from ..snippets import View, Window, canonicalize, extract_new_snippets
from ..stream_io import EdgeUpdate

_VIEWS = {0: View.ID, 1: View.LABEL, 2: View.ORDER}


class SnippetExtractor:
    """Stateful per-stream extractor; one instance per miner."""

    __slots__ = ("_k_max", "_view", "_window")

    def __init__(self, delta_max: float, k_max: int, view_code: int):
        if k_max < 1:
            raise ValueError(f"k_max must be >= 1, got {k_max}")
        self._k_max = k_max
        self._view = _VIEWS[view_code]
        self._window = Window(delta_max) if k_max > 1 else None

    def push(
        self,
        op: str,
        src: str,
        rel: str,
        dst: str,
        t: float,
        src_label: str | None,
        dst_label: str | None,
    ) -> list[str]:
        """Feed one update; return the canonical keys of the snippet
        occurrences it completes (singleton first), all at time ``t``."""
        u = EdgeUpdate(op, src, rel, dst, t, src_label, dst_label)
        if self._window is None:
            return [canonicalize((u,), self._view)]
        return [
            o.key
            for o in extract_new_snippets(self._window, u, t, self._view, self._k_max)
        ]

    @property
    def window_len(self) -> int:
        return 0 if self._window is None else len(self._window.entries)
