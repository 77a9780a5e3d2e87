"""Sliding-window extraction and canonicalization of activity snippets.

An activity snippet is an ordered (not necessarily contiguous) sequence of
edge updates whose endpoints form a connected node set, identified under a
view: keep node ids (ID), substitute node labels (LABEL), or substitute
first-appearance positions (ORDER). Each arriving update triggers
extraction of every snippet instance it completes within the duration
window, from size 1 up to ``k_max``.

Canonical key serialization: updates joined with ``|``, each rendered
``(op,a,rel,b)``. This exact string appears in all CSV outputs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import MissingLabelError
from .stream_io import EdgeUpdate

__all__ = [
    "View",
    "Window",
    "SnippetKey",
    "SnippetOccurrence",
    "canonicalize",
    "extract_new_snippets",
]

# Canonical snippet identity; see module docstring for the serialization.
SnippetKey = str


class View(enum.Enum):
    """Node-id mapping applied before canonicalization."""

    ID = "id"
    LABEL = "label"
    ORDER = "order"


@dataclass(frozen=True, slots=True)
class SnippetOccurrence:
    """One extracted snippet instance, stamped with its newest update's time."""

    key: SnippetKey
    t: float


@dataclass(slots=True)
class Window:
    """Time-ordered window of the updates seen in the last ``width`` seconds."""

    width: float
    entries: list[EdgeUpdate] = field(default_factory=list)

    def evict(self, t: float) -> None:
        """Drop entries strictly older than ``width`` relative to ``t``."""
        entries = self.entries
        i = 0
        n = len(entries)
        while i < n and t - entries[i].t > self.width:
            i += 1
        if i:
            del entries[:i]


def _fragment(u: EdgeUpdate, view: View) -> str:
    if view is View.ID:
        return f"({u.op},{u.src},{u.rel},{u.dst})"
    if view is View.LABEL:
        if u.src_label is None or u.dst_label is None:
            raise MissingLabelError(
                f"label view requires node labels, missing on update "
                f"({u.op},{u.src},{u.rel},{u.dst},t={u.t})"
            )
        return f"({u.op},{u.src_label},{u.rel},{u.dst_label})"
    raise ValueError(f"no per-update fragment for view {view}")


def canonicalize(updates: Sequence[EdgeUpdate], view: View) -> SnippetKey:
    """Serialize a time-ordered update sequence under ``view``.

    Under ORDER, node ids become consecutive integers 0,1,2,... in order of
    first appearance (source before destination within an update), so the
    key is invariant to any id renaming that preserves the coincidence
    pattern.
    """
    if not updates:
        raise ValueError("cannot canonicalize an empty update sequence")
    if view is View.ORDER:
        index: dict[str, int] = {}
        parts = []
        for u in updates:
            a = index.setdefault(u.src, len(index))
            b = index.setdefault(u.dst, len(index))
            parts.append(f"({u.op},{a},{u.rel},{b})")
        return "|".join(parts)
    return "|".join(_fragment(u, view) for u in updates)


def extract_new_snippets(
    window: Window,
    u_new: EdgeUpdate,
    t: float,
    view: View,
    k_max: int,
) -> list[SnippetOccurrence]:
    """Extract every snippet instance completed by ``u_new`` at time ``t``.

    Maintains ``window`` in place (evicts stale entries, then appends
    ``u_new``) and returns the singleton snippet plus, for each size
    k = 2..k_max, every time-ordered subset of window entries that contains
    ``u_new`` and whose endpoint set is connected. Connectivity is over the
    undirected multigraph of the subset's endpoint pairs, ignoring op and
    relation. All returned occurrences carry timestamp ``t``.

    Size-k subsets are built by extending connected size-(k-1) subsets, so
    disconnected candidates are pruned early; with ``k_max == 1`` the window
    is not touched at all.
    """
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    singleton = SnippetOccurrence(canonicalize((u_new,), view), t)
    if k_max == 1:
        return [singleton]

    window.evict(t)
    window.entries.append(u_new)
    entries = window.entries
    m = len(entries)
    last = m - 1

    occurrences = [singleton]
    # frontier of connected subsets containing u_new: (sorted index tuple, node set)
    frontier: list[tuple[tuple[int, ...], frozenset[str]]] = [
        ((last,), frozenset((u_new.src, u_new.dst)))
    ]
    seen: set[tuple[int, ...]] = set()
    for _ in range(2, k_max + 1):
        grown: list[tuple[tuple[int, ...], frozenset[str]]] = []
        for idxs, nodes in frontier:
            for j in range(last):
                if j in idxs:
                    continue
                e = entries[j]
                if e.src not in nodes and e.dst not in nodes:
                    continue
                new_idxs = tuple(sorted(idxs + (j,)))
                if new_idxs in seen:
                    continue
                seen.add(new_idxs)
                occurrences.append(
                    SnippetOccurrence(
                        canonicalize([entries[i] for i in new_idxs], view), t
                    )
                )
                grown.append((new_idxs, nodes | {e.src, e.dst}))
        frontier = grown
    return occurrences
