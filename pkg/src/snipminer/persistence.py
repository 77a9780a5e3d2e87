"""The persistence measure and its components.

Persistence of an event over a measurement interval is the product of three
weighted components: the fraction of the interval covered by the event's
occurrences (width), the log of its occurrence count (frequency), and an
entropy-based regularity score of the gaps between its unique occurrence
times (spread). Batch evaluation works on a full occurrence log; streaming
evaluation maintains the same value exactly from constant per-event state,
using a closed-form incremental entropy update.

Conventions: gap entropy uses log base 2, frequency uses log base 10, and
the "+1" terms in the width component are one second, so timestamps must be
expressed in seconds for results to be comparable across streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import IntervalError, OutOfOrderError

__all__ = [
    "PersistenceParams",
    "SnippetRecord",
    "width",
    "frequency",
    "gap_entropy",
    "spread",
    "persistence",
    "record_occurrence",
    "query_persistence",
]

# Tiny negative entropies from floating-point cancellation in the
# incremental update are clamped; anything below this is a real bug.
_ENTROPY_CLAMP = -1e-12

_LOG2_10 = math.log2(10.0)


@dataclass(frozen=True, slots=True)
class PersistenceParams:
    """Exponents weighting the width, frequency, and spread components."""

    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not (0.0 < v < math.inf):
                raise ValueError(f"{name} must be a positive finite real, got {v!r}")


def width(
    t_f: float | None, t_l: float | None, t_s: float, t_e: float
) -> float:
    """Fraction of the measurement interval covered by the occurrences.

    ``(t_l - t_f + 1) / (t_e - t_s + 1)``; defined as 0 when the event has
    no occurrences (``t_f is None``).
    """
    if t_f is None or t_l is None:
        return 0.0
    if not (t_s <= t_f <= t_l <= t_e):
        raise IntervalError(
            f"need t_s <= t_f <= t_l <= t_e, got t_s={t_s}, t_f={t_f}, t_l={t_l}, t_e={t_e}"
        )
    return (t_l - t_f + 1.0) / (t_e - t_s + 1.0)


def frequency(occ_count: int) -> float:
    """log10(occ_count + 1); the frequency component."""
    if occ_count < 0:
        raise ValueError(f"occurrence count must be >= 0, got {occ_count}")
    return math.log10(occ_count + 1.0)


def gap_entropy(gaps: Sequence[float] | np.ndarray) -> float:
    """Shannon entropy (bits) of the pmf obtained by normalizing the gaps.

    Zero gaps contribute nothing (0*log 0 = 0); an empty or all-zero gap
    sequence has entropy 0.
    """
    g = np.asarray(gaps, dtype=np.float64)
    if g.size == 0:
        return 0.0
    if np.any(g < 0.0):
        raise ValueError("gaps must be non-negative")
    z = float(g.sum())
    if z <= 0.0:
        return 0.0
    p = g[g > 0.0] / z
    return float(-(p * np.log2(p)).sum())


def spread(gaps: Sequence[float] | np.ndarray) -> float:
    """Entropy of the gaps normalized by its maximum, plus one; in [1, 2].

    With 0 or 1 gaps the entropy carries no information and the spread is
    defined as 1.
    """
    g = np.asarray(gaps, dtype=np.float64)
    if g.size <= 1:
        return 1.0
    return gap_entropy(g) / math.log2(g.size) + 1.0


def _combine(w: float, f: float, s: float, params: PersistenceParams) -> float:
    if not (0.0 < w <= 1.0 + 1e-12):
        raise AssertionError(f"width component out of (0,1]: {w}")
    if not (1.0 <= s <= 2.0 + 1e-9):
        raise AssertionError(f"spread component out of [1,2]: {s}")
    return w**params.alpha * f**params.beta * s**params.gamma


def persistence(
    occurrences: Sequence[float] | np.ndarray,
    t_s: float,
    t_e: float,
    params: PersistenceParams = PersistenceParams(),
) -> float:
    """Batch persistence of an occurrence log over ``[t_s, t_e]``.

    ``occurrences`` is a non-decreasing multiset of timestamps, all inside
    the measurement interval. Gaps are taken between consecutive *unique*
    timestamps, so repeated occurrences at one time raise the frequency
    component but not the gap count. Returns 0 iff the log is empty.
    """
    ts = np.asarray(occurrences, dtype=np.float64)
    if ts.size == 0:
        return 0.0
    d = np.diff(ts)
    if d.size and float(d.min()) < 0.0:
        raise ValueError("occurrence log must be in non-decreasing order")
    t_f = float(ts[0])
    t_l = float(ts[-1])
    if t_f < t_s or t_l > t_e:
        raise IntervalError(
            f"occurrences [{t_f}, {t_l}] fall outside the interval [{t_s}, {t_e}]"
        )
    gaps = d[d > 0.0]
    n_gaps = gaps.size
    if n_gaps <= 1:
        s = 1.0
    else:
        s = gap_entropy(gaps) / math.log2(n_gaps) + 1.0
    w = (t_l - t_f + 1.0) / (t_e - t_s + 1.0)
    f = math.log10(ts.size + 1.0)
    return _combine(w, f, s, params)


@dataclass(slots=True)
class SnippetRecord:
    """Constant-size streaming state for one snippet.

    Everything needed to maintain persistence online: occurrence and gap
    counts, first/last occurrence times, the running gap entropy (bits),
    and its normalizer ``t_last - t_first``.
    """

    occ_count: int
    gap_count: int
    t_first: float
    t_last: float
    entropy: float
    normalizer: float
    last_persistence: float

    @classmethod
    def first(cls, t: float) -> "SnippetRecord":
        """State after the very first occurrence at time ``t``."""
        return cls(1, 0, t, t, 0.0, 0.0, 0.0)


def _entropy_after_gap(h: float, z: float, g: float) -> float:
    """Entropy of the gap pmf after appending gap ``g`` (closed form).

    ``h`` and ``z`` are the previous entropy and normalizing constant; the
    update is exact, so the result matches a batch recomputation up to
    floating-point noise.
    """
    z2 = z + g
    h2 = (
        h
        + (z / z2) * math.log2(z2)
        - math.log2(z)
        - (g / z2) * math.log2(g / z2)
        + (1.0 / z - 1.0 / z2) * (math.log2(z) - h) * z
    )
    if _ENTROPY_CLAMP < h2 < 0.0:
        h2 = 0.0
    return h2


def _record_terms(rec: SnippetRecord, t: float, t_start: float) -> tuple[float, float, float]:
    w = (rec.t_last - rec.t_first + 1.0) / (t - t_start + 1.0)
    f = math.log10(rec.occ_count + 1.0)
    if rec.gap_count <= 1:
        s = 1.0
    else:
        s = rec.entropy / math.log2(rec.gap_count) + 1.0
    return w, f, s


def record_occurrence(
    rec: SnippetRecord,
    t: float,
    t_start: float,
    params: PersistenceParams = PersistenceParams(),
) -> float:
    """Fold a new occurrence at time ``t`` into ``rec`` and return persistence.

    A repeat of the current last timestamp only raises the occurrence count
    (gaps exist between unique occurrences); a later timestamp appends the
    gap ``t - t_last`` and updates the entropy incrementally. The returned
    value is the persistence over ``[t_start, t]``, also stored on the
    record.
    """
    if t < rec.t_last:
        raise OutOfOrderError(
            f"occurrence at t={t} precedes the record's last occurrence at t={rec.t_last}"
        )
    if t == rec.t_last:
        rec.occ_count += 1
    else:
        g = t - rec.t_last
        if rec.gap_count == 0:
            rec.entropy = 0.0
        else:
            rec.entropy = _entropy_after_gap(rec.entropy, rec.normalizer, g)
        rec.normalizer += g
        rec.gap_count += 1
        rec.occ_count += 1
        rec.t_last = t
    w, f, s = _record_terms(rec, t, t_start)
    p = _combine(w, f, s, params)
    rec.last_persistence = p
    return p


def query_persistence(
    rec: SnippetRecord,
    t: float,
    t_start: float,
    params: PersistenceParams = PersistenceParams(),
) -> float:
    """Persistence over ``[t_start, t]`` without a new occurrence.

    Only the width denominator moves with ``t``; frequency and spread are
    those stored on the record. Historical queries (``t < t_last``) are
    rejected.
    """
    if t < rec.t_last:
        raise OutOfOrderError(
            f"query at t={t} precedes the record's last occurrence at t={rec.t_last}"
        )
    w, f, s = _record_terms(rec, t, t_start)
    return _combine(w, f, s, params)
