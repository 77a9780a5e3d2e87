"""Streaming anomaly scoring of <frequency, persistence> points, plus baselines.

Each snippet occurrence yields a 2D point (frequency term, persistence).
Points are scored by a robust random cut forest: when a snippet reoccurs its
previous point is removed first so scores do not decay just because the
snippet was seen before, full trees evict a random point before insertion,
and the score is the collusive displacement averaged over trees. Scores are
graded into levels 0-3 by how many standard deviations they sit above the
running median of all scores so far.

Also here: the frequency-share baseline and the fixed-period-count
heuristic baseline (which provably violates the shift, saturation, and
shrinkage behaviors a persistence measure must have; see the tests for the
constructed counterexamples).
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from ._core import make_forest
from .miner import MiningResult

__all__ = [
    "ForestConfig",
    "AnomalyPoint",
    "AnomalyVerdict",
    "RunningStats",
    "AnomalyScorer",
    "grade",
    "LEVEL_WARMUP",
    "freq_baseline",
    "ds_baseline",
    "DsTracker",
]

# levels are withheld until this many scores have been observed; earlier
# running statistics are too unstable to grade against
LEVEL_WARMUP = 30


@dataclass(frozen=True, slots=True)
class ForestConfig:
    """Random cut forest sizing: 10 trees of up to 256 points by default."""

    tree_count: int = 10
    max_leaves: int = 256
    seed: int = 0

    def __post_init__(self) -> None:
        if self.tree_count < 1:
            raise ValueError(f"tree_count must be >= 1, got {self.tree_count}")
        if self.max_leaves < 2:
            raise ValueError(f"max_leaves must be >= 2, got {self.max_leaves}")


@dataclass(frozen=True, slots=True)
class AnomalyPoint:
    """A snippet occurrence projected to its 2D <frequency, persistence> point."""

    key: str
    t: float
    f: float
    p: float


@dataclass(frozen=True, slots=True)
class AnomalyVerdict:
    score: float
    level: int


class RunningStats:
    """Exact running median (two heaps) and standard deviation (Welford)."""

    __slots__ = ("_low", "_high", "count", "_mean", "_m2")

    def __init__(self) -> None:
        self._low: list[float] = []  # max-heap (negated)
        self._high: list[float] = []  # min-heap
        self.count = 0
        self._mean = 0.0
        self._m2 = 0.0

    def push(self, x: float) -> None:
        if not self._low or x <= -self._low[0]:
            heapq.heappush(self._low, -x)
        else:
            heapq.heappush(self._high, x)
        if len(self._low) > len(self._high) + 1:
            heapq.heappush(self._high, -heapq.heappop(self._low))
        elif len(self._high) > len(self._low):
            heapq.heappush(self._low, -heapq.heappop(self._high))
        self.count += 1
        delta = x - self._mean
        self._mean += delta / self.count
        self._m2 += delta * (x - self._mean)

    @property
    def median(self) -> float:
        if not self.count:
            raise ValueError("no values observed")
        if len(self._low) > len(self._high):
            return -self._low[0]
        return (-self._low[0] + self._high[0]) / 2.0

    @property
    def std(self) -> float:
        """Population standard deviation of all values observed."""
        if not self.count:
            raise ValueError("no values observed")
        return math.sqrt(self._m2 / self.count)


def grade(score: float, median: float, std: float) -> int:
    """Anomaly level of a score against running statistics.

    Level 1, 2, or 3 for scores 1-2, 2-3, or 3+ standard deviations above
    the median; 0 otherwise. With zero variance a score above the median is
    infinitely many deviations out, hence level 3.
    """
    if std <= 0.0:
        return 3 if score > median else 0
    d = (score - median) / std
    if d >= 3.0:
        return 3
    if d >= 2.0:
        return 2
    if d >= 1.0:
        return 1
    return 0


class AnomalyScorer:
    """Scores a time-ordered sequence of occurrence points.

    Deterministic for a fixed :class:`ForestConfig` seed. One live point
    per snippet key is kept in the forest.
    """

    def __init__(self, config: ForestConfig = ForestConfig()):
        self.config = config
        self._forest = make_forest(config.tree_count, config.max_leaves, config.seed)
        self.stats = RunningStats()

    def score_occurrence(self, point: AnomalyPoint) -> AnomalyVerdict:
        score = self._forest.update(point.key, point.f, point.p)
        self.stats.push(score)
        if self.stats.count < LEVEL_WARMUP:
            return AnomalyVerdict(score, 0)
        return AnomalyVerdict(score, grade(score, self.stats.median, self.stats.std))


def freq_baseline(result: MiningResult) -> dict[str, float]:
    """Occurrence share per snippet: ``|O_x| / sum_y |O_y|``; sums to 1."""
    total = sum(s.occ_count for s in result.snippets.values())
    if total == 0:
        return {}
    return {key: s.occ_count / total for key, s in result.snippets.items()}


def ds_baseline(
    occurrences: Iterable[float] | Sequence[float],
    t_s: float,
    t_e: float,
    periods: int = 60,
) -> int:
    """Fixed-period heuristic: how many of ``periods`` equal divisions of
    ``[t_s, t_e]`` contain at least one occurrence.

    Periods are half-open with the last one closed; occurrence times are
    clamped into the interval. Saturates at ``periods`` no matter how many
    occurrences there are.
    """
    if t_e <= t_s:
        raise ValueError(f"need t_e > t_s, got [{t_s}, {t_e}]")
    if periods < 1:
        raise ValueError(f"periods must be >= 1, got {periods}")
    width = (t_e - t_s) / periods
    seen: set[int] = set()
    for t in occurrences:
        idx = int((t - t_s) / width)
        if idx < 0:
            idx = 0
        elif idx >= periods:
            idx = periods - 1
        seen.add(idx)
    return len(seen)


class DsTracker:
    """Streaming per-key period-count state for the heuristic baseline.

    Requires the stream bounds up front (the heuristic's fixed periods
    assume the stream length is known a priori).
    """

    __slots__ = ("t_s", "t_e", "periods", "_width", "_seen")

    def __init__(self, t_s: float, t_e: float, periods: int = 60):
        if t_e <= t_s:
            raise ValueError(f"need t_e > t_s, got [{t_s}, {t_e}]")
        self.t_s = t_s
        self.t_e = t_e
        self.periods = periods
        self._width = (t_e - t_s) / periods
        self._seen: dict[str, set[int]] = {}

    def observe(self, key: str, t: float) -> int:
        """Record an occurrence of ``key`` at ``t``; return its period count."""
        idx = int((t - self.t_s) / self._width)
        if idx < 0:
            idx = 0
        elif idx >= self.periods:
            idx = self.periods - 1
        s = self._seen.get(key)
        if s is None:
            s = self._seen[key] = set()
        s.add(idx)
        return len(s)
