"""Drive a stream through snippet extraction and persistence accounting.

Two variants: the offline miner stores each snippet's full occurrence log
and evaluates persistence over ``[START(S), END(S)]`` once the stream ends;
the streaming miner keeps constant-size per-snippet records and maintains
``P(x; [START(S), t])`` exactly as each occurrence arrives, so results are
available in real time and any snippet can be queried between occurrences.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

from ._core import make_extractor
from .errors import OutOfOrderError
from .persistence import (
    PersistenceParams,
    SnippetRecord,
    persistence,
    query_persistence,
    record_occurrence,
)
from .snippets import View
from .stream_io import EdgeUpdate

__all__ = [
    "Variant",
    "MinerConfig",
    "SnippetStats",
    "MiningResult",
    "mine_offline",
    "mine_streaming",
    "StreamingMiner",
]

# sink(t, key, frequency_term, persistence) called once per occurrence
OccurrenceSink = Callable[[float, str, float, float], None]


class Variant(enum.Enum):
    OFFLINE = "offline"
    STREAMING = "streaming"


@dataclass(frozen=True, slots=True)
class MinerConfig:
    """Extraction and measurement parameters for one mining run.

    ``delta_max`` is ignored when ``k_max == 1`` (a single-update snippet
    always has duration 0) and required positive otherwise.
    """

    k_max: int = 1
    delta_max: float | None = None
    view: View = View.ID
    params: PersistenceParams = PersistenceParams()
    variant: Variant = Variant.OFFLINE

    def __post_init__(self) -> None:
        if self.k_max < 1:
            raise ValueError(f"k_max must be >= 1, got {self.k_max}")
        if self.k_max > 1 and not (self.delta_max and self.delta_max > 0):
            raise ValueError("delta_max must be > 0 when k_max > 1")


@dataclass(frozen=True, slots=True)
class SnippetStats:
    occ_count: int
    persistence: float
    t_first: float
    t_last: float


@dataclass(slots=True)
class MiningResult:
    """Per-snippet statistics over a fully processed stream."""

    snippets: dict[str, SnippetStats] = field(default_factory=dict)
    start_time: float | None = None
    end_time: float | None = None
    update_count: int = 0

    def __len__(self) -> int:
        return len(self.snippets)


def mine_offline(stream: Iterable[EdgeUpdate], config: MinerConfig) -> MiningResult:
    """Mine a bounded stream, scoring every snippet at end of stream.

    Each snippet's persistence is computed from its complete occurrence log
    over ``[START(S), END(S)]``. An empty stream yields an empty result.
    """
    if config.variant is not Variant.OFFLINE:
        raise ValueError("mine_offline requires config.variant = OFFLINE")
    extractor = make_extractor(config.delta_max, config.k_max, config.view)
    logs: dict[str, list[float]] = {}
    t_start: float | None = None
    t_end: float | None = None
    count = 0
    prev_t = -math.inf
    for u in stream:
        t = u.t
        if t < prev_t:
            raise OutOfOrderError(f"out-of-order stream: t={t} after t={prev_t}")
        prev_t = t
        if t_start is None:
            t_start = t
        t_end = t
        count += 1
        for key in extractor.push(u.op, u.src, u.rel, u.dst, t, u.src_label, u.dst_label):
            log = logs.get(key)
            if log is None:
                logs[key] = [t]
            else:
                log.append(t)
    result = MiningResult(start_time=t_start, end_time=t_end, update_count=count)
    if t_start is None:
        return result
    for key, log in logs.items():
        p = persistence(log, t_start, t_end, config.params)
        result.snippets[key] = SnippetStats(len(log), p, log[0], log[-1])
    return result


class StreamingMiner:
    """Incremental miner: constant per-snippet memory, queryable at any time.

    Feed updates with :meth:`process` (or drain an iterable with
    :meth:`run`); each extracted occurrence updates its snippet's record and
    is reported to the sink as ``(t, key, frequency_term, persistence)``.
    """

    def __init__(self, config: MinerConfig):
        if config.variant is not Variant.STREAMING:
            raise ValueError("StreamingMiner requires config.variant = STREAMING")
        self.config = config
        self.records: dict[str, SnippetRecord] = {}
        self.start_time: float | None = None
        self.last_time: float | None = None
        self.update_count = 0
        self._extractor = make_extractor(config.delta_max, config.k_max, config.view)

    def process(
        self, u: EdgeUpdate, sink: OccurrenceSink | None = None
    ) -> list[tuple[str, float, float]]:
        """Consume one update; return its occurrences as (key, F, P) tuples.

        The singleton snippet of ``u`` is always first. Out-of-order input
        raises without mutating miner state.
        """
        t = u.t
        if self.last_time is not None and t < self.last_time:
            raise OutOfOrderError(
                f"out-of-order stream: t={t} after t={self.last_time}"
            )
        if self.start_time is None:
            self.start_time = t
        self.last_time = t
        self.update_count += 1
        t_start = self.start_time
        params = self.config.params
        records = self.records
        out = []
        for key in self._extractor.push(
            u.op, u.src, u.rel, u.dst, t, u.src_label, u.dst_label
        ):
            rec = records.get(key)
            if rec is None:
                rec = SnippetRecord.first(t)
                records[key] = rec
                p = query_persistence(rec, t, t_start, params)
                rec.last_persistence = p
            else:
                p = record_occurrence(rec, t, t_start, params)
            f = math.log10(rec.occ_count + 1.0)
            if sink is not None:
                sink(t, key, f, p)
            out.append((key, f, p))
        return out

    def run(self, stream: Iterable[EdgeUpdate], sink: OccurrenceSink | None = None) -> None:
        for u in stream:
            self.process(u, sink)

    def query(self, key: str, t: float | None = None) -> float | None:
        """Persistence of ``key`` at time ``t`` (default: last processed), or
        None if the snippet has never occurred."""
        rec = self.records.get(key)
        if rec is None:
            return None
        if t is None:
            t = self.last_time
        assert self.start_time is not None and t is not None
        return query_persistence(rec, t, self.start_time, self.config.params)

    def result(self, at: float | None = None) -> MiningResult:
        """Point-in-time snapshot of every snippet, scored at time ``at``
        (default: the last processed timestamp)."""
        t = self.last_time if at is None else at
        result = MiningResult(
            start_time=self.start_time,
            end_time=self.last_time,
            update_count=self.update_count,
        )
        if t is None or self.start_time is None:
            return result
        params = self.config.params
        for key, rec in self.records.items():
            p = query_persistence(rec, t, self.start_time, params)
            result.snippets[key] = SnippetStats(
                rec.occ_count, p, rec.t_first, rec.t_last
            )
        return result

    @property
    def window_occupancy(self) -> int:
        """Number of updates currently held in the extraction window."""
        return self._extractor.window_len


def mine_streaming(
    stream: Iterable[EdgeUpdate], config: MinerConfig, sink: OccurrenceSink
) -> None:
    """Stream ``stream`` through a :class:`StreamingMiner`, reporting every
    occurrence to ``sink`` in stream order."""
    StreamingMiner(config).run(stream, sink)
