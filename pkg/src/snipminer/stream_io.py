"""Parse, validate, emit, and synthesize time-ordered edge-update streams.

The on-disk format is line-oriented CSV, one update per line::

    t,op,src,rel,dst[,src_label,dst_label]

where ``t`` is a decimal number of seconds and ``op`` is literally ``+``
(insertion) or ``-`` (deletion). Trailing optional fields may be omitted.
Lines starting with ``#`` are comments. Streams must be non-decreasing in
time; readers reject out-of-order input rather than repairing it.
"""

from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Sequence, Union

import numpy as np

from .errors import OutOfOrderError, StreamFormatError

__all__ = [
    "EdgeUpdate",
    "StreamMeta",
    "StreamReader",
    "parse_stream",
    "emit_stream",
    "generate_synthetic",
]

_OPS = ("+", "-")


@dataclass(frozen=True, slots=True)
class EdgeUpdate:
    """One timestamped insertion (+) or deletion (-) of a typed edge.

    ``rel`` may be empty (single-relation networks); node labels are
    optional and only required by the label view.
    """

    op: str
    src: str
    rel: str
    dst: str
    t: float
    src_label: str | None = None
    dst_label: str | None = None

    def __post_init__(self) -> None:
        if self.op not in _OPS:
            raise ValueError(f"op must be '+' or '-', got {self.op!r}")
        if self.t < 0:
            raise ValueError(f"timestamp must be non-negative, got {self.t!r}")


@dataclass(slots=True)
class StreamMeta:
    """Running start/end timestamps and update count of a stream."""

    start_time: float | None = None
    end_time: float | None = None
    count: int = 0

    def observe(self, t: float) -> None:
        if self.start_time is None:
            self.start_time = t
        self.end_time = t
        self.count += 1


Source = Union[bytes, bytearray, str, os.PathLike, IO[bytes]]


def _open_source(source: Source) -> IO[bytes]:
    if isinstance(source, (bytes, bytearray)):
        return io.BytesIO(bytes(source))
    if isinstance(source, (str, os.PathLike)):
        return open(source, "rb")
    return source


class StreamReader:
    """Lazy iterator over the updates of a CSV source.

    Exposes incremental :class:`StreamMeta` via ``.meta`` while iterating.
    Raises :class:`StreamFormatError` on malformed lines and
    :class:`OutOfOrderError` when timestamps decrease.
    """

    def __init__(self, source: Source):
        self._fh = _open_source(source)
        self.meta = StreamMeta()

    def __iter__(self) -> Iterator[EdgeUpdate]:
        prev_t = -math.inf
        for lineno, raw in enumerate(self._fh, start=1):
            line = raw.decode("utf-8").strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split(",")
            if not 5 <= len(fields) <= 7:
                raise StreamFormatError(
                    f"line {lineno}: expected 5-7 comma-separated fields, got {len(fields)}"
                )
            try:
                t = float(fields[0])
            except ValueError:
                raise StreamFormatError(
                    f"line {lineno}: field 't' is not a number: {fields[0]!r}"
                ) from None
            if not math.isfinite(t) or t < 0:
                raise StreamFormatError(
                    f"line {lineno}: field 't' must be a finite non-negative number, got {fields[0]!r}"
                )
            op = fields[1]
            if op not in _OPS:
                raise StreamFormatError(
                    f"line {lineno}: field 'op' must be '+' or '-', got {op!r}"
                )
            if t < prev_t:
                raise OutOfOrderError(
                    f"out-of-order stream: line {lineno} has t={t!r} after t={prev_t!r}"
                )
            prev_t = t
            # absent or empty label fields mean "no label"
            src_label = (fields[5] or None) if len(fields) > 5 else None
            dst_label = (fields[6] or None) if len(fields) > 6 else None
            self.meta.observe(t)
            yield EdgeUpdate(op, fields[2], fields[3], fields[4], t, src_label, dst_label)


def parse_stream(source: Source) -> StreamReader:
    """Return a lazy reader over ``source`` (bytes, path, or binary file)."""
    return StreamReader(source)


def _format_float(t: float) -> str:
    # repr() round-trips; render integral timestamps without the trailing ".0"
    # to keep files compact and diff-friendly.
    if t == int(t) and abs(t) < 1e16:
        return str(int(t))
    return repr(t)


def emit_stream(updates: Iterable[EdgeUpdate], sink: IO[bytes] | str | os.PathLike) -> None:
    """Write ``updates`` to ``sink`` in the CSV format read by :func:`parse_stream`.

    ``parse(emit(stream))`` round-trips to an equal update sequence.
    """
    own = isinstance(sink, (str, os.PathLike))
    fh: IO[bytes] = open(sink, "wb") if own else sink  # type: ignore[assignment]
    try:
        for u in updates:
            parts = [_format_float(u.t), u.op, u.src, u.rel, u.dst]
            if u.src_label is not None or u.dst_label is not None:
                parts.append(u.src_label or "")
                parts.append(u.dst_label or "")
            fh.write((",".join(parts) + "\n").encode("utf-8"))
    finally:
        if own:
            fh.close()


def generate_synthetic(
    n: int, rate: float, node_count: int, seed: int
) -> list[EdgeUpdate]:
    """Synthesize ``n`` insertions with exponential inter-arrival gaps.

    The first update is at t=0 and subsequent gaps have mean ``1/rate``;
    endpoints are drawn uniformly over ``node_count`` nodes with
    ``src != dst``. Deterministic for a given ``seed``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if rate <= 0:
        raise ValueError("rate must be > 0")
    if node_count < 2:
        raise ValueError("node_count must be >= 2")
    rng = np.random.default_rng(seed)
    gaps = rng.exponential(1.0 / rate, size=n - 1)
    times = np.concatenate(([0.0], np.cumsum(gaps)))
    src = rng.integers(0, node_count, size=n)
    # resample dst where it collides with src so endpoints are distinct
    dst = rng.integers(0, node_count, size=n)
    collide = dst == src
    while collide.any():
        dst[collide] = rng.integers(0, node_count, size=int(collide.sum()))
        collide = dst == src
    names = [f"n{i}" for i in range(node_count)]
    return [
        EdgeUpdate("+", names[int(s)], "", names[int(d)], float(t))
        for s, d, t in zip(src, dst, times)
    ]


def stream_span(updates: Sequence[EdgeUpdate]) -> tuple[float, float]:
    """Start and end timestamps of a non-empty in-memory stream."""
    if not updates:
        raise ValueError("stream is empty")
    return updates[0].t, updates[-1].t
