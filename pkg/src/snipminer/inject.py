"""Inject synthetic subtly-persistent trips into a host stream.

Each synthetic trip is an edge whose endpoint pair never appears in the
host stream. Its occurrence count is drawn from [occ_min, occ_max] with
probability inversely proportional to the count (favoring low frequencies),
and its occurrences are spaced uniformly between a start and end chosen
within ``margin`` of the stream bounds, then perturbed by uniform jitter.
Every occurrence emits an insertion at the trip time and a matching
deletion ``trip_duration`` later, so one trip with n occurrences
contributes 2n labeled updates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InjectionError
from .stream_io import EdgeUpdate

__all__ = ["InjectionSpec", "inject"]

_PAIR_RETRIES = 10_000


@dataclass(frozen=True, slots=True)
class InjectionSpec:
    """Parameters of one injection run (defaults follow the evaluation setup)."""

    trip_count: int = 50
    occ_min: int = 5
    occ_max: int = 100
    jitter: float = 1200.0  # +/- 20 minutes
    margin: float = 600.0  # 10 minutes
    seed: int = 0
    trip_duration: float = 900.0

    def __post_init__(self) -> None:
        if self.trip_count < 1:
            raise ValueError(f"trip_count must be >= 1, got {self.trip_count}")
        if self.occ_min < 2:
            raise ValueError(f"occ_min must be >= 2, got {self.occ_min}")
        if self.occ_max < self.occ_min:
            raise ValueError("occ_max must be >= occ_min")
        if self.jitter < 0 or self.margin < 0 or self.trip_duration < 0:
            raise ValueError("jitter, margin, and trip_duration must be >= 0")


def inject(
    host: Sequence[EdgeUpdate], spec: InjectionSpec
) -> tuple[list[EdgeUpdate], list[int]]:
    """Return the time-sorted augmented stream and per-update 0/1 labels.

    Host updates are labeled 0 and every injected update 1. Injected
    timestamps are clipped to the host span; injected endpoint pairs are
    drawn from the host node universe but never collide with a host edge.
    Deterministic for a given ``spec.seed``.
    """
    if not host:
        raise ValueError("host stream is empty")
    t_s = host[0].t
    t_e = host[-1].t
    span = t_e - t_s
    if span <= 2 * spec.margin:
        raise ValueError(
            f"host span {span} s must exceed twice the margin ({spec.margin} s)"
        )
    if spec.jitter >= span / spec.occ_max:
        raise ValueError(
            f"jitter {spec.jitter} s must be below span/occ_max = {span / spec.occ_max} s"
        )

    nodes = sorted({u.src for u in host} | {u.dst for u in host})
    if len(nodes) < 2:
        raise InjectionError("host node universe too small to form new pairs")
    host_pairs = {(u.src, u.dst) for u in host}

    rng = np.random.default_rng(spec.seed)
    counts = np.arange(spec.occ_min, spec.occ_max + 1)
    weights = 1.0 / counts
    weights /= weights.sum()

    used_pairs: set[tuple[str, str]] = set()
    injected: list[EdgeUpdate] = []
    for _ in range(spec.trip_count):
        start = t_s + rng.uniform(0.0, spec.margin) if spec.margin else t_s
        end = t_e - rng.uniform(0.0, spec.margin) if spec.margin else t_e
        n = int(rng.choice(counts, p=weights))
        times = np.linspace(start, end, n)
        if spec.jitter:
            times = times + rng.uniform(-spec.jitter, spec.jitter, size=n)
        times = np.clip(times, t_s, t_e)

        for attempt in range(_PAIR_RETRIES):
            src, dst = (nodes[i] for i in rng.integers(0, len(nodes), size=2))
            pair = (src, dst)
            if src != dst and pair not in host_pairs and pair not in used_pairs:
                used_pairs.add(pair)
                break
        else:
            raise InjectionError(
                f"no unused endpoint pair found after {_PAIR_RETRIES} attempts"
            )

        for t in times:
            depart = float(t)
            arrive = min(depart + spec.trip_duration, t_e)
            injected.append(EdgeUpdate("+", src, "", dst, depart))
            injected.append(EdgeUpdate("-", src, "", dst, arrive))

    tagged = [(u, 0) for u in host] + [(u, 1) for u in injected]
    tagged.sort(key=lambda pair: pair[0].t)
    return [u for u, _ in tagged], [label for _, label in tagged]
