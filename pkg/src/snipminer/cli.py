"""Command-line surface: offline/streaming mining, anomaly detection,
anomaly injection, and throughput benchmarking.

Every command writes a JSON manifest next to its primary output with the
resolved flags, input digest, tool version, seeds, and wall-clock timings,
so any run can be reproduced exactly. Set SNIPMINER_LOG=debug|info|warning
to control log verbosity.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import os
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import __version__
from ._core import BACKEND, available_backends, use_backend
from .anomaly import (
    AnomalyPoint,
    AnomalyScorer,
    AnomalyVerdict,
    DsTracker,
    ForestConfig,
    LEVEL_WARMUP,
    RunningStats,
    grade,
)
from .errors import SnipminerError
from .inject import InjectionSpec, inject
from .metrics import auc, f1_at_k
from .miner import MinerConfig, StreamingMiner, Variant, mine_offline
from .persistence import PersistenceParams
from .snippets import View
from .stream_io import emit_stream, generate_synthetic, parse_stream

log = logging.getLogger("snipminer")

_DETECTORS = ("spen", "freq", "ds")


@dataclass
class RunManifest:
    """Reproducibility sidecar emitted alongside every output."""

    command: str
    version: str
    backend: str
    args: dict
    seeds: list[int] = field(default_factory=list)
    input_sha256: str | None = None
    input_meta: dict | None = None
    outputs: list[str] = field(default_factory=list)
    wall_seconds: float = 0.0

    def write(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.__dict__, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _manifest_path(output: str) -> str:
    return output + ".manifest.json"


def _resolved_args(ns: argparse.Namespace) -> dict:
    return {k: v for k, v in sorted(vars(ns).items()) if k != "func"}


def _miner_config(ns: argparse.Namespace, variant: Variant) -> MinerConfig:
    return MinerConfig(
        k_max=ns.k_max,
        delta_max=ns.delta_max,
        view=View(ns.view),
        params=PersistenceParams(ns.alpha, ns.beta, ns.gamma),
        variant=variant,
    )


def _add_miner_flags(p: argparse.ArgumentParser, alpha=1.0, beta=1.0, gamma=1.0) -> None:
    p.add_argument("--delta-max", type=float, default=None,
                   help="max snippet duration in seconds (required when --k-max > 1)")
    p.add_argument("--k-max", type=int, default=1, help="max snippet size in updates")
    p.add_argument("--view", choices=[v.value for v in View], default="id")
    p.add_argument("--alpha", type=float, default=alpha, help="width exponent")
    p.add_argument("--beta", type=float, default=beta, help="frequency exponent")
    p.add_argument("--gamma", type=float, default=gamma, help="spread exponent")


# ---------------------------------------------------------------- mine


def cmd_mine(ns: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    config = _miner_config(ns, Variant(ns.variant))
    reader = parse_stream(ns.input)
    if config.variant is Variant.OFFLINE:
        result = mine_offline(reader, config)
    else:
        miner = StreamingMiner(config)
        miner.run(reader)
        result = miner.result()
    rows = sorted(
        result.snippets.items(), key=lambda kv: (-kv[1].persistence, kv[0])
    )
    with open(ns.output, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["snippet_key", "frequency", "persistence"])
        for key, stats in rows:
            writer.writerow([key, stats.occ_count, repr(stats.persistence)])
    manifest = RunManifest(
        command="mine",
        version=__version__,
        backend=BACKEND,
        args=_resolved_args(ns),
        input_sha256=_sha256(ns.input),
        input_meta={
            "count": result.update_count,
            "start_time": result.start_time,
            "end_time": result.end_time,
        },
        outputs=[ns.output],
        wall_seconds=time.perf_counter() - t0,
    )
    manifest.write(_manifest_path(ns.output))
    log.info("mine: %d snippets -> %s", len(rows), ns.output)
    return 0


# ---------------------------------------------------------------- detect


class _FreqScorer:
    """Occurrence-share scores with the same level grading as the forest."""

    def __init__(self) -> None:
        self.total = 0
        self.stats = RunningStats()

    def score(self, occ_count: int) -> AnomalyVerdict:
        self.total += 1
        value = occ_count / self.total
        self.stats.push(value)
        if self.stats.count < LEVEL_WARMUP:
            return AnomalyVerdict(value, 0)
        return AnomalyVerdict(value, grade(value, self.stats.median, self.stats.std))


def _stream_bounds(path: str) -> tuple[float, float]:
    reader = parse_stream(path)
    for _ in reader:
        pass
    meta = reader.meta
    if meta.start_time is None or meta.end_time is None:
        raise SnipminerError(f"stream {path} is empty")
    return meta.start_time, meta.end_time


def cmd_detect(ns: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    config = _miner_config(ns, Variant.STREAMING)
    forest_config = ForestConfig(ns.trees, ns.max_leaves, ns.seed)

    scorer = AnomalyScorer(forest_config) if ns.detector in ("spen", "ds") else None
    freq_scorer = _FreqScorer() if ns.detector == "freq" else None
    tracker = None
    if ns.detector == "ds":
        # the fixed-period heuristic needs the stream bounds a priori
        t_s, t_e = _stream_bounds(ns.input)
        tracker = DsTracker(t_s, t_e, ns.periods)

    labels: list[int] | None = None
    if ns.labels:
        labels = []
        with open(ns.labels, encoding="utf-8") as fh:
            for row in csv.reader(fh):
                if not row or row[0].startswith("#"):
                    continue
                labels.append(int(row[1]))

    miner = StreamingMiner(config)
    update_scores: list[float] = []
    reader = parse_stream(ns.input)
    with open(ns.output, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "snippet_key", "score", "level"])
        for u in reader:
            first = True
            for key, f, p in miner.process(u):
                if ns.detector == "spen":
                    verdict = scorer.score_occurrence(AnomalyPoint(key, u.t, f, p))
                elif ns.detector == "ds":
                    count = tracker.observe(key, u.t)
                    verdict = scorer.score_occurrence(
                        AnomalyPoint(key, u.t, f, float(count))
                    )
                else:
                    verdict = freq_scorer.score(miner.records[key].occ_count)
                writer.writerow([repr(u.t), key, repr(verdict.score), verdict.level])
                if first:
                    update_scores.append(verdict.score)
                    first = False

    summary = {}
    if labels is not None:
        if len(labels) != len(update_scores):
            raise SnipminerError(
                f"label/stream length mismatch: {len(labels)} labels for "
                f"{len(update_scores)} updates"
            )
        summary["auc"] = auc(labels, update_scores)
        for k in ns.f1_at:
            summary[f"f1@{k}"] = f1_at_k(labels, update_scores, k)
        print(f"detector={ns.detector}")
        for name, value in summary.items():
            print(f"  {name:>10}: {value:.4f}")

    manifest = RunManifest(
        command="detect",
        version=__version__,
        backend=BACKEND,
        args=_resolved_args(ns),
        seeds=[ns.seed],
        input_sha256=_sha256(ns.input),
        input_meta={"count": reader.meta.count, "summary": summary},
        outputs=[ns.output],
        wall_seconds=time.perf_counter() - t0,
    )
    manifest.write(_manifest_path(ns.output))
    return 0


# ---------------------------------------------------------------- inject


def cmd_inject(ns: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    host = list(parse_stream(ns.input))
    spec = InjectionSpec(
        trip_count=ns.trips,
        occ_min=ns.occ_min,
        occ_max=ns.occ_max,
        jitter=ns.jitter,
        margin=ns.margin,
        seed=ns.seed,
        trip_duration=ns.trip_duration,
    )
    augmented, labels = inject(host, spec)
    emit_stream(augmented, ns.output)
    with open(ns.labels_out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        for i, label in enumerate(labels):
            writer.writerow([i, label])
    injected_count = sum(labels)
    manifest = RunManifest(
        command="inject",
        version=__version__,
        backend=BACKEND,
        args=_resolved_args(ns),
        seeds=[ns.seed],
        input_sha256=_sha256(ns.input),
        input_meta={"host_updates": len(host), "injected_updates": injected_count},
        outputs=[ns.output, ns.labels_out],
        wall_seconds=time.perf_counter() - t0,
    )
    manifest.write(_manifest_path(ns.output))
    log.info("inject: %d synthetic updates -> %s", injected_count, ns.output)
    return 0


# ---------------------------------------------------------------- bench


def _bench_cell(task: dict) -> dict:
    """Time one (backend, n, delta_max, k_max) cell; returns updates/sec stats."""
    stream = generate_synthetic(task["n"], task["rate"], task["node_count"], task["seed"])
    rates = []
    with use_backend(task["backend"]):
        for _ in range(task["reps"]):
            config = MinerConfig(
                k_max=task["k_max"],
                delta_max=task["delta_max"],
                view=View.ID,
                variant=Variant(task["variant"]),
            )
            start = time.perf_counter()
            if config.variant is Variant.OFFLINE:
                mine_offline(stream, config)
            else:
                StreamingMiner(config).run(stream)
            elapsed = time.perf_counter() - start
            rates.append(task["n"] / elapsed)
    out = dict(task)
    out["mean_updates_per_sec"] = statistics.fmean(rates)
    out["stdev_updates_per_sec"] = statistics.stdev(rates) if len(rates) > 1 else 0.0
    return out


def _parse_list(text: str, cast) -> list:
    return [cast(part) for part in text.split(",") if part]


def cmd_bench(ns: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    backends = available_backends() if ns.backend == "both" else [ns.backend]
    for b in backends:
        if b not in available_backends():
            raise SnipminerError(f"backend {b!r} is not available in this install")
    tasks = []
    for backend in backends:
        for n in ns.n:
            for k_max in ns.k_max:
                for delta_max in ns.delta_max:
                    tasks.append(
                        {
                            "backend": backend,
                            "variant": ns.variant,
                            "n": n,
                            "rate": ns.rate,
                            "node_count": ns.node_count,
                            "delta_max": delta_max,
                            "k_max": k_max,
                            "reps": ns.reps,
                            "seed": ns.seed,
                        }
                    )
    if ns.jobs > 1:
        with ProcessPoolExecutor(max_workers=ns.jobs) as pool:
            results = list(pool.map(_bench_cell, tasks))
    else:
        results = [_bench_cell(task) for task in tasks]

    columns = [
        "backend",
        "variant",
        "n",
        "rate",
        "delta_max",
        "k_max",
        "reps",
        "mean_updates_per_sec",
        "stdev_updates_per_sec",
    ]
    sink = open(ns.output, "w", newline="", encoding="utf-8") if ns.output else sys.stdout
    try:
        writer = csv.writer(sink)
        writer.writerow(columns)
        for row in results:
            writer.writerow([row[c] for c in columns])
    finally:
        if ns.output:
            sink.close()
    if ns.output:
        manifest = RunManifest(
            command="bench",
            version=__version__,
            backend=BACKEND,
            args=_resolved_args(ns),
            seeds=[ns.seed],
            outputs=[ns.output],
            wall_seconds=time.perf_counter() - t0,
        )
        manifest.write(_manifest_path(ns.output))
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="snipminer",
        description="Mine activity-snippet persistence in edge streams and flag anomalies.",
    )
    parser.add_argument("--version", action="version", version=f"snipminer {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mine", help="mine a stream and export snippet persistence (PvF data)")
    p.add_argument("--input", "-i", required=True, help="input stream CSV")
    p.add_argument("--output", "-o", required=True, help="output CSV (snippet_key,frequency,persistence)")
    _add_miner_flags(p)
    p.add_argument("--variant", choices=[v.value for v in Variant], default="offline")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("detect", help="stream with incremental mining and anomaly scoring")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--output", "-o", required=True, help="output CSV (t,snippet_key,score,level)")
    # detection defaults follow the real-time anomaly configuration
    _add_miner_flags(p, alpha=1.0, beta=0.2, gamma=10.0)
    p.add_argument("--detector", choices=_DETECTORS, default="spen")
    p.add_argument("--trees", type=int, default=10, help="forest size")
    p.add_argument("--max-leaves", type=int, default=256, help="points per tree")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--periods", type=int, default=60, help="period count for --detector ds")
    p.add_argument("--labels", default=None, help="ground-truth labels CSV (line_index,label)")
    p.add_argument("--f1-at", type=lambda s: _parse_list(s, int), default=[100, 1000],
                   help="comma-separated K values for F1@K (with --labels)")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("inject", help="inject subtly-persistent synthetic trips into a host stream")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--output", "-o", required=True, help="augmented stream CSV")
    p.add_argument("--labels-out", required=True, help="labels CSV (line_index,label)")
    p.add_argument("--trips", type=int, default=50)
    p.add_argument("--occ-min", type=int, default=5)
    p.add_argument("--occ-max", type=int, default=100)
    p.add_argument("--jitter", type=float, default=1200.0, help="occurrence jitter, seconds")
    p.add_argument("--margin", type=float, default=600.0, help="start/end margin, seconds")
    p.add_argument("--trip-duration", type=float, default=900.0, help="insert-to-delete delay, seconds")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_inject)

    p = sub.add_parser("bench", help="measure mining throughput over a parameter grid")
    p.add_argument("--n", type=lambda s: _parse_list(s, int), default=[100_000],
                   help="comma-separated stream sizes")
    p.add_argument("--rate", type=float, default=0.01, help="synthetic stream rate, updates/sec")
    p.add_argument("--node-count", type=int, default=100)
    p.add_argument("--delta-max", type=lambda s: _parse_list(s, float), default=[600.0])
    p.add_argument("--k-max", type=lambda s: _parse_list(s, int), default=[1])
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--variant", choices=[v.value for v in Variant], default="offline")
    p.add_argument("--backend", choices=["python", "compiled", "both", BACKEND], default=BACKEND)
    p.add_argument("--jobs", type=int, default=1, help="parallel workers across grid cells")
    p.add_argument("--output", "-o", default=None, help="report CSV (default: stdout)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=os.environ.get("SNIPMINER_LOG", "warning").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    ns = build_parser().parse_args(argv)
    try:
        return ns.func(ns)
    except SnipminerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
