"""Shared test utilities: independent oracles and stream builders.

The evaluators here are deliberately naive transcriptions of the measure
definitions (plain ``math``, full enumeration) so they stay independent of
the library's optimized code paths.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import Counter

import numpy as np

from snipminer import EdgeUpdate, View, canonicalize

# ---------------------------------------------------------------- reference
# persistence evaluator


def reference_persistence(occurrences, t_s, t_e, alpha=1.0, beta=1.0, gamma=1.0):
    """Direct evaluation of the persistence definition over a full log."""
    occ = sorted(occurrences)
    if not occ:
        return 0.0
    t_f, t_l = occ[0], occ[-1]
    assert t_s <= t_f <= t_l <= t_e
    w = (t_l - t_f + 1.0) / (t_e - t_s + 1.0)
    f = math.log10(len(occ) + 1.0)
    uniq = sorted(set(occ))
    gaps = [uniq[i + 1] - uniq[i] for i in range(len(uniq) - 1)]
    if len(gaps) <= 1:
        s = 1.0
    else:
        z = sum(gaps)
        h = -sum((g / z) * math.log2(g / z) for g in gaps if g > 0)
        s = h / math.log2(len(gaps)) + 1.0
    return w**alpha * f**beta * s**gamma


def reference_gap_entropy(gaps):
    z = sum(gaps)
    if z <= 0:
        return 0.0
    return -sum((g / z) * math.log2(g / z) for g in gaps if g > 0)


# ---------------------------------------------------------------- brute-force
# snippet enumeration


def _connected(updates) -> bool:
    nodes = {updates[0].src}
    edges = [(u.src, u.dst) for u in updates]
    grew = True
    while grew:
        grew = False
        for a, b in edges:
            if a in nodes and b not in nodes:
                nodes.add(b)
                grew = True
            elif b in nodes and a not in nodes:
                nodes.add(a)
                grew = True
    return all(u.src in nodes and u.dst in nodes for u in updates)


def brute_force_occurrences(stream, delta_max, k_max, view) -> Counter:
    """Multiset of (key, t) for every connected time-ordered subsequence of
    the stream with span <= delta_max and size <= k_max, stamped at its last
    update's timestamp."""
    occs: Counter = Counter()
    n = len(stream)
    for k in range(1, k_max + 1):
        for combo in itertools.combinations(range(n), k):
            us = [stream[i] for i in combo]
            if us[-1].t - us[0].t > delta_max:
                continue
            if not _connected(us):
                continue
            occs[(canonicalize(us, view), us[-1].t)] += 1
    return occs


def extractor_occurrences(stream, extractor) -> Counter:
    """Multiset of (key, t) produced by driving a kernel over the stream."""
    occs: Counter = Counter()
    for u in stream:
        for key in extractor.push(u.op, u.src, u.rel, u.dst, u.t, u.src_label, u.dst_label):
            occs[(key, u.t)] += 1
    return occs


# ---------------------------------------------------------------- cut-forest
# structural oracles


def _snap_size(node) -> int:
    if node[0] == "leaf":
        return len(node[2])
    return _snap_size(node[5]) + _snap_size(node[6])


def _snap_path(node, key, acc):
    if node[0] == "leaf":
        return acc + [node] if key in node[2] else None
    found = _snap_path(node[5], key, acc + [node])
    if found is not None:
        return found
    return _snap_path(node[6], key, acc + [node])


def brute_codisp(snapshot, key) -> float:
    """Collusive displacement recomputed from a tree snapshot, with subtree
    sizes re-derived by full recursion rather than read from node counts."""
    path = _snap_path(snapshot, key, [])
    assert path is not None, f"key {key!r} not in tree"
    best = 0.0
    for i in range(len(path) - 1, 0, -1):
        node, parent = path[i], path[i - 1]
        sibling = parent[6] if parent[5] is node else parent[5]
        best = max(best, _snap_size(sibling) / _snap_size(node))
    return best


def check_tree_invariants(snapshot) -> int:
    """Verify stored counts and bounding boxes bottom-up; returns point count."""
    if snapshot is None:
        return 0
    if snapshot[0] == "leaf":
        assert snapshot[1] == len(snapshot[2])
        return snapshot[1]
    _, n, _, _, bbox, left, right = snapshot
    nl = check_tree_invariants(left)
    nr = check_tree_invariants(right)
    assert n == nl + nr, f"stored count {n} != {nl}+{nr}"

    def box(node):
        if node[0] == "leaf":
            return (node[3], node[4], node[3], node[4])
        return node[4]

    bl, br = box(left), box(right)
    expect = (
        min(bl[0], br[0]),
        min(bl[1], br[1]),
        max(bl[2], br[2]),
        max(bl[3], br[3]),
    )
    assert bbox == expect, f"stored bbox {bbox} != derived {expect}"
    return n


def forest_keys(snapshot) -> set:
    if snapshot is None:
        return set()
    if snapshot[0] == "leaf":
        return set(snapshot[2])
    return forest_keys(snapshot[5]) | forest_keys(snapshot[6])


# ---------------------------------------------------------------- stream
# builders


def random_stream(
    rng: random.Random,
    n: int,
    node_count: int = 8,
    max_gap: float = 2.0,
    rel_types=("",),
    with_labels: bool = False,
    label_count: int = 3,
    duplicate_t_prob: float = 0.1,
) -> list[EdgeUpdate]:
    """Random well-formed stream; optional node labels and duplicate times."""
    labels = {
        f"n{i}": f"L{rng.randrange(label_count)}" for i in range(node_count)
    }
    t = 0.0
    out = []
    for _ in range(n):
        if not out or rng.random() >= duplicate_t_prob:
            t += rng.random() * max_gap
        a, b = f"n{rng.randrange(node_count)}", f"n{rng.randrange(node_count)}"
        out.append(
            EdgeUpdate(
                rng.choice("+-"),
                a,
                rng.choice(rel_types),
                b,
                t,
                labels[a] if with_labels else None,
                labels[b] if with_labels else None,
            )
        )
    return out


# ---------------------------------------------------------------- synthetic
# host network for detection experiments

DAY = 86_400.0


def _diurnal_times(rng: np.random.Generator, count: int, lo: float, hi: float):
    """Occurrence times with a two-peak time-of-day profile inside [lo, hi]."""
    days_lo = int(lo // DAY)
    days_hi = max(days_lo + 1, int(hi // DAY))
    day = rng.integers(days_lo, days_hi + 1, size=count)
    morning = rng.random(count) < 0.5
    tod = np.where(
        morning,
        rng.normal(8.5, 1.5, size=count),
        rng.normal(17.5, 2.0, size=count),
    )
    t = day * DAY + np.mod(tod, 24.0) * 3600.0
    return np.clip(t, lo, hi)


def build_host_stream(seed: int, days: float = 90.0, nodes: int = 250, scale: float = 1.0):
    """Synthetic evolving transportation-like network, ~205K edge updates
    at scale 1.

    A mixture of heavy commuter pairs, mid- and low-frequency casual pairs,
    and short bursts; all time-of-day modulated except the bursts. No pair
    has near-uniform spacing across the stream, so regularity remains the
    distinguishing trait of injected trips.
    """
    rng = np.random.default_rng(seed)
    horizon = days * DAY
    classes = [
        # (edge count, count sampler, window-fraction range, diurnal?)
        (max(2, int(60 * scale)), lambda n: rng.integers(150, 500, size=n), (0.7, 1.0), True),
        (max(5, int(3100 * scale)), lambda n: rng.integers(8, 80, size=n), (0.5, 1.0), True),
        (max(5, int(12000 * scale)), lambda n: rng.integers(1, 7, size=n), (0.05, 1.0), True),
        (max(2, int(150 * scale)), lambda n: rng.integers(40, 160, size=n), None, False),
    ]
    total_edges = sum(c[0] for c in classes)
    codes = rng.permutation(nodes * (nodes - 1))[:total_edges]
    srcs = codes // (nodes - 1)
    rems = codes % (nodes - 1)
    dsts = rems + (rems >= srcs)

    names = [f"s{i:03d}" for i in range(nodes)]
    times_all = []
    src_all = []
    dst_all = []
    e = 0
    for edge_count, counts_of, frac_range, diurnal in classes:
        counts = counts_of(edge_count)
        for i in range(edge_count):
            count = int(counts[i])
            if frac_range is None:
                # burst: a few hours to two days, uniform inside
                length = rng.uniform(2 * 3600.0, 2 * DAY)
                start = rng.uniform(0.0, horizon - length)
                t = rng.uniform(start, start + length, size=count)
            else:
                length = horizon * rng.uniform(*frac_range)
                start = rng.uniform(0.0, horizon - length)
                t = _diurnal_times(rng, count, start, start + length)
            times_all.append(t)
            src_all.extend([srcs[e]] * count)
            dst_all.extend([dsts[e]] * count)
            e += 1
    t = np.concatenate(times_all)
    order = np.argsort(t, kind="stable")
    src_arr = np.asarray(src_all)[order]
    dst_arr = np.asarray(dst_all)[order]
    t = t[order]
    return [
        EdgeUpdate("+", names[int(a)], "", names[int(b)], float(tt))
        for a, b, tt in zip(src_arr, dst_arr, t)
    ]
