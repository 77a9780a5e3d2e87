# cython: boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled snippet-extraction kernel; behavioral twin of py_extract.

Window entries live in parallel arrays with node ids interned to integers;
per-entry key fragments are precomputed for the id and label views.
Connected subsets are grown smallest-to-largest from the newest update,
deduplicated via packed index codes, and emitted in the same order as the
pure-Python implementation.
"""

from libc.stdint cimport uint64_t
from libcpp.vector cimport vector
from libcpp.unordered_set cimport unordered_set

from ..errors import MissingLabelError

__all__ = ["SnippetExtractor", "K_MAX_LIMIT"]

# subsets are packed into one 64-bit code: 16 bits per window offset
K_MAX_LIMIT = 4
DEF MAX_K = 4
DEF MAX_NODES = 8  # 2 * MAX_K
DEF COMPACT_AT = 4096

cdef int VIEW_ID = 0
cdef int VIEW_LABEL = 1
cdef int VIEW_ORDER = 2

_DIGITS = ("0", "1", "2", "3", "4", "5", "6", "7")


cdef struct Sub:
    int idx[MAX_K]
    int nodes[MAX_NODES]
    int k
    int nn


cdef class SnippetExtractor:
    """Stateful per-stream extractor; one instance per miner."""

    cdef double delta_max
    cdef int k_max
    cdef int view
    cdef Py_ssize_t head
    cdef vector[double] ts
    cdef vector[int] si, di
    cdef list frags  # per-entry "(op,a,rel,b)" for ID/LABEL views
    cdef list ops    # per-entry op and rel strings for the ORDER view
    cdef list rels
    cdef dict node_ids

    def __init__(self, double delta_max, int k_max, int view):
        if k_max < 1:
            raise ValueError(f"k_max must be >= 1, got {k_max}")
        if k_max > MAX_K:
            raise ValueError(
                f"compiled extractor supports k_max <= {MAX_K}; use the python backend"
            )
        if view not in (VIEW_ID, VIEW_LABEL, VIEW_ORDER):
            raise ValueError(f"unknown view code {view}")
        self.delta_max = delta_max
        self.k_max = k_max
        self.view = view
        self.head = 0
        self.frags = []
        self.ops = []
        self.rels = []
        self.node_ids = {}

    @property
    def window_len(self):
        return self.ts.size() - self.head

    cdef inline int _node_id(self, object name) except? -1:
        cdef object cached = self.node_ids.get(name)
        if cached is not None:
            return <int> cached
        cdef int fresh = len(self.node_ids)
        self.node_ids[name] = fresh
        return fresh

    cdef object _singleton_key(self, str op, str src, str rel, str dst,
                               object src_label, object dst_label, double t):
        if self.view == VIEW_ID:
            return f"({op},{src},{rel},{dst})"
        if self.view == VIEW_LABEL:
            if src_label is None or dst_label is None:
                raise MissingLabelError(
                    f"label view requires node labels, missing on update "
                    f"({op},{src},{rel},{dst},t={t})"
                )
            return f"({op},{src_label},{rel},{dst_label})"
        return f"({op},0,{rel},0)" if dst == src else f"({op},0,{rel},1)"

    cdef object _subset_key(self, Sub* sub):
        cdef list parts = []
        cdef int x, i, a, b, a2, on
        cdef int order_nodes[MAX_NODES]
        cdef int node
        if self.view != VIEW_ORDER:
            for x in range(sub.k):
                parts.append(self.frags[sub.idx[x]])
            return "|".join(parts)
        on = 0
        for x in range(sub.k):
            i = sub.idx[x]
            node = self.si[i]
            a = -1
            for b in range(on):
                if order_nodes[b] == node:
                    a = b
                    break
            if a < 0:
                order_nodes[on] = node
                a = on
                on += 1
            node = self.di[i]
            b = -1
            for a2 in range(on):
                if order_nodes[a2] == node:
                    b = a2
                    break
            if b < 0:
                order_nodes[on] = node
                b = on
                on += 1
            parts.append(
                "(" + <str> self.ops[i] + "," + _DIGITS[a] + ","
                + <str> self.rels[i] + "," + _DIGITS[b] + ")"
            )
        return "|".join(parts)

    def push(self, str op, str src, str rel, str dst, double t,
             src_label, dst_label):
        """Feed one update; return the canonical keys of the snippet
        occurrences it completes (singleton first), all at time ``t``."""
        cdef object singleton = self._singleton_key(
            op, src, rel, dst, src_label, dst_label, t
        )
        cdef list result = [singleton]
        if self.k_max == 1:
            return result

        # evict stale entries, compacting storage when the dead prefix grows
        cdef Py_ssize_t size = self.ts.size()
        cdef Py_ssize_t head = self.head
        cdef double width = self.delta_max
        while head < size and t - self.ts[head] > width:
            head += 1
        if head >= COMPACT_AT and 2 * head >= size:
            self.ts.erase(self.ts.begin(), self.ts.begin() + head)
            self.si.erase(self.si.begin(), self.si.begin() + head)
            self.di.erase(self.di.begin(), self.di.begin() + head)
            if self.view == VIEW_ORDER:
                del self.ops[:head]
                del self.rels[:head]
            else:
                del self.frags[:head]
            head = 0
            size = self.ts.size()
        self.head = head

        cdef int s_id = self._node_id(src)
        cdef int d_id = self._node_id(dst)
        self.ts.push_back(t)
        self.si.push_back(s_id)
        self.di.push_back(d_id)
        if self.view == VIEW_ORDER:
            self.ops.append(op)
            self.rels.append(rel)
        else:
            if self.view == VIEW_LABEL:
                self.frags.append(f"({op},{src_label},{rel},{dst_label})")
            else:
                self.frags.append(f"({op},{src},{rel},{dst})")
        size += 1

        cdef Py_ssize_t first = head
        cdef Py_ssize_t last = size - 1
        if last == first:
            return result
        if last - first >= 65000:
            raise RuntimeError(
                "window exceeds the compiled extractor's 65000-entry limit; "
                "lower delta_max or use the python backend"
            )

        cdef vector[Sub] frontier, grown
        cdef unordered_set[uint64_t] seen
        cdef Sub seed, sub, ns
        cdef Py_ssize_t fi
        cdef int k, x, y, sj, dj, j
        cdef bint hit
        cdef uint64_t code

        seed.k = 1
        seed.idx[0] = <int> last
        seed.nodes[0] = self.si[last]
        seed.nn = 1
        if self.di[last] != seed.nodes[0]:
            seed.nodes[1] = self.di[last]
            seed.nn = 2
        frontier.push_back(seed)

        for k in range(2, self.k_max + 1):
            grown.clear()
            for fi in range(frontier.size()):
                sub = frontier[fi]
                for j in range(<int> first, <int> last):
                    hit = False
                    for x in range(sub.k):
                        if sub.idx[x] == j:
                            hit = True
                            break
                    if hit:
                        continue
                    sj = self.si[j]
                    dj = self.di[j]
                    hit = False
                    for x in range(sub.nn):
                        if sub.nodes[x] == sj or sub.nodes[x] == dj:
                            hit = True
                            break
                    if not hit:
                        continue
                    # sorted insertion of j into the subset's index list
                    ns.k = sub.k + 1
                    y = 0
                    for x in range(sub.k):
                        if sub.idx[x] < j:
                            ns.idx[y] = sub.idx[x]
                            y += 1
                    ns.idx[y] = j
                    y += 1
                    for x in range(sub.k):
                        if sub.idx[x] > j:
                            ns.idx[y] = sub.idx[x]
                            y += 1
                    code = 0
                    for x in range(ns.k):
                        code = (code << 16) | <uint64_t> (ns.idx[x] - first + 1)
                    if seen.count(code):
                        continue
                    seen.insert(code)
                    for x in range(sub.nn):
                        ns.nodes[x] = sub.nodes[x]
                    ns.nn = sub.nn
                    hit = False
                    for x in range(ns.nn):
                        if ns.nodes[x] == sj:
                            hit = True
                            break
                    if not hit:
                        ns.nodes[ns.nn] = sj
                        ns.nn += 1
                    hit = False
                    for x in range(ns.nn):
                        if ns.nodes[x] == dj:
                            hit = True
                            break
                    if not hit:
                        ns.nodes[ns.nn] = dj
                        ns.nn += 1
                    result.append(self._subset_key(&ns))
                    grown.push_back(ns)
            frontier.swap(grown)
        return result
