# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled robust random cut forest; behavioral twin of py_rcf.

Consumes randomness in exactly the same order as the pure-Python
implementation and performs the same IEEE double arithmetic, so identical
seeds yield identical trees and scores across backends.
"""

from libc.stdint cimport uint64_t

__all__ = ["SplitMix64", "CutTree", "CutForest"]

cdef double _INV_2_53 = 1.0 / 9007199254740992.0


cdef class SplitMix64:
    cdef uint64_t s

    def __init__(self, seed):
        self.s = <uint64_t> (seed & 0xFFFFFFFFFFFFFFFF)

    cdef inline uint64_t _next_u64(self):
        self.s += <uint64_t> 0x9E3779B97F4A7C15
        cdef uint64_t z = self.s
        z = (z ^ (z >> 30)) * <uint64_t> 0xBF58476D1CE4E5B9
        z = (z ^ (z >> 27)) * <uint64_t> 0x94D049BB133111EB
        return z ^ (z >> 31)

    cdef inline double _next_double(self):
        return <double> (self._next_u64() >> 11) * _INV_2_53

    def next_u64(self):
        return self._next_u64()

    def next_double(self):
        return self._next_double()


cdef class _Node:
    # a leaf stores its point in (lo0, lo1) with hi == lo and keys != None
    cdef _Node parent, left, right
    cdef Py_ssize_t n
    cdef int q
    cdef double cut
    cdef double lo0, lo1, hi0, hi1
    cdef list keys


cdef inline _Node _new_leaf(double x0, double x1, object key):
    cdef _Node node = _Node.__new__(_Node)
    node.parent = None
    node.left = None
    node.right = None
    node.n = 1
    node.lo0 = x0
    node.hi0 = x0
    node.lo1 = x1
    node.hi1 = x1
    node.keys = [key]
    return node


cdef class CutTree:
    cdef SplitMix64 _rng
    cdef _Node root
    cdef dict _leaf_of
    cdef list _keys
    cdef dict _key_pos

    def __init__(self, SplitMix64 rng):
        self._rng = rng
        self.root = None
        self._leaf_of = {}
        self._keys = []
        self._key_pos = {}

    def __len__(self):
        return len(self._keys)

    def __contains__(self, key):
        return key in self._leaf_of

    def random_key(self):
        cdef Py_ssize_t n = len(self._keys)
        cdef Py_ssize_t idx = <Py_ssize_t> (self._rng._next_double() * n)
        if idx >= n:
            idx = n - 1
        return self._keys[idx]

    cdef void _insert(self, object key, double x0, double x1) except *:
        cdef dict pos = self._key_pos
        if key in pos:
            raise KeyError(f"key already present: {key!r}")
        pos[key] = len(self._keys)
        self._keys.append(key)
        cdef _Node leaf, branch, node, p
        if self.root is None:
            leaf = _new_leaf(x0, x1, key)
            self.root = leaf
            self._leaf_of[key] = leaf
            return
        node = self.root
        cdef double blo0, blo1, bhi0, bhi1, lo0, lo1, hi0, hi1
        cdef double span0, span1, total, r, cut, blo, bhi
        cdef int q
        while True:
            blo0 = node.lo0
            blo1 = node.lo1
            bhi0 = node.hi0
            bhi1 = node.hi1
            lo0 = x0 if x0 < blo0 else blo0
            hi0 = x0 if x0 > bhi0 else bhi0
            lo1 = x1 if x1 < blo1 else blo1
            hi1 = x1 if x1 > bhi1 else bhi1
            span0 = hi0 - lo0
            span1 = hi1 - lo1
            total = span0 + span1
            if total == 0.0:
                # zero-extent combined box: duplicate of a single-point leaf
                node.keys.append(key)
                node.n += 1
                self._leaf_of[key] = node
                p = node.parent
                while p is not None:
                    p.n += 1
                    p = p.parent
                return
            r = self._rng._next_double() * total
            if r < span0:
                q = 0
                cut = lo0 + r
                blo = blo0
                bhi = bhi0
            else:
                q = 1
                cut = lo1 + (r - span0)
                blo = blo1
                bhi = bhi1
            if cut <= blo:
                leaf = _new_leaf(x0, x1, key)
                branch = _Node.__new__(_Node)
                branch.left = leaf
                branch.right = node
                break
            if cut >= bhi:
                leaf = _new_leaf(x0, x1, key)
                branch = _Node.__new__(_Node)
                branch.left = node
                branch.right = leaf
                break
            # cut fell inside the existing box: descend (node is a branch)
            node = node.left if (x0 if node.q == 0 else x1) <= node.cut else node.right
        branch.q = q
        branch.cut = cut
        branch.n = node.n + 1
        branch.lo0 = lo0
        branch.lo1 = lo1
        branch.hi0 = hi0
        branch.hi1 = hi1
        branch.keys = None
        cdef _Node parent = node.parent
        branch.parent = parent
        leaf.parent = branch
        node.parent = branch
        self._leaf_of[key] = leaf
        if parent is None:
            self.root = branch
        elif parent.left is node:
            parent.left = branch
        else:
            parent.right = branch
        p = parent
        while p is not None:
            p.n += 1
            if x0 < p.lo0:
                p.lo0 = x0
            if x0 > p.hi0:
                p.hi0 = x0
            if x1 < p.lo1:
                p.lo1 = x1
            if x1 > p.hi1:
                p.hi1 = x1
            p = p.parent

    cdef bint _delete(self, object key) except? -1:
        cdef _Node leaf = self._leaf_of.pop(key, None)
        if leaf is None:
            return False
        cdef Py_ssize_t pos = self._key_pos.pop(key)
        last = self._keys.pop()
        if last != key:
            self._keys[pos] = last
            self._key_pos[last] = pos
        cdef _Node p, parent, sibling, gp, l, r
        cdef double lo0, lo1, hi0, hi1
        if leaf.n > 1:
            leaf.keys.remove(key)
            leaf.n -= 1
            p = leaf.parent
            while p is not None:
                p.n -= 1
                p = p.parent
            return True
        parent = leaf.parent
        if parent is None:
            self.root = None
            return True
        sibling = parent.right if parent.left is leaf else parent.left
        gp = parent.parent
        sibling.parent = gp
        if gp is None:
            self.root = sibling
        elif gp.left is parent:
            gp.left = sibling
        else:
            gp.right = sibling
        p = gp
        while p is not None:
            p.n -= 1
            l = p.left
            r = p.right
            lo0 = l.lo0 if l.lo0 < r.lo0 else r.lo0
            lo1 = l.lo1 if l.lo1 < r.lo1 else r.lo1
            hi0 = l.hi0 if l.hi0 > r.hi0 else r.hi0
            hi1 = l.hi1 if l.hi1 > r.hi1 else r.hi1
            p.lo0 = lo0
            p.lo1 = lo1
            p.hi0 = hi0
            p.hi1 = hi1
            p = p.parent
        return True

    cdef double _codisp(self, object key) except? -1.0:
        cdef _Node node = self._leaf_of[key]
        cdef _Node parent = node.parent
        cdef _Node sibling
        cdef double best = 0.0
        cdef double ratio
        while parent is not None:
            sibling = parent.right if parent.left is node else parent.left
            ratio = (<double> sibling.n) / (<double> node.n)
            if ratio > best:
                best = ratio
            node = parent
            parent = node.parent
        return best

    def insert(self, key, double x0, double x1):
        self._insert(key, x0, x1)

    def delete(self, key):
        return self._delete(key)

    def codisp(self, key):
        return self._codisp(key)

    def debug_tree(self):
        """Nested-tuple snapshot matching py_rcf.CutTree.debug_tree."""
        return self._render(self.root)

    cdef object _render(self, _Node node):
        if node is None:
            return None
        if node.keys is not None:
            return ("leaf", node.n, tuple(sorted(node.keys)), node.lo0, node.lo1)
        return (
            "branch",
            node.n,
            node.q,
            node.cut,
            (node.lo0, node.lo1, node.hi0, node.hi1),
            self._render(node.left),
            self._render(node.right),
        )


cdef class CutForest:
    cdef public Py_ssize_t tree_count
    cdef public Py_ssize_t capacity
    cdef SplitMix64 _rng
    cdef public list trees

    def __init__(self, tree_count, capacity, seed):
        if tree_count < 1:
            raise ValueError(f"tree_count must be >= 1, got {tree_count}")
        if capacity < 2:
            raise ValueError(f"capacity must be >= 2, got {capacity}")
        self.tree_count = tree_count
        self.capacity = capacity
        self._rng = SplitMix64(seed)
        self.trees = [CutTree(self._rng) for _ in range(tree_count)]

    def update(self, key, double x0, double x1):
        cdef double total = 0.0
        cdef CutTree tree
        cdef Py_ssize_t i
        for i in range(self.tree_count):
            tree = <CutTree> self.trees[i]
            tree._delete(key)
            if len(tree._keys) >= self.capacity:
                tree._delete(tree.random_key())
            tree._insert(key, x0, x1)
            total += tree._codisp(key)
        return total / <double> self.tree_count
