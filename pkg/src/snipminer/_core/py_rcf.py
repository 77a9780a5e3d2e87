"""Pure-Python robust random cut forest (fallback for the compiled twin).

Trees are robust random cut trees over 2D points: cut dimensions are chosen
with probability proportional to the bounding-box side length and cut
positions uniformly within it. A point's anomaly score is its collusive
displacement (the largest sibling-to-subtree size ratio along its leaf's
root path), averaged over trees.

Points are identified by string keys, one live point per key and tree.
Points with identical coordinates share a leaf with a multiplicity count.
The compiled twin consumes randomness identically, so both backends produce
the same forests and scores for the same seed.
"""

from __future__ import annotations

__all__ = ["SplitMix64", "CutTree", "CutForest"]

_MASK = (1 << 64) - 1


class SplitMix64:
    """Deterministic 64-bit generator shared by every tree of a forest."""

    __slots__ = ("_s",)

    def __init__(self, seed: int):
        self._s = seed & _MASK

    def next_u64(self) -> int:
        self._s = (self._s + 0x9E3779B97F4A7C15) & _MASK
        z = self._s
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def next_double(self) -> float:
        """Uniform in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * 2.0**-53


class _Leaf:
    __slots__ = ("parent", "n", "x0", "x1", "keys")

    def __init__(self, x0: float, x1: float, key: str):
        self.parent: _Branch | None = None
        self.n = 1
        self.x0 = x0
        self.x1 = x1
        self.keys = [key]


class _Branch:
    __slots__ = ("parent", "n", "q", "cut", "left", "right", "lo0", "lo1", "hi0", "hi1")

    def __init__(self, q, cut, left, right, n, lo0, lo1, hi0, hi1):
        self.parent: _Branch | None = None
        self.q = q
        self.cut = cut
        self.left = left
        self.right = right
        self.n = n
        self.lo0 = lo0
        self.lo1 = lo1
        self.hi0 = hi0
        self.hi1 = hi1


class CutTree:
    """One robust random cut tree with insert/delete/score in O(depth)."""

    __slots__ = ("_rng", "root", "_leaf_of", "_keys", "_key_pos")

    def __init__(self, rng: SplitMix64):
        self._rng = rng
        self.root: _Leaf | _Branch | None = None
        self._leaf_of: dict[str, _Leaf] = {}
        self._keys: list[str] = []
        self._key_pos: dict[str, int] = {}

    def __len__(self) -> int:
        return len(self._keys)

    def __contains__(self, key: str) -> bool:
        return key in self._leaf_of

    def random_key(self) -> str:
        """A key drawn uniformly over the tree's live points."""
        n = len(self._keys)
        idx = int(self._rng.next_double() * n)
        if idx >= n:
            idx = n - 1
        return self._keys[idx]

    def insert(self, key: str, x0: float, x1: float) -> None:
        pos = self._key_pos
        if key in pos:
            raise KeyError(f"key already present: {key!r}")
        pos[key] = len(self._keys)
        self._keys.append(key)
        if self.root is None:
            leaf = _Leaf(x0, x1, key)
            self.root = leaf
            self._leaf_of[key] = leaf
            return
        node = self.root
        while True:
            if isinstance(node, _Branch):
                blo0, blo1, bhi0, bhi1 = node.lo0, node.lo1, node.hi0, node.hi1
            else:
                blo0 = bhi0 = node.x0
                blo1 = bhi1 = node.x1
            lo0 = x0 if x0 < blo0 else blo0
            hi0 = x0 if x0 > bhi0 else bhi0
            lo1 = x1 if x1 < blo1 else blo1
            hi1 = x1 if x1 > bhi1 else bhi1
            span0 = hi0 - lo0
            span1 = hi1 - lo1
            total = span0 + span1
            if total == 0.0:
                # zero-extent combined box: duplicate of a single-point leaf
                leaf = node  # type: ignore[assignment]
                leaf.keys.append(key)
                leaf.n += 1
                self._leaf_of[key] = leaf
                p = leaf.parent
                while p is not None:
                    p.n += 1
                    p = p.parent
                return
            r = self._rng.next_double() * total
            if r < span0:
                q = 0
                cut = lo0 + r
                blo, bhi = blo0, bhi0
            else:
                q = 1
                cut = lo1 + (r - span0)
                blo, bhi = blo1, bhi1
            if cut <= blo:
                leaf = _Leaf(x0, x1, key)
                branch = _Branch(q, cut, leaf, node, node.n + 1, lo0, lo1, hi0, hi1)
                break
            if cut >= bhi:
                leaf = _Leaf(x0, x1, key)
                branch = _Branch(q, cut, node, leaf, node.n + 1, lo0, lo1, hi0, hi1)
                break
            # cut fell inside the existing box: descend (node is a branch)
            node = node.left if (x0 if node.q == 0 else x1) <= node.cut else node.right
        parent = node.parent
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

    def delete(self, key: str) -> bool:
        """Forget ``key``'s point; returns False if it was not present."""
        leaf = self._leaf_of.pop(key, None)
        if leaf is None:
            return False
        pos = self._key_pos.pop(key)
        last = self._keys.pop()
        if last != key:
            self._keys[pos] = last
            self._key_pos[last] = pos
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
            for child in (p.left, p.right):
                if isinstance(child, _Branch):
                    clo0, clo1, chi0, chi1 = child.lo0, child.lo1, child.hi0, child.hi1
                else:
                    clo0 = chi0 = child.x0
                    clo1 = chi1 = child.x1
                if child is p.left:
                    lo0, lo1, hi0, hi1 = clo0, clo1, chi0, chi1
                else:
                    lo0 = clo0 if clo0 < lo0 else lo0
                    lo1 = clo1 if clo1 < lo1 else lo1
                    hi0 = chi0 if chi0 > hi0 else hi0
                    hi1 = chi1 if chi1 > hi1 else hi1
            p.lo0, p.lo1, p.hi0, p.hi1 = lo0, lo1, hi0, hi1
            p = p.parent
        return True

    def codisp(self, key: str) -> float:
        """Collusive displacement of ``key``'s point; 0 for a lone root."""
        node = self._leaf_of[key]
        best = 0.0
        parent = node.parent
        while parent is not None:
            sibling = parent.right if parent.left is node else parent.left
            ratio = sibling.n / node.n
            if ratio > best:
                best = ratio
            node = parent
            parent = node.parent
        return best

    def debug_tree(self):
        """Nested-tuple snapshot for structural verification in tests.

        Leaves render as ("leaf", n, sorted_keys, x0, x1) and branches as
        ("branch", n, q, cut, (lo0, lo1, hi0, hi1), left, right).
        """

        def render(node):
            if node is None:
                return None
            if isinstance(node, _Leaf):
                return ("leaf", node.n, tuple(sorted(node.keys)), node.x0, node.x1)
            return (
                "branch",
                node.n,
                node.q,
                node.cut,
                (node.lo0, node.lo1, node.hi0, node.hi1),
                render(node.left),
                render(node.right),
            )

        return render(self.root)


class CutForest:
    """Forest of cut trees with one live point per key, capacity-bounded.

    ``update`` applies the streaming protocol for a reoccurring key: drop
    the key's previous point, evict a random point from any full tree, then
    insert and score the new point. The returned score is the mean
    collusive displacement over trees.
    """

    __slots__ = ("tree_count", "capacity", "_rng", "trees")

    def __init__(self, tree_count: int, capacity: int, seed: int):
        if tree_count < 1:
            raise ValueError(f"tree_count must be >= 1, got {tree_count}")
        if capacity < 2:
            raise ValueError(f"capacity must be >= 2, got {capacity}")
        self.tree_count = tree_count
        self.capacity = capacity
        self._rng = SplitMix64(seed)
        self.trees = [CutTree(self._rng) for _ in range(tree_count)]

    def update(self, key: str, x0: float, x1: float) -> float:
        total = 0.0
        capacity = self.capacity
        for tree in self.trees:
            tree.delete(key)
            if len(tree) >= capacity:
                tree.delete(tree.random_key())
            tree.insert(key, x0, x1)
            total += tree.codisp(key)
        return total / self.tree_count
