import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from snipminer import (
    EdgeUpdate,
    MissingLabelError,
    View,
    Window,
    canonicalize,
    extract_new_snippets,
)
from snipminer._core import make_extractor

import helpers


def U(op, src, dst, t, rel="", sl=None, dl=None):
    return EdgeUpdate(op, src, rel, dst, t, sl, dl)


# ---------------------------------------------------------------- canonicalize


def test_canonicalize_id_view():
    seq = [U("+", "a", "b", 0, rel="r"), U("-", "a", "b", 1, rel="r")]
    assert canonicalize(seq, View.ID) == "(+,a,r,b)|(-,a,r,b)"


def test_canonicalize_order_view():
    seq = [U("+", "x", "y", 0), U("+", "y", "z", 1)]
    assert canonicalize(seq, View.ORDER) == "(+,0,,1)|(+,1,,2)"


def test_canonicalize_label_view():
    seq = [U("+", "x", "y", 0, sl="red", dl="blue")]
    assert canonicalize(seq, View.LABEL) == "(+,red,,blue)"


def test_canonicalize_label_missing_label_names_update():
    with pytest.raises(MissingLabelError, match=r"\(\+,x,,y,t=0"):
        canonicalize([U("+", "x", "y", 0, sl="red")], View.LABEL)


def test_canonicalize_empty_sequence():
    with pytest.raises(ValueError):
        canonicalize([], View.ID)


def test_canonicalize_order_self_loop():
    assert canonicalize([U("+", "x", "x", 0)], View.ORDER) == "(+,0,,0)"


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_order_view_invariant_under_renaming(seed, n):
    rng = random.Random(seed)
    seq = helpers.random_stream(rng, n, node_count=5)
    names = sorted({u.src for u in seq} | {u.dst for u in seq})
    mapping = dict(zip(names, rng.sample([f"z{i}" for i in range(40)], len(names))))
    renamed = [
        EdgeUpdate(u.op, mapping[u.src], u.rel, mapping[u.dst], u.t)
        for u in seq
    ]
    assert canonicalize(seq, View.ORDER) == canonicalize(renamed, View.ORDER)


# ---------------------------------------------------------------- extraction


def test_extract_connected_pair():
    window = Window(2.0, [U("+", "a", "b", 0.0)])
    occs = extract_new_snippets(window, U("+", "b", "c", 1.0), 1.0, View.ORDER, 2)
    assert [(o.key, o.t) for o in occs] == [
        ("(+,0,,1)", 1.0),
        ("(+,0,,1)|(+,1,,2)", 1.0),
    ]


def test_extract_disjoint_nodes_fail_connectivity():
    window = Window(2.0, [U("+", "a", "b", 0.0)])
    occs = extract_new_snippets(window, U("+", "c", "d", 1.0), 1.0, View.ORDER, 2)
    assert [o.key for o in occs] == ["(+,0,,1)"]
    assert len(window.entries) == 2  # nothing evicted


def test_extract_evicts_stale_entries():
    window = Window(2.0, [U("+", "a", "b", 0.0)])
    occs = extract_new_snippets(window, U("+", "b", "c", 5.0), 5.0, View.ORDER, 2)
    assert [o.key for o in occs] == ["(+,0,,1)"]
    assert [u.t for u in window.entries] == [5.0]


def test_extract_eviction_boundary_is_strict():
    # an entry exactly delta_max old stays in the window
    window = Window(2.0, [U("+", "a", "b", 0.0)])
    occs = extract_new_snippets(window, U("+", "b", "c", 2.0), 2.0, View.ID, 2)
    assert len(occs) == 2


def test_extract_k1_skips_window_maintenance():
    window = Window(2.0, [U("+", "a", "b", 0.0)])
    occs = extract_new_snippets(window, U("+", "b", "c", 9.0), 9.0, View.ID, 1)
    assert [o.key for o in occs] == ["(+,b,,c)"]
    assert len(window.entries) == 1  # untouched


def test_extract_connected_only_through_new_update():
    # a-b and c-d are disjoint until the new update b-c bridges them
    window = Window(10.0, [U("+", "a", "b", 0.0), U("+", "c", "d", 1.0)])
    occs = extract_new_snippets(window, U("+", "b", "c", 2.0), 2.0, View.ID, 3)
    keys = {o.key for o in occs}
    assert "(+,a,,b)|(+,c,,d)|(+,b,,c)" in keys
    assert len(occs) == 4  # singleton, two pairs, one triple


def test_equal_timestamps_keep_arrival_order():
    window = Window(5.0)
    extract_new_snippets(window, U("+", "a", "b", 1.0), 1.0, View.ID, 2)
    occs = extract_new_snippets(window, U("-", "b", "c", 1.0), 1.0, View.ID, 2)
    assert occs[1].key == "(+,a,,b)|(-,b,c)".replace("b,c", "b,,c")  # window order


def test_extract_output_bound():
    rng = random.Random(5)
    window = Window(30.0)
    for i in range(120):
        u = helpers.random_stream(rng, 1, node_count=6)[0]
        u = EdgeUpdate(u.op, u.src, u.rel, u.dst, float(i))
        m_before = sum(1 for e in window.entries if i - e.t <= 30.0) + 1
        occs = extract_new_snippets(window, u, float(i), View.ID, 3)
        bound = sum(math.comb(m_before - 1, k - 1) for k in (1, 2, 3))
        assert len(occs) <= bound


@settings(max_examples=25, deadline=None)
@given(
    st.integers(0, 2**32 - 1),
    st.integers(1, 25),
    st.sampled_from([1, 2, 3]),
    st.floats(0.5, 20.0),
)
def test_extraction_matches_brute_force(seed, n, k_max, delta_max):
    rng = random.Random(seed)
    stream = helpers.random_stream(rng, n, node_count=5, with_labels=True)
    for view in View:
        extractor = make_extractor(delta_max, k_max, view)
        got = helpers.extractor_occurrences(stream, extractor)
        want = helpers.brute_force_occurrences(stream, delta_max, k_max, view)
        assert got == want
