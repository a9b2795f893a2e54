import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvecount import build_surface
from curvecount.curves import (TypeInvariant, arc_counts, canonical_type, decode, topological_type,
                               type_of)
from curvecount.dtcoords import DTCoordinates, twist_about_cuff, validate
from curvecount.enumeration import enumerate_points

NONSEP = "g1b2|0-0:1"
SEP = "g1b1,g1b1|0-1:1"


def naive_points(dec, L):
    """Six nested loops over the box, filtered by the validity rules."""
    out = set()
    r = range(-L, L + 1)
    for m1, m2, m3 in itertools.product(range(L + 1), repeat=3):
        if m1 + m2 + m3 > L:
            continue
        for t1 in r:
            for t2 in r:
                if m1 + m2 + m3 + abs(t1) + abs(t2) > L:
                    continue
                for t3 in r:
                    if m1 + m2 + m3 + abs(t1) + abs(t2) + abs(t3) > L:
                        continue
                    c = DTCoordinates((m1, m2, m3), (t1, t2, t3))
                    if not c.is_zero() and validate(dec, c)[0]:
                        out.add(c)
    return out


@pytest.fixture(scope="module")
def ball12(g2):
    return list(enumerate_points(g2, 12))


def test_enumeration_matches_naive_oracle(g2, ball12):
    naive = naive_points(g2, 12)
    assert len(ball12) == len(set(ball12)) == 26260
    assert set(ball12) == naive


def test_round_trip_decode_remeasure(g2, ball12):
    bad = []
    for c in ball12:
        mc = decode(g2, c)
        if mc.remeasure(3) != c.m:
            bad.append(c)
            continue
        cuffs = {}
        for comp, w in mc.components:
            if comp.is_cuff:
                cuffs[comp.cuff] = cuffs.get(comp.cuff, 0) + w
        if any(cuffs.get(i, 0) != (c.t[i] if c.m[i] == 0 else 0) for i in range(3)):
            bad.append(c)
    assert bad == []


def test_full_twists_preserve_type(g2):
    bad = []
    for c in enumerate_points(g2, 10):
        key = type_of(g2, c).key
        for i in range(3):
            if c.m[i] == 0:
                continue
            for n in (-2, -1, 1, 2):
                if type_of(g2, twist_about_cuff(c, i, n)).key != key:
                    bad.append((c, i, n))
    assert bad == []


@pytest.mark.parametrize("text,key", [
    ("0,0,0;1,0,0", NONSEP),
    ("1,1,0;0,0,0", NONSEP),
    ("2,1,1;1,0,-1", NONSEP),
    ("2,0,0;1,0,0", SEP),
    ("0,2,0;0,-1,0", SEP),
    ("0,0,0;2,0,0", "g1b2|0-0:2"),
    ("0,0,0;1,1,1", "g0b3,g0b3|0-1:1,0-1:1,0-1:1"),
])
def test_known_types(g2, text, key):
    assert type_of(g2, DTCoordinates.parse(text)).key == key


def test_zero_is_empty(g2):
    mc = decode(g2, DTCoordinates.zero(3))
    assert mc.is_empty and mc.type_invariant.num_components == 0


def test_genus_three_scc_types():
    _, dec = build_surface(3)
    keys = {type_of(dec, c).key for c in enumerate_points(dec, 3)
            if sum(w for _, w in decode(dec, c).components) == 1}
    assert keys == {"g2b2|0-0:1", "g1b1,g2b1|0-1:1"}


def test_scaling_multiplies_weights(g2):
    c = DTCoordinates.parse("2,1,1;1,0,-1")
    mc = decode(g2, c.scale(3))
    assert [w for _, w in mc.components] == [3]
    assert mc.type_invariant.key == "g1b2|0-0:3"


def test_arc_counts_balance():
    rng = random.Random(0)
    for _ in range(200):
        m = [rng.randint(0, 9) for _ in range(3)]
        if sum(m) % 2:
            m[0] += 1
        arcs = arc_counts(*m)
        ends = [0, 0, 0]
        for (a, b), n in arcs.items():
            assert n >= 0
            ends[a] += n
            ends[b] += n
        assert ends == m


def test_decode_rejects_invalid(g2):
    with pytest.raises(ValueError):
        decode(g2, DTCoordinates.parse("1,0,0;0,0,0"))


def test_topological_type_accepts_both_forms(g2):
    c = DTCoordinates.parse("2,1,1;1,0,-1")
    assert topological_type(g2, c) == topological_type(g2, decode(g2, c))


_labels = st.tuples(st.integers(0, 2), st.integers(1, 3))


@st.composite
def graphs(draw):
    n = draw(st.integers(1, 4))
    verts = [draw(_labels) for _ in range(n)]
    m = draw(st.integers(0, 4))
    edges = []
    for _ in range(m):
        u, v = sorted((draw(st.integers(0, n - 1)), draw(st.integers(0, n - 1))))
        edges.append((u, v, draw(st.integers(1, 3))))
    return verts, edges


@settings(max_examples=200, deadline=None)
@given(graphs(), st.randoms())
def test_canonical_type_is_relabelling_invariant_and_idempotent(g, rnd):
    verts, edges = g
    t = canonical_type(verts, edges)
    perm = list(range(len(verts)))
    rnd.shuffle(perm)
    inv = {p: k for k, p in enumerate(perm)}
    pverts = [verts[p] for p in perm]
    pedges = [(inv[u], inv[v], w) for u, v, w in edges]
    rnd.shuffle(pedges)
    assert canonical_type(pverts, pedges) == t
    assert canonical_type(list(t.vertices), list(t.edges)) == t
    assert TypeInvariant.from_key(t.key) == t
