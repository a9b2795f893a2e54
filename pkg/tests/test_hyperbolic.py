import math
import random

import numpy as np
import pytest

from curvecount.dtcoords import DTCoordinates, coordinate_add, same_orthant, twist_about_cuff, validate
from curvecount.enumeration import enumerate_points
from curvecount.hyperbolic import (CLEAN, HALF, INCOMPLETE, QUARTER, FenchelNielsen, GeometryError,
                                   PruningConstant, build_rep, collar_widths, count_by_length,
                                   fast_length, geometry_arrays, length, length_from_trace,
                                   pruning_constant, rotate, seam_length, translate)

FN1 = FenchelNielsen.parse("1,1,1;0,0,0")
FN2 = FenchelNielsen.parse("1.5,0.8,1.2;0.3,0,-0.4")
NONSEP = "g1b2|0-0:1"


def random_fn(rng, n=3):
    return FenchelNielsen(tuple(rng.uniform(0.2, 3.0) for _ in range(n)),
                          tuple(rng.uniform(-2.0, 2.0) for _ in range(n)))


def test_frame_moves():
    assert np.allclose(QUARTER @ QUARTER, HALF)
    assert np.allclose(HALF @ HALF, -np.eye(2))
    assert np.allclose(translate(1.3) @ translate(-1.3), np.eye(2))
    assert abs(np.linalg.det(rotate(0.7))) == pytest.approx(1.0)
    assert length_from_trace(np.trace(translate(2.5))) == pytest.approx(2.5, abs=1e-14)
    with pytest.raises(GeometryError):
        length_from_trace(1.9)


def test_length_from_trace_is_accurate_for_short_curves():
    for x in (1e-3, 0.1, 1.0):
        assert length_from_trace(2 * math.cosh(x / 2)) == pytest.approx(x, rel=1e-6)


@pytest.mark.parametrize("g", [2, 3])
def test_cuff_lengths_reproduced(request, g):
    dec = request.getfixturevalue(f"g{g}")
    rng = random.Random(g)
    for _ in range(100):
        fn = random_fn(rng, dec.num_cuffs)
        rep = build_rep(dec, fn)
        rep.check(1e-9)
        for i, li in enumerate(fn.lengths):
            assert length_from_trace(np.trace(rep.evaluate(rep.cuff_word(i)))) == pytest.approx(li, abs=1e-9)


def test_hexagons_close(g2):
    rng = random.Random(5)
    for _ in range(50):
        fn = random_fn(rng)
        for p in range(2):
            ls = [fn.lengths[i] for i in g2.slot_cuff[p]]
            g = np.eye(2)
            for j in range(3):
                d = seam_length(ls[j], ls[(j + 1) % 3], ls[(j + 2) % 3])
                g = g @ translate(ls[j] / 2) @ QUARTER @ translate(d) @ QUARTER
            assert np.allclose(np.abs(g), np.eye(2), atol=1e-9)


@pytest.mark.parametrize("coords,slots", [("1,1,0;0,0,0", (0, 1, 2)), ("0,1,1;0,0,0", (1, 2, 0)),
                                          ("1,0,1;0,0,0", (0, 2, 1))])
def test_two_seam_curves_have_closed_form_length(g2, coords, slots):
    rng = random.Random(11)
    i, j, k = slots
    for _ in range(20):
        ls = tuple(rng.uniform(0.3, 3.0) for _ in range(3))
        fn = FenchelNielsen(ls, tuple(-x / 2 for x in ls))
        assert length(g2, fn, coords) == pytest.approx(2 * seam_length(ls[i], ls[j], ls[k]), abs=1e-9)


def test_metric_full_twist_equals_curve_twist(g2):
    rng = random.Random(3)
    pts = [c for c in enumerate_points(g2, 6) if any(c.m)]
    for _ in range(60):
        fn = random_fn(rng)
        c = rng.choice(pts)
        i = rng.choice([k for k in range(3) if c.m[k]])
        shifted = fn.with_twist(i, fn.twists[i] + fn.lengths[i])
        assert length(g2, shifted, c) == pytest.approx(length(g2, fn, twist_about_cuff(c, i, -1)), rel=1e-9)


def test_lengths_of_cuffs_and_homogeneity(g2):
    assert length(g2, FN2, "0,0,0;2,0,3") == pytest.approx(2 * 1.5 + 3 * 1.2)
    c = DTCoordinates.parse("2,1,1;1,0,-1")
    assert length(g2, FN2, c.scale(3)) == pytest.approx(3 * length(g2, FN2, c), rel=1e-12)
    with pytest.raises(ValueError):
        length(g2, FN2, DTCoordinates.zero(3))


@pytest.mark.parametrize("fn", [FN1, FN2])
def test_compiled_matches_reference(g2, fn):
    geom = geometry_arrays(g2, fn)
    rep = build_rep(g2, fn)
    for c in enumerate_points(g2, 6):
        assert fast_length(g2, fn, c, geom) == pytest.approx(length(g2, rep, c), rel=1e-9, abs=1e-9)


def test_convexity_on_same_orthant_pairs(g2):
    rng = random.Random(7)

    def pick():
        while True:
            m = [rng.randint(0, 5) for _ in range(3)]
            t = [rng.randint(-5, 5) if x else rng.randint(0, 5) for x in m]
            c = DTCoordinates(tuple(m), tuple(t))
            if not c.is_zero() and validate(g2, c)[0]:
                return c

    for k in range(1000):
        fn = (FN1, FN2)[k % 2]
        a, b = pick(), pick()
        while not same_orthant(a, b):
            b = pick()
        s = coordinate_add(a, b)
        assert fast_length(g2, fn, s) <= fast_length(g2, fn, a) + fast_length(g2, fn, b) + 1e-6


def test_twist_growth(g2):
    n = 64
    for fn in (FN1, FN2):
        for text in ("2,1,1;1,0,-1", "1,1,0;0,2,0", "3,1,2;-2,1,5"):
            c = DTCoordinates.parse(text)
            for i in range(3):
                if not c.m[i]:
                    continue
                slope = (fast_length(g2, fn, twist_about_cuff(c, i, 2 * n))
                         - fast_length(g2, fn, twist_about_cuff(c, i, n))) / n
                assert slope == pytest.approx(c.m[i] * fn.lengths[i], rel=0.02)
                assert fast_length(g2, fn, twist_about_cuff(c, i, n)) / n > c.m[i] * fn.lengths[i]


def test_fenchel_nielsen_parse_and_validation():
    assert FenchelNielsen.parse(FN2.format()) == FN2
    for bad in ("1,1;0,0,0", "1,-1,1;0,0,0", "1,nan,1;0,0,0", "1,1,1", "1,1,1;0,inf,0"):
        with pytest.raises(ValueError):
            FenchelNielsen.parse(bad)


def test_collar_widths_are_decreasing_in_length():
    w = collar_widths(FenchelNielsen((0.5, 1.0, 2.0), (0, 0, 0)))
    assert w[0] > w[1] > w[2] > 0
    assert w[1] == pytest.approx(2 * math.asinh(1 / math.sinh(0.5)))


def test_pruning_constant(g2):
    pc = pruning_constant(g2, FN1, norm_max=8)
    assert pc.c_hat == pytest.approx(pc.min_ratio / 2) and pc.c_hat > 0
    assert pc.min_ratio <= pc.max_ratio
    for c in enumerate_points(g2, 5):
        nrm = sum(c.m) + sum(abs(x) for x in c.t)
        assert length(g2, FN1, c) / nrm >= pc.min_ratio - 1e-12
    assert pc.to_dict()["norm_max"] == 8


def test_count_by_length_compiled_against_doubled_reference(g2):
    pc = pruning_constant(g2, FN1, norm_max=8)
    single = count_by_length(g2, FN1, NONSEP, [2.5, 3.0, 3.5], c_hat=pc)
    double = count_by_length(g2, FN1, "g1b2|0-0:2", [5.0, 6.0, 7.0], c_hat=pc)
    assert single.metadata["path"] == "compiled" and double.metadata["path"] == "reference"
    assert [r[2] for r in single.rows] == [r[2] for r in double.rows]
    assert single.metadata["audit"]["status"] == CLEAN


def test_count_by_length_is_a_brute_force_count(g2):
    pc = pruning_constant(g2, FN2, norm_max=8)
    table = count_by_length(g2, FN2, NONSEP, [4.0, 5.5], c_hat=pc)
    rep = build_rep(g2, FN2)
    from curvecount.curves import type_of
    brute = [0, 0]
    for c in enumerate_points(g2, table.metadata["norm_cutoffs"][-1]):
        if type_of(g2, c).key != NONSEP:
            continue
        x = length(g2, rep, c)
        brute[0] += x <= 4.0
        brute[1] += x <= 5.5
    assert [r[2] for r in table.rows] == brute


def test_audit_flags_an_overambitious_cutoff(g2):
    greedy = PruningConstant(c_hat=1.5, min_ratio=3.0, argmin=None, max_ratio=3.0, argmax=None,
                             norm_max=0)
    table = count_by_length(g2, FN1, NONSEP, [6.0], c_hat=greedy)
    assert table.metadata["norm_cutoffs"] == [4]
    assert table.metadata["audit"] == {"status": INCOMPLETE, "flags": [3]}
    assert table.metadata["pruning"]["argmin"] is None
