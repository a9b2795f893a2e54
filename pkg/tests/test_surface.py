import json

import pytest

from curvecount import build_surface
from curvecount.surface import TORUS


@pytest.mark.parametrize("g", [2, 3, 4, 5])
def test_counts_and_euler_characteristic(g):
    surf, dec = build_surface(g)
    assert dec.num_cuffs == 3 * g - 3 == surf.num_cuffs
    assert dec.num_pants == 2 * g - 2
    assert surf.h == 6 * g - 6
    assert dec.cell_euler_characteristic() == surf.euler_characteristic == 2 - 2 * g


@pytest.mark.parametrize("g", [2, 3, 4])
def test_gluing_is_a_fixed_point_free_involution(g):
    _, dec = build_surface(g)
    sides = [(p, j) for p in range(dec.num_pants) for j in range(3)]
    for s in sides:
        o = dec.other_side(*s)
        assert o != s
        assert dec.other_side(*o) == s
    used = [s for pair in dec.cuffs for s in pair]
    assert sorted(used) == sides


def test_genus_two_is_theta():
    _, dec = build_surface(2)
    assert dec.cuffs == (((0, 0), (1, 0)), ((0, 1), (1, 2)), ((1, 1), (0, 2)))
    assert sorted(dec.slot_cuff[0]) == sorted(dec.slot_cuff[1]) == [0, 1, 2]
    assert not any(dec.separating_cuffs())


def test_genus_three_has_no_separating_cuff():
    _, dec = build_surface(3)
    assert dec.separating_cuffs() == (False,) * 6


def test_json_round_trip_is_stable():
    _, dec = build_surface(3)
    d = json.loads(dec.to_json())
    assert d["genus"] == 3 and d["num_cuffs"] == 6
    assert len(d["gluing"]) == 6
    assert dec.to_json() == build_surface(3)[1].to_json()


@pytest.mark.parametrize("bad", [0, 1, -2, 2.0, "2"])
def test_bad_genus(bad):
    with pytest.raises(ValueError, match="genus"):
        build_surface(bad)


def test_torus_model():
    assert TORUS.h == 2 and TORUS.num_cuffs == 1
