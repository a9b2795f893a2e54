import pytest

from curvecount.dtcoords import (CoordinateError, DTCoordinates, coordinate_add, norm, orthant_of,
                                 same_orthant, twist_about_cuff, validate)


def test_parse_format_round_trip():
    c = DTCoordinates.parse(" 2,1,1;-3,0,4 ")
    assert c.m == (2, 1, 1) and c.t == (-3, 0, 4)
    assert DTCoordinates.parse(c.format()) == c
    assert str(c) == "2,1,1;-3,0,4"


@pytest.mark.parametrize("text", ["", "1,2,3", "1,a;0,0", "1;2;3"])
def test_parse_errors(text):
    with pytest.raises(CoordinateError):
        DTCoordinates.parse(text)


def test_length_mismatch():
    with pytest.raises(CoordinateError):
        DTCoordinates((1, 1), (0,))


@pytest.mark.parametrize("text,reason", [
    ("0,0,0;0,0,0", "ok"),
    ("1,1,0;0,0,0", "ok"),
    ("2,0,0;-5,3,0", "ok"),
    ("1,0,0;0,0,0", "parity"),
    ("1,1,1;0,0,0", "parity"),
    ("-1,1,0;0,0,0", "negative"),
    ("0,2,2;-1,0,0", "twist-sign"),
])
def test_validate(g2, text, reason):
    ok, why = validate(g2, DTCoordinates.parse(text))
    assert why == reason
    assert ok == (reason == "ok")


def test_dimension_mismatch(g2):
    with pytest.raises(CoordinateError, match="expected 3"):
        validate(g2, DTCoordinates.parse("1,1;0,0"))


def test_norm_scale_zero():
    c = DTCoordinates.parse("2,1,1;-3,0,4")
    assert norm(c) == 11
    assert norm(c.scale(3)) == 33
    assert DTCoordinates.zero(3).is_zero()
    with pytest.raises(CoordinateError):
        c.scale(-1)


def test_twist_moves_t_by_multiples_of_m():
    c = DTCoordinates.parse("2,1,1;1,0,-1")
    assert twist_about_cuff(c, 0, 3).t == (7, 0, -1)
    assert twist_about_cuff(c, 2, -2).t == (1, 0, -3)
    assert twist_about_cuff(twist_about_cuff(c, 1, 5), 1, -5) == c


def test_orthants_and_addition():
    a = DTCoordinates.parse("2,0,0;1,0,0")
    b = DTCoordinates.parse("1,1,0;2,-1,0")
    assert orthant_of(a)[0] == orthant_of(b)[0]
    assert same_orthant(a, b)
    assert coordinate_add(a, b) == DTCoordinates.parse("3,1,0;3,-1,0")
    c = DTCoordinates.parse("1,1,0;-1,0,0")
    assert not same_orthant(a, c)
    with pytest.raises(CoordinateError, match="orthant"):
        coordinate_add(a, c)
