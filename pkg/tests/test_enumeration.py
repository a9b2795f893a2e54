from fractions import Fraction

import pytest
import sympy

from curvecount import build_surface
from curvecount.enumeration import (ALL_KEY, CountTable, Sector, count_by_type, count_in_sector,
                                    count_scc_table, enumerate_points, exact_lattice_count,
                                    leading_coefficient, nonseparating_key, parity_rank, partition,
                                    separating_key)
from curvecount.experiments import torus_primitive_count
from curvecount.surface import TORUS

NONSEP = "g1b2|0-0:1"
SEP = "g1b1,g1b1|0-1:1"


def test_keys():
    assert nonseparating_key(2) == NONSEP
    assert separating_key(2) == SEP
    assert nonseparating_key(3) == "g2b2|0-0:1"
    assert separating_key(3) == "g1b1,g2b1|0-1:1"


def test_exact_count_matches_enumeration(g2):
    for L in (1, 2, 5, 9):
        assert exact_lattice_count(g2, L) == sum(1 for _ in enumerate_points(g2, L))


@pytest.mark.parametrize("L,n", [(12, 26260), (18, 246639), (27, 2518740), (40, 25059856),
                                 (48, 73423168)])
def test_pinned_counts(g2, L, n):
    assert exact_lattice_count(g2, L) == n


def test_leading_coefficient_exact_extrapolation(g2):
    # on even L the count is a degree-6 polynomial; interpolate and read off the top coefficient
    x = sympy.symbols("x")
    pts = [(L, exact_lattice_count(g2, L)) for L in range(20, 34, 2)]
    poly = sympy.Poly(sympy.interpolate(pts, x), x)
    assert poly.eval(80) == exact_lattice_count(g2, 80)
    top = poly.LC()
    assert Fraction(int(top.p), int(top.q)) == leading_coefficient(g2) == Fraction(1, 180)


def test_leading_coefficient_richardson(g2):
    a, b, c = (exact_lattice_count(g2, L) / L ** 6 for L in (20, 40, 80))
    r1, r2 = 2 * b - a, 2 * c - b
    assert abs((4 * r2 - r1) / 3 * 180 - 1) < 0.005


def test_parity_rank_and_genus_three_coefficient(g3):
    assert parity_rank(build_surface(2)[1]) == 1
    assert parity_rank(g3) == 3
    assert leading_coefficient(g3) == Fraction(2 ** 6, 479001600 * 8)
    assert leading_coefficient(TORUS) == 2


def test_doubling_ratio(g2):
    n = {L: exact_lattice_count(g2, L) for L in (12, 24, 48, 96)}
    assert n[48] / n[24] == pytest.approx(57.60306, abs=1e-5)
    assert abs(n[96] / n[48] / 64 - 1) < 0.05
    deficits = [64 - n[2 * L] / n[L] for L in (12, 24, 48)]
    assert deficits == sorted(deficits, reverse=True) and deficits[-1] > 0


def test_compiled_matches_reference(g2):
    grid = [4, 7, 10]
    ref = count_by_type(g2, grid)
    fast = count_scc_table(g2, grid)
    for L in grid:
        assert fast.count(L, ALL_KEY) == ref.total(L) == exact_lattice_count(g2, L)
        for key in (NONSEP, SEP):
            assert fast.count(L, key) == ref.count(L, key)


def test_compiled_matches_reference_genus_three(g3):
    ref = count_by_type(g3, [4])
    fast = count_scc_table(g3, [4])
    assert fast.count(4, ALL_KEY) == ref.total(4)
    for key in ("g2b2|0-0:1", "g1b1,g2b1|0-1:1"):
        assert fast.count(4, key) == ref.count(4, key) > 0


def test_worker_count_does_not_change_results(g2):
    outs = {w: count_scc_table(g2, [8, 16], workers=w).to_csv() for w in (1, 2, 8)}
    assert outs[1] == outs[2] == outs[8]


def test_partition_covers_every_index_once():
    parts = partition(23, 4)
    flat = sorted(i for p in parts for i in p)
    assert flat == list(range(24))
    assert len(parts) == 4


def test_csv_is_byte_identical_and_round_trips(g2, tmp_path):
    a = count_scc_table(g2, [6, 10]).to_csv(str(tmp_path / "a.csv"))
    b = count_scc_table(g2, [6, 10]).to_csv()
    assert a == b == (tmp_path / "a.csv").read_text()
    back = CountTable.from_csv(a)
    assert back.count(10, NONSEP) == count_scc_table(g2, [10]).count(10, NONSEP)


def test_sectors_partition_the_ball(g2):
    lo = Sector.slab(3, 0, 0.0, 0.13)
    hi = Sector.slab(3, 0, 0.13, 1.0)
    for key in (NONSEP, SEP):
        a = count_in_sector(g2, key, lo, [14]).count(14, key)
        b = count_in_sector(g2, key, hi, [14]).count(14, key)
        c = count_in_sector(g2, key, None, [14]).count(14, key)
        assert a + b == c and a > 0 and b > 0


def test_sector_contains_matches_compiled_filter(g2):
    sec = Sector((1, 0, -1), ((0.0, 1.0),) * 3 + ((0.1, 0.6),) + ((0.0, 1.0),) * 2)
    ref = sum(1 for c in enumerate_points(g2, 9) if sec.contains(c.m, c.t))
    assert count_scc_table(g2, [9], sec).count(9, ALL_KEY) == ref
    assert ref == sum(1 for _ in enumerate_points(g2, 9, sec))


@pytest.mark.parametrize("args", [((0, 0), ((0.0, 1.0),) * 3),
                                  ((0,), ((0.5, 0.2), (0.0, 1.0))),
                                  ((2,), ((0.0, 1.0), (0.0, 1.0)))])
def test_sector_validation(args):
    with pytest.raises(ValueError):
        Sector(*args)


def test_volume_fraction_of_full_sector():
    assert Sector.full(3).volume_fraction(1000) == 1.0


@pytest.mark.parametrize("grid", [[], [5, 5], [8, 4]])
def test_bad_grids(g2, grid):
    with pytest.raises(ValueError):
        count_scc_table(g2, grid)


def test_torus_pipeline_identity():
    grid = list(range(1, 65))
    table = count_by_type(TORUS, grid)
    for L in grid:
        assert table.count(L, "torus|1") == torus_primitive_count(L)
        assert table.total(L) == exact_lattice_count(TORUS, L)
