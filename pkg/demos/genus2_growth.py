"""Genus 2: every multicurve in a norm ball, sorted by topological type."""
from curvecount import build_surface
from curvecount.enumeration import ALL_KEY, count_scc_table, exact_lattice_count, leading_coefficient
from curvecount.experiments import powerlaw_fit

_, dec = build_surface(2)
lc = leading_coefficient(dec)
grid = [5, 8, 12, 18, 27, 40]
table = count_scc_table(dec, grid)

print(f"leading coefficient of the lattice count: {lc}")
print(f"{'L':>4} {'multicurves':>12} {'N/L^6 / lc':>11} {'nonsep scc':>11} {'sep scc':>8}")
for L in grid:
    n = table.count(L, ALL_KEY)
    assert n == exact_lattice_count(dec, L)
    print(f"{L:4d} {n:12d} {n / L ** 6 / float(lc):11.4f} {table.count(L, 'g1b2|0-0:1'):11d}"
          f" {table.count(L, 'g1b1,g1b1|0-1:1'):8d}")

for key, name in ((ALL_KEY, "all multicurves"), ("g1b2|0-0:1", "nonseparating curves"),
                  ("g1b1,g1b1|0-1:1", "separating curves")):
    L, N = table.series(key)
    f = powerlaw_fit(L, N, exponent=6)
    print(f"{name:22s} slope {f.exponent:.3f}, correction exponent {f.kappa_hat:.2f}")
