"""Primitive vectors on the torus: the one case where the answer is known in closed form."""
import math

import numpy as np

from curvecount.experiments import TORUS_COEFFICIENT, powerlaw_fit, torus_primitive_count

grid = sorted({int(round(x)) for x in np.geomspace(64, 2048, 11)})
counts = [torus_primitive_count(L) for L in grid]

print("simple closed curves on the torus with |p| + |q| <= L")
for L, n in zip(grid, counts):
    print(f"  L = {L:5d}   count = {n:9d}   count / 2L^2 = {n / (2 * L * L):.5f}")
print(f"coprime density 6/pi^2 = {6 / math.pi ** 2:.5f}")

fit = powerlaw_fit(grid, counts, exponent=2)
print(f"log-log slope {fit.exponent:.4f}; coefficient with h = 2: {fit.lead_coefficient:.5f}"
      f" against 12/pi^2 = {TORUS_COEFFICIENT:.5f}")
print(f"error term decays like L^(2 - {fit.kappa_hat:.2f})")
