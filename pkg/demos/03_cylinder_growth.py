"""
Counting simple cylinders as the length bound grows
===================================================

The number of simple cylinders through the slit with circumference at most
L grows linearly.  We count on a doubling grid and fit a line in log-log
coordinates.
"""

import numpy as np

from hypslit import builtin
from hypslit.experiments import cylinder_counts, fit_loglog

s, beta = builtin("hyp2")
grid = [2 ** k for k in range(3, 10)]
grid, counts = cylinder_counts(s, None, beta, grid)

for L, n in zip(grid, counts):
    print(f"L = {str(L):>4}  cylinders = {n:5d}  ratio = {float(n / L):.3f}")

fit = fit_loglog(grid, counts, points="all")
print("slope", round(fit.slope, 4))

# same fit by hand
print("numpy check", round(np.polyfit(np.log(np.array(grid, dtype=float)), np.log(counts), 1)[0], 4))
