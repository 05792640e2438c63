"""
General discrimination value
============================
"""

import numpy as np

from accuracy_limit import gdv

# the hand example: {0, 1} against {2, 3}
print(gdv([[0], [1], [2], [3]], [0, 0, 1, 1]))        # -1/sqrt(5)

rng = np.random.default_rng(0)
y = np.repeat([0, 1], 500)
z = rng.normal(size=(1000, 4))
for shift in [0, 1, 2, 4]:
    x = z.copy()
    x[:, 0] += shift * y
    print(shift, round(gdv(x, y), 4))

# z-scoring removes per-dimension scale and offset
print(gdv(3 * x - 7, y) - gdv(x, y))
