"""
Saving and loading fitted classifiers
=====================================
"""

import numpy as np

from accuracy_limit.classifiers import fit_rde
from accuracy_limit.container import load_model, save_model

rng = np.random.default_rng(0)
x = rng.normal(size=(200, 2))
y = (x[:, 0] * x[:, 1] > 0).astype(int)

model = fit_rde("cmvg", x, y, expanded_dims=12, seed=0)
path = save_model(model, "rde_cmvg.alim")
back = load_model(path)
print(path.read_bytes()[:4], np.array_equal(back.predict(x), model.predict(x)))
