"""
Class clustering through network layers
=======================================

The MNIST subset shipped with mlxtend (5000 digits) goes through the
784-128-64-16 encoder of a supervised classifier head and of an
autoencoder. GDV per layer tracks how the digit classes cluster.
"""

import numpy as np
from mlxtend.data import mnist_data

from accuracy_limit.experiments import run_embed
from accuracy_limit.svg import scatter_plot

x, y = mnist_data()
x = x / 255.0

for mode in ["head", "autoencoder"]:
    run = run_embed(x, y, mode, n_classes=10, seed=0, n_train=4000, n_eval=1000, max_epochs=20)
    print(mode, np.round(run.gdv, 3), "metric", round(run.test_metric, 4))

# bottleneck of the last run as an SVG scatter plot
m = run.mds[3]
scatter_plot("mnist_bottleneck.svg", m.coords, run.eval_labels[m.indices], title="autoencoder L3")
