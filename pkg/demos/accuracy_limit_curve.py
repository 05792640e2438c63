"""
Accuracy limit of two overlapping Gaussian classes
==================================================

Two unit-variance classes in the plane, centres a distance d apart. The
ideal classifier labels each point by the larger posterior; its accuracy is
the best any classifier can reach on this data.
"""

import numpy as np
from scipy.stats import norm

from accuracy_limit import GridSpec, confusion_grid, confusion_mc, two_class_problem
from accuracy_limit.experiments import problem_split
from accuracy_limit.classifiers import evaluate, fit_cmvg, fit_naive_bayes, fit_rde

grid = GridSpec.cube(2, half_width=8.0, spacing=0.01)

# grid integration against the closed form Phi(d/2)
for d in [0.0, 1.0, 2.0, 5.0]:
    a = confusion_grid(two_class_problem(d), grid).accuracy
    print(f"d={d:3.1f}  grid {a:.5f}  closed form {norm.cdf(d / 2):.5f}")

# Monte Carlo gives the same number with an error bar
mc = confusion_mc(two_class_problem(1.0), 1_000_000, np.random.default_rng(0))
print(f"Monte Carlo: {mc.accuracy:.5f} +- {mc.accuracy_stderr:.5f}")

# equal means, opposite correlations: only the covariance tells the classes apart
problem = two_class_problem(0.0, rho0=0.75, rho1=-0.75)
print("correlation-only limit:", round(confusion_grid(problem, grid).accuracy, 4))

data = problem_split(problem, 10_000, seed=1)
xtr, ytr = data.train()
xte, yte = data.test()
print("CMVG Bayes        ", evaluate(fit_cmvg(xtr, ytr), xte, yte).accuracy)
# naive Bayes only sees marginals, which are identical here
print("naive Bayes       ", evaluate(fit_naive_bayes(xtr, ytr), xte, yte).accuracy)
# a random expansion to 20 dimensions mixes the features so marginals differ
print("naive Bayes + RDE ", evaluate(fit_rde("naive_bayes", xtr, ytr, 20, seed=1), xte, yte).accuracy)
