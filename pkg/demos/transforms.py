"""
Element-wise transforms and the accuracy limit
==============================================

sin and sign lose no class information for the d=1 problem; cos folds the
two class centres (at -1/2 and +1/2) onto each other.
"""

from accuracy_limit.experiments import TransformSettings, run_transform

settings = TransformSettings(n_rep=1, classifiers=["naive_bayes", "cmvg"])
rows, summary = run_transform(settings, seed=0)
for transform, kind, acc in summary:
    print(f"{transform:9s} {kind:12s} {acc:.4f}")
