"""
Sleep-stage style features from synthetic epochs
================================================

Epochs are 30 s of signal at 256 Hz. Each stage profile adds its own
sinusoids to band-limited noise; Fourier and autocorrelation features are
then fed to a classifier.
"""

from accuracy_limit.features import FeatureSpec, StageProfile, synth_epochs
from accuracy_limit.experiments import run_features

profiles = [StageProfile(components=((f, 3.0),)) for f in (5.0, 10.0, 15.0, 20.0, 25.0)]
epochs = synth_epochs(profiles, n_per_class=60, seed=0)

for spec in [FeatureSpec.fourier(), FeatureSpec.autocorrelation()]:
    res = run_features(epochs, spec, ["naive_bayes", "cmvg"], seed=0)
    print(spec.kind, {k: round(v, 3) for k, v in res.accuracy.items()})

# identical profiles: nothing to learn, accuracy near 1/5
same = synth_epochs([profiles[1]] * 5, n_per_class=60, seed=1)
print("identical", run_features(same, FeatureSpec.fourier(), ["naive_bayes"], seed=1).accuracy)
