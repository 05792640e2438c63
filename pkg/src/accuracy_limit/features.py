"""Element-wise feature transforms and spectral/autocorrelation epoch features.

An epoch is a fixed window of a single-channel signal (30 s at 256 Hz, i.e.
7680 samples, by default). Features reduce each epoch to a short vector:
Fourier magnitudes at chosen frequencies or normalized autocorrelation
coefficients at chosen lags.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._numerics import check_finite
from .dataset import LabeledDataset
from .errors import ConfigurationError, DomainError, InputError

STAGES = ("Wake", "REM", "N1", "N2", "N3")
DEFAULT_RATE = 256.0
DEFAULT_SECONDS = 30

TRANSFORMS = {
    "identity": lambda x: x,
    "sine": np.sin,
    "cosine": np.cos,
    # sign(0) is taken as +1
    "signum": lambda x: np.where(x < 0, -1.0, 1.0),
}


def apply_transform(kind: str, data):
    """Apply ``kind`` to every feature; accepts an array or a LabeledDataset."""
    if kind not in TRANSFORMS:
        raise ConfigurationError(f"unknown transform {kind!r}; choose from {sorted(TRANSFORMS)}")
    if isinstance(data, LabeledDataset):
        if kind == "identity":
            return data
        return data.with_features(TRANSFORMS[kind](data.features))
    x = np.asarray(data, dtype=float)
    return x if kind == "identity" else TRANSFORMS[kind](x)


@dataclass
class Epoch:
    samples: np.ndarray
    sample_rate: float = DEFAULT_RATE
    label: int | None = None

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float).ravel()

    def __len__(self):
        return self.samples.size


def fourier_feature(epoch: Epoch, freq: float) -> float:
    """Magnitude of the signal's projection onto cos/sin at ``freq`` Hz,
    with sample times ``n / rate`` for ``n = 1..N``."""
    if not 0.0 < freq <= epoch.sample_rate / 2:
        raise DomainError(f"frequency {freq} Hz outside (0, {epoch.sample_rate / 2}]")
    x = check_finite(epoch.samples, "epoch")
    t = np.arange(1, x.size + 1) / epoch.sample_rate
    phase = 2.0 * np.pi * freq * t
    return float(np.hypot(x @ np.cos(phase), x @ np.sin(phase)))


def autocorr_feature(epoch: Epoch, lag: int) -> float:
    """Lagged covariance averaged over the valid time steps, divided by the
    epoch variance."""
    x = check_finite(epoch.samples, "epoch")
    if not 0 <= lag < x.size:
        raise DomainError(f"lag {lag} outside [0, {x.size})")
    dev = x - x.mean()
    var = np.mean(dev * dev)
    if var == 0.0:
        raise DomainError("constant epoch has no autocorrelation")
    if lag == 0:
        return 1.0
    return float(np.mean(dev[:-lag] * dev[lag:]) / var)


@dataclass(frozen=True)
class FeatureSpec:
    kind: str
    parameters: tuple

    def __post_init__(self):
        if self.kind not in ("fourier", "autocorrelation"):
            raise ConfigurationError(f"unknown feature kind {self.kind!r}")
        if not self.parameters:
            raise ConfigurationError("feature spec needs at least one parameter")

    @classmethod
    def fourier(cls, freqs=(5.0, 10.0, 15.0, 20.0, 25.0, 30.0)) -> "FeatureSpec":
        return cls("fourier", tuple(float(f) for f in freqs))

    @classmethod
    def autocorrelation(cls, lags=(1, 3, 5, 7, 9, 11)) -> "FeatureSpec":
        return cls("autocorrelation", tuple(int(l) for l in lags))

    def validate(self, n_samples: int, sample_rate: float):
        if self.kind == "fourier":
            bad = [f for f in self.parameters if not 0 < f <= sample_rate / 2]
        else:
            bad = [l for l in self.parameters if not 1 <= l < n_samples]
        if bad:
            raise ConfigurationError(f"{self.kind} parameters {bad} invalid for this epoch geometry")

    def __call__(self, epoch: Epoch) -> np.ndarray:
        fn = fourier_feature if self.kind == "fourier" else autocorr_feature
        return np.array([fn(epoch, p) for p in self.parameters])


@dataclass
class FeatureTable:
    dataset: LabeledDataset
    kept: np.ndarray                        # indices of the input epochs that produced a row
    failures: list[tuple[int, str]] = field(default_factory=list)


def extract_features(epochs, spec: FeatureSpec) -> FeatureTable:
    """One feature row per epoch, in input order.

    Epochs that raise are skipped and reported in ``failures``; the rest of
    the run continues. Unlabelled epochs get label -1.
    """
    epochs = list(epochs)
    if not epochs:
        raise InputError("no epochs given")
    spec.validate(len(epochs[0]), epochs[0].sample_rate)
    rows, labels, kept, failures = [], [], [], []
    for i, ep in enumerate(epochs):
        try:
            rows.append(spec(ep))
        except (DomainError, ArithmeticError, ValueError) as exc:
            failures.append((i, str(exc)))
            continue
        labels.append(-1 if ep.label is None else ep.label)
        kept.append(i)
    feats = np.array(rows).reshape(len(rows), len(spec.parameters))
    return FeatureTable(LabeledDataset(feats, np.array(labels, dtype=int)), np.array(kept, dtype=int), failures)


@dataclass
class StageProfile:
    """Recipe for synthetic epochs of one class: sinusoids with random phase
    and jittered amplitude on top of band-limited Gaussian noise."""

    components: tuple = ()                  # (frequency Hz, amplitude) pairs
    noise_std: float = 1.0
    noise_band: tuple = (0.5, 30.0)         # Hz
    amplitude_jitter: float = 0.2


def _band_noise(n, rate, band, std, rng):
    spec = np.fft.rfft(rng.standard_normal(n))
    f = np.fft.rfftfreq(n, d=1.0 / rate)
    spec[(f < band[0]) | (f > band[1])] = 0.0
    x = np.fft.irfft(spec, n)
    sd = x.std()
    return x * (std / sd) if sd > 0 else x


def synth_epochs(profiles, n_per_class: int, seed: int, sample_rate: float = DEFAULT_RATE,
                 seconds: float = DEFAULT_SECONDS) -> list[Epoch]:
    """Synthetic labelled epochs, ``n_per_class`` per profile, class-ordered."""
    profiles = list(profiles)
    if len(profiles) < 2:
        raise ConfigurationError("need at least two stage profiles")
    rng = np.random.default_rng(seed)
    n = int(round(sample_rate * seconds))
    t = np.arange(1, n + 1) / sample_rate
    out = []
    for label, prof in enumerate(profiles):
        for _ in range(n_per_class):
            x = _band_noise(n, sample_rate, prof.noise_band, prof.noise_std, rng)
            for freq, amp in prof.components:
                a = amp * (1.0 + prof.amplitude_jitter * rng.standard_normal())
                x = x + a * np.cos(2 * np.pi * freq * t + rng.uniform(0, 2 * np.pi))
            out.append(Epoch(x, sample_rate, label))
    return out
