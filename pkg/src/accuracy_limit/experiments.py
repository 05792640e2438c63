"""Experiment runners that turn the library into result tables.

Each runner returns plain rows (lists) plus the header, so the command line
can write them as CSV and tests can inspect them directly. Seeds for every
cell and repetition are derived from the master seed and the cell's own
coordinates, so a cell's result does not depend on which other cells run.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .classifiers import evaluate, fit_classifier, fit_rde
from .dataset import LabeledDataset, split_dataset
from .density_limit import GridSpec, confusion_grid, confusion_mc, two_class_problem
from .dsc import DscControl, generate
from .embeddings import layer_gdv_profile, train_autoencoder, train_head
from .errors import AccuracyLimitError, ConfigurationError
from .features import FeatureSpec, apply_transform, extract_features
from .neuralnet import TrainConfig

log = logging.getLogger(__name__)

CLASSIFIERS = ("perceptron", "naive_bayes", "cmvg")


def derive_seed(master: int, *coords) -> int:
    """64-bit seed from a master seed and any numeric coordinates."""
    key = [int(master) & 0xFFFFFFFF]
    for c in coords:
        key.append(int(round(float(c) * 1_000_000)) & 0xFFFFFFFF)
    return int(np.random.SeedSequence(key).generate_state(2, np.uint32).view(np.uint64)[0])


def problem_split(problem, n_vec: int, seed: int, train_fraction: float = 0.8) -> LabeledDataset:
    rng = np.random.default_rng(seed)
    x, y = problem.sample(n_vec // problem.n_classes, rng)
    order = rng.permutation(y.size)
    return split_dataset(LabeledDataset(x[order], y[order]), train_fraction, rng)


def _fit_eval(kind, data: LabeledDataset, seed, train_config=None, n_classes=None):
    xtr, ytr = data.train()
    xte, yte = data.test()
    cfg = TrainConfig(seed=seed) if train_config is None else train_config
    model = fit_classifier(kind, xtr, ytr, n_classes=n_classes, config=cfg)
    return evaluate(model, xte, yte, n_classes)


# ---------------------------------------------------------------- limit curve

@dataclass
class LimitSettings:
    distances: list = field(default_factory=lambda: [0.5 * k for k in range(11)])
    rho0: float = 0.0
    rho1: float = 0.0
    method: str = "grid"
    grid_half_width: float = 8.0
    grid_spacing: float = 0.01
    mc_samples: int = 100_000
    classifiers: bool = True
    n_vec: int = 10_000
    rde_dims: int = 20
    n_rep: int = 1          # classifier accuracies are averaged over this many data sets


LIMIT_HEADER = ["d", "a_max", "a_perceptron", "a_nb", "a_nb_rde", "a_cmvg"]


def run_limit(s: LimitSettings, seed: int) -> list[list]:
    rows = []
    for d in s.distances:
        problem = two_class_problem(d, s.rho0, s.rho1)
        if s.method == "grid":
            a_max = confusion_grid(problem, GridSpec.cube(2, s.grid_half_width, s.grid_spacing)).accuracy
        elif s.method == "mc":
            rng = np.random.default_rng(derive_seed(seed, 1, d))
            a_max = confusion_mc(problem, s.mc_samples, rng).accuracy
        else:
            raise ConfigurationError(f"unknown limit method {s.method!r}")
        row = [float(d), a_max]
        if s.classifiers:
            acc = np.array([_limit_classifiers(problem, s, seed, d, r) for r in range(s.n_rep)])
            row += acc.mean(axis=0).tolist()
        else:
            row += [float("nan")] * 4
        log.info("limit d=%s a_max=%.4f", d, a_max)
        rows.append(row)
    return rows


def _limit_classifiers(problem, s: LimitSettings, seed, d, r):
    data = problem_split(problem, s.n_vec, derive_seed(seed, 2, d, r))
    cseed = derive_seed(seed, 3, d, r)
    xtr, ytr = data.train()
    xte, yte = data.test()
    rde = fit_rde("naive_bayes", xtr, ytr, s.rde_dims, seed=cseed)
    return [_fit_eval("perceptron", data, cseed).accuracy,
            _fit_eval("naive_bayes", data, cseed).accuracy,
            evaluate(rde, xte, yte).accuracy,
            _fit_eval("cmvg", data, cseed).accuracy]


# ---------------------------------------------------------------- DSC sweeps

@dataclass
class SweepSettings:
    dimensions: list = field(default_factory=lambda: [5])
    separations: list = field(default_factory=lambda: [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0])
    correlations: list = field(default_factory=lambda: [0.0])
    n_rep: int = 20
    n_vec: int = 10_000
    train_fraction: float = 0.8
    classifiers: list = field(default_factory=lambda: list(CLASSIFIERS))
    repair: str = "abs"


SWEEP_HEADER = ["D", "S", "C", "rep", "classifier", "accuracy", "status"]
SWEEP_SUMMARY_HEADER = ["D", "S", "C", "classifier", "mean_accuracy", "std_accuracy", "n_ok", "n_failed"]


def run_sweep(s: SweepSettings, seed: int) -> tuple[list[list], list[list]]:
    """Per-repetition accuracies (long format) and per-cell means."""
    long_rows, summary = [], []
    for D in s.dimensions:
        for S in s.separations:
            for C in s.correlations:
                control = DscControl(int(D), float(S), float(C), n_rep=s.n_rep, n_vec=s.n_vec,
                                     seed=derive_seed(seed, D, S, C))
                acc = {k: [] for k in s.classifiers}
                failed = {k: 0 for k in s.classifiers}
                for r, rep in enumerate(generate(control, s.train_fraction, s.repair)):
                    for kind in s.classifiers:
                        try:
                            a = _fit_eval(kind, rep.data, derive_seed(seed, D, S, C, r), n_classes=2).accuracy
                            status = "ok"
                            acc[kind].append(a)
                        except (AccuracyLimitError, np.linalg.LinAlgError) as exc:
                            log.warning("cell D=%s S=%s C=%s rep %d %s failed: %s", D, S, C, r, kind, exc)
                            a, status = float("nan"), "failed"
                            failed[kind] += 1
                        long_rows.append([int(D), float(S), float(C), r, kind, a, status])
                for kind in s.classifiers:
                    v = np.array(acc[kind])
                    summary.append([int(D), float(S), float(C), kind,
                                    float(v.mean()) if v.size else float("nan"),
                                    float(v.std()) if v.size else float("nan"), v.size, failed[kind]])
                log.info("sweep D=%s S=%s C=%s done", D, S, C)
    return long_rows, summary


def summary_lookup(summary, D, S, C, kind) -> float:
    for row in summary:
        if row[0] == D and np.isclose(row[1], S) and np.isclose(row[2], C) and row[3] == kind:
            return row[4]
    raise KeyError((D, S, C, kind))


# ----------------------------------------------------------- transform suite

@dataclass
class TransformSettings:
    transforms: list = field(default_factory=lambda: ["identity", "sine", "signum", "cosine"])
    distance: float = 1.0
    n_rep: int = 5
    n_vec: int = 10_000
    classifiers: list = field(default_factory=lambda: list(CLASSIFIERS))


TRANSFORM_HEADER = ["transform", "classifier", "rep", "accuracy"]
TRANSFORM_SUMMARY_HEADER = ["transform", "classifier", "mean_accuracy"]


def run_transform(s: TransformSettings, seed: int) -> tuple[list[list], list[list]]:
    """Accuracy of every classifier on the same data sets under each transform."""
    problem = two_class_problem(s.distance)
    rows = []
    for r in range(s.n_rep):
        data = problem_split(problem, s.n_vec, derive_seed(seed, 10, r))
        for t in s.transforms:
            tdata = apply_transform(t, data)
            for kind in s.classifiers:
                rows.append([t, kind, r, _fit_eval(kind, tdata, derive_seed(seed, 11, r), n_classes=2).accuracy])
    summary = []
    for t in s.transforms:
        for kind in s.classifiers:
            v = [row[3] for row in rows if row[0] == t and row[1] == kind]
            summary.append([t, kind, float(np.mean(v))])
    return rows, summary


# ------------------------------------------------------------ epoch features

@dataclass
class FeatureRun:
    accuracy: dict
    confusion: dict
    failures: list
    n_classes: int


def run_features(epochs, spec: FeatureSpec, classifiers, seed: int,
                 train_fraction: float = 0.8) -> FeatureRun:
    table = extract_features(epochs, spec)
    data = table.dataset
    if np.any(data.labels < 0):
        raise ConfigurationError("every epoch needs a label for staging")
    k = data.n_classes
    data = split_dataset(data, train_fraction, np.random.default_rng(derive_seed(seed, 20)))
    acc, conf = {}, {}
    for kind in classifiers:
        ev = _fit_eval(kind, data, derive_seed(seed, 21), n_classes=k)
        acc[kind] = ev.accuracy
        conf[kind] = ev.confusion
    return FeatureRun(acc, conf, table.failures, k)


# ----------------------------------------------------------------- embedding

@dataclass
class EmbedRun:
    mode: str
    gdv: np.ndarray
    mds: list
    eval_labels: np.ndarray
    history_len: int
    test_metric: float


def run_embed(x, y, mode: str, n_classes: int, seed: int, n_train: int | None = None,
              n_eval: int | None = None, max_epochs: int = 20, with_mds: bool = True) -> EmbedRun:
    """Train the head (supervised) or the autoencoder (unsupervised) and
    profile GDV on a held-out evaluation subset.

    ``test_metric`` is the head's accuracy or the autoencoder's
    reconstruction MSE on the evaluation subset.
    """
    rng = np.random.default_rng(derive_seed(seed, 30))
    order = rng.permutation(len(y))
    n_train = n_train or int(round(0.8 * len(y)))
    n_eval = n_eval or len(y) - n_train
    tr, ev = order[:n_train], order[n_train:n_train + n_eval]
    xtr, ytr, xev, yev = x[tr], y[tr], x[ev], y[ev]
    tseed = derive_seed(seed, 31)
    if mode == "head":
        model, hist = train_head(xtr, ytr, n_classes, TrainConfig(max_epochs=max_epochs, seed=tseed))
        metric = float(np.mean(model.predict(xev).argmax(axis=1) == yev))
    elif mode == "autoencoder":
        model, hist = train_autoencoder(xtr, TrainConfig(loss="mean_squared_error", max_epochs=max_epochs,
                                                         seed=tseed))
        metric = float(np.mean((model.predict(xev) - xev) ** 2))
    else:
        raise ConfigurationError(f"unknown embedding mode {mode!r}")
    prof = layer_gdv_profile(model, xev, yev, with_mds=with_mds, seed=seed)
    return EmbedRun(mode, prof.gdv, prof.mds, yev, len(hist), metric)

