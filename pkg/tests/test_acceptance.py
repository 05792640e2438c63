"""Acceptance criteria, one test per criterion.

Each test prints a single ``CRITERION <n> PASS|FAIL: <details>`` line.
Run them alone with

    pytest tests/test_acceptance.py -v -s

Whole-experiment criteria go through the command line entry point, so the
determinism criterion (12) can re-execute every one of those runs from its
manifest and compare the CSV bytes.
"""

import json
import time

import numpy as np
import pytest
from scipy.stats import norm

from accuracy_limit.cli import EXIT_OK, main
from accuracy_limit.density_limit import GridSpec, confusion_grid, confusion_mc, two_class_problem
from accuracy_limit.dsc import DscControl, generate, offdiag_rms
from accuracy_limit.features import Epoch, autocorr_feature, fourier_feature
from accuracy_limit.fileio import read_table
from accuracy_limit.metrics import gdv
from accuracy_limit.neuralnet import LayerSpec, backward, init_model, loss_value, one_hot

A_MAX_D1 = 0.6915
RUNS = {}   # name -> output directory of every command line run made here


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\nCRITERION {n} {'PASS' if ok else 'FAIL'}: {detail}", flush=True)
        assert ok, f"criterion {n}: {detail}"
    return emit


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance")


def cli(workdir, name, command, *sets):
    out = workdir / name
    args = [command, "--out", str(out)]
    for s in sets:
        args += ["--set", s]
    t0 = time.time()
    code = main(args)
    assert code == EXIT_OK, f"{command} exited with {code}"
    RUNS[name] = (command, out)
    return out, time.time() - t0


def table(path):
    header, rows = read_table(path)
    return [dict(zip(header, r)) for r in rows]


# ------------------------------------------------------------------ 1


def test_criterion_01_analytic_limit(report):
    t0 = time.time()
    res = confusion_grid(two_class_problem(1.0), GridSpec.cube(2, 8.0, 0.01))
    elapsed = time.time() - t0
    closed = norm.cdf(0.5)
    ok = abs(res.accuracy - A_MAX_D1) <= 0.001 and elapsed < 30
    report(1, ok, f"A_max(d=1)={res.accuracy:.6f} (target 0.6915 +- 0.001, Phi(1/2)={closed:.6f}), "
                  f"grid time {elapsed:.1f}s (< 30s)")


# ------------------------------------------------------------------ 2


def test_criterion_02_limit_curve(workdir, report):
    out, _ = cli(workdir, "c02_limit", "limit", "seed=2", "limit.classifiers=false",
                 "limit.distances=[0, 0.5, 1, 1.5, 2, 2.5, 3, 3.5, 4, 4.5, 5]")
    a = np.array([float(r["a_max"]) for r in table(out / "limit.csv")])
    ok = bool(np.all(np.diff(a) > 0)) and abs(a[0] - 0.5) <= 0.001 and a[-1] >= 0.99
    report(2, ok, f"strictly increasing={bool(np.all(np.diff(a) > 0))}, A_max(0)={a[0]:.6f} (0.5 +- 0.001), "
                  f"A_max(5)={a[-1]:.6f} (>= 0.99)")


# ------------------------------------------------------------------ 3


def test_criterion_03_classifiers_reach_limit(workdir, report):
    # single 2000-point test sets scatter by about 0.01; classifier columns average 5 data sets
    out1, _ = cli(workdir, "c03_d1", "limit", "seed=3", "limit.distances=[1.0]", "limit.n_rep=5")
    out0, _ = cli(workdir, "c03_corr", "limit", "seed=3", "limit.distances=[0.0]", "limit.rho0=0.75",
                  "limit.rho1=-0.75", "limit.n_rep=5")
    r1 = table(out1 / "limit.csv")[0]
    r0 = table(out0 / "limit.csv")[0]
    cm, pc = float(r1["a_cmvg"]), float(r1["a_perceptron"])
    lim0 = float(r0["a_max"])
    nb, rde = float(r0["a_nb"]), float(r0["a_nb_rde"])
    ok = (abs(cm - A_MAX_D1) <= 0.02 and abs(pc - A_MAX_D1) <= 0.02 and abs(rde - lim0) <= 0.02
          and abs(nb - 0.5) <= 0.03)
    report(3, ok, f"d=1: CMVG {cm:.4f}, perceptron {pc:.4f} (0.6915 +- 0.02); correlation-only "
                  f"(A_max {lim0:.4f}): NB+RDE20 {rde:.4f} (+- 0.02), NB {nb:.4f} (0.5 +- 0.03)")


# ------------------------------------------------------------------ 4

GRID_MC_PROBLEMS = [(1.0, 0.0, 0.0), (0.0, 0.75, -0.75), (2.0, 0.5, -0.3)]


def test_criterion_04_grid_vs_mc(report):
    lines, ok = [], True
    for k, (d, r0, r1) in enumerate(GRID_MC_PROBLEMS):
        p = two_class_problem(d, r0, r1)
        g = confusion_grid(p, GridSpec.cube(2, 8.0, 0.01)).accuracy
        mc = confusion_mc(p, 1_000_000, np.random.default_rng(400 + k))
        diff = abs(g - mc.accuracy)
        ok &= diff <= 3 * mc.accuracy_stderr
        lines.append(f"(d={d}, rho={r0}/{r1}) |{g:.5f}-{mc.accuracy:.5f}|={diff:.5f} vs 3se={3 * mc.accuracy_stderr:.5f}")
    report(4, ok, "; ".join(lines))


# ------------------------------------------------------------------ 5


def _fd(model, x, t, loss, h=1e-5):
    out = []
    for w, b in zip(model.weights, model.biases):
        for p in (w, b):
            flat = p.reshape(-1)
            for i in range(flat.size):
                old = flat[i]
                flat[i] = old + h
                up = loss_value(model, x, t, loss)
                flat[i] = old - h
                down = loss_value(model, x, t, loss)
                flat[i] = old
                out.append((up - down) / (2 * h))
    return np.array(out)


def _random_case(seed):
    rng = np.random.default_rng(seed)
    n_layers = int(rng.integers(1, 4))
    sizes = [int(v) for v in rng.integers(1, 6, n_layers + 1)]
    sizes[-1] = max(sizes[-1], 2)
    loss = ["categorical_crossentropy", "mean_squared_error"][seed % 2]
    out_act = "softmax" if loss == "categorical_crossentropy" else ["linear", "relu", "softmax"][seed % 3]
    specs = [LayerSpec(a, b, "relu") for a, b in zip(sizes[:-1], sizes[1:])]
    specs[-1] = LayerSpec(sizes[-2], sizes[-1], out_act)
    model = init_model(specs, seed)
    if model.n_params > 50:
        return None
    for b in model.biases:
        b[:] = rng.normal(scale=0.1, size=b.shape)
    x = rng.normal(size=(5, sizes[0]))
    t = one_hot(rng.integers(0, sizes[-1], 5), sizes[-1]) if loss == "categorical_crossentropy" \
        else rng.normal(size=(5, sizes[-1]))
    return model, x, t, loss


def test_criterion_05_gradients(report):
    t0 = time.time()
    worst, checked, seed = 0.0, 0, 0
    while checked < 100:
        case = _random_case(seed)
        seed += 1
        if case is None:
            continue
        model, x, t, loss = case
        a = backward(model, x, t, loss).flat()
        n = _fd(model, x, t, loss)
        # relative error; components below 1e-6 in size are compared against 1e-6
        rel = np.abs(a - n) / np.maximum(np.maximum(np.abs(a), np.abs(n)), 1e-6)
        worst = max(worst, float(rel.max()))
        checked += 1
    elapsed = time.time() - t0
    report(5, worst <= 1e-4 and elapsed < 60,
           f"{checked} models (<= 50 parameters), worst relative error {worst:.2e} (<= 1e-4), {elapsed:.1f}s (< 60s)")


# ------------------------------------------------------------------ 6


def test_criterion_06_dsc_controls(report):
    rms = []
    for C in (0.0, 0.5, 1.0, 1.5, 2.0):
        reps = generate(DscControl(10, 1.0, C, n_rep=20, n_vec=2000, seed=600))
        rms.append(np.mean([offdiag_rms(p.sigma) for r in reps for p in r.params]))
    neg = []
    for S in (0.0, 1.0, 2.0, 4.0):
        reps = generate(DscControl(10, S, 0.5, n_rep=20, n_vec=2000, seed=601))
        neg.append(np.mean([-gdv(r.data.features, r.data.labels) for r in reps]))
    ok = (bool(np.all(np.diff(rms) >= 0)) and rms[0] == 0.0 and abs(rms[-1] - 1.0) <= 1e-12
          and bool(np.all(np.diff(neg) >= 0)))
    report(6, ok, "offdiag RMS over C=0..2: " + ", ".join(f"{v:.4f}" for v in rms)
           + "; mean -GDV over S=0,1,2,4: " + ", ".join(f"{v:.4f}" for v in neg))


# ------------------------------------------------------------------ 7


def test_criterion_07_dsc_classifiers(workdir, report):
    t0 = time.time()
    out_s, _ = cli(workdir, "c07_s_sweep", "sweep", "seed=7", "sweep.dimensions=[5]", "sweep.correlations=[0.0]",
                   "sweep.separations=[0, 0.5, 1, 1.5, 2, 2.5, 3]", "sweep.n_rep=20")
    out_c, _ = cli(workdir, "c07_plateau", "sweep", "seed=7", "sweep.dimensions=[5]", "sweep.correlations=[1.0]",
                   "sweep.separations=[0.1]", "sweep.n_rep=20")
    elapsed = time.time() - t0
    rows = table(out_s / "sweep_summary.csv")
    worst = 0.0
    for S in sorted({r["S"] for r in rows}, key=float):
        m = [float(r["mean_accuracy"]) for r in rows if r["S"] == S]
        worst = max(worst, max(m) - min(m))
    plateau = {r["classifier"]: float(r["mean_accuracy"]) for r in table(out_c / "sweep_summary.csv")}
    failed = sum(int(r["n_failed"]) for r in rows + table(out_c / "sweep_summary.csv"))
    ok = (worst <= 0.03 and abs(plateau["perceptron"] - 0.8) <= 0.05 and abs(plateau["cmvg"] - 0.8) <= 0.05
          and plateau["naive_bayes"] <= 0.6 and elapsed < 900)
    report(7, ok, f"C=0 sweep: largest pairwise gap {worst:.4f} (<= 0.03); S=0.1, C=1: perceptron "
                  f"{plateau['perceptron']:.4f}, CMVG {plateau['cmvg']:.4f} (0.8 +- 0.05), NB "
                  f"{plateau['naive_bayes']:.4f} (<= 0.6); failed reps {failed}; {elapsed:.0f}s (< 900s)")


# ------------------------------------------------------------------ 8


def test_criterion_08_transforms(workdir, report):
    out, _ = cli(workdir, "c08_transform", "transform", "seed=8", "transform.n_rep=5")
    acc = {(r["transform"], r["classifier"]): float(r["mean_accuracy"])
           for r in table(out / "transform_summary.csv")}
    parts, ok = [], True
    for kind in ("perceptron", "naive_bayes", "cmvg"):
        base = acc[("identity", kind)]
        for t in ("sine", "signum"):
            ok &= abs(acc[(t, kind)] - base) <= 0.02
        ok &= abs(acc[("cosine", kind)] - 0.5) <= 0.03
        parts.append(f"{kind}: identity {base:.4f}, sine {acc[('sine', kind)]:.4f}, signum "
                     f"{acc[('signum', kind)]:.4f} (+- 0.02 of identity), cosine {acc[('cosine', kind)]:.4f} (0.5 +- 0.03)")
    report(8, ok, "; ".join(parts))


# ------------------------------------------------------------------ 9


def test_criterion_09_gdv(report):
    hand = gdv([[0], [1], [2], [3]], [0, 0, 1, 1])
    rng = np.random.default_rng(900)
    x = rng.normal(size=(300, 4)) + np.repeat(rng.normal(size=(3, 4)) * 2, 100, axis=0)
    y = np.repeat([0, 1, 2], 100)
    scale = rng.uniform(0.1, 10, 4) * rng.choice([-1, 1], 4)
    affine = abs(gdv(scale * x + rng.normal(size=4) * 50, y) - gdv(x, y))
    same = gdv(rng.normal(size=(10_000, 3)), rng.integers(0, 2, 10_000))
    ok = abs(hand + 0.4472) <= 1e-4 and affine <= 1e-9 and abs(same) <= 0.02
    report(9, ok, f"hand {hand:.6f} (-0.4472 +- 1e-4), affine change {affine:.1e} (<= 1e-9), "
                  f"same-distribution N=1e4 {same:.5f} (0 +- 0.02)")


# ------------------------------------------------------------------ 10


def test_criterion_10_mnist_layers(workdir, report, mnist_idx):
    img, lab = mnist_idx
    t0 = time.time()
    common = ["seed=10", f"embed.images={img}", f"embed.labels={lab}", "embed.n_train=4000",
              "embed.n_eval=1000", "embed.max_epochs=20"]
    out_h, _ = cli(workdir, "c10_head", "embed", *common, "embed.mode=head")
    out_a, _ = cli(workdir, "c10_autoencoder", "embed", *common, "embed.mode=autoencoder")
    elapsed = time.time() - t0
    gh = [float(r["gdv"]) for r in table(out_h / "embed_gdv.csv")]
    ga = [float(r["gdv"]) for r in table(out_a / "embed_gdv.csv")]
    head_acc = float(table(out_h / "embed_summary.csv")[0]["test_accuracy"])
    ok = bool(np.all(np.diff(gh) < 0)) and ga[3] <= ga[0] - 0.01 and elapsed < 1200
    report(10, ok, "head GDV L0..L3 " + ", ".join(f"{v:.4f}" for v in gh) + f" (strictly decreasing; "
           f"test accuracy {head_acc:.3f}); autoencoder GDV " + ", ".join(f"{v:.4f}" for v in ga)
           + f" (L3 <= L0 - 0.01); {elapsed:.0f}s (< 1200s); 4000/1000 split of the 5000-image subset")


# ------------------------------------------------------------------ 11

SEPARABLE = [{"components": [[f, 3.0]], "noise_std": 1.0} for f in (5.0, 10.0, 15.0, 20.0, 25.0)]
IDENTICAL = [{"components": [[10.0, 3.0]], "noise_std": 1.0}] * 5


def _literal_fourier(x, freq, rate):
    n = np.arange(1, x.size + 1)
    c = sum(float(v) * np.cos(2 * np.pi * freq * k / rate) for v, k in zip(x, n))
    s = sum(float(v) * np.sin(2 * np.pi * freq * k / rate) for v, k in zip(x, n))
    return (c * c + s * s) ** 0.5


def _literal_autocorr(x, lag):
    x = [float(v) for v in x]
    m = sum(x) / len(x)
    var = sum((v - m) ** 2 for v in x) / len(x)
    return sum((x[t] - m) * (x[t + lag] - m) for t in range(len(x) - lag)) / (len(x) - lag) / var


def test_criterion_11_sleep_substitute(workdir, report):
    n_per_class = 200
    common = ["seed=11", "features.classifiers=[naive_bayes]", f"features.n_per_class={n_per_class}"]
    out_s, _ = cli(workdir, "c11_separable", "features", *common, f"features.profiles={json.dumps(SEPARABLE)}")
    out_i, _ = cli(workdir, "c11_identical", "features", *common, f"features.profiles={json.dumps(IDENTICAL)}")
    sep = float(table(out_s / "features_accuracy.csv")[0]["accuracy"])
    same = float(table(out_i / "features_accuracy.csv")[0]["accuracy"])
    k, n_test = 5, round(0.2 * 5 * n_per_class)
    band = 3 * np.sqrt((1 / k) * (1 - 1 / k) / n_test)      # binomial 3-sigma around 1/K
    rng = np.random.default_rng(1100)
    worst = 0.0
    for _ in range(3):
        ep = Epoch(rng.normal(size=7680).cumsum() * 0.1 + rng.normal(size=7680))
        for f in (5.0, 10.0, 30.0):
            want = _literal_fourier(ep.samples, f, ep.sample_rate)
            worst = max(worst, abs(fourier_feature(ep, f) - want) / want)
        for lag in (1, 3, 11):
            want = _literal_autocorr(ep.samples, lag)
            worst = max(worst, abs(autocorr_feature(ep, lag) - want) / abs(want))
    ok = sep >= 0.9 and abs(same - 1 / k) <= band and worst <= 1e-6
    report(11, ok, f"separable 5-stage accuracy {sep:.4f} (>= 0.9); identical profiles {same:.4f} "
                   f"(1/5 +- {band:.3f}, binomial 3 sigma at n_test={n_test}); extractor vs literal "
                   f"formula worst relative error {worst:.1e} (<= 1e-6)")


# ------------------------------------------------------------------ 12


def test_criterion_12_determinism(workdir, report):
    if not RUNS:
        pytest.skip("run the whole acceptance module so there are runs to replay")
    mismatched, compared = [], 0
    for name, (command, out) in sorted(RUNS.items()):
        replay = workdir / f"replay_{name}"
        code = main([command, "--from-manifest", str(out / "manifest.json"), "--out", str(replay)])
        if code != EXIT_OK:
            mismatched.append(f"{name} (exit {code})")
            continue
        for p in sorted(out.glob("*.csv")):
            compared += 1
            if p.read_bytes() != (replay / p.name).read_bytes():
                mismatched.append(f"{name}/{p.name}")
    report(12, not mismatched, f"{len(RUNS)} runs replayed from their manifests, {compared} CSVs compared, "
                               f"mismatches: {mismatched or 'none'}")
