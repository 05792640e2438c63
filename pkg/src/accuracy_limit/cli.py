"""Command line harness: ``accuracy-limit <command> --config run.yaml``.

Every run resolves its settings (built-in defaults, then the config file's
section for the command, then ``--set key=value`` overrides), writes its
tables as CSV into ``--out`` together with ``manifest.json``, and can be
replayed with ``--from-manifest``. A master ``seed`` is mandatory.

Exit codes: 0 success, 2 configuration error, 3 input-format error,
4 numeric failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np
import yaml

from . import __version__, experiments as ex, svg
from .dsc import DscControl, generate
from .errors import (ConfigurationError, CoverageError, DomainError, FitError, FormatError, InputError,
                     NumericError)
from .features import FeatureSpec, StageProfile, synth_epochs
from .fileio import (load_mnist, read_dataset_csv, read_epochs_csv, write_dataset_csv, write_table)
from .metrics import gdv
from .embeddings import spectrum_preprocess

log = logging.getLogger("accuracy_limit")

EXIT_OK, EXIT_CONFIG, EXIT_FORMAT, EXIT_NUMERIC = 0, 2, 3, 4
MANIFEST = "manifest.json"

DEFAULT_PROFILES = [
    {"components": [[10.0, 3.0]], "noise_std": 1.0},
    {"components": [[2.0, 3.0]], "noise_std": 1.0},
]

DEFAULTS = {
    "limit": dataclasses.asdict(ex.LimitSettings()),
    "sweep": dataclasses.asdict(ex.SweepSettings()),
    "transform": dataclasses.asdict(ex.TransformSettings()),
    "features": {"epochs_csv": None, "sample_rate": 256.0, "kind": "fourier", "parameters": None,
                 "classifiers": ["naive_bayes"], "train_fraction": 0.8,
                 "profiles": DEFAULT_PROFILES, "n_per_class": 100},
    "embed": {"dataset": "mnist", "images": None, "labels": None, "epochs_csv": None, "mode": "head",
              "n_train": None, "n_eval": None, "max_epochs": 20, "svg": True},
    "gdv": {"input": None, "drop_constant": False},
    "generate": {"dimensions": 10, "separation": 1.0, "correlation": 0.5, "n_rep": 1, "n_vec": 10000,
                 "train_fraction": 0.8, "repair": "abs"},
}

PAPER_SCALE = {
    "limit": {"grid_spacing": 0.01, "mc_samples": 1_000_000},
    "sweep": {"n_rep": 100},
    "transform": {"n_rep": 100},
}


# ------------------------------------------------------------------ config

def _parse_value(text: str):
    return yaml.safe_load(text)


def apply_override(cfg: dict, assignment: str) -> None:
    if "=" not in assignment:
        raise ConfigurationError(f"--set expects key=value, got {assignment!r}")
    key, value = assignment.split("=", 1)
    node = cfg
    parts = key.strip().split(".")
    for p in parts[:-1]:
        node = node.setdefault(p, {})
        if not isinstance(node, dict):
            raise ConfigurationError(f"cannot descend into non-section {p!r}")
    node[parts[-1]] = _parse_value(value)


def resolve_config(command: str, file_cfg: dict, overrides, paper_scale: bool) -> dict:
    section = dict(DEFAULTS[command])
    if paper_scale:
        section.update(PAPER_SCALE.get(command, {}))
    user = file_cfg.get(command, {}) or {}
    if not isinstance(user, dict):
        raise ConfigurationError(f"config section {command!r} must be a mapping")
    unknown = set(user) - set(section)
    if unknown:
        raise ConfigurationError(f"unknown {command} settings: {sorted(unknown)}")
    section.update(user)
    cfg = {"seed": file_cfg.get("seed"), command: section}
    for assignment in overrides or []:
        apply_override(cfg, assignment)
    unknown = set(cfg[command]) - set(DEFAULTS[command])
    if unknown:
        raise ConfigurationError(f"unknown {command} settings: {sorted(unknown)}")
    if cfg.get("seed") is None:
        raise ConfigurationError("a master 'seed' is required (config file or --set seed=N)")
    if not isinstance(cfg["seed"], int) or isinstance(cfg["seed"], bool):
        raise ConfigurationError("seed must be an integer")
    return cfg


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()


class Run:
    """Output directory bookkeeping for one command invocation."""

    def __init__(self, out: Path, command: str, cfg: dict):
        self.out = Path(out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.command = command
        self.cfg = cfg
        self.hash = config_hash(cfg)
        self.outputs: list[str] = []

    @property
    def ref(self) -> str:
        return f"{MANIFEST} sha256={self.hash}"

    def table(self, name, header, rows):
        write_table(self.out / name, header, rows, manifest=self.ref)
        self.outputs.append(name)

    def svg(self, name, fn, *args, **kwargs):
        fn(self.out / name, *args, **kwargs)
        self.outputs.append(name)

    def finish(self, started: float):
        manifest = {"command": self.command, "config": self.cfg, "config_hash": self.hash,
                    "seed": self.cfg["seed"], "version": __version__,
                    "wall_time_s": round(time.time() - started, 3), "outputs": self.outputs}
        (self.out / MANIFEST).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------- commands

def _settings(cls, section):
    try:
        return cls(**section)
    except TypeError as exc:
        raise ConfigurationError(str(exc)) from None


def cmd_limit(run: Run):
    s = _settings(ex.LimitSettings, run.cfg["limit"])
    rows = ex.run_limit(s, run.cfg["seed"])
    run.table("limit.csv", ex.LIMIT_HEADER, rows)
    arr = np.array(rows, dtype=float)
    series = {name: arr[:, k + 1] for k, name in enumerate(ex.LIMIT_HEADER[1:])}
    run.svg("limit.svg", svg.line_plot, arr[:, 0], series, title="accuracy vs distance",
            xlabel="d", ylabel="accuracy")


def cmd_sweep(run: Run):
    s = _settings(ex.SweepSettings, run.cfg["sweep"])
    long_rows, summary = ex.run_sweep(s, run.cfg["seed"])
    run.table("sweep_long.csv", ex.SWEEP_HEADER, long_rows)
    run.table("sweep_summary.csv", ex.SWEEP_SUMMARY_HEADER, summary)


def cmd_transform(run: Run):
    s = _settings(ex.TransformSettings, run.cfg["transform"])
    rows, summary = ex.run_transform(s, run.cfg["seed"])
    run.table("transform_long.csv", ex.TRANSFORM_HEADER, rows)
    run.table("transform_summary.csv", ex.TRANSFORM_SUMMARY_HEADER, summary)


def _profiles(raw):
    out = []
    for p in raw:
        p = dict(p)
        p["components"] = tuple(tuple(c) for c in p.get("components", ()))
        if "noise_band" in p:
            p["noise_band"] = tuple(p["noise_band"])
        out.append(StageProfile(**p))
    return out


def _epochs(cfg, seed):
    if cfg.get("epochs_csv"):
        return read_epochs_csv(cfg["epochs_csv"], cfg.get("sample_rate", 256.0))
    return synth_epochs(_profiles(cfg["profiles"]), cfg["n_per_class"], ex.derive_seed(seed, 40),
                        cfg.get("sample_rate", 256.0))


def cmd_features(run: Run):
    c = run.cfg["features"]
    if c["kind"] == "fourier":
        spec = FeatureSpec.fourier(*(c["parameters"],) if c["parameters"] else ())
    elif c["kind"] == "autocorrelation":
        spec = FeatureSpec.autocorrelation(*(c["parameters"],) if c["parameters"] else ())
    else:
        raise ConfigurationError(f"unknown feature kind {c['kind']!r}")
    res = ex.run_features(_epochs(c, run.cfg["seed"]), spec, c["classifiers"], run.cfg["seed"],
                          c["train_fraction"])
    run.table("features_accuracy.csv", ["classifier", "accuracy"],
              [[k, v] for k, v in res.accuracy.items()])
    for kind, conf in res.confusion.items():
        run.table(f"confusion_{kind}.csv", [f"true_{i}" for i in range(res.n_classes)], conf.tolist())
    if res.failures:
        run.table("features_failures.csv", ["epoch", "error"], res.failures)


def cmd_embed(run: Run):
    c = run.cfg["embed"]
    if c["dataset"] == "mnist":
        if not (c["images"] and c["labels"]):
            raise ConfigurationError("embed with dataset=mnist needs 'images' and 'labels' IDX paths")
        x, y = load_mnist(c["images"], c["labels"])
        n_classes = 10
    elif c["dataset"] == "epochs":
        if not c["epochs_csv"]:
            raise ConfigurationError("embed with dataset=epochs needs 'epochs_csv'")
        eps = read_epochs_csv(c["epochs_csv"])
        x = spectrum_preprocess(eps)
        y = np.array([e.label for e in eps], dtype=int)
        n_classes = int(y.max()) + 1
    else:
        raise ConfigurationError(f"unknown embed dataset {c['dataset']!r}")
    res = ex.run_embed(x, y, c["mode"], n_classes, run.cfg["seed"], c["n_train"], c["n_eval"],
                       c["max_epochs"], with_mds=True)
    metric = "test_accuracy" if c["mode"] == "head" else "test_mse"
    run.table("embed_gdv.csv", ["layer", "gdv"], [[f"L{k}", g] for k, g in enumerate(res.gdv)])
    run.table("embed_summary.csv", ["mode", "epochs", metric], [[res.mode, res.history_len, res.test_metric]])
    for k, m in enumerate(res.mds):
        lab = res.eval_labels[m.indices]
        run.table(f"mds_L{k}.csv", ["x", "y", "label"],
                  [[a, b, int(l)] for (a, b), l in zip(m.coords, lab)])
        if c["svg"]:
            run.svg(f"mds_L{k}.svg", svg.scatter_plot, m.coords, lab,
                    title=f"L{k}  GDV={res.gdv[k]:.3f}")


def cmd_gdv(run: Run):
    c = run.cfg["gdv"]
    if not c["input"]:
        raise ConfigurationError("gdv needs an 'input' dataset CSV")
    data = read_dataset_csv(c["input"])
    value = gdv(data.features, data.labels, drop_constant=c["drop_constant"], seed=run.cfg["seed"])
    run.table("gdv.csv", ["n_points", "dimensions", "gdv"], [[len(data), data.n_features, value]])


def cmd_generate(run: Run):
    c = dict(run.cfg["generate"])
    control = DscControl(int(c["dimensions"]), float(c["separation"]), float(c["correlation"]),
                         n_rep=int(c["n_rep"]), n_vec=int(c["n_vec"]), seed=run.cfg["seed"])
    for r, rep in enumerate(generate(control, c["train_fraction"], c["repair"])):
        name = f"dataset_{r:03d}.csv"
        write_dataset_csv(run.out / name, rep.data, manifest=run.ref)
        run.outputs.append(name)
        split = np.zeros(len(rep.data), dtype=int)
        split[rep.data.test_idx] = 1
        run.table(f"split_{r:03d}.csv", ["index", "is_test"], [[i, s] for i, s in enumerate(split)])


COMMANDS = {"limit": cmd_limit, "sweep": cmd_sweep, "transform": cmd_transform, "features": cmd_features,
            "embed": cmd_embed, "gdv": cmd_gdv, "generate": cmd_generate}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="accuracy-limit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=Path, help="YAML file with 'seed' and a section per command")
        sp.add_argument("--from-manifest", type=Path, help="replay the resolved config of a previous run")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override, e.g. --set seed=3 or --set %s.n_rep=5" % name)
        sp.add_argument("--out", type=Path, default=Path("results") / name)
        sp.add_argument("--paper-scale", action="store_true", help="full-size repetitions and sampling")
        sp.add_argument("-v", "--verbose", action="store_true")
    return p


def _load_file_config(args) -> dict:
    if args.from_manifest:
        manifest = json.loads(args.from_manifest.read_text())
        if manifest.get("command") != args.command:
            raise ConfigurationError(f"manifest is for {manifest.get('command')!r}, not {args.command!r}")
        return manifest["config"]
    if args.config:
        cfg = yaml.safe_load(args.config.read_text()) or {}
        if not isinstance(cfg, dict):
            raise ConfigurationError("config file must hold a mapping")
        return cfg
    return {}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    started = time.time()
    try:
        file_cfg = _load_file_config(args)
        # a replayed manifest is already fully resolved; do not re-apply paper-scale presets
        cfg = resolve_config(args.command, file_cfg, args.set, args.paper_scale and not args.from_manifest)
        run = Run(args.out, args.command, cfg)
        COMMANDS[args.command](run)
        run.finish(started)
    except (ConfigurationError, DomainError, yaml.YAMLError) as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except (FormatError, InputError, FitError, FileNotFoundError) as exc:
        log.error("input error: %s", exc)
        return EXIT_FORMAT
    except (NumericError, CoverageError, ArithmeticError, np.linalg.LinAlgError) as exc:
        log.error("numeric failure: %s", exc)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
