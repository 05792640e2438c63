"""Binary model container.

Layout: magic ``b"ALIM"``, format version (u16, little-endian), module id
(u16), payload length (u64), then the payload: an ``.npz`` archive holding
the model arrays. Nested models (an RDE wrapper's inner classifier) are
stored as a complete container inside the payload.
"""

from __future__ import annotations

import io
import struct
from pathlib import Path

import numpy as np

from .classifiers import CmvgModel, NaiveBayesModel, PerceptronClassifier, RdeWrapper
from .errors import FormatError
from .neuralnet import LayerSpec, MlpModel

MAGIC = b"ALIM"
VERSION = 1
_HEADER = struct.Struct("<4sHHQ")

MODULE_IDS = {"mlp": 1, "naive_bayes": 2, "cmvg": 3, "perceptron": 4, "rde": 5}
_NAMES = {v: k for k, v in MODULE_IDS.items()}


def _mlp_arrays(model: MlpModel, prefix=""):
    arrays = {f"{prefix}sizes": np.array([[s.input_size, s.output_size] for s in model.layers]),
              f"{prefix}activations": np.array([s.activation for s in model.layers])}
    for k, (w, b) in enumerate(zip(model.weights, model.biases)):
        arrays[f"{prefix}w{k}"] = w
        arrays[f"{prefix}b{k}"] = b
    return arrays


def _mlp_from(arrays, prefix=""):
    sizes = arrays[f"{prefix}sizes"]
    acts = arrays[f"{prefix}activations"]
    layers = [LayerSpec(int(i), int(o), str(a)) for (i, o), a in zip(sizes, acts)]
    return MlpModel(layers, [arrays[f"{prefix}w{k}"] for k in range(len(layers))],
                    [arrays[f"{prefix}b{k}"] for k in range(len(layers))])


def _payload(model) -> tuple[str, dict]:
    if isinstance(model, MlpModel):
        return "mlp", _mlp_arrays(model)
    if isinstance(model, PerceptronClassifier):
        return "perceptron", _mlp_arrays(model.model)
    if isinstance(model, NaiveBayesModel):
        arrays = {"bandwidths": model.bandwidths, "log_prior": model.log_prior}
        arrays.update({f"samples{c}": s for c, s in enumerate(model.samples)})
        return "naive_bayes", arrays
    if isinstance(model, CmvgModel):
        return "cmvg", {"means": model.means, "covs": model.covs, "log_prior": model.log_prior,
                        "ridged": model.ridged}
    if isinstance(model, RdeWrapper):
        inner = np.frombuffer(dumps(model.inner), dtype=np.uint8)
        return "rde", {"matrix": model.matrix, "inner": inner}
    raise FormatError(f"cannot serialize objects of type {type(model).__name__}")


def dumps(model) -> bytes:
    name, arrays = _payload(model)
    buf = io.BytesIO()
    np.savez(buf, **arrays)
    payload = buf.getvalue()
    return _HEADER.pack(MAGIC, VERSION, MODULE_IDS[name], len(payload)) + payload


def loads(blob: bytes):
    if len(blob) < _HEADER.size:
        raise FormatError("container shorter than its header")
    magic, version, module, length = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported container version {version}")
    if module not in _NAMES:
        raise FormatError(f"unknown module id {module}")
    payload = blob[_HEADER.size:_HEADER.size + length]
    if len(payload) != length:
        raise FormatError("truncated payload")
    with np.load(io.BytesIO(payload), allow_pickle=False) as z:
        arrays = {k: z[k] for k in z.files}
    name = _NAMES[module]
    if name == "mlp":
        return _mlp_from(arrays)
    if name == "perceptron":
        return PerceptronClassifier(_mlp_from(arrays))
    if name == "naive_bayes":
        k = arrays["bandwidths"].shape[0]
        return NaiveBayesModel([arrays[f"samples{c}"] for c in range(k)], arrays["bandwidths"],
                               arrays["log_prior"])
    if name == "cmvg":
        return CmvgModel(arrays["means"], arrays["covs"], arrays["log_prior"], arrays["ridged"])
    return RdeWrapper(arrays["matrix"], loads(arrays["inner"].tobytes()))


def save_model(model, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dumps(model))
    return path


def load_model(path):
    return loads(Path(path).read_bytes())
