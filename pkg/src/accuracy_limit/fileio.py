"""CSV tables, epoch CSV files and MNIST IDX files.

Floats are written with ``repr`` precision and a ``.`` decimal point
regardless of locale, so equal arrays always give byte-identical files.
"""

from __future__ import annotations

import csv
import gzip
import io
import struct
from pathlib import Path

import numpy as np

from .dataset import LabeledDataset
from .errors import FormatError
from .features import STAGES, Epoch

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801
MANIFEST_PREFIX = "#manifest:"


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_table(path, header, rows, manifest: str | None = None) -> Path:
    """Write a CSV with a header row and, optionally, a trailing
    ``#manifest: <ref>`` comment line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    if manifest is not None:
        buf.write(f"{MANIFEST_PREFIX} {manifest}\n")
    path.write_text(buf.getvalue(), encoding="utf-8")
    return path


def read_table(path) -> tuple[list[str], list[list[str]]]:
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines()
             if ln and not ln.startswith("#")]
    if not lines:
        raise FormatError(f"{path}: empty CSV")
    rows = list(csv.reader(lines))
    return rows[0], rows[1:]


def write_dataset_csv(path, data: LabeledDataset, manifest: str | None = None) -> Path:
    header = [f"f{i + 1}" for i in range(data.n_features)] + ["label"]
    rows = (list(x) + [int(l)] for x, l in zip(data.features, data.labels))
    return write_table(path, header, rows, manifest)


def read_dataset_csv(path) -> LabeledDataset:
    header, rows = read_table(path)
    if not header or header[-1] != "label":
        raise FormatError(f"{path}: last column must be 'label'")
    try:
        arr = np.array(rows, dtype=float).reshape(len(rows), len(header))
    except ValueError as exc:
        raise FormatError(f"{path}: non-numeric entry ({exc})") from None
    return LabeledDataset(arr[:, :-1], arr[:, -1].astype(int))


def parse_label(text: str) -> int:
    text = text.strip()
    if text in STAGES:
        return STAGES.index(text)
    try:
        return int(text)
    except ValueError:
        raise FormatError(f"label {text!r} is neither an integer nor one of {STAGES}") from None


def write_epochs_csv(path, epochs, manifest: str | None = None) -> Path:
    n = len(epochs[0])
    header = ["label"] + [f"s{i + 1}" for i in range(n)]
    rows = ([-1 if e.label is None else e.label] + list(e.samples) for e in epochs)
    return write_table(path, header, rows, manifest)


def read_epochs_csv(path, sample_rate: float = 256.0) -> list[Epoch]:
    header, rows = read_table(path)
    if not header or header[0] != "label":
        raise FormatError(f"{path}: first column must be 'label'")
    out = []
    for k, row in enumerate(rows):
        if len(row) != len(header):
            raise FormatError(f"{path}: row {k + 1} has {len(row)} fields, header has {len(header)}")
        try:
            samples = np.array(row[1:], dtype=float)
        except ValueError:
            raise FormatError(f"{path}: non-numeric sample in row {k + 1}") from None
        label = parse_label(row[0])
        out.append(Epoch(samples, sample_rate, None if label < 0 else label))
    return out


def _open(path):
    path = Path(path)
    return gzip.open(path, "rb") if path.suffix == ".gz" else open(path, "rb")


def read_idx(path, expected_magic: int | None = None) -> np.ndarray:
    """Read an unsigned-byte IDX array (big-endian header)."""
    with _open(path) as fh:
        head = fh.read(4)
        if len(head) < 4:
            raise FormatError(f"{path}: truncated IDX header")
        magic = struct.unpack(">I", head)[0]
        if magic not in (IDX_IMAGES_MAGIC, IDX_LABELS_MAGIC) or (
                expected_magic is not None and magic != expected_magic):
            raise FormatError(f"{path}: bad IDX magic number 0x{magic:08x}")
        ndim = magic & 0xFF
        dims = struct.unpack(f">{ndim}I", fh.read(4 * ndim))
        body = fh.read()
    if len(body) != int(np.prod(dims)):
        raise FormatError(f"{path}: IDX payload has {len(body)} bytes, header promises {np.prod(dims)}")
    return np.frombuffer(body, dtype=np.uint8).reshape(dims)


def write_idx(path, array) -> Path:
    arr = np.asarray(array, dtype=np.uint8)
    if arr.ndim not in (1, 3):
        raise FormatError("IDX writer supports label vectors (1-D) and image stacks (3-D)")
    magic = IDX_LABELS_MAGIC if arr.ndim == 1 else IDX_IMAGES_MAGIC
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = struct.pack(">I", magic) + struct.pack(f">{arr.ndim}I", *arr.shape) + arr.tobytes()
    path.write_bytes(gzip.compress(data, mtime=0) if path.suffix == ".gz" else data)
    return path


def load_mnist(images_path, labels_path) -> tuple[np.ndarray, np.ndarray]:
    """Images flattened to 784 columns and scaled by 1/255, plus labels."""
    images = read_idx(images_path, IDX_IMAGES_MAGIC)
    labels = read_idx(labels_path, IDX_LABELS_MAGIC)
    if images.shape[0] != labels.shape[0]:
        raise FormatError("image and label files disagree on the number of items")
    return images.reshape(images.shape[0], -1).astype(float) / 255.0, labels.astype(int)
