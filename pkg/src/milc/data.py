"""Dataset ingestion, deterministic batching, and on-disk formats.

Three formats live here:

- IDX image/label files (big-endian magic + dims header, then raw bytes);
  gzipped files are accepted transparently.
- The Gaussian-model dataset container: one JSON header line followed by
  little-endian float64 feature rows and int8 labels in {-1, +1}.
- The metrics CSV written by the training harness: columns epoch, split,
  error_rate, loss_nats, mi_bits, h_y_bits, h_y_given_x_bits, six decimal
  digits, LF line endings.

Batching uses a seeded uniform permutation with the epoch index mixed into
the seed, so a (seed, epoch) pair always reproduces the same batches.
"""

from __future__ import annotations

import gzip
import json
import struct
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .validation import check_finite_array, check_labels

__all__ = [
    "IdxFormatError",
    "Dataset",
    "LabeledBatch",
    "load_idx_images",
    "load_idx_labels",
    "normalize",
    "load_idx_dataset",
    "batch_iter",
    "write_gauss_dataset",
    "read_gauss_dataset",
    "parse_config_file",
    "METRICS_COLUMNS",
    "write_metrics_csv",
    "read_metrics_csv",
]

_IDX_IMAGE_MAGIC = 2051
_IDX_LABEL_MAGIC = 2049

_GAUSS_FORMAT = "milc-gauss-dataset"
_GAUSS_VERSION = 1

METRICS_COLUMNS = (
    "epoch",
    "split",
    "error_rate",
    "loss_nats",
    "mi_bits",
    "h_y_bits",
    "h_y_given_x_bits",
)


class IdxFormatError(ValueError):
    """Malformed IDX container (bad magic, truncated or oversized payload)."""


@dataclass(frozen=True)
class LabeledBatch:
    """One minibatch: input rows plus integer labels over n_classes."""

    inputs: np.ndarray = field(repr=False)
    labels: np.ndarray = field(repr=False)
    n_classes: int

    @property
    def batch_size(self) -> int:
        return self.inputs.shape[0]


@dataclass(frozen=True)
class Dataset:
    """Immutable training dataset: inputs in [0,1], labels in [0, n_classes).

    Parameters
    ----------
    inputs : numpy.ndarray
        Shape (N, n) float64 with every entry in [0, 1].
    labels : numpy.ndarray
        Shape (N,) integers in [0, n_classes).
    n_classes : int
        Label cardinality.
    provenance : str
        Free-form source descriptor (file paths, generator settings).
    """

    inputs: np.ndarray = field(repr=False)
    labels: np.ndarray = field(repr=False)
    n_classes: int
    provenance: str = ""

    def __post_init__(self) -> None:
        x = check_finite_array(self.inputs, "inputs")
        if x.ndim != 2 or x.shape[0] < 1:
            raise ValueError(f"inputs must be a non-empty 2-D array, got shape {x.shape}")
        if np.any(x < 0.0) or np.any(x > 1.0):
            raise ValueError("inputs must lie in [0, 1] after normalization")
        lab = check_labels(self.labels, self.n_classes, "labels")
        if lab.size != x.shape[0]:
            raise ValueError(
                f"got {x.shape[0]} input rows but {lab.size} labels"
            )
        object.__setattr__(self, "inputs", x)
        object.__setattr__(self, "labels", lab)

    @property
    def n_samples(self) -> int:
        return self.inputs.shape[0]

    @property
    def n_features(self) -> int:
        return self.inputs.shape[1]


def _read_binary(path) -> bytes:
    with open(path, "rb") as fh:
        head = fh.read(2)
        fh.seek(0)
        if head == b"\x1f\x8b":
            with gzip.open(fh) as gz:
                return gz.read()
        return fh.read()


def load_idx_images(path) -> np.ndarray:
    """Parse an IDX image file into a uint8 tensor of shape (count, rows, cols).

    The payload length must match the header exactly; gzipped files are
    detected and decompressed.
    """
    data = _read_binary(path)
    if len(data) < 16:
        raise IdxFormatError(f"{path}: truncated IDX image header")
    magic, count, rows, cols = struct.unpack(">IIII", data[:16])
    if magic != _IDX_IMAGE_MAGIC:
        raise IdxFormatError(
            f"{path}: bad magic {magic}, expected {_IDX_IMAGE_MAGIC} for images"
        )
    expected = count * rows * cols
    if len(data) - 16 != expected:
        raise IdxFormatError(
            f"{path}: payload holds {len(data) - 16} bytes, header implies {expected}"
        )
    return np.frombuffer(data, dtype=np.uint8, offset=16).reshape(count, rows, cols)


def load_idx_labels(path) -> np.ndarray:
    """Parse an IDX label file into a 1-D uint8 array."""
    data = _read_binary(path)
    if len(data) < 8:
        raise IdxFormatError(f"{path}: truncated IDX label header")
    magic, count = struct.unpack(">II", data[:8])
    if magic != _IDX_LABEL_MAGIC:
        raise IdxFormatError(
            f"{path}: bad magic {magic}, expected {_IDX_LABEL_MAGIC} for labels"
        )
    if len(data) - 8 != count:
        raise IdxFormatError(
            f"{path}: payload holds {len(data) - 8} labels, header implies {count}"
        )
    return np.frombuffer(data, dtype=np.uint8, offset=8)


def normalize(raw_images: np.ndarray) -> np.ndarray:
    """Scale byte images by 1/255 and flatten row-major to (count, rows*cols)."""
    arr = np.asarray(raw_images)
    if arr.ndim != 3:
        raise ValueError(f"raw images must be 3-D, got shape {arr.shape}")
    flat = arr.reshape(arr.shape[0], -1).astype(np.float64)
    return flat / 255.0


def load_idx_dataset(images_path, labels_path, n_classes: int = 10) -> Dataset:
    """Load and normalize an IDX image/label pair into a Dataset."""
    images = load_idx_images(images_path)
    labels = load_idx_labels(labels_path)
    if images.shape[0] != labels.shape[0]:
        raise ValueError(
            f"{images.shape[0]} images but {labels.shape[0]} labels"
        )
    return Dataset(
        inputs=normalize(images),
        labels=labels.astype(np.int64),
        n_classes=n_classes,
        provenance=f"idx:{images_path};{labels_path}",
    )


def batch_iter(
    dataset: Dataset, batch_size: int, seed: int, epoch: int
) -> Iterator[LabeledBatch]:
    """Yield the epoch's batches under a seeded uniform permutation.

    The permutation is drawn from a Philox generator seeded with
    ``SeedSequence(seed, spawn_key=(1, epoch))``, so identical (seed, epoch)
    pairs give identical batch sequences. The dataset is partitioned into
    ceil(N / batch_size) batches; a short final batch is kept.
    """
    size = int(batch_size)
    if size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size!r}")
    rng = np.random.Generator(
        np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=(1, int(epoch))))
    )
    perm = rng.permutation(dataset.n_samples)
    for start in range(0, dataset.n_samples, size):
        idx = perm[start : start + size]
        yield LabeledBatch(
            inputs=dataset.inputs[idx],
            labels=dataset.labels[idx],
            n_classes=dataset.n_classes,
        )


def write_gauss_dataset(path, x, labels, q: float, mu, sigma, seed: int) -> None:
    """Write the Gaussian-model dataset container.

    Layout: one JSON header line with keys format, version, n, q, mu, sigma,
    seed, count; then count*n little-endian float64 feature values; then
    count int8 labels in {-1, +1}.
    """
    x_arr = check_finite_array(x, "x")
    if x_arr.ndim != 2:
        raise ValueError(f"x must be 2-D, got shape {x_arr.shape}")
    lab = np.asarray(labels)
    if lab.shape != (x_arr.shape[0],):
        raise ValueError("labels must be one per feature row")
    if not np.all(np.isin(lab, (-1, 1))):
        raise ValueError("labels must be -1 or +1")
    mu_arr = np.atleast_1d(np.asarray(mu, dtype=np.float64))
    sig = np.asarray(sigma, dtype=np.float64)
    if sig.ndim == 0:
        sig = sig.reshape(1, 1)
    header = {
        "format": _GAUSS_FORMAT,
        "version": _GAUSS_VERSION,
        "n": int(x_arr.shape[1]),
        "q": float(q),
        "mu": mu_arr.tolist(),
        "sigma": sig.tolist(),
        "seed": int(seed),
        "count": int(x_arr.shape[0]),
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode("utf-8"))
        fh.write(b"\n")
        fh.write(np.ascontiguousarray(x_arr, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(lab, dtype=np.int8).tobytes())


def read_gauss_dataset(path) -> tuple[np.ndarray, np.ndarray, dict]:
    """Read the Gaussian-model container; returns (features, labels, header)."""
    with open(path, "rb") as fh:
        header_line = fh.readline()
        payload = fh.read()
    try:
        header = json.loads(header_line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ValueError(f"{path}: not a dataset container (bad header: {exc})") from exc
    if header.get("format") != _GAUSS_FORMAT:
        raise ValueError(f"{path}: unexpected format {header.get('format')!r}")
    if header.get("version") != _GAUSS_VERSION:
        raise ValueError(f"{path}: unsupported version {header.get('version')!r}")
    count = int(header["count"])
    n = int(header["n"])
    feature_bytes = count * n * 8
    if len(payload) != feature_bytes + count:
        raise ValueError(
            f"{path}: payload holds {len(payload)} bytes, header implies "
            f"{feature_bytes + count}"
        )
    x = np.frombuffer(payload, dtype="<f8", count=count * n).reshape(count, n)
    labels = np.frombuffer(payload, dtype=np.int8, offset=feature_bytes)
    return x.copy(), labels.copy(), header


def parse_config_file(path) -> dict[str, str]:
    """Parse a flat key=value configuration file.

    Blank lines are skipped; ``#`` starts a comment (full-line or trailing).
    Every remaining line must contain ``=``; keys and values are stripped of
    surrounding whitespace. Key validity is the caller's concern.
    """
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(
                    f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}"
                )
            key, value = line.split("=", 1)
            key = key.strip()
            if not key:
                raise ValueError(f"{path}:{lineno}: empty key")
            if key in out:
                raise ValueError(f"{path}:{lineno}: duplicate key {key!r}")
            out[key] = value.strip()
    return out


def format_metrics_rows(rows: Iterable[tuple]) -> str:
    """Render metric rows to CSV text (header + 6-decimal rows, LF endings).

    The mi_bits column is re-derived from the rounded h_y_bits and
    h_y_given_x_bits columns so the identity mi = h_y - h_y_given_x holds
    exactly at the logged precision, not just on the float values.
    """
    lines = [",".join(METRICS_COLUMNS)]
    for row in rows:
        epoch, split, err, loss, _, h_y, h_ygx = row
        # +0.0 maps IEEE -0.0 to +0.0 so the column never prints "-0.000000"
        mi_logged = float(f"{h_y:.6f}") - float(f"{h_ygx:.6f}") + 0.0
        lines.append(
            f"{int(epoch)},{split},{err:.6f},{loss:.6f},"
            f"{mi_logged:.6f},{h_y:.6f},{h_ygx:.6f}"
        )
    return "\n".join(lines) + "\n"


def write_metrics_csv(path_or_handle, rows: Iterable[tuple]) -> None:
    """Write metric rows as CSV to a path or text handle."""
    text = format_metrics_rows(rows)
    if hasattr(path_or_handle, "write"):
        path_or_handle.write(text)
        return
    with open(path_or_handle, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def read_metrics_csv(path_or_handle) -> list[dict]:
    """Read a metrics CSV back into a list of typed row dicts."""
    if hasattr(path_or_handle, "read"):
        text = path_or_handle.read()
    else:
        with open(path_or_handle, "r", encoding="utf-8") as fh:
            text = fh.read()
    lines = [ln for ln in text.split("\n") if ln]
    if not lines or lines[0] != ",".join(METRICS_COLUMNS):
        raise ValueError("metrics CSV header mismatch")
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != len(METRICS_COLUMNS):
            raise ValueError(f"metrics CSV row has {len(parts)} columns: {ln!r}")
        rows.append(
            {
                "epoch": int(parts[0]),
                "split": parts[1],
                "error_rate": float(parts[2]),
                "loss_nats": float(parts[3]),
                "mi_bits": float(parts[4]),
                "h_y_bits": float(parts[5]),
                "h_y_given_x_bits": float(parts[6]),
            }
        )
    return rows
