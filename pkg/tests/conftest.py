"""Shared test fixtures and numeric helpers."""

import struct

import numpy as np
import pytest

from milc.losses import LossOutput


def write_idx_images(path, images: np.ndarray) -> None:
    """Write a uint8 image stack (N, rows, cols) in IDX layout."""
    with open(path, "wb") as fh:
        fh.write(struct.pack(">IIII", 2051, *images.shape))
        fh.write(images.tobytes())


def write_idx_labels(path, labels: np.ndarray) -> None:
    """Write uint8 labels (N,) in IDX layout."""
    with open(path, "wb") as fh:
        fh.write(struct.pack(">II", 2049, labels.shape[0]))
        fh.write(labels.astype(np.uint8).tobytes())


def make_synthetic_idx(tmp_path, n_train=200, n_test=40, side=8, classes=3, seed=99):
    """Build a small learnable IDX dataset; returns a dict of file paths.

    Each class lights up its own column band so a linear model can
    separate the classes; uniform pixel noise keeps the task non-trivial.
    """
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    n = n_train + n_test
    labels = rng.integers(0, classes, size=n).astype(np.uint8)
    images = np.zeros((n, side, side), dtype=np.uint8)
    band = max(1, side // classes)
    for i, y in enumerate(labels):
        block = np.zeros((side, side))
        block[:, y * band : (y + 1) * band] = 200
        noise = rng.integers(0, 40, size=(side, side))
        images[i] = np.clip(block + noise, 0, 255).astype(np.uint8)
    paths = {
        "train_images": tmp_path / "train-img.idx",
        "train_labels": tmp_path / "train-lab.idx",
        "test_images": tmp_path / "test-img.idx",
        "test_labels": tmp_path / "test-lab.idx",
    }
    write_idx_images(paths["train_images"], images[:n_train])
    write_idx_labels(paths["train_labels"], labels[:n_train])
    write_idx_images(paths["test_images"], images[n_train:])
    write_idx_labels(paths["test_labels"], labels[n_train:])
    return {k: str(v) for k, v in paths.items()}


@pytest.fixture
def idx_files(tmp_path):
    return make_synthetic_idx(tmp_path)


def fd_logit_grad(loss_fn, logits: np.ndarray, step: float = 1e-5) -> np.ndarray:
    """Central finite-difference gradient of a scalar loss over logits."""
    grad = np.zeros_like(logits)
    work = logits.copy()
    for idx in np.ndindex(logits.shape):
        orig = work[idx]
        work[idx] = orig + step
        hi = loss_fn(work)
        work[idx] = orig - step
        lo = loss_fn(work)
        work[idx] = orig
        grad[idx] = (hi - lo) / (2.0 * step)
    return grad


def loss_value(out) -> float:
    """Accept either a LossOutput or a bare float from a loss callable."""
    return out.value if isinstance(out, LossOutput) else float(out)


def relative_grad_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """Norm-based relative error between two gradients."""
    denom = max(float(np.linalg.norm(analytic)), 1e-8)
    return float(np.linalg.norm(analytic - numeric)) / denom


def fd_param_grads(model, loss_of_model, step: float = 1e-4):
    """Central finite-difference gradients for every MLP parameter.

    loss_of_model is a scalar function of the (mutated in place, then
    restored) model. Returns (weight_grads, bias_grads) lists.
    """
    w_grads, b_grads = [], []
    for arrays, grads in ((model.weights, w_grads), (model.biases, b_grads)):
        for arr in arrays:
            g = np.zeros_like(arr)
            for idx in np.ndindex(arr.shape):
                orig = arr[idx]
                arr[idx] = orig + step
                hi = loss_of_model(model)
                arr[idx] = orig - step
                lo = loss_of_model(model)
                arr[idx] = orig
                g[idx] = (hi - lo) / (2.0 * step)
            grads.append(g)
    return w_grads, b_grads
