"""Dense feed-forward network with manual backprop and heavy-ball SGD.

The model is a chain of affine layers with ReLU on every hidden layer and
identity on the output; all arithmetic is 64-bit. Randomness comes from
numpy's counter-based Philox generator seeded through
``SeedSequence(seed, spawn_key=(0,))`` so recorded values stay stable.

Checkpoint container (version 1): one JSON header line (UTF-8, terminated by
``\\n``) with keys ``format`` ("milc-checkpoint"), ``version`` (1),
``layer_sizes``, ``seed``, ``epoch``, ``dtype`` ("<f8"), followed by the raw
parameters as little-endian float64 in layer order, weights row-major then
biases per layer. Momentum buffers are not stored; they are zero after load.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .validation import NumericError, check_finite_array

__all__ = [
    "MlpModel",
    "MlpGrads",
    "init_mlp",
    "forward",
    "backward",
    "sgd_step",
    "predict",
    "count_params",
    "save_checkpoint",
    "load_checkpoint",
]

_CHECKPOINT_FORMAT = "milc-checkpoint"
_CHECKPOINT_VERSION = 1


@dataclass
class MlpModel:
    """Layer sizes, parameters, and momentum buffers of the network.

    ``weights[k]`` has shape (layer_sizes[k], layer_sizes[k+1]) and
    ``biases[k]`` shape (layer_sizes[k+1],). Velocity buffers mirror the
    parameter shapes and start at zero.
    """

    layer_sizes: tuple[int, ...]
    weights: list[np.ndarray] = field(repr=False)
    biases: list[np.ndarray] = field(repr=False)
    w_velocity: list[np.ndarray] = field(repr=False)
    b_velocity: list[np.ndarray] = field(repr=False)
    seed: int = 0


@dataclass
class MlpGrads:
    """Parameter gradients matching a model's weight/bias shapes."""

    weights: list[np.ndarray] = field(repr=False)
    biases: list[np.ndarray] = field(repr=False)


@dataclass
class ForwardCache:
    """Per-layer inputs and pre-activations retained for backward."""

    inputs: list[np.ndarray] = field(repr=False)
    pre_activations: list[np.ndarray] = field(repr=False)


def init_mlp(layer_sizes, seed: int) -> MlpModel:
    """Build a model with uniform weights in (-s, s), s = sqrt(6/(fan_in+fan_out)).

    Biases start at zero; the draw order is fixed (layer by layer), so equal
    seeds give bit-identical models.
    """
    sizes = tuple(int(s) for s in layer_sizes)
    if len(sizes) < 2:
        raise ValueError("layer_sizes must name at least input and output widths")
    if any(s < 1 for s in sizes):
        raise ValueError(f"layer sizes must be >= 1, got {sizes}")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=(0,))))
    weights = []
    biases = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        s = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-s, s, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out, dtype=np.float64))
    return MlpModel(
        layer_sizes=sizes,
        weights=weights,
        biases=biases,
        w_velocity=[np.zeros_like(w) for w in weights],
        b_velocity=[np.zeros_like(b) for b in biases],
        seed=int(seed),
    )


def count_params(model: MlpModel) -> int:
    """Total number of scalar parameters (weights plus biases)."""
    return int(
        sum(w.size for w in model.weights) + sum(b.size for b in model.biases)
    )


def forward(model: MlpModel, inputs) -> tuple[np.ndarray, ForwardCache]:
    """Run the affine/ReLU chain; return output logits and a backward cache."""
    x = check_finite_array(inputs, "inputs")
    if x.ndim != 2:
        raise ValueError(f"inputs must be 2-D, got shape {x.shape}")
    if x.shape[1] != model.layer_sizes[0]:
        raise ValueError(
            f"inputs have width {x.shape[1]}, model expects {model.layer_sizes[0]}"
        )
    cache = ForwardCache(inputs=[], pre_activations=[])
    h = x
    last = len(model.weights) - 1
    for k, (w, b) in enumerate(zip(model.weights, model.biases)):
        cache.inputs.append(h)
        z = h @ w + b
        cache.pre_activations.append(z)
        h = z if k == last else np.maximum(z, 0.0)
    return h, cache


def backward(model: MlpModel, cache: ForwardCache, grad_logits) -> MlpGrads:
    """Exact reverse-mode parameter gradients for a cached forward pass.

    The ReLU subgradient at exactly 0 is taken as 0.
    """
    g = np.asarray(grad_logits, dtype=np.float64)
    n_layers = len(model.weights)
    if len(cache.inputs) != n_layers or len(cache.pre_activations) != n_layers:
        raise ValueError("cache does not match the model's layer count")
    if g.shape != cache.pre_activations[-1].shape:
        raise ValueError(
            f"grad_logits shape {g.shape} does not match logits shape "
            f"{cache.pre_activations[-1].shape}"
        )
    d_weights: list[np.ndarray] = [None] * n_layers  # type: ignore[list-item]
    d_biases: list[np.ndarray] = [None] * n_layers  # type: ignore[list-item]
    delta = g
    for k in range(n_layers - 1, -1, -1):
        if k != n_layers - 1:
            delta = delta * (cache.pre_activations[k] > 0.0)
        d_weights[k] = cache.inputs[k].T @ delta
        d_biases[k] = delta.sum(axis=0)
        if k > 0:
            delta = delta @ model.weights[k].T
    return MlpGrads(weights=d_weights, biases=d_biases)


def sgd_step(model: MlpModel, grads: MlpGrads, lr: float, momentum: float) -> MlpModel:
    """Heavy-ball update v <- momentum*v + g; theta <- theta - lr*v.

    Mutates the model in place and returns it. Non-finite gradients abort the
    step before any parameter changes.
    """
    if not lr > 0.0:
        raise ValueError(f"lr must be > 0, got {lr!r}")
    if not 0.0 <= momentum < 1.0:
        raise ValueError(f"momentum must lie in [0, 1), got {momentum!r}")
    for g in (*grads.weights, *grads.biases):
        if not np.all(np.isfinite(g)):
            raise NumericError("non-finite gradient; step aborted")
    for w, v, g in zip(model.weights, model.w_velocity, grads.weights):
        v *= momentum
        v += g
        w -= lr * v
    for b, v, g in zip(model.biases, model.b_velocity, grads.biases):
        v *= momentum
        v += g
        b -= lr * v
    return model


def predict(logits) -> np.ndarray:
    """Per-row argmax labels; ties break toward the lowest class index."""
    z = check_finite_array(logits, "logits")
    if z.ndim != 2:
        raise ValueError(f"logits must be 2-D, got shape {z.shape}")
    return np.argmax(z, axis=1)


def save_checkpoint(path, model: MlpModel, epoch: int) -> None:
    """Write the versioned checkpoint container described in the module doc."""
    header = {
        "format": _CHECKPOINT_FORMAT,
        "version": _CHECKPOINT_VERSION,
        "layer_sizes": list(model.layer_sizes),
        "seed": int(model.seed),
        "epoch": int(epoch),
        "dtype": "<f8",
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode("utf-8"))
        fh.write(b"\n")
        for w, b in zip(model.weights, model.biases):
            fh.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(b, dtype="<f8").tobytes())


def load_checkpoint(path) -> tuple[MlpModel, int]:
    """Read a checkpoint; returns the model (zero velocities) and its epoch."""
    with open(path, "rb") as fh:
        header_line = fh.readline()
        payload = fh.read()
    try:
        header = json.loads(header_line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ValueError(f"not a checkpoint file: bad header ({exc})") from exc
    if header.get("format") != _CHECKPOINT_FORMAT:
        raise ValueError(f"not a checkpoint file: format {header.get('format')!r}")
    if header.get("version") != _CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {header.get('version')!r}")
    sizes = tuple(int(s) for s in header["layer_sizes"])
    expected = sum(
        fi * fo + fo for fi, fo in zip(sizes[:-1], sizes[1:])
    )
    flat = np.frombuffer(payload, dtype="<f8")
    if flat.size != expected:
        raise ValueError(
            f"checkpoint payload holds {flat.size} parameters, header implies {expected}"
        )
    model = init_mlp(sizes, int(header.get("seed", 0)))
    offset = 0
    for k, (fi, fo) in enumerate(zip(sizes[:-1], sizes[1:])):
        model.weights[k] = flat[offset : offset + fi * fo].reshape(fi, fo).copy()
        offset += fi * fo
        model.biases[k] = flat[offset : offset + fo].copy()
        offset += fo
    return model, int(header.get("epoch", 0))
