"""Dense feedforward networks with hand-derived backpropagation.

The stack is deliberately small: affine layers, leaky-ReLU hidden
activations, a linear output layer, Glorot-uniform initialization and an
Adam optimizer with an exponentially decayed learning rate. Reverse-mode
gradients are written out by hand for exactly this stack; there is no
autodiff tape.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, NumericError, ShapeError

DTYPES = {"float64": np.float64, "float32": np.float32}


@dataclass
class DenseNet:
    """A stack of affine layers with leaky-ReLU hidden activations.

    weights[k] has shape (layer_dims[k+1], layer_dims[k]) and biases[k]
    has shape (layer_dims[k+1],). The output layer is purely affine.
    """

    layer_dims: list[int]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    negative_slope: float = 0.15
    seed: int | None = None

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    @property
    def input_dim(self) -> int:
        return self.layer_dims[0]

    @property
    def output_dim(self) -> int:
        return self.layer_dims[-1]

    @property
    def dtype(self):
        return self.weights[0].dtype

    def parameters(self) -> list[np.ndarray]:
        """Flat parameter list in layer order: W0, b0, W1, b1, ..."""
        params = []
        for w, b in zip(self.weights, self.biases):
            params.append(w)
            params.append(b)
        return params

    def n_parameters(self) -> int:
        return sum(p.size for p in self.parameters())

    def copy(self) -> "DenseNet":
        return DenseNet(
            layer_dims=list(self.layer_dims),
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            negative_slope=self.negative_slope,
            seed=self.seed,
        )


@dataclass
class Gradients:
    """Parameter gradients mirroring a DenseNet, plus the input gradient."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]
    inputs: np.ndarray

    def parameters(self) -> list[np.ndarray]:
        grads = []
        for w, b in zip(self.weights, self.biases):
            grads.append(w)
            grads.append(b)
        return grads


def _check_dims(layer_dims) -> list[int]:
    dims = [int(d) for d in layer_dims]
    if len(dims) < 2:
        raise ConfigError(
            f"invalid architecture: need at least input and output dims, got {dims}"
        )
    if any(d < 1 for d in dims):
        raise ConfigError(f"invalid architecture: all dims must be >= 1, got {dims}")
    return dims


def glorot_init(
    layer_dims,
    seed: int,
    negative_slope: float = 0.15,
    dtype: str = "float64",
) -> DenseNet:
    """Build a DenseNet with Glorot-uniform weights and zero biases.

    Each weight entry is drawn uniformly from [-L, L] with
    L = sqrt(6 / (fan_in + fan_out)). The same (layer_dims, seed) pair
    reproduces the parameters bit-exactly.
    """
    dims = _check_dims(layer_dims)
    if not (0.0 <= negative_slope < 1.0):
        raise ConfigError(f"negative_slope must be in [0, 1), got {negative_slope}")
    np_dtype = DTYPES[dtype]
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        w = rng.uniform(-limit, limit, size=(fan_out, fan_in)).astype(np_dtype)
        weights.append(w)
        biases.append(np.zeros(fan_out, dtype=np_dtype))
    return DenseNet(dims, weights, biases, negative_slope=negative_slope, seed=seed)


def _as_batch(net: DenseNet, x: np.ndarray) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=net.dtype)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != net.input_dim:
        raise ShapeError(
            f"input of shape {x.shape} does not match network input dim {net.input_dim}"
        )
    return x, single


def _forward_cached(net: DenseNet, x: np.ndarray):
    """Forward pass keeping per-layer activations for the backward pass."""
    activations = [x]
    preacts = []
    a = x
    last = net.n_layers - 1
    for k, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = a @ w.T + b
        preacts.append(z)
        if k < last:
            # kink convention: pre-activation exactly 0 takes the slope-1 branch
            a = np.where(z >= 0, z, net.negative_slope * z)
        else:
            a = z
        activations.append(a)
    return activations, preacts


def forward(net: DenseNet, x: np.ndarray) -> np.ndarray:
    """Evaluate the network on a vector or a (batch, input_dim) array."""
    xb, single = _as_batch(net, x)
    activations, _ = _forward_cached(net, xb)
    out = activations[-1]
    return out[0] if single else out


def backward(net: DenseNet, x: np.ndarray, output_grad: np.ndarray) -> Gradients:
    """Gradients of sum(output_grad * forward(x)) w.r.t. parameters and input.

    output_grad must match the forward output shape; the returned structure
    mirrors the network's parameters and additionally carries the gradient
    w.r.t. x, which is needed when networks are composed.
    """
    xb, single = _as_batch(net, x)
    g = np.asarray(output_grad, dtype=net.dtype)
    if single:
        g = g[None, :]
    if g.shape != (xb.shape[0], net.output_dim):
        raise ShapeError(
            f"output_grad shape {np.asarray(output_grad).shape} does not match "
            f"forward output shape ({xb.shape[0]}, {net.output_dim})"
        )
    activations, preacts = _forward_cached(net, xb)

    w_grads = [None] * net.n_layers
    b_grads = [None] * net.n_layers
    delta = g
    for k in range(net.n_layers - 1, -1, -1):
        w_grads[k] = delta.T @ activations[k]
        b_grads[k] = delta.sum(axis=0)
        delta = delta @ net.weights[k]
        if k > 0:
            z = preacts[k - 1]
            slope = np.where(z >= 0, 1.0, net.negative_slope)
            delta = delta * slope
    x_grad = delta[0] if single else delta
    return Gradients(weights=w_grads, biases=b_grads, inputs=x_grad)


@dataclass
class AdamState:
    """Adam moments and the exponential learning-rate decay schedule."""

    first_moment: list[np.ndarray]
    second_moment: list[np.ndarray]
    base_lr: float
    step: int = 0
    decay_rate: float = 0.99
    decay_interval_steps: int = 1000
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    decay_mode: str = "continuous"  # or "staircase"


def adam_init(
    params: list[np.ndarray],
    base_lr: float = 1e-4,
    decay_rate: float = 0.99,
    decay_interval_steps: int = 1000,
    decay_mode: str = "continuous",
) -> AdamState:
    if base_lr <= 0:
        raise ConfigError(f"base_lr must be positive, got {base_lr}")
    if not (0.0 < decay_rate <= 1.0):
        raise ConfigError(f"decay_rate must be in (0, 1], got {decay_rate}")
    if decay_interval_steps < 1:
        raise ConfigError("decay_interval_steps must be a positive integer")
    if decay_mode not in ("continuous", "staircase"):
        raise ConfigError(f"unknown decay_mode {decay_mode!r}")
    return AdamState(
        first_moment=[np.zeros_like(p) for p in params],
        second_moment=[np.zeros_like(p) for p in params],
        base_lr=float(base_lr),
        decay_rate=float(decay_rate),
        decay_interval_steps=int(decay_interval_steps),
        decay_mode=decay_mode,
    )


def effective_lr(state: AdamState) -> float:
    """Learning rate at the current step count (before the next update)."""
    if state.decay_mode == "staircase":
        exponent = state.step // state.decay_interval_steps
    else:
        exponent = state.step / state.decay_interval_steps
    return state.base_lr * state.decay_rate**exponent


def adam_step(state: AdamState, params: list[np.ndarray], grads: list[np.ndarray]):
    """One in-place Adam update with bias correction.

    The effective learning rate is evaluated at the pre-increment step
    count; the step counter then advances by one.
    """
    if len(params) != len(state.first_moment) or len(grads) != len(params):
        raise ShapeError("params/grads do not match the optimizer state")
    for i, g in enumerate(grads):
        if not np.all(np.isfinite(g)):
            raise NumericError(f"non-finite gradient in parameter block {i}")
    lr = effective_lr(state)
    t = state.step + 1
    b1, b2, eps = state.beta1, state.beta2, state.epsilon
    c1 = 1.0 - b1**t
    c2 = 1.0 - b2**t
    for p, g, m, v in zip(params, grads, state.first_moment, state.second_moment):
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        p -= lr * (m / c1) / (np.sqrt(v / c2) + eps)
    state.step = t
    return params, state


# --- checkpoint format ----------------------------------------------------
#
# A network checkpoint is a pair of files sharing a path prefix:
#   <prefix>.json  manifest: dims, activation config, seed, precision,
#                  byte order, layout note and the sha256 of the array file
#   <prefix>.bin   flat little-endian IEEE-754 arrays, one layer after the
#                  other: weights (row-major), then bias

_LAYOUT = "per-layer: weights row-major, then bias"


def network_param_bytes(net: DenseNet) -> bytes:
    """Serialize all parameters as flat little-endian arrays in layer order."""
    le_dtype = "<f8" if net.dtype == np.float64 else "<f4"
    chunks = []
    for w, b in zip(net.weights, net.biases):
        chunks.append(np.ascontiguousarray(w, dtype=le_dtype).tobytes())
        chunks.append(np.ascontiguousarray(b, dtype=le_dtype).tobytes())
    return b"".join(chunks)


def save_network(net: DenseNet, prefix) -> None:
    prefix = Path(prefix)
    blob = network_param_bytes(net)
    precision = "float64" if net.dtype == np.float64 else "float32"
    manifest = {
        "kind": "dense-net",
        "layer_dims": net.layer_dims,
        "hidden_activation": {"leaky_relu": {"negative_slope": net.negative_slope}},
        "output_activation": "linear",
        "seed": net.seed,
        "precision": precision,
        "byte_order": "little",
        "layout": _LAYOUT,
        "params_file": prefix.name + ".bin",
        "sha256": hashlib.sha256(blob).hexdigest(),
    }
    prefix.parent.mkdir(parents=True, exist_ok=True)
    with open(str(prefix) + ".json", "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    with open(str(prefix) + ".bin", "wb") as f:
        f.write(blob)


def load_network(prefix) -> DenseNet:
    prefix = Path(prefix)
    with open(str(prefix) + ".json", encoding="utf-8") as f:
        manifest = json.load(f)
    dims = _check_dims(manifest["layer_dims"])
    precision = manifest.get("precision", "float64")
    le_dtype = "<f8" if precision == "float64" else "<f4"
    np_dtype = DTYPES[precision]
    blob = (prefix.parent / manifest["params_file"]).read_bytes()
    digest = hashlib.sha256(blob).hexdigest()
    if digest != manifest["sha256"]:
        raise ShapeError(
            f"checksum mismatch for {manifest['params_file']}: "
            f"expected {manifest['sha256']}, got {digest}"
        )
    flat = np.frombuffer(blob, dtype=le_dtype)
    expected = sum(o * i + o for i, o in zip(dims[:-1], dims[1:]))
    if flat.size != expected:
        raise ShapeError(
            f"parameter file holds {flat.size} values, expected {expected} for dims {dims}"
        )
    weights, biases, pos = [], [], 0
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        w = flat[pos : pos + fan_out * fan_in].reshape(fan_out, fan_in)
        pos += fan_out * fan_in
        b = flat[pos : pos + fan_out]
        pos += fan_out
        weights.append(np.ascontiguousarray(w, dtype=np_dtype))
        biases.append(np.ascontiguousarray(b, dtype=np_dtype))
    slope = manifest["hidden_activation"]["leaky_relu"]["negative_slope"]
    return DenseNet(dims, weights, biases, negative_slope=slope, seed=manifest.get("seed"))
