"""GFT-augmented message-passing classifier, written directly in numpy.

Layer stack, for node features ``X`` (N×D) and effective adjacency ``Â``::

    h1 = ReLU(X W_mp1 + b_mp1)              feature transform
    h2 = ReLU(Â h1 W_mp2 + b_mp2)           message passing
    ĥ  = Uᵀ h2                              graph Fourier transform
    h3 = U (g ⊙ ĥ)                          per-frequency gain, inverse GFT
    h4 = ReLU(h3 W_fc1 + b_fc1)
    logits = h4 W_fc2 + b_fc2

``U`` holds the Laplacian eigenvectors of the sample graph and ``g`` one
learnable gain per eigen-index (shared across channels). With ``g = 1`` the
spectral layer is the identity. Training is full batch and transductive.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Iterator

import numpy as np
import scipy.sparse as sp

from . import graph as graph_mod
from .errors import (
    LabelOutOfRangeError,
    NonFiniteActivationError,
    NonFiniteLossError,
    ShapeMismatchError,
    SingleClassDatasetError,
    TraceMismatchError,
)
from .preprocess import ScalerState, fit_min_max, transform_min_max
from .spectral import Eigensystem, eigendecompose_symmetric

log = logging.getLogger(__name__)

PARAM_NAMES = ("W_mp1", "b_mp1", "W_mp2", "b_mp2", "g", "W_fc1", "b_fc1", "W_fc2", "b_fc2")
ADJACENCY_MODES = ("normalized", "faithful")
PROB_FLOOR = 1e-12
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass
class ModelParams:
    """All learnable tensors. Also used to hold gradients and Adam moments."""

    W_mp1: np.ndarray
    b_mp1: np.ndarray
    W_mp2: np.ndarray
    b_mp2: np.ndarray
    g: np.ndarray
    W_fc1: np.ndarray
    b_fc1: np.ndarray
    W_fc2: np.ndarray
    b_fc2: np.ndarray

    def items(self) -> Iterator[tuple[str, np.ndarray]]:
        for name in PARAM_NAMES:
            yield name, getattr(self, name)

    @property
    def dims(self) -> dict[str, int]:
        return {
            "D": self.W_mp1.shape[0],
            "H": self.W_mp1.shape[1],
            "N": self.g.shape[0],
            "C": self.W_fc2.shape[1],
        }

    def map(self, fn) -> "ModelParams":
        return ModelParams(**{name: fn(value) for name, value in self.items()})

    def copy(self) -> "ModelParams":
        return self.map(np.copy)

    def all_finite(self) -> bool:
        return all(np.all(np.isfinite(v)) for _, v in self.items())

    def to_json(self) -> dict:
        return {name: value.tolist() for name, value in self.items()}

    @classmethod
    def from_json(cls, obj: dict) -> "ModelParams":
        return cls(**{name: np.asarray(obj[name], dtype=float) for name in PARAM_NAMES})


@dataclass
class AdamState:
    m: ModelParams
    v: ModelParams
    t: int = 0

    @classmethod
    def zeros_like(cls, p: ModelParams) -> "AdamState":
        return cls(p.map(np.zeros_like), p.map(np.zeros_like), 0)


@dataclass(frozen=True)
class TrainConfig:
    hidden_dim: int = 64
    learning_rate: float = 0.001
    num_epochs: int = 500
    knn_k: int = 5
    knn_metric: str = "cosine"
    adjacency_mode: str = "normalized"
    # Literal message-passing step h2 = ReLU(Â h1): W_mp2 = I and b_mp2 = 0, frozen.
    faithful_mpnn: bool = False
    seed: int = 42

    def validate(self) -> "TrainConfig":
        if self.hidden_dim < 1:
            raise ValueError("hidden_dim must be >= 1")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be > 0")
        if self.num_epochs < 0:
            raise ValueError("num_epochs must be >= 0")
        if self.adjacency_mode not in ADJACENCY_MODES:
            raise ValueError(f"adjacency_mode must be one of {ADJACENCY_MODES}")
        if self.knn_metric not in ("cosine", "euclidean"):
            raise ValueError("knn_metric must be 'cosine' or 'euclidean'")
        return self


@dataclass
class ForwardTrace:
    h1: np.ndarray
    aggregated: np.ndarray  # Â h1, kept for the W_mp2 gradient
    h2: np.ndarray
    h_spec: np.ndarray
    h3: np.ndarray
    h4: np.ndarray
    logits: np.ndarray
    probs: np.ndarray


@dataclass
class GraphContext:
    """Everything the model needs about the sample graph."""

    adjacency: sp.csr_matrix  # effective Â
    eig: Eigensystem
    graph: graph_mod.Graph | None = None


@dataclass
class History:
    loss: list[float] = field(default_factory=list)
    accuracy: list[float] = field(default_factory=list)
    initial_loss: float | None = None


def _glorot(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def init_model(D: int, H: int, N: int, C: int, seed: int, faithful_mpnn: bool = False) -> ModelParams:
    """Glorot-uniform weights, zero biases, unit spectral gains."""
    if min(D, H, N, C) < 1:
        raise ValueError("all dimensions must be positive")
    rng = np.random.default_rng([int(seed), 0x1A17])
    w_mp1 = _glorot(rng, D, H)
    w_mp2 = _glorot(rng, H, H)
    w_fc1 = _glorot(rng, H, H)
    w_fc2 = _glorot(rng, H, C)
    if faithful_mpnn:
        w_mp2 = np.eye(H)
    return ModelParams(
        W_mp1=w_mp1, b_mp1=np.zeros(H),
        W_mp2=w_mp2, b_mp2=np.zeros(H),
        g=np.ones(N),
        W_fc1=w_fc1, b_fc1=np.zeros(H),
        W_fc2=w_fc2, b_fc2=np.zeros(C),
    )


def effective_adjacency(g: graph_mod.Graph, mode: str) -> sp.csr_matrix:
    """``faithful``: raw A. ``normalized``: row-normalised ``A + I``."""
    a = sp.csr_matrix(graph_mod.adjacency_matrix(g))
    if mode == "faithful":
        return a
    if mode == "normalized":
        a = a + sp.identity(g.n, format="csr")
        return sp.csr_matrix(sp.diags(1.0 / np.asarray(a.sum(axis=1)).ravel()) @ a)
    raise ValueError(f"unknown adjacency mode {mode!r}")


def build_context(x: np.ndarray, cfg: TrainConfig) -> GraphContext:
    """k-NN graph over the samples, its effective adjacency and Laplacian eigensystem."""
    g = graph_mod.knn_graph(x, k=min(cfg.knn_k, x.shape[0] - 1), metric=cfg.knn_metric)
    eig = eigendecompose_symmetric(graph_mod.laplacian(g))
    return GraphContext(effective_adjacency(g, cfg.adjacency_mode), eig, g)


def _relu(z: np.ndarray) -> np.ndarray:
    return np.maximum(z, 0.0)


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _check_shapes(p: ModelParams, x: np.ndarray, adjacency, eig: Eigensystem) -> None:
    n, d = x.shape
    dims = p.dims
    if d != dims["D"]:
        raise ShapeMismatchError(f"X has {d} features, model expects {dims['D']}")
    if adjacency.shape != (n, n):
        raise ShapeMismatchError(f"adjacency shape {adjacency.shape} != ({n}, {n})")
    if eig.n != n:
        raise ShapeMismatchError(f"eigensystem dimension {eig.n} != {n} samples")
    if dims["N"] != n:
        raise ShapeMismatchError(f"spectral gains have length {dims['N']}, graph has {n} nodes")


def forward(p: ModelParams, x: np.ndarray, adjacency, eig: Eigensystem) -> ForwardTrace:
    x = np.asarray(x, dtype=float)
    _check_shapes(p, x, adjacency, eig)
    u = eig.eigenvectors
    h1 = _relu(x @ p.W_mp1 + p.b_mp1)
    agg = np.asarray(adjacency @ h1)
    h2 = _relu(agg @ p.W_mp2 + p.b_mp2)
    h_spec = u.T @ h2
    h3 = u @ (p.g[:, None] * h_spec)
    h4 = _relu(h3 @ p.W_fc1 + p.b_fc1)
    logits = h4 @ p.W_fc2 + p.b_fc2
    if not np.all(np.isfinite(logits)):
        raise NonFiniteActivationError("non-finite logits in forward pass")
    return ForwardTrace(h1, agg, h2, h_spec, h3, h4, logits, softmax(logits))


def cross_entropy(probs: np.ndarray, y: np.ndarray) -> float:
    """Mean negative log-likelihood, with probabilities floored at 1e-12."""
    y = np.asarray(y, dtype=np.int64)
    n, c = probs.shape
    if y.shape != (n,):
        raise ShapeMismatchError(f"expected {n} labels, got shape {y.shape}")
    if y.size and (y.min() < 0 or y.max() >= c):
        raise LabelOutOfRangeError(f"labels must lie in [0, {c})")
    picked = np.maximum(probs[np.arange(n), y], PROB_FLOOR)
    return float(-np.mean(np.log(picked)))


def backward(
    p: ModelParams,
    trace: ForwardTrace,
    x: np.ndarray,
    adjacency,
    eig: Eigensystem,
    y: np.ndarray,
) -> ModelParams:
    """Exact gradient of ``cross_entropy(forward(...).probs, y)``.

    ReLU uses subgradient 0 at 0. Where the probability floor is active the
    loss is flat in that row and its gradient is taken as zero.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=np.int64)
    n = x.shape[0]
    if trace.probs.shape != (n, p.dims["C"]) or trace.h1.shape != (n, p.dims["H"]):
        raise TraceMismatchError("trace was not produced from these inputs")
    u = eig.eigenvectors

    d_logits = trace.probs.copy()
    d_logits[np.arange(n), y] -= 1.0
    floored = trace.probs[np.arange(n), y] < PROB_FLOOR
    d_logits[floored] = 0.0
    d_logits /= n

    dW_fc2 = trace.h4.T @ d_logits
    db_fc2 = d_logits.sum(axis=0)
    dz4 = (d_logits @ p.W_fc2.T) * (trace.h4 > 0)
    dW_fc1 = trace.h3.T @ dz4
    db_fc1 = dz4.sum(axis=0)
    dh3 = dz4 @ p.W_fc1.T

    d_spec = u.T @ dh3
    dg = np.sum(trace.h_spec * d_spec, axis=1)
    dh2 = u @ (p.g[:, None] * d_spec)

    dz2 = dh2 * (trace.h2 > 0)
    dW_mp2 = trace.aggregated.T @ dz2
    db_mp2 = dz2.sum(axis=0)
    dh1 = np.asarray(adjacency.T @ (dz2 @ p.W_mp2.T))

    dz1 = dh1 * (trace.h1 > 0)
    dW_mp1 = x.T @ dz1
    db_mp1 = dz1.sum(axis=0)
    return ModelParams(
        W_mp1=dW_mp1, b_mp1=db_mp1, W_mp2=dW_mp2, b_mp2=db_mp2, g=dg,
        W_fc1=dW_fc1, b_fc1=db_fc1, W_fc2=dW_fc2, b_fc2=db_fc2,
    )


def adam_step(
    p: ModelParams,
    grads: ModelParams,
    state: AdamState,
    lr: float,
    frozen: tuple[str, ...] = (),
) -> tuple[ModelParams, AdamState]:
    """One bias-corrected Adam update. Returns new objects; inputs are untouched."""
    t = state.t + 1
    new_p, new_m, new_v = {}, {}, {}
    for name, theta in p.items():
        grad = getattr(grads, name)
        m = ADAM_BETA1 * getattr(state.m, name) + (1.0 - ADAM_BETA1) * grad
        v = ADAM_BETA2 * getattr(state.v, name) + (1.0 - ADAM_BETA2) * grad * grad
        new_m[name], new_v[name] = m, v
        if name in frozen:
            new_p[name] = theta.copy()
            continue
        m_hat = m / (1.0 - ADAM_BETA1 ** t)
        v_hat = v / (1.0 - ADAM_BETA2 ** t)
        new_p[name] = theta - lr * m_hat / (np.sqrt(v_hat) + ADAM_EPS)
    return ModelParams(**new_p), AdamState(ModelParams(**new_m), ModelParams(**new_v), t)


def predict_from_probs(probs: np.ndarray) -> np.ndarray:
    # np.argmax returns the first maximum, i.e. the smaller class index on ties.
    return np.argmax(probs, axis=1)


def predict(p: ModelParams, x: np.ndarray, adjacency, eig: Eigensystem) -> np.ndarray:
    return predict_from_probs(forward(p, x, adjacency, eig).probs)


def _accuracy(probs: np.ndarray, y: np.ndarray) -> float:
    return float(np.count_nonzero(predict_from_probs(probs) == y) / y.size)


def fit(
    x: np.ndarray,
    y: np.ndarray,
    num_classes: int,
    cfg: TrainConfig,
    ctx: GraphContext | None = None,
) -> tuple[ModelParams, History, GraphContext]:
    """Full-batch training on already-scaled features.

    ``history`` entry ``e`` holds loss and accuracy after ``e + 1`` updates,
    so the last entry describes the returned parameters.
    """
    cfg.validate()
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=np.int64)
    if np.unique(y).size < 2:
        raise SingleClassDatasetError("training needs at least two classes")
    if ctx is None:
        ctx = build_context(x, cfg)
    n, d = x.shape
    params = init_model(d, cfg.hidden_dim, n, num_classes, cfg.seed, cfg.faithful_mpnn)
    frozen = ("W_mp2", "b_mp2") if cfg.faithful_mpnn else ()
    state = AdamState.zeros_like(params)
    history = History()

    trace = forward(params, x, ctx.adjacency, ctx.eig)
    history.initial_loss = cross_entropy(trace.probs, y)
    for epoch in range(cfg.num_epochs):
        grads = backward(params, trace, x, ctx.adjacency, ctx.eig, y)
        params, state = adam_step(params, grads, state, cfg.learning_rate, frozen)
        if not params.all_finite():
            raise NonFiniteLossError(f"non-finite parameters after epoch {epoch}")
        try:
            trace = forward(params, x, ctx.adjacency, ctx.eig)
        except NonFiniteActivationError as exc:
            raise NonFiniteLossError(str(exc)) from exc
        loss = cross_entropy(trace.probs, y)
        if not np.isfinite(loss):
            raise NonFiniteLossError(f"loss became {loss} at epoch {epoch}")
        history.loss.append(loss)
        history.accuracy.append(_accuracy(trace.probs, y))
        if epoch % 50 == 0 or epoch == cfg.num_epochs - 1:
            log.debug("epoch %d loss %.6f acc %.4f", epoch, loss, history.accuracy[-1])
    return params, history, ctx


def adapt_gains(p: ModelParams, n: int) -> ModelParams:
    """Resize the spectral gains to an ``n``-node graph.

    Gains are matched by eigen-index: truncated when the new graph is
    smaller, zero-padded when it is larger.
    """
    g = p.g
    if g.size >= n:
        new_g = g[:n].copy()
    else:
        new_g = np.concatenate([g, np.zeros(n - g.size)])
    return replace(p.copy(), g=new_g)


@dataclass
class TrainResult:
    params: ModelParams
    history: History
    scaler: ScalerState
    context: GraphContext


def train(dataset, cfg: TrainConfig) -> TrainResult:
    """Min-max scale ``dataset.X``, build the sample graph and run :func:`fit`."""
    scaler = fit_min_max(dataset.X)
    x = transform_min_max(dataset.X, scaler)
    params, history, ctx = fit(x, dataset.y, len(dataset.label_names), cfg)
    return TrainResult(params, history, scaler, ctx)
