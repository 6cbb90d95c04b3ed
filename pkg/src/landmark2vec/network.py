"""The L -> d -> L embedding network: forward/backward, training, stopping.

The model is two bias-free weight matrices. The input side is (L, d): row l
holds the d coordinates learned for landmark l, and doubles as the bottleneck
activation for a one-hot input at l (the bottleneck is linear). The output
side is (d, L) and feeds a softmax over landmarks.
"""

from __future__ import annotations

import json
import re
import time
from dataclasses import dataclass, field

import numpy as np

from .data import LandmarkMap, TrainingPair
from .errors import (
    DataFormatError,
    DimensionMismatch,
    IndexOutOfRange,
    InvalidDimension,
    TooFewEpochs,
)

STOP_CRITERION = "criterion"
STOP_MAX_EPOCHS = "max_epochs"
STOP_NON_FINITE = "non_finite"


@dataclass
class EmbeddingModel:
    """Bias-free butterfly network weights: w_in (L, d) and w_out (d, L)."""

    w_in: np.ndarray
    w_out: np.ndarray

    def __post_init__(self):
        self.w_in = np.array(self.w_in, dtype=float)
        self.w_out = np.array(self.w_out, dtype=float)
        if self.w_in.ndim != 2 or self.w_out.ndim != 2:
            raise InvalidDimension("weight matrices must be 2-D")
        L, d = self.w_in.shape
        if self.w_out.shape != (d, L):
            raise DimensionMismatch(
                f"w_out shape {self.w_out.shape} does not match w_in {self.w_in.shape}"
            )
        if L < 2 or d not in (2, 3):
            raise InvalidDimension(f"need L >= 2 and d in {{2, 3}}, got L={L}, d={d}")

    @property
    def landmark_count(self) -> int:
        return self.w_in.shape[0]

    @property
    def dim(self) -> int:
        return self.w_in.shape[1]

    def copy(self) -> "EmbeddingModel":
        return EmbeddingModel(self.w_in.copy(), self.w_out.copy())

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.w_in)) and np.all(np.isfinite(self.w_out)))


@dataclass
class TrainConfig:
    """Hyperparameters for one training run."""

    context_size: int = 4
    dim: int = 2
    learning_rate: float = 0.05
    batch_size: int = 256
    max_epochs: int = 500
    stop_threshold: float = 0.1
    seed: int = 0
    optimizer: str = "sgd"
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise InvalidDimension(f"dim must be 2 or 3, got {self.dim}")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be positive")
        if not 0.0 < self.stop_threshold < 1.0:
            raise ValueError("stop_threshold must be in (0, 1)")
        if self.optimizer not in ("sgd", "adam"):
            raise ValueError(f"optimizer must be sgd or adam, got {self.optimizer!r}")


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    val_loss: float
    wall_time: float


@dataclass
class TrainLog:
    """Per-epoch losses plus the reason training ended."""

    epochs: list[EpochRecord] = field(default_factory=list)
    stop_reason: str = STOP_MAX_EPOCHS

    def val_losses(self) -> list[float]:
        return [r.val_loss for r in self.epochs]


def init_model(L: int, d: int, seed: int) -> EmbeddingModel:
    """Seeded uniform init on [-0.5/d, 0.5/d] for both weight matrices."""
    if L < 2:
        raise InvalidDimension(f"need at least 2 landmarks, got {L}")
    if d not in (2, 3):
        raise InvalidDimension(f"dimension must be 2 or 3, got {d}")
    rng = np.random.default_rng(seed)
    half = 0.5 / d
    w_in = rng.uniform(-half, half, size=(L, d))
    w_out = rng.uniform(-half, half, size=(d, L))
    return EmbeddingModel(w_in, w_out)


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def forward(model: EmbeddingModel, input_index: int) -> np.ndarray:
    """Softmax output distribution for a one-hot input at ``input_index``."""
    if not 0 <= input_index < model.landmark_count:
        raise IndexOutOfRange(
            f"input_index {input_index} outside [0, {model.landmark_count})"
        )
    logits = model.w_in[input_index] @ model.w_out
    return np.exp(_log_softmax(logits))


def cross_entropy(output: np.ndarray, target: np.ndarray) -> float:
    """Cross entropy -sum(target * ln(output)), skipping zero-target terms."""
    output = np.asarray(output, dtype=float)
    target = np.asarray(target, dtype=float)
    if output.shape != target.shape:
        raise DimensionMismatch(
            f"output shape {output.shape} != target shape {target.shape}"
        )
    support = target > 0
    return float(-(target[support] * np.log(output[support])).sum())


def backward(
    model: EmbeddingModel, pair: TrainingPair
) -> tuple[np.ndarray, np.ndarray]:
    """Exact loss gradients w.r.t. (w_in, w_out) for one training pair.

    The one-hot input makes every w_in row except ``pair.input_index`` inert,
    so its gradient has a single nonzero row. The output-layer error signal
    is (softmax output - target).
    """
    i = pair.input_index
    hidden = model.w_in[i]
    probs = forward(model, i)
    err = probs - pair.target
    grad_in = np.zeros_like(model.w_in)
    grad_in[i] = model.w_out @ err
    grad_out = np.outer(hidden, err)
    return grad_in, grad_out


def should_stop(val_losses, threshold: float) -> bool:
    """Stop once the latest loss decrease is small next to the largest one.

    With deltas[e] = loss[e-1] - loss[e], returns True iff
    deltas[-1] / max(deltas) < threshold. If the loss never decreased
    (max delta <= 0) the rule degenerates and training stops immediately.
    """
    losses = np.asarray(list(val_losses), dtype=float)
    if losses.size < 2:
        raise TooFewEpochs(f"need >= 2 validation losses, got {losses.size}")
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must be in (0, 1), got {threshold}")
    deltas = losses[:-1] - losses[1:]
    largest = deltas.max()
    if largest <= 0:
        return True
    return bool(deltas[-1] / largest < threshold)


def extract_map(model: EmbeddingModel) -> LandmarkMap:
    """Read the landmark coordinates off the input-side weight rows."""
    return LandmarkMap(model.w_in.copy())


def _pairs_to_arrays(pairs) -> tuple[np.ndarray, np.ndarray]:
    indices = np.array([p.input_index for p in pairs], dtype=np.intp)
    targets = np.stack([p.target for p in pairs])
    return indices, targets


def _mean_loss(model: EmbeddingModel, indices: np.ndarray, targets: np.ndarray) -> float:
    logits = model.w_in[indices] @ model.w_out
    logp = _log_softmax(logits)
    terms = np.where(targets > 0, targets * logp, 0.0)
    return float(-terms.sum() / indices.size)


class _AdamState:
    def __init__(self, shape, beta1, beta2, epsilon):
        self.m = np.zeros(shape)
        self.v = np.zeros(shape)
        self.t = 0
        self.beta1, self.beta2, self.epsilon = beta1, beta2, epsilon

    def step(self, grad: np.ndarray) -> np.ndarray:
        self.t += 1
        self.m = self.beta1 * self.m + (1 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1 - self.beta2) * grad * grad
        m_hat = self.m / (1 - self.beta1**self.t)
        v_hat = self.v / (1 - self.beta2**self.t)
        return m_hat / (np.sqrt(v_hat) + self.epsilon)


def train(
    pairs_train, pairs_val, config: TrainConfig
) -> tuple[EmbeddingModel, TrainLog]:
    """Mini-batch training with per-epoch validation loss and early stopping.

    Deterministic for a fixed seed: the same seed drives initialization and
    the per-epoch shuffle. Stops on the loss-decrease criterion, on
    max_epochs, or when a non-finite value appears (in which case the model
    from the last finite epoch is returned).
    """
    if not pairs_train or not pairs_val:
        raise ValueError("both training and validation pair sets must be nonempty")
    idx_tr, tgt_tr = _pairs_to_arrays(pairs_train)
    idx_va, tgt_va = _pairs_to_arrays(pairs_val)
    if tgt_tr.shape[1] != tgt_va.shape[1]:
        raise DimensionMismatch(
            f"train pairs have L={tgt_tr.shape[1]}, validation L={tgt_va.shape[1]}"
        )

    L = tgt_tr.shape[1]
    model = init_model(L, config.dim, config.seed)
    rng = np.random.default_rng(config.seed)
    n_train = idx_tr.size

    adam_in = adam_out = None
    if config.optimizer == "adam":
        adam_in = _AdamState(
            model.w_in.shape, config.adam_beta1, config.adam_beta2, config.adam_epsilon
        )
        adam_out = _AdamState(
            model.w_out.shape, config.adam_beta1, config.adam_beta2, config.adam_epsilon
        )

    log = TrainLog(stop_reason=STOP_MAX_EPOCHS)
    snapshot = model.copy()
    val_losses: list[float] = []
    lr = config.learning_rate

    for epoch in range(1, config.max_epochs + 1):
        started = time.perf_counter()
        perm = rng.permutation(n_train)
        loss_sum = 0.0
        for lo in range(0, n_train, config.batch_size):
            batch = perm[lo : lo + config.batch_size]
            bi = idx_tr[batch]
            bt = tgt_tr[batch]
            hidden = model.w_in[bi]  # fancy indexing copies
            logits = hidden @ model.w_out
            logp = _log_softmax(logits)
            loss_sum += float(-np.where(bt > 0, bt * logp, 0.0).sum())
            err = (np.exp(logp) - bt) / batch.size
            grad_out = hidden.T @ err
            grad_hidden = err @ model.w_out.T
            if config.optimizer == "sgd":
                model.w_out -= lr * grad_out
                np.subtract.at(model.w_in, bi, lr * grad_hidden)
            else:
                grad_in = np.zeros_like(model.w_in)
                np.add.at(grad_in, bi, grad_hidden)
                model.w_in -= lr * adam_in.step(grad_in)
                model.w_out -= lr * adam_out.step(grad_out)
        train_loss = loss_sum / n_train
        val_loss = _mean_loss(model, idx_va, tgt_va)
        wall = time.perf_counter() - started

        if not (np.isfinite(train_loss) and np.isfinite(val_loss) and model.is_finite()):
            log.stop_reason = STOP_NON_FINITE
            return snapshot, log

        log.epochs.append(EpochRecord(epoch, train_loss, val_loss, wall))
        val_losses.append(val_loss)
        snapshot = model.copy()

        if len(val_losses) >= 2 and should_stop(val_losses, config.stop_threshold):
            log.stop_reason = STOP_CRITERION
            return model, log

    log.stop_reason = STOP_MAX_EPOCHS
    return model, log


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------

_MODEL_HEADER = re.compile(r"# landmark2vec model L=(\d+) d=(\d+)\s*$")


def save_model(model: EmbeddingModel, path) -> None:
    """Model CSV: header, L rows of w_in, a blank line, d rows of w_out."""
    lines = [f"# landmark2vec model L={model.landmark_count} d={model.dim}"]
    lines.extend(",".join(repr(v) for v in row) for row in model.w_in.tolist())
    lines.append("")
    lines.extend(",".join(repr(v) for v in row) for row in model.w_out.tolist())
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path) -> EmbeddingModel:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise DataFormatError(f"{path}: empty model file")
    match = _MODEL_HEADER.match(lines[0])
    if not match:
        raise DataFormatError(f"{path}: bad model header {lines[0]!r}")
    L, d = int(match.group(1)), int(match.group(2))
    expected = 1 + L + 1 + d
    body = [ln for ln in lines[1:] if ln.strip() != ""]
    if len(lines) < expected or len(body) != L + d:
        raise DataFormatError(
            f"{path}: expected {L} + {d} weight rows, found {len(body)}"
        )
    try:
        w_in = np.array([[float(v) for v in ln.split(",")] for ln in body[:L]])
        w_out = np.array([[float(v) for v in ln.split(",")] for ln in body[L:]])
    except ValueError as exc:
        raise DataFormatError(f"{path}: {exc}") from exc
    if w_in.shape != (L, d) or w_out.shape != (d, L):
        raise DataFormatError(
            f"{path}: weight shapes {w_in.shape}/{w_out.shape} disagree with header"
        )
    try:
        return EmbeddingModel(w_in, w_out)
    except (DimensionMismatch, InvalidDimension) as exc:
        raise DataFormatError(f"{path}: {exc}") from exc


def write_train_log(log: TrainLog, path) -> None:
    """JSON-lines log: one record per epoch, then a final stop_reason record."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for rec in log.epochs:
            fh.write(
                json.dumps(
                    {
                        "epoch": rec.epoch,
                        "train_loss": rec.train_loss,
                        "val_loss": rec.val_loss,
                    }
                )
                + "\n"
            )
        fh.write(json.dumps({"stop_reason": log.stop_reason}) + "\n")


def read_train_log(path) -> TrainLog:
    log = TrainLog()
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            if "stop_reason" in rec:
                log.stop_reason = rec["stop_reason"]
            else:
                log.epochs.append(
                    EpochRecord(rec["epoch"], rec["train_loss"], rec["val_loss"], 0.0)
                )
    return log
