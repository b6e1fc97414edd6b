"""Embedding training: center-word (CBOW-style) and context-word (Skip-gram
style) objectives with negative sampling, optional learnable distance
weights for context pooling, and the three window strategies.

One epoch walks the token stream position by position. Workers own disjoint
position ranges and update the shared matrices without locks; weight
parameters are the exception and are flushed under a lock every
``flush_interval`` positions. Runs are bit-reproducible for a single worker
and fixed seed.
"""

from __future__ import annotations

import logging
import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels, weights, windows
from .corpus import NegativeSamplingTable, TokenStream, discard_probabilities

logger = logging.getLogger(__name__)

CBOW = "cbow"
SKIPGRAM = "skipgram"
MODELS = (CBOW, SKIPGRAM)

DEFAULT_LR = {CBOW: 0.05, SKIPGRAM: 0.025}
LR_FLOOR_FRACTION = 1e-4

# A flush applies the sum of up to flush_interval per-position parameter
# gradients as one step; on hostile corpora that batched step can overshoot
# where true per-position updates would have tracked the surface. Cap the
# step (inf-norm) so a single flush can never fling the weight parameters.
MAX_PARAM_STEP = 0.1


class TrainingDivergedError(RuntimeError):
    """Raised when a non-finite loss or parameter is detected."""


def linear_lr(initial: float, progress: float) -> float:
    """Linearly decayed learning rate with a floor of 1e-4 x initial."""
    return max(initial * (1.0 - progress), initial * LR_FLOOR_FRACTION)


def sgd_step(row: np.ndarray, grad: np.ndarray, learning_rate: float) -> np.ndarray:
    """In-place SGD update row -= lr * grad; returns the row."""
    if learning_rate <= 0:
        raise ValueError(f"learning_rate must be > 0, got {learning_rate}")
    row -= (learning_rate * grad).astype(row.dtype, copy=False)
    return row


@dataclass
class EmbeddingMatrices:
    """Input (context/center) and output embedding matrices, float32."""

    input: np.ndarray
    output: np.ndarray

    @classmethod
    def initialize(cls, vocab_size: int, dim: int, seed: int) -> "EmbeddingMatrices":
        """Input rows uniform in [-0.5/dim, 0.5/dim]; output rows zero."""
        rng = np.random.default_rng(seed)
        inp = (rng.random((vocab_size, dim), dtype=np.float32) - np.float32(0.5)) / np.float32(dim)
        out = np.zeros((vocab_size, dim), dtype=np.float32)
        return cls(input=inp, output=out)

    @property
    def vocab_size(self) -> int:
        return self.input.shape[0]

    @property
    def dim(self) -> int:
        return self.input.shape[1]


@dataclass
class TrainConfig:
    """Everything a training run depends on, in one place."""

    model: str
    schedule: windows.WindowSchedule
    dim: int = 128
    lfw_formula: Optional[str] = None  # None trains plain unweighted pooling
    negatives: int = 5
    learning_rate: Optional[float] = None  # None: 0.05 cbow, 0.025 skipgram
    lfw_lr_scale: float = 0.1  # weight-param lr as a fraction of embedding lr; 0 freezes
    subsample: float = 0.0  # discard threshold t; 0 disables
    workers: int = 1
    seed: int = 1
    flush_interval: int = 10_000  # positions per kernel call / param flush

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if self.negatives < 1:
            raise ValueError(f"negatives must be >= 1, got {self.negatives}")
        if self.learning_rate is not None and self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.lfw_formula is not None:
            if self.model != CBOW:
                raise ValueError("learnable context weights apply to the cbow model only")
            if self.lfw_formula not in weights.FORMULAS:
                raise ValueError(
                    f"unknown weight formula {self.lfw_formula!r}; expected one of {weights.FORMULAS}"
                )
        if self.lfw_lr_scale < 0:
            raise ValueError(f"lfw_lr_scale must be >= 0, got {self.lfw_lr_scale}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if self.flush_interval < 1:
            raise ValueError(f"flush_interval must be >= 1, got {self.flush_interval}")

    @property
    def epochs(self) -> int:
        return self.schedule.total_epochs

    def resolved_lr(self) -> float:
        return self.learning_rate if self.learning_rate is not None else DEFAULT_LR[self.model]


@dataclass
class EpochStats:
    epoch: int
    window: int
    mean_loss: float
    examples: int
    lfw_params: Optional[tuple]
    tokens_per_sec: float


@dataclass
class TrainResult:
    matrices: EmbeddingMatrices
    lfw_params: Optional[np.ndarray]
    history: list[EpochStats] = field(default_factory=list)
    config: Optional[TrainConfig] = None


def cbow_position_loss_and_grads(context_vecs, lambdas, output_vecs, labels):
    """Negative-sampling loss at a single position, with analytic gradients.

    This float64 routine defines the math the training kernel implements:
    the pooled context u_C = (1/Z) sum_j lambda_j u_j is scored against each
    output row, the positive (label 1) target plus sampled negatives
    (label 0), under the logistic loss.

    Args:
        context_vecs: (m, d) input rows of the present context words.
        lambdas: (m,) context weights.
        output_vecs: (n_out, d) output rows, positive first by convention.
        labels: (n_out,) 1.0 for the true center word, 0.0 for negatives.

    Returns:
        (loss, grad_context, grad_outputs, grad_uc) where grad_context is
        (m, d), grad_outputs is (n_out, d), and grad_uc is the loss gradient
        at the pooled vector (needed for the weight-parameter chain rule).
    """
    context_vecs = np.asarray(context_vecs, dtype=np.float64)
    lambdas = np.asarray(lambdas, dtype=np.float64)
    output_vecs = np.asarray(output_vecs, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    z = lambdas.sum()
    u_c = (lambdas @ context_vecs) / z
    scores = output_vecs @ u_c
    # -log sigma(s) for label 1, -log sigma(-s) for label 0, overflow-safe
    loss = float(np.sum(np.logaddexp(0.0, np.where(labels == 1.0, -scores, scores))))
    resid = 1.0 / (1.0 + np.exp(-scores)) - labels  # d loss / d score
    grad_outputs = resid[:, None] * u_c[None, :]
    grad_uc = resid @ output_vecs
    grad_context = (lambdas / z)[:, None] * grad_uc[None, :]
    return loss, grad_context, grad_outputs, grad_uc


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


def _worker_rng_state(seed: int, epoch: int, worker: int) -> np.uint64:
    s = _splitmix64(_splitmix64(_splitmix64(seed) ^ epoch) ^ (worker + 0x9E37))
    return np.uint64(s or 0x106689D45497FDB5)  # xorshift state must be nonzero


def _weight_tables(config: TrainConfig, params, window: int, accumulate: bool):
    """Kernel weight tables indexed by signed offset + window.

    Returns (lam, dlam): float32 weights of length 2*window+1 and float64
    per-parameter partials of shape (P, 2*window+1); P is 0 when gradients
    are not being accumulated. The center slot stays unused.
    """
    size = 2 * window + 1
    if config.lfw_formula is None:
        return np.ones(size, dtype=np.float32), np.zeros((0, size), dtype=np.float64)
    lam = np.ones(size, dtype=np.float64)
    left, right = weights.weight_table(config.lfw_formula, params, window)
    lam[:window] = left[1:][::-1]
    lam[window + 1 :] = right[1:]
    if accumulate:
        dleft, dright = weights.gradient_table(config.lfw_formula, params, window)
        dlam = np.zeros((dleft.shape[0], size), dtype=np.float64)
        dlam[:, :window] = dleft[:, 1:][:, ::-1]
        dlam[:, window + 1 :] = dright[:, 1:]
    else:
        dlam = np.zeros((0, size), dtype=np.float64)
    return lam.astype(np.float32), dlam


def train(stream: TokenStream, config: TrainConfig) -> TrainResult:
    """Run the configured training and return matrices plus per-epoch stats."""
    vocab = stream.vocab
    if len(vocab) < 2:
        raise ValueError("degenerate vocabulary: need at least 2 words to sample negatives")
    n_raw = len(stream.ids)
    if n_raw == 0:
        raise ValueError("empty token stream")

    schedule = config.schedule
    lr0 = config.resolved_lr()
    lr_floor = lr0 * LR_FLOOR_FRACTION
    mats = EmbeddingMatrices.initialize(len(vocab), config.dim, config.seed)
    table = NegativeSamplingTable.from_vocab(vocab)
    dynamic = schedule.strategy == windows.RANDOM

    lfw_on = config.lfw_formula is not None
    params = weights.init_params(config.lfw_formula) if lfw_on else None
    accumulate = lfw_on and config.lfw_lr_scale > 0
    discard = discard_probabilities(vocab, config.subsample) if config.subsample > 0 else None

    total_tokens = float(n_raw) * config.epochs
    shared = {"done": 0.0}  # raw-token progress, all epochs
    lock = threading.Lock()
    history: list[EpochStats] = []

    for epoch in range(1, config.epochs + 1):
        if schedule.strategy == windows.EDWS:
            window = windows.window_for_epoch(schedule, epoch)
        else:
            window = schedule.max_window

        if discard is not None:
            ep_rng = np.random.default_rng(_splitmix64(config.seed) ^ epoch)
            keep = ep_rng.random(n_raw) >= discard[stream.ids]
            ids = np.ascontiguousarray(stream.ids[keep])
            if len(ids) == 0:
                raise ValueError("subsampling removed every token; lower the threshold")
        else:
            ids = stream.ids
        n_e = len(ids)
        # the lr schedule advances in raw-token units even when subsampling shrinks the epoch
        progress_scale = n_raw / n_e

        epoch_stats = np.zeros(3, dtype=np.float64)
        started = time.perf_counter()

        def run_range(worker: int, begin: int, stop: int, *, _epoch=epoch, _ids=ids,
                      _window=window, _scale=progress_scale, _acc=epoch_stats):
            state = _worker_rng_state(config.seed, _epoch, worker)
            pos = begin
            while pos < stop:
                chunk_end = min(pos + config.flush_interval, stop)
                with lock:
                    base = shared["done"]
                    snap = params.copy() if lfw_on else None
                lam, dlam = _weight_tables(config, snap, _window, accumulate)
                pgrads = np.zeros(dlam.shape[0], dtype=np.float64)
                stats = np.zeros(3, dtype=np.float64)
                if config.model == CBOW:
                    # kernels return the RNG state as a plain int; rewrap for the next call
                    state = np.uint64(_kernels.cbow_chunk(
                        _ids, pos, chunk_end, mats.input, mats.output,
                        lam, dlam,
                        _window, dynamic, config.negatives, table.accept, table.alias,
                        lr0, lr_floor, base, _scale, total_tokens,
                        state, accumulate, pgrads, stats,
                    ))
                else:
                    state = np.uint64(_kernels.skipgram_chunk(
                        _ids, pos, chunk_end, mats.input, mats.output,
                        _window, dynamic, config.negatives, table.accept, table.alias,
                        lr0, lr_floor, base, _scale, total_tokens,
                        state, stats,
                    ))
                if not math.isfinite(stats[0]):
                    raise TrainingDivergedError(
                        f"non-finite loss in epoch {_epoch}, positions [{pos}, {chunk_end}): "
                        f"loss={stats[0]}, lr0={lr0}, params={None if snap is None else snap.tolist()}"
                    )
                with lock:
                    shared["done"] = base + (chunk_end - pos) * _scale
                    _acc += stats
                    if accumulate and pgrads.size:
                        rate = config.lfw_lr_scale * linear_lr(lr0, base / total_tokens)
                        step = rate * pgrads
                        biggest = np.abs(step).max()
                        if biggest > MAX_PARAM_STEP:
                            step *= MAX_PARAM_STEP / biggest
                        params[:] = params - step
                        if not np.isfinite(params).all():
                            raise TrainingDivergedError(
                                f"non-finite weight parameters in epoch {_epoch}: {params.tolist()}"
                            )
                pos = chunk_end

        if config.workers == 1:
            run_range(0, 0, n_e)
        else:
            bounds = np.linspace(0, n_e, config.workers + 1).astype(np.int64)
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                futures = [
                    pool.submit(run_range, w, int(bounds[w]), int(bounds[w + 1]))
                    for w in range(config.workers)
                ]
                for fut in futures:
                    fut.result()

        elapsed = time.perf_counter() - started
        if not (np.isfinite(mats.input).all() and np.isfinite(mats.output).all()):
            raise TrainingDivergedError(f"non-finite embeddings after epoch {epoch}")

        examples = int(epoch_stats[1])
        mean_loss = epoch_stats[0] / examples if examples else float("nan")
        stat = EpochStats(
            epoch=epoch,
            window=window,
            mean_loss=mean_loss,
            examples=examples,
            lfw_params=tuple(params.tolist()) if lfw_on else None,
            tokens_per_sec=n_e / elapsed if elapsed > 0 else float("inf"),
        )
        history.append(stat)
        logger.info(
            "epoch %d/%d window=%d loss=%.5f examples=%d params=%s tokens/s=%.0f",
            epoch, config.epochs, window, mean_loss, examples,
            "-" if params is None else np.array2string(params, precision=4),
            stat.tokens_per_sec,
        )

    return TrainResult(
        matrices=mats,
        lfw_params=params,
        history=history,
        config=config,
    )


def train_cbow(stream: TokenStream, config: TrainConfig) -> TrainResult:
    if config.model != CBOW:
        raise ValueError(f"train_cbow requires model={CBOW!r}, got {config.model!r}")
    return train(stream, config)


def train_skipgram(stream: TokenStream, config: TrainConfig) -> TrainResult:
    if config.model != SKIPGRAM:
        raise ValueError(f"train_skipgram requires model={SKIPGRAM!r}, got {config.model!r}")
    return train(stream, config)
