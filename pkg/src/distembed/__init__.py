"""Word embedding training with distance-weighted context pooling and
window-size scheduling, plus analogy-task evaluation and model persistence.
"""

from . import corpus, evaluator, model_io, trainer, weights, windows
from .corpus import (
    NegativeSamplingTable,
    TokenStream,
    Vocabulary,
    build_token_stream,
    build_vocabulary,
)
from .evaluator import AnalogyQuestion, EvalReport, evaluate, load_questions
from .model_io import ModelFile, load_model, save_binary, save_text
from .trainer import (
    EmbeddingMatrices,
    TrainConfig,
    TrainResult,
    train,
    train_cbow,
    train_skipgram,
)
from .windows import WindowSchedule

__version__ = "0.1.0"

__all__ = [
    "AnalogyQuestion",
    "EmbeddingMatrices",
    "EvalReport",
    "ModelFile",
    "NegativeSamplingTable",
    "TokenStream",
    "TrainConfig",
    "TrainResult",
    "Vocabulary",
    "WindowSchedule",
    "build_token_stream",
    "build_vocabulary",
    "corpus",
    "evaluate",
    "evaluator",
    "load_model",
    "load_questions",
    "model_io",
    "save_binary",
    "save_text",
    "train",
    "train_cbow",
    "train_skipgram",
    "trainer",
    "weights",
    "windows",
]
