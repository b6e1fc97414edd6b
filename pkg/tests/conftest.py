import os
from pathlib import Path

import numpy as np
import pytest

from distembed import corpus

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


def zipf_tokens(n_tokens: int, n_words: int, seed: int, exponent: float = 1.1) -> list[str]:
    """Synthetic corpus with a realistic frequency skew."""
    rng = np.random.default_rng(seed)
    probs = 1.0 / np.arange(1, n_words + 1) ** exponent
    probs /= probs.sum()
    draws = rng.choice(n_words, size=n_tokens, p=probs)
    return [f"w{i:04d}" for i in draws]


def make_stream(n_tokens: int, n_words: int, seed: int, min_count: int = 1) -> corpus.TokenStream:
    tokens = zipf_tokens(n_tokens, n_words, seed)
    vocab = corpus.build_vocabulary(tokens, min_count=min_count)
    return corpus.build_token_stream(tokens, vocab, subsample_threshold=0.0)


@pytest.fixture(scope="session")
def small_stream() -> corpus.TokenStream:
    """50k-token zipf corpus over ~300 words; shared by training tests."""
    return make_stream(50_000, 300, seed=101)


def data_path(env_var: str, default_name: str) -> Path | None:
    """Resolve an external data file from the environment or ./data; None if absent."""
    override = os.environ.get(env_var)
    if override:
        p = Path(override)
        if p.exists():
            return p
    p = DATA_DIR / default_name
    return p if p.exists() else None


def require_data(env_var: str, default_name: str, what: str) -> Path:
    p = data_path(env_var, default_name)
    if p is None:
        pytest.skip(
            f"{what} not available: set {env_var} or place it at data/{default_name}"
        )
    return p
