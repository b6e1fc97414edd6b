"""Corpus ingestion: vocabulary building, token encoding, subsampling, negatives.

Input corpora are plain text of whitespace-separated lowercase words (the
text8/enwik9 post-preprocessing layout). Files are streamed in chunks so a
multi-gigabyte corpus never has to fit in memory; the encoded id array does
(4 bytes per retained token).

The corpus is treated as a single unbroken stream: context windows truncate
only at the two ends, there are no sentence boundaries.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Union

import numpy as np

TextSource = Union[str, Path, Iterable[str]]

_READ_CHUNK = 1 << 20  # bytes per read when streaming a file

DEFAULT_MIN_COUNT = 6  # retain words with count >= 6, i.e. discard count <= 5
DEFAULT_SUBSAMPLE_T = 1e-5
DEFAULT_NS_EXPONENT = 0.75


def iter_tokens(source: TextSource) -> Iterator[str]:
    """Yield whitespace-separated tokens from a path, file object, or iterable.

    Paths are read in fixed-size chunks with a carry for tokens split across
    chunk boundaries, so arbitrarily large corpora stream in constant memory.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            carry = ""
            while True:
                chunk = fh.read(_READ_CHUNK)
                if not chunk:
                    break
                parts = (carry + chunk).split()
                if chunk[-1].isspace():
                    carry = ""
                else:
                    carry = parts.pop() if parts else ""
                yield from parts
            if carry:
                yield carry
    elif hasattr(source, "read"):
        carry = ""
        while True:
            chunk = source.read(_READ_CHUNK)
            if not chunk:
                break
            parts = (carry + chunk).split()
            if chunk[-1].isspace():
                carry = ""
            else:
                carry = parts.pop() if parts else ""
            yield from parts
        if carry:
            yield carry
    else:
        yield from source


@dataclass
class Vocabulary:
    """Word/index bijection with per-word corpus counts.

    Words are ordered by descending count (ties broken alphabetically) so
    that index assignment, and everything seeded from it, is deterministic
    for a given corpus and cutoff.
    """

    words: list[str]
    index: dict[str, int]
    counts: np.ndarray  # int64, aligned with words
    total_tokens: int  # sum of retained counts

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index

    @property
    def frequencies(self) -> np.ndarray:
        """Per-word corpus frequency among retained tokens."""
        return self.counts / float(self.total_tokens)

    @classmethod
    def from_counts(cls, counts: "Counter[str] | dict[str, int]", min_count: int) -> "Vocabulary":
        kept = sorted(
            ((w, c) for w, c in counts.items() if c >= min_count),
            key=lambda wc: (-wc[1], wc[0]),
        )
        if not kept:
            raise ValueError(f"no words reach min_count={min_count}")
        words = [w for w, _ in kept]
        arr = np.array([c for _, c in kept], dtype=np.int64)
        return cls(
            words=words,
            index={w: i for i, w in enumerate(words)},
            counts=arr,
            total_tokens=int(arr.sum()),
        )

    def save(self, path) -> None:
        """Write one "word count" pair per line, descending count."""
        with open(path, "w", encoding="utf-8") as fh:
            for word, count in zip(self.words, self.counts):
                fh.write(f"{word} {count}\n")

    @classmethod
    def load(cls, path) -> "Vocabulary":
        words, counts = [], []
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                parts = line.split()
                if len(parts) != 2:
                    raise ValueError(f"{path}: line {lineno}: expected 'word count'")
                words.append(parts[0])
                counts.append(int(parts[1]))
        arr = np.array(counts, dtype=np.int64)
        return cls(
            words=words,
            index={w: i for i, w in enumerate(words)},
            counts=arr,
            total_tokens=int(arr.sum()),
        )


def build_vocabulary(source: TextSource, min_count: int = DEFAULT_MIN_COUNT) -> Vocabulary:
    """Count tokens in the corpus and keep words with count >= min_count.

    The default cutoff of 6 discards words appearing 5 times or fewer.

    Raises:
        ValueError: empty corpus, or nothing survives the cutoff.
        OSError: unreadable source path.
    """
    counts: Counter[str] = Counter()
    n = 0
    buf: list[str] = []
    for token in iter_tokens(source):
        buf.append(token)
        if len(buf) >= 1 << 16:  # batched Counter.update runs at C speed
            counts.update(buf)
            n += len(buf)
            buf.clear()
    counts.update(buf)
    n += len(buf)
    if n == 0:
        raise ValueError("empty corpus")
    return Vocabulary.from_counts(counts, min_count)


def encode(source: TextSource, vocab: Vocabulary) -> np.ndarray:
    """Map the corpus to an int32 id array, silently dropping OOV tokens.

    Context windows later slide over the retained ids, so dropped words do
    not leave gaps.
    """
    index = vocab.index
    ids = (index[t] for t in iter_tokens(source) if t in index)
    return np.fromiter(ids, dtype=np.int32)


def discard_probabilities(vocab: Vocabulary, threshold: float) -> np.ndarray:
    """Per-word probability of dropping an occurrence before training.

    Very frequent words are thinned with the standard discard rule

        P(w) = 1 - (sqrt(t / f(w)) + t / f(w)),   clipped to [0, 1],

    where f(w) is the word's frequency among retained tokens. A threshold
    of 0 (or infinity) disables subsampling entirely.
    """
    if threshold <= 0:
        return np.zeros(len(vocab), dtype=np.float64)
    f = vocab.frequencies
    with np.errstate(over="ignore"):
        p = 1.0 - (np.sqrt(threshold / f) + threshold / f)
    return np.clip(np.nan_to_num(p, nan=0.0, posinf=0.0, neginf=0.0), 0.0, 1.0)


@dataclass
class TokenStream:
    """Encoded corpus plus its subsampling configuration.

    Immutable after construction; workers may read disjoint ranges of
    ``ids`` concurrently.
    """

    ids: np.ndarray
    vocab: Vocabulary
    subsample_threshold: float = DEFAULT_SUBSAMPLE_T
    _discard: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.ids.dtype != np.int32:
            self.ids = self.ids.astype(np.int32)
        if len(self.ids) and (self.ids.min() < 0 or self.ids.max() >= len(self.vocab)):
            raise ValueError("token ids out of vocabulary range")
        self._discard = discard_probabilities(self.vocab, self.subsample_threshold)

    def __len__(self) -> int:
        return len(self.ids)

    def subsampled(self, rng: np.random.Generator) -> np.ndarray:
        """One pass of independent per-occurrence subsampling over the stream."""
        if self.subsample_threshold <= 0:
            return self.ids
        keep = rng.random(len(self.ids)) >= self._discard[self.ids]
        return self.ids[keep]


def build_token_stream(
    source: TextSource, vocab: Vocabulary, subsample_threshold: float = DEFAULT_SUBSAMPLE_T
) -> TokenStream:
    return TokenStream(encode(source, vocab), vocab, subsample_threshold)


def stream_positions(
    ids: np.ndarray, window: int, rng_seed=None, dynamic: bool = False
) -> Iterator[tuple[int, np.ndarray]]:
    """Yield (center position, signed context offsets) over the whole stream.

    Offsets satisfy 0 < |i| <= window and are truncated at the two stream
    ends. With ``dynamic=True`` the effective window for each center is
    drawn uniformly from {1, ..., window}; the sequence is deterministic
    for a fixed seed.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    rng = np.random.default_rng(rng_seed)
    n = len(ids)
    for t in range(n):
        r = int(rng.integers(1, window + 1)) if dynamic else window
        lo = -min(r, t)
        hi = min(r, n - 1 - t)
        offsets = np.concatenate([np.arange(lo, 0), np.arange(1, hi + 1)])
        yield t, offsets


@dataclass
class NegativeSamplingTable:
    """Alias-method sampler over the distorted unigram distribution.

    Draw probabilities are exactly counts**exponent / sum(counts**exponent);
    the alias representation keeps the table at vocabulary size instead of
    the classic multi-hundred-megabyte filled array.
    """

    accept: np.ndarray  # float64 acceptance threshold per slot
    alias: np.ndarray  # int32 alias target per slot
    exponent: float

    @classmethod
    def build(cls, counts: np.ndarray, exponent: float = DEFAULT_NS_EXPONENT) -> "NegativeSamplingTable":
        counts = np.asarray(counts, dtype=np.float64)
        if counts.ndim != 1 or len(counts) == 0 or (counts <= 0).any():
            raise ValueError("counts must be a non-empty vector of positive values")
        probs = counts**exponent
        probs /= probs.sum()
        return cls(*_build_alias(probs), exponent=exponent)

    @classmethod
    def from_vocab(cls, vocab: Vocabulary, exponent: float = DEFAULT_NS_EXPONENT) -> "NegativeSamplingTable":
        return cls.build(vocab.counts, exponent)

    def __len__(self) -> int:
        return len(self.accept)

    def sample(self, k: int, exclude: int | None = None, rng: np.random.Generator | None = None) -> np.ndarray:
        """Draw k word indices; any draw equal to ``exclude`` is redrawn.

        Raises:
            ValueError: k < 1, or the vocabulary contains only the excluded
                word ("degenerate vocabulary").
        """
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        if exclude is not None and len(self) == 1 and exclude == 0:
            raise ValueError("degenerate vocabulary: the only word is excluded from sampling")
        if rng is None:
            rng = np.random.default_rng()
        out = self._draw(k, rng)
        if exclude is not None:
            bad = out == exclude
            while bad.any():
                out[bad] = self._draw(int(bad.sum()), rng)
                bad = out == exclude
        return out

    def _draw(self, k: int, rng: np.random.Generator) -> np.ndarray:
        slots = rng.integers(0, len(self), size=k)
        take_alias = rng.random(k) >= self.accept[slots]
        return np.where(take_alias, self.alias[slots], slots).astype(np.int64)


def _build_alias(probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vose alias construction; deterministic for a fixed input order."""
    n = len(probs)
    accept = np.zeros(n, dtype=np.float64)
    alias = np.zeros(n, dtype=np.int32)
    scaled = probs * n
    small = [i for i in range(n) if scaled[i] < 1.0]
    large = [i for i in range(n) if scaled[i] >= 1.0]
    while small and large:
        s = small.pop()
        l = large.pop()
        accept[s] = scaled[s]
        alias[s] = l
        scaled[l] = (scaled[l] + scaled[s]) - 1.0
        (small if scaled[l] < 1.0 else large).append(l)
    for rest in (large, small):  # leftovers are 1.0 up to rounding
        for i in rest:
            accept[i] = 1.0
            alias[i] = i
    return accept, alias
