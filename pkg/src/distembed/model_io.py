"""Embedding persistence in the two interchange layouts.

Text: first line "vocab_size dim", then one "word f1 ... fd" line per word
with 6 significant digits, UTF-8, LF endings. Binary: the same ASCII header
line, then per word the UTF-8 word, a single space, d little-endian 32-bit
floats, and a newline; round-trips are bit-exact. A JSON sidecar carries
the training configuration and final weight parameters so a run can be
reproduced and its weight curve regenerated.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

SIDECAR_VERSION = 1


class ModelFormatError(ValueError):
    """Malformed or truncated model file."""


@dataclass
class ModelFile:
    """Words plus their (V, d) float32 embedding rows, in file order."""

    words: list[str]
    vectors: np.ndarray

    def __post_init__(self):
        if self.vectors.ndim != 2 or len(self.words) != self.vectors.shape[0]:
            raise ModelFormatError(
                f"{len(self.words)} words but vector matrix of shape {self.vectors.shape}"
            )

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def word_index(self) -> dict[str, int]:
        return {w: i for i, w in enumerate(self.words)}


def save_text(path, words: list[str], vectors: np.ndarray) -> None:
    vectors = np.asarray(vectors)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{len(words)} {vectors.shape[1]}\n")
        for word, row in zip(words, vectors):
            fh.write(word)
            fh.write(" ")
            fh.write(" ".join(f"{x:.6g}" for x in row))
            fh.write("\n")


def load_text(path) -> ModelFile:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ModelFormatError(f"{path}: expected 'vocab_size dim' header")
        try:
            vocab_size, dim = int(header[0]), int(header[1])
        except ValueError as exc:
            raise ModelFormatError(f"{path}: non-integer header: {header}") from exc
        words: list[str] = []
        vectors = np.empty((vocab_size, dim), dtype=np.float32)
        for i in range(vocab_size):
            line = fh.readline()
            if not line:
                raise ModelFormatError(f"{path}: truncated at record {i} of {vocab_size}")
            parts = line.split()
            if len(parts) != dim + 1:
                raise ModelFormatError(
                    f"{path}: record {i}: expected word + {dim} floats, got {len(parts)} fields"
                )
            words.append(parts[0])
            try:
                vectors[i] = [float(x) for x in parts[1:]]
            except ValueError as exc:
                raise ModelFormatError(f"{path}: record {i}: bad float") from exc
        if fh.readline().strip():
            raise ModelFormatError(f"{path}: trailing data after {vocab_size} records")
    return ModelFile(words=words, vectors=vectors)


def save_binary(path, words: list[str], vectors: np.ndarray) -> None:
    vectors = np.ascontiguousarray(vectors, dtype="<f4")
    with open(path, "wb") as fh:
        fh.write(f"{len(words)} {vectors.shape[1]}\n".encode("ascii"))
        for word, row in zip(words, vectors):
            fh.write(word.encode("utf-8"))
            fh.write(b" ")
            fh.write(row.tobytes())
            fh.write(b"\n")


def load_binary(path) -> ModelFile:
    with open(path, "rb") as fh:
        data = fh.read()
    eol = data.find(b"\n")
    if eol < 0:
        raise ModelFormatError(f"{path}: missing header line")
    header = data[:eol].split()
    if len(header) != 2:
        raise ModelFormatError(f"{path}: expected 'vocab_size dim' header")
    try:
        vocab_size, dim = int(header[0]), int(header[1])
    except ValueError as exc:
        raise ModelFormatError(f"{path}: non-integer header: {header!r}") from exc
    record_bytes = 4 * dim
    words: list[str] = []
    vectors = np.empty((vocab_size, dim), dtype=np.float32)
    pos = eol + 1
    for i in range(vocab_size):
        sep = data.find(b" ", pos)
        if sep < 0:
            raise ModelFormatError(f"{path}: truncated record for word {i} of {vocab_size}")
        try:
            words.append(data[pos:sep].decode("utf-8"))
        except UnicodeDecodeError as exc:
            raise ModelFormatError(f"{path}: undecodable word at record {i}") from exc
        pos = sep + 1
        if pos + record_bytes + 1 > len(data):
            raise ModelFormatError(f"{path}: truncated record for word {i} of {vocab_size}")
        vectors[i] = np.frombuffer(data, dtype="<f4", count=dim, offset=pos)
        pos += record_bytes
        if data[pos : pos + 1] != b"\n":
            raise ModelFormatError(f"{path}: missing record terminator for word {i}")
        pos += 1
    if pos != len(data):
        raise ModelFormatError(f"{path}: trailing data after {vocab_size} records")
    return ModelFile(words=words, vectors=vectors)


def load_model(path) -> ModelFile:
    """Load either format: text is tried first, then the binary layout."""
    try:
        return load_text(path)
    except (ModelFormatError, UnicodeDecodeError):
        return load_binary(path)


def save_sidecar(path, config, lfw_params: Optional[np.ndarray], extra: Optional[dict] = None) -> None:
    """Write the run's reproduction metadata next to the model file.

    ``config`` is a TrainConfig (or any dataclass); the document captures
    every field, including the window schedule, plus the final weight
    parameters when learnable weights were trained.
    """
    doc = {
        "format_version": SIDECAR_VERSION,
        "config": dataclasses.asdict(config) if dataclasses.is_dataclass(config) else dict(config),
        "lfw_params": None if lfw_params is None else [float(x) for x in lfw_params],
    }
    if extra:
        doc["extra"] = extra
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_sidecar(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
