import numpy as np
import pytest

from distembed import evaluator, model_io, trainer, windows
from distembed.model_io import (
    ModelFormatError,
    load_binary,
    load_model,
    load_sidecar,
    load_text,
    save_binary,
    save_sidecar,
    save_text,
)
from conftest import make_stream


def tiny_model(v=12, d=6, seed=0):
    rng = np.random.default_rng(seed)
    words = [f"word{i:02d}" for i in range(v)]
    vectors = rng.standard_normal((v, d)).astype(np.float32)
    return words, vectors


class TestTextFormat:
    def test_line_count(self, tmp_path):
        words, vectors = tiny_model(v=2, d=3)
        path = tmp_path / "m.txt"
        save_text(path, words, vectors)
        lines = path.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 3
        assert lines[0] == "2 3"

    def test_round_trip_within_printed_precision(self, tmp_path):
        words, vectors = tiny_model()
        path = tmp_path / "m.txt"
        save_text(path, words, vectors)
        loaded = load_text(path)
        assert loaded.words == words
        np.testing.assert_allclose(loaded.vectors, vectors, atol=1e-5)

    def test_header_mismatch_detected(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("3 2\nw0 0.1 0.2\nw1 0.3 0.4\n", encoding="utf-8")
        with pytest.raises(ModelFormatError, match="truncated"):
            load_text(path)

    def test_record_width_mismatch_detected(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("1 3\nw0 0.1 0.2\n", encoding="utf-8")
        with pytest.raises(ModelFormatError, match="record 0"):
            load_text(path)


class TestBinaryFormat:
    def test_bitwise_round_trip(self, tmp_path):
        words, vectors = tiny_model()
        path = tmp_path / "m.bin"
        save_binary(path, words, vectors)
        loaded = load_binary(path)
        assert loaded.words == words
        assert np.array_equal(loaded.vectors, vectors)
        assert loaded.vectors.dtype == np.float32

    def test_truncation_names_failing_record(self, tmp_path):
        words, vectors = tiny_model(v=5, d=4)
        path = tmp_path / "m.bin"
        save_binary(path, words, vectors)
        blob = path.read_bytes()
        (tmp_path / "cut.bin").write_bytes(blob[: len(blob) - 10])
        with pytest.raises(ModelFormatError, match="word 4"):
            load_binary(tmp_path / "cut.bin")

    def test_missing_terminator_detected(self, tmp_path):
        words, vectors = tiny_model(v=2, d=2)
        path = tmp_path / "m.bin"
        save_binary(path, words, vectors)
        blob = bytearray(path.read_bytes())
        blob[-1] = ord(" ")  # clobber the final newline
        (tmp_path / "bad.bin").write_bytes(bytes(blob))
        with pytest.raises(ModelFormatError, match="terminator"):
            load_binary(tmp_path / "bad.bin")

    def test_every_truncation_point_raises_cleanly(self, tmp_path):
        """Cutting the file at any byte yields ModelFormatError, never garbage."""
        words, vectors = tiny_model(v=3, d=2)
        path = tmp_path / "m.bin"
        save_binary(path, words, vectors)
        blob = path.read_bytes()
        cut_path = tmp_path / "cut.bin"
        for k in range(len(blob)):
            cut_path.write_bytes(blob[:k])
            with pytest.raises(ModelFormatError):
                load_binary(cut_path)

    def test_cross_format_agreement(self, tmp_path):
        words, vectors = tiny_model()
        save_text(tmp_path / "m.txt", words, vectors)
        save_binary(tmp_path / "m.bin", words, vectors)
        t = load_text(tmp_path / "m.txt")
        b = load_binary(tmp_path / "m.bin")
        np.testing.assert_allclose(t.vectors, b.vectors, atol=1e-5)
        assert t.words == b.words


class TestAutoDetect:
    def test_detects_both_formats(self, tmp_path):
        words, vectors = tiny_model()
        save_text(tmp_path / "m.txt", words, vectors)
        save_binary(tmp_path / "m.bin", words, vectors)
        assert load_model(tmp_path / "m.txt").words == words
        assert load_model(tmp_path / "m.bin").words == words


class TestSidecar:
    def test_round_trip_preserves_run_recipe(self, tmp_path):
        cfg = trainer.TrainConfig(
            model="cbow",
            schedule=windows.WindowSchedule("edws", 15, total_epochs=6),
            dim=32,
            lfw_formula="pow-shared",
            seed=7,
        )
        params = np.array([0.81, 0.04])
        path = tmp_path / "m.meta.json"
        save_sidecar(path, cfg, params, extra={"note": "unit-test"})
        doc = load_sidecar(path)
        assert doc["config"]["model"] == "cbow"
        assert doc["config"]["lfw_formula"] == "pow-shared"
        assert doc["config"]["schedule"]["strategy"] == "edws"
        assert doc["config"]["schedule"]["max_window"] == 15
        assert doc["lfw_params"] == [0.81, 0.04]
        assert doc["extra"]["note"] == "unit-test"


class TestEvaluatorParity:
    def test_both_formats_score_identically(self, tmp_path):
        """Criterion-level: a trained model must evaluate identically from
        either serialization."""
        stream = make_stream(8_000, 60, seed=17)
        cfg = trainer.TrainConfig(
            model="cbow", schedule=windows.WindowSchedule("fixed", 3, total_epochs=2),
            dim=16, seed=3,
        )
        result = trainer.train(stream, cfg)
        words = stream.vocab.words
        save_text(tmp_path / "m.txt", words, result.matrices.input)
        save_binary(tmp_path / "m.bin", words, result.matrices.input)

        rng = np.random.default_rng(8)
        questions = [
            evaluator.AnalogyQuestion(
                *(words[j] for j in rng.choice(len(words), 4, replace=False)), "probe"
            )
            for _ in range(100)
        ]
        t = load_model(tmp_path / "m.txt")
        b = load_model(tmp_path / "m.bin")
        rt = evaluator.evaluate(t.vectors, t.word_index(), questions)
        rb = evaluator.evaluate(b.vectors, b.word_index(), questions)
        assert rt == rb
