import numpy as np
import pytest

from distembed import evaluator
from distembed.evaluator import (
    AnalogyQuestion,
    answer,
    evaluate,
    format_csv,
    format_json,
    format_table,
    is_syntactic,
    load_questions,
)


def write_questions(path, text):
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadQuestions:
    def test_single_section(self, tmp_path):
        p = write_questions(tmp_path / "q.txt",
                            ": capital-common-countries\nathens greece baghdad iraq\n")
        qs = load_questions(p)
        assert len(qs) == 1
        assert qs[0] == AnalogyQuestion("athens", "greece", "baghdad", "iraq",
                                        "capital-common-countries")

    def test_lowercasing(self, tmp_path):
        p = write_questions(tmp_path / "q.txt", ": family\nBoy Girl BROTHER Sister\n")
        q = load_questions(p)[0]
        assert (q.a, q.b, q.c, q.expected) == ("boy", "girl", "brother", "sister")

    def test_malformed_line_reports_line_number(self, tmp_path):
        p = write_questions(tmp_path / "q.txt", ": family\nboy girl brother\n")
        with pytest.raises(ValueError, match="line 2"):
            load_questions(p)

    def test_question_before_header_rejected(self, tmp_path):
        p = write_questions(tmp_path / "q.txt", "boy girl brother sister\n")
        with pytest.raises(ValueError, match="line 1"):
            load_questions(p)

    def test_category_classification(self):
        assert is_syntactic("gram1-adjective-to-adverb")
        assert not is_syntactic("capital-world")


def toy_embeddings():
    """Orthonormal 3-word vocabulary."""
    index = {"x": 0, "y": 1, "z": 2}
    vectors = np.eye(3, dtype=np.float32)
    return vectors, index


class TestAnswer:
    def test_exclusion_forces_remaining_word(self):
        # "x x :: y ?" leaves z as the only candidate
        vectors, index = toy_embeddings()
        q = AnalogyQuestion("x", "x", "y", "z", "toy")
        assert answer(vectors, index, q) == index["z"]

    def test_exact_construction_wins(self):
        # b - a + c = (0,1) exactly matches d's embedding
        index = {"a": 0, "b": 1, "c": 2, "d": 3}
        vectors = np.array([[1, 0], [0, 1], [1, 0], [0, 1]], dtype=np.float32)
        q = AnalogyQuestion("a", "b", "c", "d", "toy")
        assert answer(vectors, index, q) == index["d"]

    def test_oov_returns_none(self):
        vectors, index = toy_embeddings()
        q = AnalogyQuestion("x", "y", "nope", "z", "toy")
        assert answer(vectors, index, q) is None

    def test_never_returns_an_input_word(self):
        rng = np.random.default_rng(0)
        vectors = rng.standard_normal((20, 8)).astype(np.float32)
        index = {f"w{i}": i for i in range(20)}
        for _ in range(50):
            a, b, c = rng.choice(20, size=3, replace=False)
            q = AnalogyQuestion(f"w{a}", f"w{b}", f"w{c}", "w0", "toy")
            assert answer(vectors, index, q) not in {a, b, c}

    def test_scale_invariance(self):
        """Cosine answers are unchanged by positive per-matrix rescaling."""
        rng = np.random.default_rng(1)
        vectors = rng.standard_normal((30, 8)).astype(np.float32)
        index = {f"w{i}": i for i in range(30)}
        qs = [AnalogyQuestion(*(f"w{j}" for j in rng.choice(30, 3, replace=False)), "w0", "t")
              for _ in range(25)]
        base = [answer(vectors, index, q) for q in qs]
        scaled = [answer(vectors * 173.25, index, q) for q in qs]
        assert base == scaled

    def test_tie_breaks_to_lowest_index(self):
        index = {"a": 0, "b": 1, "c": 2, "dup1": 3, "dup2": 4}
        vectors = np.array(
            [[1, 0], [0, 1], [1, 0], [0.6, 0.8], [0.6, 0.8]], dtype=np.float32
        )
        q = AnalogyQuestion("a", "b", "c", "dup2", "toy")
        assert answer(vectors, index, q) == 3


def analogy_fixture():
    """Question set whose answers are exact by construction.

    Word pairs (base_i, shifted_i) share one translation direction, so
    shifted_b - base_b + base_c lands exactly on shifted_c. Two categories,
    plus questions touching an unknown word to exercise OOV skipping.
    """
    n_pairs = 6
    dim = n_pairs + 1
    words = {}
    vecs = []
    for i in range(n_pairs):
        base = np.zeros(dim)
        base[i] = 1.0
        shift = base.copy()
        shift[-1] = 1.0
        words[f"base{i}"] = len(vecs)
        vecs.append(base)
        words[f"shift{i}"] = len(vecs)
        vecs.append(shift)
    vectors = np.array(vecs, dtype=np.float32)

    questions = []
    for cat, pairs in (("pairs-one", [(0, 1), (1, 2), (2, 3)]),
                       ("gram1-pairs-two", [(3, 4), (4, 5), (5, 0)])):
        for i, j in pairs:
            questions.append(
                AnalogyQuestion(f"base{i}", f"shift{i}", f"base{j}", f"shift{j}", cat)
            )
    # two OOV questions in the first category
    questions.insert(0, AnalogyQuestion("base0", "shift0", "missing", "shift1", "pairs-one"))
    questions.append(AnalogyQuestion("missing", "shift0", "base1", "shift1", "gram1-pairs-two"))
    return vectors, words, questions


class TestEvaluate:
    def test_perfect_recall_construction(self):
        vectors, index, questions = analogy_fixture()
        report = evaluate(vectors, index, questions)
        assert report.skipped == 2
        # every resolvable question is answered exactly
        assert report.categories["pairs-one"].correct == 3
        assert report.categories["pairs-one"].total == 4
        assert report.categories["gram1-pairs-two"].correct == 3
        assert report.categories["gram1-pairs-two"].total == 4
        # denominators include the OOV skips
        assert report.categories["pairs-one"].accuracy == pytest.approx(3 / 4)
        assert report.semantic.total == 4 and report.syntactic.total == 4
        assert report.total.correct == 6 and report.total.total == 8

    def test_conservation(self):
        vectors, index, questions = analogy_fixture()
        report = evaluate(vectors, index, questions)
        assert sum(c.total for c in report.categories.values()) == len(questions)
        assert sum(c.correct for c in report.categories.values()) == report.total.correct
        assert report.semantic.total + report.syntactic.total == report.total.total

    def test_empty_question_list(self):
        vectors, index, _ = analogy_fixture()
        report = evaluate(vectors, index, [])
        assert report.total.total == 0 and report.skipped == 0 and report.categories == {}

    def test_matches_single_question_path(self):
        """Batch evaluation agrees with the one-question-at-a-time route."""
        vectors, index, questions = analogy_fixture()
        report = evaluate(vectors, index, questions)
        total_correct = sum(
            1
            for q in questions
            if all(w in index for w in (q.a, q.b, q.c, q.expected))
            and answer(vectors, index, q) == index[q.expected]
        )
        assert total_correct == report.total.correct

    def test_batching_is_invisible(self):
        vectors, index, questions = analogy_fixture()
        r1 = evaluate(vectors, index, questions, batch_size=1)
        r2 = evaluate(vectors, index, questions, batch_size=512)
        assert r1 == r2


class TestFormatting:
    def test_table_contains_rollups(self):
        vectors, index, questions = analogy_fixture()
        table = format_table(evaluate(vectors, index, questions))
        for needle in ("pairs-one", "Semantic", "Syntactic", "Total", "skipped"):
            assert needle in table

    def test_csv_and_json_parse(self):
        import csv as csv_mod
        import io
        import json

        vectors, index, questions = analogy_fixture()
        report = evaluate(vectors, index, questions)
        rows = list(csv_mod.reader(io.StringIO(format_csv(report))))
        assert rows[0] == ["category", "accuracy", "correct", "total"]
        doc = json.loads(format_json(report))
        assert doc["total"]["correct"] == report.total.correct
        assert doc["skipped"] == 2
