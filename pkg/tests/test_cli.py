import csv
import json

import numpy as np
import pytest

from distembed import cli, model_io
from conftest import zipf_tokens


@pytest.fixture()
def corpus_file(tmp_path):
    path = tmp_path / "corpus.txt"
    path.write_text(" ".join(zipf_tokens(30_000, 80, seed=55)), encoding="utf-8")
    return path


def run(args):
    return cli.main([str(a) for a in args])


class TestVocabCommand:
    def test_builds_and_saves(self, corpus_file, tmp_path):
        out = tmp_path / "vocab.txt"
        assert run(["vocab", "--input", corpus_file, "--output", out, "--min-count", 2]) == 0
        lines = out.read_text().splitlines()
        counts = [int(l.split()[1]) for l in lines]
        assert counts == sorted(counts, reverse=True)
        assert min(counts) >= 2


class TestTrainEvalPipeline:
    def test_train_eval_convert_curve(self, corpus_file, tmp_path):
        model = tmp_path / "model.bin"
        assert run([
            "train", "--input", corpus_file, "--output", model,
            "--model", "cbow", "--lfw", "pow-shared",
            "--dim", 16, "--window", 3, "--epochs", 2,
            "--min-count", 1, "--seed", 4,
        ]) == 0
        assert model.exists()
        sidecar = json.loads((tmp_path / "model.bin.meta.json").read_text())
        assert sidecar["config"]["lfw_formula"] == "pow-shared"
        assert len(sidecar["lfw_params"]) == 2
        assert len(sidecar["extra"]["epochs"]) == 2

        # questions over in-vocabulary words
        mf = model_io.load_model(model)
        words = mf.words[:8]
        qfile = tmp_path / "questions.txt"
        qfile.write_text(
            ": probe\n" + "\n".join(
                f"{words[0]} {words[1]} {words[i]} {words[i + 1]}" for i in range(2, 6)
            ) + "\n",
            encoding="utf-8",
        )
        assert run(["eval", "--model", model, "--questions", qfile, "--format", "json"]) == 0

        text_model = tmp_path / "model.txt"
        assert run(["convert", "--in", model, "--out", text_model, "--format", "text"]) == 0
        tm = model_io.load_model(text_model)
        np.testing.assert_allclose(tm.vectors, mf.vectors, atol=1e-5)

        curve = tmp_path / "curve.csv"
        assert run(["curve", "--sidecar", tmp_path / "model.bin.meta.json",
                    "--out", curve]) == 0
        with open(curve, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["distance", "weight"]
        assert len(rows) == 4  # header + distances 1..3
        assert abs(sum(float(r[1]) for r in rows[1:]) - 1.0) < 1e-12

    def test_train_edws_skipgram(self, corpus_file, tmp_path):
        model = tmp_path / "sg.bin"
        assert run([
            "train", "--input", corpus_file, "--output", model,
            "--model", "skipgram", "--window-strategy", "edws",
            "--window", 6, "--epochs", 3, "--dim", 8, "--min-count", 1,
        ]) == 0
        sidecar = json.loads((tmp_path / "sg.bin.meta.json").read_text())
        assert [e["window"] for e in sidecar["extra"]["epochs"]] == [2, 4, 6]

    def test_eval_exit_code_zero_even_at_zero_accuracy(self, corpus_file, tmp_path, capsys):
        model = tmp_path / "m.bin"
        run(["train", "--input", corpus_file, "--output", model,
             "--dim", 8, "--window", 2, "--epochs", 1, "--min-count", 1])
        qfile = tmp_path / "q.txt"
        qfile.write_text(": probe\nqq ww ee rr\n", encoding="utf-8")  # all OOV
        assert run(["eval", "--model", model, "--questions", qfile]) == 0
        out = capsys.readouterr().out
        assert "skipped" in out


class TestCurveDirect:
    def test_explicit_formula_params(self, tmp_path):
        out = tmp_path / "c.csv"
        assert run(["curve", "--formula", "exp-split", "--params", "0.5,0.1,0.2,0.3",
                    "--window", 4, "--out", out]) == 0
        with open(out, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["distance", "weight", "side"]
        assert len(rows) == 1 + 8

    def test_missing_arguments_rejected(self, tmp_path):
        with pytest.raises(SystemExit):
            run(["curve", "--out", tmp_path / "c.csv"])
