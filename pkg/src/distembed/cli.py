"""Command-line interface.

Subcommands:
    vocab     build and save a vocabulary from a corpus
    train     train embeddings (cbow or skipgram, all window strategies)
    eval      score a saved model on an analogy question file
    convert   re-serialize a model between text and binary layouts
    curve     export the normalized weight-vs-distance curve as CSV
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import corpus, evaluator, model_io, trainer, weights, windows

logger = logging.getLogger("distembed")

LFW_CHOICES = ("none",) + weights.FORMULAS


def _add_vocab(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("vocab", help="build a vocabulary from a corpus")
    p.add_argument("--input", required=True, help="corpus of whitespace-separated words")
    p.add_argument("--output", required=True, help="where to write 'word count' lines")
    p.add_argument("--min-count", type=int, default=corpus.DEFAULT_MIN_COUNT,
                   help="keep words with count >= this (default %(default)s, "
                        "i.e. discard words appearing 5 times or fewer)")
    p.set_defaults(func=_cmd_vocab)


def _cmd_vocab(args: argparse.Namespace) -> int:
    vocab = corpus.build_vocabulary(args.input, min_count=args.min_count)
    vocab.save(args.output)
    logger.info("vocabulary: %d words, %d retained tokens -> %s",
                len(vocab), vocab.total_tokens, args.output)
    return 0


def _add_train(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("train", help="train embeddings")
    p.add_argument("--input", required=True, help="training corpus")
    p.add_argument("--output", required=True, help="model file to write")
    p.add_argument("--model", choices=trainer.MODELS, default=trainer.CBOW)
    p.add_argument("--dim", type=int, default=128, help="embedding dimension")
    p.add_argument("--lfw", choices=LFW_CHOICES, default="none",
                   help="learnable context-weight formula (cbow only)")
    p.add_argument("--lfw-lr-scale", type=float, default=0.1,
                   help="weight-parameter lr as a fraction of the embedding lr; 0 freezes")
    p.add_argument("--window-strategy", choices=windows.STRATEGIES, default=None,
                   help="default: fixed for cbow, random for skipgram")
    p.add_argument("--window", type=int, default=15, help="max window size r")
    p.add_argument("--epochs", type=int, default=6)
    p.add_argument("--edws-phases", type=int, default=3)
    p.add_argument("--negatives", type=int, default=5)
    p.add_argument("--lr", type=float, default=None,
                   help="initial learning rate (default 0.05 cbow, 0.025 skipgram)")
    p.add_argument("--subsample", type=float, default=0.0,
                   help="frequent-word discard threshold t, 0 disables (try 1e-5)")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--min-count", type=int, default=corpus.DEFAULT_MIN_COUNT)
    p.add_argument("--vocab", default=None, help="load a prebuilt vocabulary instead of counting")
    p.add_argument("--save-vocab", default=None, help="also save the vocabulary here")
    p.add_argument("--format", choices=("bin", "text"), default="bin")
    p.set_defaults(func=_cmd_train)


def _cmd_train(args: argparse.Namespace) -> int:
    strategy = args.window_strategy
    if strategy is None:
        strategy = windows.FIXED if args.model == trainer.CBOW else windows.RANDOM
    schedule = windows.WindowSchedule(
        strategy=strategy,
        max_window=args.window,
        total_epochs=args.epochs,
        phases=args.edws_phases,
    )
    config = trainer.TrainConfig(
        model=args.model,
        schedule=schedule,
        dim=args.dim,
        lfw_formula=None if args.lfw == "none" else args.lfw,
        negatives=args.negatives,
        learning_rate=args.lr,
        lfw_lr_scale=args.lfw_lr_scale,
        subsample=args.subsample,
        workers=args.threads,
        seed=args.seed,
    )

    if args.vocab:
        vocab = corpus.Vocabulary.load(args.vocab)
    else:
        logger.info("building vocabulary from %s", args.input)
        vocab = corpus.build_vocabulary(args.input, min_count=args.min_count)
    logger.info("vocabulary: %d words, %d retained tokens", len(vocab), vocab.total_tokens)
    if args.save_vocab:
        vocab.save(args.save_vocab)

    stream = corpus.build_token_stream(args.input, vocab, subsample_threshold=args.subsample)
    result = trainer.train(stream, config)

    save = model_io.save_binary if args.format == "bin" else model_io.save_text
    save(args.output, vocab.words, result.matrices.input)
    sidecar = args.output + ".meta.json"
    model_io.save_sidecar(
        sidecar,
        config,
        result.lfw_params,
        extra={"epochs": [
            {"epoch": s.epoch, "window": s.window, "mean_loss": s.mean_loss,
             "lfw_params": s.lfw_params}
            for s in result.history
        ]},
    )
    logger.info("model -> %s (sidecar %s)", args.output, sidecar)
    return 0


def _add_eval(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("eval", help="evaluate a model on analogy questions")
    p.add_argument("--model", required=True, help="model file (text or binary)")
    p.add_argument("--questions", required=True, help="analogy question file")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.set_defaults(func=_cmd_eval)


def _cmd_eval(args: argparse.Namespace) -> int:
    model = model_io.load_model(args.model)
    questions = evaluator.load_questions(args.questions)
    report = evaluator.evaluate(model.vectors, model.word_index(), questions)
    formatter = {
        "table": evaluator.format_table,
        "csv": evaluator.format_csv,
        "json": evaluator.format_json,
    }[args.format]
    print(formatter(report))
    return 0


def _add_convert(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("convert", help="convert a model between text and binary")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--format", choices=("text", "bin"), required=True,
                   help="output format (input format is auto-detected)")
    p.set_defaults(func=_cmd_convert)


def _cmd_convert(args: argparse.Namespace) -> int:
    model = model_io.load_model(args.input)
    if args.format == "bin":
        model_io.save_binary(args.output, model.words, model.vectors)
    else:
        model_io.save_text(args.output, model.words, model.vectors)
    logger.info("%s -> %s (%s)", args.input, args.output, args.format)
    return 0


def _add_curve(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("curve", help="export the normalized weight-distance curve")
    p.add_argument("--out", required=True, help="CSV file to write")
    p.add_argument("--sidecar", default=None,
                   help="training sidecar holding the formula and parameters")
    p.add_argument("--formula", choices=weights.FORMULAS, default=None)
    p.add_argument("--params", default=None,
                   help="comma-separated parameter values, e.g. '0.8,0.05'")
    p.add_argument("--window", type=int, default=None,
                   help="max distance (default: the sidecar's window)")
    p.set_defaults(func=_cmd_curve)


def _cmd_curve(args: argparse.Namespace) -> int:
    if args.sidecar:
        doc = model_io.load_sidecar(args.sidecar)
        formula = doc["config"].get("lfw_formula")
        params = doc.get("lfw_params")
        if formula is None or params is None:
            raise SystemExit(f"{args.sidecar}: no learnable weights in this run")
        window = args.window or doc["config"]["schedule"]["max_window"]
        params = np.asarray(params, dtype=np.float64)
    else:
        if not (args.formula and args.params and args.window):
            raise SystemExit("need --sidecar, or all of --formula/--params/--window")
        formula = args.formula
        params = np.array([float(x) for x in args.params.split(",")], dtype=np.float64)
        window = args.window
    weights.write_curve_csv(args.out, formula, params, window)
    logger.info("curve (%s, r=%d) -> %s", formula, window, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="distembed",
        description="Train, evaluate and convert distance-aware word embeddings.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_vocab(sub)
    _add_train(sub)
    _add_eval(sub)
    _add_convert(sub)
    _add_curve(sub)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
