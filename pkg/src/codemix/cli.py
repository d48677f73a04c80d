"""Command line front end: train, eval, predict, preprocess, grid.

Configuration is a flat ``key = value`` file with one section per module
(see _SCHEMA); every setting can also be passed as ``--section.key value``,
which overrides the file.  The environment variable CODEMIX_SEED overrides
the configured seed.  Exit codes: 0 success, 2 config error, 3 data error,
4 numeric failure.
"""

import argparse
import configparser
import hashlib
import os
import sys
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

from .corpus import (
    Dataset,
    LangTag,
    concat_datasets,
    parse_conll,
    parse_monolingual_csv,
    require_labels,
)
from .errors import ConfigError, DataError, NumericError
from .evaluation import EvalReport, GridRow, comparison_grid, machine_lines, render_report, score
from .models import (
    Classifier,
    ModelKind,
    TrainConfig,
    fit,
    load_model,
    predict_batch,
    save_model,
)
from .preprocess import EmojiLexicon, PipelineConfig, default_lexicon, run_pipeline
from .vectorize import (
    Analyzer,
    AnalyzerKind,
    DocMode,
    TfIdfModel,
    fit_tfidf,
    load_tfidf,
    prepare_documents,
    save_tfidf,
    transform_batch,
)

TFIDF_FILE = "tfidf.txt"
MODEL_FILE = "model.txt"
MANIFEST_FILE = "manifest.txt"
MANIFEST_VERSION = "manifest v1"
SEED_ENV_VAR = "CODEMIX_SEED"


def _parse_bool(raw: str) -> bool:
    value = raw.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(value)


# section -> key -> (default, parser, help); None defaults mark optional keys.
_SCHEMA: dict[str, dict[str, tuple[object, object, str]]] = {
    "data": {
        "train": (None, str, "training corpus in block format"),
        "dev": (None, str, "labeled development corpus in block format"),
        "aux_csv": (None, str, "optional auxiliary monolingual CSV"),
        "aux_label_column": ("label", str, "label column name in the auxiliary CSV"),
        "aux_text_column": ("text", str, "text column name in the auxiliary CSV"),
        "aux_lang": ("lang1", str, "language tag for auxiliary tokens (lang1 or lang2)"),
        "lexicon": (None, str, "emoticon lexicon file (default: bundled)"),
    },
    "preprocess": {
        "replace_emoji": (True, _parse_bool, "replace emoji/emoticons with textual names"),
        "remove_mentions": (True, _parse_bool, "drop @mention tokens"),
        "replace_urls": (True, _parse_bool, "replace URL-shaped tokens with URL"),
        "collapse_elongation": (True, _parse_bool, "collapse elongated letter runs"),
        "segment_hashtags": (True, _parse_bool, "split hashtags into words"),
        "remove_non_ascii": (True, _parse_bool, "strip non-ASCII codepoints"),
        "elongation_min_run": (3, int, "min identical-letter run length to collapse"),
    },
    "vectorize": {
        "doc_mode": ("all_documents", str, "all_documents or per_class_concatenated"),
        "word_ngram_min": (1, int, "word n-gram lower bound"),
        "word_ngram_max": (1, int, "word n-gram upper bound"),
        "char_ngram_min": (2, int, "char n-gram lower bound"),
        "char_ngram_max": (5, int, "char n-gram upper bound"),
    },
    "train": {
        "model": ("svm", str, "classifier: lr, mnb or svm"),
        "l2_lambda": (1e-4, float, "L2 regularization strength"),
        "learning_rate": (None, float, "step size (default: 0.1 for lr, 0.05 for svm)"),
        "epochs": (50, int, "training epochs"),
        "batch_size": (32, int, "mini-batch size"),
        "mnb_alpha": (1.0, float, "MNB Laplace smoothing"),
        "seed": (0, int, "RNG seed for deterministic training"),
    },
    "output": {
        "dir": ("out", str, "directory for artifacts"),
    },
}

Settings = dict[tuple[str, str], str]


def _collect_settings(args: argparse.Namespace) -> Settings:
    """Merge config file, --section.key overrides and the seed env var."""
    settings: Settings = {}
    config_path = getattr(args, "config", None)
    if config_path:
        if not os.path.isfile(config_path):
            raise ConfigError(f"config file not found: {config_path}")
        parser = configparser.ConfigParser(interpolation=None)
        try:
            with open(config_path, encoding="utf-8") as handle:
                parser.read_file(handle)
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse config file {config_path}: {exc}") from None
        for section in parser.sections():
            if section not in _SCHEMA:
                raise ConfigError(f"unknown config section [{section}]")
            for key, value in parser.items(section):
                if key not in _SCHEMA[section]:
                    raise ConfigError(f"unknown config key {section}.{key}")
                settings[(section, key)] = value
    for section, keys in _SCHEMA.items():
        for key in keys:
            raw = getattr(args, f"{section}__{key}", None)
            if raw is not None:
                settings[(section, key)] = raw
    if os.environ.get(SEED_ENV_VAR):
        settings[("train", "seed")] = os.environ[SEED_ENV_VAR]
    return settings


def _render_default(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


@dataclass
class RunConfig:
    train_path: str | None
    dev_path: str | None
    aux_csv: str | None
    aux_label_column: str
    aux_text_column: str
    aux_lang: LangTag
    lexicon_path: str | None
    pipeline: PipelineConfig
    doc_mode: DocMode
    word_analyzer: Analyzer
    char_analyzer: Analyzer
    train: TrainConfig
    out_dir: str
    resolved: dict[str, str]  # canonical "section.key" -> value string

    @property
    def config_sha256(self) -> str:
        text = "\n".join(f"{key}={self.resolved[key]}" for key in sorted(self.resolved))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _build_run_config(settings: Settings) -> RunConfig:
    resolved: dict[str, str] = {}
    values: dict[tuple[str, str], object] = {}
    for section, keys in _SCHEMA.items():
        for key, (default, parse, _help) in keys.items():
            raw = settings.get((section, key))
            if raw is None:
                values[(section, key)] = default
                resolved[f"{section}.{key}"] = _render_default(default)
                continue
            try:
                values[(section, key)] = parse(raw)
            except ValueError:
                raise ConfigError(f"invalid value {raw!r} for {section}.{key}") from None
            resolved[f"{section}.{key}"] = raw.strip()

    def get(section: str, key: str) -> object:
        return values[(section, key)]

    aux_lang_raw = str(get("data", "aux_lang"))
    if aux_lang_raw not in ("lang1", "lang2"):
        raise ConfigError(f"data.aux_lang must be lang1 or lang2, got {aux_lang_raw!r}")
    pipeline = PipelineConfig(
        replace_emoji=bool(get("preprocess", "replace_emoji")),
        remove_mentions=bool(get("preprocess", "remove_mentions")),
        replace_urls=bool(get("preprocess", "replace_urls")),
        collapse_elongation=bool(get("preprocess", "collapse_elongation")),
        segment_hashtags=bool(get("preprocess", "segment_hashtags")),
        remove_non_ascii=bool(get("preprocess", "remove_non_ascii")),
        elongation_min_run=int(get("preprocess", "elongation_min_run")),
    )
    train_config = TrainConfig(
        model_kind=ModelKind.from_value(str(get("train", "model"))),
        l2_lambda=float(get("train", "l2_lambda")),
        learning_rate=(None if get("train", "learning_rate") is None else float(get("train", "learning_rate"))),
        epochs=int(get("train", "epochs")),
        batch_size=int(get("train", "batch_size")),
        mnb_alpha=float(get("train", "mnb_alpha")),
        seed=int(get("train", "seed")),
    )
    return RunConfig(
        train_path=get("data", "train"),
        dev_path=get("data", "dev"),
        aux_csv=get("data", "aux_csv"),
        aux_label_column=str(get("data", "aux_label_column")),
        aux_text_column=str(get("data", "aux_text_column")),
        aux_lang=LangTag(aux_lang_raw),
        lexicon_path=get("data", "lexicon"),
        pipeline=pipeline,
        doc_mode=DocMode.from_value(str(get("vectorize", "doc_mode"))),
        word_analyzer=Analyzer(
            AnalyzerKind.WORD, int(get("vectorize", "word_ngram_min")), int(get("vectorize", "word_ngram_max"))
        ),
        char_analyzer=Analyzer(
            AnalyzerKind.CHAR, int(get("vectorize", "char_ngram_min")), int(get("vectorize", "char_ngram_max"))
        ),
        train=train_config,
        out_dir=str(get("output", "dir")),
        resolved=resolved,
    )


def _require_file(path: str, what: str) -> None:
    if not os.path.isfile(path):
        raise ConfigError(f"{what} does not exist: {path}")


def _load_lexicon(config: RunConfig) -> EmojiLexicon:
    if config.lexicon_path:
        _require_file(config.lexicon_path, "data.lexicon")
        return EmojiLexicon.from_file(config.lexicon_path)
    return default_lexicon()


def _load_block_dataset(path: str, name: str) -> Dataset:
    with open(path, encoding="utf-8") as handle:
        return parse_conll(handle, name=name)


def _load_training_data(config: RunConfig) -> Dataset:
    if not config.train_path:
        raise ConfigError("data.train is required")
    _require_file(config.train_path, "data.train")
    dataset = _load_block_dataset(config.train_path, "train")
    if config.aux_csv:
        _require_file(config.aux_csv, "data.aux_csv")
        with open(config.aux_csv, encoding="utf-8", newline="") as handle:
            aux = parse_monolingual_csv(
                handle,
                label_column=config.aux_label_column,
                text_column=config.aux_text_column,
                lang=config.aux_lang,
                name="aux",
            )
        dataset = concat_datasets(dataset, aux)
    return dataset


def _preprocess_texts(config: RunConfig, dataset: Dataset, lexicon: EmojiLexicon) -> list[str]:
    return [run_pipeline(tweet.text, config.pipeline, lexicon) for tweet in dataset]


def _write_manifest(path: str, config: RunConfig, facts: dict[str, object]) -> None:
    lines = [MANIFEST_VERSION, f"config_sha256={config.config_sha256}"]
    lines += [f"run.{key}={facts[key]}" for key in sorted(facts)]
    lines += [f"config.{key}={config.resolved[key]}" for key in sorted(config.resolved)]
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


def _read_manifest_settings(model_dir: str) -> Settings:
    path = os.path.join(model_dir, MANIFEST_FILE)
    _require_file(path, "manifest")
    settings: Settings = {}
    with open(path, encoding="utf-8") as handle:
        first = handle.readline().rstrip("\n")
        if first != MANIFEST_VERSION:
            raise DataError(f"not a {MANIFEST_VERSION} file: {path}")
        for raw in handle:
            line = raw.rstrip("\n")
            if not line.startswith("config."):
                continue
            key, _, value = line[len("config.") :].partition("=")
            section, _, option = key.partition(".")
            if value and section in _SCHEMA and option in _SCHEMA[section]:
                settings[(section, option)] = value
    return settings


def _train_to_dir(config: RunConfig, dataset: Dataset, out_dir: str) -> TfIdfModel:
    lexicon = _load_lexicon(config)
    texts = _preprocess_texts(config, dataset, lexicon)
    docs = prepare_documents(dataset, config.doc_mode, texts)
    tfidf = fit_tfidf(docs, config.doc_mode, config.word_analyzer, config.char_analyzer)
    vectors = transform_batch(tfidf, texts)
    labels = require_labels(dataset)
    classifier = fit(vectors, labels, config.train)
    os.makedirs(out_dir, exist_ok=True)
    save_tfidf(tfidf, os.path.join(out_dir, TFIDF_FILE))
    save_model(classifier, os.path.join(out_dir, MODEL_FILE))
    facts = {
        "model": config.train.model_kind.value,
        "doc_mode": config.doc_mode.value,
        "seed": config.train.seed,
        "n_train_tweets": len(dataset),
        "dimension": tfidf.dim,
        "word_vocab_size": len(tfidf.word_vocab),
        "char_vocab_size": len(tfidf.char_vocab),
    }
    _write_manifest(os.path.join(out_dir, MANIFEST_FILE), config, facts)
    return tfidf


def _load_artifacts(model_dir: str) -> tuple[TfIdfModel, Classifier, RunConfig]:
    tfidf_path = os.path.join(model_dir, TFIDF_FILE)
    model_path = os.path.join(model_dir, MODEL_FILE)
    _require_file(tfidf_path, "vectorizer artifact")
    _require_file(model_path, "model artifact")
    tfidf = load_tfidf(tfidf_path)
    classifier = load_model(model_path)
    if tfidf.dim != classifier.dim:
        raise DataError(
            f"vectorizer dimension {tfidf.dim} does not match model dimension {classifier.dim}"
        )
    config = _build_run_config(_read_manifest_settings(model_dir))
    return tfidf, classifier, config


def _predict_dataset(model_dir: str, dataset: Dataset) -> list:
    tfidf, classifier, config = _load_artifacts(model_dir)
    lexicon = _load_lexicon(config)
    vectors = transform_batch(tfidf, _preprocess_texts(config, dataset, lexicon))
    return predict_batch(classifier, vectors)


def _evaluate_dir(model_dir: str, data_path: str) -> EvalReport:
    _require_file(data_path, "evaluation data")
    dataset = _load_block_dataset(data_path, Path(data_path).stem)
    gold = require_labels(dataset)
    predictions = _predict_dataset(model_dir, dataset)
    return score(gold, predictions)


def _cmd_train(args: argparse.Namespace) -> int:
    config = _build_run_config(_collect_settings(args))
    dataset = _load_training_data(config)
    _train_to_dir(config, dataset, config.out_dir)
    print(f"trained {config.train.model_kind.value} model on {len(dataset)} tweets")
    print(f"artifacts written to {config.out_dir}")
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    report = _evaluate_dir(args.model_dir, args.data)
    print(render_report(report))
    print()
    for line in machine_lines(report):
        print(line)
    return 0


def _cmd_predict(args: argparse.Namespace) -> int:
    _require_file(args.data, "input data")
    dataset = _load_block_dataset(args.data, Path(args.data).stem)
    predictions = _predict_dataset(args.model_dir, dataset)
    with open(args.out, "w", encoding="utf-8", newline="\n") as handle:
        for tweet, prediction in zip(dataset, predictions):
            handle.write(f"{tweet.id}\t{prediction.label}\n")
    print(f"wrote {len(dataset)} predictions to {args.out}")
    return 0


def _cmd_preprocess(args: argparse.Namespace) -> int:
    config = _build_run_config(_collect_settings(args))
    _require_file(args.data, "input data")
    dataset = _load_block_dataset(args.data, Path(args.data).stem)
    lexicon = _load_lexicon(config)
    for text in _preprocess_texts(config, dataset, lexicon):
        print(text)
    return 0


_GRID_CELLS = [
    ("lr", "per_class_concatenated"),
    ("lr", "all_documents"),
    ("mnb", "per_class_concatenated"),
    ("mnb", "all_documents"),
    ("svm", "per_class_concatenated"),
    ("svm", "all_documents"),
]


def _cmd_grid(args: argparse.Namespace) -> int:
    base = _collect_settings(args)
    rows = []
    results = []
    for kind, mode in _GRID_CELLS:
        settings = dict(base)
        settings[("train", "model")] = kind
        settings[("vectorize", "doc_mode")] = mode
        config = _build_run_config(settings)
        if not config.dev_path:
            raise ConfigError("data.dev is required for grid")
        _require_file(config.dev_path, "data.dev")
        cell_dir = os.path.join(config.out_dir, "grid", f"{kind}_{mode}")
        dataset = _load_training_data(config)
        _train_to_dir(config, dataset, cell_dir)
        report = _evaluate_dir(cell_dir, config.dev_path)
        rows.append(GridRow(system=kind.upper(), doc_mode_label=DocMode(mode).display_label, report=report))
        results.append((kind, mode, report.macro_f1))
    print(comparison_grid(rows))
    print()
    for kind, mode, macro_f1 in results:
        print(f"grid.{kind}.{mode}={macro_f1:.6f}")
    print(f"grid.best_macro_f1={max(f1 for _, _, f1 in results):.6f}")
    return 0


def _add_setting_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("config overrides")
    for section, keys in _SCHEMA.items():
        for key, (_default, _parse, help_text) in keys.items():
            group.add_argument(
                f"--{section}.{key}", dest=f"{section}__{key}", metavar="VALUE", help=help_text
            )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="codemix",
        description="Sentiment classification for code-mixed (Spanglish) social media text.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="fit the vectorizer and a classifier, persist artifacts")
    train.add_argument("--config", help="config file (flat key = value with [section]s)")
    _add_setting_args(train)
    train.set_defaults(func=_cmd_train)

    evaluate = sub.add_parser("eval", help="score a trained model on a labeled dataset")
    evaluate.add_argument("--model-dir", required=True, help="directory with trained artifacts")
    evaluate.add_argument("--data", required=True, help="labeled dataset in block format")
    evaluate.set_defaults(func=_cmd_eval)

    predict = sub.add_parser("predict", help="write id<TAB>label predictions for a dataset")
    predict.add_argument("--model-dir", required=True, help="directory with trained artifacts")
    predict.add_argument("--data", required=True, help="dataset in block format")
    predict.add_argument("--out", required=True, help="output prediction file")
    predict.set_defaults(func=_cmd_predict)

    preprocess_cmd = sub.add_parser("preprocess", help="print normalized text, one line per tweet")
    preprocess_cmd.add_argument("--config", help="config file (flat key = value with [section]s)")
    preprocess_cmd.add_argument("--data", required=True, help="dataset in block format")
    _add_setting_args(preprocess_cmd)
    preprocess_cmd.set_defaults(func=_cmd_preprocess)

    grid = sub.add_parser("grid", help="train and evaluate all six model x doc-mode cells")
    grid.add_argument("--config", help="config file (flat key = value with [section]s)")
    _add_setting_args(grid)
    grid.set_defaults(func=_cmd_grid)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


def cli() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    cli()
