import os

import pytest

import synth
from codemix import cli, models
from codemix.corpus import Dataset, LangTag, Sentiment, Token, Tweet, format_conll, parse_conll
from codemix.evaluation import score
from codemix.models import LinearModel, ModelKind
from codemix.vectorize import load_tfidf

import numpy as np


def write_corpus(path, dataset):
    path.write_text(format_conll(dataset), encoding="utf-8")


def write_config(path, train, dev=None, out_dir="out", extra=""):
    dev_line = f"dev = {dev}\n" if dev else ""
    path.write_text(
        f"[data]\ntrain = {train}\n{dev_line}\n[output]\ndir = {out_dir}\n{extra}",
        encoding="utf-8",
    )


@pytest.fixture()
def workspace(tmp_path):
    train = synth.synthetic_dataset("train", 90, seed=101)
    dev = synth.synthetic_dataset("dev", 30, seed=202, id_offset=10_000)
    write_corpus(tmp_path / "train.txt", train)
    write_corpus(tmp_path / "dev.txt", dev)
    write_config(
        tmp_path / "cfg.ini",
        train=tmp_path / "train.txt",
        dev=tmp_path / "dev.txt",
        out_dir=tmp_path / "out",
    )
    return tmp_path


def run(args, capsys):
    code = cli.main([str(a) for a in args])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestTrain:
    def test_writes_artifacts_and_manifest(self, workspace, capsys):
        code, out, err = run(["train", "--config", workspace / "cfg.ini"], capsys)
        assert code == 0, err
        out_dir = workspace / "out"
        assert (out_dir / "tfidf.txt").is_file()
        assert (out_dir / "model.txt").is_file()
        manifest = (out_dir / "manifest.txt").read_text(encoding="utf-8")
        assert manifest.startswith("manifest v1\nconfig_sha256=")
        assert "run.model=svm\n" in manifest
        assert "run.n_train_tweets=90\n" in manifest
        assert "run.seed=0\n" in manifest

    def test_manifest_records_mnb(self, workspace, capsys):
        code, _, _ = run(
            ["train", "--config", workspace / "cfg.ini", "--train.model", "mnb"], capsys
        )
        assert code == 0
        manifest = (workspace / "out" / "manifest.txt").read_text(encoding="utf-8")
        assert "run.model=mnb\n" in manifest
        assert "config.train.model=mnb\n" in manifest

    def test_rerun_is_byte_identical(self, workspace, capsys):
        args = ["train", "--config", workspace / "cfg.ini"]
        assert run(args, capsys)[0] == 0
        out_dir = workspace / "out"
        first = {name: (out_dir / name).read_bytes() for name in ("tfidf.txt", "model.txt", "manifest.txt")}
        assert run(args, capsys)[0] == 0
        second = {name: (out_dir / name).read_bytes() for name in ("tfidf.txt", "model.txt", "manifest.txt")}
        assert first == second

    def test_missing_train_path_is_config_error(self, workspace, capsys):
        code, _, err = run(
            ["train", "--data.train", workspace / "nope.txt", "--output.dir", workspace / "out"],
            capsys,
        )
        assert code == 2
        assert "config error" in err

    def test_flag_overrides_config_file(self, workspace, capsys):
        code, _, _ = run(
            ["train", "--config", workspace / "cfg.ini", "--train.seed", "9"], capsys
        )
        assert code == 0
        manifest = (workspace / "out" / "manifest.txt").read_text(encoding="utf-8")
        assert "run.seed=9\n" in manifest

    def test_env_var_overrides_seed(self, workspace, capsys, monkeypatch):
        monkeypatch.setenv(cli.SEED_ENV_VAR, "777")
        code, _, _ = run(["train", "--config", workspace / "cfg.ini"], capsys)
        assert code == 0
        manifest = (workspace / "out" / "manifest.txt").read_text(encoding="utf-8")
        assert "run.seed=777\n" in manifest

    def test_unknown_config_key_rejected(self, workspace, capsys):
        cfg = workspace / "bad.ini"
        cfg.write_text("[data]\ntrain = x\nbanana = 1\n", encoding="utf-8")
        code, _, err = run(["train", "--config", cfg], capsys)
        assert code == 2
        assert "banana" in err

    def test_unknown_config_section_rejected(self, workspace, capsys):
        cfg = workspace / "bad.ini"
        cfg.write_text("[wat]\nx = 1\n", encoding="utf-8")
        code, _, err = run(["train", "--config", cfg], capsys)
        assert code == 2
        assert "wat" in err

    def test_aux_csv_rows_are_appended(self, workspace, capsys):
        csv_path = workspace / "aux.csv"
        csv_path.write_text(
            "text,label\nestupendo fantastico,positive\nfatal horrible,negative\nnormal dia,neutral\n",
            encoding="utf-8",
        )
        code, _, _ = run(
            ["train", "--config", workspace / "cfg.ini", "--data.aux_csv", csv_path], capsys
        )
        assert code == 0
        manifest = (workspace / "out" / "manifest.txt").read_text(encoding="utf-8")
        assert "run.n_train_tweets=93\n" in manifest


class TestEvalCommand:
    def test_memorization_reaches_perfect_macro_f1(self, workspace, capsys):
        assert run(["train", "--config", workspace / "cfg.ini"], capsys)[0] == 0
        code, out, _ = run(
            ["eval", "--model-dir", workspace / "out", "--data", workspace / "train.txt"], capsys
        )
        assert code == 0
        assert "metric.macro_f1=1.000000" in out
        assert "confusion matrix" in out

    def test_zero_linear_model_predicts_all_negative(self, workspace, capsys):
        assert run(["train", "--config", workspace / "cfg.ini"], capsys)[0] == 0
        out_dir = workspace / "out"
        tfidf = load_tfidf(str(out_dir / "tfidf.txt"))
        zero = LinearModel(kind=ModelKind.SVM, weights=np.zeros((3, tfidf.dim)), bias=np.zeros(3))
        models.save_model(zero, str(out_dir / "model.txt"))
        code, out, _ = run(
            ["eval", "--model-dir", out_dir, "--data", workspace / "dev.txt"], capsys
        )
        assert code == 0
        dev = parse_conll((workspace / "dev.txt").read_text(encoding="utf-8"), name="dev")
        gold = [tweet.sentiment for tweet in dev]
        expected = score(gold, [Sentiment.NEGATIVE] * len(gold))
        assert f"metric.macro_f1={expected.macro_f1:.6f}" in out
        assert f"metric.negative.recall=1.000000" in out

    def test_dimension_mismatch_between_artifacts(self, workspace, capsys):
        assert run(["train", "--config", workspace / "cfg.ini"], capsys)[0] == 0
        out_dir = workspace / "out"
        zero = LinearModel(kind=ModelKind.SVM, weights=np.zeros((3, 5)), bias=np.zeros(3))
        models.save_model(zero, str(out_dir / "model.txt"))
        code, _, err = run(
            ["eval", "--model-dir", out_dir, "--data", workspace / "dev.txt"], capsys
        )
        assert code == 3
        assert "dimension" in err

    def test_unlabeled_data_is_data_error(self, workspace, capsys):
        assert run(["train", "--config", workspace / "cfg.ini"], capsys)[0] == 0
        unlabeled = Dataset(
            "u", (Tweet("x1", (Token("hola", LangTag.LANG2),)), Tweet("x2", (Token("adios", LangTag.LANG2),)))
        )
        write_corpus(workspace / "unlabeled.txt", unlabeled)
        code, _, err = run(
            ["eval", "--model-dir", workspace / "out", "--data", workspace / "unlabeled.txt"], capsys
        )
        assert code == 3
        assert "data error" in err


class TestPredictCommand:
    def test_predictions_one_line_per_tweet(self, workspace, capsys):
        assert run(["train", "--config", workspace / "cfg.ini"], capsys)[0] == 0
        out_path = workspace / "preds.tsv"
        code, _, _ = run(
            ["predict", "--model-dir", workspace / "out", "--data", workspace / "dev.txt", "--out", out_path],
            capsys,
        )
        assert code == 0
        lines = out_path.read_text(encoding="utf-8").splitlines()
        dev = parse_conll((workspace / "dev.txt").read_text(encoding="utf-8"), name="dev")
        assert len(lines) == len(dev)
        for line, tweet in zip(lines, dev):
            tweet_id, _, label = line.partition("\t")
            assert tweet_id == tweet.id
            assert label in ("negative", "neutral", "positive")

    def test_empty_dataset_gives_empty_file(self, workspace, capsys):
        assert run(["train", "--config", workspace / "cfg.ini"], capsys)[0] == 0
        empty = workspace / "empty.txt"
        empty.write_text("", encoding="utf-8")
        out_path = workspace / "preds.tsv"
        code, _, _ = run(
            ["predict", "--model-dir", workspace / "out", "--data", empty, "--out", out_path], capsys
        )
        assert code == 0
        assert out_path.read_text(encoding="utf-8") == ""

    def test_predictions_work_on_unlabeled_data(self, workspace, capsys):
        assert run(["train", "--config", workspace / "cfg.ini"], capsys)[0] == 0
        unlabeled = Dataset("u", (Tweet("a", (Token("feliz", LangTag.LANG2), Token("genial", LangTag.LANG2))),))
        write_corpus(workspace / "unlabeled.txt", unlabeled)
        out_path = workspace / "preds.tsv"
        code, _, _ = run(
            ["predict", "--model-dir", workspace / "out", "--data", workspace / "unlabeled.txt", "--out", out_path],
            capsys,
        )
        assert code == 0
        assert out_path.read_text(encoding="utf-8").startswith("a\t")


GOLDEN_TWEETS = [
    ("1", "I love you so much , <3", "replace_emoji", "I love you so much smiley face heart"),
    ("2", "The article URL is www.example.com", "replace_urls", "The article URL is URL"),
    ("3", "Hiiiii everyone", "collapse_elongation", "Hi everyone"),
    ("4", "We need to talk #HereWeGoAgain", "segment_hashtags", "We need to talk Here We Go Again"),
]

ALL_RULES = (
    "replace_emoji",
    "remove_mentions",
    "replace_urls",
    "collapse_elongation",
    "segment_hashtags",
    "remove_non_ascii",
)


class TestPreprocessCommand:
    @pytest.mark.parametrize("tweet_id,text,rule,expected", GOLDEN_TWEETS)
    def test_single_rule_goldens_end_to_end(self, tmp_path, capsys, tweet_id, text, rule, expected):
        tweet = Tweet(
            tweet_id,
            tuple(Token(w, LangTag.LANG1) for w in text.split()),
            Sentiment.NEUTRAL,
        )
        write_corpus(tmp_path / "one.txt", Dataset("one", (tweet,)))
        args = ["preprocess", "--data", tmp_path / "one.txt"]
        for name in ALL_RULES:
            args += [f"--preprocess.{name}", "true" if name == rule else "false"]
        code, out, _ = run(args, capsys)
        assert code == 0
        assert out.rstrip("\n") == expected

    def test_full_pipeline_line_per_tweet(self, tmp_path, capsys):
        tweets = (
            Tweet("1", tuple(Token(w, LangTag.LANG1) for w in "@u Hiiiii #GoTeam <3 www.x.com".split())),
            Tweet("2", (Token("hola", LangTag.LANG2),)),
        )
        write_corpus(tmp_path / "two.txt", Dataset("two", tweets))
        code, out, _ = run(["preprocess", "--data", tmp_path / "two.txt"], capsys)
        assert code == 0
        assert out.splitlines() == ["Hi Go Team heart URL", "hola"]

    def test_bad_lexicon_file_is_config_error(self, tmp_path, capsys):
        lex = tmp_path / "lex.tsv"
        lex.write_text("broken-line-without-tab\n", encoding="utf-8")
        write_corpus(
            tmp_path / "one.txt",
            Dataset("one", (Tweet("1", (Token("x", LangTag.LANG1),)),)),
        )
        code, _, err = run(
            ["preprocess", "--data", tmp_path / "one.txt", "--data.lexicon", lex], capsys
        )
        assert code == 2
        assert "config error" in err


class TestGridCommand:
    def test_runs_all_six_cells(self, workspace, capsys):
        code, out, _ = run(["grid", "--config", workspace / "cfg.ini"], capsys)
        assert code == 0
        assert "System" in out and "TF-IDF Input" in out
        for kind in ("lr", "mnb", "svm"):
            for mode in ("per_class_concatenated", "all_documents"):
                assert f"grid.{kind}.{mode}=" in out
        assert "grid.best_macro_f1=" in out
        for kind, label in (("LR", "concatenated docs per class"), ("SVM", "all documents")):
            assert any(kind in line and label in line for line in out.splitlines())

    def test_grid_requires_dev(self, tmp_path, capsys):
        train = synth.synthetic_dataset("train", 30, seed=5)
        write_corpus(tmp_path / "train.txt", train)
        write_config(tmp_path / "cfg.ini", train=tmp_path / "train.txt", out_dir=tmp_path / "out")
        code, _, err = run(["grid", "--config", tmp_path / "cfg.ini"], capsys)
        assert code == 2
        assert "data.dev" in err


ADVERSARIAL_INPUTS = [
    "meta\n",
    "garbage first line\n",
    "meta 1 positive\nxx\n",
    "meta 1 positive\nxx\tnotatag\n",
    "meta 1 positive\n\x00\tlang1\n\nmeta 1 positive\ny\tlang1\n",
    "meta dup positive\nx\tlang1\n\nmeta dup negative\ny\tlang1\n",
    "﻿meta 1 positive\nx\tlang1\n",
]


class TestRobustness:
    @pytest.mark.parametrize("content", ADVERSARIAL_INPUTS)
    def test_adversarial_blocks_give_structured_errors(self, tmp_path, capsys, content):
        data = tmp_path / "fuzz.txt"
        data.write_text(content, encoding="utf-8")
        code, _, err = run(
            ["train", "--data.train", data, "--output.dir", tmp_path / "out"], capsys
        )
        assert code in (2, 3, 4)
        assert err.strip()

    def test_random_noise_files_never_crash(self, tmp_path, capsys):
        import random

        rng = random.Random(99)
        alphabet = "meta \t\nlang1positive#@\x01é💣"
        for i in range(15):
            content = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 120)))
            data = tmp_path / f"noise{i}.txt"
            data.write_text(content, encoding="utf-8")
            code, _, _ = run(
                ["train", "--data.train", data, "--output.dir", tmp_path / "out"], capsys
            )
            assert code in (0, 2, 3, 4)
