import json

import logging

import pytest

from commands.common import lexicon_for
from data.conll import parse_conll
from main import build_parser, main
from models.config import ModelMode, TrainingConfig

TINY = ["--epochs", "1", "--seeds", "1", "--embed-dim", "8", "--dim-b", "8", "--dim-u", "8",
        "--bilinear-k", "2", "--batch-size", "4"]


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    data = root / "data"
    assert main(["synth", "--out-dir", str(data), "--seed", "5", "--train-size", "12", "--test-size", "4"]) == 0
    out = root / "ckpt"
    code = main(["train", "--data-dir", str(data), "--out", str(out),
                 "--lexicon-path", str(data / "lexicon.txt"), *TINY])
    assert code == 0
    return data, out


def test_every_subcommand_is_registered():
    choices = build_parser()._subparsers._group_actions[0].choices
    assert sorted(choices) == ["evaluate", "grad-check", "inspect", "pairs", "predict", "stats", "synth", "train"]


def test_train_writes_checkpoints_and_a_metric_log(workspace):
    _, out = workspace
    assert (out / "seed1.ckpt").exists()
    records = [json.loads(line) for line in (out / "metrics.jsonl").read_text(encoding="utf-8").splitlines()]
    assert records[0]["event"] == "config" and records[0]["pair"] == "source->target"
    assert records[0]["epochs"] == 1 and records[0]["seeds"] == [1]
    assert records[-1]["mode"] == "AD_SAL" and len(records[-1]["runs"]) == 1


def test_stats_reports_counts(workspace, capsys):
    data, _ = workspace
    assert main(["stats", str(data / "source_train.conll")]) == 0
    payload = json.loads(capsys.readouterr().out)
    stats = payload[str(data / "source_train.conll")]
    assert stats["sentences"] == 12 and stats["labeled_sentences"] == 12
    assert stats["aspects"] >= 12


def test_evaluate_prints_both_scores(workspace, capsys):
    data, out = workspace
    code = main(["evaluate", "--checkpoint", str(out / "seed1.ckpt"), "--corpus", str(data / "target_test.conll"),
                 "--breakdown"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert set(payload) == {"AD", "ADS", "ADS_by_sentiment"}
    assert payload["ADS"]["tp"] <= payload["AD"]["tp"]
    assert payload["ADS"]["gold"] == payload["AD"]["gold"]


def test_predict_writes_well_formed_tags(workspace, tmp_path):
    data, out = workspace
    target = tmp_path / "tagged.conll"
    code = main(["predict", "--checkpoint", str(out / "seed1.ckpt"), "--input", str(data / "target_test.conll"),
                 "--output", str(target)])
    assert code == 0
    original, tagged = parse_conll(data / "target_test.conll"), parse_conll(target)
    assert [s.tokens for s in tagged] == [s.tokens for s in original]
    assert all(sentence.labeled and not sentence.repairs for sentence in tagged)


def test_inspect_dumps_attention_per_sentence(workspace, tmp_path, capsys):
    data, out = workspace
    dump = tmp_path / "attention.jsonl"
    code = main(["inspect", "--checkpoint", str(out / "seed1.ckpt"), "--input", str(data / "target_test.conll"),
                 "--output", str(dump), "--table"])
    assert code == 0
    lines = [json.loads(line) for line in dump.read_text(encoding="utf-8").splitlines()]
    assert len(lines) == 4
    first = lines[0]
    assert len(first["hops"]) == 2
    assert sum(first["hops"][0]["alpha_a"]) == pytest.approx(1.0, abs=1e-5)
    assert len(first["predicted"]) == len(first["tokens"])
    assert capsys.readouterr().out.startswith("token")


def test_grad_check_passes_on_a_toy_model(capsys):
    assert main(["grad-check", "--mode", "BASE_DMI", "--samples", "3"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["passed"] is True and payload["max_relative_error"] < 1e-4


def test_impossible_threshold_fails_the_grad_check(capsys):
    assert main(["grad-check", "--mode", "BASE_SO", "--samples", "2", "--threshold", "-1"]) == 3
    assert json.loads(capsys.readouterr().out)["passed"] is False


def test_missing_input_file_exits_with_one(tmp_path):
    assert main(["stats", str(tmp_path / "missing.conll")]) == 1


def test_unknown_config_key_exits_with_one(workspace, tmp_path):
    data, _ = workspace
    config = tmp_path / "run.cfg"
    config.write_text("lam = 0.2\nwarmup = 3\n", encoding="utf-8")
    assert main(["train", "--data-dir", str(data), "--out", str(tmp_path / "out"), "--config", str(config)]) == 1


def test_invalid_config_value_exits_with_one(workspace, tmp_path):
    data, _ = workspace
    assert main(["train", "--data-dir", str(data), "--out", str(tmp_path / "out"), "--batch-size", "5"]) == 1


def test_argument_errors_exit_with_two():
    with pytest.raises(SystemExit) as info:
        main(["train"])
    assert info.value.code == 2


def test_pairs_runs_both_directions(workspace, capsys):
    data, _ = workspace
    code = main(["pairs", "--data-dir", str(data), "--domains", "source,target", *TINY,
                 "--lexicon-path", str(data / "lexicon.txt")])
    assert code == 0
    table = capsys.readouterr().out.splitlines()
    assert table[0].split() == ["pair", "AD", "ADS"]
    assert [line.split()[0] for line in table[1:]] == ["source->target", "target->source", "average"]


def test_memory_modes_warn_when_no_lexicon_is_given(workspace, caplog):
    data, _ = workspace
    with caplog.at_level(logging.WARNING, logger="commands.common"):
        assert lexicon_for(TrainingConfig(mode=ModelMode.BASE_SO)) is None
        assert not caplog.records
        assert lexicon_for(TrainingConfig(mode=ModelMode.BASE_DMI)) is None
    assert "without an opinion lexicon" in caplog.records[0].getMessage()
    lexicon = lexicon_for(TrainingConfig(mode=ModelMode.BASE_DMI, lexicon_path=str(data / "lexicon.txt")))
    assert "great" in lexicon
