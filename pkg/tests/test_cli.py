"""Command-line surface: exit codes, file outputs, pipeline chaining."""

import json

import pytest

from reforge.cli import main
from reforge.legacy import gen_legacy
from reforge.taxonomy import Label


def test_generate_writes_files_and_manifest(tmp_path):
    out = tmp_path / "gen"
    code = main([
        "generate", "--kind", "vuln_advanced", "--subtype", "read_only",
        "--count", "5", "--seed", "7", "--out", str(out),
    ])
    assert code == 0
    assert len(list((out / "contracts").glob("*.sol"))) == 5
    lines = (out / "manifest.jsonl").read_text().splitlines()
    assert len(lines) == 5
    assert all(json.loads(x)["label"] == "vulnerable" for x in lines)


def test_generate_secure_requires_pattern(tmp_path):
    code = main(["generate", "--kind", "secure_basic", "--count", "1", "--out", str(tmp_path)])
    assert code == 2


def test_eval_missing_required_flag_is_usage_error():
    with pytest.raises(SystemExit) as err:
        main(["eval"])
    assert err.value.code == 2


def test_unknown_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 2


def test_modernize_roundtrip(tmp_path):
    src = tmp_path / "legacy"
    src.mkdir()
    for i in range(4):
        label = Label.VULNERABLE if i % 2 else Label.SECURE
        (src / f"c{i}.sol").write_text(gen_legacy(100 + i, label), encoding="utf-8")
    log = tmp_path / "log.jsonl"
    code = main([
        "modernize", "--in", str(src), "--out", str(tmp_path / "modern"),
        "--log", str(log),
    ])
    assert code == 0
    assert len(log.read_text().splitlines()) == 4


def test_modernize_failure_exits_nonzero(tmp_path):
    src = tmp_path / "legacy"
    src.mkdir()
    (src / "broken.sol").write_text("contract {", encoding="utf-8")
    code = main(["modernize", "--in", str(src), "--out", str(tmp_path / "m")])
    assert code == 1


def test_seed_env_fallback(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("FORGE_SEED", "12345")
    out = tmp_path / "gen"
    main(["generate", "--kind", "vuln_basic", "--count", "1", "--out", str(out)])
    stdout = capsys.readouterr().out
    assert "seed=12345" in stdout


def test_verify_and_eval_pipeline(tmp_path, corpus_root, corpus_manifest, capsys):
    # verify: stand-in corpus has tolerated disagreements but must exit 0
    code = main(["verify", "--manifest", str(corpus_root / "manifest.jsonl"), "--jobs", "2"])
    assert code == 0
    capsys.readouterr()

    from tests.conftest import predictions_for_matrix

    records = predictions_for_matrix(corpus_manifest, tn=47, fp=4, fn=26, tp=15)
    predictions = tmp_path / "predictions.jsonl"
    with open(predictions, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(r) + "\n")
    report_path = tmp_path / "report.json"
    code = main([
        "eval", "--manifest", str(corpus_root / "manifest.jsonl"),
        "--predictions", str(predictions), "--out", str(report_path),
        "--name", "llama-3b-finetuned",
    ])
    assert code == 0
    report = json.loads(report_path.read_text())
    assert report["matrix"] == {"tp": 15, "fp": 4, "tn": 47, "fn": 26, "abstained": 28}
    assert report["accuracy"] == pytest.approx(0.6739, abs=0.005)

    other = tmp_path / "deepseek-r1-14b.json"
    other.write_text(
        json.dumps({"name": "deepseek-r1-14b", "accuracy": 0.7043, "skipped": 5,
                    "metadata": {"parameters_b": 14}}),
        encoding="utf-8",
    )
    code = main(["compare", str(other), str(report_path)])
    assert code == 0
    table = capsys.readouterr().out
    lines = [l for l in table.splitlines() if "deepseek" in l or "llama" in l]
    assert lines[0].startswith("deepseek-r1-14b")
    assert "70.43" in lines[0]
    assert "67.39" in lines[1]


def test_eval_rejects_bad_predictions(tmp_path, corpus_root):
    predictions = tmp_path / "bad.jsonl"
    predictions.write_text('{"id": "unknown", "prediction": "secure"}\n', encoding="utf-8")
    code = main([
        "eval", "--manifest", str(corpus_root / "manifest.jsonl"),
        "--predictions", str(predictions), "--out", str(tmp_path / "r.json"),
    ])
    assert code == 1
