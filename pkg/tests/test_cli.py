import json
import shutil
from pathlib import Path

import pytest
from click.testing import CliRunner

from pclkit import evaluation as ev
from pclkit.cli import main
from pclkit.model import Language, load_dataset

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def workdir(tmp_path):
    for name in ("raw_docs.jsonl", "labels.jsonl", "predictions.jsonl",
                 "lexicon_en.tsv", "lexicon_zh.tsv", "cleaning.yaml",
                 "templates.yaml", "run_config.yaml"):
        shutil.copy(FIXTURES / name, tmp_path / name)
    return tmp_path


def invoke(runner, args):
    result = runner.invoke(main, args, catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return result


class TestClean:
    def test_writes_docs_and_report(self, runner, workdir):
        invoke(runner, [
            "clean", "--config", str(workdir / "cleaning.yaml"),
            "--in", str(workdir / "raw_docs.jsonl"),
            "--out", str(workdir / "cleaned.jsonl"),
            "--report", str(workdir / "report.json"),
        ])
        docs = load_dataset(workdir / "cleaned.jsonl")
        assert docs
        assert all("@" not in d.text.split()[0] or d.text.startswith("#USER")
                   for d in docs)
        report = json.loads((workdir / "report.json").read_text())
        assert report["redactions"] > 0

    def test_missing_input_exit_2(self, runner, workdir):
        result = runner.invoke(main, [
            "clean", "--config", str(workdir / "cleaning.yaml"),
            "--in", str(workdir / "raw_docs.jsonl"),
            "--out", str(workdir),  # a directory is not a valid output file
        ])
        assert result.exit_code == 2


class TestPtFilter:
    def test_deterministic_bytes(self, runner, workdir):
        args = lambda out: [
            "pt-filter", "--lexicon", str(workdir / "lexicon_en.tsv"),
            "--seed", "7", "--in", str(workdir / "raw_docs.jsonl"),
            "--out", str(workdir / out),
        ]
        invoke(runner, args("a.jsonl"))
        invoke(runner, args("b.jsonl"))
        assert (workdir / "a.jsonl").read_bytes() == (workdir / "b.jsonl").read_bytes()

    def test_stats_consistent(self, runner, workdir):
        invoke(runner, [
            "pt-filter", "--lexicon", str(workdir / "lexicon_en.tsv"),
            "--seed", "3", "--in", str(workdir / "raw_docs.jsonl"),
            "--out", str(workdir / "kept.jsonl"),
            "--stats", str(workdir / "stats.json"),
        ])
        stats = json.loads((workdir / "stats.json").read_text())
        kept = load_dataset(workdir / "kept.jsonl")
        assert stats["output_count"] == len(kept)
        assert stats["input_count"] == 500


class TestScore:
    def test_fallback_scores_all_docs(self, runner, workdir):
        invoke(runner, [
            "score", "--fallback", "--lexicon", str(workdir / "lexicon_en.tsv"),
            "--in", str(workdir / "raw_docs.jsonl"),
            "--out", str(workdir / "scores.jsonl"),
        ])
        lines = (workdir / "scores.jsonl").read_text().splitlines()
        assert len(lines) == 500
        row = json.loads(lines[0])
        assert set(row) == {"doc_id", "score", "origin", "intensity"}
        assert row["origin"] == "FALLBACK"

    def test_no_mode_exit_1(self, runner, workdir):
        result = runner.invoke(main, [
            "score", "--in", str(workdir / "raw_docs.jsonl"),
            "--out", str(workdir / "scores.jsonl"),
        ])
        assert result.exit_code == 1


class TestEval:
    def eval_args(self, workdir, out):
        return [
            "eval", "--gold", str(workdir / "labels.jsonl"),
            "--pred", str(workdir / "predictions.jsonl"),
            "--out", str(workdir / out),
        ]

    def test_report_matches_library(self, runner, workdir):
        invoke(runner, self.eval_args(workdir, "eval.json"))
        gold = {r.doc_id: r for r in load_dataset(workdir / "labels.jsonl")}
        preds = {}
        for line in (workdir / "predictions.jsonl").read_text().splitlines():
            obj = json.loads(line)
            preds[obj["doc_id"]] = ev.map_output(obj["raw_output"], Language.EN)
        ids = [i for i in gold if i in preds]
        expected = ev.evaluate([gold[i].pcl for i in ids], [preds[i] for i in ids])
        written = json.loads((workdir / "eval.json").read_text())
        assert written["macro"] == expected.to_dict()["macro"]
        assert written["confusion"] == expected.to_dict()["confusion"]

    def test_deterministic_bytes(self, runner, workdir):
        invoke(runner, self.eval_args(workdir, "e1.json"))
        invoke(runner, self.eval_args(workdir, "e2.json"))
        assert (workdir / "e1.json").read_bytes() == (workdir / "e2.json").read_bytes()


class TestRunAll:
    def test_end_to_end(self, runner, workdir):
        invoke(runner, ["run", "all", "--config", str(workdir / "run_config.yaml")])
        out = workdir / "out"
        for name in ("cleaned.jsonl", "pretrain.jsonl", "scores.jsonl",
                     "sft.jsonl", "eval_report.json", "run_manifest.json",
                     "training_config.json"):
            assert (out / name).exists(), name
        manifest = json.loads((out / "run_manifest.json").read_text())
        assert manifest["stages"] == ["lexicon", "clean", "pt-filter",
                                      "score", "sft-build", "eval"]
        assert manifest["seeds"] == {"pt_filter": 7}
        sft = [json.loads(l) for l in (out / "sft.jsonl").read_text().splitlines()]
        assert sft
        assert all(s["output"] in ("Yes", "No", "是", "否") for s in sft)

    def test_rerun_reproduces_artifacts(self, runner, workdir, tmp_path_factory):
        invoke(runner, ["run", "all", "--config", str(workdir / "run_config.yaml")])
        first = {p.name: p.read_bytes() for p in (workdir / "out").iterdir()}
        invoke(runner, ["run", "all", "--config", str(workdir / "run_config.yaml")])
        second = {p.name: p.read_bytes() for p in (workdir / "out").iterdir()}
        assert first == second
