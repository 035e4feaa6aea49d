import io
import json

import pytest

from temporal_qa.annotations import format_scene_graph_records, format_segment_annotations
from temporal_qa.cli import run
from temporal_qa.synthetic import overlapping_corpus, single_label_corpus


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    (d / "sg.jsonl").write_text(format_scene_graph_records(overlapping_corpus(30, seed=4)))
    (d / "seg.tsv").write_text(format_segment_annotations(single_label_corpus(30, seed=4)))
    return d


def cli(*argv):
    out = io.StringIO()
    code = run(list(map(str, argv)), out=out)
    return code, out.getvalue()


def generate(files, out, *extra):
    return cli("generate", "--input", files / "sg.jsonl", "--format", "scenegraph", "--target", 30, "--seed", 5, "--out", out, *extra)


def test_generate_twice_is_byte_identical(files, tmp_path):
    code, text = generate(files, tmp_path / "a.jsonl")
    assert code == 0 and "wrote" in text
    assert generate(files, tmp_path / "b.jsonl")[0] == 0
    assert generate(files, tmp_path / "c.jsonl", "--workers", 2)[0] == 0
    a = (tmp_path / "a.jsonl").read_bytes()
    assert a == (tmp_path / "b.jsonl").read_bytes() == (tmp_path / "c.jsonl").read_bytes()
    assert json.loads((tmp_path / "a.jsonl.meta.json").read_text())["config"]["global_seed"] == 5
    assert (tmp_path / "a.jsonl.stats.json").exists()


def test_segments_generate_and_validate(files, tmp_path):
    out = tmp_path / "s.jsonl"
    code, text = cli("generate", "--input", files / "seg.tsv", "--target", 20, "--out", out)
    assert code == 0
    assert cli("validate", "--benchmark", out) == (0, "0 violations\n")
    code, text = cli("stats", "--benchmark", out)
    assert code == 0 and "skipped CoOccur" in text


def test_validate_detects_imbalance(files, tmp_path, capsys):
    out = tmp_path / "x.jsonl"
    generate(files, out)
    lines = out.read_text().splitlines()
    drop = next(i for i, l in enumerate(lines) if '"answer": "yes"' in l and '"qtype": "boolean"' in l)
    out.write_text("\n".join(lines[:drop] + lines[drop + 1:]) + "\n")
    code, text = cli("validate", "--benchmark", out)
    assert code == 1 and "1 violations" in text
    assert "yes vs" in capsys.readouterr().err


def test_corrupt_file_is_data_error(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"id": 1}\n')
    assert cli("stats", "--benchmark", bad)[0] == 1
    assert "SchemaViolation" in capsys.readouterr().err
    assert cli("stats", "--benchmark", tmp_path / "missing.jsonl")[0] == 1


def test_score_round_trip(files, tmp_path):
    bench = tmp_path / "b.jsonl"
    generate(files, bench)
    items = [json.loads(l) for l in bench.read_text().splitlines()]
    preds = tmp_path / "p.jsonl"
    preds.write_text("".join(json.dumps({"id": it["id"], "raw_response": it["answer"]}) + "\n" for it in items))
    report = tmp_path / "r.json"
    code, text = cli("score", "--benchmark", bench, "--predictions", preds, "--report", report)
    assert code == 0 and "mean acc" in text
    assert json.loads(report.read_text())["mean_accuracy"] == 100.0


def test_score_strict_fails_on_unparseable(files, tmp_path, capsys):
    bench = tmp_path / "b.jsonl"
    generate(files, bench)
    first = json.loads(bench.read_text().splitlines()[0])
    preds = tmp_path / "p.jsonl"
    preds.write_text(json.dumps({"id": first["id"], "raw_response": "hard to tell"}) + "\n")
    args = ("score", "--benchmark", bench, "--predictions", preds, "--report", tmp_path / "r.json")
    assert cli(*args)[0] == 0
    assert cli(*args, "--strict")[0] == 1
    assert "UnparseableResponse" in capsys.readouterr().err


def test_oracle_check():
    code, text = cli("oracle-check", "--cases", 30, "--seed", 2)
    assert code == 0 and "0 mismatches" in text


def test_inspect(files, tmp_path):
    bench = tmp_path / "b.jsonl"
    generate(files, bench)
    first = json.loads(bench.read_text().splitlines()[0])
    code, text = cli("inspect", "--benchmark", bench, "--id", first["id"], "--input", files / "sg.jsonl", "--format", "scenegraph")
    assert code == 0
    assert first["question"] in text and "|" in text and "#" in text
    assert cli("inspect", "--benchmark", bench, "--id", "nope")[0] == 1


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["generate", "--input", "x"],
        ["oracle-check", "--cases", "0"],
        ["generate", "--input", "x", "--out", "y", "--theta", "3"],
        ["score", "--benchmark", "b", "--predictions", "p", "--report", "r", "--policy", "skip"],
        ["stats", "--benchmark", "b", "--bogus"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    assert run(argv, out=io.StringIO()) == 2


def test_help_exits_0(capsys):
    assert run(["generate", "--help"], out=io.StringIO()) == 0
