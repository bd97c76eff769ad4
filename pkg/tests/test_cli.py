import hashlib
import json

import pytest
from click.testing import CliRunner

from lexsev.cli import main

CONFIG = """
out: out
normalization:
  stemmer: none
metrics:
  min_offense: 0.4
corpora:
  - name: first
    path: first.csv
    classes: {h: Hate, r: RelativeHate, n: NoHate}
  - name: second
    path: second.csv
    classes: {h: Hate, r: RelativeHate, n: NoHate}
lists:
  - name: l1
    path: l1.txt
  - name: l2
    path: l2.txt
sweep:
  task: Hate vs NoHate
  thresholds: [0.0, 0.5, 1.0]
mining:
  min_support: 2
  min_confidence: 0.5
  min_stability: 4
"""


def build_workspace(tmp_path):
    (tmp_path / "first.csv").write_text(
        "text,label\n"
        "alpha beta smile,h\n"
        "alpha beta walk,h\n"
        "beta alone,r\n"
        "gamma walks,n\n"
        "clean line,n\n", encoding="utf-8")
    (tmp_path / "second.csv").write_text(
        "text,label\n"
        "alpha beta runs,h\n"
        "alpha beta sits,h\n"
        "beta here,r\n"
        "plain,n\n", encoding="utf-8")
    (tmp_path / "l1.txt").write_text("alpha\ngamma\n", encoding="utf-8")
    (tmp_path / "l2.txt").write_text("beta\n", encoding="utf-8")
    config = tmp_path / "run.yml"
    config.write_text(CONFIG, encoding="utf-8")
    return config


def invoke(config, *args):
    return CliRunner().invoke(main, ["--config", str(config), *args])


def tree_hash(root):
    return {str(p.relative_to(root)): hashlib.sha256(p.read_bytes()).hexdigest()
            for p in sorted(root.rglob("*")) if p.is_file()}


ARTIFACTS = ["AllHateTermsFrequencies", "TopTermsFrequency",
             "AllHTsPercentLine", "OuterJoinHTsFrequencies",
             "OuterJoinHTsPercentLines", "IntraAgreement", "InterAgreement",
             "Summary_N"]


def test_analyze_writes_full_bundle(tmp_path):
    config = build_workspace(tmp_path)
    result = invoke(config, "analyze")
    assert result.exit_code == 0, result.output
    out = tmp_path / "out"
    for corpus in ("first", "second"):
        for name in ARTIFACTS:
            assert (out / corpus / f"{name}.csv").is_file()
            assert (out / corpus / f"{name}.json").is_file()
    manifest = json.loads((out / "manifest.json").read_text())
    assert len(manifest["commands"]["analyze"]) == 2 * 2 * len(ARTIFACTS)


def test_analyze_reruns_are_byte_identical(tmp_path):
    config = build_workspace(tmp_path)
    assert invoke(config, "analyze").exit_code == 0
    before = tree_hash(tmp_path / "out")
    assert invoke(config, "analyze").exit_code == 0
    assert tree_hash(tmp_path / "out") == before


def test_threads_do_not_change_output(tmp_path):
    config = build_workspace(tmp_path)
    assert invoke(config, "analyze").exit_code == 0
    single = tree_hash(tmp_path / "out")
    result = CliRunner().invoke(
        main, ["--config", str(config), "--threads", "4", "analyze"])
    assert result.exit_code == 0
    assert tree_hash(tmp_path / "out") == single


def test_out_flag_overrides_config(tmp_path):
    config = build_workspace(tmp_path)
    result = CliRunner().invoke(
        main, ["--config", str(config), "--out", str(tmp_path / "elsewhere"),
               "analyze"])
    assert result.exit_code == 0
    assert (tmp_path / "elsewhere" / "first" / "Summary_N.csv").is_file()
    assert not (tmp_path / "out").exists()


def test_missing_config_is_an_input_error(tmp_path):
    result = CliRunner().invoke(main, ["analyze"])
    assert result.exit_code == 2
    assert "no config" in result.stderr
    result = CliRunner().invoke(
        main, ["--config", str(tmp_path / "nope.yml"), "analyze"])
    assert result.exit_code == 2
    assert "nope.yml" in result.stderr


def test_missing_input_file_names_the_path(tmp_path):
    config = build_workspace(tmp_path)
    (tmp_path / "second.csv").unlink()
    result = invoke(config, "analyze")
    assert result.exit_code == 2
    assert "second.csv" in result.stderr


def test_severe_writes_list_and_sidecar(tmp_path):
    config = build_workspace(tmp_path)
    result = invoke(config, "severe")
    assert result.exit_code == 0, result.output
    terms = (tmp_path / "out" / "first" / "SevereTerms.txt").read_text().split()
    assert set(terms) == {"alpha", "beta"}
    sidecar = json.loads(
        (tmp_path / "out" / "first" / "SevereTerms.json").read_text())
    assert sidecar["threshold"] == 0.4
    assert sidecar["case"] == "Hate"
    assert sidecar["source_lists"] == ["l1", "l2"]
    assert sidecar["terms_kept"] == 2


def test_severe_empty_result_warns_but_writes(tmp_path):
    config = build_workspace(tmp_path)
    result = invoke(config, "severe", "--min-offense", "1.0")
    assert result.exit_code == 0
    assert "empty" in result.stderr
    assert (tmp_path / "out" / "first" / "SevereTerms.txt").read_text() == ""
    strict = CliRunner().invoke(
        main, ["--config", str(config), "--strict", "severe",
               "--min-offense", "1.0"])
    assert strict.exit_code == 1


def test_eval_ranks_lists_and_includes_severe(tmp_path):
    config = build_workspace(tmp_path)
    result = invoke(config, "eval")
    assert result.exit_code == 0, result.output
    data = json.loads((tmp_path / "out" / "first" / "Evaluation.json").read_text())
    lists_seen = {row["List"] for row in data["rows"]}
    assert {"l1", "l2", "Offensiveness(Hate)(0.4)"} <= lists_seen
    tasks_seen = {row["Task"] for row in data["rows"]}
    assert len(tasks_seen) == 6


def test_eval_task_filter_and_unknown_task(tmp_path):
    config = build_workspace(tmp_path)
    result = invoke(config, "eval", "--task", "Hate vs NoHate")
    assert result.exit_code == 0
    data = json.loads((tmp_path / "out" / "first" / "Evaluation.json").read_text())
    assert {row["Task"] for row in data["rows"]} == {"Hate vs NoHate"}
    result = invoke(config, "eval", "--task", "Nonsense")
    assert result.exit_code == 2
    assert "unknown task" in result.stderr


def test_sweep_writes_table_and_series(tmp_path):
    config = build_workspace(tmp_path)
    result = invoke(config, "sweep")
    assert result.exit_code == 0, result.output
    series = (tmp_path / "out" / "first" / "SweepSeries.csv").read_text()
    lines = series.splitlines()
    assert lines[0] == "threshold,f_measure"
    assert len(lines) == 4
    assert lines[-1] == "1,"
    assert "empty severe list" in result.stderr or "empty" in result.stderr
    table = json.loads((tmp_path / "out" / "first" / "Sweep.json").read_text())
    errors = [row for row in table["rows"] if "Error" in row]
    assert len(errors) == 1 and errors[0]["Threshold"] == 1.0


def test_sweep_threshold_flag_overrides(tmp_path):
    config = build_workspace(tmp_path)
    result = invoke(config, "sweep", "--thresholds", "0.1,0.2")
    assert result.exit_code == 0
    series = (tmp_path / "out" / "first" / "SweepSeries.csv").read_text()
    assert len(series.splitlines()) == 3


def test_mine_writes_databases_and_stable_rules(tmp_path):
    config = build_workspace(tmp_path)
    result = invoke(config, "mine")
    assert result.exit_code == 0, result.output
    rules_dir = tmp_path / "out" / "rules"
    dbs = sorted(p.name for p in rules_dir.glob("db_*.txt"))
    assert len(dbs) == 4  # 2 corpora x 2 occurring-term lists
    stable = (rules_dir / "StableHateRules.csv").read_text().splitlines()
    assert any(line.startswith("alpha,beta,4,true") for line in stable[1:])
    join = json.loads((rules_dir / "OuterJoinHateRules.json").read_text())
    assert join["min_stability"] == 4
    sup_cols = [c for c in join["columns"] if c.startswith("Sup(")]
    assert len(sup_cols) == 4


def test_mine_min_stability_above_db_count_fails(tmp_path):
    config = build_workspace(tmp_path)
    result = invoke(config, "mine", "--min-stability", "9")
    assert result.exit_code == 2
    assert "exceeds" in result.stderr


def test_mine_unordered_mode_flag(tmp_path):
    config = build_workspace(tmp_path)
    result = invoke(config, "mine", "--mode", "unordered", "--min-stability",
                    "4")
    assert result.exit_code == 0
    per_db = (tmp_path / "out" / "rules" / "Rules_first.l1+l2@first.csv"
              ).read_text().splitlines()
    pairs = {tuple(line.split(",")[:2]) for line in per_db[1:]}
    assert ("beta", "alpha") in pairs  # reverse direction exists unordered


def test_mine_warns_when_nothing_is_stable(tmp_path):
    config = build_workspace(tmp_path)
    result = invoke(config, "mine", "--min-confidence", "1.0",
                    "--min-support", "1000")
    assert result.exit_code == 0
    assert "no rule is stable" in result.stderr


def test_graph_renders_concepts(tmp_path):
    config = build_workspace(tmp_path)
    result = invoke(config, "graph")
    assert result.exit_code == 0, result.output
    graphs = tmp_path / "out" / "graphs"
    table = json.loads((graphs / "Concepts.json").read_text())
    assert [row["Concept"] for row in table["rows"]] == ["alpha_beta"]
    dot = (graphs / "Transitive_alpha_beta.dot").read_text()
    assert '"alpha" -> "beta"' in dot
    assert (graphs / "Lattice_alpha_beta.dot").is_file()
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert any(p.startswith("graphs/") for p in manifest["commands"]["graph"])


def test_manifest_accumulates_commands(tmp_path):
    config = build_workspace(tmp_path)
    assert invoke(config, "analyze").exit_code == 0
    assert invoke(config, "mine").exit_code == 0
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert sorted(manifest["commands"]) == ["analyze", "mine"]
    assert all(not p.startswith("/") for paths in manifest["commands"].values()
               for p in paths)


def test_full_pipeline_rerun_is_byte_identical(tmp_path):
    config = build_workspace(tmp_path)
    commands = ("analyze", "severe", "eval", "sweep", "mine", "graph")
    for command in commands:
        assert invoke(config, command).exit_code == 0
    before = tree_hash(tmp_path / "out")
    for command in commands:
        assert invoke(config, command).exit_code == 0
    assert tree_hash(tmp_path / "out") == before
