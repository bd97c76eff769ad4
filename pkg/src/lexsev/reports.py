"""Report tables and file writers for every artifact bundle.

Each report is built as a `Table` whose row dicts hold native values
(ints, strings, Fractions, None); a missing key is an absent outer-join
cell. The same table then renders two ways: CSV with "--" for absent
cells and "NaN" for undefined metrics, and JSON with nulls for undefined
metrics and omitted keys for absent cells. All output is deterministic:
identical inputs produce identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .agreement import (
    MetricCase,
    inter_agreement,
    intra_agreement,
    outer_join,
    summary_n_hate_terms,
    term_class_stats,
    top_terms,
)
from .corpus import ClassLabel, LabeledCorpus, TermList
from .formatting import fmt3, fmt_metric
from .mining import SequenceDatabase, StableRuleJoin

_SAFE = re.compile(r"[^A-Za-z0-9_.+@-]")


def slug(name: str) -> str:
    """Filesystem-safe file or directory stem."""
    cleaned = _SAFE.sub("-", name).strip("-.")
    return cleaned or "unnamed"


@dataclass
class Table:
    """One report: column order plus native-valued row dicts."""

    name: str
    columns: tuple
    rows: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)  # merged into the JSON payload


_ABSENT = object()


def _csv_cell(value) -> str:
    if value is _ABSENT:
        return "--"
    if value is None:
        return "NaN"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return value
    return fmt_metric(value)


def _json_cell(value):
    if value is None or isinstance(value, (bool, int, str)):
        return value
    value = float(value)
    if value in (float("inf"), float("-inf")):
        return fmt_metric(value)
    return value


def render_csv(table: Table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow(_csv_cell(row.get(col, _ABSENT))
                        for col in table.columns)
    return buf.getvalue()


def render_json(table: Table) -> str:
    payload = {"name": table.name, "columns": list(table.columns)}
    payload.update(table.extra)
    payload["rows"] = [
        {col: _json_cell(row[col]) for col in table.columns if col in row}
        for row in table.rows
    ]
    return json.dumps(payload, indent=2) + "\n"


def write_table(table: Table, directory) -> list:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    csv_path = directory / f"{table.name}.csv"
    json_path = directory / f"{table.name}.json"
    csv_path.write_text(render_csv(table), encoding="utf-8")
    json_path.write_text(render_json(table), encoding="utf-8")
    return [csv_path, json_path]


# --- agreement artifact tables --------------------------------------------


_CLASS_COLUMNS = tuple(label.value for label in ClassLabel)


def build_all_frequencies(corpus: LabeledCorpus,
                          lists: Sequence[TermList]) -> Table:
    table = Table(name="AllHateTermsFrequencies",
                  columns=("List", "Term") + _CLASS_COLUMNS + ("Total",))
    absent: dict = {}
    for tlist in lists:
        stats = term_class_stats(corpus, tlist)
        for rec in stats:
            row = {"List": tlist.name, "Term": rec.term.raw,
                   "Total": rec.total_freq}
            for label in ClassLabel:
                row[label.value] = rec.freq.get(label, 0)
            table.rows.append(row)
        absent[tlist.name] = [term.raw for term in stats.absent]
    table.extra["zero_frequency_terms"] = absent
    return table


def build_top_terms(corpus: LabeledCorpus, lists: Sequence[TermList],
                    k: int) -> Table:
    table = Table(name="TopTermsFrequency",
                  columns=("List", "Class", "Rank", "Term", "Frequency"))
    for tlist in lists:
        stats = term_class_stats(corpus, tlist)
        for label in ClassLabel:
            if corpus.class_size(label) == 0:
                continue
            for rank, (term, freq) in enumerate(top_terms(stats, label, k), 1):
                table.rows.append({"List": tlist.name, "Class": label.value,
                                   "Rank": rank, "Term": term.raw,
                                   "Frequency": freq})
    return table


def build_percent_lines(corpus: LabeledCorpus,
                        lists: Sequence[TermList]) -> Table:
    table = Table(name="AllHTsPercentLine",
                  columns=("List", "Term") + _CLASS_COLUMNS)
    for tlist in lists:
        for rec in term_class_stats(corpus, tlist):
            row = {"List": tlist.name, "Term": rec.term.raw}
            for label in ClassLabel:
                row[label.value] = rec.percent_lines(label)
            table.rows.append(row)
    return table


def build_outer_join(corpus: LabeledCorpus, lists: Sequence[TermList],
                     value: str) -> Table:
    name = ("OuterJoinHTsFrequencies" if value == "freq"
            else "OuterJoinHTsPercentLines")
    table = Table(name=name, columns=("List", "Term") + _CLASS_COLUMNS)
    for tlist in lists:
        stats = term_class_stats(corpus, tlist)
        for row_rec in outer_join(stats.records, value=value):
            row = {"List": tlist.name, "Term": row_rec.term.raw}
            for label, cell in row_rec.cells.items():
                row[label.value] = cell
            table.rows.append(row)
    return table


def _metric_columns():
    cols = []
    for case in MetricCase:
        cols += [f"Hatefulness({case.display})",
                 f"Relativeness({case.display})",
                 f"Offensiveness({case.display})"]
    return tuple(cols)


def _metric_cells(record) -> dict:
    row = {}
    for sev in record.cases:
        label = sev.case.display
        row[f"Hatefulness({label})"] = sev.hatefulness
        row[f"Relativeness({label})"] = sev.relativeness
        row[f"Offensiveness({label})"] = sev.offensiveness
    return row


def build_intra_agreement(corpus: LabeledCorpus, lists: Sequence[TermList],
                          r_mode: str, o_mode: str) -> Table:
    table = Table(name="IntraAgreement",
                  columns=("List", "Term") + _metric_columns())
    for tlist in lists:
        for record in intra_agreement(corpus, tlist, r_mode, o_mode):
            row = {"List": tlist.name, "Term": record.term.raw}
            row.update(_metric_cells(record))
            table.rows.append(row)
    return table


def build_inter_agreement(corpus: LabeledCorpus, lists: Sequence[TermList],
                          r_mode: str, o_mode: str) -> Table:
    table = Table(name="InterAgreement",
                  columns=("Term",) + _metric_columns() + ("HateListNames",))
    for record in inter_agreement(corpus, lists, r_mode, o_mode):
        row = {"Term": record.term.raw,
               "HateListNames": ";".join(record.membership)}
        row.update(_metric_cells(record))
        table.rows.append(row)
    return table


def build_summary_n(corpus: LabeledCorpus, lists: Sequence[TermList]) -> Table:
    table = Table(name="Summary_N",
                  columns=("Corpus", "Class", "List", "N", "Lines",
                           "TotalLines", "Percent"))
    for row_rec in summary_n_hate_terms([corpus], lists):
        table.rows.append({
            "Corpus": row_rec.corpus, "Class": row_rec.class_label.value,
            "List": row_rec.list_name, "N": row_rec.n,
            "Lines": row_rec.line_count, "TotalLines": row_rec.total_lines,
            "Percent": row_rec.percent,
        })
    return table


def analyze_tables(corpus: LabeledCorpus, lists: Sequence[TermList], *,
                   r_mode: str = "ratio_bounded", o_mode: str = "harmonic",
                   top_k: int = 20) -> list:
    """The per-corpus artifact bundle, in a fixed order."""
    return [
        build_all_frequencies(corpus, lists),
        build_top_terms(corpus, lists, top_k),
        build_percent_lines(corpus, lists),
        build_outer_join(corpus, lists, "freq"),
        build_outer_join(corpus, lists, "percent_lines"),
        build_intra_agreement(corpus, lists, r_mode, o_mode),
        build_inter_agreement(corpus, lists, r_mode, o_mode),
        build_summary_n(corpus, lists),
    ]


# --- evaluation tables ----------------------------------------------------


# compute_time stays on EvalReport only: written artifacts must be
# byte-identical across reruns, so no wall-clock values go to disk
_EVAL_COLUMNS = ("Task", "List", "ListSize", "TP", "FN", "FP", "TN",
                 "Accuracy", "Precision", "Recall", "FMeasure")


def _eval_row(task_name: str, report) -> dict:
    m = report.matrix
    return {"Task": task_name, "List": report.list_name,
            "ListSize": report.list_size,
            "TP": m.tp, "FN": m.fn, "FP": m.fp, "TN": m.tn,
            "Accuracy": report.accuracy, "Precision": report.precision,
            "Recall": report.recall, "FMeasure": report.f_measure}


def build_eval_table(ranked_by_task: Mapping[str, Sequence]) -> Table:
    """task name -> reports already ranked best-first."""
    table = Table(name="Evaluation", columns=_EVAL_COLUMNS)
    for task_name, reports in ranked_by_task.items():
        for report in reports:
            table.rows.append(_eval_row(task_name, report))
    return table


def build_sweep_table(task_name: str, rows: Sequence) -> Table:
    table = Table(name="Sweep",
                  columns=("Threshold", "List", "ListSize", "Task", "Accuracy",
                           "Precision", "Recall", "FMeasure", "Error"))
    for row_rec in rows:
        row = {"Threshold": row_rec.threshold, "List": row_rec.list_name,
               "ListSize": row_rec.list_size, "Task": task_name}
        if row_rec.report is not None:
            row["Accuracy"] = row_rec.report.accuracy
            row["Precision"] = row_rec.report.precision
            row["Recall"] = row_rec.report.recall
            row["FMeasure"] = row_rec.report.f_measure
        if row_rec.error is not None:
            row["Error"] = row_rec.error
        table.rows.append(row)
    return table


def write_sweep_series(directory, rows) -> list:
    """Two-column plot series: threshold, f_measure (blank when undefined)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    lines = ["threshold,f_measure"]
    for row in rows:
        f = row.report.f_measure if row.report is not None else None
        lines.append(f"{fmt3(row.threshold)},{'' if f is None else fmt3(f)}")
    path = directory / "SweepSeries.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return [path]


# --- severe list ----------------------------------------------------------


def write_severe_list(directory, severe: TermList, sidecar: dict) -> list:
    """Plain-text term file plus a JSON sidecar describing its provenance."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    txt_path = directory / "SevereTerms.txt"
    json_path = directory / "SevereTerms.json"
    body = "".join(term.raw + "\n" for term in severe.entries)
    txt_path.write_text(body, encoding="utf-8")
    payload = {"name": severe.name, "count": len(severe.entries)}
    payload.update(sidecar)
    json_path.write_text(json.dumps(payload, indent=2) + "\n",
                         encoding="utf-8")
    return [txt_path, json_path]


# --- mining tables --------------------------------------------------------


def build_rules_table(name: str, rules: Iterable) -> Table:
    table = Table(name=name,
                  columns=("Antecedent", "Consequent", "Support",
                           "AntecedentCount", "Confidence"))
    for rule in rules:
        table.rows.append({
            "Antecedent": " ".join(rule.antecedent),
            "Consequent": " ".join(rule.consequent),
            "Support": rule.support,
            "AntecedentCount": rule.antecedent_count,
            "Confidence": rule.confidence,
        })
    return table


def _join_rows(records, db_names, min_stability):
    rows = []
    for record in records:
        row = {"Antecedent": " ".join(record.antecedent),
               "Consequent": " ".join(record.consequent),
               "Stability": record.stability,
               "Stable": record.stability >= min_stability}
        for name in db_names:
            cell = record.cells.get(name)
            if cell is not None:
                row[f"Sup({name})"] = cell.support
                row[f"Conf({name})"] = cell.confidence
        rows.append(row)
    return rows


def build_rule_join_table(join: StableRuleJoin) -> Table:
    per_db = []
    for name in join.db_names:
        per_db += [f"Sup({name})", f"Conf({name})"]
    table = Table(name="OuterJoinHateRules",
                  columns=("Antecedent", "Consequent", "Stability", "Stable")
                  + tuple(per_db))
    table.rows = _join_rows(join.records, join.db_names, join.min_stability)
    table.extra["min_stability"] = join.min_stability
    return table


def build_stable_rules_table(join: StableRuleJoin) -> Table:
    table = build_rule_join_table(join)
    table.name = "StableHateRules"
    table.rows = _join_rows(join.stable, join.db_names, join.min_stability)
    return table


def write_databases(directory, dbs: Sequence[SequenceDatabase]) -> list:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for db in dbs:
        path = directory / f"db_{slug(db.name)}.txt"
        path.write_text(db.to_text(), encoding="utf-8")
        paths.append(path)
    return paths


# --- graphs ---------------------------------------------------------------


def build_concepts_table(concepts: Sequence) -> Table:
    table = Table(name="Concepts",
                  columns=("Concept", "RuleCount", "Terms", "Rules"))
    for concept in concepts:
        table.rows.append({
            "Concept": concept.label,
            "RuleCount": concept.rule_count,
            "Terms": " ".join(sorted(concept.terms)),
            "Rules": ";".join(r.name for r in concept.rules),
        })
    return table


def write_graphs(directory, concepts: Sequence) -> list:
    from .concepts import (build_lattice_graph, build_transitive_graph,
                           export_dot, export_json)
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = write_table(build_concepts_table(concepts), directory)
    for concept in concepts:
        for graph in (build_transitive_graph(concept),
                      build_lattice_graph(concept)):
            stem = slug(graph.name)
            dot_path = directory / f"{stem}.dot"
            json_path = directory / f"{stem}.json"
            dot_path.write_text(export_dot(graph), encoding="utf-8")
            json_path.write_text(export_json(graph), encoding="utf-8")
            paths += [dot_path, json_path]
    return paths


# --- manifest -------------------------------------------------------------


def update_manifest(out_dir, command: str, paths: Iterable) -> Path:
    """Record the files a command wrote; reruns produce identical bytes."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest_path = out_dir / "manifest.json"
    data: dict = {}
    if manifest_path.exists():
        try:
            data = json.loads(manifest_path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError):
            data = {}
    commands = data.get("commands")
    if not isinstance(commands, dict):
        commands = {}
    relative = sorted(str(Path(p).relative_to(out_dir).as_posix())
                      for p in paths)
    commands[command] = relative
    payload = {"commands": {k: commands[k] for k in sorted(commands)}}
    manifest_path.write_text(json.dumps(payload, indent=2) + "\n",
                             encoding="utf-8")
    return manifest_path
