"""Command line front end: analyze, severe, eval, sweep, mine, graph.

Each command reads one YAML run configuration, does its work, and writes
CSV/JSON artifacts under the output directory, recording every file in
<out>/manifest.json. Flags override the corresponding config values.

Exit status: 0 on success, 1 when empty-result warnings occur under
--strict, 2 on input errors (unreadable or invalid configs, missing files,
impossible thresholds).
"""

from __future__ import annotations

import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

import click

from .agreement import MetricCase, inter_agreement, occurring_terms, severe_list
from .concepts import group_similar_rules
from .config import ConfigError, RunConfig, _parse_min_support, _unit_fraction
from .corpus import IngestionError
from .evaluation import ALL_TASKS, EvaluationError, enumerate_tasks, rank_lists, sweep_min_offense
from .mining import MiningError, build_rep_database, merge_term_lists, mine_rules, stable_rules
from .reports import (analyze_tables, build_eval_table, build_rule_join_table,
                      build_rules_table, build_stable_rules_table,
                      build_sweep_table, slug, update_manifest, write_databases,
                      write_graphs, write_severe_list, write_sweep_series,
                      write_table)

_INPUT_ERRORS = (ConfigError, IngestionError, MiningError, EvaluationError,
                 OSError, ValueError)


@dataclass
class Runtime:
    """Per-invocation state threaded through the command callbacks."""

    config_path: "str | None"
    out_override: "str | None"
    strict: bool
    threads: int
    warnings: list = field(default_factory=list)

    def load(self) -> RunConfig:
        if not self.config_path:
            _fail("no config given; pass --config PATH")
        config = RunConfig.load(self.config_path)
        if self.out_override:
            config = replace(config, out_dir=Path(self.out_override))
        return config

    def warn(self, message: str) -> None:
        self.warnings.append(message)
        click.echo(f"warning: {message}", err=True)

    def finish(self) -> None:
        if self.warnings and self.strict:
            sys.exit(1)


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(2)


def _map(fn, items, threads: int) -> list:
    """Order-preserving map, parallel when threads > 1."""
    items = list(items)
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="Run configuration file (YAML).")
@click.option("--out", "out_override", type=click.Path(), default=None,
              help="Output directory; overrides the config.")
@click.option("--strict", is_flag=True,
              help="Exit 1 when any empty-result warning occurs.")
@click.option("--threads", type=click.IntRange(min=1), default=1,
              help="Worker threads for per-corpus and per-database work.")
@click.pass_context
def main(ctx, config_path, out_override, strict, threads):
    """Measure term severity, evaluate term lists, and mine stable rules."""
    ctx.obj = Runtime(config_path=config_path, out_override=out_override,
                      strict=strict, threads=threads)


@main.command()
@click.option("--top-k", type=click.IntRange(min=1), default=None,
              help="Rows per class in the top-terms table.")
@click.pass_obj
def analyze(rt: Runtime, top_k):
    """Write the per-corpus agreement artifact tables."""
    try:
        config = rt.load()
        if top_k is not None:
            config = replace(config, top_k=top_k)
        corpora = config.load_corpora()
        lists = config.load_lists()
        if not corpora or not lists:
            _fail("analyze needs at least one corpus and one term list")

        def work(corpus):
            tables = analyze_tables(corpus, lists, r_mode=config.r_mode,
                                    o_mode=config.o_mode, top_k=config.top_k)
            directory = config.out_dir / slug(corpus.name)
            paths = []
            for table in tables:
                paths += write_table(table, directory)
            return paths

        written = [p for paths in _map(work, corpora, rt.threads) for p in paths]
        update_manifest(config.out_dir, "analyze", written)
        click.echo(f"analyze: wrote {len(written)} files for "
                   f"{len(corpora)} corpora under {config.out_dir}")
    except _INPUT_ERRORS as exc:
        _fail(str(exc))
    rt.finish()


@main.command()
@click.option("--min-offense", type=str, default=None,
              help="Severity threshold in [0, 1]; strictly-above terms kept.")
@click.option("--case", "case_name", type=str, default=None,
              help="Metric case: HateOnly or Hate+Relative.")
@click.pass_obj
def severe(rt: Runtime, min_offense, case_name):
    """Generate the severe-terms list for each corpus."""
    try:
        config = rt.load()
        if min_offense is not None:
            config = replace(config, min_offense=_unit_fraction(
                min_offense, "--min-offense"))
        if case_name is not None:
            config = replace(config, case=MetricCase.parse(case_name))
        corpora = config.load_corpora()
        lists = config.load_lists()
        if not corpora or not lists:
            _fail("severe needs at least one corpus and one term list")

        written = []
        for corpus in corpora:
            records = inter_agreement(corpus, lists, r_mode=config.r_mode,
                                      o_mode=config.o_mode)
            result = severe_list(records, config.case, config.min_offense)
            sidecar = {
                "corpus": corpus.name,
                "case": config.case.display,
                "threshold": float(config.min_offense),
                "source_lists": [tl.name for tl in lists],
                "terms_read": result.report.read if result.report else len(records),
                "terms_kept": len(result),
            }
            written += write_severe_list(config.out_dir / slug(corpus.name),
                                         result, sidecar)
            if len(result) == 0:
                rt.warn(f"severe list for {corpus.name} is empty at "
                        f"threshold {float(config.min_offense)}")
            else:
                click.echo(f"severe: {corpus.name}: kept {len(result)} terms")
        update_manifest(config.out_dir, "severe", written)
    except _INPUT_ERRORS as exc:
        _fail(str(exc))
    rt.finish()


@main.command("eval")
@click.option("--task", "task_names", type=str, multiple=True,
              help="Restrict to named tasks; repeatable.")
@click.pass_obj
def eval_cmd(rt: Runtime, task_names):
    """Rank the configured lists on each binary task of each corpus."""
    try:
        config = rt.load()
        if task_names:
            config = replace(config, task_names=tuple(task_names))
        if config.task_names:
            known = {t.name for t in ALL_TASKS}
            for name in config.task_names:
                if name not in known:
                    _fail(f"unknown task {name!r}; tasks are: "
                          + ", ".join(sorted(known)))
        corpora = config.load_corpora()
        lists = config.load_lists()
        if not corpora or not lists:
            _fail("eval needs at least one corpus and one term list")

        written = []
        for corpus in corpora:
            available = enumerate_tasks(corpus)
            if config.task_names:
                wanted = set(config.task_names)
                skipped = wanted - {t.name for t in available}
                for name in sorted(skipped):
                    rt.warn(f"task {name!r} needs classes {corpus.name} "
                            "does not populate; skipped")
                tasks = [t for t in available if t.name in wanted]
            else:
                tasks = available
            if not tasks:
                rt.warn(f"no evaluable tasks for {corpus.name}")
                continue

            candidates = list(lists)
            if config.include_severe:
                records = inter_agreement(corpus, lists, r_mode=config.r_mode,
                                          o_mode=config.o_mode)
                sev = severe_list(records, config.case, config.min_offense)
                if len(sev) > 0:
                    candidates.append(sev)
                else:
                    rt.warn(f"severe list for {corpus.name} is empty; "
                            "ranking the given lists only")
            ranked = {task.name: rank_lists(corpus, candidates, task)
                      for task in tasks}
            written += write_table(build_eval_table(ranked),
                                   config.out_dir / slug(corpus.name))
            best = next(iter(ranked.values()))[0]
            click.echo(f"eval: {corpus.name}: {len(tasks)} tasks, "
                       f"best on {tasks[0].name} is {best.list_name}")
        update_manifest(config.out_dir, "eval", written)
    except _INPUT_ERRORS as exc:
        _fail(str(exc))
    rt.finish()


_DEFAULT_SWEEP = tuple(Fraction(i, 10) for i in range(11))


@main.command()
@click.option("--task", "task_name", type=str, default=None,
              help="Binary task to sweep.")
@click.option("--thresholds", type=str, default=None,
              help="Comma-separated thresholds in [0, 1].")
@click.pass_obj
def sweep(rt: Runtime, task_name, thresholds):
    """Evaluate severe lists across a grid of min-offense thresholds."""
    try:
        config = rt.load()
        if task_name is not None:
            config = replace(config, sweep_task=task_name)
        if thresholds is not None:
            parsed = tuple(_unit_fraction(part.strip(), "--thresholds")
                           for part in thresholds.split(",") if part.strip())
            config = replace(config, sweep_thresholds=parsed)
        grid = config.sweep_thresholds or _DEFAULT_SWEEP
        task = next((t for t in ALL_TASKS if t.name == config.sweep_task), None)
        if task is None:
            _fail(f"unknown task {config.sweep_task!r}; tasks are: "
                  + ", ".join(t.name for t in ALL_TASKS))
        corpora = config.load_corpora()
        lists = config.load_lists()
        if not corpora or not lists:
            _fail("sweep needs at least one corpus and one term list")

        written = []
        for corpus in corpora:
            rows = sweep_min_offense(corpus, lists, task, config.case, grid,
                                     r_mode=config.r_mode, o_mode=config.o_mode)
            directory = config.out_dir / slug(corpus.name)
            written += write_table(build_sweep_table(task.name, rows), directory)
            written += write_sweep_series(directory, rows)
            empty = sum(1 for row in rows if row.error)
            if empty:
                rt.warn(f"{corpus.name}: {empty} of {len(rows)} thresholds "
                        "produced an empty severe list")
            click.echo(f"sweep: {corpus.name}: {len(rows)} thresholds on "
                       f"{task.name}")
        update_manifest(config.out_dir, "sweep", written)
    except _INPUT_ERRORS as exc:
        _fail(str(exc))
    rt.finish()


def _mining_options(fn):
    fn = click.option("--min-support", type=str, default=None,
                      help="Support floor: integer count or fraction (0, 1].")(fn)
    fn = click.option("--min-confidence", type=str, default=None,
                      help="Confidence floor in [0, 1].")(fn)
    fn = click.option("--min-stability", type=click.IntRange(min=1),
                      default=None,
                      help="Databases a rule must qualify in.")(fn)
    fn = click.option("--mode", type=click.Choice(["ordered", "unordered"]),
                      default=None, help="Rule semantics.")(fn)
    fn = click.option("--denominator",
                      type=click.Choice(["antecedent_qualified",
                                         "item_support"]),
                      default=None, help="Ordered-confidence denominator.")(fn)
    return fn


def _apply_mining_flags(config: RunConfig, min_support, min_confidence,
                        min_stability, mode, denominator) -> RunConfig:
    mining = config.mining
    if min_support is not None:
        raw = int(min_support) if min_support.lstrip("+-").isdigit() else min_support
        mining = replace(mining, min_support=_parse_min_support(raw))
    if min_confidence is not None:
        mining = replace(mining, min_confidence=_unit_fraction(
            min_confidence, "--min-confidence"))
    if min_stability is not None:
        mining = replace(mining, min_stability=min_stability)
    if mode is not None:
        mining = replace(mining, mode=mode)
    if denominator is not None:
        mining = replace(mining, denominator=denominator)
    return replace(config, mining=mining)


def _mining_run(rt: Runtime, config: RunConfig):
    """Build the database cross product and the joined stable rules.

    Databases pair every corpus with every corpus's occurring-terms list
    (n corpora -> n*n databases), so rules can be checked for stability
    across corpus/list combinations.
    """
    mining = config.mining
    normalization = config.normalization.with_stopword_removal(
        mining.remove_stopwords)
    corpora = config.load_corpora(normalization)
    lists = config.load_lists(normalization)
    if not corpora or not lists:
        _fail("mining needs at least one corpus and one term list")
    entity_lists = config.load_entities(normalization)
    entities = merge_term_lists(*entity_lists) if entity_lists else None

    union = merge_term_lists(*lists)
    inter_lists = [occurring_terms(union, corpus) for corpus in corpora]
    dbs = [build_rep_database(corpus, inter, entities=entities,
                              classes=mining.classes)
           for corpus in corpora for inter in inter_lists]
    for db in dbs:
        if not db.sequences:
            rt.warn(f"database {db.name} is empty after reduction")

    def mine_one(db):
        return mine_rules(db, mining.min_support, mining.min_confidence,
                          mode=mining.mode, denominator=mining.denominator,
                          max_antecedent=mining.max_antecedent,
                          max_consequent=mining.max_consequent)

    per_db = _map(mine_one, dbs, rt.threads)
    join = stable_rules(dbs, mining.min_support, mining.min_confidence,
                        mining.min_stability, mode=mining.mode,
                        denominator=mining.denominator,
                        max_antecedent=mining.max_antecedent,
                        max_consequent=mining.max_consequent,
                        per_db_rules=per_db)
    return dbs, per_db, join


@main.command()
@_mining_options
@click.pass_obj
def mine(rt: Runtime, min_support, min_confidence, min_stability, mode,
         denominator):
    """Mine co-occurrence rules per database and join them for stability."""
    try:
        config = rt.load()
        config = _apply_mining_flags(config, min_support, min_confidence,
                                     min_stability, mode, denominator)
        dbs, per_db, join = _mining_run(rt, config)
        rules_dir = config.out_dir / "rules"
        written = write_databases(rules_dir, dbs)
        for db, rules in zip(dbs, per_db):
            written += write_table(
                build_rules_table(f"Rules_{slug(db.name)}", rules), rules_dir)
        written += write_table(build_rule_join_table(join), rules_dir)
        written += write_table(build_stable_rules_table(join), rules_dir)
        update_manifest(config.out_dir, "mine", written)
        stable = join.stable
        if not stable:
            rt.warn("no rule is stable at min_stability "
                    f"{config.mining.min_stability}")
        click.echo(f"mine: {len(dbs)} databases, "
                   f"{sum(len(r) for r in per_db)} per-database rules, "
                   f"{len(stable)} stable")
    except _INPUT_ERRORS as exc:
        _fail(str(exc))
    rt.finish()


@main.command()
@_mining_options
@click.pass_obj
def graph(rt: Runtime, min_support, min_confidence, min_stability, mode,
          denominator):
    """Group stable rules into concepts and render their graphs."""
    try:
        config = rt.load()
        config = _apply_mining_flags(config, min_support, min_confidence,
                                     min_stability, mode, denominator)
        _, _, join = _mining_run(rt, config)
        stable = join.stable
        if not stable:
            rt.warn("no stable rules; writing an empty concept table")
        concepts = group_similar_rules([record.as_rule() for record in stable])
        written = write_graphs(config.out_dir / "graphs", concepts)
        update_manifest(config.out_dir, "graph", written)
        click.echo(f"graph: {len(concepts)} concepts from "
                   f"{len(stable)} stable rules")
    except _INPUT_ERRORS as exc:
        _fail(str(exc))
    rt.finish()


if __name__ == "__main__":
    main()
