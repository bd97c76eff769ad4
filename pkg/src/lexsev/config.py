"""Declarative run configuration for the command line front end.

A run is described by one YAML file (schema documented in the README).
Loading validates thresholds, enumerations, and referenced paths up front so
commands fail before any work starts. Relative paths are resolved against the
directory containing the config file.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import yaml

from .agreement import MetricCase
from .corpus import (ClassLabel, ClassMap, CorpusSchema, LabeledCorpus,
                     TermList, load_corpus, load_term_list)
from .evaluation import ALL_TASKS
from .mining import DENOMINATOR_MODES
from .textnorm import (NormalizationConfig, default_stopwords,
                       load_stopword_file)

__all__ = [
    "ConfigError",
    "CorpusSpec",
    "ListSpec",
    "MiningSettings",
    "RunConfig",
]

_R_MODES = ("ratio_bounded", "prose")
_O_MODES = ("harmonic", "geometric")
_RULE_MODES = ("ordered", "unordered")
_TASK_NAMES = tuple(task.name for task in ALL_TASKS)


class ConfigError(Exception):
    """Invalid or unreadable run configuration."""


def _require_map(value, context: str) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"{context} must be a mapping, got {type(value).__name__}")
    return value


def _require_list(value, context: str) -> list:
    if value is None:
        return []
    if not isinstance(value, list):
        raise ConfigError(f"{context} must be a list, got {type(value).__name__}")
    return value


def _check_keys(mapping: dict, allowed: Sequence[str], context: str) -> None:
    unknown = sorted(set(mapping) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key {unknown[0]!r} in {context} "
                          f"(allowed: {', '.join(allowed)})")


def _get_str(mapping: dict, key: str, context: str, default: str) -> str:
    value = mapping.get(key, default)
    if not isinstance(value, str):
        raise ConfigError(f"{context}.{key} must be a string")
    return value


def _get_bool(mapping: dict, key: str, context: str, default: bool) -> bool:
    value = mapping.get(key, default)
    if not isinstance(value, bool):
        raise ConfigError(f"{context}.{key} must be true or false")
    return value


def _get_int(mapping: dict, key: str, context: str, default: int,
             minimum: int = 1) -> int:
    value = mapping.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{context}.{key} must be an integer")
    if value < minimum:
        raise ConfigError(f"{context}.{key} must be >= {minimum}, got {value}")
    return value


def _get_choice(mapping: dict, key: str, context: str, default: str,
                choices: Sequence[str]) -> str:
    value = _get_str(mapping, key, context, default)
    if value not in choices:
        raise ConfigError(f"{context}.{key} must be one of "
                          f"{', '.join(choices)}; got {value!r}")
    return value


def _unit_fraction(value, context: str) -> Fraction:
    """Parse a number in [0, 1] exactly (floats via their decimal repr)."""
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ConfigError(f"{context} must be a number in [0, 1]")
    try:
        result = Fraction(str(value))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{context} is not a number: {value!r}") from exc
    if not 0 <= result <= 1:
        raise ConfigError(f"{context} must be in [0, 1], got {value}")
    return result


@dataclass(frozen=True)
class ListSpec:
    """A named term (or entity) list on disk."""

    name: str
    path: Path


@dataclass(frozen=True)
class CorpusSpec:
    """A labeled corpus on disk plus how to read it."""

    name: str
    path: Path
    schema: CorpusSchema
    class_map: ClassMap


@dataclass(frozen=True)
class MiningSettings:
    """Thresholds and mode switches for the rule mining pipeline."""

    mode: str = "ordered"
    denominator: str = "antecedent_qualified"
    min_support: "int | Fraction" = 2
    min_confidence: Fraction = Fraction(1, 10)
    min_stability: int = 1
    max_antecedent: int = 4
    max_consequent: int = 4
    classes: tuple[ClassLabel, ...] = (ClassLabel.HATE, ClassLabel.RELATIVE_HATE)
    # stop-words carry no signal for rule mining, so database construction
    # drops them by default even when metric runs keep them
    remove_stopwords: bool = True


@dataclass(frozen=True)
class RunConfig:
    """Everything one run needs: inputs, normalization, and thresholds."""

    base_dir: Path
    out_dir: Path
    normalization: NormalizationConfig
    case: MetricCase = MetricCase.HATE_ONLY
    r_mode: str = "ratio_bounded"
    o_mode: str = "harmonic"
    min_offense: Fraction = Fraction(7, 10)
    top_k: int = 20
    corpora: tuple[CorpusSpec, ...] = ()
    lists: tuple[ListSpec, ...] = ()
    entities: tuple[ListSpec, ...] = ()
    task_names: "tuple[str, ...] | None" = None  # None = every task available
    include_severe: bool = True
    sweep_task: str = "Hate vs NoHate"
    sweep_thresholds: tuple[Fraction, ...] = ()
    mining: MiningSettings = field(default_factory=MiningSettings)

    @classmethod
    def load(cls, path: "str | Path") -> "RunConfig":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
        return cls.from_mapping(_require_map(data, "config"), base_dir=path.parent)

    @classmethod
    def from_mapping(cls, data: dict, base_dir: "str | Path") -> "RunConfig":
        base = Path(base_dir)
        _check_keys(data, ("out", "normalization", "metrics", "corpora",
                           "lists", "entities", "evaluation", "sweep",
                           "mining"), "config")

        out_value = data.get("out", "out")
        if not isinstance(out_value, str) or not out_value:
            raise ConfigError("config.out must be a non-empty path string")

        normalization = _parse_normalization(
            _require_map(data.get("normalization"), "normalization"), base)

        metrics = _require_map(data.get("metrics"), "metrics")
        _check_keys(metrics, ("case", "relativeness", "mean", "min_offense",
                              "top_k"), "metrics")
        try:
            case = MetricCase.parse(_get_str(metrics, "case", "metrics", "HateOnly"))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        r_mode = _get_choice(metrics, "relativeness", "metrics",
                             "ratio_bounded", _R_MODES)
        o_mode = _get_choice(metrics, "mean", "metrics", "harmonic", _O_MODES)
        min_offense = _unit_fraction(metrics.get("min_offense", 0.7),
                                     "metrics.min_offense")
        top_k = _get_int(metrics, "top_k", "metrics", 20)

        corpora = tuple(_parse_corpus(entry, i, base) for i, entry
                        in enumerate(_require_list(data.get("corpora"), "corpora")))
        lists = _parse_lists(data.get("lists"), "lists", base)
        entities = _parse_lists(data.get("entities"), "entities", base)
        _reject_duplicates([c.name for c in corpora], "corpora")
        _reject_duplicates([l.name for l in lists], "lists")
        _reject_duplicates([l.name for l in entities], "entities")

        evaluation = _require_map(data.get("evaluation"), "evaluation")
        _check_keys(evaluation, ("tasks", "include_severe"), "evaluation")
        task_names = _parse_tasks(evaluation.get("tasks", "all"))
        include_severe = _get_bool(evaluation, "include_severe", "evaluation", True)

        sweep = _require_map(data.get("sweep"), "sweep")
        _check_keys(sweep, ("task", "thresholds"), "sweep")
        sweep_task = _get_str(sweep, "task", "sweep", "Hate vs NoHate")
        if sweep_task not in _TASK_NAMES:
            raise ConfigError(f"sweep.task must be one of "
                              f"{', '.join(_TASK_NAMES)}; got {sweep_task!r}")
        sweep_thresholds = tuple(
            _unit_fraction(t, f"sweep.thresholds[{i}]") for i, t
            in enumerate(_require_list(sweep.get("thresholds"), "sweep.thresholds")))

        mining = _parse_mining(_require_map(data.get("mining"), "mining"))

        return cls(base_dir=base, out_dir=_resolve(base, out_value),
                   normalization=normalization, case=case, r_mode=r_mode,
                   o_mode=o_mode, min_offense=min_offense, top_k=top_k,
                   corpora=corpora, lists=lists, entities=entities,
                   task_names=task_names, include_severe=include_severe,
                   sweep_task=sweep_task, sweep_thresholds=sweep_thresholds,
                   mining=mining)

    def load_corpora(self, normalization: "NormalizationConfig | None" = None,
                     ) -> list[LabeledCorpus]:
        config = normalization or self.normalization
        return [load_corpus(spec.path, spec.schema, spec.class_map, config,
                            name=spec.name) for spec in self.corpora]

    def load_lists(self, normalization: "NormalizationConfig | None" = None,
                   ) -> list[TermList]:
        config = normalization or self.normalization
        return [load_term_list(spec.path, spec.name, config)
                for spec in self.lists]

    def load_entities(self, normalization: "NormalizationConfig | None" = None,
                      ) -> list[TermList]:
        config = normalization or self.normalization
        return [load_term_list(spec.path, spec.name, config)
                for spec in self.entities]


def _resolve(base: Path, value: str) -> Path:
    path = Path(value)
    return path if path.is_absolute() else base / path


def _existing_file(base: Path, value: str, context: str) -> Path:
    path = _resolve(base, value)
    if not path.is_file():
        raise ConfigError(f"{context} path does not exist: {path}")
    return path


def _reject_duplicates(names: list[str], context: str) -> None:
    seen = set()
    for name in names:
        if name in seen:
            raise ConfigError(f"duplicate name {name!r} in {context}")
        seen.add(name)


def _parse_normalization(data: dict, base: Path) -> NormalizationConfig:
    _check_keys(data, ("stemmer", "remove_stopwords", "stopwords"),
                "normalization")
    stemmer = _get_choice(data, "stemmer", "normalization", "porter",
                          ("porter", "none"))
    remove = _get_bool(data, "remove_stopwords", "normalization", False)
    source = _get_str(data, "stopwords", "normalization", "default")
    if source == "default":
        stopwords = default_stopwords()
    elif source == "none":
        stopwords = frozenset()
    else:
        stopwords = load_stopword_file(
            _existing_file(base, source, "normalization.stopwords"))
    return NormalizationConfig(stemmer=stemmer, remove_stopwords=remove,
                               stopwords=stopwords)


def _parse_corpus(entry, index: int, base: Path) -> CorpusSpec:
    context = f"corpora[{index}]"
    data = _require_map(entry, context)
    _check_keys(data, ("name", "path", "schema", "classes"), context)
    name = _get_str(data, "name", context, "")
    if not name:
        raise ConfigError(f"{context} needs a non-empty name")
    path = _existing_file(base, _get_str(data, "path", context, ""), context)

    schema_data = _require_map(data.get("schema"), f"{context}.schema")
    _check_keys(schema_data, ("kind", "text_column", "label_column",
                              "delimiter", "quotechar", "has_header",
                              "label_path"), f"{context}.schema")
    kind = _get_choice(schema_data, "kind", f"{context}.schema", "delimited",
                       ("delimited", "lines"))
    label_path = None
    if kind == "lines":
        raw = schema_data.get("label_path")
        if not isinstance(raw, str) or not raw:
            raise ConfigError(f"{context}.schema.label_path is required for "
                              "kind 'lines'")
        label_path = str(_existing_file(base, raw, f"{context}.schema.label_path"))
    schema = CorpusSchema(
        kind=kind,
        text_column=_column(schema_data, "text_column", f"{context}.schema", "text"),
        label_column=_column(schema_data, "label_column", f"{context}.schema", "label"),
        delimiter=_get_str(schema_data, "delimiter", f"{context}.schema", ","),
        quotechar=_get_str(schema_data, "quotechar", f"{context}.schema", '"'),
        has_header=_get_bool(schema_data, "has_header", f"{context}.schema", True),
        label_path=label_path,
    )

    classes = _require_map(data.get("classes"), f"{context}.classes")
    if not classes:
        raise ConfigError(f"{context}.classes must map source labels to "
                          "Hate, RelativeHate, or NoHate")
    try:
        class_map = ClassMap.parse(classes)
    except ValueError as exc:
        raise ConfigError(f"{context}.classes: {exc}") from exc
    return CorpusSpec(name=name, path=path, schema=schema, class_map=class_map)


def _column(mapping: dict, key: str, context: str, default: "str | int"):
    value = mapping.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise ConfigError(f"{context}.{key} must be a column name or index")
    return value


def _parse_lists(value, context: str, base: Path) -> tuple[ListSpec, ...]:
    specs = []
    for i, entry in enumerate(_require_list(value, context)):
        item = f"{context}[{i}]"
        data = _require_map(entry, item)
        _check_keys(data, ("name", "path"), item)
        name = _get_str(data, "name", item, "")
        if not name:
            raise ConfigError(f"{item} needs a non-empty name")
        specs.append(ListSpec(name=name, path=_existing_file(
            base, _get_str(data, "path", item, ""), item)))
    return tuple(specs)


def _parse_tasks(value) -> "tuple[str, ...] | None":
    if value in (None, "all"):
        return None
    names = _require_list(value, "evaluation.tasks")
    for name in names:
        if name not in _TASK_NAMES:
            raise ConfigError(f"evaluation.tasks entry {name!r} is not one of "
                              f"{', '.join(_TASK_NAMES)}")
    if not names:
        raise ConfigError("evaluation.tasks must be 'all' or a non-empty list")
    return tuple(names)


def _parse_mining(data: dict) -> MiningSettings:
    _check_keys(data, ("mode", "denominator", "min_support", "min_confidence",
                       "min_stability", "max_antecedent", "max_consequent",
                       "classes", "remove_stopwords"), "mining")
    mode = _get_choice(data, "mode", "mining", "ordered", _RULE_MODES)
    denominator = _get_choice(data, "denominator", "mining",
                              "antecedent_qualified", DENOMINATOR_MODES)
    min_support = _parse_min_support(data.get("min_support", 2))
    min_confidence = _unit_fraction(data.get("min_confidence", 0.1),
                                    "mining.min_confidence")
    classes_value = data.get("classes", ["Hate", "RelativeHate"])
    labels = []
    for raw in _require_list(classes_value, "mining.classes"):
        try:
            labels.append(ClassLabel.parse(str(raw)))
        except ValueError as exc:
            raise ConfigError(f"mining.classes: {exc}") from exc
    if not labels:
        raise ConfigError("mining.classes must name at least one class")
    return MiningSettings(
        mode=mode,
        denominator=denominator,
        min_support=min_support,
        min_confidence=min_confidence,
        min_stability=_get_int(data, "min_stability", "mining", 1),
        max_antecedent=_get_int(data, "max_antecedent", "mining", 4),
        max_consequent=_get_int(data, "max_consequent", "mining", 4),
        classes=tuple(labels),
        remove_stopwords=_get_bool(data, "remove_stopwords", "mining", True),
    )


def _parse_min_support(value) -> "int | Fraction":
    """An integer >= 1 is an absolute count; a number in (0, 1] is a fraction
    of the database size."""
    if isinstance(value, bool):
        raise ConfigError("mining.min_support must be a number, not a boolean")
    if isinstance(value, int):
        if value < 1:
            raise ConfigError(f"mining.min_support must be >= 1, got {value}")
        return value
    if isinstance(value, (float, str)):
        try:
            fraction = Fraction(str(value))
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"mining.min_support is not a number: {value!r}") from exc
        if not 0 < fraction <= 1:
            raise ConfigError("relative mining.min_support must be in (0, 1], "
                              f"got {value}")
        return fraction
    raise ConfigError("mining.min_support must be an integer count or a "
                      "fraction in (0, 1]")
