"""Lexicon severity analysis: term metrics, list evaluation, rule mining."""

__version__ = "0.1.0"

from .agreement import (
    InterAgreementRecord,
    IntraAgreementRecord,
    MetricCase,
    hatefulness,
    inter_agreement,
    intra_agreement,
    occurring_terms,
    offensiveness,
    outer_join,
    relativeness,
    severe_list,
    summary_n_hate_terms,
    term_class_stats,
    top_terms,
)
from .concepts import (
    Concept,
    build_lattice_graph,
    build_transitive_graph,
    export_dot,
    export_json,
    group_similar_rules,
)
from .config import ConfigError, RunConfig
from .corpus import (
    ClassLabel,
    ClassMap,
    CorpusLine,
    CorpusSchema,
    IngestionError,
    LabeledCorpus,
    NormalizedTerm,
    TermList,
    load_corpus,
    load_term_list,
)
from .evaluation import (
    ALL_TASKS,
    BinaryTask,
    EvalReport,
    EvaluationError,
    PercentConfusionMatrix,
    confusion,
    enumerate_tasks,
    evaluate,
    rank_lists,
    sweep_min_offense,
)
from .mining import (
    EntityList,
    HateRule,
    MiningError,
    SequenceDatabase,
    StableHateRule,
    StableRuleJoin,
    build_rep_database,
    merge_term_lists,
    mine_ordered_rules,
    mine_rules,
    mine_unordered_rules,
    stable_rules,
)
from .textnorm import NormalizationConfig, normalize_text, porter_stem

__all__ = [
    "ALL_TASKS",
    "BinaryTask",
    "ClassLabel",
    "ClassMap",
    "Concept",
    "ConfigError",
    "CorpusLine",
    "CorpusSchema",
    "EntityList",
    "EvalReport",
    "EvaluationError",
    "HateRule",
    "IngestionError",
    "InterAgreementRecord",
    "IntraAgreementRecord",
    "LabeledCorpus",
    "MetricCase",
    "MiningError",
    "NormalizationConfig",
    "NormalizedTerm",
    "PercentConfusionMatrix",
    "RunConfig",
    "SequenceDatabase",
    "StableHateRule",
    "StableRuleJoin",
    "TermList",
    "__version__",
    "build_lattice_graph",
    "build_rep_database",
    "build_transitive_graph",
    "confusion",
    "enumerate_tasks",
    "evaluate",
    "export_dot",
    "export_json",
    "group_similar_rules",
    "hatefulness",
    "inter_agreement",
    "intra_agreement",
    "load_corpus",
    "load_term_list",
    "merge_term_lists",
    "mine_ordered_rules",
    "mine_rules",
    "mine_unordered_rules",
    "normalize_text",
    "occurring_terms",
    "offensiveness",
    "outer_join",
    "porter_stem",
    "rank_lists",
    "relativeness",
    "severe_list",
    "stable_rules",
    "summary_n_hate_terms",
    "term_class_stats",
    "top_terms",
]
