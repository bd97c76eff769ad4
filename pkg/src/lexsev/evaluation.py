"""Term-list evaluation with a percentage-normalized confusion matrix.

A list classifies a line as positive when at least one of its terms occurs
in the line. Against a binary task (positive vs negative class sets) the
four confusion cells are percentages of each side's own lines, which makes
the matrix invariant to class imbalance: duplicating every negative line
k times changes no cell. Cells are exact rationals internally; rendering
rounds to 3 decimals.

Six binary tasks cover the class pairings of a three-class corpus; corpora
missing a class keep only the tasks whose referenced classes are all
populated.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .agreement import MetricCase, inter_agreement, severe_list
from .corpus import ClassLabel, LabeledCorpus, TermList
from .matching import matcher_for

__all__ = [
    "ALL_TASKS",
    "BinaryTask",
    "EvalReport",
    "EvaluationError",
    "PercentConfusionMatrix",
    "SweepRow",
    "accuracy",
    "confusion",
    "enumerate_tasks",
    "evaluate",
    "f_measure",
    "precision",
    "rank_lists",
    "recall",
    "sweep_min_offense",
]


class EvaluationError(Exception):
    """Raised when a task cannot be scored against a corpus."""


def _side_name(labels) -> str:
    return "+".join(label.value for label in ClassLabel if label in labels)


@dataclass(frozen=True)
class BinaryTask:
    """One binary classification view of a three-class corpus."""

    positive: frozenset[ClassLabel]
    negative: frozenset[ClassLabel]

    def __post_init__(self):
        object.__setattr__(self, "positive", frozenset(self.positive))
        object.__setattr__(self, "negative", frozenset(self.negative))
        if not self.positive or not self.negative:
            raise ValueError("task sides must be non-empty")
        if self.positive & self.negative:
            raise ValueError("task sides must be disjoint")

    @property
    def name(self) -> str:
        return f"{_side_name(self.positive)} vs {_side_name(self.negative)}"

    @property
    def referenced(self) -> frozenset[ClassLabel]:
        return self.positive | self.negative


_H, _R, _N = ClassLabel.HATE, ClassLabel.RELATIVE_HATE, ClassLabel.NO_HATE

ALL_TASKS: tuple[BinaryTask, ...] = (
    BinaryTask(frozenset({_H}), frozenset({_N})),
    BinaryTask(frozenset({_H}), frozenset({_R})),
    BinaryTask(frozenset({_H}), frozenset({_R, _N})),
    BinaryTask(frozenset({_H, _R}), frozenset({_N})),
    BinaryTask(frozenset({_R}), frozenset({_N})),
    BinaryTask(frozenset({_N}), frozenset({_H, _R})),
)


def enumerate_tasks(corpus: LabeledCorpus) -> list[BinaryTask]:
    """The canonical tasks whose referenced classes are all populated.

    A task dies with any empty referenced class, even when the union side
    would still have lines: a two-class corpus keeps exactly one task.
    """
    present = corpus.present_classes
    return [task for task in ALL_TASKS if task.referenced <= present]


@dataclass(frozen=True)
class PercentConfusionMatrix:
    """Confusion cells as percentages of each side's lines, kept exact via
    the raw counts; tp + fn = 100 and fp + tn = 100 hold exactly."""

    positive_matched: int
    positive_total: int
    negative_matched: int
    negative_total: int

    @property
    def tp(self) -> Fraction:
        return Fraction(100 * self.positive_matched, self.positive_total)

    @property
    def fn(self) -> Fraction:
        return 100 - self.tp

    @property
    def fp(self) -> Fraction:
        return Fraction(100 * self.negative_matched, self.negative_total)

    @property
    def tn(self) -> Fraction:
        return 100 - self.fp


def confusion(corpus: LabeledCorpus, term_list: TermList,
              task: BinaryTask) -> PercentConfusionMatrix:
    """Match the list against both task sides; lines outside the task's
    classes are ignored."""
    pos_total = sum(corpus.class_size(label) for label in task.positive)
    neg_total = sum(corpus.class_size(label) for label in task.negative)
    if pos_total == 0 or neg_total == 0:
        raise EvaluationError(
            f"empty task side for {task.name!r} in corpus {corpus.name!r}")
    matched = matcher_for(term_list).match_corpus(corpus).lines_with_match
    pos_hit = neg_hit = 0
    for row, line in enumerate(corpus.lines):
        if not matched[row]:
            continue
        if line.label in task.positive:
            pos_hit += 1
        elif line.label in task.negative:
            neg_hit += 1
    return PercentConfusionMatrix(pos_hit, pos_total, neg_hit, neg_total)


def precision(matrix: PercentConfusionMatrix) -> Fraction | None:
    denom = matrix.tp + matrix.fp
    return None if denom == 0 else matrix.tp / denom


def recall(matrix: PercentConfusionMatrix) -> Fraction:
    # tp + fn = 100 exactly, so recall reduces to tp/100
    return matrix.tp / 100


def accuracy(matrix: PercentConfusionMatrix) -> Fraction:
    return (matrix.tp + matrix.tn) / 200


def f_measure(p: Fraction | None, r: Fraction | None) -> Fraction | None:
    if p is None or r is None or p + r == 0:
        return None
    return 2 * p * r / (p + r)


@dataclass(frozen=True)
class EvalReport:
    list_name: str
    list_size: int
    task: BinaryTask
    matrix: PercentConfusionMatrix
    accuracy: Fraction
    precision: Fraction | None
    recall: Fraction
    f_measure: Fraction | None
    compute_time: float  # wall-clock seconds, informational


def evaluate(corpus: LabeledCorpus, term_list: TermList,
             task: BinaryTask) -> EvalReport:
    start = time.perf_counter()
    matrix = confusion(corpus, term_list, task)
    p = precision(matrix)
    r = recall(matrix)
    return EvalReport(
        list_name=term_list.name,
        list_size=len(term_list),
        task=task,
        matrix=matrix,
        accuracy=accuracy(matrix),
        precision=p,
        recall=r,
        f_measure=f_measure(p, r),
        compute_time=time.perf_counter() - start,
    )


def rank_lists(corpus: LabeledCorpus, lists: Sequence[TermList],
               task: BinaryTask) -> list[EvalReport]:
    """Evaluate every list and rank by F-measure descending; ties fall to
    higher precision, then smaller list, then name. Undefined sorts last."""
    reports = [evaluate(corpus, tl, task) for tl in lists]

    def key(report: EvalReport):
        f = report.f_measure
        p = report.precision
        return (f is None, -(f or 0), p is None, -(p or 0),
                report.list_size, report.list_name)

    return sorted(reports, key=key)


@dataclass(frozen=True)
class SweepRow:
    """One threshold step of a minOffense sweep; empty severe lists carry an
    error instead of a report."""

    threshold: Fraction
    list_name: str
    list_size: int
    report: EvalReport | None
    error: str | None = None


def sweep_min_offense(corpus: LabeledCorpus, lists: Sequence[TermList],
                      task: BinaryTask, case: MetricCase,
                      thresholds: Iterable[Union[float, Fraction]],
                      r_mode: str = "ratio_bounded",
                      o_mode: str = "harmonic") -> list[SweepRow]:
    """Generate and evaluate one severe list per threshold, ascending."""
    records = inter_agreement(corpus, lists, r_mode=r_mode, o_mode=o_mode)
    unique = sorted({t if isinstance(t, Fraction) else Fraction(str(t))
                     for t in thresholds})
    rows = []
    for threshold in unique:
        severe = severe_list(records, case, threshold)
        if len(severe) == 0:
            rows.append(SweepRow(threshold, severe.name, 0, None, "empty list"))
            continue
        try:
            rows.append(SweepRow(threshold, severe.name, len(severe),
                                 evaluate(corpus, severe, task)))
        except EvaluationError as exc:
            rows.append(SweepRow(threshold, severe.name, len(severe), None, str(exc)))
    return rows
