"""Per-term severity metrics over labeled corpora.

Three scores describe how strongly a term separates the positive (hateful)
classes from the NoHate class:

  Hatefulness    1 when the term appears in at least one positive-class line.
  Relativeness   default "ratio_bounded" mode: p / (p + n) over line counts,
                 where p = positive-class lines containing the term and
                 n = NoHate lines containing it; always in [0,1].
                 "prose" mode divides occurrence frequencies instead
                 (positive over the remaining classes) and is unbounded
                 above when the denominator side is empty.
  Offensiveness  harmonic (default) or geometric mean of the two.

A metric with an empty support is undefined, carried as None end to end and
rendered "NaN"; undefined terms are never admitted to a severe list.

Around the scores, the module builds the agreement artifacts: per-class
frequency statistics, class-wise outer joins, intra-agreement records (one
list against one corpus), inter-agreement records (the merged terms of many
lists with source-list membership), threshold-filtered severe lists, and the
per-class occurrence-count summary.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .corpus import (
    ClassLabel,
    LabeledCorpus,
    NormalizedTerm,
    TermList,
    TermListReport,
)
from .formatting import fmt3
from .matching import lines_by_term_count, matcher_for

__all__ = [
    "CaseSeverity",
    "InterAgreementRecord",
    "IntraAgreementRecord",
    "JoinedRow",
    "MetricCase",
    "MetricValue",
    "StatsTable",
    "SummaryNRow",
    "TermClassStats",
    "hatefulness",
    "inter_agreement",
    "intra_agreement",
    "occurring_terms",
    "offensiveness",
    "outer_join",
    "relativeness",
    "severe_list",
    "summary_n_hate_terms",
    "term_class_stats",
    "top_terms",
]

# a defined metric is exact (Fraction) except for irrational geometric means
# and the unbounded prose ratio; None marks undefined
MetricValue = Union[Fraction, float, None]


class MetricCase(enum.Enum):
    HATE_ONLY = "HateOnly"
    HATE_PLUS_RELATIVE = "HatePlusRelative"

    @property
    def positive_labels(self) -> tuple[ClassLabel, ...]:
        if self is MetricCase.HATE_ONLY:
            return (ClassLabel.HATE,)
        return (ClassLabel.HATE, ClassLabel.RELATIVE_HATE)

    @property
    def display(self) -> str:
        """Label used in severe-list names."""
        return "Hate" if self is MetricCase.HATE_ONLY else "Hate+Relative"

    @classmethod
    def parse(cls, text: str) -> "MetricCase":
        key = str(text).lower()
        for ch in "-_+ ":
            key = key.replace(ch, "")
        if key in ("hate", "hateonly"):
            return cls.HATE_ONLY
        if key in ("hateplusrelative", "haterelative", "hateandrelative", "hateplusrelativehate"):
            return cls.HATE_PLUS_RELATIVE
        raise ValueError(f"unknown metric case: {text!r}")


@dataclass(frozen=True)
class TermClassStats:
    """Occurrence statistics of one term in one corpus, split by class."""

    term: NormalizedTerm
    freq: Mapping[ClassLabel, int]        # occurrence count per class
    line_count: Mapping[ClassLabel, int]  # lines containing the term per class
    class_sizes: Mapping[ClassLabel, int]

    @property
    def total_freq(self) -> int:
        return sum(self.freq.values())

    def percent_lines(self, label: ClassLabel) -> Fraction | None:
        """100 * line_count / class size; None for an empty class."""
        size = self.class_sizes.get(label, 0)
        if size == 0:
            return None
        return Fraction(100 * self.line_count.get(label, 0), size)

    def positive_lines(self, case: MetricCase) -> int:
        return sum(self.line_count.get(l, 0) for l in case.positive_labels)

    def positive_freq(self, case: MetricCase) -> int:
        return sum(self.freq.get(l, 0) for l in case.positive_labels)


@dataclass(frozen=True)
class StatsTable:
    """Per-term class statistics; terms without any occurrence are kept
    aside in `absent` rather than reported as all-zero rows."""

    records: tuple[TermClassStats, ...]
    absent: tuple[NormalizedTerm, ...]

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)


def term_class_stats(corpus: LabeledCorpus, term_list: TermList) -> StatsTable:
    """Frequency and line-count statistics for every occurring list term."""
    matches = matcher_for(term_list).match_corpus(corpus)
    sizes = dict(corpus.class_sizes)
    freq_by = {label: matches.term_freq(label) for label in ClassLabel}
    lines_by = {label: matches.term_line_counts(label) for label in ClassLabel}
    records: list[TermClassStats] = []
    absent: list[NormalizedTerm] = []
    for idx, term in enumerate(term_list.entries):
        freq = {label: freq_by[label].get(idx, 0) for label in ClassLabel}
        if sum(freq.values()) == 0:
            absent.append(term)
            continue
        lines = {label: lines_by[label].get(idx, 0) for label in ClassLabel}
        records.append(TermClassStats(term=term, freq=freq, line_count=lines,
                                      class_sizes=sizes))
    return StatsTable(records=tuple(records), absent=tuple(absent))


def _zero_stats(term: NormalizedTerm, sizes: Mapping[ClassLabel, int]) -> TermClassStats:
    zero = {label: 0 for label in ClassLabel}
    return TermClassStats(term=term, freq=zero, line_count=zero, class_sizes=sizes)


def top_terms(stats: Iterable[TermClassStats], label: ClassLabel,
              k: int) -> list[tuple[NormalizedTerm, int]]:
    """The k most frequent terms in one class, frequency-descending, ties
    broken lexicographically on the normalized term."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    ranked = [(rec.term, rec.freq.get(label, 0)) for rec in stats
              if rec.freq.get(label, 0) > 0]
    ranked.sort(key=lambda tf: (-tf[1], tf[0].text))
    return ranked[:k]


@dataclass(frozen=True)
class JoinedRow:
    """One outer-join row: a class missing from `cells` means the term never
    occurs there (rendered "--", not 0)."""

    term: NormalizedTerm
    cells: Mapping[ClassLabel, Union[int, Fraction]]


def outer_join(stats: Iterable[TermClassStats], value: str = "freq") -> list[JoinedRow]:
    """Term-by-class table of frequencies or line percentages."""
    if value not in ("freq", "percent_lines"):
        raise ValueError(f"unknown join value: {value!r}")
    rows = []
    for rec in stats:
        cells: dict[ClassLabel, Union[int, Fraction]] = {}
        for label in ClassLabel:
            if rec.freq.get(label, 0) > 0:
                cells[label] = (rec.freq[label] if value == "freq"
                                else rec.percent_lines(label))
        rows.append(JoinedRow(term=rec.term, cells=cells))
    return rows


# --- the three metrics ----------------------------------------------------


def hatefulness(stats: TermClassStats, case: MetricCase) -> int:
    """1 iff the term occurs in at least one positive-class line."""
    return 1 if stats.positive_lines(case) > 0 else 0


def relativeness(stats: TermClassStats, case: MetricCase,
                 mode: str = "ratio_bounded") -> MetricValue:
    """How exclusively the term's appearances are positive.

    ratio_bounded: positive / (positive + NoHate) over line counts; None
    when the term occurs on neither side. prose: occurrence-frequency ratio
    of the positive classes over the remaining classes; math.inf when only
    the numerator side is populated, None when neither is.
    """
    if mode == "ratio_bounded":
        p = stats.positive_lines(case)
        n = stats.line_count.get(ClassLabel.NO_HATE, 0)
        if p + n == 0:
            return None
        return Fraction(p, p + n)
    if mode == "prose":
        if case is MetricCase.HATE_ONLY:
            num = stats.freq.get(ClassLabel.HATE, 0)
            den = (stats.freq.get(ClassLabel.RELATIVE_HATE, 0)
                   + stats.freq.get(ClassLabel.NO_HATE, 0))
        else:
            num = (stats.freq.get(ClassLabel.HATE, 0)
                   + stats.freq.get(ClassLabel.RELATIVE_HATE, 0))
            den = stats.freq.get(ClassLabel.NO_HATE, 0)
        if den == 0:
            return math.inf if num > 0 else None
        return Fraction(num, den)
    raise ValueError(f"unknown relativeness mode: {mode!r}")


def offensiveness(h: int, r: MetricValue, mean: str = "harmonic") -> MetricValue:
    """Combine hatefulness and relativeness into one severity score.

    harmonic: 2hr/(h+r), undefined when r is undefined or h+r=0. geometric:
    sqrt(h*r), undefined only when r is undefined. An infinite r (prose
    mode) takes the limit value.
    """
    if mean not in ("harmonic", "geometric"):
        raise ValueError(f"unknown offensiveness mean: {mean!r}")
    if r is None:
        return None
    if mean == "harmonic":
        if isinstance(r, float) and math.isinf(r):
            return Fraction(2 * h)
        if h + r == 0:
            return None
        return Fraction(2 * h) * r / (h + r)
    if h == 0:
        return 0.0
    if isinstance(r, float) and math.isinf(r):
        return math.inf
    return math.sqrt(h * float(r))


@dataclass(frozen=True)
class CaseSeverity:
    """The three metrics of one term for one case, with the line counts
    behind them."""

    case: MetricCase
    hatefulness: int
    relativeness: MetricValue
    offensiveness: MetricValue
    positive_lines: int
    negative_lines: int


def case_severity(stats: TermClassStats, case: MetricCase,
                  r_mode: str = "ratio_bounded",
                  o_mode: str = "harmonic") -> CaseSeverity:
    h = hatefulness(stats, case)
    r = relativeness(stats, case, r_mode)
    return CaseSeverity(
        case=case,
        hatefulness=h,
        relativeness=r,
        offensiveness=offensiveness(h, r, o_mode),
        positive_lines=stats.positive_lines(case),
        negative_lines=stats.line_count.get(ClassLabel.NO_HATE, 0),
    )


@dataclass(frozen=True)
class IntraAgreementRecord:
    """One list term against one corpus, both metric cases populated."""

    term: NormalizedTerm
    cases: tuple[CaseSeverity, ...]
    class_sizes: Mapping[ClassLabel, int]

    def for_case(self, case: MetricCase) -> CaseSeverity:
        for cs in self.cases:
            if cs.case is case:
                return cs
        raise KeyError(case)


@dataclass(frozen=True)
class InterAgreementRecord(IntraAgreementRecord):
    """An intra-agreement record plus the names of the source lists that
    contain the term."""

    membership: tuple[str, ...] = ()


def intra_agreement(corpus: LabeledCorpus, term_list: TermList,
                    r_mode: str = "ratio_bounded",
                    o_mode: str = "harmonic") -> list[IntraAgreementRecord]:
    """Severity of every occurring list term against the corpus."""
    table = term_class_stats(corpus, term_list)
    return [IntraAgreementRecord(
                term=rec.term,
                cases=tuple(case_severity(rec, case, r_mode, o_mode)
                            for case in MetricCase),
                class_sizes=rec.class_sizes)
            for rec in table]


def inter_agreement(corpus: LabeledCorpus, lists: Sequence[TermList],
                    r_mode: str = "ratio_bounded",
                    o_mode: str = "harmonic") -> list[InterAgreementRecord]:
    """Severity of the merged terms of all lists against the corpus.

    Terms identical after normalization collapse into one record whose
    membership names every source list containing them; terms absent from
    the corpus keep undefined metrics.
    """
    if not lists:
        raise ValueError("inter_agreement needs at least one term list")
    union_terms: list[NormalizedTerm] = []
    membership: dict[tuple[str, ...], list[str]] = {}
    for tl in lists:
        for term in tl.entries:
            if term.tokens not in membership:
                membership[term.tokens] = []
                union_terms.append(term)
            if tl.name not in membership[term.tokens]:
                membership[term.tokens].append(tl.name)
    union = TermList(name="+".join(tl.name for tl in lists),
                     entries=tuple(union_terms))
    table = term_class_stats(corpus, union)
    by_tokens = {rec.term.tokens: rec for rec in table.records}
    sizes = dict(corpus.class_sizes)
    out = []
    for term in union_terms:
        rec = by_tokens.get(term.tokens)
        if rec is None:
            rec = _zero_stats(term, sizes)
        out.append(InterAgreementRecord(
            term=term,
            cases=tuple(case_severity(rec, case, r_mode, o_mode)
                        for case in MetricCase),
            class_sizes=sizes,
            membership=tuple(sorted(membership[term.tokens]))))
    return out


def severe_list(records: Iterable[IntraAgreementRecord], case: MetricCase,
                min_offense, name: str | None = None) -> TermList:
    """Terms whose offensiveness is defined and strictly above min_offense,
    most severe first. The default name encodes case and threshold, e.g.
    "Offensiveness(Hate)(0.7)"."""
    threshold = min_offense if isinstance(min_offense, Fraction) else Fraction(str(min_offense))
    records = list(records)
    kept = []
    for rec in records:
        sev = rec.for_case(case)
        if sev.offensiveness is not None and sev.offensiveness > threshold:
            kept.append((sev.offensiveness, rec.term))
    kept.sort(key=lambda ot: (-ot[0], ot[1].text))
    if name is None:
        name = f"Offensiveness({case.display})({fmt3(threshold)})"
    report = TermListReport(source=name, read=len(records), kept=len(kept))
    return TermList(name=name, entries=tuple(term for _, term in kept), report=report)


@dataclass(frozen=True)
class SummaryNRow:
    """Lines of one corpus class containing exactly n term occurrences."""

    corpus: str
    class_label: ClassLabel
    list_name: str
    n: int
    line_count: int
    total_lines: int

    @property
    def percent(self) -> Fraction:
        return Fraction(100 * self.line_count, self.total_lines)


def summary_n_hate_terms(corpora: Sequence[LabeledCorpus],
                         lists: Sequence[TermList]) -> list[SummaryNRow]:
    """For every (corpus class, list): how many lines contain exactly N term
    occurrences, for each observed N (including N=0)."""
    rows = []
    for corpus in corpora:
        for label in ClassLabel:
            total = corpus.class_size(label)
            if total == 0:
                continue
            for tl in lists:
                hist = lines_by_term_count(corpus, tl, label)
                for n, (count, _ids) in hist.items():
                    rows.append(SummaryNRow(corpus=corpus.name, class_label=label,
                                            list_name=tl.name, n=n,
                                            line_count=count, total_lines=total))
    return rows


def occurring_terms(term_list: TermList, corpus: LabeledCorpus) -> TermList:
    """The sub-list of terms occurring at least once in the corpus."""
    table = term_class_stats(corpus, term_list)
    entries = tuple(rec.term for rec in table.records)
    report = TermListReport(source=f"{term_list.name} occurring in {corpus.name}",
                            read=len(term_list), kept=len(entries))
    return TermList(name=f"{term_list.name}@{corpus.name}", entries=entries,
                    report=report)
