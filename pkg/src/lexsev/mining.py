"""Sequence databases and co-occurrence rule mining with cross-database stability.

A corpus is reduced to a sequence database: each line of the selected classes
becomes the ordered sequence of lexicon terms it contains (multi-word terms
collapse to one underscore-joined token). Rules X -> Y over term sets are then
mined in two modes:

- unordered: a sequence supports the rule when it contains every term of
  X and Y; confidence = support / count of sequences containing X.
- ordered: a sequence supports the rule when every term of Y still occurs
  strictly after the position where X completes (the latest first-occurrence
  over X); the confidence denominator is either the count of sequences where
  X completes before the final token (``antecedent_qualified``) or the plain
  containment count (``item_support``).

Mining the same rule space over several databases yields stability: a rule
qualifies in a database when its support and confidence there clear the
floors, and rules qualifying in at least ``min_stability`` databases are
stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from . import kernels
from .corpus import ClassLabel, LabeledCorpus, TermList
from .matching import matcher_for

DENOMINATOR_MODES = ("antecedent_qualified", "item_support")

SupportFloor = Union[int, float, Fraction]


class MiningError(Exception):
    """Raised for unsatisfiable mining parameters."""


class EntityList(TermList):
    """Contextual keywords (named entities) merged into the mining lexicon."""


@dataclass(frozen=True)
class SequenceDatabase:
    """Ordered token sequences reduced from corpus lines.

    Empty sequences are dropped at construction; tokens must be non-empty
    and whitespace-free so the text serialization stays unambiguous.
    """

    name: str
    sequences: tuple = ()

    def __post_init__(self):
        cleaned = []
        for seq in self.sequences:
            seq = tuple(seq)
            if not seq:
                continue
            for token in seq:
                if not token or token.split() != [token]:
                    raise ValueError(
                        f"database {self.name!r}: bad token {token!r}")
            cleaned.append(seq)
        object.__setattr__(self, "sequences", tuple(cleaned))

    def __len__(self):
        return len(self.sequences)

    def __iter__(self):
        return iter(self.sequences)

    @property
    def lexicon(self) -> frozenset:
        return frozenset(t for seq in self.sequences for t in seq)

    def to_text(self) -> str:
        """One sequence per line, tokens space-separated."""
        lines = [f"# sequence database {self.name}",
                 "# one sequence per line; tokens separated by single spaces"]
        lines.extend(" ".join(seq) for seq in self.sequences)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, name: str, text: str) -> "SequenceDatabase":
        rows = [line.split() for line in text.splitlines()
                if line.strip() and not line.lstrip().startswith("#")]
        return cls(name=name, sequences=tuple(tuple(r) for r in rows))


def merge_term_lists(*lists: Optional[TermList]) -> TermList:
    """Union of term lists as one list; the first occurrence of a term wins."""
    entries = []
    seen = set()
    names = []
    for tlist in lists:
        if tlist is None:
            continue
        names.append(tlist.name)
        for term in tlist.entries:
            if term.tokens not in seen:
                seen.add(term.tokens)
                entries.append(term)
    if not names:
        raise ValueError("no term lists given")
    return TermList(name="+".join(names), entries=tuple(entries))


def build_rep_database(corpus: LabeledCorpus, inter_list: TermList,
                       entities: Optional[TermList] = None,
                       classes: Optional[Iterable[ClassLabel]] = None,
                       name: Optional[str] = None) -> SequenceDatabase:
    """Reduce the selected classes of a corpus to lexicon-term sequences.

    Each kept line becomes the ordered sequence of its term matches (longest
    match first, left to right); multi-word terms collapse to a single
    underscore-joined token. Lines without any match are dropped.
    """
    if classes is None:
        classes = (ClassLabel.HATE, ClassLabel.RELATIVE_HATE)
    wanted = frozenset(classes)
    lexicon = merge_term_lists(inter_list, entities)
    matches = matcher_for(lexicon).match_corpus(corpus)
    entries = lexicon.entries
    pat_idx = matches.pat_idx.tolist()
    rows = matches.matched_rows()
    sequences = []
    for row, line in enumerate(corpus.lines):
        if line.label not in wanted:
            continue
        positions = rows.get(row)
        if not positions:
            continue
        sequences.append(tuple(entries[pat_idx[p]].joined for p in positions))
    if name is None:
        name = f"{corpus.name}.{inter_list.name}"
    return SequenceDatabase(name=name, sequences=tuple(sequences))


@dataclass(frozen=True)
class HateRule:
    """A mined rule: antecedent term set -> consequent term set.

    ``antecedent_count`` is the confidence denominator for the mode the rule
    was mined under (containment count, or the ordered qualifying count).
    """

    antecedent: tuple
    consequent: tuple
    support: int
    antecedent_count: int

    def __post_init__(self):
        ant = tuple(sorted(set(self.antecedent)))
        cons = tuple(sorted(set(self.consequent)))
        if not ant or not cons:
            raise ValueError("rule sides must be non-empty")
        if set(ant) & set(cons):
            raise ValueError("rule sides must be disjoint")
        if self.antecedent_count < 1:
            raise ValueError("rule denominator must be positive")
        if not 0 <= self.support <= self.antecedent_count:
            raise ValueError("rule support exceeds its denominator")
        object.__setattr__(self, "antecedent", ant)
        object.__setattr__(self, "consequent", cons)

    @property
    def confidence(self) -> Fraction:
        return Fraction(self.support, self.antecedent_count)

    @property
    def key(self) -> tuple:
        return (self.antecedent, self.consequent)

    @property
    def name(self) -> str:
        return f"[{' '.join(self.antecedent)}] -> [{' '.join(self.consequent)}]"


def _support_floor(min_support: SupportFloor, db_size: int) -> int:
    # int = absolute count; a fraction in (0, 1] is relative to the db size
    if isinstance(min_support, bool):
        raise ValueError("min_support must be a count or a fraction")
    if isinstance(min_support, int):
        if min_support < 1:
            raise ValueError("min_support must be at least 1")
        return min_support
    rel = Fraction(str(min_support)) if isinstance(min_support, float) \
        else Fraction(min_support)
    if not 0 < rel <= 1:
        raise ValueError("relative min_support must be in (0, 1]")
    return max(1, math.ceil(rel * db_size))


def _confidence_floor(min_confidence) -> Fraction:
    floor = Fraction(str(min_confidence)) if isinstance(min_confidence, float) \
        else Fraction(min_confidence)
    if not 0 <= floor <= 1:
        raise ValueError("min_confidence must be in [0, 1]")
    return floor


class _DbIndex:
    """Flat-array occurrence index of one database for the counting kernels."""

    def __init__(self, db: SequenceDatabase):
        self.tokens = sorted(db.lexicon)
        self.vocab = {t: i for i, t in enumerate(self.tokens)}
        self.size = len(db.sequences)

        item_off = [0]
        items: list = []
        firsts: list = []
        lasts: list = []
        seq_len: list = []
        containing: list = [[] for _ in self.tokens]
        for s, seq in enumerate(db.sequences):
            first: dict = {}
            last: dict = {}
            for pos, token in enumerate(seq):
                tid = self.vocab[token]
                if tid not in first:
                    first[tid] = pos
                last[tid] = pos
            for tid in sorted(first):
                items.append(tid)
                firsts.append(first[tid])
                lasts.append(last[tid])
                containing[tid].append(s)
            item_off.append(len(items))
            seq_len.append(len(seq))
        self.item_off = np.asarray(item_off, dtype=np.int64)
        self.items = np.asarray(items, dtype=np.int32)
        self.firsts = np.asarray(firsts, dtype=np.int32)
        self.lasts = np.asarray(lasts, dtype=np.int32)
        self.seq_len = np.asarray(seq_len, dtype=np.int32)
        self.tidsets = [np.asarray(c, dtype=np.int32) for c in containing]

    def tidset(self, item_ids) -> np.ndarray:
        """Sequence ids containing every item of the set."""
        out = None
        for i in item_ids:
            tids = self.tidsets[i]
            out = tids if out is None else \
                np.intersect1d(out, tids, assume_unique=True)
            if len(out) == 0:
                break
        return out

    def ordered_support(self, seq_sel: np.ndarray, ant, cons) -> int:
        return int(kernels.count_ordered(
            seq_sel, np.asarray(ant, dtype=np.int32),
            np.asarray(cons, dtype=np.int32),
            self.item_off, self.items, self.firsts, self.lasts))

    def qualified_count(self, seq_sel: np.ndarray, ant) -> int:
        return int(kernels.count_antecedent_qualified(
            seq_sel, np.asarray(ant, dtype=np.int32),
            self.item_off, self.items, self.firsts, self.seq_len))


def _frequent_itemsets(index: _DbIndex, floor: int, max_size: int) -> dict:
    """All itemsets with containment support >= floor, as id tuple -> tidset."""
    out: dict = {}
    base = [(i, tids) for i, tids in enumerate(index.tidsets)
            if len(tids) >= floor]

    def extend(prefix, prefix_tids, start):
        for pos in range(start, len(base)):
            item, tids = base[pos]
            joined = tids if prefix_tids is None else \
                np.intersect1d(prefix_tids, tids, assume_unique=True)
            if len(joined) < floor:
                continue
            itemset = prefix + (item,)
            out[itemset] = joined
            if len(itemset) < max_size:
                extend(itemset, joined, pos + 1)

    extend((), None, 0)
    return out


def _partitions(itemset, max_antecedent, max_consequent):
    for size in range(1, len(itemset)):
        if size > max_antecedent or len(itemset) - size > max_consequent:
            continue
        for ant in combinations(itemset, size):
            chosen = set(ant)
            yield ant, tuple(i for i in itemset if i not in chosen)


def mine_unordered_rules(db: SequenceDatabase, min_support: SupportFloor,
                         min_confidence, *, max_antecedent: int = 4,
                         max_consequent: int = 4) -> tuple:
    """All rules X -> Y passing the floors, with containment semantics."""
    index = _DbIndex(db)
    floor = _support_floor(min_support, index.size)
    conf_floor = _confidence_floor(min_confidence)
    frequent = _frequent_itemsets(index, floor,
                                  max_antecedent + max_consequent)
    rules = []
    for itemset, tids in frequent.items():
        if len(itemset) < 2:
            continue
        support = len(tids)
        for ant, cons in _partitions(itemset, max_antecedent, max_consequent):
            denom = len(frequent[ant])  # subsets of frequent are frequent
            if Fraction(support, denom) < conf_floor:
                continue
            rules.append(HateRule(
                antecedent=tuple(index.tokens[i] for i in ant),
                consequent=tuple(index.tokens[i] for i in cons),
                support=support, antecedent_count=denom))
    return tuple(sorted(rules, key=lambda r: r.key))


def mine_ordered_rules(db: SequenceDatabase, min_support: SupportFloor,
                       min_confidence, *,
                       denominator: str = "antecedent_qualified",
                       max_antecedent: int = 4,
                       max_consequent: int = 4) -> tuple:
    """All rules X -> Y passing the floors, with X-before-Y semantics."""
    if denominator not in DENOMINATOR_MODES:
        raise ValueError(f"unknown denominator mode: {denominator!r}")
    index = _DbIndex(db)
    floor = _support_floor(min_support, index.size)
    conf_floor = _confidence_floor(min_confidence)
    frequent = _frequent_itemsets(index, floor,
                                  max_antecedent + max_consequent)
    denom_cache: dict = {}
    rules = []
    for itemset, tids in frequent.items():
        if len(itemset) < 2:
            continue
        for ant, cons in _partitions(itemset, max_antecedent, max_consequent):
            support = index.ordered_support(tids, ant, cons)
            if support < floor:
                continue
            denom = denom_cache.get(ant)
            if denom is None:
                if denominator == "antecedent_qualified":
                    denom = index.qualified_count(frequent[ant], ant)
                else:
                    denom = len(frequent[ant])
                denom_cache[ant] = denom
            if Fraction(support, denom) < conf_floor:
                continue
            rules.append(HateRule(
                antecedent=tuple(index.tokens[i] for i in ant),
                consequent=tuple(index.tokens[i] for i in cons),
                support=support, antecedent_count=denom))
    return tuple(sorted(rules, key=lambda r: r.key))


def mine_rules(db: SequenceDatabase, min_support: SupportFloor,
               min_confidence, *, mode: str = "ordered",
               denominator: str = "antecedent_qualified",
               max_antecedent: int = 4, max_consequent: int = 4) -> tuple:
    """Mode dispatch used by the stability join and the command layer."""
    if mode == "ordered":
        return mine_ordered_rules(
            db, min_support, min_confidence, denominator=denominator,
            max_antecedent=max_antecedent, max_consequent=max_consequent)
    if mode == "unordered":
        return mine_unordered_rules(
            db, min_support, min_confidence,
            max_antecedent=max_antecedent, max_consequent=max_consequent)
    raise ValueError(f"unknown mining mode: {mode!r}")


@dataclass(frozen=True)
class RuleCell:
    """One database's view of a rule in the stability join."""

    support: int
    confidence: Fraction
    qualified: bool


@dataclass(frozen=True)
class StableHateRule:
    """A rule joined across databases with its qualification count."""

    antecedent: tuple
    consequent: tuple
    cells: Mapping[str, RuleCell]  # db name -> cell; absent = never occurs
    stability: int

    @property
    def key(self) -> tuple:
        return (self.antecedent, self.consequent)

    @property
    def name(self) -> str:
        return f"[{' '.join(self.antecedent)}] -> [{' '.join(self.consequent)}]"

    def best_cell(self) -> RuleCell:
        """The strongest cell: qualified beats unqualified, then higher
        confidence, then higher support; database order breaks ties."""
        if not self.cells:
            raise ValueError(f"rule {self.name} has no cells")
        best = None
        for cell in self.cells.values():
            if best is None:
                best = cell
                continue
            if ((cell.qualified, cell.confidence, cell.support)
                    > (best.qualified, best.confidence, best.support)):
                best = cell
        return best

    def as_rule(self) -> "HateRule":
        """Collapse to a single-database rule carried by the best cell."""
        cell = self.best_cell()
        # confidence is support/denominator in lowest terms, so the
        # denominator divides out exactly
        denominator = int(cell.support / cell.confidence)
        return HateRule(antecedent=self.antecedent,
                        consequent=self.consequent,
                        support=cell.support,
                        antecedent_count=denominator)


@dataclass(frozen=True)
class StableRuleJoin:
    """Outer join of mined rules over several databases."""

    db_names: tuple
    records: tuple  # StableHateRule, sorted by rule key
    min_stability: int

    @property
    def stable(self) -> tuple:
        return tuple(r for r in self.records
                     if r.stability >= self.min_stability)


def _rule_stats(index: _DbIndex, antecedent, consequent, mode: str,
                denominator: str):
    """(support, confidence) of one rule in one database; None when absent."""
    try:
        ant = tuple(index.vocab[t] for t in antecedent)
        cons = tuple(index.vocab[t] for t in consequent)
    except KeyError:
        return None
    both = index.tidset(ant + cons)
    if len(both) == 0:
        return None
    if mode == "unordered":
        support = len(both)
        denom = len(index.tidset(ant))
    else:
        support = index.ordered_support(both, ant, cons)
        if support == 0:
            return None
        if denominator == "antecedent_qualified":
            denom = index.qualified_count(index.tidset(ant), ant)
        else:
            denom = len(index.tidset(ant))
    return support, Fraction(support, denom)


def stable_rules(dbs: Sequence[SequenceDatabase], min_support: SupportFloor,
                 min_confidence, min_stability: int, *, mode: str = "ordered",
                 denominator: str = "antecedent_qualified",
                 max_antecedent: int = 4, max_consequent: int = 4,
                 per_db_rules: "Sequence[Sequence[HateRule]] | None" = None,
                 ) -> StableRuleJoin:
    """Mine every database, join rules by identity, and count stability.

    A cell is recorded wherever the rule occurs at all; it is qualified when
    its support and confidence in that database clear the floors. Stability
    is the number of qualifying databases. Callers that already mined each
    database (with the same thresholds and mode) can pass the results as
    per_db_rules to skip the redundant mining pass.
    """
    dbs = list(dbs)
    if not dbs:
        raise MiningError("no databases to mine")
    names = [db.name for db in dbs]
    if len(set(names)) != len(names):
        raise MiningError(f"duplicate database names: {names}")
    if min_stability < 1:
        raise ValueError("min_stability must be at least 1")
    if min_stability > len(dbs):
        raise MiningError(
            f"min_stability {min_stability} exceeds the {len(dbs)} databases")
    conf_floor = _confidence_floor(min_confidence)

    if per_db_rules is None:
        per_db_rules = [mine_rules(db, min_support, min_confidence, mode=mode,
                                   denominator=denominator,
                                   max_antecedent=max_antecedent,
                                   max_consequent=max_consequent)
                        for db in dbs]
    elif len(per_db_rules) != len(dbs):
        raise ValueError("per_db_rules must align with dbs")

    indexes = [_DbIndex(db) for db in dbs]
    floors = [_support_floor(min_support, ix.size) for ix in indexes]
    keys = []
    seen = set()
    for rules in per_db_rules:
        for rule in rules:
            if rule.key not in seen:
                seen.add(rule.key)
                keys.append(rule.key)

    records = []
    for ant, cons in sorted(keys):
        cells = {}
        stability = 0
        for name, index, floor in zip(names, indexes, floors):
            stats = _rule_stats(index, ant, cons, mode, denominator)
            if stats is None:
                continue
            support, confidence = stats
            qualified = support >= floor and confidence >= conf_floor
            stability += qualified
            cells[name] = RuleCell(support=support, confidence=confidence,
                                   qualified=qualified)
        records.append(StableHateRule(antecedent=ant, consequent=cons,
                                      cells=cells, stability=stability))
    return StableRuleJoin(db_names=tuple(names), records=tuple(records),
                          min_stability=min_stability)
