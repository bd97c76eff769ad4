"""Multi-word term matching over normalized token streams.

Terms match as contiguous stemmed-token n-grams. Overlapping candidates are
resolved longest-match-first, leftmost-first: the scan consumes the longest
term starting at each position, so nested terms ("tr*sh" inside "white
tr*sh") are never double-counted. Matching is deterministic and independent
of term-list entry order.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .corpus import ClassLabel, CorpusLine, LabeledCorpus, NormalizedTerm, TermList

__all__ = [
    "CorpusMatches",
    "Match",
    "MatchResult",
    "TermMatcher",
    "lines_by_term_count",
    "match_terms",
    "matcher_for",
]


@dataclass(frozen=True)
class Match:
    term: NormalizedTerm
    start: int
    length: int


@dataclass(frozen=True)
class MatchResult:
    line_id: int
    matches: tuple[Match, ...]


class TermMatcher:
    """Precompiled matcher for one term list.

    Token strings are interned to integer ids over the list's vocabulary;
    line tokens outside it encode to -1 and can never start or extend a
    match. Candidate terms are indexed by first token, longest first.
    """

    def __init__(self, term_list: TermList):
        self.term_list = term_list
        vocab: dict[str, int] = {}
        patterns: list[tuple[int, ...]] = []
        for term in term_list.entries:
            patterns.append(tuple(vocab.setdefault(tok, len(vocab)) for tok in term.tokens))
        self.vocab = vocab
        vocab_size = len(vocab)

        by_first: dict[int, list[int]] = {}
        for idx, pat in enumerate(patterns):
            by_first.setdefault(pat[0], []).append(idx)
        # longest first; ties broken on token text so entry order is irrelevant
        for cands in by_first.values():
            cands.sort(key=lambda i: (-len(patterns[i]), term_list.entries[i].tokens))

        cand_off = np.zeros(vocab_size + 1, dtype=np.int32)
        cand_pat: list[int] = []
        for first_id in range(vocab_size):
            cand_off[first_id] = len(cand_pat)
            cand_pat.extend(by_first.get(first_id, ()))
        cand_off[vocab_size] = len(cand_pat)
        self._cand_off = cand_off
        self._cand_pat = np.asarray(cand_pat, dtype=np.int32)

        pat_off = np.zeros(len(patterns) + 1, dtype=np.int32)
        pat_toks: list[int] = []
        for idx, pat in enumerate(patterns):
            pat_off[idx] = len(pat_toks)
            pat_toks.extend(pat)
        pat_off[len(patterns)] = len(pat_toks)
        self._pat_off = pat_off
        self._pat_toks = np.asarray(pat_toks, dtype=np.int32)

    def encode(self, tokens) -> np.ndarray:
        get = self.vocab.get
        return np.fromiter((get(t, -1) for t in tokens), dtype=np.int32, count=len(tokens))

    def _run(self, tokens: np.ndarray, line_off: np.ndarray):
        return kernels.match_many(tokens, line_off, self._cand_off, self._cand_pat,
                                  self._pat_off, self._pat_toks)

    def match_tokens(self, tokens) -> list[tuple[int, int, int]]:
        """All matches in one token sequence as (term_index, start, length)."""
        enc = self.encode(tokens)
        line_off = np.array([0, len(enc)], dtype=np.int64)
        _, pat_idx, start = self._run(enc, line_off)
        entries = self.term_list.entries
        return [(int(p), int(s), len(entries[int(p)].tokens))
                for p, s in zip(pat_idx, start)]

    def match_corpus(self, corpus: LabeledCorpus) -> "CorpusMatches":
        lengths = np.fromiter((len(ln.tokens) for ln in corpus.lines),
                              dtype=np.int64, count=len(corpus.lines))
        line_off = np.zeros(len(corpus.lines) + 1, dtype=np.int64)
        np.cumsum(lengths, out=line_off[1:])
        flat = np.empty(int(line_off[-1]), dtype=np.int32)
        get = self.vocab.get
        pos = 0
        for ln in corpus.lines:
            for t in ln.tokens:
                flat[pos] = get(t, -1)
                pos += 1
        line_rows, pat_idx, start = self._run(flat, line_off)
        return CorpusMatches(corpus, self, line_rows, pat_idx, start)


_matcher_cache: "weakref.WeakKeyDictionary[TermList, TermMatcher]" = weakref.WeakKeyDictionary()


def matcher_for(term_list: TermList) -> TermMatcher:
    matcher = _matcher_cache.get(term_list)
    if matcher is None:
        matcher = TermMatcher(term_list)
        _matcher_cache[term_list] = matcher
    return matcher


def match_terms(line: CorpusLine, term_list: TermList) -> MatchResult:
    """All non-overlapping term occurrences in one corpus line."""
    matcher = matcher_for(term_list)
    entries = term_list.entries
    matches = tuple(Match(term=entries[p], start=s, length=ln)
                    for p, s, ln in matcher.match_tokens(line.tokens))
    return MatchResult(line_id=line.id, matches=matches)


class CorpusMatches:
    """All matches of one term list against one corpus, with aggregates.

    Rows are indexes into corpus.lines (not line ids); matches are stored in
    scan order, so per-line slices are already ordered left to right.
    """

    def __init__(self, corpus: LabeledCorpus, matcher: TermMatcher,
                 line_rows: np.ndarray, pat_idx: np.ndarray, start: np.ndarray):
        self.corpus = corpus
        self.matcher = matcher
        self.term_list = matcher.term_list
        self.line_rows = line_rows
        self.pat_idx = pat_idx
        self.start = start

    def __len__(self):
        return len(self.line_rows)

    @cached_property
    def _label_per_row(self) -> np.ndarray:
        order = list(ClassLabel)
        index = {label: i for i, label in enumerate(order)}
        return np.fromiter((index[ln.label] for ln in self.corpus.lines),
                           dtype=np.int8, count=len(self.corpus.lines))

    @cached_property
    def occurrences_per_line(self) -> np.ndarray:
        """Match count per corpus line (row-indexed)."""
        return np.bincount(self.line_rows, minlength=len(self.corpus.lines)).astype(np.int64)

    def term_freq(self, label: ClassLabel) -> dict[int, int]:
        """term_index -> occurrence count within the class."""
        sel = self._label_per_row[self.line_rows] == list(ClassLabel).index(label)
        counts = np.bincount(self.pat_idx[sel], minlength=len(self.term_list.entries))
        return {i: int(c) for i, c in enumerate(counts) if c}

    def term_line_counts(self, label: ClassLabel) -> dict[int, int]:
        """term_index -> number of class lines containing the term."""
        sel = self._label_per_row[self.line_rows] == list(ClassLabel).index(label)
        if not sel.any():
            return {}
        n_terms = len(self.term_list.entries)
        keys = self.line_rows[sel].astype(np.int64) * n_terms + self.pat_idx[sel]
        uniq = np.unique(keys)
        counts = np.bincount((uniq % n_terms).astype(np.int64), minlength=n_terms)
        return {i: int(c) for i, c in enumerate(counts) if c}

    @cached_property
    def lines_with_match(self) -> np.ndarray:
        """Boolean mask per corpus line (row-indexed): contains >= 1 term."""
        return self.occurrences_per_line > 0

    def matched_rows(self) -> dict[int, list[int]]:
        """row -> ordered list of match positions into the flat match arrays."""
        rows: dict[int, list[int]] = {}
        for pos, row in enumerate(self.line_rows.tolist()):
            rows.setdefault(row, []).append(pos)
        return rows


def lines_by_term_count(corpus: LabeledCorpus, term_list: TermList,
                        label: ClassLabel) -> dict[int, tuple[int, tuple[int, ...]]]:
    """Partition a class's lines by their number of term occurrences.

    Returns {occurrence_count: (line count, line ids)} including the zero
    bucket; keys with no lines are simply absent (the observed counts may be
    a discontinuous series).
    """
    matches = matcher_for(term_list).match_corpus(corpus)
    per_line = matches.occurrences_per_line
    buckets: dict[int, list[int]] = {}
    for row, line in enumerate(corpus.lines):
        if line.label is label:
            buckets.setdefault(int(per_line[row]), []).append(line.id)
    return {n: (len(ids), tuple(ids)) for n, ids in sorted(buckets.items())}
