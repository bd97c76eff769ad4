"""Corpus and term-list ingestion.

Loads labeled corpora (delimited files or line-per-document with a sidecar
label file) and plain-text term lists, normalizing both through the same
pipeline so multi-word terms match as contiguous stemmed-token n-grams.
All loaded values are immutable after construction.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field

from .textnorm import NormalizationConfig, normalize_text, pre_stem_tokens

__all__ = [
    "ClassLabel",
    "ClassMap",
    "CorpusLine",
    "CorpusReport",
    "CorpusSchema",
    "IngestionError",
    "LabeledCorpus",
    "NormalizedTerm",
    "TermList",
    "TermListReport",
    "load_corpus",
    "load_term_list",
]


class IngestionError(Exception):
    """Raised for unreadable, malformed, or unmappable input files."""


class ClassLabel(enum.Enum):
    HATE = "Hate"
    RELATIVE_HATE = "RelativeHate"
    NO_HATE = "NoHate"

    @classmethod
    def parse(cls, text: str) -> "ClassLabel":
        key = text.replace("-", "").replace("_", "").replace(" ", "").lower()
        for label in cls:
            if label.value.lower() == key:
                return label
        raise ValueError(f"unknown class label: {text!r}")


@dataclass(frozen=True)
class ClassMap:
    """Total mapping from source-dataset label strings to canonical labels."""

    entries: dict[str, ClassLabel]

    @classmethod
    def parse(cls, raw: dict) -> "ClassMap":
        return cls({str(k): v if isinstance(v, ClassLabel) else ClassLabel.parse(str(v))
                    for k, v in raw.items()})

    def __getitem__(self, source_label: str) -> ClassLabel:
        return self.entries[source_label]

    def __contains__(self, source_label: str) -> bool:
        return source_label in self.entries


@dataclass(frozen=True)
class NormalizedTerm:
    """A lexicon entry: the raw surface plus its stemmed token sequence."""

    raw: str
    tokens: tuple[str, ...]

    @property
    def text(self) -> str:
        return " ".join(self.tokens)

    @property
    def joined(self) -> str:
        """Single-token form for sequence databases ('white tr*sh' -> 'white_tr*sh')."""
        return "_".join(self.tokens)


@dataclass
class TermListReport:
    source: str = ""
    read: int = 0
    kept: int = 0
    duplicates: list[tuple[str, str]] = field(default_factory=list)  # (dropped raw, kept raw)
    dropped: list[tuple[str, str]] = field(default_factory=list)     # (raw, reason)

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "read": self.read,
            "kept": self.kept,
            "duplicates": [{"dropped": d, "kept_as": k} for d, k in self.duplicates],
            "dropped": [{"entry": e, "reason": r} for e, r in self.dropped],
        }


# eq=False keeps identity hashing so compiled matchers can be cached per list
@dataclass(eq=False)
class TermList:
    name: str
    entries: tuple[NormalizedTerm, ...]
    report: TermListReport = field(default_factory=TermListReport, repr=False)

    def __post_init__(self):
        seen = set()
        for term in self.entries:
            if not term.tokens:
                raise ValueError(f"term list {self.name!r}: empty entry {term.raw!r}")
            if term.tokens in seen:
                raise ValueError(f"term list {self.name!r}: duplicate entry {term.text!r}")
            seen.add(term.tokens)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def token_tuples(self) -> frozenset[tuple[str, ...]]:
        return frozenset(t.tokens for t in self.entries)

    @classmethod
    def from_terms(cls, name: str, raw_terms, config: NormalizationConfig) -> "TermList":
        """Build a list from raw strings, normalizing and deduplicating."""
        report = TermListReport(source=name)
        entries: list[NormalizedTerm] = []
        first_for: dict[tuple[str, ...], str] = {}
        for raw in raw_terms:
            raw = raw.strip()
            if not raw:
                continue
            report.read += 1
            pre = pre_stem_tokens(raw, config)
            if pre and all(t in config.stopwords for t in pre):
                report.dropped.append((raw, "all stop-words"))
                continue
            tokens = tuple(normalize_text(raw, config))
            if not tokens:
                report.dropped.append((raw, "empty after normalization"))
                continue
            if tokens in first_for:
                report.duplicates.append((raw, first_for[tokens]))
                continue
            first_for[tokens] = raw
            entries.append(NormalizedTerm(raw=raw, tokens=tokens))
        report.kept = len(entries)
        return cls(name=name, entries=tuple(entries), report=report)


def load_term_list(path, name: str, config: NormalizationConfig) -> TermList:
    """Read a plain-text term list: one term per line, '#' comments, UTF-8."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw_lines = [line.rstrip("\n") for line in fh]
    except OSError as exc:
        raise IngestionError(f"cannot read term list {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise IngestionError(f"term list {path} is not valid UTF-8: {exc}") from exc
    terms = [line for line in raw_lines if line.strip() and not line.lstrip().startswith("#")]
    tlist = TermList.from_terms(name, terms, config)
    tlist.report.source = str(path)
    if not tlist.entries:
        raise IngestionError(f"empty term list: {path} has no entries after normalization")
    return tlist


@dataclass(frozen=True)
class CorpusLine:
    id: int
    raw: str
    tokens: tuple[str, ...]
    label: ClassLabel


@dataclass
class CorpusReport:
    source: str = ""
    lines: int = 0
    class_counts: dict = field(default_factory=dict)  # ClassLabel -> int

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "lines": self.lines,
            "class_counts": {label.value: n for label, n in sorted(
                self.class_counts.items(), key=lambda kv: kv[0].value)},
        }


@dataclass
class LabeledCorpus:
    name: str
    lines: tuple[CorpusLine, ...]
    report: CorpusReport = field(default_factory=CorpusReport, repr=False)

    def __len__(self):
        return len(self.lines)

    def lines_for(self, label: ClassLabel) -> list[CorpusLine]:
        return [ln for ln in self.lines if ln.label == label]

    def class_size(self, label: ClassLabel) -> int:
        return sum(1 for ln in self.lines if ln.label == label)

    @property
    def class_sizes(self) -> dict[ClassLabel, int]:
        sizes = {label: 0 for label in ClassLabel}
        for ln in self.lines:
            sizes[ln.label] += 1
        return sizes

    @property
    def present_classes(self) -> set[ClassLabel]:
        return {ln.label for ln in self.lines}

    @classmethod
    def from_records(cls, name: str, records, class_map: ClassMap,
                     config: NormalizationConfig, source: str = "") -> "LabeledCorpus":
        """records: iterable of (raw_text, source_label) pairs."""
        lines = []
        counts: dict[ClassLabel, int] = {}
        unmapped: list[str] = []
        for i, (text, source_label) in enumerate(records):
            source_label = str(source_label).strip()
            if source_label not in class_map:
                if source_label not in unmapped:
                    unmapped.append(source_label)
                continue
            label = class_map[source_label]
            tokens = tuple(normalize_text(text, config))
            lines.append(CorpusLine(id=i, raw=text, tokens=tokens, label=label))
            counts[label] = counts.get(label, 0) + 1
        if unmapped:
            raise IngestionError(
                f"corpus {name!r}: unmapped label(s) {', '.join(repr(u) for u in unmapped)}")
        if not lines:
            raise IngestionError(f"corpus {name!r}: zero lines")
        report = CorpusReport(source=source, lines=len(lines), class_counts=counts)
        return cls(name=name, lines=tuple(lines), report=report)


@dataclass(frozen=True)
class CorpusSchema:
    """How to read a corpus file.

    kind "delimited": a CSV-style file with named (or numbered, when there is
    no header) text and label columns. kind "lines": one document per line,
    labels in a sidecar file with one label per line.
    """

    kind: str = "delimited"
    text_column: str | int = "text"
    label_column: str | int = "label"
    delimiter: str = ","
    quotechar: str = '"'
    has_header: bool = True
    label_path: str | None = None  # for kind="lines"

    def __post_init__(self):
        if self.kind not in ("delimited", "lines"):
            raise ValueError(f"unknown corpus schema kind: {self.kind!r}")
        if self.kind == "lines" and not self.label_path:
            raise ValueError("schema kind 'lines' requires label_path")


def _read_delimited(path, schema: CorpusSchema):
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter=schema.delimiter, quotechar=schema.quotechar)
        rows = list(reader)
    if not rows:
        raise IngestionError(f"corpus file {path} is empty")
    if schema.has_header:
        header, rows = rows[0], rows[1:]

        def col(name):
            if isinstance(name, int):
                return name
            try:
                return header.index(name)
            except ValueError:
                raise IngestionError(
                    f"corpus file {path}: missing column {name!r} "
                    f"(columns: {', '.join(header)})") from None

        text_i, label_i = col(schema.text_column), col(schema.label_column)
    else:
        if not (isinstance(schema.text_column, int) and isinstance(schema.label_column, int)):
            raise IngestionError(
                f"corpus file {path}: headerless files need integer column indexes")
        text_i, label_i = schema.text_column, schema.label_column
    for row in rows:
        if not row:
            continue
        if len(row) <= max(text_i, label_i):
            raise IngestionError(
                f"corpus file {path}: row with {len(row)} fields, "
                f"need at least {max(text_i, label_i) + 1}")
        yield row[text_i], row[label_i]


def _read_lines_with_sidecar(path, schema: CorpusSchema):
    with open(path, encoding="utf-8") as fh:
        texts = fh.read().splitlines()
    with open(schema.label_path, encoding="utf-8") as fh:
        labels = fh.read().splitlines()
    if len(texts) != len(labels):
        raise IngestionError(
            f"corpus file {path}: {len(texts)} lines but label file "
            f"{schema.label_path} has {len(labels)}")
    yield from zip(texts, labels)


def load_corpus(path, schema: CorpusSchema, class_map: ClassMap,
                config: NormalizationConfig, name: str | None = None) -> LabeledCorpus:
    """Load and normalize a labeled corpus; errors name the offending input."""
    if name is None:
        name = str(path).rsplit("/", 1)[-1].rsplit(".", 1)[0]
    try:
        if schema.kind == "delimited":
            records = list(_read_delimited(path, schema))
        else:
            records = list(_read_lines_with_sidecar(path, schema))
    except OSError as exc:
        raise IngestionError(f"cannot read corpus {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise IngestionError(f"corpus {path} is not valid UTF-8: {exc}") from exc
    return LabeledCorpus.from_records(name, records, class_map, config, source=str(path))
