"""Text normalization: placeholder stripping, tokenization, stop-words, stemming.

The same pipeline is applied to corpus lines and to term-list entries so that
matching happens over identical token streams. The pipeline is deterministic
and pinned by golden tests; changing any stage (tokenizer charset, stop-word
list, stemmer) invalidates stored artifacts.

Stage order for a raw string:
  1. strip placeholder patterns (bracketed markers, URLs)
  2. lowercase
  3. tokenize (runs of [a-z0-9*] with internal apostrophes; all else splits)
  4. optionally drop stop-words (checked before stemming)
  5. stem each token (Porter)
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

__all__ = [
    "NormalizationConfig",
    "default_stopwords",
    "load_stopword_file",
    "normalize_text",
    "porter_stem",
    "pre_stem_tokens",
]

# Word-internal '*' is kept: redacted slurs ("f*ck") are literal data in this
# domain. Apostrophes join only when internal ("don't", not a quote mark).
_TOKEN_RE = re.compile(r"[a-z0-9*]+(?:'[a-z0-9*]+)*")

DEFAULT_PLACEHOLDER_PATTERNS = (
    r"https?://\S+",        # URLs
    r"[@#]?\[[^\]\s]+\]",   # anonymized markers: [IDENTITY], @[USER], #[TAG]
)


def load_stopword_file(path) -> frozenset[str]:
    """Read a stop-word file: one word per line, '#' comments, UTF-8."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            word = line.strip()
            if word and not word.startswith("#"):
                words.add(word.lower())
    return frozenset(words)


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset[str]:
    """The bundled 179-word English stop list."""
    ref = resources.files("lexsev.data").joinpath("stopwords_en.txt")
    with resources.as_file(ref) as path:
        return load_stopword_file(path)


@dataclass(frozen=True)
class NormalizationConfig:
    """Pipeline switches. ``remove_stopwords`` is off for metric computation
    and on for the mining pipeline's database construction."""

    stemmer: str = "porter"  # "porter" | "none"
    remove_stopwords: bool = False
    stopwords: frozenset[str] = field(default_factory=default_stopwords)
    placeholder_patterns: tuple[str, ...] = DEFAULT_PLACEHOLDER_PATTERNS

    def __post_init__(self):
        if self.stemmer not in ("porter", "none"):
            raise ValueError(f"unknown stemmer: {self.stemmer!r}")
        joined = "|".join(f"(?:{p})" for p in self.placeholder_patterns)
        object.__setattr__(self, "_placeholder_re",
                           re.compile(joined) if joined else None)

    def with_stopword_removal(self, remove: bool) -> "NormalizationConfig":
        if remove == self.remove_stopwords:
            return self
        return NormalizationConfig(
            stemmer=self.stemmer,
            remove_stopwords=remove,
            stopwords=self.stopwords,
            placeholder_patterns=self.placeholder_patterns,
        )


def pre_stem_tokens(raw: str, config: NormalizationConfig) -> list[str]:
    """Tokens after lowering/splitting but before stop-word removal and
    stemming. Used to decide whether a term consists solely of stop-words."""
    if not raw:
        return []
    text = raw
    if config._placeholder_re is not None:
        text = config._placeholder_re.sub(" ", text)
    return _TOKEN_RE.findall(text.lower())


def normalize_text(raw: str, config: NormalizationConfig) -> list[str]:
    """Full pipeline: raw string to stemmed token sequence."""
    tokens = pre_stem_tokens(raw, config)
    if config.remove_stopwords:
        tokens = [t for t in tokens if t not in config.stopwords]
    if config.stemmer == "porter":
        tokens = [porter_stem(t) for t in tokens]
    return tokens


# ---------------------------------------------------------------------------
# Porter stemmer (the classic 1980 algorithm).
#
# No packaged stemmer is available in this environment, so the algorithm is
# carried here verbatim from its published description. Non-alphabetic
# characters inside a token (the '*' of redacted slurs) are treated as
# consonants, which leaves purely suffix-based rules (plural stripping)
# working on redacted forms while vowel-conditioned rules stay conservative.
# ---------------------------------------------------------------------------

_VOWELS = "aeiou"


def _is_consonant(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        return i == 0 or not _is_consonant(word, i - 1)
    return True


def _measure(stem: str) -> int:
    """Number of VC runs in the [C](VC)^m[V] decomposition."""
    m = 0
    prev_vowel = False
    for i in range(len(stem)):
        if _is_consonant(stem, i):
            if prev_vowel:
                m += 1
            prev_vowel = False
        else:
            prev_vowel = True
    return m


def _contains_vowel(stem: str) -> bool:
    return any(not _is_consonant(stem, i) for i in range(len(stem)))


def _ends_double_consonant(word: str) -> bool:
    return (len(word) >= 2 and word[-1] == word[-2]
            and _is_consonant(word, len(word) - 1))


def _ends_cvc(word: str) -> bool:
    # *o condition: ends consonant-vowel-consonant, final consonant not w/x/y
    if len(word) < 3:
        return False
    return (_is_consonant(word, len(word) - 3)
            and not _is_consonant(word, len(word) - 2)
            and _is_consonant(word, len(word) - 1)
            and word[-1] not in "wxy")


def _replace_longest(word, rules, condition):
    """Apply the rule with the longest matching suffix, if its condition
    holds on the remaining stem. Returns the (possibly unchanged) word."""
    best = None
    for suffix, repl in rules:
        if word.endswith(suffix) and (best is None or len(suffix) > len(best[0])):
            best = (suffix, repl)
    if best is None:
        return word
    suffix, repl = best
    stem = word[: len(word) - len(suffix)]
    if condition(stem):
        return stem + repl
    return word


_STEP2 = [
    ("ational", "ate"), ("tional", "tion"), ("enci", "ence"), ("anci", "ance"),
    ("izer", "ize"), ("abli", "able"), ("alli", "al"), ("entli", "ent"),
    ("eli", "e"), ("ousli", "ous"), ("ization", "ize"), ("ation", "ate"),
    ("ator", "ate"), ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
    ("ousness", "ous"), ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
]

_STEP3 = [
    ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
    ("ical", "ic"), ("ful", ""), ("ness", ""),
]

_STEP4 = [
    "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
    "ment", "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
]


def porter_stem(token: str) -> str:
    word = token
    if len(word) <= 2:
        return word

    # Step 1a
    if word.endswith("sses"):
        word = word[:-2]
    elif word.endswith("ies"):
        word = word[:-2]
    elif word.endswith("ss"):
        pass
    elif word.endswith("s"):
        word = word[:-1]

    # Step 1b
    if word.endswith("eed"):
        if _measure(word[:-3]) > 0:
            word = word[:-1]
    else:
        cleanup = False
        if word.endswith("ed") and _contains_vowel(word[:-2]):
            word = word[:-2]
            cleanup = True
        elif word.endswith("ing") and _contains_vowel(word[:-3]):
            word = word[:-3]
            cleanup = True
        if cleanup:
            if word.endswith(("at", "bl", "iz")):
                word += "e"
            elif _ends_double_consonant(word) and word[-1] not in "lsz":
                word = word[:-1]
            elif _measure(word) == 1 and _ends_cvc(word):
                word += "e"

    # Step 1c
    if word.endswith("y") and _contains_vowel(word[:-1]):
        word = word[:-1] + "i"

    # Steps 2-4
    word = _replace_longest(word, _STEP2, lambda s: _measure(s) > 0)
    word = _replace_longest(word, _STEP3, lambda s: _measure(s) > 0)

    def _step4_cond(stem, suffix):
        if _measure(stem) <= 1:
            return False
        if suffix == "ion":
            return stem.endswith(("s", "t"))
        return True

    best = None
    for suffix in _STEP4:
        if word.endswith(suffix) and (best is None or len(suffix) > len(best)):
            best = suffix
    if best is not None and _step4_cond(word[: len(word) - len(best)], best):
        word = word[: len(word) - len(best)]

    # Step 5a
    if word.endswith("e"):
        m = _measure(word[:-1])
        if m > 1 or (m == 1 and not _ends_cvc(word[:-1])):
            word = word[:-1]

    # Step 5b
    if _measure(word) > 1 and _ends_double_consonant(word) and word.endswith("l"):
        word = word[:-1]

    return word
