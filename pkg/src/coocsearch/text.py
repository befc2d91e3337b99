"""Text normalization and fuzzy string matching.

The tokenizer keeps internal hyphens, apostrophes and digits so that
biomedical tokens like "covid-19" and "ace2" survive as single tokens.
Stemming is a small suffix-rule set, deliberately lighter than Porter;
both the stopword list and the suffix rules are config-overridable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

TOKEN_RE = re.compile(r"[A-Za-z0-9]+(?:[-'’][A-Za-z0-9]+)*")

DEFAULT_STOPWORDS = frozenset(
    """a an and are as at be by for from has have in is it its of on or
    that the to was were which with this these those we our their""".split()
)


def default_stem(token: str) -> str:
    """Light suffix stripping: plural, -ing/-ed, trailing -e."""
    t = token
    if t.endswith("sses"):
        t = t[:-2]
    elif t.endswith("ies") and len(t) > 4:
        t = t[:-3] + "y"
    elif t.endswith("s") and not t.endswith(("ss", "us")) and len(t) > 3:
        t = t[:-1]
    if t.endswith("ing") and len(t) > 5:
        t = t[:-3]
    elif t.endswith("ed") and len(t) > 4:
        t = t[:-2]
    if t.endswith("e") and len(t) > 4:
        t = t[:-1]
    return t


@dataclass(frozen=True)
class Token:
    text: str  # normalized form
    start: int  # char offset into the original text
    end: int


@dataclass
class TokenizerConfig:
    stopwords: frozenset[str] = DEFAULT_STOPWORDS
    stem: bool = True
    extra_suffix_rules: dict = field(default_factory=dict)

    def describe(self) -> dict:
        return {
            "stopwords": sorted(self.stopwords),
            "stem": self.stem,
        }


def tokenize_normalize(text: str, config: TokenizerConfig | None = None) -> list[Token]:
    """Lowercase, drop stopwords, stem; each token keeps its original span."""
    if config is None:
        config = TokenizerConfig()
    out: list[Token] = []
    for m in TOKEN_RE.finditer(text):
        lowered = m.group().lower()
        if lowered in config.stopwords:
            continue
        norm = default_stem(lowered) if config.stem else lowered
        out.append(Token(norm, m.start(), m.end()))
    return out


def normalize_phrase(text: str, config: TokenizerConfig | None = None) -> str:
    """Normalized single-string form of a phrase (dictionary keys, queries)."""
    return " ".join(t.text for t in tokenize_normalize(text, config))


def levenshtein(a: str, b: str) -> int:
    """Classic edit distance, O(len(a)*len(b)) with two rows."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def similarity(a: str, b: str) -> float:
    """Normalized similarity 1 - lev(a,b)/max(|a|,|b|); 1.0 for two empty strings."""
    if not a and not b:
        return 1.0
    return 1.0 - levenshtein(a, b) / max(len(a), len(b))
