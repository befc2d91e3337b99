"""Dictionary-based entity recognition and curation.

Concepts are recognized in each publication's title+abstract by sliding
n-gram windows over the normalized tokens and fuzzy-matching them against
dictionary surface forms. Similarity is computed on normalized forms; the
similarity threshold (default 0.7) filters low-quality links.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .corpus import PublicationRecord
from .dictionary import OntologyEntry
from .text import TokenizerConfig, normalize_phrase, similarity, tokenize_normalize

DEFAULT_THRESHOLD = 0.7


@dataclass(frozen=True)
class RawEntityMention:
    pub_id: str
    surface_text: str
    concept_id: str
    similarity: float
    start: int
    end: int

    def to_json(self) -> dict:
        return {
            "pub_id": self.pub_id,
            "surface_text": self.surface_text,
            "concept_id": self.concept_id,
            "similarity": self.similarity,
            "start": self.start,
            "end": self.end,
        }

    @classmethod
    def from_json(cls, d: dict) -> "RawEntityMention":
        return cls(d["pub_id"], d["surface_text"], d["concept_id"], d["similarity"], d["start"], d["end"])


@dataclass(frozen=True)
class ConceptEntity:
    concept_id: str
    name: str
    source: str
    semantic_type: str
    macrocategory: str
    frequency: int  # number of distinct publications mentioning the concept
    synonyms: tuple[str, ...] = ()

    @property
    def is_utility(self) -> bool:
        return self.macrocategory == "UTILITY"

    def to_json(self) -> dict:
        return {
            "concept_id": self.concept_id,
            "name": self.name,
            "source": self.source,
            "semantic_type": self.semantic_type,
            "macrocategory": self.macrocategory,
            "frequency": self.frequency,
            "synonyms": list(self.synonyms),
        }

    @classmethod
    def from_json(cls, d: dict) -> "ConceptEntity":
        return cls(
            d["concept_id"], d["name"], d["source"], d["semantic_type"],
            d["macrocategory"], d["frequency"], tuple(d.get("synonyms") or ()),
        )


def publication_text(record: PublicationRecord) -> str:
    return f"{record.title}\n{record.abstract}"


class EntityMatcher:
    """Prepared dictionary for repeated per-publication matching."""

    def __init__(
        self,
        entries: Iterable[OntologyEntry],
        threshold: float = DEFAULT_THRESHOLD,
        tokenizer: TokenizerConfig | None = None,
    ):
        if not (0.0 < threshold <= 1.0):
            raise ValueError(f"threshold must be in (0, 1], got {threshold}")
        self.threshold = threshold
        self.tokenizer = tokenizer or TokenizerConfig()
        self.entries = {e.concept_id: e for e in entries}
        # one (normalized form, entry) pair per distinct surface form
        self._forms: list[tuple[str, int, OntologyEntry]] = []
        self.max_window = 0
        seen: set[tuple[str, str]] = set()
        for entry in sorted(self.entries.values(), key=lambda e: e.concept_id):
            for form in entry.surface_forms():
                norm = normalize_phrase(form, self.tokenizer)
                if not norm or (norm, entry.concept_id) in seen:
                    continue
                seen.add((norm, entry.concept_id))
                n_tokens = norm.count(" ") + 1
                self._forms.append((norm, n_tokens, entry))
                self.max_window = max(self.max_window, n_tokens)

    def best_match(self, candidate: str) -> tuple[OntologyEntry, float] | None:
        best: tuple[float, str] | None = None
        best_entry = None
        slack_base = 1.0 - self.threshold
        for norm, _n, entry in self._forms:
            longest = max(len(norm), len(candidate))
            if abs(len(norm) - len(candidate)) > slack_base * longest:
                continue  # length gap alone already breaks the threshold
            sim = similarity(candidate, norm)
            if sim < self.threshold:
                continue
            key = (-sim, entry.concept_id)
            if best is None or key < best:
                best = key
                best_entry = entry
        if best_entry is None:
            return None
        return best_entry, -best[0]

    def mine(self, record: PublicationRecord) -> list[RawEntityMention]:
        """Single pass over title+abstract; best-similarity-first overlap resolution."""
        text = publication_text(record)
        tokens = tokenize_normalize(text, self.tokenizer)
        candidates: list[tuple[int, int, int, float, str]] = []
        for i in range(len(tokens)):
            for length in range(1, min(self.max_window, len(tokens) - i) + 1):
                window = tokens[i : i + length]
                cand = " ".join(t.text for t in window)
                hit = self.best_match(cand)
                if hit is None:
                    continue
                entry, sim = hit
                candidates.append((window[0].start, window[-1].end, length, sim, entry.concept_id))

        # highest similarity first, then longest match, then lowest concept_id;
        # similarity outranks span length so a noisy fuzzy super-window cannot
        # swallow an exact dictionary match it contains
        candidates.sort(key=lambda c: (-c[3], -(c[1] - c[0]), c[4], c[0]))
        accepted: list[tuple[int, int, int, float, str]] = []
        for cand in candidates:
            if all(cand[1] <= a[0] or cand[0] >= a[1] for a in accepted):
                accepted.append(cand)
        accepted.sort(key=lambda c: c[0])
        return [
            RawEntityMention(record.pub_id, text[s:e], cid, sim, s, e)
            for s, e, _l, sim, cid in accepted
        ]


def mine_entities(
    record: PublicationRecord,
    entries: Iterable[OntologyEntry],
    threshold: float = DEFAULT_THRESHOLD,
    tokenizer: TokenizerConfig | None = None,
) -> list[RawEntityMention]:
    return EntityMatcher(entries, threshold, tokenizer).mine(record)


def mine_corpus(
    records: Iterable[PublicationRecord],
    matcher: EntityMatcher,
) -> list[RawEntityMention]:
    mentions: list[RawEntityMention] = []
    for record in sorted(records, key=lambda r: r.pub_id):
        mentions.extend(matcher.mine(record))
    return mentions


def curate_entities(
    mentions: Iterable[RawEntityMention],
    entries: dict[str, OntologyEntry],
) -> list[ConceptEntity]:
    """Aggregate mentions into the entity table; frequency is document frequency."""
    docs: dict[str, set[str]] = {}
    for m in mentions:
        docs.setdefault(m.concept_id, set()).add(m.pub_id)
    out = []
    for concept_id in sorted(docs):
        entry = entries[concept_id]
        out.append(
            ConceptEntity(
                concept_id=concept_id,
                name=entry.canonical_name,
                source=entry.source,
                semantic_type=entry.semantic_type,
                macrocategory=entry.macrocategory,
                frequency=len(docs[concept_id]),
                synonyms=entry.synonyms,
            )
        )
    return out


def write_ndjson(items: Iterable, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for item in items:
            fh.write(json.dumps(item.to_json(), sort_keys=True, ensure_ascii=False) + "\n")


def read_mentions(path: str | Path) -> list[RawEntityMention]:
    with open(path, encoding="utf-8") as fh:
        return [RawEntityMention.from_json(json.loads(line)) for line in fh if line.strip()]


def read_entities(path: str | Path) -> list[ConceptEntity]:
    with open(path, encoding="utf-8") as fh:
        return [ConceptEntity.from_json(json.loads(line)) for line in fh if line.strip()]
