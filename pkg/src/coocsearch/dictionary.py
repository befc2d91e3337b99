"""Ontology dictionary loading.

Dictionaries are TSV files with columns: concept_id, canonical_name,
pipe-separated synonyms, source, semantic_type, macrocategory. Several
files may be loaded together so a single pass can match against multiple
terminologies at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

MACROCATEGORIES = frozenset(
    {
        "ACTIVITIES_AND_BEHAVIORS",
        "ANATOMY",
        "CHEMICALS_AND_DRUGS",
        "CONCEPTS_AND_IDEAS",
        "DEVICES",
        "DISORDERS",
        "ENTITY",
        "GENES_AND_MOLECULAR_SEQUENCES",
        "GEOGRAPHIC_AREAS",
        "LIVING_BEINGS",
        "OBJECTS",
        "OCCUPATIONS",
        "ORGANIZATIONS",
        "PHENOMENA",
        "PHYSIOLOGY",
        "PROCEDURES",
        "UTILITY",
    }
)

SOURCES = frozenset({"UMLS-like", "CIDO-like", "UTILITY"})


class DictionaryError(Exception):
    pass


@dataclass(frozen=True)
class OntologyEntry:
    concept_id: str
    canonical_name: str
    synonyms: tuple[str, ...]
    source: str
    semantic_type: str
    macrocategory: str

    def surface_forms(self) -> tuple[str, ...]:
        return (self.canonical_name, *self.synonyms)


def load_dictionary(paths: Iterable[str | Path]) -> list[OntologyEntry]:
    """Load and merge dictionary files; concept_id must be globally unique."""
    entries: dict[str, OntologyEntry] = {}
    for path in paths:
        path = Path(path)
        if not path.exists():
            raise DictionaryError(f"dictionary file not found: {path}")
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 6:
                    raise DictionaryError(f"{path}:{line_no}: expected 6 tab-separated fields, got {len(parts)}")
                concept_id, name, syns, source, sem_type, macro = (p.strip() for p in parts)
                if not concept_id or not name:
                    raise DictionaryError(f"{path}:{line_no}: concept_id and canonical_name are mandatory")
                if macro not in MACROCATEGORIES:
                    raise DictionaryError(f"{path}:{line_no}: unknown macrocategory {macro!r}")
                if source not in SOURCES:
                    raise DictionaryError(f"{path}:{line_no}: unknown source {source!r}")
                if concept_id in entries:
                    raise DictionaryError(f"{path}:{line_no}: duplicate concept_id {concept_id!r}")
                entries[concept_id] = OntologyEntry(
                    concept_id=concept_id,
                    canonical_name=name,
                    synonyms=tuple(s.strip() for s in syns.split("|") if s.strip()),
                    source=source,
                    semantic_type=sem_type,
                    macrocategory=macro,
                )
    return sorted(entries.values(), key=lambda e: e.concept_id)
