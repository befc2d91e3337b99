"""Corpus ingestion: parse raw metadata, clean, deduplicate, augment.

Produces the canonical publication table used by every downstream stage.
Output is deterministic: the table is sorted by pub_id and every drop is
counted per reason in a cleaning report.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Iterator, Protocol

from .text import similarity

DEFAULT_COLUMNS = {
    "cord_uid": "cord_uid",
    "title": "title",
    "abstract": "abstract",
    "publish_time": "publish_time",
    "journal": "journal",
    "authors": "authors",
    "doi": "doi",
}

DEFAULT_DATE_CUTOFF = dt.date(2020, 1, 1)
JOURNAL_MATCH_THRESHOLD = 0.7  # same normalized similarity measure as entity linking


class MetadataError(Exception):
    pass


@dataclass(frozen=True)
class RawMetadataRow:
    cord_uid: str
    title: str = ""
    abstract: str = ""
    publish_time: str = ""
    journal_abbrev: str = ""
    authors: str = ""
    doi: str = ""
    source_flags: frozenset[str] = frozenset()


@dataclass(frozen=True)
class RowError:
    line: int
    reason: str
    raw: dict | None = None


@dataclass(frozen=True)
class PublicationRecord:
    pub_id: str
    title: str
    abstract: str
    publish_date: dt.date
    date_precision: str  # day | month | year
    journal: str | None = None
    authors: tuple[str, ...] = ()
    doi: str | None = None
    num_cited_by: int | None = None

    def to_json(self) -> dict:
        return {
            "pub_id": self.pub_id,
            "title": self.title,
            "abstract": self.abstract,
            "publish_date": self.publish_date.isoformat(),
            "date_precision": self.date_precision,
            "journal": self.journal,
            "authors": list(self.authors),
            "doi": self.doi,
            "num_cited_by": self.num_cited_by,
        }

    @classmethod
    def from_json(cls, d: dict) -> "PublicationRecord":
        return cls(
            pub_id=d["pub_id"],
            title=d["title"],
            abstract=d["abstract"],
            publish_date=dt.date.fromisoformat(d["publish_date"]),
            date_precision=d["date_precision"],
            journal=d.get("journal"),
            authors=tuple(d.get("authors") or ()),
            doi=d.get("doi"),
            num_cited_by=d.get("num_cited_by"),
        )


class CitationClient(Protocol):
    def lookup(self, doi: str | None, pub_id: str) -> int | None: ...


class FileCitationClient:
    """Citation counts from a two-column CSV snapshot: doi,count."""

    def __init__(self, path: str | Path):
        self._counts: dict[str, int] = {}
        with open(path, newline="", encoding="utf-8") as fh:
            for row in csv.reader(fh):
                if not row or row[0] == "doi":
                    continue
                self._counts[row[0].strip()] = int(row[1])

    def lookup(self, doi: str | None, pub_id: str) -> int | None:
        if doi:
            return self._counts.get(doi)
        return None


class DictCitationClient:
    def __init__(self, counts: dict[str, int]):
        self._counts = dict(counts)

    def lookup(self, doi: str | None, pub_id: str) -> int | None:
        if doi and doi in self._counts:
            return self._counts[doi]
        return self._counts.get(pub_id)


LanguageDetector = Callable[[str], str]


def ascii_heuristic_detector(text: str) -> str:
    """Default detector: mostly-latin-letter titles count as English."""
    letters = [c for c in text if c.isalpha()]
    if not letters:
        return "en"
    ascii_frac = sum(c.isascii() for c in letters) / len(letters)
    return "en" if ascii_frac >= 0.9 else "unknown"


def parse_metadata(
    path: str | Path,
    columns: dict[str, str] | None = None,
    error_sink: list[RowError] | None = None,
) -> Iterator[RawMetadataRow]:
    """Yield one RawMetadataRow per CSV record; malformed rows go to the sink."""
    columns = {**DEFAULT_COLUMNS, **(columns or {})}
    path = Path(path)
    if not path.exists():
        raise MetadataError(f"metadata file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise MetadataError(f"empty metadata file: {path}")
        missing = [c for c in (columns["cord_uid"], columns["title"], columns["abstract"]) if c not in reader.fieldnames]
        if missing:
            raise MetadataError(f"missing mandatory columns: {missing}")
        for line_no, row in enumerate(reader, start=2):
            uid = (row.get(columns["cord_uid"]) or "").strip()
            if not uid:
                if error_sink is not None:
                    error_sink.append(RowError(line_no, "missing cord_uid", dict(row)))
                continue
            yield RawMetadataRow(
                cord_uid=uid,
                title=(row.get(columns["title"]) or "").strip(),
                abstract=(row.get(columns["abstract"]) or "").strip(),
                publish_time=(row.get(columns["publish_time"]) or "").strip(),
                journal_abbrev=(row.get(columns["journal"]) or "").strip(),
                authors=(row.get(columns["authors"]) or "").strip(),
                doi=(row.get(columns["doi"]) or "").strip(),
            )


def parse_publish_time(value: str) -> tuple[dt.date, str] | None:
    """ISO date, year-month or bare year; partial dates get a precision flag."""
    value = value.strip()
    for fmt, precision in (("%Y-%m-%d", "day"), ("%Y-%m", "month"), ("%Y", "year")):
        try:
            return dt.datetime.strptime(value, fmt).date(), precision
        except ValueError:
            continue
    return None


class JournalTable:
    """Abbreviation -> full name table, fuzzy-matched on normalized abbrevs."""

    def __init__(self, pairs: Iterable[tuple[str, str]]):
        self._pairs = [(a.strip(), f.strip()) for a, f in pairs if a.strip()]

    @classmethod
    def from_csv(cls, path: str | Path) -> "JournalTable":
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r]
        if rows and rows[0][:1] == ["abbrev"]:
            rows = rows[1:]
        return cls((r[0], r[1] if len(r) > 1 else r[0]) for r in rows)

    def resolve(self, abbrev: str, threshold: float = JOURNAL_MATCH_THRESHOLD) -> str | None:
        if not abbrev:
            return None
        best_name, best_sim = None, 0.0
        for a, full in self._pairs:
            s = similarity(abbrev.lower(), a.lower())
            if s > best_sim:
                best_name, best_sim = full, s
        return best_name if best_sim >= threshold else None

    def __len__(self) -> int:
        return len(self._pairs)


@dataclass
class CleaningReport:
    input_rows: int = 0
    output_records: int = 0
    dedup_collapsed: int = 0
    drops: dict[str, int] = field(default_factory=dict)

    def drop(self, reason: str) -> None:
        self.drops[reason] = self.drops.get(reason, 0) + 1

    def to_json(self) -> dict:
        return {
            "input_rows": self.input_rows,
            "output_records": self.output_records,
            "dedup_collapsed": self.dedup_collapsed,
            "drops": dict(sorted(self.drops.items())),
        }

    def conserved(self) -> bool:
        return self.input_rows == self.output_records + sum(self.drops.values()) + self.dedup_collapsed


def _richness(row: RawMetadataRow) -> int:
    return sum(
        bool(v)
        for v in (row.title, row.abstract, row.publish_time, row.journal_abbrev, row.authors, row.doi)
    )


def clean_and_dedupe(
    rows: Iterable[RawMetadataRow],
    lang_detector: LanguageDetector = ascii_heuristic_detector,
    journal_table: JournalTable | None = None,
    date_cutoff: dt.date = DEFAULT_DATE_CUTOFF,
    title_blocklist: Iterable[str] = (),
    allowed_languages: frozenset[str] = frozenset({"en"}),
) -> tuple[list[PublicationRecord], CleaningReport]:
    """Collapse duplicate cord_uids and filter; every drop counted per reason.

    Dedup preference: the row with a journal resolved against the table
    (peer-reviewed), else the one with the most non-empty fields, ties broken
    by input order.
    """
    report = CleaningReport()
    groups: dict[str, list[RawMetadataRow]] = {}
    order: list[str] = []
    for row in rows:
        report.input_rows += 1
        if row.cord_uid not in groups:
            groups[row.cord_uid] = []
            order.append(row.cord_uid)
        groups[row.cord_uid].append(row)

    blocklist = [b.lower() for b in title_blocklist]
    records: list[PublicationRecord] = []
    for uid in order:
        group = groups[uid]
        report.dedup_collapsed += len(group) - 1
        survivor = _pick_survivor(group, journal_table)

        if not survivor.abstract:
            report.drop("no_abstract")
            continue
        if lang_detector(survivor.title) not in allowed_languages:
            report.drop("non_english")
            continue
        parsed = parse_publish_time(survivor.publish_time)
        if parsed is None:
            report.drop("invalid_date")
            continue
        date, precision = parsed
        if date < date_cutoff:
            report.drop("pre_cutoff_date")
            continue
        title_l = survivor.title.lower()
        if any(b in title_l for b in blocklist):
            report.drop("blocklisted_topic")
            continue
        records.append(
            PublicationRecord(
                pub_id=uid,
                title=survivor.title,
                abstract=survivor.abstract,
                publish_date=date,
                date_precision=precision,
                journal=survivor.journal_abbrev or None,
                authors=tuple(a.strip() for a in survivor.authors.split(";") if a.strip()),
                doi=survivor.doi or None,
            )
        )

    records.sort(key=lambda r: r.pub_id)
    report.output_records = len(records)
    assert report.conserved(), "cleaning report does not balance"
    return records, report


def _pick_survivor(group: list[RawMetadataRow], journal_table: JournalTable | None) -> RawMetadataRow:
    if journal_table is not None and len(journal_table):
        peer_reviewed = [r for r in group if r.journal_abbrev and journal_table.resolve(r.journal_abbrev)]
        if peer_reviewed:
            group = peer_reviewed
    best = group[0]
    for row in group[1:]:
        if _richness(row) > _richness(best):
            best = row
    return best


def augment(
    records: list[PublicationRecord],
    client: CitationClient | None = None,
    journal_table: JournalTable | None = None,
) -> list[PublicationRecord]:
    """Fill citation counts and resolve journal abbreviations to full names.

    Client failures degrade to missing counts; unresolved abbreviations are
    kept as-is.
    """
    out: list[PublicationRecord] = []
    for rec in records:
        updates: dict = {}
        if client is not None:
            try:
                count = client.lookup(rec.doi, rec.pub_id)
            except Exception:
                count = None
            if count is not None:
                updates["num_cited_by"] = count
        if journal_table is not None and rec.journal:
            full = journal_table.resolve(rec.journal)
            if full is not None:
                updates["journal"] = full
        out.append(replace(rec, **updates) if updates else rec)
    return out


def write_publications(records: list[PublicationRecord], path: str | Path) -> None:
    """Newline-delimited JSON sorted by pub_id."""
    records = sorted(records, key=lambda r: r.pub_id)
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_json(), sort_keys=True, ensure_ascii=False) + "\n")


def read_publications(path: str | Path) -> list[PublicationRecord]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(PublicationRecord.from_json(json.loads(line)))
    return out


def records_to_raw(records: list[PublicationRecord]) -> list[RawMetadataRow]:
    """Adapter for idempotence checks: render records back into raw rows."""
    raws = []
    for r in records:
        if r.date_precision == "day":
            publish_time = r.publish_date.isoformat()
        elif r.date_precision == "month":
            publish_time = r.publish_date.strftime("%Y-%m")
        else:
            publish_time = r.publish_date.strftime("%Y")
        raws.append(
            RawMetadataRow(
                cord_uid=r.pub_id,
                title=r.title,
                abstract=r.abstract,
                publish_time=publish_time,
                journal_abbrev=r.journal or "",
                authors="; ".join(r.authors),
                doi=r.doi or "",
            )
        )
    return raws
