"""Persistence for the inverted index and the keyword baseline.

The on-disk format (.cgsidx) is a JSON header followed by length-prefixed
binary sections, each with a sha256 checksum recorded in the header. All
integers are little-endian. Version mismatch, checksum failure and
truncation are distinct errors.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .corpus import PublicationRecord
from .network import CoocNetwork, PairKey
from .text import TokenizerConfig, tokenize_normalize

INDEX_MAGIC = b"CGSX"
INDEX_FORMAT_VERSION = 1


class IndexFormatError(Exception):
    pass


class IndexVersionError(IndexFormatError):
    pass


class IndexChecksumError(IndexFormatError):
    pass


class IndexTruncatedError(IndexFormatError):
    pass


@dataclass
class InvertedIndex:
    """Canonical relationship name -> sorted publication posting list."""

    postings: dict[str, list[str]]
    n_docs: int

    def lookup(self, name: str) -> list[str]:
        return self.postings.get(name, [])

    def __len__(self) -> int:
        return len(self.postings)


@dataclass
class KeywordIndex:
    """Normalized token -> sorted posting list; tokens in >= 50% of the
    documents are excluded at build time."""

    postings: dict[str, list[str]]
    doc_freq: dict[str, int]
    n_docs: int
    excluded: set[str] = field(default_factory=set)

    def lookup(self, token: str) -> list[str]:
        return self.postings.get(token, [])


def build_inverted_index(
    postings: dict[PairKey, list[str]],
    net: CoocNetwork,
) -> InvertedIndex:
    """Index exactly the edges that survived NPMI pruning."""
    index: dict[str, list[str]] = {}
    for key, edge in net.edges.items():
        pubs = sorted(set(postings[key]))
        if len(pubs) != edge.frequency:
            raise ValueError(f"posting list for {edge.name!r} has {len(pubs)} pubs, frequency is {edge.frequency}")
        index[edge.name] = pubs
    return InvertedIndex(index, net.n_docs)


def build_keyword_index(
    records: Iterable[PublicationRecord],
    tokenizer: TokenizerConfig | None = None,
) -> KeywordIndex:
    doc_tokens: dict[str, set[str]] = {}
    for rec in records:
        text = f"{rec.title}\n{rec.abstract}"
        doc_tokens[rec.pub_id] = {t.text for t in tokenize_normalize(text, tokenizer)}
    n_docs = len(doc_tokens)
    df: dict[str, int] = {}
    for toks in doc_tokens.values():
        for t in toks:
            df[t] = df.get(t, 0) + 1
    excluded = {t for t, f in df.items() if n_docs and f * 2 >= n_docs}
    postings: dict[str, list[str]] = {}
    for pub_id in sorted(doc_tokens):
        for t in doc_tokens[pub_id]:
            if t in excluded:
                continue
            postings.setdefault(t, []).append(pub_id)
    return KeywordIndex(postings, {t: df[t] for t in postings}, n_docs, excluded)


def keyword_search(
    kindex: KeywordIndex,
    terms: list[str],
    mode: str = "conjunctive",
) -> list[str]:
    """Conjunctive: posting-list intersection. Disjunctive: union ranked by
    matched-term count, then pub_id. Terms must already be normalized."""
    if mode not in ("conjunctive", "disjunctive"):
        raise ValueError(f"unknown mode {mode!r}")
    lists = [kindex.lookup(t) for t in terms]
    if mode == "conjunctive":
        if not lists:
            return []
        result = set(lists[0])
        for pl in lists[1:]:
            result &= set(pl)
        return sorted(result)
    counts: dict[str, int] = {}
    for pl in lists:
        for pub in set(pl):
            counts[pub] = counts.get(pub, 0) + 1
    return [p for p, _ in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))]


def _pack_section(payload: bytes) -> tuple[bytes, dict]:
    return payload, {"length": len(payload), "sha256": hashlib.sha256(payload).hexdigest()}


def save_indexes(inverted: InvertedIndex, keyword: KeywordIndex, path: str | Path) -> None:
    sections: list[tuple[str, bytes]] = [
        ("inverted", json.dumps({"n_docs": inverted.n_docs, "postings": inverted.postings}, sort_keys=True).encode()),
        (
            "keyword",
            json.dumps(
                {
                    "n_docs": keyword.n_docs,
                    "postings": keyword.postings,
                    "doc_freq": keyword.doc_freq,
                    "excluded": sorted(keyword.excluded),
                },
                sort_keys=True,
            ).encode(),
        ),
    ]
    meta = []
    blobs = []
    for name, payload in sections:
        blob, info = _pack_section(payload)
        meta.append({"name": name, **info})
        blobs.append(blob)
    header = json.dumps(
        {"format": "cgsidx", "version": INDEX_FORMAT_VERSION, "endianness": "little", "sections": meta},
        sort_keys=True,
    ).encode()
    with open(path, "wb") as fh:
        fh.write(INDEX_MAGIC)
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        for blob in blobs:
            fh.write(struct.pack("<Q", len(blob)))
            fh.write(blob)


def load_indexes(path: str | Path) -> tuple[InvertedIndex, KeywordIndex]:
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 8 or data[:4] != INDEX_MAGIC:
        raise IndexFormatError(f"not a cgsidx file: {path}")
    (header_len,) = struct.unpack_from("<I", data, 4)
    if len(data) < 8 + header_len:
        raise IndexTruncatedError(f"truncated header in {path}")
    header = json.loads(data[8 : 8 + header_len])
    version = header.get("version")
    if version != INDEX_FORMAT_VERSION:
        raise IndexVersionError(f"index version mismatch: file has {version}, reader supports {INDEX_FORMAT_VERSION}")
    offset = 8 + header_len
    payloads: dict[str, bytes] = {}
    for meta in header["sections"]:
        if len(data) < offset + 8:
            raise IndexTruncatedError(f"truncated section header in {path}")
        (length,) = struct.unpack_from("<Q", data, offset)
        offset += 8
        if length != meta["length"] or len(data) < offset + length:
            raise IndexTruncatedError(f"truncated section {meta['name']!r} in {path}")
        blob = data[offset : offset + length]
        offset += length
        if hashlib.sha256(blob).hexdigest() != meta["sha256"]:
            raise IndexChecksumError(f"checksum mismatch in section {meta['name']!r} of {path}")
        payloads[meta["name"]] = blob
    inv = json.loads(payloads["inverted"])
    kw = json.loads(payloads["keyword"])
    return (
        InvertedIndex(inv["postings"], inv["n_docs"]),
        KeywordIndex(kw["postings"], kw["doc_freq"], kw["n_docs"], set(kw["excluded"])),
    )
