"""Staged pipeline orchestration: ingest -> annotate -> build-network -> index.

Each stage writes its artifacts atomically (temp file + rename) into the
output directory and stamps a manifest with the pipeline config hash;
stages refuse to run against artifacts produced under a different config.
Artifacts are deterministic: the same input and config produce
byte-identical files.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from . import annotate as ann
from . import corpus, dictionary, index_store, network
from .text import TokenizerConfig


class PipelineError(Exception):
    pass


class ConfigMismatchError(PipelineError):
    pass


@dataclass
class PipelineConfig:
    corpus_csv: str = ""
    dictionaries: list[str] = field(default_factory=list)
    citations_csv: str | None = None
    journals_csv: str | None = None
    out_dir: str = "artifacts"
    similarity_threshold: float = 0.7
    npmi_prune: float = 0.0
    top_k_paths: int = 10
    stem: bool = True
    extra_stopwords: list[str] = field(default_factory=list)
    date_cutoff: str = "2020-01-01"
    title_blocklist: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not (0.0 < self.similarity_threshold <= 1.0):
            raise PipelineError(f"similarity_threshold out of range: {self.similarity_threshold}")
        if self.top_k_paths < 1:
            raise PipelineError(f"top_k_paths must be positive: {self.top_k_paths}")

    @classmethod
    def from_file(cls, path: str | Path, **overrides) -> "PipelineConfig":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)

    def tokenizer(self) -> TokenizerConfig:
        from .text import DEFAULT_STOPWORDS

        return TokenizerConfig(
            stopwords=DEFAULT_STOPWORDS | frozenset(s.lower() for s in self.extra_stopwords),
            stem=self.stem,
        )

    def semantic_dict(self) -> dict:
        # everything that affects artifact content; out_dir deliberately excluded
        return {
            "corpus_csv": self.corpus_csv,
            "dictionaries": list(self.dictionaries),
            "citations_csv": self.citations_csv,
            "journals_csv": self.journals_csv,
            "similarity_threshold": self.similarity_threshold,
            "npmi_prune": self.npmi_prune,
            "top_k_paths": self.top_k_paths,
            "stem": self.stem,
            "extra_stopwords": sorted(self.extra_stopwords),
            "date_cutoff": self.date_cutoff,
            "title_blocklist": sorted(self.title_blocklist),
        }

    def config_hash(self) -> str:
        blob = json.dumps(self.semantic_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


def atomic_write_text(path: Path, content: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(content)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_bytes(path: Path, content: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(content)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


STAGES = ("ingest", "annotate", "build-network", "index")

STAGE_OUTPUTS = {
    "ingest": ("publications.ndjson", "cleaning_report.json"),
    "annotate": ("mentions.ndjson", "entities.ndjson"),
    "build-network": ("entities.ndjson", "edges.ndjson", "network_header.json"),
    "index": ("index.cgsidx",),
}


def _manifest_path(out_dir: Path, stage: str) -> Path:
    return out_dir / f"manifest_{stage.replace('-', '_')}.json"


def write_manifest(out_dir: Path, stage: str, cfg: PipelineConfig) -> None:
    content = json.dumps(
        {"stage": stage, "config_hash": cfg.config_hash(), "outputs": list(STAGE_OUTPUTS[stage])},
        indent=2,
        sort_keys=True,
    )
    atomic_write_text(_manifest_path(out_dir, stage), content + "\n")


def check_upstream(out_dir: Path, stage: str, cfg: PipelineConfig) -> None:
    """Refuse to mix pipelines: upstream manifest must exist and carry the
    same config hash."""
    upstream = STAGES[STAGES.index(stage) - 1]
    path = _manifest_path(out_dir, upstream)
    if not path.exists():
        raise PipelineError(f"stage {stage!r} requires stage {upstream!r} artifacts; run it first")
    with open(path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    if manifest.get("config_hash") != cfg.config_hash():
        raise ConfigMismatchError(
            f"config hash mismatch: {upstream} artifacts were built with "
            f"{manifest.get('config_hash')}, current config is {cfg.config_hash()}"
        )
    for name in manifest.get("outputs", ()):
        if not (out_dir / name).exists():
            raise PipelineError(f"missing upstream artifact: {out_dir / name}")


def stage_ingest(cfg: PipelineConfig) -> corpus.CleaningReport:
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    errors: list[corpus.RowError] = []
    rows = list(corpus.parse_metadata(cfg.corpus_csv, error_sink=errors))
    journal_table = corpus.JournalTable.from_csv(cfg.journals_csv) if cfg.journals_csv else None
    records, report = corpus.clean_and_dedupe(
        rows,
        journal_table=journal_table,
        date_cutoff=dt.date.fromisoformat(cfg.date_cutoff),
        title_blocklist=cfg.title_blocklist,
    )
    client = corpus.FileCitationClient(cfg.citations_csv) if cfg.citations_csv else None
    records = corpus.augment(records, client=client, journal_table=journal_table)

    lines = [json.dumps(r.to_json(), sort_keys=True, ensure_ascii=False) for r in sorted(records, key=lambda r: r.pub_id)]
    atomic_write_text(out_dir / "publications.ndjson", "".join(line + "\n" for line in lines))
    report_doc = report.to_json()
    report_doc["parse_errors"] = [{"line": e.line, "reason": e.reason} for e in errors]
    atomic_write_text(out_dir / "cleaning_report.json", json.dumps(report_doc, indent=2, sort_keys=True) + "\n")
    write_manifest(out_dir, "ingest", cfg)
    return report


def stage_annotate(cfg: PipelineConfig) -> int:
    out_dir = Path(cfg.out_dir)
    check_upstream(out_dir, "annotate", cfg)
    records = corpus.read_publications(out_dir / "publications.ndjson")
    entries = dictionary.load_dictionary(cfg.dictionaries)
    matcher = ann.EntityMatcher(entries, cfg.similarity_threshold, cfg.tokenizer())
    mentions = ann.mine_corpus(records, matcher)
    entities = ann.curate_entities(mentions, matcher.entries)

    def dump(items):
        return "".join(json.dumps(i.to_json(), sort_keys=True, ensure_ascii=False) + "\n" for i in items)

    atomic_write_text(out_dir / "mentions.ndjson", dump(mentions))
    atomic_write_text(out_dir / "entities.ndjson", dump(entities))
    write_manifest(out_dir, "annotate", cfg)
    return len(mentions)


def stage_network(cfg: PipelineConfig) -> network.CoocNetwork:
    out_dir = Path(cfg.out_dir)
    check_upstream(out_dir, "build-network", cfg)
    records = corpus.read_publications(out_dir / "publications.ndjson")
    mentions = ann.read_mentions(out_dir / "mentions.ndjson")
    entities = ann.read_entities(out_dir / "entities.ndjson")
    pub_entities, _ = network.build_lookup_tables(mentions)
    bigrams, _postings = network.mine_links(pub_entities)
    net = network.consolidate(bigrams, entities, n_docs=len(records))

    def dump(items):
        return "".join(json.dumps(i.to_json(), sort_keys=True, ensure_ascii=False) + "\n" for i in items)

    atomic_write_text(out_dir / "entities.ndjson", dump(sorted(net.entities.values(), key=lambda e: e.concept_id)))
    atomic_write_text(out_dir / "edges.ndjson", dump(sorted(net.edges.values(), key=lambda e: e.name)))
    header = network.network_header(net, cfg.config_hash())
    atomic_write_text(out_dir / "network_header.json", json.dumps(header, indent=2, sort_keys=True) + "\n")
    write_manifest(out_dir, "build-network", cfg)
    return net


def stage_index(cfg: PipelineConfig) -> None:
    out_dir = Path(cfg.out_dir)
    check_upstream(out_dir, "index", cfg)
    records = corpus.read_publications(out_dir / "publications.ndjson")
    mentions = ann.read_mentions(out_dir / "mentions.ndjson")
    net = network.read_network(out_dir)
    pub_entities, _ = network.build_lookup_tables(mentions)
    _bigrams, postings = network.mine_links(pub_entities)
    inverted = index_store.build_inverted_index(postings, net)
    keyword = index_store.build_keyword_index(records, cfg.tokenizer())

    tmp = out_dir / ".index.cgsidx.tmp"
    index_store.save_indexes(inverted, keyword, tmp)
    os.replace(tmp, out_dir / "index.cgsidx")
    write_manifest(out_dir, "index", cfg)


STAGE_FUNCS = {
    "ingest": stage_ingest,
    "annotate": stage_annotate,
    "build-network": stage_network,
    "index": stage_index,
}


def run_stages(cfg: PipelineConfig, first_stage: str = "ingest", run_all: bool = True) -> None:
    start = STAGES.index(first_stage)
    stages = STAGES[start:] if run_all else (first_stage,)
    for stage in stages:
        STAGE_FUNCS[stage](cfg)


@dataclass
class Artifacts:
    publications: dict[str, corpus.PublicationRecord]
    net: network.CoocNetwork
    inverted: index_store.InvertedIndex
    keyword: index_store.KeywordIndex
    config_hash: str = ""


def load_artifacts(out_dir: str | Path) -> Artifacts:
    out_dir = Path(out_dir)
    for name in ("publications.ndjson", "network_header.json", "index.cgsidx"):
        if not (out_dir / name).exists():
            raise PipelineError(f"missing artifact: {out_dir / name}; run the pipeline first")
    records = corpus.read_publications(out_dir / "publications.ndjson")
    net = network.read_network(out_dir)
    inverted, keyword = index_store.load_indexes(out_dir / "index.cgsidx")
    with open(out_dir / "network_header.json", encoding="utf-8") as fh:
        header = json.load(fh)
    return Artifacts(
        publications={r.pub_id: r for r in records},
        net=net,
        inverted=inverted,
        keyword=keyword,
        config_hash=header.get("config_hash", ""),
    )
