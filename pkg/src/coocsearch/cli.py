"""Command-line driver for the pipeline, queries and benchmarks.

Exit codes: 0 ok, 1 runtime failure, 2 validation failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import bench as bench_mod
from . import pipeline
from .engine import QueryError, ValidationError, load_query_file, run_query
from .index_store import keyword_search
from .text import normalize_phrase

EXIT_RUNTIME = 1
EXIT_VALIDATION = 2


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _build_config(config_path: str | None, **overrides) -> pipeline.PipelineConfig:
    overrides = {k: v for k, v in overrides.items() if v not in (None, (), [])}
    if "dictionaries" in overrides:
        overrides["dictionaries"] = list(overrides["dictionaries"])
    try:
        if config_path:
            return pipeline.PipelineConfig.from_file(config_path, **overrides)
        return pipeline.PipelineConfig(**overrides)
    except (OSError, json.JSONDecodeError, TypeError, pipeline.PipelineError) as exc:
        _fail(f"bad config: {exc}", EXIT_VALIDATION)


def _run_from(cfg: pipeline.PipelineConfig, stage: str, run_all: bool) -> None:
    try:
        pipeline.run_stages(cfg, stage, run_all)
    except pipeline.ConfigMismatchError as exc:
        _fail(str(exc), EXIT_VALIDATION)
    except pipeline.PipelineError as exc:
        _fail(str(exc), EXIT_VALIDATION)
    except Exception as exc:
        _fail(f"{type(exc).__name__}: {exc}", EXIT_RUNTIME)


@click.group()
def main():
    """Graph-query search over a document corpus."""


config_opt = click.option("--config", "config_path", type=click.Path(exists=True), help="pipeline config JSON")
out_opt = click.option("--out", "out_dir", type=click.Path(), help="artifact output directory")
all_opt = click.option("--all", "run_all", is_flag=True, help="continue through the remaining pipeline stages")


@main.command()
@config_opt
@click.option("--corpus", "corpus_csv", type=click.Path(), help="corpus metadata CSV")
@click.option("--citations", "citations_csv", type=click.Path(), help="citation snapshot CSV (doi,count)")
@click.option("--journals", "journals_csv", type=click.Path(), help="journal name table CSV (abbrev,full)")
@click.option("--dict", "dictionaries", type=click.Path(), multiple=True, help="ontology dictionary TSV")
@out_opt
@all_opt
def ingest(config_path, corpus_csv, citations_csv, journals_csv, dictionaries, out_dir, run_all):
    """Parse, clean, deduplicate and augment the corpus metadata."""
    cfg = _build_config(
        config_path,
        corpus_csv=corpus_csv,
        citations_csv=citations_csv,
        journals_csv=journals_csv,
        dictionaries=dictionaries or None,
        out_dir=out_dir,
    )
    if not cfg.corpus_csv:
        _fail("no corpus CSV configured (use --corpus or the config file)", EXIT_VALIDATION)
    _run_from(cfg, "ingest", run_all)
    click.echo(f"ingest done -> {cfg.out_dir}")


@main.command()
@config_opt
@click.option("--dict", "dictionaries", type=click.Path(), multiple=True, help="ontology dictionary TSV")
@out_opt
@all_opt
def annotate(config_path, dictionaries, out_dir, run_all):
    """Recognize and curate ontology concepts in the publication table."""
    cfg = _build_config(config_path, dictionaries=dictionaries or None, out_dir=out_dir)
    if not cfg.dictionaries:
        _fail("no dictionaries configured (use --dict or the config file)", EXIT_VALIDATION)
    _run_from(cfg, "annotate", run_all)
    click.echo(f"annotate done -> {cfg.out_dir}")


@main.command("build-network")
@config_opt
@out_opt
@all_opt
def build_network(config_path, out_dir, run_all):
    """Compute co-occurrence statistics, prune, and emit the network."""
    cfg = _build_config(config_path, out_dir=out_dir)
    _run_from(cfg, "build-network", run_all)
    click.echo(f"build-network done -> {cfg.out_dir}")


@main.command()
@config_opt
@out_opt
def index(config_path, out_dir):
    """Build the inverted index and the keyword baseline index."""
    cfg = _build_config(config_path, out_dir=out_dir)
    _run_from(cfg, "index", run_all=False)
    click.echo(f"index done -> {cfg.out_dir}")


@main.command()
@click.argument("query_file", type=click.Path(exists=True))
@click.option("--data-dir", required=True, type=click.Path(exists=True), help="artifact directory")
@click.option("--expand-only", is_flag=True, help="print candidate paths without retrieving")
@click.option("--top", default=0, type=int, help="limit printed results (0 = all)")
@click.option("--format", "fmt", default="json", type=click.Choice(["json", "table"]))
def query(query_file, data_dir, expand_only, top, fmt):
    """Run a graph query file against built artifacts."""
    try:
        artifacts = pipeline.load_artifacts(data_dir)
        q, selections = load_query_file(query_file)
    except pipeline.PipelineError as exc:
        _fail(str(exc), EXIT_VALIDATION)
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        _fail(f"bad query file: {exc}", EXIT_VALIDATION)
    try:
        if expand_only:
            from .engine import find_paths, validate_query

            validate_query(q, artifacts.net)
            expansions = find_paths(q, artifacts.net)
            doc = {"query": q.to_json(), "expansions": [e.to_json() for e in expansions]}
            click.echo(json.dumps(doc, indent=2))
            return
        expansions, ranked = run_query(q, artifacts.net, artifacts.inverted, artifacts.publications, selections)
    except ValidationError as exc:
        _fail(str(exc), EXIT_VALIDATION)
    except QueryError as exc:
        _fail(str(exc), EXIT_VALIDATION)
    if top > 0:
        ranked = ranked[:top]
    if fmt == "table":
        click.echo(f"{'pub_id':<16} {'score':>8} {'npmi_sum':>9} {'date':>11}  title")
        for r in ranked:
            d = r.to_json()
            click.echo(f"{d['pub_id']:<16} {d['score']:>8.4f} {d['npmi_sum']:>9.4f} {d['publish_date']:>11}  {d['title'][:60]}")
    else:
        doc = {
            "query": q.to_json(),
            "expansions": [e.to_json() for e in expansions],
            "results": [r.to_json() for r in ranked],
        }
        click.echo(json.dumps(doc, indent=2))


@main.command()
@click.argument("terms", nargs=-1, required=True)
@click.option("--data-dir", required=True, type=click.Path(exists=True))
@click.option("--mode", default="conjunctive", type=click.Choice(["conjunctive", "disjunctive"]))
@click.option("--format", "fmt", default="json", type=click.Choice(["json", "table"]))
def keyword(terms, data_dir, mode, fmt):
    """Full-text keyword baseline over titles and abstracts.

    Ranking is match count (labeled as such), not an engine relevance score.
    """
    try:
        artifacts = pipeline.load_artifacts(data_dir)
    except pipeline.PipelineError as exc:
        _fail(str(exc), EXIT_VALIDATION)
    normalized = [t for term in terms for t in normalize_phrase(term).split()]
    hits = keyword_search(artifacts.keyword, normalized, mode)
    if fmt == "table":
        for pub_id in hits:
            click.echo(pub_id)
    else:
        click.echo(json.dumps({"terms": normalized, "mode": mode, "ranking": "match_count", "results": hits}, indent=2))


@main.command()
@click.option("--data-dir", required=True, type=click.Path(exists=True))
@click.option("--sizes", default="2,4,6,8,10", help="comma-separated query node counts")
@click.option("--reps", default=10, type=int)
@click.option("--seed", default=0, type=int)
@click.option("--csv", "csv_path", type=click.Path(), help="write box-plot-ready CSV here")
def bench(data_dir, sizes, reps, seed, csv_path):
    """Time matching and retrieval on random-walk-sampled queries."""
    try:
        artifacts = pipeline.load_artifacts(data_dir)
        size_list = [int(s) for s in sizes.split(",") if s.strip()]
    except pipeline.PipelineError as exc:
        _fail(str(exc), EXIT_VALIDATION)
    except ValueError as exc:
        _fail(f"bad --sizes: {exc}", EXIT_VALIDATION)
    try:
        results = bench_mod.run_bench(
            artifacts.net, artifacts.inverted, artifacts.publications, size_list, reps=reps, seed=seed
        )
    except bench_mod.BenchError as exc:
        _fail(str(exc), EXIT_VALIDATION)
    if csv_path:
        Path(csv_path).write_text(bench_mod.bench_csv(results), encoding="utf-8")
    click.echo(json.dumps(results, indent=2))


@main.command()
@click.option("--data-dir", required=True, type=click.Path(exists=True), envvar="COOCSEARCH_DATA_DIR")
@click.option("--port", default=8000, type=int, envvar="COOCSEARCH_PORT")
@click.option("--host", default="127.0.0.1", envvar="COOCSEARCH_HOST")
@click.option("--session-ttl", default=24 * 3600.0, type=float, envvar="COOCSEARCH_SESSION_TTL")
def serve(data_dir, port, host, session_ttl):
    """Run the HTTP service over built artifacts."""
    import uvicorn

    from .service import create_app

    try:
        artifacts = pipeline.load_artifacts(data_dir)
    except pipeline.PipelineError as exc:
        _fail(str(exc), EXIT_VALIDATION)
    app = create_app(artifacts, session_ttl=session_ttl)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
