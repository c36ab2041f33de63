"""Command-line pipeline: validate -> classify -> metrics/hindex/simil ->
report, plus synthetic-corpus generation.

Every analysis subcommand is deterministic: rerunning with identical
inputs and options reproduces every CSV artifact byte for byte (the run
manifest carries wall-clock and memory measurements and is excluded from
that guarantee), and results do not depend on ``--threads``.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import resource
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .classify import classify_all, read_classifications, write_classifications
from .corpus import Corpus, CorpusError, eligible_authors, load_corpus
from .graph import build_collaboration_index, build_edges, export_edges
from .hindex import (
    HindexTally,
    attribution_curve,
    attribution_distribution,
    finalize_decompositions,
    individual_exclusion_table,
)
from .metrics import (
    AgeCurveTally,
    CitationAgeTally,
    ProfileTally,
    compute_inflation_weights,
    finalize_profiles,
    heatmap_by_production_and_age,
    percentile_strata,
)
from .pipeline import run_edge_tallies, run_record_tallies
from .synth import SynthConfig, generate_with_stats, write_corpus
from .textsim import (
    SimilarityTally,
    build_vectors,
    similarity_by_citation_age,
    similarity_by_selfref_percentile,
    similarity_histograms,
    similarity_means,
    stopwords_sha256,
)

CLASSIFICATIONS_FILE = "classifications.tsv"
EDGES_FILE = "edges.tsv"
MANIFEST_FILE = "run_manifest.json"

FIG1_COLUMNS = ["domain", "side", "age_bin", "citation_type",
                "pct_pooled", "pct_author_mean", "pct_pooled_weighted",
                "n_events", "n_authors"]
FIGS2_S5_COLUMNS = ["domain", "pubs_bin"] + FIG1_COLUMNS[1:]
FIGS6_COLUMNS = ["side", "citation_type", "publication_age", "events",
                 "mean_per_paper", "normalized"]
FIGS7_COLUMNS = ["discipline", "pubs_bin", "group", "n_authors",
                 "mean_self_reference_rate", "mean_external_citations",
                 "share_women", "mean_first_pub_year", "low_support"]
FIGS8_COLUMNS = ["pubs_bin", "career_bin", "n_authors",
                 "mean_self_citation_pct", "mean_self_reference_pct", "low_support"]
WEIGHTS_COLUMNS = ["year", "n_papers", "n_references", "mu_ref", "weight"]
FIG2_COLUMNS = ["domain", "h_obs", "n_authors", "mean_pct_direct",
                "mean_pct_direct_coauthor", "mean_pct_direct_coauthor_collab",
                "low_support"]
FIGS10_COLUMNS = ["domain", "h_obs", "n_authors",
                  "mean_drop_direct", "mean_pct_direct",
                  "mean_drop_coauthor", "mean_pct_coauthor",
                  "mean_drop_collaborator", "mean_pct_collaborator", "low_support"]
FIGS11_COLUMNS = ["h_obs", "level", "bin_lo", "bin_hi", "n_authors"]
FIG3A_COLUMNS = ["discipline", "citation_type", "bin_lo", "bin_hi", "n_authors"]
FIG3B_COLUMNS = ["discipline", "citation_type", "similarity_author_mean",
                 "similarity_pooled", "n_authors", "n_records"]
FIG3C_COLUMNS = ["citation_age_bin", "citation_type", "similarity_author_mean",
                 "similarity_pooled", "n_authors", "n_records"]
FIG3D_COLUMNS = ["group", "n_authors", "mean_self_reference_rate",
                 "mean_direct_reference_similarity", "low_support"]
FIGS9_COLUMNS = ["gender", "discipline", "citation_type",
                 "similarity_author_mean", "n_authors"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: Path, columns: Sequence[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row.get(col)) for col in columns) + "\n")


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


class _Run:
    """Collects manifest fields while a subcommand executes."""

    def __init__(self, command: str, out_dir: Path, options: dict):
        self.command = command
        self.out_dir = out_dir
        self.options = options
        self.inputs: dict[str, str] = {}
        self.counts: dict = {}
        self.coverage: dict = {}
        self.artifacts: list[str] = []
        self.notes: list[str] = []
        self.started = time.monotonic()
        out_dir.mkdir(parents=True, exist_ok=True)

    def add_input(self, path: Optional[Path]) -> None:
        if path is not None:
            self.inputs[str(path)] = _sha256(path)

    def record_corpus(self, corpus: Corpus) -> None:
        self.counts.update(corpus.validation_report())

    def csv(self, name: str, columns, rows) -> None:
        write_csv(self.out_dir / name, columns, rows)
        self.artifacts.append(name)

    def finish(self) -> None:
        manifest = {
            "tool": "selfcite",
            "version": __version__,
            "command": self.command,
            "options": self.options,
            "inputs": self.inputs,
            "counts": self.counts,
            "coverage": self.coverage,
            "artifacts": self.artifacts,
            "notes": self.notes,
            "elapsed_seconds": round(time.monotonic() - self.started, 3),
            "peak_rss_kb": resource.getrusage(resource.RUSAGE_SELF).ru_maxrss,
        }
        path = self.out_dir / MANIFEST_FILE
        path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")


def _load(args, run: _Run) -> Corpus:
    papers = Path(args.papers)
    authors = Path(args.authors) if args.authors else None
    corpus = load_corpus(papers, authors)
    run.add_input(papers)
    if authors is not None:
        run.add_input(authors)
    run.record_corpus(corpus)
    return corpus


def _common_options(args) -> dict:
    options = {}
    for name in ("papers", "authors", "out", "min_pubs", "n_percentiles",
                 "weighting", "agg_mode", "threads", "seed", "config",
                 "individual"):
        if hasattr(args, name):
            value = getattr(args, name)
            options[name] = str(value) if isinstance(value, Path) else value
    return options


def _weights_rows(weights) -> list[dict]:
    rows = []
    for year in sorted(weights.papers_per_year):
        rows.append({
            "year": year,
            "n_papers": weights.papers_per_year[year],
            "n_references": weights.refs_per_year[year],
            "mu_ref": weights.mu_ref[year],
            "weight": weights.weight.get(year),
        })
    return rows


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_validate(args) -> int:
    run = _Run("validate", Path(args.out), _common_options(args))
    corpus = _load(args, run)
    run.counts["eligible_authors"] = len(eligible_authors(corpus, args.min_pubs))
    run.finish()
    print(f"validate: {run.counts['papers']} papers, {run.counts['authors']} authors, "
          f"{run.counts['unresolved_references']} unresolved references")
    return 0


def cmd_classify(args) -> int:
    run = _Run("classify", Path(args.out), _common_options(args))
    corpus = _load(args, run)
    edges = build_edges(corpus)
    collab = build_collaboration_index(corpus)
    run.counts["edges"] = len(edges)
    run.counts["collaboration_pairs"] = len(collab)

    export_edges(edges, run.out_dir / EDGES_FILE)
    run.artifacts.append(EDGES_FILE)
    n_rows = write_classifications(
        classify_all(corpus, edges, collab), run.out_dir / CLASSIFICATIONS_FILE
    )
    run.artifacts.append(CLASSIFICATIONS_FILE)
    run.counts["classification_rows"] = n_rows
    run.finish()
    print(f"classify: {len(edges)} edges, {n_rows} classification rows")
    return 0


def _metrics_outputs(run: _Run, corpus, profile_tally, age_tally, citeage_tally,
                     weights, eligible, n_percentiles) -> None:
    profiles = finalize_profiles(corpus, profile_tally, weights)

    curve = age_tally.finalize(weights=weights)
    run.csv("fig1_age_curves.csv", FIG1_COLUMNS, curve.rows)
    production = age_tally.finalize(by_production=True, weights=weights)
    run.csv("figS2_S5_age_curves_by_production.csv", FIGS2_S5_COLUMNS, production.rows)
    run.coverage["age_curve_skipped_ineligible"] = curve.skipped_ineligible
    run.coverage["age_curve_skipped_preage"] = curve.skipped_preage

    run.csv("figS6_citation_age.csv", FIGS6_COLUMNS,
            citeage_tally.finalize(len(corpus.papers)))
    run.coverage["citation_age_negative_excluded"] = citeage_tally.negative_excluded

    strata = percentile_strata(profiles, n_percentiles, include_authors=eligible)
    run.csv("figS7_strata.csv", FIGS7_COLUMNS, strata.rows)
    run.coverage["strata_excluded_undefined_rate"] = strata.excluded_undefined
    run.coverage["strata_excluded_out_of_bins"] = strata.excluded_out_of_bins

    run.csv("figS8_heatmap.csv", FIGS8_COLUMNS,
            heatmap_by_production_and_age(profiles, include_authors=eligible))

    if weights is not None:
        run.csv("inflation_weights.csv", WEIGHTS_COLUMNS, _weights_rows(weights))
        run.coverage["zero_reference_years"] = list(weights.zero_reference_years)


def cmd_metrics(args) -> int:
    run = _Run("metrics", Path(args.out), _common_options(args))
    corpus = _load(args, run)
    edges = build_edges(corpus)
    collab = build_collaboration_index(corpus)
    run.counts["edges"] = len(edges)
    eligible = eligible_authors(corpus, args.min_pubs)
    run.counts["eligible_authors"] = len(eligible)
    weights = compute_inflation_weights(corpus) if args.weighting else None

    profile_tally = ProfileTally()
    age_tally = AgeCurveTally.for_corpus(corpus, include=eligible)
    citeage_tally = CitationAgeTally()
    run_edge_tallies(corpus, edges, collab,
                     [profile_tally, age_tally, citeage_tally], threads=args.threads)
    _metrics_outputs(run, corpus, profile_tally, age_tally, citeage_tally,
                     weights, eligible, args.n_percentiles)
    run.finish()
    print(f"metrics: wrote {len(run.artifacts)} artifacts to {run.out_dir}")
    return 0


def _hindex_outputs(run: _Run, corpus, hindex_tally, eligible, individual) -> None:
    decomps = finalize_decompositions(corpus, hindex_tally, include_authors=eligible)
    domains = {aid: e.modal_discipline for aid, e in corpus.author_index.items()}
    run.csv("fig2_attribution_curve.csv", FIG2_COLUMNS,
            attribution_curve(decomps, domains))
    if individual:
        run.csv("figS10_individual.csv", FIGS10_COLUMNS,
                individual_exclusion_table(decomps, domains))
    run.csv("figS11_distributions.csv", FIGS11_COLUMNS,
            attribution_distribution(decomps))
    run.counts["decomposed_authors"] = len(decomps)


def cmd_hindex(args) -> int:
    run = _Run("hindex", Path(args.out), _common_options(args))
    corpus = _load(args, run)
    edges = build_edges(corpus)
    collab = build_collaboration_index(corpus)
    run.counts["edges"] = len(edges)
    eligible = eligible_authors(corpus, args.min_pubs)
    run.counts["eligible_authors"] = len(eligible)

    hindex_tally = HindexTally()
    run_edge_tallies(corpus, edges, collab, [hindex_tally], threads=args.threads)
    _hindex_outputs(run, corpus, hindex_tally, eligible, args.individual)
    run.finish()
    print(f"hindex: wrote {len(run.artifacts)} artifacts to {run.out_dir}")
    return 0


def _simil_outputs(run: _Run, corpus, sim_tally, profile_tally, eligible,
                   n_percentiles) -> None:
    profiles = finalize_profiles(corpus, profile_tally, None)
    eligible_profiles = {aid: p for aid, p in profiles.items() if aid in eligible}

    run.csv("fig3a_distributions.csv", FIG3A_COLUMNS,
            similarity_histograms(sim_tally, eligible_profiles))
    run.csv("fig3b_means.csv", FIG3B_COLUMNS,
            similarity_means(sim_tally, eligible_profiles, key="discipline"))
    run.csv("fig3c_by_age.csv", FIG3C_COLUMNS, similarity_by_citation_age(sim_tally))
    run.csv("fig3d_by_selfref.csv", FIG3D_COLUMNS,
            similarity_by_selfref_percentile(sim_tally, eligible_profiles,
                                             n_groups=n_percentiles))
    run.csv("figS9_by_gender.csv", FIGS9_COLUMNS,
            similarity_means(sim_tally, eligible_profiles, key="gender"))
    run.coverage["similarity"] = sim_tally.coverage.as_dict()
    run.coverage["similarity_negative_age_records"] = sim_tally.negative_age_records
    run.coverage["stopwords_sha256"] = stopwords_sha256()


def cmd_simil(args) -> int:
    run = _Run("simil", Path(args.out), _common_options(args))
    corpus = _load(args, run)
    edges = build_edges(corpus)
    collab = build_collaboration_index(corpus)
    run.counts["edges"] = len(edges)
    eligible = eligible_authors(corpus, args.min_pubs)
    run.counts["eligible_authors"] = len(eligible)

    vectors = build_vectors(corpus)
    sim_tally = SimilarityTally(vectors, include=eligible)
    profile_tally = ProfileTally()
    run_edge_tallies(corpus, edges, collab, [sim_tally, profile_tally],
                     threads=args.threads)
    _simil_outputs(run, corpus, sim_tally, profile_tally, eligible,
                   args.n_percentiles)
    run.finish()
    print(f"simil: wrote {len(run.artifacts)} artifacts to {run.out_dir}")
    return 0


def cmd_report(args) -> int:
    run = _Run("report", Path(args.out), _common_options(args))
    classifications_path = run.out_dir / CLASSIFICATIONS_FILE
    if not classifications_path.exists():
        raise CorpusError(
            f"missing artifact {CLASSIFICATIONS_FILE} in {run.out_dir}; "
            "run the classify subcommand first"
        )
    corpus = _load(args, run)
    run.add_input(classifications_path)
    eligible = eligible_authors(corpus, args.min_pubs)
    run.counts["eligible_authors"] = len(eligible)
    run.counts["edges"] = corpus.resolvable_references
    weights = compute_inflation_weights(corpus) if args.weighting else None

    profile_tally = ProfileTally()
    age_tally = AgeCurveTally.for_corpus(corpus, include=eligible)
    citeage_tally = CitationAgeTally()
    hindex_tally = HindexTally()
    tallies = [profile_tally, age_tally, citeage_tally, hindex_tally]

    sim_tally = None
    if corpus.papers_with_abstract > 0:
        vectors = build_vectors(corpus)
        sim_tally = SimilarityTally(vectors, include=eligible)
        tallies.append(sim_tally)
    else:
        run.notes.append("no abstracts in corpus: similarity tables are header-only")

    run_record_tallies(read_classifications(classifications_path, corpus), tallies)

    _metrics_outputs(run, corpus, profile_tally, age_tally, citeage_tally,
                     weights, eligible, args.n_percentiles)
    _hindex_outputs(run, corpus, hindex_tally, eligible, args.individual)
    if sim_tally is not None:
        _simil_outputs(run, corpus, sim_tally, profile_tally, eligible,
                       args.n_percentiles)
    else:
        for name, columns in (
            ("fig3a_distributions.csv", FIG3A_COLUMNS),
            ("fig3b_means.csv", FIG3B_COLUMNS),
            ("fig3c_by_age.csv", FIG3C_COLUMNS),
            ("fig3d_by_selfref.csv", FIG3D_COLUMNS),
            ("figS9_by_gender.csv", FIGS9_COLUMNS),
        ):
            run.csv(name, columns, [])
    run.finish()
    print(f"report: wrote {len(run.artifacts)} artifacts to {run.out_dir}")
    return 0


def cmd_synth(args) -> int:
    run = _Run("synth", Path(args.out), _common_options(args))
    config = SynthConfig.from_file(args.config)
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
        config.validate()
    run.add_input(Path(args.config))
    corpus, stats = generate_with_stats(config)
    meta = write_corpus(corpus, run.out_dir, config, stats)
    run.artifacts.extend(["papers.jsonl", "authors.jsonl", "synth_meta.json"])
    run.counts.update({k: v for k, v in meta.items() if k not in ("config", "draws")})
    run.finish()
    print(f"synth: {meta['papers']} papers, {meta['total_references']} references "
          f"(seed {config.seed})")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_io_options(sub, authors_required=False):
    sub.add_argument("--papers", required=True, help="papers file (one JSON object per line)")
    sub.add_argument("--authors", default=None, help="optional authors file")
    sub.add_argument("--out", required=True, help="output directory")


def _add_analysis_options(sub):
    sub.add_argument("--min-pubs", type=int, default=5, dest="min_pubs",
                     help="eligibility: authors need strictly more papers than this (default 5)")
    sub.add_argument("--threads", type=int, default=1,
                     help="worker cap for data-parallel tallies (results are thread-count independent)")


def build_parser() -> _Parser:
    parser = _Parser(prog="selfcite", description=__doc__)
    parser.add_argument("--version", action="version", version=f"selfcite {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    p = subs.add_parser("validate", help="load and validate a corpus")
    _add_io_options(p)
    _add_analysis_options(p)
    p.set_defaults(func=cmd_validate)

    p = subs.add_parser("classify", help="export per-author edge classifications")
    _add_io_options(p)
    _add_analysis_options(p)
    p.set_defaults(func=cmd_classify)

    p = subs.add_parser("metrics", help="age curves, strata, heatmap, inflation weights")
    _add_io_options(p)
    _add_analysis_options(p)
    p.add_argument("--n-percentiles", type=int, default=100, dest="n_percentiles")
    p.add_argument("--no-weighting", action="store_false", dest="weighting",
                   help="skip citation-inflation weighting")
    p.add_argument("--agg-mode", choices=("pooled", "author-mean"), default="pooled",
                   dest="agg_mode", help="which aggregation column is canonical (both are emitted)")
    p.set_defaults(func=cmd_metrics)

    p = subs.add_parser("hindex", help="h-index decomposition tables")
    _add_io_options(p)
    _add_analysis_options(p)
    p.add_argument("--no-individual", action="store_false", dest="individual",
                   help="skip the single-type exclusion table")
    p.set_defaults(func=cmd_hindex)

    p = subs.add_parser("simil", help="abstract-similarity tables")
    _add_io_options(p)
    _add_analysis_options(p)
    p.add_argument("--n-percentiles", type=int, default=100, dest="n_percentiles")
    p.add_argument("--agg-mode", choices=("pooled", "author-mean"), default="author-mean",
                   dest="agg_mode")
    p.set_defaults(func=cmd_simil)

    p = subs.add_parser("report", help="all tables from a prior classify export")
    _add_io_options(p)
    _add_analysis_options(p)
    p.add_argument("--n-percentiles", type=int, default=100, dest="n_percentiles")
    p.add_argument("--no-weighting", action="store_false", dest="weighting")
    p.add_argument("--agg-mode", choices=("pooled", "author-mean"), default="pooled",
                   dest="agg_mode")
    p.add_argument("--no-individual", action="store_false", dest="individual")
    p.set_defaults(func=cmd_report)

    p = subs.add_parser("synth", help="generate a synthetic corpus")
    p.add_argument("--config", required=True, help="generator config (JSON)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.set_defaults(func=cmd_synth)
    return parser


def _check_numeric(args) -> None:
    if getattr(args, "min_pubs", 0) < 0:
        raise UsageError("--min-pubs must be >= 0")
    if getattr(args, "n_percentiles", 1) < 1:
        raise UsageError("--n-percentiles must be >= 1")
    if getattr(args, "threads", 1) < 1:
        raise UsageError("--threads must be >= 1")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _check_numeric(args)
    except UsageError as exc:
        print(f"selfcite: usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except CorpusError as exc:
        print(f"selfcite: data error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"selfcite: i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
