"""Deterministic, optionally threaded execution of edge tallies.

The edge list is cut into fixed-size chunks regardless of the worker
count; each chunk is classified into fresh tally instances and partials
are merged in chunk order. Integer tallies are associative anyway, and
floating sums see the exact same association for any ``threads`` value,
so runs are bit-identical whether one or many workers execute the chunks.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

from .classify import build_author_sets, iter_edge_types
from .corpus import Corpus
from .graph import CitationEdge, CollaborationIndex

DEFAULT_CHUNK_SIZE = 65536


def run_edge_tallies(
    corpus: Corpus,
    edges: Sequence[CitationEdge],
    collab: CollaborationIndex,
    tallies: Sequence,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> None:
    """Classify every edge once and feed each tally's ``add_edge``.

    ``tallies`` are mutated in place. Each must provide ``spawn()``,
    ``add_edge(edge, citing_authors, ref_types, cited_authors, cite_types)``
    and ``merge(other)``.
    """
    if threads < 1:
        raise ValueError("threads must be >= 1")
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")

    author_sets = build_author_sets(corpus)
    chunks = [edges[i : i + chunk_size] for i in range(0, len(edges), chunk_size)]

    def process(chunk):
        parts = [t.spawn() for t in tallies]
        for edge, citing, ref_types, cited, cite_types in iter_edge_types(
            corpus, chunk, collab, author_sets
        ):
            for part in parts:
                part.add_edge(edge, citing, ref_types, cited, cite_types)
        return parts

    if threads == 1 or len(chunks) <= 1:
        results = map(process, chunks)
        for parts in results:
            for tally, part in zip(tallies, parts):
                tally.merge(part)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for parts in pool.map(process, chunks):
                for tally, part in zip(tallies, parts):
                    tally.merge(part)


def run_record_tallies(records, tallies: Sequence) -> None:
    """Feed a classification record stream into ``add_record`` tallies."""
    for rec in records:
        for tally in tallies:
            tally.add_record(rec)
