"""Four-way citation typing from each involved author's perspective.

Every (author, edge, perspective) triple receives exactly one type, with
precedence Direct > CoAuthor > Collaborator > External so the taxonomy is a
partition:

* Direct: the author is on both the citing and the cited paper.
* CoAuthor: another author on the author's side of the edge is on the
  opposite paper.
* Collaborator: some author of the opposite paper co-published with the
  author strictly before the citing year.
* External: none of the above.

The collaborator test is evaluated against the perspective author alone,
never against their whole paper.
"""

from __future__ import annotations

from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Union

from .corpus import Corpus, CorpusError
from .graph import CitationEdge, CollaborationIndex


class CitationType(str, Enum):
    DIRECT = "direct"
    COAUTHOR = "coauthor"
    COLLABORATOR = "collaborator"
    EXTERNAL = "external"


class Perspective(str, Enum):
    REFERENCE = "reference"  # author belongs to the citing paper
    CITATION = "citation"    # author belongs to the cited paper


CITATION_TYPES = tuple(CitationType)

_DIRECT = CitationType.DIRECT
_COAUTHOR = CitationType.COAUTHOR
_COLLABORATOR = CitationType.COLLABORATOR
_EXTERNAL = CitationType.EXTERNAL


class AuthorEdgeClass(NamedTuple):
    author_id: str
    edge: CitationEdge
    perspective: Perspective
    ctype: CitationType


def _side_types(side_authors, side_set, other_set, other_authors, collab, citing_year):
    """Types for every author on one side of an edge, in author order."""
    inter = side_set & other_set
    out = []
    neighbors = collab.neighbors
    for a in side_authors:
        if a in other_set:
            out.append(_DIRECT)
        elif inter:
            # a is not in the intersection, so any overlap is another author
            out.append(_COAUTHOR)
        else:
            ctype = _EXTERNAL
            adj = neighbors(a)
            if adj:
                for b in other_authors:
                    joint = adj.get(b)
                    if joint is not None and joint < citing_year:
                        ctype = _COLLABORATOR
                        break
            out.append(ctype)
    return out


def classify_reference(
    edge: CitationEdge, author: str, corpus: Corpus, collab: CollaborationIndex
) -> CitationType:
    """Type of one reference from a citing author's perspective."""
    citing = corpus.papers[edge.citing_id]
    cited = corpus.papers[edge.cited_id]
    if author not in citing.author_ids:
        raise ValueError(f"author {author!r} is not an author of citing paper {edge.citing_id}")
    types = _side_types(
        (author,), frozenset(citing.author_ids), frozenset(cited.author_ids),
        cited.author_ids, collab, edge.citing_year,
    )
    return types[0]


def classify_citation(
    edge: CitationEdge, author: str, corpus: Corpus, collab: CollaborationIndex
) -> CitationType:
    """Type of one received citation from a cited author's perspective."""
    citing = corpus.papers[edge.citing_id]
    cited = corpus.papers[edge.cited_id]
    if author not in cited.author_ids:
        raise ValueError(f"author {author!r} is not an author of cited paper {edge.cited_id}")
    types = _side_types(
        (author,), frozenset(cited.author_ids), frozenset(citing.author_ids),
        citing.author_ids, collab, edge.citing_year,
    )
    return types[0]


def classify_paper_level(edge: CitationEdge, corpus: Corpus) -> bool:
    """Paper-level self-citation: citing and cited author sets overlap."""
    citing = corpus.papers[edge.citing_id]
    cited = corpus.papers[edge.cited_id]
    return not frozenset(citing.author_ids).isdisjoint(cited.author_ids)


def build_author_sets(corpus: Corpus) -> dict[str, frozenset[str]]:
    return {pid: frozenset(p.author_ids) for pid, p in corpus.papers.items()}


def iter_edge_types(
    corpus: Corpus,
    edges: Iterable[CitationEdge],
    collab: CollaborationIndex,
    author_sets: dict[str, frozenset[str]] | None = None,
):
    """Per edge: (edge, citing_authors, reference_types, cited_authors,
    citation_types), with types aligned to author positions."""
    papers = corpus.papers
    if author_sets is None:
        author_sets = build_author_sets(corpus)
    for edge in edges:
        citing_authors = papers[edge.citing_id].author_ids
        cited_authors = papers[edge.cited_id].author_ids
        citing_set = author_sets[edge.citing_id]
        cited_set = author_sets[edge.cited_id]
        year = edge.citing_year
        ref_types = _side_types(citing_authors, citing_set, cited_set, cited_authors, collab, year)
        cite_types = _side_types(cited_authors, cited_set, citing_set, citing_authors, collab, year)
        yield edge, citing_authors, ref_types, cited_authors, cite_types


def classify_all(
    corpus: Corpus,
    edges: Iterable[CitationEdge],
    collab: CollaborationIndex,
) -> Iterator[AuthorEdgeClass]:
    """Stream of one record per (edge, citing author) and one per
    (edge, cited author), ordered by (citing_id, cited_id, author position)
    with reference-side records first within each edge."""
    for edge, citing_authors, ref_types, cited_authors, cite_types in iter_edge_types(
        corpus, edges, collab
    ):
        for a, t in zip(citing_authors, ref_types):
            yield AuthorEdgeClass(a, edge, Perspective.REFERENCE, t)
        for a, t in zip(cited_authors, cite_types):
            yield AuthorEdgeClass(a, edge, Perspective.CITATION, t)


def write_classifications(
    records: Iterable[AuthorEdgeClass], path: Union[str, Path]
) -> int:
    """Tab-separated export: author_id, citing_id, cited_id, perspective,
    ctype. Returns the number of rows written."""
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(
                f"{rec.author_id}\t{rec.edge.citing_id}\t{rec.edge.cited_id}"
                f"\t{rec.perspective.value}\t{rec.ctype.value}\n"
            )
            n += 1
    return n


def read_classifications(
    path: Union[str, Path], corpus: Corpus
) -> Iterator[AuthorEdgeClass]:
    """Parse a classification export back into records; edge years are
    re-derived from the corpus.

    Rows for one edge are contiguous in the export, so the edge tuple is
    rebuilt only when the (citing, cited) pair changes.
    """
    papers = corpus.papers
    perspectives = {p.value: p for p in Perspective}
    ctypes = {t.value: t for t in CitationType}
    last_pair = None
    edge = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.rstrip("\n").split("\t")
            if parts == [""]:
                continue
            if len(parts) != 5:
                raise CorpusError(f"classifications line {lineno}: expected 5 tab-separated fields")
            author_id, citing_id, cited_id, perspective, ctype = parts
            if (citing_id, cited_id) != last_pair:
                citing = papers.get(citing_id)
                cited = papers.get(cited_id)
                if citing is None or cited is None:
                    raise CorpusError(
                        f"classifications line {lineno}: unknown paper id "
                        f"'{citing_id if citing is None else cited_id}'"
                    )
                edge = CitationEdge(citing_id, cited_id, citing.year, cited.year)
                last_pair = (citing_id, cited_id)
            persp = perspectives.get(perspective)
            ct = ctypes.get(ctype)
            if persp is None or ct is None:
                raise CorpusError(
                    f"classifications line {lineno}: unknown "
                    f"{'perspective' if persp is None else 'citation type'} "
                    f"'{perspective if persp is None else ctype}'"
                )
            yield AuthorEdgeClass(author_id, edge, persp, ct)
