"""Citation edges and the time-stamped co-authorship index.

Both structures are immutable after construction and safe for concurrent
reads. ``were_collaborators_before`` implements the strict-year reading of
"former collaborator": a joint paper in the citing year itself does not
establish prior collaboration.
"""

from __future__ import annotations

from itertools import combinations
from pathlib import Path
from typing import Mapping, NamedTuple, Optional, Union

from .corpus import Corpus

_EMPTY: dict = {}


class CitationEdge(NamedTuple):
    citing_id: str
    cited_id: str
    citing_year: int
    cited_year: int


def build_edges(corpus: Corpus) -> list[CitationEdge]:
    """One edge per resolvable (citing, cited) pair, sorted by
    (citing_id, cited_id). Unresolved references yield no edge."""
    papers = corpus.papers
    edges: list[CitationEdge] = []
    for pid in sorted(papers):
        p = papers[pid]
        year = p.year
        for rid in sorted(p.reference_ids):
            target = papers.get(rid)
            if target is not None:
                edges.append(CitationEdge(pid, rid, year, target.year))
    return edges


class CollaborationIndex:
    """Unordered author pairs mapped to the earliest joint publication year."""

    __slots__ = ("_adjacency", "n_pairs")

    def __init__(self) -> None:
        self._adjacency: dict[str, dict[str, int]] = {}
        self.n_pairs = 0

    def _add(self, a: str, b: str, year: int) -> None:
        adj_a = self._adjacency.setdefault(a, {})
        prev = adj_a.get(b)
        if prev is None:
            self.n_pairs += 1
            adj_a[b] = year
            self._adjacency.setdefault(b, {})[a] = year
        elif year < prev:
            adj_a[b] = year
            self._adjacency[b][a] = year

    def earliest_joint_year(self, a: str, b: str) -> Optional[int]:
        return self._adjacency.get(a, _EMPTY).get(b)

    def were_collaborators_before(self, a: str, b: str, year: int) -> bool:
        """True iff a and b share a joint paper strictly earlier than ``year``."""
        if a == b:
            raise ValueError("collaboration query requires two distinct authors")
        joint = self._adjacency.get(a, _EMPTY).get(b)
        return joint is not None and joint < year

    def neighbors(self, a: str) -> Mapping[str, int]:
        """Collaborators of ``a`` with earliest joint years (read-only view)."""
        return self._adjacency.get(a, _EMPTY)

    def pairs(self):
        for a, adj in self._adjacency.items():
            for b, year in adj.items():
                if a < b:
                    yield (a, b), year

    def __len__(self) -> int:
        return self.n_pairs


def build_collaboration_index(corpus: Corpus) -> CollaborationIndex:
    """All co-authorship pairs in the corpus with their earliest joint year."""
    index = CollaborationIndex()
    for p in corpus.papers.values():
        if len(p.author_ids) < 2:
            continue
        year = p.year
        for a, b in combinations(p.author_ids, 2):
            index._add(a, b, year)
    return index


def were_collaborators_before(
    index: CollaborationIndex, a: str, b: str, year: int
) -> bool:
    return index.were_collaborators_before(a, b, year)


def export_edges(edges: list[CitationEdge], path: Union[str, Path]) -> None:
    """Tab-separated edge list: citing_id, cited_id, citing_year, cited_year."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for e in edges:
            fh.write(f"{e.citing_id}\t{e.cited_id}\t{e.citing_year}\t{e.cited_year}\n")
