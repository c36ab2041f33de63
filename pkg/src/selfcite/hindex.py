"""h-index computation and its decomposition by citation type.

Exclusions are cumulative (direct; direct+coauthor; direct+coauthor+
collaborator), matching how network-driven gains accumulate; single-type
exclusions are computed alongside for the per-type view. Percentages are
expressed against the observed h-index. Raw citation counts are used
throughout: the h-index is defined on counts, not on inflation-weighted
values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .classify import AuthorEdgeClass, CitationType, Perspective
from .corpus import Corpus

_DIRECT = CitationType.DIRECT
_COAUTHOR = CitationType.COAUTHOR
_COLLABORATOR = CitationType.COLLABORATOR

#: Cumulative exclusion levels in order.
LEVELS = ("direct", "direct_coauthor", "direct_coauthor_collab")

#: Observed h-index values whose pct-attributable distributions are reported.
DEFAULT_H_BUCKETS = (5, 15, 30, 50)

HIST_BIN_WIDTH = 5
LOW_SUPPORT_AUTHORS = 5


def h_index(citation_counts: Iterable[int]) -> int:
    """Largest h such that at least h papers have at least h citations."""
    counts = sorted(citation_counts, reverse=True)
    h = 0
    for i, c in enumerate(counts, 1):
        if c >= i:
            h = i
        else:
            break
    return h


@dataclass(slots=True)
class HDecomposition:
    """Observed h-index and its value under cumulative and single-type
    citation exclusions, evaluated from this author's perspective."""

    author_id: str
    h_obs: int
    h_minus_direct: int
    h_minus_direct_coauthor: int
    h_minus_direct_coauthor_collab: int
    h_minus_coauthor_only: int
    h_minus_collaborator_only: int

    def _pct(self, h_excl: int) -> float:
        if self.h_obs == 0:
            return 0.0
        return 100.0 * (self.h_obs - h_excl) / self.h_obs

    @property
    def pct_direct(self) -> float:
        return self._pct(self.h_minus_direct)

    @property
    def pct_direct_coauthor(self) -> float:
        return self._pct(self.h_minus_direct_coauthor)

    @property
    def pct_direct_coauthor_collab(self) -> float:
        return self._pct(self.h_minus_direct_coauthor_collab)

    @property
    def pct_coauthor_only(self) -> float:
        return self._pct(self.h_minus_coauthor_only)

    @property
    def pct_collaborator_only(self) -> float:
        return self._pct(self.h_minus_collaborator_only)

    def pct_attributable(self, level: str) -> float:
        if level == "direct":
            return self.pct_direct
        if level == "direct_coauthor":
            return self.pct_direct_coauthor
        if level == "direct_coauthor_collab":
            return self.pct_direct_coauthor_collab
        raise ValueError(f"unknown exclusion level: {level!r}")


class HindexTally:
    """Citation counts per (author, own paper) broken down by type."""

    __slots__ = ("per_paper",)

    def __init__(self) -> None:
        # (author, cited paper) -> [total, direct, coauthor, collaborator]
        self.per_paper: dict = {}

    def spawn(self) -> "HindexTally":
        return HindexTally()

    def add_edge(self, edge, citing_authors, ref_types, cited_authors, cite_types):
        cited_id = edge.cited_id
        per_paper = self.per_paper
        for a, t in zip(cited_authors, cite_types):
            key = (a, cited_id)
            cell = per_paper.get(key)
            if cell is None:
                cell = [0, 0, 0, 0]
                per_paper[key] = cell
            cell[0] += 1
            if t is _DIRECT:
                cell[1] += 1
            elif t is _COAUTHOR:
                cell[2] += 1
            elif t is _COLLABORATOR:
                cell[3] += 1

    def add_record(self, rec: AuthorEdgeClass) -> None:
        if rec.perspective is not Perspective.CITATION:
            return
        key = (rec.author_id, rec.edge.cited_id)
        cell = self.per_paper.get(key)
        if cell is None:
            cell = [0, 0, 0, 0]
            self.per_paper[key] = cell
        cell[0] += 1
        t = rec.ctype
        if t is _DIRECT:
            cell[1] += 1
        elif t is _COAUTHOR:
            cell[2] += 1
        elif t is _COLLABORATOR:
            cell[3] += 1

    def merge(self, other: "HindexTally") -> None:
        per_paper = self.per_paper
        for key, src in other.per_paper.items():
            cell = per_paper.get(key)
            if cell is None:
                per_paper[key] = list(src)
            else:
                cell[0] += src[0]
                cell[1] += src[1]
                cell[2] += src[2]
                cell[3] += src[3]

    def decompose_author(self, author: str, publication_ids: Sequence[str]) -> HDecomposition:
        per_paper = self.per_paper
        totals = []
        minus_d = []
        minus_dc = []
        minus_dcc = []
        minus_c_only = []
        minus_l_only = []
        for pid in publication_ids:
            cell = per_paper.get((author, pid))
            if cell is None:
                total = d = c = l = 0
            else:
                total, d, c, l = cell
            totals.append(total)
            minus_d.append(total - d)
            minus_dc.append(total - d - c)
            minus_dcc.append(total - d - c - l)
            minus_c_only.append(total - c)
            minus_l_only.append(total - l)
        return HDecomposition(
            author_id=author,
            h_obs=h_index(totals),
            h_minus_direct=h_index(minus_d),
            h_minus_direct_coauthor=h_index(minus_dc),
            h_minus_direct_coauthor_collab=h_index(minus_dcc),
            h_minus_coauthor_only=h_index(minus_c_only),
            h_minus_collaborator_only=h_index(minus_l_only),
        )


def finalize_decompositions(
    corpus: Corpus,
    tally: HindexTally,
    include_authors: Optional[set] = None,
) -> dict[str, HDecomposition]:
    out: dict[str, HDecomposition] = {}
    for aid, entry in corpus.author_index.items():
        if include_authors is not None and aid not in include_authors:
            continue
        out[aid] = tally.decompose_author(aid, entry.publication_ids)
    return out


def decompose(
    author: str,
    classifications: Iterable[AuthorEdgeClass],
    corpus: Corpus,
) -> HDecomposition:
    """Decompose one author's h-index from a classification stream."""
    entry = corpus.author_index.get(author)
    if entry is None:
        raise ValueError(f"unknown author: {author!r}")
    tally = HindexTally()
    for rec in classifications:
        if rec.author_id == author:
            tally.add_record(rec)
    return tally.decompose_author(author, entry.publication_ids)


def decompose_all(
    corpus: Corpus,
    classifications: Iterable[AuthorEdgeClass],
    include_authors: Optional[set] = None,
) -> dict[str, HDecomposition]:
    tally = HindexTally()
    for rec in classifications:
        tally.add_record(rec)
    return finalize_decompositions(corpus, tally, include_authors)


def attribution_curve(
    decompositions: Mapping[str, HDecomposition],
    domains: Optional[Mapping[str, str]] = None,
) -> list[dict]:
    """Mean pct attributable per cumulative level, bucketed by exact
    observed h-index (and by domain when an author->domain map is given).
    Buckets under five authors are flagged."""
    buckets: dict = {}
    for aid, dec in decompositions.items():
        domain = domains.get(aid, "unknown") if domains is not None else "all"
        buckets.setdefault((domain, dec.h_obs), []).append(dec)
    rows = []
    for (domain, h_obs) in sorted(buckets):
        members = buckets[(domain, h_obs)]
        n = len(members)
        rows.append({
            "domain": domain,
            "h_obs": h_obs,
            "n_authors": n,
            "mean_pct_direct": sum(d.pct_direct for d in members) / n,
            "mean_pct_direct_coauthor": sum(d.pct_direct_coauthor for d in members) / n,
            "mean_pct_direct_coauthor_collab": sum(d.pct_direct_coauthor_collab for d in members) / n,
            "low_support": int(n < LOW_SUPPORT_AUTHORS),
        })
    return rows


def individual_exclusion_table(
    decompositions: Mapping[str, HDecomposition],
    domains: Optional[Mapping[str, str]] = None,
) -> list[dict]:
    """Absolute and relative impact of each citation type excluded on its
    own (direct / coauthor / collaborator), bucketed like the curve."""
    buckets: dict = {}
    for aid, dec in decompositions.items():
        domain = domains.get(aid, "unknown") if domains is not None else "all"
        buckets.setdefault((domain, dec.h_obs), []).append(dec)
    rows = []
    for (domain, h_obs) in sorted(buckets):
        members = buckets[(domain, h_obs)]
        n = len(members)
        rows.append({
            "domain": domain,
            "h_obs": h_obs,
            "n_authors": n,
            "mean_drop_direct": sum(d.h_obs - d.h_minus_direct for d in members) / n,
            "mean_pct_direct": sum(d.pct_direct for d in members) / n,
            "mean_drop_coauthor": sum(d.h_obs - d.h_minus_coauthor_only for d in members) / n,
            "mean_pct_coauthor": sum(d.pct_coauthor_only for d in members) / n,
            "mean_drop_collaborator": sum(d.h_obs - d.h_minus_collaborator_only for d in members) / n,
            "mean_pct_collaborator": sum(d.pct_collaborator_only for d in members) / n,
            "low_support": int(n < LOW_SUPPORT_AUTHORS),
        })
    return rows


def attribution_distribution(
    decompositions: Mapping[str, HDecomposition],
    h_buckets: Sequence[int] = DEFAULT_H_BUCKETS,
) -> list[dict]:
    """Histograms of pct attributable (bin width 5 over [0, 100]) for
    authors whose observed h-index equals each requested bucket value."""
    n_bins = 100 // HIST_BIN_WIDTH
    hist: dict = {}  # (h_obs, level, bin_idx) -> count
    for dec in decompositions.values():
        if dec.h_obs not in h_buckets:
            continue
        for level in LEVELS:
            pct = dec.pct_attributable(level)
            idx = min(int(pct // HIST_BIN_WIDTH), n_bins - 1)
            key = (dec.h_obs, level, idx)
            hist[key] = hist.get(key, 0) + 1
    level_order = {lv: i for i, lv in enumerate(LEVELS)}
    rows = []
    for (h_obs, level, idx) in sorted(
        hist, key=lambda k: (k[0], level_order[k[1]], k[2])
    ):
        rows.append({
            "h_obs": h_obs,
            "level": level,
            "bin_lo": idx * HIST_BIN_WIDTH,
            "bin_hi": (idx + 1) * HIST_BIN_WIDTH,
            "n_authors": hist[(h_obs, level, idx)],
        })
    return rows
