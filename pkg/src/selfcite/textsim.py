"""Citing-cited abstract similarity.

Pipeline: lowercase, split on non-alphanumeric runs, drop stopwords, apply
the Porter stemmer, weight terms with tf * ln(N/df) (unsmoothed, tf = raw
within-abstract count) and score pairs with cosine similarity. Vector
building is two-phase: a corpus-wide document-frequency pass, then an
independent per-document weighting pass.

Pairs where either abstract is missing, or where either tf-idf vector is
all-zero, are excluded from every average and counted instead of being
scored 0, so short or generic abstracts do not drag type comparisons down.

Aggregation is author-first: each author's mean per citation type is
computed before averaging across authors (the pooled per-record mean is
reported alongside). Both perspectives of a pair enter the stream; for
direct self-citations the two records carry the same cosine, so author
means are unaffected by the duplication.
"""

from __future__ import annotations

import hashlib
import math
import re
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Iterator, NamedTuple, Optional

from .classify import AuthorEdgeClass, CitationType, Perspective
from .corpus import Corpus, CorpusError
from .graph import CitationEdge
from .porter import stem

_TOKEN_RE = re.compile(r"[a-z0-9]+")

_STOPWORDS: Optional[frozenset[str]] = None
_STOPWORDS_SHA256: Optional[str] = None

#: Citation ages above this are pooled into one open-ended bin.
MAX_SINGLE_CITATION_AGE = 20


def _stopword_bytes() -> bytes:
    return resources.files("selfcite").joinpath("data/stopwords_en.txt").read_bytes()


def load_stopwords() -> frozenset[str]:
    """The standard English Snowball stopword list shipped with the package."""
    global _STOPWORDS
    if _STOPWORDS is None:
        words = _stopword_bytes().decode("utf-8").split()
        _STOPWORDS = frozenset(words)
    return _STOPWORDS


def stopwords_sha256() -> str:
    """Hash of the shipped stopword file, echoed into run manifests."""
    global _STOPWORDS_SHA256
    if _STOPWORDS_SHA256 is None:
        _STOPWORDS_SHA256 = hashlib.sha256(_stopword_bytes()).hexdigest()
    return _STOPWORDS_SHA256


_stem_cache: dict[str, str] = {}


def _stem_cached(token: str) -> str:
    cached = _stem_cache.get(token)
    if cached is None:
        cached = stem(token)
        _stem_cache[token] = cached
    return cached


@dataclass(slots=True)
class TokenizedAbstract:
    paper_id: str
    stems: Counter

    @property
    def is_empty(self) -> bool:
        return not self.stems


def preprocess(text: str, paper_id: str = "") -> TokenizedAbstract:
    """Lowercase, tokenize on non-alphanumeric runs, drop stopwords, stem."""
    stopwords = load_stopwords()
    counts: Counter = Counter()
    for token in _TOKEN_RE.findall(text.lower()):
        if token in stopwords:
            continue
        counts[_stem_cached(token)] += 1
    return TokenizedAbstract(paper_id=paper_id, stems=counts)


class TfIdfVector(NamedTuple):
    paper_id: str
    weights: dict[str, float]


def build_vectors(corpus: Corpus) -> dict[str, TfIdfVector]:
    """tf-idf vectors for every paper that carries an abstract.

    idf = ln(N/df) where N counts abstracts with a non-empty stem multiset;
    terms present in every such abstract get weight 0 and are dropped, so a
    vector may come out empty (flagged by its emptiness).
    """
    tokenized = [
        preprocess(p.abstract, pid)
        for pid, p in corpus.papers.items()
        if p.abstract is not None
    ]
    if not tokenized:
        raise CorpusError("no abstracts in corpus: tf-idf vectors undefined")

    docs = [t for t in tokenized if not t.is_empty]
    n_docs = len(docs)
    df: Counter = Counter()
    for t in docs:
        df.update(t.stems.keys())

    idf = {term: math.log(n_docs / count) for term, count in df.items()}

    vectors: dict[str, TfIdfVector] = {}
    for t in tokenized:
        weights = {}
        for term, tf in t.stems.items():
            w = tf * idf[term]
            if w > 0.0:
                weights[term] = w
        vectors[t.paper_id] = TfIdfVector(t.paper_id, weights)
    return vectors


def _norm(weights: dict[str, float]) -> float:
    return math.sqrt(sum(w * w for w in weights.values()))


def _dot(u: dict[str, float], v: dict[str, float]) -> float:
    # accumulate over sorted common terms: multiplication commutes exactly,
    # so a canonical order makes cosine(u, v) == cosine(v, u) bit for bit
    if len(u) > len(v):
        u, v = v, u
    common = [t for t in u if t in v]
    if not common:
        return 0.0
    common.sort()
    total = 0.0
    for term in common:
        total += u[term] * v[term]
    return total


def cosine(u: TfIdfVector, v: TfIdfVector) -> float:
    """Cosine similarity in [0, 1]; 0 when either vector is all-zero."""
    nu = _norm(u.weights)
    nv = _norm(v.weights)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    value = _dot(u.weights, v.weights) / (nu * nv)
    return value if value < 1.0 else 1.0


class SimilarityRecord(NamedTuple):
    author_id: str
    edge: CitationEdge
    perspective: Perspective
    ctype: CitationType
    cosine: float
    citation_age: int


@dataclass(slots=True)
class SimilarityCoverage:
    """Why edges did or did not produce similarity records."""

    scored_edges: int = 0
    missing_abstract_edges: int = 0
    zero_vector_edges: int = 0
    records: int = 0

    def as_dict(self) -> dict:
        return {
            "scored_edges": self.scored_edges,
            "missing_abstract_edges": self.missing_abstract_edges,
            "zero_vector_edges": self.zero_vector_edges,
            "records": self.records,
        }


def pair_similarities(
    corpus: Corpus,
    classifications: Iterable[AuthorEdgeClass],
    vectors: Optional[dict[str, TfIdfVector]] = None,
    coverage: Optional[SimilarityCoverage] = None,
) -> Iterator[SimilarityRecord]:
    """One record per perspective author per side of every scoreable edge.

    The cosine for an edge is computed once and replicated across that
    edge's records. ``coverage`` (if given) is updated in place while the
    stream is consumed.
    """
    if vectors is None:
        vectors = build_vectors(corpus)
    norms = {pid: _norm(v.weights) for pid, v in vectors.items()}

    last_key: Optional[tuple[str, str]] = None
    last_cos: Optional[float] = None
    for rec in classifications:
        edge = rec.edge
        key = (edge.citing_id, edge.cited_id)
        if key != last_key:
            last_key = key
            u = vectors.get(edge.citing_id)
            v = vectors.get(edge.cited_id)
            if u is None or v is None:
                last_cos = None
                if coverage is not None:
                    coverage.missing_abstract_edges += 1
            else:
                nu = norms[edge.citing_id]
                nv = norms[edge.cited_id]
                if nu == 0.0 or nv == 0.0:
                    last_cos = None
                    if coverage is not None:
                        coverage.zero_vector_edges += 1
                else:
                    value = _dot(u.weights, v.weights) / (nu * nv)
                    last_cos = value if value < 1.0 else 1.0
                    if coverage is not None:
                        coverage.scored_edges += 1
        if last_cos is None:
            continue
        if coverage is not None:
            coverage.records += 1
        yield SimilarityRecord(
            rec.author_id,
            edge,
            rec.perspective,
            rec.ctype,
            last_cos,
            edge.citing_year - edge.cited_year,
        )


def citation_age_bin(age: int) -> str:
    return str(age) if age <= MAX_SINGLE_CITATION_AGE else f"{MAX_SINGLE_CITATION_AGE + 1}+"


class SimilarityTally:
    """Streaming per-author similarity sums, mergeable chunk by chunk.

    ``include`` (when given) restricts tallies to that author set; skipped
    records are not counted anywhere.
    """

    __slots__ = (
        "vectors", "norms", "include", "author_type", "author_type_age",
        "author_selfref", "coverage", "negative_age_records",
        "_last_key", "_last_cos",
    )

    def __init__(self, vectors: dict[str, TfIdfVector], norms=None, include=None):
        self.vectors = vectors
        self.norms = norms if norms is not None else {
            pid: _norm(v.weights) for pid, v in vectors.items()
        }
        self.include = include
        self.author_type: dict = {}       # (author, ctype) -> [sum, n]
        self.author_type_age: dict = {}   # (author, ctype, age 0..21) -> [sum, n]
        self.author_selfref: dict = {}    # author -> [sum, n]; direct reference-side only
        self.coverage = SimilarityCoverage()
        self.negative_age_records = 0
        self._last_key: Optional[tuple[str, str]] = None
        self._last_cos: Optional[float] = None

    def spawn(self) -> "SimilarityTally":
        return SimilarityTally(self.vectors, self.norms, self.include)

    def _edge_cosine(self, edge: CitationEdge) -> Optional[float]:
        u = self.vectors.get(edge.citing_id)
        v = self.vectors.get(edge.cited_id)
        if u is None or v is None:
            self.coverage.missing_abstract_edges += 1
            return None
        nu = self.norms[edge.citing_id]
        nv = self.norms[edge.cited_id]
        if nu == 0.0 or nv == 0.0:
            self.coverage.zero_vector_edges += 1
            return None
        self.coverage.scored_edges += 1
        value = _dot(u.weights, v.weights) / (nu * nv)
        return value if value < 1.0 else 1.0

    def add_edge(self, edge, citing_authors, ref_types, cited_authors, cite_types):
        cos = self._edge_cosine(edge)
        if cos is None:
            return
        age = edge.citing_year - edge.cited_year
        if age < 0:
            age_key = None
        else:
            age_key = age if age <= MAX_SINGLE_CITATION_AGE else MAX_SINGLE_CITATION_AGE + 1
        at = self.author_type
        ata = self.author_type_age
        asr = self.author_selfref
        include = self.include
        direct = CitationType.DIRECT
        for authors, types, is_ref in (
            (citing_authors, ref_types, True),
            (cited_authors, cite_types, False),
        ):
            for a, t in zip(authors, types):
                if include is not None and a not in include:
                    continue
                self.coverage.records += 1
                cell = at.get((a, t))
                if cell is None:
                    at[(a, t)] = [cos, 1]
                else:
                    cell[0] += cos
                    cell[1] += 1
                if age_key is None:
                    self.negative_age_records += 1
                else:
                    cell = ata.get((a, t, age_key))
                    if cell is None:
                        ata[(a, t, age_key)] = [cos, 1]
                    else:
                        cell[0] += cos
                        cell[1] += 1
                if is_ref and t is direct:
                    cell = asr.get(a)
                    if cell is None:
                        asr[a] = [cos, 1]
                    else:
                        cell[0] += cos
                        cell[1] += 1

    def add_record(self, rec: AuthorEdgeClass) -> None:
        """Tally one classification record, scoring its edge on first sight
        (stream API for classification exports)."""
        edge = rec.edge
        key = (edge.citing_id, edge.cited_id)
        if key != self._last_key:
            self._last_key = key
            self._last_cos = self._edge_cosine(edge)
        cos = self._last_cos
        if cos is None:
            return
        self._tally_one(rec.author_id, rec.ctype, rec.perspective,
                        cos, edge.citing_year - edge.cited_year)

    def add_similarity_record(self, rec: SimilarityRecord) -> None:
        """Tally one pre-scored similarity record."""
        self._tally_one(rec.author_id, rec.ctype, rec.perspective,
                        rec.cosine, rec.citation_age)

    def _tally_one(self, author, ctype, perspective, cos: float, age: int) -> None:
        if self.include is not None and author not in self.include:
            return
        self.coverage.records += 1
        key = (author, ctype)
        cell = self.author_type.get(key)
        if cell is None:
            self.author_type[key] = [cos, 1]
        else:
            cell[0] += cos
            cell[1] += 1
        if age < 0:
            self.negative_age_records += 1
        else:
            age_key = age if age <= MAX_SINGLE_CITATION_AGE else MAX_SINGLE_CITATION_AGE + 1
            akey = (author, ctype, age_key)
            cell = self.author_type_age.get(akey)
            if cell is None:
                self.author_type_age[akey] = [cos, 1]
            else:
                cell[0] += cos
                cell[1] += 1
        if perspective is Perspective.REFERENCE and ctype is CitationType.DIRECT:
            cell = self.author_selfref.get(author)
            if cell is None:
                self.author_selfref[author] = [cos, 1]
            else:
                cell[0] += cos
                cell[1] += 1

    def merge(self, other: "SimilarityTally") -> None:
        for target, source in (
            (self.author_type, other.author_type),
            (self.author_type_age, other.author_type_age),
            (self.author_selfref, other.author_selfref),
        ):
            for key, (s, n) in source.items():
                cell = target.get(key)
                if cell is None:
                    target[key] = [s, n]
                else:
                    cell[0] += s
                    cell[1] += n
        self.coverage.scored_edges += other.coverage.scored_edges
        self.coverage.missing_abstract_edges += other.coverage.missing_abstract_edges
        self.coverage.zero_vector_edges += other.coverage.zero_vector_edges
        self.coverage.records += other.coverage.records
        self.negative_age_records += other.negative_age_records


def author_type_means(tally: SimilarityTally) -> dict[tuple[str, CitationType], float]:
    return {key: s / n for key, (s, n) in tally.author_type.items()}


def similarity_means(tally, profiles, key: str = "discipline") -> list[dict]:
    """Mean similarity per citation type grouped by an author attribute.

    ``key`` is "discipline" or "gender". The author-mean column is the mean
    of per-author means (canonical); the pooled column averages records.
    """
    groups: dict = {}  # (group, ctype) -> [author_mean_sum, n_authors, pooled_sum, pooled_n]
    # sorted iteration keeps float sums canonical for any tally build order
    for (author, ctype), (s, n) in sorted(
        tally.author_type.items(), key=lambda kv: (kv[0][0], kv[0][1].value)
    ):
        profile = profiles.get(author)
        if profile is None:
            continue
        group = getattr(profile, key)
        cell = groups.setdefault((group, ctype), [0.0, 0, 0.0, 0])
        cell[0] += s / n
        cell[1] += 1
        cell[2] += s
        cell[3] += n
    rows = []
    for (group, ctype), (asum, acount, psum, pcount) in sorted(
        groups.items(), key=lambda kv: (kv[0][0], kv[0][1].value)
    ):
        rows.append({
            key: group,
            "citation_type": ctype.value,
            "similarity_author_mean": asum / acount,
            "similarity_pooled": psum / pcount,
            "n_authors": acount,
            "n_records": pcount,
        })
    return rows


def similarity_histograms(tally, profiles, bin_width: float = 0.02) -> list[dict]:
    """Histogram of per-author mean similarity per (discipline, type)."""
    n_bins = max(1, round(1.0 / bin_width))
    counts: dict = {}
    for (author, ctype), (s, n) in tally.author_type.items():
        profile = profiles.get(author)
        if profile is None:
            continue
        mean = s / n
        idx = min(int(mean / bin_width), n_bins - 1)
        key = (profile.discipline, ctype, idx)
        counts[key] = counts.get(key, 0) + 1
    rows = []
    for (discipline, ctype, idx), n in sorted(
        counts.items(), key=lambda kv: (kv[0][0], kv[0][1].value, kv[0][2])
    ):
        rows.append({
            "discipline": discipline,
            "citation_type": ctype.value,
            "bin_lo": round(idx * bin_width, 10),
            "bin_hi": round((idx + 1) * bin_width, 10),
            "n_authors": n,
        })
    return rows


def similarity_by_citation_age(tally) -> list[dict]:
    """Author-first mean similarity per (citation age bin, type)."""
    cells: dict = {}  # (age_key, ctype) -> [author_mean_sum, n_authors, pooled_sum, pooled_n]
    for (author, ctype, age_key), (s, n) in sorted(
        tally.author_type_age.items(), key=lambda kv: (kv[0][0], kv[0][1].value, kv[0][2])
    ):
        cell = cells.setdefault((age_key, ctype), [0.0, 0, 0.0, 0])
        cell[0] += s / n
        cell[1] += 1
        cell[2] += s
        cell[3] += n
    rows = []
    for (age_key, ctype), (asum, acount, psum, pcount) in sorted(
        cells.items(), key=lambda kv: (kv[0][0], kv[0][1].value)
    ):
        rows.append({
            "citation_age_bin": citation_age_bin(age_key),
            "citation_type": ctype.value,
            "similarity_author_mean": asum / acount,
            "similarity_pooled": psum / pcount,
            "n_authors": acount,
            "n_records": pcount,
        })
    return rows


def similarity_by_selfref_percentile(tally, profiles, n_groups: int = 10) -> list[dict]:
    """Direct self-reference similarity across self-reference-rate groups.

    Authors with a defined self-reference rate and at least one scored
    direct reference are ranked by rate (ties broken by author id) and cut
    into ``n_groups`` near-equal groups.
    """
    if n_groups < 1:
        raise ValueError("n_groups must be >= 1")
    scored = []
    for author, (s, n) in tally.author_selfref.items():
        profile = profiles.get(author)
        if profile is None:
            continue
        rate = profile.self_reference_rate
        if rate is None:
            continue
        scored.append((rate, author, s / n))
    scored.sort(key=lambda item: (item[0], item[1]))
    total = len(scored)
    rows = []
    for g in range(n_groups):
        lo = g * total // n_groups
        hi = (g + 1) * total // n_groups
        members = scored[lo:hi]
        if not members:
            continue
        rows.append({
            "group": g + 1,
            "n_authors": len(members),
            "mean_self_reference_rate": sum(m[0] for m in members) / len(members),
            "mean_direct_reference_similarity": sum(m[2] for m in members) / len(members),
            "low_support": int(len(members) < 5),
        })
    return rows


def collect_similarity_tally(
    records: Iterable[SimilarityRecord], vectors: Optional[dict] = None
) -> SimilarityTally:
    tally = SimilarityTally(vectors if vectors is not None else {})
    for rec in records:
        tally.add_similarity_record(rec)
    return tally


def similarity_by_type(
    records: Iterable[SimilarityRecord],
    grouping: str,
    profiles=None,
    n_groups: int = 10,
) -> list[dict]:
    """Aggregate similarity records by the requested grouping.

    ``grouping`` is one of "discipline", "gender", "citation_age" or
    "self_reference_percentile"; the first two and the last need author
    profiles.
    """
    tally = collect_similarity_tally(records)
    if grouping in ("discipline", "gender"):
        if profiles is None:
            raise ValueError(f"grouping by {grouping} requires profiles")
        return similarity_means(tally, profiles, key=grouping)
    if grouping == "citation_age":
        return similarity_by_citation_age(tally)
    if grouping == "self_reference_percentile":
        if profiles is None:
            raise ValueError("grouping by self_reference_percentile requires profiles")
        return similarity_by_selfref_percentile(tally, profiles, n_groups=n_groups)
    raise ValueError(f"unknown grouping: {grouping!r}")
