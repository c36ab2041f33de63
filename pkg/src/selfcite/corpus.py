"""Corpus data model and line-delimited ingestion.

Input files carry one JSON object per line (papers file, optional authors
file) so large corpora can be ingested as a stream instead of a single
parsed document. A loaded :class:`Corpus` is treated as immutable: every
analysis module only reads it, which makes concurrent use safe.

References may point at ids that are absent from the corpus. Those are
kept and counted as unresolved; all rate denominators downstream use
resolvable references only.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Optional, Union

DISCIPLINES = (
    "arts_humanities",
    "health",
    "natural_sciences_engineering",
    "social_sciences",
    "unknown",
)
GENDERS = ("woman", "man", "unknown")

YEAR_MIN = 1800
YEAR_MAX = 2100

#: Authors with strictly more publications than this are "eligible".
DEFAULT_MIN_PUBS = 5


class CorpusError(Exception):
    """Malformed or inconsistent input data."""


@dataclass(frozen=True, slots=True)
class PaperRecord:
    """One publication: identity, authorship, references, optional text."""

    paper_id: str
    year: int
    discipline: str
    author_ids: tuple[str, ...]
    reference_ids: tuple[str, ...]
    abstract: Optional[str] = None
    title: Optional[str] = None


@dataclass(frozen=True, slots=True)
class AuthorRecord:
    author_id: str
    gender: str = "unknown"
    display_name: Optional[str] = None


@dataclass(slots=True)
class AuthorIndexEntry:
    """Aggregates derived from the papers an author appears on."""

    first_pub_year: int
    last_pub_year: int
    publication_ids: list[str]
    modal_discipline: str

    @property
    def n_pubs(self) -> int:
        return len(self.publication_ids)


@dataclass(slots=True)
class Corpus:
    papers: dict[str, PaperRecord]
    authors: dict[str, AuthorRecord]
    author_index: dict[str, AuthorIndexEntry]
    total_references: int = 0
    unresolved_references: int = 0

    @property
    def resolvable_references(self) -> int:
        return self.total_references - self.unresolved_references

    @property
    def papers_with_abstract(self) -> int:
        return sum(1 for p in self.papers.values() if p.abstract is not None)

    def validation_report(self) -> dict:
        """Summary counts, including the unresolved-reference fraction."""
        total = self.total_references
        n_papers = len(self.papers)
        return {
            "papers": n_papers,
            "authors": len(self.author_index),
            "author_records": len(self.authors),
            "total_references": total,
            "unresolved_references": self.unresolved_references,
            "resolvable_references": self.resolvable_references,
            "unresolved_fraction": (self.unresolved_references / total) if total else 0.0,
            "papers_with_abstract": self.papers_with_abstract,
            "abstract_coverage": (self.papers_with_abstract / n_papers) if n_papers else 0.0,
        }


def _fail(source: str, lineno: int, message: str) -> CorpusError:
    return CorpusError(f"{source} line {lineno}: {message}")


def _parse_paper(obj, source: str, lineno: int) -> PaperRecord:
    if not isinstance(obj, dict):
        raise _fail(source, lineno, "record is not an object")

    pid = obj.get("id")
    if not isinstance(pid, str) or not pid:
        raise _fail(source, lineno, "field 'id' must be a non-empty string")

    year = obj.get("year")
    if not isinstance(year, int) or isinstance(year, bool):
        raise _fail(source, lineno, f"field 'year' must be an integer (paper {pid})")
    if not YEAR_MIN <= year <= YEAR_MAX:
        raise _fail(source, lineno, f"field 'year' out of range [{YEAR_MIN}, {YEAR_MAX}] (paper {pid})")

    discipline = obj.get("discipline")
    if discipline not in DISCIPLINES:
        raise _fail(source, lineno, f"field 'discipline' must be one of {DISCIPLINES} (paper {pid})")

    authors = obj.get("authors")
    if not isinstance(authors, list) or not authors:
        raise _fail(source, lineno, f"field 'authors' must be a non-empty list (paper {pid})")
    if not all(isinstance(a, str) and a for a in authors):
        raise _fail(source, lineno, f"field 'authors' entries must be non-empty strings (paper {pid})")
    if len(set(authors)) != len(authors):
        raise _fail(source, lineno, f"field 'authors' contains duplicates (paper {pid})")

    references = obj.get("references")
    if not isinstance(references, list) or not all(isinstance(r, str) and r for r in references):
        raise _fail(source, lineno, f"field 'references' must be a list of id strings (paper {pid})")
    if len(set(references)) != len(references):
        raise _fail(source, lineno, f"field 'references' contains duplicates (paper {pid})")

    abstract = obj.get("abstract")
    if abstract is not None and not isinstance(abstract, str):
        raise _fail(source, lineno, f"field 'abstract' must be a string when present (paper {pid})")
    title = obj.get("title")
    if title is not None and not isinstance(title, str):
        raise _fail(source, lineno, f"field 'title' must be a string when present (paper {pid})")

    return PaperRecord(
        paper_id=pid,
        year=year,
        discipline=discipline,
        author_ids=tuple(authors),
        reference_ids=tuple(references),
        abstract=abstract,
        title=title,
    )


def _parse_author(obj, source: str, lineno: int) -> AuthorRecord:
    if not isinstance(obj, dict):
        raise _fail(source, lineno, "record is not an object")
    aid = obj.get("id")
    if not isinstance(aid, str) or not aid:
        raise _fail(source, lineno, "field 'id' must be a non-empty string")
    gender = obj.get("gender", "unknown")
    if gender is None:
        gender = "unknown"
    if gender not in GENDERS:
        raise _fail(source, lineno, f"field 'gender' must be one of {GENDERS} (author {aid})")
    name = obj.get("name")
    if name is not None and not isinstance(name, str):
        raise _fail(source, lineno, f"field 'name' must be a string when present (author {aid})")
    return AuthorRecord(author_id=aid, gender=gender, display_name=name)


def _iter_json_lines(path: Path, source: str):
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            stripped = line.strip()
            if not stripped:
                continue
            try:
                obj = json.loads(stripped)
            except json.JSONDecodeError as exc:
                raise _fail(source, lineno, f"invalid JSON: {exc.msg}") from exc
            yield lineno, obj


def load_corpus(
    papers_path: Union[str, Path],
    authors_path: Optional[Union[str, Path]] = None,
) -> Corpus:
    """Load and validate a corpus from line-delimited JSON files.

    Raises :class:`CorpusError` naming line number and field for any
    malformed record, duplicate paper id or empty author list. Author
    records missing from the authors file are synthesized with gender
    ``unknown``.
    """
    papers_path = Path(papers_path)
    if not papers_path.exists():
        raise CorpusError(f"papers file not found: {papers_path}")

    papers: dict[str, PaperRecord] = {}
    for lineno, obj in _iter_json_lines(papers_path, "papers"):
        record = _parse_paper(obj, "papers", lineno)
        if record.paper_id in papers:
            raise _fail("papers", lineno, f"duplicate paper_id '{record.paper_id}'")
        papers[record.paper_id] = record

    authors: dict[str, AuthorRecord] = {}
    if authors_path is not None:
        authors_path = Path(authors_path)
        if not authors_path.exists():
            raise CorpusError(f"authors file not found: {authors_path}")
        for lineno, obj in _iter_json_lines(authors_path, "authors"):
            record = _parse_author(obj, "authors", lineno)
            if record.author_id in authors:
                raise _fail("authors", lineno, f"duplicate author_id '{record.author_id}'")
            authors[record.author_id] = record

    index = build_author_index(papers)
    for aid in index:
        if aid not in authors:
            authors[aid] = AuthorRecord(author_id=aid)

    total = 0
    unresolved = 0
    for p in papers.values():
        total += len(p.reference_ids)
        for rid in p.reference_ids:
            if rid not in papers:
                unresolved += 1

    return Corpus(
        papers=papers,
        authors=authors,
        author_index=index,
        total_references=total,
        unresolved_references=unresolved,
    )


def build_author_index(
    papers: Union[Corpus, Mapping[str, PaperRecord]],
) -> dict[str, AuthorIndexEntry]:
    """Derive first/last publication year, publication list and modal
    discipline for every author appearing in the papers.

    Modal-discipline ties break by the order of :data:`DISCIPLINES`.
    """
    if isinstance(papers, Corpus):
        papers = papers.papers

    pubs: dict[str, list[str]] = {}
    disc_counts: dict[str, Counter] = {}
    for pid, p in papers.items():
        for aid in p.author_ids:
            pubs.setdefault(aid, []).append(pid)
            disc_counts.setdefault(aid, Counter())[p.discipline] += 1

    index: dict[str, AuthorIndexEntry] = {}
    for aid, pids in pubs.items():
        years = [papers[pid].year for pid in pids]
        counts = disc_counts[aid]
        best = max(counts.values())
        modal = next(d for d in DISCIPLINES if counts.get(d) == best)
        index[aid] = AuthorIndexEntry(
            first_pub_year=min(years),
            last_pub_year=max(years),
            publication_ids=pids,
            modal_discipline=modal,
        )
    return index


def eligible_authors(corpus: Corpus, min_pubs: int = DEFAULT_MIN_PUBS) -> set[str]:
    """Authors with strictly more than ``min_pubs`` loaded papers."""
    if min_pubs < 0:
        raise ValueError("min_pubs must be >= 0")
    return {aid for aid, entry in corpus.author_index.items() if entry.n_pubs > min_pubs}


def paper_to_obj(p: PaperRecord) -> dict:
    obj = {
        "id": p.paper_id,
        "year": p.year,
        "discipline": p.discipline,
        "authors": list(p.author_ids),
        "references": list(p.reference_ids),
    }
    if p.abstract is not None:
        obj["abstract"] = p.abstract
    if p.title is not None:
        obj["title"] = p.title
    return obj


def author_to_obj(a: AuthorRecord) -> dict:
    obj: dict = {"id": a.author_id, "gender": a.gender}
    if a.display_name is not None:
        obj["name"] = a.display_name
    return obj


def save_corpus(
    corpus: Corpus,
    papers_path: Union[str, Path],
    authors_path: Optional[Union[str, Path]] = None,
) -> None:
    """Write the corpus back in the load format (one JSON object per line)."""
    with open(papers_path, "w", encoding="utf-8") as fh:
        for p in corpus.papers.values():
            fh.write(json.dumps(paper_to_obj(p), sort_keys=True) + "\n")
    if authors_path is not None:
        with open(authors_path, "w", encoding="utf-8") as fh:
            for a in corpus.authors.values():
                fh.write(json.dumps(author_to_obj(a), sort_keys=True) + "\n")


def corpus_from_records(
    papers: Iterable[PaperRecord],
    authors: Iterable[AuthorRecord] = (),
) -> Corpus:
    """Assemble a validated Corpus from in-memory records (test/synth path)."""
    paper_map: dict[str, PaperRecord] = {}
    for p in papers:
        if p.paper_id in paper_map:
            raise CorpusError(f"duplicate paper_id '{p.paper_id}'")
        paper_map[p.paper_id] = p
    author_map = {a.author_id: a for a in authors}
    index = build_author_index(paper_map)
    for aid in index:
        if aid not in author_map:
            author_map[aid] = AuthorRecord(author_id=aid)
    total = sum(len(p.reference_ids) for p in paper_map.values())
    unresolved = sum(
        1 for p in paper_map.values() for rid in p.reference_ids if rid not in paper_map
    )
    return Corpus(
        papers=paper_map,
        authors=author_map,
        author_index=index,
        total_references=total,
        unresolved_references=unresolved,
    )
