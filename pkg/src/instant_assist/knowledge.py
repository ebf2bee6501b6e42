"""Reference question-answering engine over a curated knowledge base.

Matching is deliberately transparent: questions and patterns are reduced to
lowercase token sets and compared with Jaccard similarity, the best-scoring
entry above the knowledge base threshold wins, and ties break toward earlier
file position so KB authors control precedence.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Any, Iterable, Sequence

DEFAULT_MATCH_THRESHOLD = 0.35
QUESTION_PLACEHOLDER = "{{question}}"


class KnowledgeBaseError(Exception):
    """Raised when a KB document fails validation; `errors` lists every problem."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


def normalize(text: str) -> list[str]:
    """Reduce text to lowercase word tokens.

    Lowercase first, then replace every character that is not a letter or
    digit with a space, split on whitespace, and drop empty tokens. No
    stopword removal.
    """
    lowered = text.lower()
    cleaned = "".join(ch if ch.isalnum() else " " for ch in lowered)
    return cleaned.split()


def _jaccard_sets(a: frozenset[str] | set[str], b: frozenset[str] | set[str]) -> float:
    if not a and not b:
        return 0.0
    return len(a & b) / len(a | b)


def jaccard_score(a: Iterable[str], b: Iterable[str]) -> float:
    """|A n B| / |A u B| over token sets; 0.0 when both are empty."""
    return _jaccard_sets(set(a), set(b))


@dataclass(frozen=True)
class KnowledgeEntry:
    id: str
    display_question: str
    category: str
    patterns: tuple[str, ...]
    answer_template: str
    listed: bool = True

    def __post_init__(self):
        if not self.id:
            raise ValueError("entry id must be non-empty")
        if not self.patterns:
            raise ValueError(f"entry '{self.id}': patterns must be non-empty")
        if not self.answer_template:
            raise ValueError(f"entry '{self.id}': answer_template must be non-empty")

    @cached_property
    def pattern_token_sets(self) -> tuple[frozenset[str], ...]:
        return tuple(frozenset(normalize(p)) for p in self.patterns)


@dataclass(frozen=True)
class KnowledgeBase:
    entries: tuple[KnowledgeEntry, ...]
    fallback_answer: str
    match_threshold: float = DEFAULT_MATCH_THRESHOLD

    def __post_init__(self):
        if not self.fallback_answer:
            raise ValueError("fallback_answer must be non-empty")
        if not 0.0 <= self.match_threshold <= 1.0:
            raise ValueError("match_threshold must be in [0, 1]")
        seen = set()
        for entry in self.entries:
            if entry.id in seen:
                raise ValueError(f"duplicate entry id '{entry.id}'")
            seen.add(entry.id)

    @cached_property
    def entry_map(self) -> dict[str, KnowledgeEntry]:
        return {entry.id: entry for entry in self.entries}


@dataclass(frozen=True)
class MatchResult:
    entry_id: str
    score: float


@dataclass(frozen=True)
class CatalogItem:
    question: str
    category: str


def best_match(kb: KnowledgeBase, query: Sequence[str]) -> MatchResult | None:
    """Best-scoring entry at or above the KB threshold, or None.

    An entry's score is the max over its patterns of the Jaccard similarity
    between the query tokens and the normalized pattern tokens. Ties break
    toward the lowest entry index.
    """
    query_set = frozenset(query)
    best_score = -1.0
    best_entry: KnowledgeEntry | None = None
    for entry in kb.entries:
        score = max(_jaccard_sets(query_set, pattern) for pattern in entry.pattern_token_sets)
        if score > best_score:
            best_score = score
            best_entry = entry
    if best_entry is None or best_score < kb.match_threshold:
        return None
    return MatchResult(entry_id=best_entry.id, score=best_score)


def match_answer(kb: KnowledgeBase, question: str) -> str | None:
    """Rendered answer of the best-matching entry, or None when nothing matches.

    Every literal "{{question}}" in the entry's answer template is replaced
    with the original question text.
    """
    match = best_match(kb, normalize(question))
    if match is None:
        return None
    entry = kb.entry_map[match.entry_id]
    return entry.answer_template.replace(QUESTION_PLACEHOLDER, question)


def answer_for(kb: KnowledgeBase, question: str) -> str:
    """Answer for a question, falling back to kb.fallback_answer on no match."""
    answer = match_answer(kb, question)
    return answer if answer is not None else kb.fallback_answer


def catalog(kb: KnowledgeBase) -> list[CatalogItem]:
    """Listed questions grouped by category.

    Group order follows each category's first appearance among listed
    entries; within a group, file order is preserved.
    """
    groups: dict[str, list[CatalogItem]] = {}
    for entry in kb.entries:
        if not entry.listed:
            continue
        groups.setdefault(entry.category, []).append(
            CatalogItem(question=entry.display_question, category=entry.category)
        )
    return [item for items in groups.values() for item in items]


def _check_string(errors: list[str], where: str, field: str, value: Any) -> str | None:
    if not isinstance(value, str) or not value:
        errors.append(f"SchemaError: {where}: field '{field}' must be a non-empty string")
        return None
    return value


def load_knowledge_base(document: Any) -> KnowledgeBase:
    """Build a validated KnowledgeBase from a parsed KB document.

    Collects every schema problem instead of stopping at the first, and
    raises KnowledgeBaseError listing all of them. Entry order is preserved.
    """
    errors: list[str] = []
    if not isinstance(document, dict):
        raise KnowledgeBaseError(["SchemaError: document must be a JSON object"])

    fallback = document.get("fallback_answer")
    fallback = _check_string(errors, "document", "fallback_answer", fallback)

    threshold = document.get("match_threshold", DEFAULT_MATCH_THRESHOLD)
    if isinstance(threshold, bool) or not isinstance(threshold, (int, float)):
        errors.append("SchemaError: document: field 'match_threshold' must be a number")
        threshold = DEFAULT_MATCH_THRESHOLD
    elif not 0.0 <= threshold <= 1.0:
        errors.append("SchemaError: document: field 'match_threshold' must be in [0, 1]")
        threshold = DEFAULT_MATCH_THRESHOLD

    raw_entries = document.get("entries")
    if not isinstance(raw_entries, list):
        errors.append("SchemaError: document: field 'entries' must be a list")
        raw_entries = []

    entries: list[KnowledgeEntry] = []
    seen_ids: set[str] = set()
    for index, raw in enumerate(raw_entries):
        where = f"entries[{index}]"
        if not isinstance(raw, dict):
            errors.append(f"SchemaError: {where}: entry must be an object")
            continue
        entry_id = raw.get("id")
        if isinstance(entry_id, str) and entry_id:
            where = f"entries[{index}] (id '{entry_id}')"
        entry_id = _check_string(errors, where, "id", entry_id)
        question = _check_string(errors, where, "question", raw.get("question"))
        category = _check_string(errors, where, "category", raw.get("category"))
        answer = _check_string(errors, where, "answer", raw.get("answer"))

        patterns = raw.get("patterns")
        if (
            not isinstance(patterns, list)
            or not patterns
            or any(not isinstance(p, str) or not p for p in patterns)
        ):
            errors.append(f"SchemaError: {where}: field 'patterns' must be a non-empty list of non-empty strings")
            patterns = None

        listed = raw.get("listed", True)
        if not isinstance(listed, bool):
            errors.append(f"SchemaError: {where}: field 'listed' must be a boolean")
            listed = True

        if entry_id is not None:
            if entry_id in seen_ids:
                errors.append(f"DuplicateId: entry id '{entry_id}' appears more than once")
            seen_ids.add(entry_id)

        if None not in (entry_id, question, category, answer, patterns):
            entries.append(
                KnowledgeEntry(
                    id=entry_id,
                    display_question=question,
                    category=category,
                    patterns=tuple(patterns),
                    answer_template=answer,
                    listed=listed,
                )
            )

    if errors:
        raise KnowledgeBaseError(errors)
    return KnowledgeBase(
        entries=tuple(entries),
        fallback_answer=fallback,
        match_threshold=float(threshold),
    )


def load_knowledge_base_file(path: str | Path) -> KnowledgeBase:
    """Load and validate a KB from a UTF-8 JSON file."""
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise KnowledgeBaseError([f"SchemaError: cannot read {path}: {exc}"]) from exc
    try:
        document = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise KnowledgeBaseError([f"SchemaError: {path} is not valid JSON: {exc}"]) from exc
    return load_knowledge_base(document)
