"""Codec and contract validation for the question-answering webhook wire format.

Requests carry the question under a configurable key (default "question"),
either form-urlencoded or as a JSON object. Responses are a single-member
JSON object holding the answer under a configurable key (default "resultText").
Everything here is pure and stateless.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass
from urllib.parse import parse_qs

DEFAULT_QUESTION_KEY = "question"
DEFAULT_ANSWER_KEY = "resultText"

FORM_MEDIA_TYPE = "application/x-www-form-urlencoded"
JSON_MEDIA_TYPE = "application/json"
RESPONSE_CONTENT_TYPE = "application/json; charset=utf-8"

# Client-side request timeout from the component's webhook contract, in ms.
CLIENT_TIMEOUT_MS = 2000


class ProtocolError(Exception):
    """Base class for wire-contract violations. `code` is the stable machine name."""

    code = "ProtocolError"

    def __init__(self, detail: str = ""):
        self.detail = detail
        super().__init__(f"{self.code}: {detail}" if detail else self.code)


class UnsupportedMediaType(ProtocolError):
    code = "UnsupportedMediaType"


class MalformedBody(ProtocolError):
    code = "MalformedBody"


class MissingQuestionKey(ProtocolError):
    code = "MissingQuestionKey"


class EmptyQuestion(ProtocolError):
    code = "EmptyQuestion"


class NotJson(ProtocolError):
    code = "NotJson"


class MissingAnswerKey(ProtocolError):
    code = "MissingAnswerKey"


class NonStringAnswer(ProtocolError):
    code = "NonStringAnswer"


class EmptyAnswer(ProtocolError):
    code = "EmptyAnswer"


# Response violations, in the order they are checked.
RESPONSE_VIOLATION_CODES = ("NotJson", "MissingAnswerKey", "NonStringAnswer", "EmptyAnswer")


def _validate_key(name: str, value: str) -> None:
    if not isinstance(value, str) or not value:
        raise ValueError(f"{name} must be a non-empty string")
    for ch in value:
        if ch.isspace() or unicodedata.category(ch) in ("Cc", "Cf"):
            raise ValueError(f"{name} must not contain whitespace or control characters")


@dataclass(frozen=True)
class KeyConfig:
    """The configurable request/response parameter names."""

    question_key: str = DEFAULT_QUESTION_KEY
    answer_key: str = DEFAULT_ANSWER_KEY

    def __post_init__(self):
        _validate_key("question_key", self.question_key)
        _validate_key("answer_key", self.answer_key)


@dataclass(frozen=True)
class TimeoutBudget:
    """Wall-clock budget for one engine round-trip, in milliseconds."""

    total_ms: int = CLIENT_TIMEOUT_MS

    def __post_init__(self):
        if not isinstance(self.total_ms, int) or isinstance(self.total_ms, bool) or self.total_ms <= 0:
            raise ValueError("total_ms must be a positive integer")


@dataclass(frozen=True)
class Violation:
    code: str
    detail: str


@dataclass(frozen=True)
class ContractReport:
    """Outcome of checking a response body against the answer contract.

    An empty violation list means the body is contract-conformant.
    """

    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> list[str]:
        return [v.code for v in self.violations]


def _media_type(content_type: str) -> str:
    return content_type.split(";", 1)[0].strip().lower()


def parse_request(body: bytes, content_type: str, keys: KeyConfig = KeyConfig()) -> str:
    """Extract the trimmed question text from a raw POST entity.

    Accepts form-urlencoded and JSON object bodies. Raises a ProtocolError
    subclass (UnsupportedMediaType, MalformedBody, MissingQuestionKey,
    EmptyQuestion) on any contract violation.
    """
    media = _media_type(content_type or "")
    if media == FORM_MEDIA_TYPE:
        try:
            text = body.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedBody(f"body is not valid UTF-8: {exc}") from exc
        fields = parse_qs(text, keep_blank_values=True)
        if keys.question_key not in fields:
            raise MissingQuestionKey(f"no '{keys.question_key}' field in form body")
        raw = fields[keys.question_key][0]
    elif media == JSON_MEDIA_TYPE or media.endswith("+json"):
        try:
            document = json.loads(body.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise MalformedBody(f"body is not valid JSON: {exc}") from exc
        if not isinstance(document, dict):
            raise MalformedBody("request body must be a JSON object")
        if keys.question_key not in document:
            raise MissingQuestionKey(f"no '{keys.question_key}' member in JSON body")
        raw = document[keys.question_key]
        if not isinstance(raw, str):
            raise MalformedBody(f"'{keys.question_key}' value must be a string")
    else:
        raise UnsupportedMediaType(f"unsupported content type {content_type!r}")

    question = raw.strip()
    if not question:
        raise EmptyQuestion("question text is empty after trimming")
    return question


def render_response(answer: str, keys: KeyConfig = KeyConfig()) -> bytes:
    """Render an answer as the canonical single-member JSON object, UTF-8 encoded."""
    if not isinstance(answer, str) or answer == "":
        raise EmptyAnswer("answer text must be a non-empty string")
    return json.dumps({keys.answer_key: answer}, ensure_ascii=False, separators=(",", ":")).encode("utf-8")


def parse_response(body: bytes, keys: KeyConfig = KeyConfig()) -> str:
    """Extract the answer string from an engine response body.

    Inverse of render_response; extra members are tolerated and ignored.
    Raises NotJson, MissingAnswerKey, NonStringAnswer, or EmptyAnswer.
    """
    try:
        document = json.loads(body.decode("utf-8") if isinstance(body, bytes) else body)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise NotJson(f"body is not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise MissingAnswerKey("response is not a JSON object")
    if keys.answer_key not in document:
        raise MissingAnswerKey(f"no '{keys.answer_key}' member in response")
    answer = document[keys.answer_key]
    if not isinstance(answer, str):
        raise NonStringAnswer(f"'{keys.answer_key}' value is {type(answer).__name__}, not a string")
    if answer == "":
        raise EmptyAnswer(f"'{keys.answer_key}' value is empty")
    return answer


def validate_response_contract(body: bytes, keys: KeyConfig = KeyConfig()) -> ContractReport:
    """Check a candidate response body against the answer contract.

    Violations are reported in the fixed order NotJson -> MissingAnswerKey ->
    NonStringAnswer -> EmptyAnswer, stopping at the first category that
    applies, so reports are deterministic. The report is empty iff
    parse_response succeeds.
    """
    try:
        parse_response(body, keys)
    except ProtocolError as exc:
        return ContractReport(violations=(Violation(exc.code, exc.detail),))
    return ContractReport()
