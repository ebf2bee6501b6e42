"""Gateway configuration: file schema, defaults, and invariant checks."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .protocol import CLIENT_TIMEOUT_MS, KeyConfig

log = logging.getLogger("instant_assist.config")

DEFAULT_DEADLINE_MS = 1500
DEFAULT_UPSTREAM_TIMEOUT_MS = 1000

_KNOWN_TOP_LEVEL = {
    "bind_address",
    "keys",
    "allowed_origins",
    "deadline_ms",
    "kb_path",
    "upstream",
    "log_path",
}


class ConfigError(Exception):
    """Raised when a gateway config fails validation; `errors` lists every problem."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class UpstreamConfig:
    """An optional proxied engine consulted when the local KB has no answer."""

    url: str
    response_key: str
    timeout_ms: int = DEFAULT_UPSTREAM_TIMEOUT_MS


@dataclass(frozen=True)
class GatewayConfig:
    bind_address: str
    keys: KeyConfig = field(default_factory=KeyConfig)
    allowed_origins: tuple[str, ...] = ("*",)
    deadline_ms: int = DEFAULT_DEADLINE_MS
    kb_path: Path | None = None
    upstream: UpstreamConfig | None = None
    log_path: Path | None = None

    @property
    def host(self) -> str:
        return self.bind_address.rsplit(":", 1)[0]

    @property
    def port(self) -> int:
        return int(self.bind_address.rsplit(":", 1)[1])

    @property
    def wildcard_origins(self) -> bool:
        return self.allowed_origins == ("*",)


def _parse_bind_address(errors: list[str], value: Any) -> str | None:
    if not isinstance(value, str) or ":" not in value:
        errors.append("SchemaError: 'bind_address' must be a host:port string")
        return None
    host, _, port = value.rpartition(":")
    if not host:
        errors.append("SchemaError: 'bind_address' host must be non-empty")
        return None
    try:
        port_num = int(port)
    except ValueError:
        errors.append("SchemaError: 'bind_address' port must be an integer")
        return None
    if not 0 <= port_num <= 65535:
        errors.append("InvariantViolation: 'bind_address' port must be in [0, 65535]")
        return None
    return value


def _parse_keys(errors: list[str], value: Any) -> KeyConfig | None:
    if value is None:
        return KeyConfig()
    if not isinstance(value, dict):
        errors.append("SchemaError: 'keys' must be an object")
        return None
    question_key = value.get("question_key", KeyConfig().question_key)
    answer_key = value.get("answer_key", KeyConfig().answer_key)
    try:
        return KeyConfig(question_key=question_key, answer_key=answer_key)
    except ValueError as exc:
        errors.append(f"InvariantViolation: 'keys': {exc}")
        return None


def _parse_origins(errors: list[str], value: Any) -> tuple[str, ...] | None:
    if value is None:
        return ("*",)
    if value == "*" or value == ["*"]:
        return ("*",)
    if not isinstance(value, list) or any(not isinstance(o, str) or not o.strip() for o in value):
        errors.append("SchemaError: 'allowed_origins' must be \"*\" or a list of origin strings")
        return None
    if "*" in value:
        errors.append("InvariantViolation: 'allowed_origins' wildcard must be the single entry")
        return None
    return tuple(o.strip() for o in value)


def _parse_positive_ms(errors: list[str], name: str, value: Any, default: int) -> int | None:
    if value is None:
        return default
    if isinstance(value, bool) or not isinstance(value, int):
        errors.append(f"SchemaError: '{name}' must be an integer (milliseconds)")
        return None
    if value <= 0:
        errors.append(f"InvariantViolation: '{name}' must be a positive integer")
        return None
    return value


def _parse_path(errors: list[str], name: str, value: Any, base_dir: Path | None) -> Path | None:
    if value is None:
        return None
    if not isinstance(value, str) or not value:
        errors.append(f"SchemaError: '{name}' must be a non-empty path string")
        return None
    path = Path(value)
    if base_dir is not None and not path.is_absolute():
        path = base_dir / path
    return path


def _parse_upstream(errors: list[str], value: Any) -> UpstreamConfig | None:
    if value is None:
        return None
    if not isinstance(value, dict):
        errors.append("SchemaError: 'upstream' must be an object")
        return None
    for key in value:
        if key not in {"url", "response_key", "timeout_ms"}:
            log.warning("ignoring unknown upstream config field %r", key)
    url = value.get("url")
    if not isinstance(url, str) or not url.lower().startswith(("http://", "https://")):
        errors.append("SchemaError: 'upstream.url' must be an absolute http(s) URL")
        url = None
    response_key = value.get("response_key")
    if not isinstance(response_key, str) or not response_key:
        errors.append("SchemaError: 'upstream.response_key' must be a non-empty string")
        response_key = None
    timeout_ms = _parse_positive_ms(errors, "upstream.timeout_ms", value.get("timeout_ms"), DEFAULT_UPSTREAM_TIMEOUT_MS)
    if None in (url, response_key, timeout_ms):
        return None
    return UpstreamConfig(url=url, response_key=response_key, timeout_ms=timeout_ms)


def load_config(document: Any, base_dir: Path | None = None) -> GatewayConfig:
    """Build a validated GatewayConfig from a parsed config document.

    Relative kb_path/log_path values are resolved against base_dir (the
    config file's directory). Unknown top-level fields are accepted with a
    logged warning. Raises ConfigError listing every problem found.
    """
    errors: list[str] = []
    if not isinstance(document, dict):
        raise ConfigError(["SchemaError: config must be a JSON object"])

    for key in document:
        if key not in _KNOWN_TOP_LEVEL:
            log.warning("ignoring unknown config field %r", key)

    bind_address = _parse_bind_address(errors, document.get("bind_address"))
    keys = _parse_keys(errors, document.get("keys"))
    origins = _parse_origins(errors, document.get("allowed_origins"))
    deadline_ms = _parse_positive_ms(errors, "deadline_ms", document.get("deadline_ms"), DEFAULT_DEADLINE_MS)
    kb_path = _parse_path(errors, "kb_path", document.get("kb_path"), base_dir)
    log_path = _parse_path(errors, "log_path", document.get("log_path"), base_dir)
    upstream = _parse_upstream(errors, document.get("upstream"))

    if deadline_ms is not None and deadline_ms > CLIENT_TIMEOUT_MS:
        errors.append(
            f"InvariantViolation: 'deadline_ms' must be <= {CLIENT_TIMEOUT_MS}"
            " to fit inside the client's timeout budget"
        )
    if kb_path is None and upstream is None and document.get("kb_path") is None and document.get("upstream") is None:
        errors.append("InvariantViolation: at least one of 'kb_path'/'upstream' must be configured")
    if upstream is not None and deadline_ms is not None and upstream.timeout_ms > deadline_ms:
        errors.append("InvariantViolation: 'upstream.timeout_ms' must be <= 'deadline_ms'")

    if errors:
        raise ConfigError(errors)
    return GatewayConfig(
        bind_address=bind_address,
        keys=keys,
        allowed_origins=origins,
        deadline_ms=deadline_ms,
        kb_path=kb_path,
        upstream=upstream,
        log_path=log_path,
    )


def load_config_file(path: str | Path) -> GatewayConfig:
    """Load and validate a gateway config from a UTF-8 JSON file."""
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError([f"SchemaError: cannot read {path}: {exc}"]) from exc
    try:
        document = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"SchemaError: {path} is not valid JSON: {exc}"]) from exc
    return load_config(document, base_dir=path.resolve().parent)
