"""HTTP engine service implementing the question-answering webhook contract.

Endpoints: POST /ask (the webhook), GET /questions (categorized catalog for
the component's list interface), GET /health. CORS policy and the per-request
deadline budget are enforced here; answers come from a provider chain (local
knowledge base, then an optional upstream proxy, then fallback text).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import requests

from . import protocol
from .config import ConfigError, GatewayConfig, UpstreamConfig, load_config_file
from .knowledge import KnowledgeBase, KnowledgeBaseError, catalog, load_knowledge_base_file, match_answer
from .protocol import KeyConfig, ProtocolError

CONFIG_ENV_VAR = "INSTANT_ASSIST_CONFIG"

# Served when every provider comes up empty and no KB supplies fallback text.
BUILTIN_FALLBACK_ANSWER = "Sorry, I do not have an answer for that yet."

ALLOW_METHODS = "POST, GET, OPTIONS"
ALLOW_HEADERS = "Content-Type"
MAX_AGE_SECONDS = "600"

MAX_BODY_BYTES = 1 << 20

ASK_PATH = "/ask"
QUESTIONS_PATH = "/questions"
HEALTH_PATH = "/health"
_KNOWN_PATHS = {ASK_PATH, QUESTIONS_PATH, HEALTH_PATH}


@dataclass(frozen=True)
class ProviderOutcome:
    """Result of consulting one answer provider."""

    kind: str  # "answered" | "no_answer" | "failed"
    answer: str | None = None
    reason: str | None = None

    @classmethod
    def answered(cls, text: str) -> "ProviderOutcome":
        if not text:
            raise ValueError("answered outcome requires non-empty text")
        return cls(kind="answered", answer=text)

    @classmethod
    def no_answer(cls) -> "ProviderOutcome":
        return cls(kind="no_answer")

    @classmethod
    def failed(cls, reason: str) -> "ProviderOutcome":
        return cls(kind="failed", reason=reason)


def kb_provider(kb: KnowledgeBase, question: str) -> ProviderOutcome:
    """Answer from the local knowledge base, or NoAnswer below threshold."""
    answer = match_answer(kb, question)
    if answer is None:
        return ProviderOutcome.no_answer()
    return ProviderOutcome.answered(answer)


def proxy_provider(question: str, upstream: UpstreamConfig, timeout_ms: int | None = None) -> ProviderOutcome:
    """Forward the question to the upstream engine using the webhook wire format.

    The question is form-encoded under the wire default key; the answer is
    read at upstream.response_key. Contract-violating responses map to
    NoAnswer; network errors and timeouts map to Failed.
    """
    effective_ms = upstream.timeout_ms if timeout_ms is None else timeout_ms
    try:
        resp = requests.post(
            upstream.url,
            data={protocol.DEFAULT_QUESTION_KEY: question},
            timeout=effective_ms / 1000.0,
        )
    except requests.Timeout:
        return ProviderOutcome.failed("timeout")
    except requests.ConnectionError:
        return ProviderOutcome.failed("connect")
    except requests.RequestException as exc:
        return ProviderOutcome.failed(f"request: {type(exc).__name__}")
    if resp.status_code != 200:
        return ProviderOutcome.failed(f"http {resp.status_code}")
    keys = KeyConfig(answer_key=upstream.response_key)
    try:
        answer = protocol.parse_response(resp.content, keys)
    except ProtocolError:
        return ProviderOutcome.no_answer()
    return ProviderOutcome.answered(answer)


@dataclass(frozen=True)
class CorsDecision:
    allowed: bool
    headers: dict[str, str]


def cors_filter(origin: str | None, config: GatewayConfig) -> CorsDecision:
    """CORS decision for a request origin under the configured policy.

    Requests without an Origin header are not cross-origin: allowed, no CORS
    headers. Disallowed origins get no allow headers (and 403 on preflight).
    """
    if origin is None:
        return CorsDecision(allowed=True, headers={})
    if config.wildcard_origins:
        allow = "*"
    elif origin in config.allowed_origins:
        allow = origin
    else:
        return CorsDecision(allowed=False, headers={})
    headers = {
        "Access-Control-Allow-Origin": allow,
        "Access-Control-Allow-Methods": ALLOW_METHODS,
        "Access-Control-Allow-Headers": ALLOW_HEADERS,
        "Access-Control-Max-Age": MAX_AGE_SECONDS,
    }
    if allow != "*":
        headers["Vary"] = "Origin"
    return CorsDecision(allowed=True, headers=headers)


class GatewayServer(ThreadingHTTPServer):
    """Threading HTTP server carrying the immutable config/KB and the ask log."""

    daemon_threads = True

    def __init__(self, config: GatewayConfig, kb: KnowledgeBase | None):
        super().__init__((config.host, config.port), GatewayHandler)
        self.config = config
        self.kb = kb
        self._log_lock = threading.Lock()
        self._log_file = open(config.log_path, "a", encoding="utf-8") if config.log_path else None

    @property
    def bound_port(self) -> int:
        return self.server_address[1]

    def log_ask(self, record: dict) -> None:
        if self._log_file is None:
            return
        line = json.dumps(record, ensure_ascii=False)
        with self._log_lock:
            self._log_file.write(line + "\n")
            self._log_file.flush()

    def server_close(self) -> None:
        super().server_close()
        if self._log_file is not None:
            self._log_file.close()
            self._log_file = None

    def handle_error(self, request, client_address) -> None:
        # Clients hanging up mid-response are routine, not server bugs.
        exc = sys.exc_info()[1]
        if isinstance(exc, (ConnectionError, BrokenPipeError, TimeoutError)):
            return
        super().handle_error(request, client_address)


class GatewayHandler(BaseHTTPRequestHandler):
    server: GatewayServer
    protocol_version = "HTTP/1.1"

    # -- plumbing ---------------------------------------------------------

    def log_message(self, format, *args):  # noqa: A002 - stdlib signature
        pass

    def _cors(self) -> CorsDecision:
        return cors_filter(self.headers.get("Origin"), self.server.config)

    def _send(self, status: int, body: bytes | None, content_type: str | None = None,
              extra_headers: dict[str, str] | None = None) -> None:
        self.send_response(status)
        for name, value in self._cors().headers.items():
            self.send_header(name, value)
        if extra_headers:
            for name, value in extra_headers.items():
                self.send_header(name, value)
        if body is not None:
            self.send_header("Content-Type", content_type or protocol.RESPONSE_CONTENT_TYPE)
            self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        # HEAD gets the same headers but must not carry the body bytes.
        if body is not None and self.command != "HEAD":
            self.wfile.write(body)

    def _send_json(self, status: int, obj, extra_headers: dict[str, str] | None = None) -> None:
        body = json.dumps(obj, ensure_ascii=False).encode("utf-8")
        self._send(status, body, protocol.RESPONSE_CONTENT_TYPE, extra_headers)

    def _send_method_not_allowed(self, allow: str) -> None:
        self._send_json(405, {"error": "MethodNotAllowed"}, {"Allow": allow})

    def _send_not_found(self) -> None:
        self._send_json(404, {"error": "NotFound"})

    def _read_body(self) -> bytes:
        length = int(self.headers.get("Content-Length") or 0)
        if length > MAX_BODY_BYTES:
            raise protocol.MalformedBody(f"body exceeds {MAX_BODY_BYTES} bytes")
        return self.rfile.read(length) if length > 0 else b""

    # -- routing ----------------------------------------------------------

    def do_OPTIONS(self):
        if self.path not in _KNOWN_PATHS:
            self._send_not_found()
            return
        decision = self._cors()
        if not decision.allowed:
            # _send would drop the allow headers anyway; 403 makes the denial explicit.
            self._send_json(403, {"error": "OriginDenied"})
            return
        self._send(204, None)

    def do_GET(self):
        if self.path == HEALTH_PATH:
            self._handle_health()
        elif self.path == QUESTIONS_PATH:
            self._handle_questions()
        elif self.path == ASK_PATH:
            self._send_method_not_allowed("POST, OPTIONS")
        else:
            self._send_not_found()

    def do_POST(self):
        if self.path == ASK_PATH:
            self._handle_ask()
        elif self.path in _KNOWN_PATHS:
            self._send_method_not_allowed("GET, OPTIONS")
        else:
            self._send_not_found()

    def _reject_other_method(self):
        if self.path == ASK_PATH:
            self._send_method_not_allowed("POST, OPTIONS")
        elif self.path in _KNOWN_PATHS:
            self._send_method_not_allowed("GET, OPTIONS")
        else:
            self._send_not_found()

    do_PUT = _reject_other_method
    do_DELETE = _reject_other_method
    do_PATCH = _reject_other_method
    do_HEAD = _reject_other_method

    # -- endpoints --------------------------------------------------------

    def _handle_health(self):
        kb = self.server.kb
        self._send_json(200, {"status": "ok", "kb_entries": len(kb.entries) if kb else 0})

    def _handle_questions(self):
        kb = self.server.kb
        if kb is None:
            self._send_json(404, {"error": "NoKnowledgeBase"})
            return
        items = [{"question": item.question, "category": item.category} for item in catalog(kb)]
        self._send_json(200, items)

    def _handle_ask(self):
        start = time.monotonic()
        config = self.server.config
        question: str | None = None
        provider: str | None = None
        try:
            body = self._read_body()
            question = protocol.parse_request(body, self.headers.get("Content-Type", ""), config.keys)
        except ProtocolError as exc:
            self._send_json(400, {"error": exc.code})
            self._log_record(start, question=None, provider=None, answered=False)
            return
        answer, provider = self._run_provider_chain(question, start)
        payload = protocol.render_response(answer, config.keys)
        self._send(200, payload, protocol.RESPONSE_CONTENT_TYPE)
        self._log_record(start, question=question, provider=provider, answered=provider != "fallback")

    def _run_provider_chain(self, question: str, start: float) -> tuple[str, str]:
        """Consult providers in order; the terminal fallback always answers."""
        config = self.server.config
        kb = self.server.kb
        if kb is not None:
            outcome = kb_provider(kb, question)
            if outcome.kind == "answered":
                return outcome.answer, "kb"
        if config.upstream is not None:
            remaining_ms = config.deadline_ms - int((time.monotonic() - start) * 1000)
            if remaining_ms > 0:
                timeout_ms = min(config.upstream.timeout_ms, remaining_ms)
                outcome = proxy_provider(question, config.upstream, timeout_ms)
                if outcome.kind == "answered":
                    return outcome.answer, "upstream"
        fallback = kb.fallback_answer if kb is not None else BUILTIN_FALLBACK_ANSWER
        return fallback, "fallback"

    def _log_record(self, start: float, question: str | None, provider: str | None, answered: bool) -> None:
        self.server.log_ask(
            {
                "ts": datetime.now(timezone.utc).isoformat(timespec="milliseconds"),
                "question": question,
                "provider": provider,
                "latency_ms": int((time.monotonic() - start) * 1000),
                "answered": answered,
            }
        )


def build_server(config: GatewayConfig) -> GatewayServer:
    """Load the KB named by the config (if any) and bind the server socket."""
    kb = load_knowledge_base_file(config.kb_path) if config.kb_path else None
    return GatewayServer(config, kb)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="instant-assist-gateway",
        description="Reference question-answering engine gateway (webhook POST /ask, "
        "catalog GET /questions, GET /health).",
    )
    parser.add_argument(
        "--config",
        help=f"path to the JSON config file (falls back to ${CONFIG_ENV_VAR})",
    )
    args = parser.parse_args(argv)

    config_path = args.config or os.environ.get(CONFIG_ENV_VAR)
    if not config_path:
        print(f"error: no config given; pass --config or set ${CONFIG_ENV_VAR}", file=sys.stderr)
        return 2
    try:
        config = load_config_file(config_path)
        server = build_server(config)
    except (ConfigError, KnowledgeBaseError) as exc:
        for problem in exc.errors:
            print(f"config error: {problem}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"config error: cannot bind {exc}", file=sys.stderr)
        return 2

    entries = len(server.kb.entries) if server.kb else 0
    # flush so process supervisors reading a pipe see the address immediately
    print(f"listening on http://{config.host}:{server.bound_port} ({entries} KB entries)", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
