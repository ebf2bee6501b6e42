"""Shared fixtures: in-process gateway on an ephemeral port, scriptable stub engines."""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

from instant_assist.config import GatewayConfig, UpstreamConfig
from instant_assist.gateway import GatewayServer
from instant_assist.knowledge import KnowledgeBase, load_knowledge_base_file
from instant_assist.protocol import KeyConfig

DATA_DIR = Path(__file__).resolve().parents[1] / "data"
SAMPLE_KB_PATH = DATA_DIR / "sample_kb.json"


@pytest.fixture(scope="session")
def sample_kb_path() -> Path:
    return SAMPLE_KB_PATH


@pytest.fixture(scope="session")
def sample_kb() -> KnowledgeBase:
    return load_knowledge_base_file(SAMPLE_KB_PATH)


@dataclass
class RunningGateway:
    server: GatewayServer
    config: GatewayConfig

    @property
    def port(self) -> int:
        return self.server.bound_port

    @property
    def url(self) -> str:
        return f"http://127.0.0.1:{self.port}"

    @property
    def ask_url(self) -> str:
        return self.url + "/ask"


@pytest.fixture
def make_gateway():
    """Factory starting a gateway on an ephemeral loopback port."""
    running: list[RunningGateway] = []

    def start(
        kb: KnowledgeBase | None = None,
        keys: KeyConfig = KeyConfig(),
        allowed_origins: tuple[str, ...] = ("*",),
        deadline_ms: int = 1500,
        upstream: UpstreamConfig | None = None,
        log_path: Path | None = None,
    ) -> RunningGateway:
        config = GatewayConfig(
            bind_address="127.0.0.1:0",
            keys=keys,
            allowed_origins=allowed_origins,
            deadline_ms=deadline_ms,
            upstream=upstream,
            log_path=log_path,
        )
        server = GatewayServer(config, kb)
        threading.Thread(target=server.serve_forever, daemon=True).start()
        gateway = RunningGateway(server=server, config=config)
        running.append(gateway)
        return gateway

    yield start
    for gateway in running:
        gateway.server.shutdown()
        gateway.server.server_close()


@dataclass
class StubEngine:
    server: ThreadingHTTPServer
    requests_seen: list[bytes] = field(default_factory=list)

    @property
    def port(self) -> int:
        return self.server.server_address[1]

    @property
    def url(self) -> str:
        return f"http://127.0.0.1:{self.port}/ask"


@pytest.fixture
def stub_engine():
    """Factory for scriptable engines: respond(raw_body) -> (status, content_type, body, delay_s)."""
    running: list[StubEngine] = []

    def start(respond) -> StubEngine:
        stub = StubEngine(server=None)  # type: ignore[arg-type]

        class StubHandler(BaseHTTPRequestHandler):
            def log_message(self, format, *args):
                pass

            def do_POST(self):
                length = int(self.headers.get("Content-Length") or 0)
                raw = self.rfile.read(length) if length else b""
                stub.requests_seen.append(raw)
                status, content_type, body, delay_s = respond(raw)
                if delay_s:
                    time.sleep(delay_s)
                self.send_response(status)
                self.send_header("Content-Type", content_type)
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

        class StubServer(ThreadingHTTPServer):
            daemon_threads = True

            def handle_error(self, request, client_address):
                pass  # clients time out on purpose in these tests

        server = StubServer(("127.0.0.1", 0), StubHandler)
        stub.server = server
        threading.Thread(target=server.serve_forever, daemon=True).start()
        running.append(stub)
        return stub

    yield start
    for stub in running:
        stub.server.shutdown()
        stub.server.server_close()


def json_answer_body(answer: str, key: str = "resultText") -> bytes:
    import json

    return json.dumps({key: answer}).encode("utf-8")
