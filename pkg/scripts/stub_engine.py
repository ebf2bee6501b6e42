#!/usr/bin/env python3
"""Deliberately well- or mis-behaving engine stub for conformance experiments.

Modes:
    ok         answer every question correctly (echoes the question back)
    wrong-key  reply {"answer": ...} instead of the expected response key
    not-json   reply with a non-JSON body
    empty      reply {"resultText": ""}
    slow       reply correctly but only after --delay-ms

Examples:
    python3 scripts/stub_engine.py --port 9001 --mode slow --delay-ms 3000
    instant-assist-conformance probe --engine http://127.0.0.1:9001/ask --question hi
"""

import argparse
import json
import sys
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from instant_assist import protocol  # noqa: E402


def make_handler(mode: str, delay_ms: int, answer_key: str):
    class StubHandler(BaseHTTPRequestHandler):
        def log_message(self, format, *args):
            print(f"[stub:{mode}] {format % args}")

        def do_POST(self):
            length = int(self.headers.get("Content-Length") or 0)
            raw = self.rfile.read(length) if length else b""
            try:
                question = protocol.parse_request(raw, self.headers.get("Content-Type", ""))
            except protocol.ProtocolError:
                question = "(unparsed)"

            if delay_ms:
                time.sleep(delay_ms / 1000.0)

            if mode == "not-json":
                body = b"this is not json"
            elif mode == "wrong-key":
                body = json.dumps({"answer": f"you asked: {question}"}).encode("utf-8")
            elif mode == "empty":
                body = json.dumps({answer_key: ""}).encode("utf-8")
            else:  # ok, slow
                body = json.dumps({answer_key: f"you asked: {question}"}).encode("utf-8")

            self.send_response(200)
            self.send_header("Content-Type", protocol.RESPONSE_CONTENT_TYPE)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

    return StubHandler


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--port", type=int, default=9001)
    parser.add_argument("--mode", choices=["ok", "wrong-key", "not-json", "empty", "slow"], default="ok")
    parser.add_argument("--delay-ms", type=int, default=0, help="forced before-response delay (implied 3000 for slow)")
    parser.add_argument("--answer-key", default=protocol.DEFAULT_ANSWER_KEY)
    args = parser.parse_args()

    delay_ms = args.delay_ms or (3000 if args.mode == "slow" else 0)
    server = ThreadingHTTPServer(("127.0.0.1", args.port), make_handler(args.mode, delay_ms, args.answer_key))
    server.daemon_threads = True
    # report the bound port (matters with --port 0) and flush for pipe readers
    bound_port = server.server_address[1]
    print(f"stub engine ({args.mode}, delay {delay_ms} ms) on http://127.0.0.1:{bound_port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
