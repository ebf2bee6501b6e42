"""Conformance probes for third-party engines against the webhook contract.

A probe is one question round-trip judged on HTTP status, response shape,
and latency against the component's 2-second client timeout. The CLI wraps
probe/preflight/batch with machine-readable (--json) output.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import requests

from .protocol import ContractReport, KeyConfig, TimeoutBudget, validate_response_contract

PASS = "PASS"
FAIL = "FAIL"

# Non-contract FAIL reasons.
REASON_UNREACHABLE = "Unreachable"
REASON_TIMEOUT = "Timeout"
REASON_BAD_STATUS = "BadStatus"
REASON_OVER_BUDGET = "OverBudget"
REASON_ORIGIN_DENIED = "OriginDenied"
REASON_METHOD_DENIED = "MethodDenied"


class BatchInputError(Exception):
    """Unusable questions file (missing, unreadable, or no questions)."""


@dataclass(frozen=True)
class ProbeReport:
    """Verdict for one engine probe. PASS iff status 200, clean contract, on budget."""

    endpoint: str
    question: str
    http_status: int  # 0 when no response was received
    latency_ms: int
    contract: ContractReport
    verdict: str
    reason: str | None = None

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_json_dict(self) -> dict:
        return {
            "endpoint": self.endpoint,
            "question": self.question,
            "http_status": self.http_status,
            "latency_ms": self.latency_ms,
            "violations": [{"code": v.code, "detail": v.detail} for v in self.contract.violations],
            "verdict": self.verdict,
            "reason": self.reason,
        }

    def human_line(self) -> str:
        verdict = PASS if self.passed else f"{FAIL}({self.reason})"
        return f"{verdict:<22} {self.latency_ms:>6} ms  {self.question}"


@dataclass(frozen=True)
class PreflightReport:
    endpoint: str
    origin: str
    verdict: str
    reason: str | None = None
    http_status: int = 0

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_json_dict(self) -> dict:
        return {
            "endpoint": self.endpoint,
            "origin": self.origin,
            "http_status": self.http_status,
            "verdict": self.verdict,
            "reason": self.reason,
        }


@dataclass(frozen=True)
class BatchSummary:
    total: int
    passed: int
    failed: int
    reports: tuple[ProbeReport, ...]

    def to_json_dict(self) -> dict:
        return {"total": self.total, "passed": self.passed, "failed": self.failed}


def _elapsed_ms(start: float) -> int:
    return int((time.monotonic() - start) * 1000)


def probe(
    endpoint: str,
    question: str,
    keys: KeyConfig = KeyConfig(),
    budget: TimeoutBudget = TimeoutBudget(),
) -> ProbeReport:
    """POST one question to the engine and judge the reply against the contract."""
    start = time.monotonic()
    try:
        resp = requests.post(
            endpoint,
            data={keys.question_key: question},
            timeout=budget.total_ms / 1000.0,
        )
    except requests.Timeout:
        return ProbeReport(endpoint, question, 0, _elapsed_ms(start), ContractReport(),
                           FAIL, REASON_TIMEOUT)
    except requests.RequestException:
        return ProbeReport(endpoint, question, 0, _elapsed_ms(start), ContractReport(),
                           FAIL, REASON_UNREACHABLE)
    latency_ms = _elapsed_ms(start)
    contract = validate_response_contract(resp.content, keys)
    if resp.status_code != 200:
        verdict, reason = FAIL, REASON_BAD_STATUS
    elif not contract.ok:
        verdict, reason = FAIL, contract.violations[0].code
    elif latency_ms > budget.total_ms:
        verdict, reason = FAIL, REASON_OVER_BUDGET
    else:
        verdict, reason = PASS, None
    return ProbeReport(endpoint, question, resp.status_code, latency_ms, contract, verdict, reason)


def preflight_check(endpoint: str, origin: str, timeout_ms: int = 2000) -> PreflightReport:
    """Send a CORS preflight and check that the engine authorizes origin + POST."""
    try:
        resp = requests.options(
            endpoint,
            headers={"Origin": origin, "Access-Control-Request-Method": "POST"},
            timeout=timeout_ms / 1000.0,
        )
    except requests.RequestException:
        return PreflightReport(endpoint, origin, FAIL, REASON_UNREACHABLE)
    allow_origin = resp.headers.get("Access-Control-Allow-Origin")
    if resp.status_code not in (200, 204) or allow_origin not in (origin, "*"):
        return PreflightReport(endpoint, origin, FAIL, REASON_ORIGIN_DENIED, resp.status_code)
    methods = [m.strip().upper() for m in resp.headers.get("Access-Control-Allow-Methods", "").split(",")]
    if "POST" not in methods and "*" not in methods:
        return PreflightReport(endpoint, origin, FAIL, REASON_METHOD_DENIED, resp.status_code)
    return PreflightReport(endpoint, origin, PASS, None, resp.status_code)


def read_questions_file(path: str | Path) -> list[str]:
    """One question per line, UTF-8, blank lines ignored."""
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise BatchInputError(f"cannot read questions file {path}: {exc}") from exc
    questions = [line.strip() for line in raw.splitlines() if line.strip()]
    if not questions:
        raise BatchInputError(f"questions file {path} contains no questions")
    return questions


def batch_run(
    endpoint: str,
    questions_file: str | Path,
    keys: KeyConfig = KeyConfig(),
    budget: TimeoutBudget = TimeoutBudget(),
    concurrency: int = 1,
    on_report=None,
) -> BatchSummary:
    """Probe every question in the file; reports keep input order.

    Sequential by default so latency numbers are uncontended; `concurrency`
    parallelizes at the cost of contended timings. `on_report` is called with
    each ProbeReport as it is finalized (in input order).
    """
    questions = read_questions_file(questions_file)
    if concurrency <= 1:
        reports = []
        for question in questions:
            report = probe(endpoint, question, keys, budget)
            if on_report:
                on_report(report)
            reports.append(report)
    else:
        with ThreadPoolExecutor(max_workers=concurrency) as pool:
            reports = list(pool.map(lambda q: probe(endpoint, q, keys, budget), questions))
        for report in reports:
            if on_report:
                on_report(report)
    passed = sum(1 for r in reports if r.passed)
    return BatchSummary(
        total=len(reports),
        passed=passed,
        failed=len(reports) - passed,
        reports=tuple(reports),
    )


def _add_key_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--data-key", default=KeyConfig().question_key,
                     help="request parameter name for the question")
    sub.add_argument("--response-key", default=KeyConfig().answer_key,
                     help="response member name holding the answer")
    sub.add_argument("--timeout-ms", type=int, default=TimeoutBudget().total_ms,
                     help="latency budget in ms (default: the component's 2000 ms client timeout)")


def _make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="instant-assist-conformance",
        description="Certify an engine endpoint against the question-answering "
        "webhook contract (response shape, latency budget, CORS preflight). "
        "The default 2000 ms budget mirrors the browser component's hard "
        "client-side timeout.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    p_probe = commands.add_parser("probe", help="one question round-trip")
    p_probe.add_argument("--engine", required=True, help="engine endpoint URL")
    p_probe.add_argument("--question", required=True)
    _add_key_args(p_probe)
    p_probe.add_argument("--json", action="store_true", help="machine-readable output")

    p_pre = commands.add_parser("preflight", help="CORS preflight check")
    p_pre.add_argument("--engine", required=True, help="engine endpoint URL")
    p_pre.add_argument("--origin", required=True, help="Origin header value to present")
    p_pre.add_argument("--json", action="store_true", help="machine-readable output")

    p_batch = commands.add_parser("batch", help="probe every question in a file")
    p_batch.add_argument("--engine", required=True, help="engine endpoint URL")
    p_batch.add_argument("--file", required=True, help="UTF-8 questions file, one per line")
    _add_key_args(p_batch)
    p_batch.add_argument("--concurrency", type=int, default=1,
                         help="parallel probes in flight (latency numbers become contended)")
    p_batch.add_argument("--json", action="store_true", help="machine-readable output")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _make_parser()
    args = parser.parse_args(argv)

    if args.command == "probe":
        keys = _keys_from_args(parser, args)
        report = probe(args.engine, args.question, keys, _budget_from_args(parser, args))
        print(json.dumps(report.to_json_dict(), ensure_ascii=False) if args.json else report.human_line())
        return 0 if report.passed else 1

    if args.command == "preflight":
        report = preflight_check(args.engine, args.origin)
        if args.json:
            print(json.dumps(report.to_json_dict(), ensure_ascii=False))
        else:
            verdict = PASS if report.passed else f"{FAIL}({report.reason})"
            print(f"{verdict:<22} preflight {args.origin} -> {args.engine}")
        return 0 if report.passed else 1

    # batch
    keys = _keys_from_args(parser, args)
    emit = (lambda r: print(json.dumps(r.to_json_dict(), ensure_ascii=False))) if args.json \
        else (lambda r: print(r.human_line()))
    try:
        summary = batch_run(
            args.engine,
            args.file,
            keys,
            _budget_from_args(parser, args),
            concurrency=max(1, args.concurrency),
            on_report=emit,
        )
    except BatchInputError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    if args.json:
        print(json.dumps(summary.to_json_dict(), ensure_ascii=False))
    else:
        print(f"{summary.passed}/{summary.total} passed")
    return 0 if summary.failed == 0 else 1


def _keys_from_args(parser: argparse.ArgumentParser, args) -> KeyConfig:
    try:
        return KeyConfig(question_key=args.data_key, answer_key=args.response_key)
    except ValueError as exc:
        parser.error(str(exc))  # exits 2


def _budget_from_args(parser: argparse.ArgumentParser, args) -> TimeoutBudget:
    try:
        return TimeoutBudget(total_ms=args.timeout_ms)
    except ValueError as exc:
        parser.error(str(exc))  # exits 2


if __name__ == "__main__":
    sys.exit(main())
