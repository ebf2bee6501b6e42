"""Server side, protocol tooling, and conformance tester for the Instant Expert
smart-assistant architecture: webhook codec, reference knowledge engine, HTTP
gateway with provider chain, and the engine conformance CLI."""

from .config import ConfigError, GatewayConfig, UpstreamConfig, load_config, load_config_file
from .knowledge import (
    CatalogItem,
    KnowledgeBase,
    KnowledgeBaseError,
    KnowledgeEntry,
    MatchResult,
    answer_for,
    best_match,
    catalog,
    jaccard_score,
    load_knowledge_base,
    load_knowledge_base_file,
    normalize,
)
from .protocol import (
    ContractReport,
    KeyConfig,
    ProtocolError,
    TimeoutBudget,
    Violation,
    parse_request,
    parse_response,
    render_response,
    validate_response_contract,
)

__version__ = "0.1.0"

__all__ = [
    "CatalogItem",
    "ConfigError",
    "ContractReport",
    "GatewayConfig",
    "KeyConfig",
    "KnowledgeBase",
    "KnowledgeBaseError",
    "KnowledgeEntry",
    "MatchResult",
    "ProtocolError",
    "TimeoutBudget",
    "UpstreamConfig",
    "Violation",
    "answer_for",
    "best_match",
    "catalog",
    "jaccard_score",
    "load_config",
    "load_config_file",
    "load_knowledge_base",
    "load_knowledge_base_file",
    "normalize",
    "parse_request",
    "parse_response",
    "render_response",
    "validate_response_contract",
]
