#!/usr/bin/env python3
"""Start the reference gateway with the repository's sample config.

Usage:
    python3 scripts/run_gateway.py [--config PATH]

Without --config (and without $INSTANT_ASSIST_CONFIG set) this falls back to
data/gateway.config.json, which serves the sample flood KB on 127.0.0.1:8765.
"""

import os
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from instant_assist.gateway import CONFIG_ENV_VAR, main  # noqa: E402

if __name__ == "__main__":
    if "--config" not in sys.argv and CONFIG_ENV_VAR not in os.environ:
        default = Path(__file__).resolve().parents[1] / "data" / "gateway.config.json"
        sys.argv += ["--config", str(default)]
    sys.exit(main())
