from __future__ import annotations

import logging
import os

from fastmcp import FastMCP

from dgalab.config import parse_config
from dgalab.providers.mcp import McpLabProvider

logger = logging.getLogger(__name__)

app: FastMCP = FastMCP(
    "dgalab",
    instructions="Run distributed SSSP/BFS experiments on a simulated active-message runtime",
)

# Optional base configuration for every tool call
config_path = os.environ.get("DGALAB_CONFIG")
if config_path:
    logger.info("Base configuration from %s", config_path)
base = parse_config(config_path) if config_path else None

McpLabProvider.from_config(app, base)

if __name__ == "__main__":
    app.run()
