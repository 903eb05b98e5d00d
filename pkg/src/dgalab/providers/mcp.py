from __future__ import annotations

from fastmcp import FastMCP

from dgalab.models import ExperimentConfig
from dgalab.providers.base import LabProvider


class McpLabProvider:
    def __init__(self, mcp_instance: FastMCP, lab_provider: LabProvider):
        self._mcp_instance = mcp_instance
        self._lab_provider = lab_provider
        self.__init_tools()

    def __init_tools(self):
        t = self._mcp_instance.tool
        p = self._lab_provider

        # ── Graphs ─────────────────────────────
        t(p.generate_graph)

        # ── Experiments ────────────────────────
        t(p.run_experiment)
        t(p.sweep_experiment)
        t(p.validate_algorithms)

        # ── Configuration ──────────────────────
        t(p.list_config_keys)

    @property
    def app(self) -> FastMCP:
        return self._mcp_instance

    @classmethod
    def from_config(cls, mcp_instance: FastMCP, base: ExperimentConfig | None = None):
        return cls(mcp_instance, LabProvider(base))
