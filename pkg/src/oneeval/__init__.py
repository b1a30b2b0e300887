"""Agentic evaluation orchestration: NL request -> plan -> resolve -> score -> report."""

__version__ = "0.1.0"
