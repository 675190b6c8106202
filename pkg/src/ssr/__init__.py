"""Symbolic soft-logic reasoning over LLM-translated logic programs."""

__version__ = "0.1.0"
