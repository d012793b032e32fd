"""Reentrancy corpus forge: generate, modernize, verify, assemble, evaluate."""

__version__ = "0.1.0"
