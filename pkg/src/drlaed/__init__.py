"""Wasserstein distributionally robust look-ahead economic dispatch."""

__version__ = "0.1.0"
