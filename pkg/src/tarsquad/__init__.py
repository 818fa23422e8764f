"""Translate extractive-QA datasets and re-anchor answers in the translation."""

__version__ = "0.1.0"
