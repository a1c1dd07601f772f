"""Command-line package for the coupling pipeline."""

from .app import app

__all__ = ["app"]
