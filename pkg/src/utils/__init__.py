"""Utility helpers for the remote spin coupling toolkit."""
