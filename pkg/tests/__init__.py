"""Tests for the remote spin coupling toolkit."""
