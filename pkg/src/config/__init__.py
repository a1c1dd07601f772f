"""Configuration package: simulation and report settings."""
