"""Entrypoint for the coupling pipeline command line."""

from __future__ import annotations

import logging
import sys

from src.cli import app
from src.config.settings import get_report_settings


def main() -> None:
    """Configure logging on stderr and dispatch to the typer application."""

    logging.basicConfig(
        level=get_report_settings().log_level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    app()


if __name__ == "__main__":
    main()
