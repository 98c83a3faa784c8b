#!/usr/bin/env python3
"""Main entry point for the NPS sparsifier."""

import logging
import sys
from pathlib import Path

from rich.console import Console
from rich.logging import RichHandler

# Add src directory to Python path
sys.path.insert(0, str(Path(__file__).parent / "src"))

from src.config import get_settings  # noqa: E402


def setup_logging():
    """Setup logging configuration."""
    settings = get_settings()
    logs_dir = Path(settings.log_dir)
    logs_dir.mkdir(parents=True, exist_ok=True)

    file_handler = logging.FileHandler(logs_dir / "sparsifier.log")
    file_handler.setFormatter(logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s"))

    logging.basicConfig(
        level=settings.log_level.upper(),
        format="%(message)s",
        handlers=[
            file_handler,
            RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=True, level=logging.WARNING),
        ],
    )


def main():
    """Main entry point."""
    setup_logging()
    logger = logging.getLogger(__name__)
    logger.info(f"nps-sparsify {' '.join(sys.argv[1:])}")

    from src.cli_interface import cli

    cli()


if __name__ == "__main__":
    main()
