"""Entry point."""

import sys

from uav_coverage.cli.interface import run_cli
from uav_coverage.logging_config import setup_logging


def main():
    """Application entry point."""
    setup_logging()
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
