"""Command-line entry point for the ERBM toolkit.

Run with: python -m src.main <command> --domain FILE [flags]
"""

import sys

from src.modules.cli.service import run

if __name__ == "__main__":
    sys.exit(run(sys.argv[1:]))
