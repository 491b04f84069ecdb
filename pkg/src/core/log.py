"""Logging setup shared by the CLI and scripts.

Library modules only call ``logging.getLogger(__name__)``; handlers are
installed here, once, on stderr so that reports on stdout stay byte-stable.
"""

import logging
import sys

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def configure_logging(level: str = "WARNING") -> None:
    """Install the stderr handler for the toolkit.

    Args:
        level: Logging level name (DEBUG, INFO, WARNING, ERROR).
    """
    numeric = getattr(logging, str(level).upper(), None)
    if not isinstance(numeric, int):
        raise ValueError(f"Unknown log level: {level}")
    logging.basicConfig(
        level=numeric, format=LOG_FORMAT, handlers=[logging.StreamHandler(sys.stderr)]
    )
    logging.getLogger("src").setLevel(numeric)
