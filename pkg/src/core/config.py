"""Configuration management for the ERBM toolkit.

This module loads and provides access to environment variables and numerical
defaults. CLI flags override these values per invocation.
"""

import os

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


def _int_env(name: str, default: int) -> int:
    return int(os.getenv(name, str(default)))


def _float_env(name: str, default: float) -> float:
    return float(os.getenv(name, repr(default)))


class Settings:
    """Application settings loaded from environment variables."""

    # Discretization
    NODES: int = _int_env("ERBM_NODES", 256)
    FOURIER_MODES: int = _int_env("ERBM_FOURIER_MODES", 64)
    SELF_INTERSECTION_SEGMENTS: int = _int_env("ERBM_SELF_INTERSECTION_SEGMENTS", 2048)

    # ERBM restarts
    COLLAR: float = _float_env("ERBM_COLLAR", 0.5)

    # Sampler
    SEED: int = _int_env("ERBM_SEED", 20240601)
    WORKERS: int = _int_env("ERBM_WORKERS", 1)
    PATHS: int = _int_env("ERBM_PATHS", 100000)
    EPSILON: float = _float_env("ERBM_EPSILON", 1e-6)
    MAX_EVENTS: int = _int_env("ERBM_MAX_EVENTS", 100000)
    MAX_STEPS: int = _int_env("ERBM_MAX_STEPS", 100000)

    # Output
    OUTPUT_DIR: str = os.getenv("ERBM_OUTPUT_DIR", "output")
    LOG_LEVEL: str = os.getenv("ERBM_LOG_LEVEL", "WARNING")

    # Application
    APP_NAME: str = "erbm-toolkit"
    APP_VERSION: str = "1.0.0"


# Global settings instance
settings = Settings()
