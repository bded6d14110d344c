"""
Production settings – reproduction runs on shared machines.
All sensitive values come from environment variables.
"""
from decouple import config

from .base import *  # noqa: F401, F403

DEBUG = False

SECRET_KEY = config("SECRET_KEY")

# ---------------------------------------------------------------------------
# Parallel scans are worth it on dedicated hosts
# ---------------------------------------------------------------------------
MONOGAMY_ENGINE["SCAN_WORKERS"] = config("SCAN_WORKERS", default=4, cast=int)  # noqa: F405

# ---------------------------------------------------------------------------
# Production logging: INFO level only
# ---------------------------------------------------------------------------
LOGGING["loggers"]["apps"]["level"] = "INFO"  # noqa: F405
