"""
Base Django settings for the monogamy engine project.
All environment variables are read via python-decouple.
"""
import sys
from pathlib import Path

from decouple import config

# ---------------------------------------------------------------------------
# Paths
# ---------------------------------------------------------------------------
BASE_DIR = Path(__file__).resolve().parent.parent.parent

# ---------------------------------------------------------------------------
# Security – loaded from environment, never hardcoded
# ---------------------------------------------------------------------------
SECRET_KEY = config("SECRET_KEY", default="monogamy-engine-insecure-development-key")

ALLOWED_HOSTS: list[str] = []

# ---------------------------------------------------------------------------
# Application definition
# ---------------------------------------------------------------------------
DJANGO_APPS = [
    "django.contrib.contenttypes",
    "django.contrib.auth",
]

THIRD_PARTY_APPS = [
    "rest_framework",
]

LOCAL_APPS = [
    "apps.core",
    "apps.games",
    "apps.graphs",
    "apps.classical",
    "apps.quantum",
    "apps.npa",
    "apps.ncpoly",
    "apps.monogamy",
]

INSTALLED_APPS = DJANGO_APPS + THIRD_PARTY_APPS + LOCAL_APPS

# ---------------------------------------------------------------------------
# Database – none; every result is computed, nothing is persisted
# ---------------------------------------------------------------------------
DATABASES: dict = {}

# ---------------------------------------------------------------------------
# Internationalisation
# ---------------------------------------------------------------------------
LANGUAGE_CODE = "en-us"
TIME_ZONE = "UTC"
USE_I18N = False
USE_TZ = True

# ---------------------------------------------------------------------------
# Cache: LocMemCache memoises NPA bounds within one process
# ---------------------------------------------------------------------------
CACHES = {
    "default": {
        "BACKEND": "django.core.cache.backends.locmem.LocMemCache",
        "LOCATION": "monogamy-engine-cache",
    }
}

# ---------------------------------------------------------------------------
# Monogamy engine – search caps, solver choice and tolerances
# ---------------------------------------------------------------------------
MONOGAMY_ENGINE = {
    # Exhaustive classical search
    "CLASSICAL_SEARCH_CAP": config("CLASSICAL_SEARCH_CAP", default=1_000_000_000, cast=int),
    "GRAPH_ASSIGNMENT_CAP": config("GRAPH_ASSIGNMENT_CAP", default=20_000_000, cast=int),
    "PARALLEL_REPEAT_CAP": config("PARALLEL_REPEAT_CAP", default=2000, cast=int),
    "TK_MAX_K": config("TK_MAX_K", default=6, cast=int),
    # NPA hierarchy
    "NPA_SOLVER": config("NPA_SOLVER", default="CLARABEL"),
    "NPA_MAX_MATRIX": config("NPA_MAX_MATRIX", default=400, cast=int),
    "NPA_DEFAULT_LEVEL": config("NPA_DEFAULT_LEVEL", default="2"),
    "SDP_TOLERANCE": config("SDP_TOLERANCE", default=1e-8, cast=float),
    "FEASIBILITY_TOLERANCE": config("FEASIBILITY_TOLERANCE", default=1e-7, cast=float),
    "ADVANTAGE_TOLERANCE": config("ADVANTAGE_TOLERANCE", default=1e-3, cast=float),
    # Region scans
    "SCAN_MAX_POINTS": config("SCAN_MAX_POINTS", default=10_000, cast=int),
    "SCAN_WORKERS": config("SCAN_WORKERS", default=1, cast=int),
    # Reproducibility and memoisation
    "RANDOM_SEED": config("RANDOM_SEED", default=20240521, cast=int),
    "RESULT_CACHE_TIMEOUT": config("RESULT_CACHE_TIMEOUT", default=3600, cast=int),
}

# ---------------------------------------------------------------------------
# Structured logging via structlog (stderr; stdout carries command output)
# ---------------------------------------------------------------------------
import structlog  # noqa: E402

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "json_formatter": {
            "()": structlog.stdlib.ProcessorFormatter,
            "processor": structlog.processors.JSONRenderer(),
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "stream": sys.stderr,
            "formatter": "json_formatter",
        },
    },
    "root": {
        "handlers": ["console"],
        "level": "WARNING",
    },
    "loggers": {
        "django": {
            "handlers": ["console"],
            "level": "INFO",
            "propagate": False,
        },
        "apps": {
            "handlers": ["console"],
            "level": "DEBUG",
            "propagate": False,
        },
    },
}

structlog.configure(
    processors=[
        structlog.contextvars.merge_contextvars,
        structlog.stdlib.filter_by_level,
        structlog.stdlib.add_logger_name,
        structlog.stdlib.add_log_level,
        structlog.stdlib.PositionalArgumentsFormatter(),
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.StackInfoRenderer(),
        structlog.processors.format_exc_info,
        structlog.processors.UnicodeDecoder(),
        structlog.stdlib.ProcessorFormatter.wrap_for_formatter,
    ],
    context_class=dict,
    logger_factory=structlog.stdlib.LoggerFactory(),
    wrapper_class=structlog.stdlib.BoundLogger,
    cache_logger_on_first_use=True,
)
