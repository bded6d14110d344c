import hashlib
import json
from fractions import Fraction

from django.conf import settings

from apps.core.exceptions import InputRangeError


class ResultHasher:
    """Utility for producing deterministic SHA-256 hashes of problem descriptions."""

    @staticmethod
    def generate_hash(payload: dict) -> str:
        """SHA256 of the JSON with keys sorted deterministically."""
        normalized = json.dumps(payload, sort_keys=True, default=str)
        return hashlib.sha256(normalized.encode()).hexdigest()


def engine_setting(name: str, override=None):
    """Return `override` when given, else MONOGAMY_ENGINE[name]."""
    if override is not None:
        return override
    return settings.MONOGAMY_ENGINE[name]


def parse_fraction(text: str | int | Fraction) -> Fraction:
    """Parse "p/q" (or an integer) into a Fraction."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputRangeError(f"Not a rational literal: {text!r}") from exc


def format_fraction(value: Fraction) -> str:
    """Render a Fraction as "p/q" (integers keep the "/1" out)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"
