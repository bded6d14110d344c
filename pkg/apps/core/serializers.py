from rest_framework import serializers

from apps.core.exceptions import InputRangeError
from apps.core.utils import format_fraction, parse_fraction


class FractionField(serializers.Field):
    """Rationals travel as "p/q" strings."""

    def to_representation(self, value):
        return format_fraction(value)

    def to_internal_value(self, data):
        try:
            return parse_fraction(data)
        except InputRangeError as exc:
            raise serializers.ValidationError(str(exc))


def edge_key(edge: tuple[int, int]) -> str:
    """Edge (u, v) as the JSON object key "u-v"."""
    return f"{edge[0]}-{edge[1]}"
