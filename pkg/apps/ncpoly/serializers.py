from rest_framework import serializers

from apps.core.exceptions import InputRangeError
from apps.ncpoly.models import NcPolynomial, SosVerdict
from apps.ncpoly.services import ExpressionService


class SosIdentitySerializer(serializers.Serializer):
    """
    Identity JSON:
        {"target": "2 - (A0*B0 + ...)/2", "squares": ["...", ...]}
    The empty identity {"target": "0", "squares": []} is valid.
    """

    target = serializers.CharField(allow_blank=False, trim_whitespace=True)
    squares = serializers.ListField(child=serializers.CharField(), allow_empty=True)

    @staticmethod
    def to_identity(payload: dict) -> dict:
        serializer = SosIdentitySerializer(data=payload)
        if not serializer.is_valid():
            raise InputRangeError(f"Invalid identity JSON: {serializer.errors}")
        data = serializer.validated_data
        target = ExpressionService.parse_expression(data["target"])
        constant = target.coefficient(())
        return {
            "target": target,
            "bell": NcPolynomial.constant(constant) - target,
            "constant": constant,
            "squares": [ExpressionService.parse_expression(s) for s in data["squares"]],
        }


class SosReportSerializer(serializers.Serializer):
    identity = serializers.CharField()
    verdict = serializers.ChoiceField(choices=["exact", "scaled", "weighted", "mismatch"])
    exact_match = serializers.BooleanField()
    certified = serializers.BooleanField()
    residual = serializers.CharField()
    scale = serializers.CharField(allow_null=True)
    weights = serializers.ListField(child=serializers.CharField(), allow_null=True)
    certified_bound = serializers.CharField(allow_null=True)
    certified_bound_float = serializers.FloatField(allow_null=True)
    notes = serializers.ListField(child=serializers.CharField())

    @staticmethod
    def from_verdict(identity: str, verdict: SosVerdict, bound=None) -> dict:
        payload = {
            "identity": identity,
            "verdict": verdict.verdict,
            "exact_match": verdict.exact_match,
            "certified": verdict.certified,
            "residual": str(verdict.residual),
            "scale": None if verdict.scale is None else str(verdict.scale),
            "weights": None if verdict.weights is None else [str(w) for w in verdict.weights],
            "certified_bound": None if bound is None else str(bound),
            "certified_bound_float": None if bound is None else float(bound),
            "notes": list(verdict.notes),
        }
        return dict(SosReportSerializer(payload).data)
