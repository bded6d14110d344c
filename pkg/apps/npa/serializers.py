import math

from rest_framework import serializers

from apps.npa.models import FeasibilityResult, SdpSolution


class BoundReportSerializer(serializers.Serializer):
    """{"bound": float, "level": str, "gap": float, "status": str} plus solve details."""

    game = serializers.CharField(required=False)
    bound = serializers.FloatField()
    level = serializers.CharField()
    gap = serializers.FloatField()
    status = serializers.ChoiceField(choices=SdpSolution.STATUSES)
    primal = serializers.FloatField()
    size = serializers.IntegerField(min_value=1)
    solver = serializers.CharField()

    @staticmethod
    def from_solution(solution: SdpSolution, game: str | None = None) -> dict:
        payload = {
            "bound": solution.dual,
            "level": solution.level,
            "gap": solution.gap,
            "status": solution.status,
            "primal": solution.primal,
            "size": solution.size,
            "solver": solution.solver,
        }
        if game is not None:
            payload["game"] = game
        return dict(BoundReportSerializer(payload).data)


class FeasibilityReportSerializer(serializers.Serializer):
    verdict = serializers.ChoiceField(choices=FeasibilityResult.VERDICTS)
    t_primal = serializers.FloatField(allow_null=True)
    t_certified = serializers.FloatField(allow_null=True)
    residual = serializers.FloatField(allow_null=True)
    level = serializers.CharField()
    size = serializers.IntegerField()

    @staticmethod
    def from_result(result: FeasibilityResult) -> dict:
        def finite(value: float) -> float | None:
            return value if math.isfinite(value) else None

        payload = {
            "verdict": result.verdict,
            "t_primal": finite(result.t_primal),
            "t_certified": finite(result.t_certified),
            "residual": finite(result.residual),
            "level": result.level,
            "size": result.size,
        }
        return dict(FeasibilityReportSerializer(payload).data)
