from rest_framework import serializers

from apps.classical.models import HomomorphismCriterionReport
from apps.core.serializers import FractionField


class ClassicalValueSerializer(serializers.Serializer):
    omega_classical = FractionField()


class HomomorphismCriterionReportSerializer(serializers.Serializer):
    omega_classical = FractionField()
    omega_graph = FractionField()
    hom_exists = serializers.BooleanField()
    lemma1_consistent = serializers.BooleanField(source="criterion_consistent")

    @staticmethod
    def from_report(report: HomomorphismCriterionReport) -> dict:
        return dict(HomomorphismCriterionReportSerializer(report).data)
