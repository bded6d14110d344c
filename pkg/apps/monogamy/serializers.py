from rest_framework import serializers

from apps.core.serializers import FractionField, edge_key
from apps.monogamy.models import MonogamyReport, PolygamyReport


class GraphEntrySerializer(serializers.Serializer):
    name = serializers.CharField()
    num_vertices = serializers.IntegerField()
    num_edges = serializers.IntegerField()
    omega_graph = FractionField()
    bound = serializers.FloatField(allow_null=True)
    level = serializers.CharField(allow_null=True)
    status = serializers.CharField()
    hom_exists = serializers.BooleanField()
    has_p3_decomposition = serializers.BooleanField()
    in_some_tk = serializers.BooleanField()
    advantage = serializers.BooleanField(allow_null=True)


class MonogamyReportSerializer(serializers.Serializer):
    game = serializers.CharField()
    omega_classical = FractionField()
    max_k = serializers.IntegerField(min_value=2)
    entries = GraphEntrySerializer(many=True)
    classification = serializers.CharField()
    conclusion = serializers.CharField()
    notes = serializers.ListField(child=serializers.CharField())

    @staticmethod
    def from_report(report: MonogamyReport) -> dict:
        return dict(MonogamyReportSerializer(report).data)


class OrCheckSerializer(serializers.Serializer):
    omega = FractionField()
    omega_or = FractionField()
    bound = FractionField()
    holds = serializers.BooleanField()


class PolygamyReportSerializer(serializers.Serializer):
    game = serializers.CharField()
    edge_values = serializers.DictField(child=serializers.FloatField())
    instance_values = serializers.DictField(child=serializers.DictField(child=serializers.FloatField()))
    omega_base = FractionField()
    omega_cited = FractionField()
    flagged = serializers.BooleanField()
    or_checks = OrCheckSerializer(many=True)
    or_bound_holds = serializers.BooleanField()
    seed = serializers.IntegerField()

    @staticmethod
    def from_report(report: PolygamyReport) -> dict:
        payload = {
            "game": report.game,
            "edge_values": {edge_key(e): v for e, v in report.edge_values.items()},
            "instance_values": {
                name: {edge_key(e): v for e, v in values.items()} for name, values in report.instance_values.items()
            },
            "omega_base": report.omega_base,
            "omega_cited": report.omega_cited,
            "flagged": report.flagged,
            "or_checks": report.or_checks,
            "or_bound_holds": report.or_bound_holds,
            "seed": report.seed,
        }
        return dict(PolygamyReportSerializer(payload).data)
