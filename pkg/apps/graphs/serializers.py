from rest_framework import serializers

from apps.core.exceptions import GraphError, InputRangeError
from apps.graphs.models import Graph


class GraphSerializer(serializers.Serializer):
    """Graph JSON: {"vertices": int, "edges": [[i, j], ...], "loops": [i, ...]}"""

    vertices = serializers.IntegerField(min_value=0)
    edges = serializers.ListField(
        child=serializers.ListField(child=serializers.IntegerField(min_value=0), min_length=2, max_length=2),
        default=list,
    )
    loops = serializers.ListField(child=serializers.IntegerField(min_value=0), default=list)

    def validate(self, data):
        n = data["vertices"]
        seen = set()
        for u, v in data["edges"]:
            if u >= n or v >= n:
                raise serializers.ValidationError({"edges": f"Edge {[u, v]} has an endpoint >= {n}."})
            key = (min(u, v), max(u, v))
            if key in seen:
                raise serializers.ValidationError({"edges": f"Duplicate edge {[u, v]}."})
            seen.add(key)
        if any(v >= n for v in data["loops"]):
            raise serializers.ValidationError({"loops": f"Loop vertex out of range for {n} vertices."})
        return data

    # ------------------------------------------------------------------
    # Domain conversion
    # ------------------------------------------------------------------

    @staticmethod
    def to_graph(payload: dict, name: str = "") -> Graph:
        serializer = GraphSerializer(data=payload)
        if not serializer.is_valid():
            raise GraphError(f"Invalid graph JSON: {serializer.errors}")
        data = serializer.validated_data
        return Graph.from_edges(data["vertices"], data["edges"], data["loops"], name=name)

    @staticmethod
    def from_graph(graph: Graph) -> dict:
        return {
            "vertices": graph.num_vertices,
            "edges": [list(e) for e in graph.sorted_edges],
            "loops": sorted(graph.loops),
        }

    @staticmethod
    def parse_edge_list(text: str, name: str = "") -> Graph:
        """Plain-text edge list, one "i j" pair per line; "i i" declares a loop, "#" starts a comment."""
        pairs = []
        for number, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise InputRangeError(f"Edge list line {number}: expected two vertex indices.")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise InputRangeError(f"Edge list line {number}: {exc}") from exc
            if u < 0 or v < 0:
                raise InputRangeError(f"Edge list line {number}: negative vertex index.")
            pairs.append((u, v))
        n = 1 + max((max(p) for p in pairs), default=-1)
        return Graph.from_edges(n, pairs, name=name)
