import numpy as np
from rest_framework import serializers

from apps.core.exceptions import InputRangeError
from apps.core.serializers import edge_key
from apps.quantum.models import DensityMatrix, PureState, QuantumStrategy


def complex_pair() -> serializers.ListField:
    return serializers.ListField(child=serializers.FloatField(), min_length=2, max_length=2)


def _to_complex(nested) -> np.ndarray:
    """[..., [re, im]] -> complex array with the trailing pair axis folded."""
    array = np.asarray(nested, dtype=float)
    if array.shape[-1:] != (2,):
        raise InputRangeError("Complex entries must be [re, im] pairs.")
    return array[..., 0] + 1j * array[..., 1]


def _to_pairs(array: np.ndarray) -> list:
    array = np.asarray(array, dtype=complex)
    return np.stack([array.real, array.imag], axis=-1).tolist()


class StrategySerializer(serializers.Serializer):
    """
    Strategy JSON:
        {"dims": [d_0, ...],
         "state": [[[re, im], ...], ...]        # row-major density matrix
           or "vector": [[re, im], ...],        # pure state alternative
         "measurements": [player][question][answer] -> d x d matrix of [re, im]}
    """

    dims = serializers.ListField(child=serializers.IntegerField(min_value=1), min_length=1)
    state = serializers.ListField(required=False)
    vector = serializers.ListField(child=complex_pair(), required=False)
    measurements = serializers.ListField(child=serializers.ListField(child=serializers.ListField()))

    def validate(self, data):
        if ("state" in data) == ("vector" in data):
            raise serializers.ValidationError("Provide exactly one of 'state' or 'vector'.")
        if len(data["measurements"]) != len(data["dims"]):
            raise serializers.ValidationError({"measurements": "One measurement set per player is required."})
        return data

    # ------------------------------------------------------------------
    # Domain conversion
    # ------------------------------------------------------------------

    @staticmethod
    def to_strategy(payload: dict) -> QuantumStrategy:
        serializer = StrategySerializer(data=payload)
        if not serializer.is_valid():
            raise InputRangeError(f"Invalid strategy JSON: {serializer.errors}")
        data = serializer.validated_data
        try:
            if "vector" in data:
                state = PureState(data["dims"], _to_complex(data["vector"]))
            else:
                state = DensityMatrix(data["dims"], _to_complex(data["state"]))
            measurements = tuple(_to_complex(player) for player in data["measurements"])
        except (ValueError, TypeError) as exc:
            raise InputRangeError(f"Invalid strategy JSON: {exc}") from exc
        return QuantumStrategy(state=state, measurements=measurements)

    @staticmethod
    def from_strategy(strategy: QuantumStrategy) -> dict:
        state = strategy.state
        payload = {"dims": list(state.dims)}
        if isinstance(state, PureState):
            payload["vector"] = _to_pairs(state.vector)
        else:
            payload["state"] = _to_pairs(state.matrix)
        payload["measurements"] = [_to_pairs(m) for m in strategy.measurements]
        return payload


class StrategyValueSerializer(serializers.Serializer):
    game = serializers.CharField()
    strategy = serializers.CharField()
    players = serializers.IntegerField(min_value=2)
    value = serializers.FloatField()
    edge_values = serializers.DictField(child=serializers.FloatField())

    @staticmethod
    def from_values(game: str, strategy: str, players: int, values: dict[tuple[int, int], float]) -> dict:
        payload = {
            "game": game,
            "strategy": strategy,
            "players": players,
            "value": sum(values.values()) / len(values),
            "edge_values": {edge_key(e): v for e, v in values.items()},
        }
        return dict(StrategyValueSerializer(payload).data)
