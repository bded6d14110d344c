import numpy as np
from rest_framework import serializers

from apps.core.exceptions import InputRangeError
from apps.core.utils import format_fraction, parse_fraction
from apps.games.models import Game


class GameSerializer(serializers.Serializer):
    """
    Game JSON:
        {"label": str, "questions": int, "answers": int,
         "winning": [[x1, x2, a1, a2], ...],
         "question_weights": [[x1, x2, "p/q"], ...],   # optional, uniform if absent
         "relabelings": [[[g(x, a) for a] for x], ...]}  # optional answer symmetries
    """

    label = serializers.CharField(max_length=200, default="game")
    questions = serializers.IntegerField(min_value=1)
    answers = serializers.IntegerField(min_value=1)
    winning = serializers.ListField(
        child=serializers.ListField(child=serializers.IntegerField(min_value=0), min_length=4, max_length=4),
        allow_empty=True,
    )
    question_weights = serializers.ListField(
        child=serializers.ListField(min_length=3, max_length=3),
        required=False,
        allow_null=True,
    )
    relabelings = serializers.ListField(
        child=serializers.ListField(child=serializers.ListField(child=serializers.IntegerField(min_value=0))),
        required=False,
        allow_null=True,
    )

    def validate_question_weights(self, value):
        if value is None:
            return value
        parsed = []
        for x1, x2, w in value:
            try:
                parsed.append((int(x1), int(x2), parse_fraction(w)))
            except (TypeError, ValueError, InputRangeError) as exc:
                raise serializers.ValidationError(f"Bad weight entry {[x1, x2, w]}: {exc}")
        if any(w < 0 for _, _, w in parsed):
            raise serializers.ValidationError("Question weights must be non-negative.")
        return parsed

    def validate(self, data):
        n_q, n_a = data["questions"], data["answers"]
        for x1, x2, a1, a2 in data["winning"]:
            if x1 >= n_q or x2 >= n_q or a1 >= n_a or a2 >= n_a:
                raise serializers.ValidationError(
                    {"winning": f"Entry {[x1, x2, a1, a2]} is out of range for {n_q} questions, {n_a} answers."}
                )
        for x1, x2, _ in data.get("question_weights") or []:
            if not (0 <= x1 < n_q and 0 <= x2 < n_q):
                raise serializers.ValidationError({"question_weights": f"Pair ({x1}, {x2}) is out of range."})
        return data

    # ------------------------------------------------------------------
    # Domain conversion
    # ------------------------------------------------------------------

    @staticmethod
    def to_game(payload: dict) -> Game:
        serializer = GameSerializer(data=payload)
        if not serializer.is_valid():
            raise InputRangeError(f"Invalid game JSON: {serializer.errors}")
        data = serializer.validated_data
        n_q, n_a = data["questions"], data["answers"]
        predicate = np.zeros((n_q, n_q, n_a, n_a), dtype=bool)
        for x1, x2, a1, a2 in data["winning"]:
            predicate[x1, x2, a1, a2] = True

        weights = data.get("question_weights")
        relabelings = data.get("relabelings") or ()
        if not weights:
            return Game.uniform(data["label"], predicate, relabelings)
        return Game.with_fraction_weights(
            data["label"], predicate, {(x1, x2): w for x1, x2, w in weights}, relabelings
        )

    @staticmethod
    def from_game(game: Game) -> dict:
        payload = {
            "label": game.label,
            "questions": game.num_questions,
            "answers": game.num_answers,
            "winning": [list(map(int, idx)) for idx in np.argwhere(game.predicate)],
        }
        if not game.is_uniform:
            payload["question_weights"] = [
                [x1, x2, format_fraction(w)] for (x1, x2), w in sorted(game.fraction_weights().items())
            ]
        if game.relabelings:
            payload["relabelings"] = [g.tolist() for g in game.relabelings]
        return payload
