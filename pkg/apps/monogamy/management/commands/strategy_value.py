"""
Management command: strategy_value

Born-rule value of an explicit quantum strategy on a game played over a
graph, per edge and edge-averaged. Strategies come from the built-in set or
from strategy JSON, and can be exported back to strategy JSON.

Usage:
    python manage.py strategy_value --game chsh --strategy tsirelson
    python manage.py strategy_value --game chsh --graph P4 --strategy p4
    python manage.py strategy_value --game chsh --strategy ./tsirelson.json
    python manage.py strategy_value --game ms --strategy ms --export ms-strategy.json
"""
import json
from pathlib import Path

from apps.games.services import GameFactory, GameOperations
from apps.graphs.services import GraphFactory
from apps.monogamy.management.commands._base import MonogamyCommand
from apps.quantum.serializers import StrategySerializer, StrategyValueSerializer
from apps.quantum.services import StrategyBuilder, StrategyEvaluator


class Command(MonogamyCommand):
    help = "Evaluate an explicit quantum strategy (built-in name or strategy JSON) on a graph game."

    def add_arguments(self, parser):
        parser.add_argument("--game", required=True, help="Game name (chsh, ms, ...) or JSON file.")
        parser.add_argument("--graph", default="P2", help="Graph name or file (default P2).")
        parser.add_argument(
            "--strategy",
            required=True,
            help="Built-in strategy (tsirelson, ms, p4) or a strategy JSON file.",
        )
        parser.add_argument("--export", default=None, help="Also write the strategy as strategy JSON to this file.")
        self.add_out_argument(parser)

    def run(self, **options):
        game = GameFactory.resolve(options["game"])
        graph = GraphFactory.resolve(options["graph"])
        strategy = StrategyBuilder.resolve(options["strategy"])
        graph_game = GameOperations.extend_over_graph(game, graph)
        values = StrategyEvaluator.edge_values(graph_game, strategy)

        if options["export"]:
            text = json.dumps(StrategySerializer.from_strategy(strategy))
            Path(options["export"]).write_text(text + "\n", encoding="utf-8")
            self.stderr.write(self.style.SUCCESS(f"Strategy written to {options['export']}"))

        payload = StrategyValueSerializer.from_values(
            graph_game.label(), options["strategy"], graph_game.num_players, values
        )
        self.emit(payload, options["out"])
