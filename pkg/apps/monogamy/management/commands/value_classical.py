"""
Management command: value_classical

Exact classical value of a game, or of the game played on a graph.

Usage:
    python manage.py value_classical --game chsh
    python manage.py value_classical --game oc3 --graph P4
    python manage.py value_classical --game /path/to/game.json --graph file:/path/to/graph.txt
"""
from apps.classical.serializers import ClassicalValueSerializer, HomomorphismCriterionReportSerializer
from apps.classical.services import ClassicalSolver
from apps.games.services import GameFactory
from apps.graphs.services import GraphFactory
from apps.monogamy.management.commands._base import MonogamyCommand


class Command(MonogamyCommand):
    help = "Print the exact classical value of a game (and of the game on a graph) as JSON."

    def add_arguments(self, parser):
        parser.add_argument("--game", required=True, help="Game name (chsh, oc<n>, ms, anti, ...) or JSON file.")
        parser.add_argument("--graph", default=None, help="Graph name (P4, C5, star-1,2,2, T3:0) or file.")
        parser.add_argument(
            "--cap",
            type=int,
            default=None,
            help="Predicate-evaluation cap (default CLASSICAL_SEARCH_CAP).",
        )
        self.add_out_argument(parser)

    def run(self, **options):
        game = GameFactory.resolve(options["game"])
        cap = options["cap"]

        if options["graph"] is None:
            payload = {"game": game.label}
            payload.update(ClassicalValueSerializer({"omega_classical": ClassicalSolver.classical_value(game, cap)}).data)
        else:
            graph = GraphFactory.resolve(options["graph"])
            report = ClassicalSolver.verify_homomorphism_criterion(game, graph, cap)
            payload = {"game": game.label, "graph": graph.label()}
            payload.update(HomomorphismCriterionReportSerializer.from_report(report))

        self.emit(payload, options["out"])
