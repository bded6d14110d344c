"""
Management command: bound_quantum

Certified NPA upper bound on the quantum value of a binary-answer game on a graph.

Usage:
    python manage.py bound_quantum --game chsh --graph P4 --level 2
    python manage.py bound_quantum --game oc3 --graph P3 --level auto
"""
from apps.classical.services import ClassicalSolver
from apps.core.utils import engine_setting
from apps.games.services import GameFactory, GameOperations
from apps.graphs.services import GraphFactory
from apps.monogamy.management.commands._base import MonogamyCommand
from apps.monogamy.services import levels_up_to
from apps.npa.serializers import BoundReportSerializer
from apps.npa.services import NpaBoundService


class Command(MonogamyCommand):
    help = "Print the certified NPA bound {bound, level, gap, status} as JSON."

    def add_arguments(self, parser):
        parser.add_argument("--game", required=True, help="Binary-answer game name or JSON file.")
        parser.add_argument("--graph", required=True, help="Graph name or file.")
        parser.add_argument(
            "--level",
            default=None,
            help="1, 2, 3, 1+edge-pairs, or 'auto' for the lowest level that reaches the classical value.",
        )
        parser.add_argument("--max-level", default=None, help="Highest level tried by --level auto.")
        parser.add_argument("--tol", type=float, default=None, help="Solver tolerance (default SDP_TOLERANCE).")
        parser.add_argument("--tolerance", type=float, default=None, help="Bound vs classical slack for 'auto'.")
        parser.add_argument("--solver", default=None, help="cvxpy solver name (default NPA_SOLVER).")
        parser.add_argument("--no-cache", action="store_true", help="Bypass the bound cache.")
        self.add_out_argument(parser)

    def run(self, **options):
        game = GameFactory.resolve(options["game"])
        graph = GraphFactory.resolve(options["graph"])
        graph_game = GameOperations.extend_over_graph(game, graph)

        if options["level"] == "auto":
            classical = ClassicalSolver.classical_value_on_graph(game, graph)
            solution = NpaBoundService.lowest_certifying_level(
                graph_game,
                float(classical),
                options["tolerance"],
                levels_up_to(engine_setting("NPA_DEFAULT_LEVEL", options["max_level"])),
                options["tol"],
                options["solver"],
            )
        else:
            solution = NpaBoundService.quantum_bound(
                graph_game,
                level=options["level"],
                tol=options["tol"],
                solver=options["solver"],
                use_cache=not options["no_cache"],
            )

        self.emit(BoundReportSerializer.from_solution(solution, game=graph_game.label()), options["out"])
