"""
Management command: monogamy_report

Classical values, NPA bounds on P2, P3 and every T_k member up to --max-k,
homomorphism facts and the resulting classification.

Usage:
    python manage.py monogamy_report --game chsh --max-k 3
    python manage.py monogamy_report --game oc3 --max-k 2 --out oc3.json
"""
from apps.games.services import GameFactory
from apps.monogamy.management.commands._base import MonogamyCommand
from apps.monogamy.serializers import MonogamyReportSerializer
from apps.monogamy.services import MonogamyService


class Command(MonogamyCommand):
    help = "Classify a game as monogamous, advantage-on: [...], or inconclusive."

    def add_arguments(self, parser):
        parser.add_argument("--game", required=True, help="Game name or JSON file.")
        parser.add_argument("--max-k", type=int, default=2, help="Examine T_2 .. T_max_k (default 2).")
        parser.add_argument("--max-level", default=None, help="Highest NPA level tried (default NPA_DEFAULT_LEVEL).")
        parser.add_argument(
            "--tolerance",
            type=float,
            default=None,
            help="Bound vs classical slack (default ADVANTAGE_TOLERANCE).",
        )
        parser.add_argument("--tol", type=float, default=None, help="Solver tolerance (default SDP_TOLERANCE).")
        self.add_out_argument(parser)

    def run(self, **options):
        game = GameFactory.resolve(options["game"])
        report = MonogamyService.build_report(
            game,
            max_k=options["max_k"],
            max_level=options["max_level"],
            tolerance=options["tolerance"],
            tol=options["tol"],
        )
        self.emit(MonogamyReportSerializer.from_report(report), options["out"])
