"""
Management command: polygamy_demo

The OR composition of the magic square game on P3: the middle player wins
with certainty against both neighbours at once.

Usage:
    python manage.py polygamy_demo
    python manage.py polygamy_demo --seed 7 --games 50 --out polygamy.json
    python manage.py polygamy_demo --games 10 --include-largest
"""
from apps.monogamy.management.commands._base import MonogamyCommand
from apps.monogamy.serializers import PolygamyReportSerializer
from apps.monogamy.services import PolygamyService


class Command(MonogamyCommand):
    help = "Evaluate the polygamous P3 strategy and the OR-composition classical bound."

    def add_arguments(self, parser):
        parser.add_argument("--seed", type=int, default=None, help="Seed for the random games (default RANDOM_SEED).")
        parser.add_argument("--games", type=int, default=50, help="Random games for the OR-bound check (default 50).")
        parser.add_argument(
            "--include-largest",
            action="store_true",
            help="Also draw 3x3 games, whose OR composition is solved by branch and bound.",
        )
        self.add_out_argument(parser)

    def run(self, **options):
        report = PolygamyService.demo(
            seed=options["seed"], num_games=options["games"], include_largest=options["include_largest"]
        )
        self.emit(PolygamyReportSerializer.from_report(report), options["out"])
