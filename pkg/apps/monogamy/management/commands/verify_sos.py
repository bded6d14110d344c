"""
Management command: verify_sos

Exact verification of a sum-of-squares identity target = sum_i w_i s_i^2.

Usage:
    python manage.py verify_sos --identity p3
    python manage.py verify_sos --identity p4
    python manage.py verify_sos --identity file:/path/to/identity.json
"""
import json
from pathlib import Path

from apps.core.exceptions import InputRangeError, ParseError
from apps.monogamy.management.commands._base import MonogamyCommand
from apps.ncpoly.serializers import SosIdentitySerializer, SosReportSerializer
from apps.ncpoly.services import SosService

BUILT_IN = ("p3", "p4", "p4-main")


class Command(MonogamyCommand):
    help = "Verify a shipped or file-provided SOS identity and print the verdict as JSON."

    def add_arguments(self, parser):
        parser.add_argument(
            "--identity",
            required=True,
            help="p3, p4, p4-main, or a JSON file {'target': expr, 'squares': [expr, ...]} (optionally 'file:' prefixed).",
        )
        self.add_out_argument(parser)

    def load(self, spec: str) -> dict:
        if spec in BUILT_IN:
            return SosService.identity(spec)
        path = Path(spec.removeprefix("file:"))
        if not path.exists():
            raise ParseError(f"Unknown identity {spec!r}: not one of {', '.join(BUILT_IN)} and no such file.")
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(f"Invalid JSON in '{path}': {exc}") from exc
        return SosIdentitySerializer.to_identity(payload)

    def run(self, **options):
        identity = self.load(options["identity"])
        verdict = SosService.verify_sos(identity["target"], identity["squares"])

        bound = None
        if verdict.certified:
            try:
                bound = SosService.certified_bound_from_sos(identity["squares"], identity["bell"], identity["constant"])
            except InputRangeError:
                # identities that are not a positive multiple of a CHSH chain carry no game bound
                bound = None

        self.emit(SosReportSerializer.from_verdict(options["identity"], verdict, bound), options["out"])
