"""
Shared plumbing for the monogamy management commands.

stdout carries the command's JSON (or CSV); structlog events go to stderr.
Domain errors leave the process with the exit code their class declares.
"""
import json
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from apps.core.exceptions import MonogamyError


class MonogamyCommand(BaseCommand):
    def add_out_argument(self, parser, help_text: str = "Write the JSON report to this file instead of stdout."):
        parser.add_argument("--out", default=None, help=help_text)

    def handle(self, *args, **options):
        try:
            return self.run(**options)
        except MonogamyError as exc:
            raise CommandError(str(exc), returncode=exc.exit_code) from exc

    def run(self, **options):
        raise NotImplementedError

    def emit(self, payload: dict, out: str | None = None) -> None:
        text = json.dumps(payload, indent=2, sort_keys=False)
        if out:
            Path(out).write_text(text + "\n", encoding="utf-8")
            self.stderr.write(self.style.SUCCESS(f"Report written to {out}"))
        else:
            self.stdout.write(text)
