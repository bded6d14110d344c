"""
Management command: scan_region

NPA feasibility over a two-parameter slice of CHSH biases: sorted edges
alternate x, y, x, ... (AB = CD = EF = x and BC = DE = y on P6).

Usage:
    python manage.py scan_region --graph P6 --grid 0:3:0.1 --out slice.csv
    python manage.py scan_region --grid 2.3461538:2.3461538:1,1.5769231:1.5769231:1
"""
import csv
import json
import math

import numpy as np

from apps.core.exceptions import ParseError
from apps.graphs.services import GraphFactory
from apps.monogamy.management.commands._base import MonogamyCommand
from apps.npa.services import NpaBoundService

CSV_HEADER = ("x", "y", "npa_feasible", "inside_quadratic", "inside_linear")
FEASIBLE_COLUMN = {"feasible": "true", "infeasible": "false", "inconclusive": "inconclusive"}


def parse_axis(text: str) -> np.ndarray:
    """Axis values from 'start:stop:step' (stop included) or a single number."""
    parts = text.strip().split(":")
    try:
        values = [float(p) for p in parts]
    except ValueError as exc:
        raise ParseError(f"Bad grid axis {text!r}: {exc}") from exc
    if len(values) == 1:
        return np.array(values)
    if len(values) != 3:
        raise ParseError(f"Grid axis {text!r} must be 'start:stop:step' or a number.")
    start, stop, step = values
    if step <= 0 or stop < start:
        raise ParseError(f"Grid axis {text!r} needs step > 0 and stop >= start.")
    count = math.floor((stop - start) / step + 1e-9) + 1
    return np.round(start + step * np.arange(count), 12)


def parse_grid(text: str) -> tuple[np.ndarray, np.ndarray]:
    """One axis spec for both coordinates, or "x-axis,y-axis"."""
    axes = text.split(",")
    if len(axes) == 1:
        axis = parse_axis(axes[0])
        return axis, axis
    if len(axes) == 2:
        return parse_axis(axes[0]), parse_axis(axes[1])
    raise ParseError(f"Grid {text!r} must hold one or two axis specs.")


def format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, str):
        return FEASIBLE_COLUMN.get(value, value)
    return f"{value:.9g}"


class Command(MonogamyCommand):
    help = "Scan a bias slice for NPA feasibility and write CSV rows."

    def add_arguments(self, parser):
        parser.add_argument("--graph", default="P6", help="Graph name or file (default P6).")
        parser.add_argument("--grid", default="0:3:0.1", help="'start:stop:step' or 'x-axis,y-axis' (default 0:3:0.1).")
        parser.add_argument("--level", default=None, help="NPA level (default NPA_DEFAULT_LEVEL).")
        parser.add_argument("--workers", type=int, default=None, help="Worker processes (default SCAN_WORKERS).")
        parser.add_argument("--tol", type=float, default=None, help="Solver tolerance (default SDP_TOLERANCE).")
        parser.add_argument(
            "--feas-tol",
            type=float,
            default=None,
            help="Feasibility tolerance (default FEASIBILITY_TOLERANCE).",
        )
        parser.add_argument("--solver", default=None, help="cvxpy solver name (default NPA_SOLVER).")
        parser.add_argument("--out", default=None, help="CSV path; rows go to stdout when omitted.")

    def run(self, **options):
        graph = GraphFactory.resolve(options["graph"])
        xs, ys = parse_grid(options["grid"])

        rows = NpaBoundService.scan_region(
            graph,
            xs,
            ys,
            level=options["level"],
            workers=options["workers"],
            tol=options["tol"],
            feas_tol=options["feas_tol"],
            solver=options["solver"],
        )

        # ------------------------------------------------------------------
        # CSV rows
        # ------------------------------------------------------------------
        if options["out"]:
            with open(options["out"], "w", newline="", encoding="utf-8") as handle:
                self.write_rows(handle, rows)
        else:
            self.write_rows(self.stdout, rows)

        # ------------------------------------------------------------------
        # Summary (stderr when CSV is on stdout)
        # ------------------------------------------------------------------
        counts = {verdict: sum(r["npa_feasible"] == verdict for r in rows) for verdict in FEASIBLE_COLUMN}
        chain = NpaBoundService.quadratic_chain_bound([2.0] * graph.num_edges)
        summary = {
            "graph": graph.label(),
            "points": len(rows),
            **counts,
            "linear_bound": 2 * graph.num_edges,
            "quadratic_chain_bound": chain["bound"],
        }
        target = self.stdout if options["out"] else self.stderr
        target.write(json.dumps(summary))

    @staticmethod
    def write_rows(handle, rows: list[dict]) -> None:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow([format_cell(row[column]) for column in CSV_HEADER])
