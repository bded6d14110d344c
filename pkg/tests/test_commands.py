"""
tests/test_commands.py
~~~~~~~~~~~~~~~~~~~~~~
Management commands end to end: JSON/CSV on stdout, exit codes on errors.
"""
from __future__ import annotations

import io
import json

import numpy as np
import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from apps.core.exceptions import ParseError
from apps.monogamy.management.commands.scan_region import CSV_HEADER, format_cell, parse_axis, parse_grid


def run_json(name: str, *args) -> dict:
    out = io.StringIO()
    call_command(name, *args, stdout=out, stderr=io.StringIO())
    return json.loads(out.getvalue())


def exit_code_of(name: str, *args) -> int:
    with pytest.raises(CommandError) as excinfo:
        call_command(name, *args, stdout=io.StringIO(), stderr=io.StringIO())
    return excinfo.value.returncode


# ===========================================================================
# value_classical
# ===========================================================================

class TestValueClassical:

    def test_game_only(self):
        assert run_json("value_classical", "--game", "chsh") == {"game": "chsh", "omega_classical": "3/4"}

    def test_odd_cycle(self):
        assert run_json("value_classical", "--game", "oc3")["omega_classical"] == "5/6"

    def test_on_graph(self):
        payload = run_json("value_classical", "--game", "oc3", "--graph", "C3")
        assert payload["omega_graph"] == "5/6"
        assert payload["hom_exists"] is True
        assert payload["lemma1_consistent"] is True

    def test_out_file(self, tmp_path):
        target = tmp_path / "chsh.json"
        call_command(
            "value_classical", "--game", "chsh", "--out", str(target), stdout=io.StringIO(), stderr=io.StringIO()
        )
        assert json.loads(target.read_text())["omega_classical"] == "3/4"

    def test_game_file(self, tmp_path):
        path = tmp_path / "anti.json"
        path.write_text(json.dumps({"questions": 1, "answers": 2, "winning": [[0, 0, 0, 1], [0, 0, 1, 0]]}))
        assert run_json("value_classical", "--game", str(path))["omega_classical"] == "1"

    def test_unknown_game_exits_with_input_error(self):
        assert exit_code_of("value_classical", "--game", "tic-tac-toe") == 2

    def test_cap_exits_with_capacity_error(self):
        assert exit_code_of("value_classical", "--game", "chsh", "--cap", "10") == 3

    def test_magic_square_on_an_edge(self):
        payload = run_json("value_classical", "--game", "ms", "--graph", "P2")
        assert payload["omega_classical"] == payload["omega_graph"] == "17/18"
        assert payload["hom_exists"] is True
        assert payload["lemma1_consistent"] is True


# ===========================================================================
# strategy_value
# ===========================================================================

class TestStrategyValue:

    def test_tsirelson_on_an_edge(self):
        payload = run_json("strategy_value", "--game", "chsh", "--strategy", "tsirelson")
        assert payload["game"] == "chsh^P2"
        assert payload["players"] == 2
        assert payload["value"] == pytest.approx(0.8535534, abs=1e-6)
        assert set(payload["edge_values"]) == {"0-1"}

    def test_p4_chain(self):
        payload = run_json("strategy_value", "--game", "chsh", "--graph", "P4", "--strategy", "p4")
        assert payload["value"] == pytest.approx(0.5 + np.sqrt(10) / 12, abs=1e-9)
        assert payload["edge_values"]["0-1"] == pytest.approx(payload["edge_values"]["2-3"], abs=1e-9)

    def test_magic_square_strategy_is_perfect(self):
        payload = run_json("strategy_value", "--game", "ms", "--strategy", "ms")
        assert payload["value"] == pytest.approx(1, abs=1e-9)

    def test_exported_strategy_reads_back(self, tmp_path):
        target = tmp_path / "tsirelson.json"
        exported = run_json("strategy_value", "--game", "chsh", "--strategy", "tsirelson", "--export", str(target))
        stored = json.loads(target.read_text())
        assert set(stored) >= {"dims", "measurements"}
        reread = run_json("strategy_value", "--game", "chsh", "--strategy", f"file:{target}")
        assert reread["value"] == pytest.approx(exported["value"], abs=1e-12)
        assert reread["strategy"] == f"file:{target}"

    def test_unknown_strategy_exits_with_input_error(self):
        assert exit_code_of("strategy_value", "--game", "chsh", "--strategy", "no-such-strategy") == 2

    def test_malformed_strategy_file(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert exit_code_of("strategy_value", "--game", "chsh", "--strategy", str(path)) == 2

    def test_player_count_mismatch(self):
        assert exit_code_of("strategy_value", "--game", "chsh", "--graph", "P2", "--strategy", "p4") == 2

    def test_game_shape_mismatch(self):
        assert exit_code_of("strategy_value", "--game", "oc3", "--strategy", "tsirelson") == 2


# ===========================================================================
# bound_quantum
# ===========================================================================

class TestBoundQuantum:

    def test_tsirelson(self):
        payload = run_json("bound_quantum", "--game", "chsh", "--graph", "P2", "--level", "1")
        assert payload["bound"] == pytest.approx(0.8535534, abs=1e-5)
        assert payload["level"] == "1"
        assert payload["game"] == "chsh^P2"

    def test_auto_level(self):
        payload = run_json("bound_quantum", "--game", "chsh", "--graph", "P3", "--level", "auto")
        assert payload["bound"] <= 0.75 + 1e-3

    def test_non_binary_game(self):
        assert exit_code_of("bound_quantum", "--game", "always-win-2x3", "--graph", "P2", "--level", "1") == 2

    def test_bad_level(self):
        assert exit_code_of("bound_quantum", "--game", "chsh", "--graph", "P2", "--level", "half") == 2

    def test_level_over_the_cap(self):
        assert exit_code_of("bound_quantum", "--game", "chsh", "--graph", "P6", "--level", "6") == 3


# ===========================================================================
# verify_sos
# ===========================================================================

class TestVerifySos:

    def test_p3(self):
        payload = run_json("verify_sos", "--identity", "p3")
        assert payload["verdict"] == "exact"
        assert payload["certified_bound_float"] == pytest.approx(0.75)

    def test_p4(self):
        payload = run_json("verify_sos", "--identity", "p4")
        assert payload["verdict"] == "weighted"
        assert payload["certified"] is True
        assert payload["certified_bound_float"] == pytest.approx(0.5 + np.sqrt(10) / 12)

    def test_empty_identity_file(self, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text(json.dumps({"target": "0", "squares": []}))
        payload = run_json("verify_sos", "--identity", f"file:{path}")
        assert payload["verdict"] == "exact"
        assert payload["certified_bound"] is None

    def test_mismatch_file(self, tmp_path):
        path = tmp_path / "wrong.json"
        path.write_text(json.dumps({"target": "2 - A0*B0", "squares": ["A0"]}))
        payload = run_json("verify_sos", "--identity", str(path))
        assert payload["verdict"] == "mismatch"
        assert payload["certified"] is False

    def test_unknown_identity(self):
        assert exit_code_of("verify_sos", "--identity", "p7") == 2

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert exit_code_of("verify_sos", "--identity", str(path)) == 2


# ===========================================================================
# monogamy_report / polygamy_demo
# ===========================================================================

class TestReports:

    def test_monogamy_report(self):
        payload = run_json("monogamy_report", "--game", "always-win", "--max-k", "2")
        assert payload["classification"] == "monogamous"
        assert payload["omega_classical"] == "1"

    def test_max_k_out_of_range(self):
        assert exit_code_of("monogamy_report", "--game", "chsh", "--max-k", "9") == 2

    @pytest.mark.slow
    def test_polygamy_demo(self):
        payload = run_json("polygamy_demo", "--games", "2")
        assert payload["flagged"] is True
        assert payload["omega_base"] == "17/18"
        assert payload["or_bound_holds"] is True
        assert payload["edge_values"]["0-1"] == pytest.approx(1, abs=1e-9)


# ===========================================================================
# scan_region
# ===========================================================================

class TestScanRegion:

    def test_single_point_csv(self):
        out, err = io.StringIO(), io.StringIO()
        call_command("scan_region", "--graph", "P6", "--grid", "2.3461538,1.5769231", stdout=out, stderr=err)
        lines = out.getvalue().splitlines()
        assert lines[0] == ",".join(CSV_HEADER)
        assert lines[1] == "2.3461538,1.5769231,false,true,false"

        summary = json.loads(err.getvalue())
        assert summary["points"] == 1
        assert summary["infeasible"] == 1
        assert summary["linear_bound"] == 10

    def test_csv_file(self, tmp_path):
        target = tmp_path / "slice.csv"
        out = io.StringIO()
        call_command(
            "scan_region", "--graph", "P3", "--grid", "0", "--level", "1+edge-pairs", "--out", str(target), stdout=out
        )
        assert target.read_text().splitlines()[1] == "0,0,true,true,true"
        assert json.loads(out.getvalue())["feasible"] == 1

    def test_bad_grid(self):
        assert exit_code_of("scan_region", "--grid", "1:0:0.5") == 2

    def test_too_many_points(self, engine_settings):
        engine_settings(SCAN_MAX_POINTS=4)
        assert exit_code_of("scan_region", "--grid", "0:1:0.5") == 3


class TestGridParsing:

    def test_range_includes_stop(self):
        assert np.allclose(parse_axis("0:1:0.25"), [0, 0.25, 0.5, 0.75, 1])

    def test_decimal_steps_do_not_drift(self):
        assert parse_axis("0:3:0.1")[-1] == 3.0
        assert len(parse_axis("0:3:0.1")) == 31

    def test_single_value(self):
        assert parse_axis("0.5").tolist() == [0.5]

    def test_two_axes(self):
        xs, ys = parse_grid("0:1:0.5,2")
        assert xs.tolist() == [0, 0.5, 1]
        assert ys.tolist() == [2]

    @pytest.mark.parametrize("text", ["a:b:c", "0:1", "0:1:0", "0,1,2"])
    def test_malformed(self, text):
        with pytest.raises(ParseError):
            parse_grid(text)

    def test_cells(self):
        assert format_cell(np.bool_(True)) == "true"
        assert format_cell(False) == "false"
        assert format_cell("feasible") == "true"
        assert format_cell("inconclusive") == "inconclusive"
        assert format_cell(1 / 3) == "0.333333333"
