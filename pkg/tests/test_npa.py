"""
tests/test_npa.py
~~~~~~~~~~~~~~~~~
Moment problems, certified SDP bounds, bias feasibility and region scans.
"""
from __future__ import annotations

import itertools
from math import sqrt

import numpy as np
import pytest

from apps.core.exceptions import CapacityError, InputRangeError, ParseError
from apps.games.services import GameFactory, GameOperations
from apps.graphs.models import Graph
from apps.graphs.services import GraphFactory
from apps.ncpoly.models import canonical_word
from apps.npa.models import Scenario, SdpSolution, real_moment_key
from apps.npa.serializers import BoundReportSerializer, FeasibilityReportSerializer
from apps.npa.services import MomentProblemBuilder, NpaBoundService, SdpService
from apps.quantum.services import StrategyBuilder

TSIRELSON_VALUE = 0.5 + 1 / (2 * sqrt(2))
P4_VALUE = 0.5 + sqrt(10) / 12
INFEASIBLE_POINT = (61 / 26, 41 / 26)


def chsh_on(name: str):
    return GameOperations.extend_over_graph(GameFactory.make_chsh(), GraphFactory.named_graph(name))


# ===========================================================================
# Scenarios and monomials
# ===========================================================================

class TestScenario:

    def test_edge_pair_level(self):
        scenario = Scenario(3, 2, "1 + edge-pairs", ((0, 1), (1, 2)))
        assert scenario.level == "1+edge-pairs"
        assert (scenario.depth, scenario.edge_pairs) == (1, True)

    @pytest.mark.parametrize("level", ["0", "two", "1+pairs", "-1"])
    def test_bad_levels(self, level):
        with pytest.raises(ParseError):
            Scenario(2, 2, level)

    def test_real_moment_key_merges_reversal(self):
        word = ((0, 0), (0, 1), (1, 0))
        assert real_moment_key(word) == real_moment_key(((1, 0), (0, 1), (0, 0)))


class TestMomentProblem:

    def test_p2_level_one_size(self):
        problem = MomentProblemBuilder.build_moment_problem(chsh_on("P2"), "1")
        assert problem.size == 5

    def test_p3_edge_pair_size(self):
        problem = MomentProblemBuilder.build_moment_problem(chsh_on("P3"), "1+edge-pairs")
        assert problem.size == 1 + 6 + 8

    def test_p6_level_two_size_matches_enumeration(self):
        letters = [(p, s) for p in range(6) for s in range(2)]
        words = {canonical_word(w) for length in range(3) for w in itertools.product(letters, repeat=length)}
        problem = MomentProblemBuilder.build_moment_problem(chsh_on("P6"), "2")
        assert problem.size == len(words)

    def test_size_cap(self):
        with pytest.raises(CapacityError):
            MomentProblemBuilder.build_moment_problem(chsh_on("P6"), "3", max_size=50)

    def test_size_cap_from_settings(self, engine_settings):
        engine_settings(NPA_MAX_MATRIX=10)
        with pytest.raises(CapacityError):
            MomentProblemBuilder.build_moment_problem(chsh_on("P3"), "2")

    def test_non_binary_game_rejected(self, p2):
        graph_game = GameOperations.extend_over_graph(GameFactory.make_magic_square(), p2)
        with pytest.raises(InputRangeError, match="binary answers"):
            MomentProblemBuilder.build_moment_problem(graph_game, "1")

    def test_strategy_moments_are_feasible(self):
        """An explicit strategy gives a PSD moment matrix obeying every class equality."""
        problem = MomentProblemBuilder.build_moment_problem(chsh_on("P4"), "2")
        gamma = MomentProblemBuilder.moment_matrix_of_strategy(problem, StrategyBuilder.build_p4_strategy())
        assert np.linalg.eigvalsh(gamma)[0] >= -1e-9
        assert MomentProblemBuilder.class_residual(problem, gamma) <= 1e-9
        value = problem.objective @ gamma[problem.rep_rows, problem.rep_cols] + problem.constant
        assert value == pytest.approx(P4_VALUE, abs=1e-9)

    def test_mixed_state_moments_match_pure(self):
        problem = MomentProblemBuilder.build_moment_problem(chsh_on("P2"), "1+edge-pairs")
        pure = StrategyBuilder.tsirelson_strategy()
        mixed = type(pure)(state=pure.state.density(), measurements=pure.measurements)
        assert np.allclose(
            MomentProblemBuilder.moment_matrix_of_strategy(problem, pure),
            MomentProblemBuilder.moment_matrix_of_strategy(problem, mixed),
        )


# ===========================================================================
# Certified bounds
# ===========================================================================

class TestBounds:

    def test_tsirelson_bound(self):
        solution = NpaBoundService.quantum_bound(chsh_on("P2"), level="1")
        assert solution.dual == pytest.approx(TSIRELSON_VALUE, abs=1e-5)
        assert solution.size == 5

    def test_p3_matches_classical(self):
        solution = NpaBoundService.quantum_bound(chsh_on("P3"), level="1+edge-pairs")
        assert solution.dual == pytest.approx(0.75, abs=1e-4)

    @pytest.mark.parametrize("level", ["1+edge-pairs", "2"])
    def test_p4_bound(self, level):
        assert NpaBoundService.quantum_upper_bound(chsh_on("P4"), level=level) == pytest.approx(P4_VALUE, abs=1e-4)

    def test_dual_dominates_primal(self):
        solution = NpaBoundService.quantum_bound(chsh_on("P4"), level="2")
        assert solution.dual >= solution.primal - 1e-6
        assert solution.status in SdpSolution.STATUSES

    def test_levels_are_monotone(self):
        coarse = NpaBoundService.quantum_upper_bound(chsh_on("P4"), level="1")
        fine = NpaBoundService.quantum_upper_bound(chsh_on("P4"), level="2")
        assert fine <= coarse + 1e-6

    def test_odd_cycle_on_p3(self, odd_cycle3, p3):
        graph_game = GameOperations.extend_over_graph(odd_cycle3, p3)
        assert NpaBoundService.quantum_upper_bound(graph_game, level="2") <= 5 / 6 + 1e-3

    @pytest.mark.slow
    @pytest.mark.parametrize("name", ["P6", "star-1,2,2"])
    def test_no_advantage_on_t3(self, name):
        assert NpaBoundService.quantum_upper_bound(chsh_on(name), level="2") <= 0.75 + 1e-3

    def test_tolerance_floor(self):
        problem = MomentProblemBuilder.build_moment_problem(chsh_on("P2"), "1")
        with pytest.raises(InputRangeError):
            SdpService.solve_sdp(problem, tol=1e-12)

    def test_lowest_certifying_level(self):
        solution = NpaBoundService.lowest_certifying_level(chsh_on("P3"), 0.75, tolerance=1e-3)
        assert solution.level in ("1", "1+edge-pairs")
        assert solution.dual <= 0.75 + 1e-3

    def test_bound_report_shape(self):
        report = BoundReportSerializer.from_solution(NpaBoundService.quantum_bound(chsh_on("P2"), level="1"))
        assert {"bound", "level", "gap", "status"} <= set(report)
        assert report["level"] == "1"


class TestBoundCache:

    def test_second_call_is_served_from_cache(self, monkeypatch):
        calls = []
        original = SdpService.solve_sdp

        def counting(problem, tol=None, solver=None):
            calls.append(problem.size)
            return original(problem, tol, solver)

        monkeypatch.setattr(SdpService, "solve_sdp", staticmethod(counting))
        first = NpaBoundService.quantum_bound(chsh_on("P2"), level="1")
        second = NpaBoundService.quantum_bound(chsh_on("P2"), level="1")
        assert len(calls) == 1
        assert second == first

        NpaBoundService.quantum_bound(chsh_on("P2"), level="1", use_cache=False)
        assert len(calls) == 2

    def test_relabelled_trees_share_a_key(self):
        chsh = GameFactory.make_chsh()
        relabelled = Graph.from_edges(4, [(0, 2), (2, 3), (3, 1)])
        key = NpaBoundService._cache_key(GameOperations.extend_over_graph(chsh, relabelled), "2", 1e-8, "CLARABEL")
        assert key == NpaBoundService._cache_key(chsh_on("P4"), "2", 1e-8, "CLARABEL")


# ===========================================================================
# Bias relations and feasibility
# ===========================================================================

class TestBiasRelations:

    def test_bias_sum_on_p3(self, p3):
        assert NpaBoundService.bias_sum_bound(p3, level="1+edge-pairs").dual == pytest.approx(4, abs=1e-4)

    def test_quadratic_chain_bound(self):
        assert NpaBoundService.quadratic_chain_bound([1.0])["bound"] == pytest.approx(sqrt(8))
        pair = NpaBoundService.quadratic_chain_bound([2.0, 2.0])
        assert pair["pairs_ok"] and pair["within"]
        assert pair["bound"] == pytest.approx(4)
        assert not NpaBoundService.quadratic_chain_bound([2.8, 1.0])["pairs_ok"]

    def test_quadratic_chain_needs_an_edge(self):
        with pytest.raises(InputRangeError):
            NpaBoundService.quadratic_chain_bound([])

    def test_slice_alternates(self, p6):
        assert NpaBoundService.slice_targets(p6, 1.0, 2.0) == [1.0, 2.0, 1.0, 2.0, 1.0]

    def test_point_outside_the_linear_relation_is_infeasible(self, p6):
        targets = NpaBoundService.slice_targets(p6, *INFEASIBLE_POINT)
        result = NpaBoundService.bias_point_feasible(p6, targets)
        assert result.verdict == "infeasible"
        assert result.t_certified < 0

    def test_zero_biases_are_feasible(self, p6):
        assert NpaBoundService.bias_point_feasible(p6, [0.0] * 5).verdict == "feasible"

    def test_tsirelson_edge_is_never_refuted(self, p6):
        targets = {edge: 0.0 for edge in p6.sorted_edges}
        targets[(0, 1)] = 2 * sqrt(2)
        assert NpaBoundService.bias_point_feasible(p6, targets).verdict != "infeasible"

    def test_target_count_checked(self, p6):
        with pytest.raises(InputRangeError, match="5 edges"):
            NpaBoundService.bias_point_feasible(p6, [0.0, 0.0])

    def test_feasibility_report(self, p3):
        result = NpaBoundService.bias_point_feasible(p3, [0.0, 0.0], level="1+edge-pairs")
        report = FeasibilityReportSerializer.from_result(result)
        assert report["verdict"] == "feasible"
        assert report["level"] == "1+edge-pairs"


# ===========================================================================
# Region scans
# ===========================================================================

class TestScanRegion:

    def test_reference_points(self, p6):
        xs, ys = [0.0, INFEASIBLE_POINT[0]], [0.0, INFEASIBLE_POINT[1]]
        rows = {(row["x"], row["y"]): row for row in NpaBoundService.scan_region(p6, xs, ys)}
        assert len(rows) == 4

        origin = rows[(0.0, 0.0)]
        assert origin["npa_feasible"] == "feasible"
        assert origin["inside_quadratic"] and origin["inside_linear"]

        outside = rows[INFEASIBLE_POINT]
        assert outside["npa_feasible"] == "infeasible"
        assert outside["inside_quadratic"] is True
        assert outside["inside_linear"] is False

    def test_point_cap(self, p6):
        with pytest.raises(CapacityError):
            NpaBoundService.scan_region(p6, [0.0, 1.0], [0.0, 1.0], max_points=3)

    @pytest.mark.slow
    def test_inner_grid_is_feasible(self, p6):
        """Points well inside both relations are never refuted."""
        axis = np.round(np.arange(0.0, 2.01, 0.5), 12)
        for row in NpaBoundService.scan_region(p6, axis, axis, workers=2):
            x, y = row["x"], row["y"]
            if 3 * x + 2 * y <= 10 - 0.05 and x * x + y * y <= 8 - 0.05:
                assert row["npa_feasible"] != "infeasible", (x, y)
