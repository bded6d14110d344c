"""
tests/test_classical.py
~~~~~~~~~~~~~~~~~~~~~~~
Exact classical values, strategy graphs and the homomorphism criterion.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

import pytest

from apps.classical.services import ClassicalSolver
from apps.core.exceptions import CapacityError
from apps.games.models import Game
from apps.games.services import GameFactory, GameOperations, deterministic_functions
from apps.graphs.services import GraphFactory
from tests.factories import PathGraphFactory, SymmetricGameFactory


# ===========================================================================
# Two-player values
# ===========================================================================

class TestClassicalValue:

    @pytest.mark.parametrize("name, expected", [
        ("chsh", Fraction(3, 4)),
        ("oc3", Fraction(5, 6)),
        ("oc7", Fraction(13, 14)),
        ("anti", Fraction(1)),
        ("always-lose", Fraction(0)),
        ("always-win-3x3", Fraction(1)),
    ])
    def test_named_values(self, name, expected):
        assert ClassicalSolver.classical_value(GameFactory.named_game(name)) == expected

    @pytest.mark.parametrize("n", [3, 5, 9])
    def test_odd_cycle_formula(self, n):
        assert ClassicalSolver.classical_value(GameFactory.make_odd_cycle(n)) == 1 - Fraction(1, 2 * n)

    def test_cap_is_enforced(self, chsh):
        with pytest.raises(CapacityError):
            ClassicalSolver.classical_value(chsh, cap=10)

    def test_cap_from_settings(self, chsh, engine_settings):
        engine_settings(CLASSICAL_SEARCH_CAP=10)
        with pytest.raises(CapacityError):
            ClassicalSolver.classical_value(chsh)

    def test_magic_square_brute_force(self):
        assert ClassicalSolver.classical_value(GameFactory.make_magic_square()) == Fraction(17, 18)

    def test_relabeling_orbits_keep_value(self, chsh):
        # flipping every answer of both players leaves a1 xor a2 unchanged
        flipped = Game.uniform("chsh-flip", chsh.predicate, [[[1, 0], [1, 0]]])
        functions = deterministic_functions(2, 2)
        assert ClassicalSolver.orbit_representatives(flipped, functions).tolist() == [0, 1]
        assert ClassicalSolver.classical_value(flipped) == Fraction(3, 4)

    def test_magic_square_orbit_count(self):
        ms = GameFactory.make_magic_square()
        representatives = ClassicalSolver.orbit_representatives(ms, deterministic_functions(6, 8))
        assert len(representatives) == 8 ** 6 // 16

    @pytest.mark.slow
    def test_pruned_search_matches_full_search(self):
        ms = GameFactory.make_magic_square()
        bare = Game.uniform("ms-bare", ms.predicate)
        assert ClassicalSolver.classical_value(bare) == ClassicalSolver.classical_value(ms)


class TestBranchAndBound:

    @pytest.mark.parametrize("num_questions, num_answers, seed", [
        (2, 2, 0), (2, 3, 1), (3, 2, 2), (3, 3, 3), (3, 3, 4), (4, 2, 5),
    ])
    def test_matches_exhaustive_search(self, num_questions, num_answers, seed):
        game = SymmetricGameFactory(num_questions=num_questions, num_answers=num_answers, seed=seed)
        assert ClassicalSolver.branch_and_bound_value(game) == ClassicalSolver.classical_value(game)

    @pytest.mark.parametrize("name", ["chsh", "oc3", "oc5", "anti", "always-lose", "always-win-3x3"])
    def test_named_games(self, name):
        game = GameFactory.named_game(name)
        assert ClassicalSolver.branch_and_bound_value(game) == ClassicalSolver.classical_value(game)

    def test_or_composed_chsh(self, chsh):
        or_game = GameOperations.or_compose(chsh)
        assert ClassicalSolver.branch_and_bound_value(or_game) == ClassicalSolver.classical_value(or_game)

    def test_cap_is_enforced(self, chsh):
        with pytest.raises(CapacityError):
            ClassicalSolver.branch_and_bound_value(GameOperations.or_compose(chsh), cap=10)


# ===========================================================================
# Strategy graph
# ===========================================================================

class TestStrategyGraph:

    def test_chsh_strategy_graph(self, chsh):
        strategy = ClassicalSolver.strategy_graph(chsh)
        assert strategy.value == Fraction(3, 4)
        assert strategy.graph.num_vertices == 4
        # both players answering 0 everywhere reaches 3/4
        assert 0 in strategy.graph.loops
        assert strategy.function_label(0) == "00"

    def test_anti_correlation_graph_is_an_edge(self):
        strategy = ClassicalSolver.strategy_graph(GameFactory.make_anti_correlation())
        assert strategy.graph.sorted_edges == [(0, 1)]
        assert not strategy.graph.loops

    def test_odd_cycle_two_colouring_is_a_loop(self, odd_cycle3):
        # one monochromatic edge loses 2 of 12 weighted pairs, which is optimal
        assert ClassicalSolver.strategy_graph(odd_cycle3).graph.loops

    def test_pair_matrix_matches_pair_value(self):
        game = SymmetricGameFactory(num_questions=2, num_answers=3, seed=5)
        pairs, functions = ClassicalSolver.pair_matrix(game)
        for i, j in itertools.product(range(len(functions)), repeat=2):
            assert Fraction(int(pairs[i, j]), game.denominator) == GameOperations.pair_value(
                game, functions[i], functions[j]
            )


# ===========================================================================
# Values on graphs
# ===========================================================================

class TestValueOnGraph:

    def test_chsh_on_paths(self, chsh):
        for n in (2, 3, 4, 6):
            assert ClassicalSolver.classical_value_on_graph(chsh, GraphFactory.path(n)) == Fraction(3, 4)

    def test_tree_program_matches_exhaustive_search(self):
        game = SymmetricGameFactory(seed=17)
        pairs, _ = ClassicalSolver.pair_matrix(game)
        for tree in (PathGraphFactory(num_vertices=4), GraphFactory.star([1, 1, 2])):
            assert ClassicalSolver._tree_best(pairs, tree) == ClassicalSolver._exhaustive_best(pairs, tree, range(len(pairs)))

    def test_odd_cycle_game_on_triangle_keeps_value(self, odd_cycle3, triangle):
        assert ClassicalSolver.classical_value_on_graph(odd_cycle3, triangle) == Fraction(5, 6)

    def test_assignment_cap(self, chsh, triangle):
        with pytest.raises(CapacityError):
            ClassicalSolver.classical_value_on_graph(chsh, triangle, assignment_cap=8)

    def test_graph_game_value(self, chsh, p3):
        graph_game = GameOperations.extend_over_graph(chsh, p3)
        assert ClassicalSolver.graph_game_value(graph_game) == Fraction(3, 4)

    def test_magic_square_on_single_edge(self, p2):
        ms = GameFactory.make_magic_square()
        assert ClassicalSolver.classical_value_on_graph(ms, p2) == ClassicalSolver.classical_value(ms) == Fraction(17, 18)

    @pytest.mark.parametrize("graph_name", ["C3", "C4", "C5"])
    def test_pruned_roots_match_unpruned_search(self, chsh, graph_name):
        graph = GraphFactory.named_graph(graph_name)
        flipped = Game.uniform("chsh-flip", chsh.predicate, [[[1, 0], [1, 0]]])
        assert ClassicalSolver.classical_value_on_graph(flipped, graph) == ClassicalSolver.classical_value_on_graph(
            chsh, graph
        )


# ===========================================================================
# Equal values iff H maps into the strategy graph
# ===========================================================================

class TestHomomorphismCriterion:

    @pytest.mark.parametrize("game_name, graph_name", [
        ("chsh", "P3"),
        ("chsh", "C5"),
        ("oc3", "P4"),
        ("oc3", "C3"),
        ("anti", "C3"),
    ])
    def test_named_pairs_are_consistent(self, game_name, graph_name):
        game, graph = GameFactory.named_game(game_name), GraphFactory.named_graph(graph_name)
        report = ClassicalSolver.verify_homomorphism_criterion(game, graph)
        assert report.criterion_consistent

    def test_magic_square_on_single_edge(self, p2):
        report = ClassicalSolver.verify_homomorphism_criterion(GameFactory.make_magic_square(), p2)
        assert report.hom_exists
        assert report.omega_graph == report.omega_classical == Fraction(17, 18)
        assert report.criterion_consistent

    def test_anti_correlation_on_triangle(self):
        anti = GameFactory.make_anti_correlation()
        report = ClassicalSolver.verify_homomorphism_criterion(anti, GraphFactory.cycle(3))
        assert report.omega_classical == 1
        assert report.omega_graph == Fraction(2, 3)
        assert report.hom_exists is False

    def test_sweep_sample(self):
        sweep = itertools.islice(ClassicalSolver.homomorphism_criterion_sweep(max_vertices=3), 200)
        assert all(report.criterion_consistent for _, _, report in sweep)

    @pytest.mark.slow
    def test_full_sweep(self):
        sweep = ClassicalSolver.homomorphism_criterion_sweep(max_vertices=4)
        assert all(report.criterion_consistent for _, _, report in sweep)

    def test_symmetric_game_count(self):
        assert sum(1 for _ in ClassicalSolver.symmetric_games(2, 2)) == 2 ** 10


# ===========================================================================
# OR composition
# ===========================================================================

class TestOrBound:

    def test_chsh_or_bound(self, chsh):
        report = ClassicalSolver.or_bound(chsh)
        assert report.bound == 1
        assert report.holds

    @pytest.mark.parametrize("seed", range(5))
    def test_random_games(self, seed):
        game = SymmetricGameFactory(num_questions=2, num_answers=2, seed=seed)
        assert ClassicalSolver.or_bound(game).holds

    def test_always_lose_composition_scores_zero(self):
        always_lose = GameFactory.named_game("always-lose")
        assert ClassicalSolver.classical_value(GameOperations.or_compose(always_lose)) == 0
        assert ClassicalSolver.or_bound(always_lose).omega_or == 0

    def test_large_composition_goes_to_branch_and_bound(self, engine_settings):
        engine_settings(CLASSICAL_SEARCH_CAP=10_000)
        game = SymmetricGameFactory(num_questions=2, num_answers=2, seed=11)
        expected = ClassicalSolver.classical_value(GameOperations.or_compose(game), cap=10**9)
        assert ClassicalSolver.or_bound(game).omega_or == expected

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(2))
    def test_three_by_three_games(self, seed):
        game = SymmetricGameFactory(num_questions=3, num_answers=3, seed=seed)
        report = ClassicalSolver.or_bound(game)
        assert report.omega <= report.omega_or
        assert report.holds
