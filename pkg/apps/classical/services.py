import itertools
from collections.abc import Iterator
from fractions import Fraction

import networkx as nx
import numpy as np
import structlog

from apps.classical.models import HomomorphismCriterionReport, OrBoundReport, StrategyGraph
from apps.core.exceptions import CapacityError
from apps.core.utils import engine_setting
from apps.games.models import Game, GraphGame
from apps.games.services import GameOperations, deterministic_functions
from apps.graphs.models import Graph
from apps.graphs.services import GraphFactory, HomomorphismService

logger = structlog.get_logger(__name__)

CHUNK_ELEMENTS = 4_000_000


class ClassicalSolver:
    """
    Exact classical values by exhaustive search over deterministic strategies.

    Every value is an integer count of weighted wins, turned into a Fraction
    only at the end, so equality tests between values are exact.
    """

    # ------------------------------------------------------------------
    # Two-player value
    # ------------------------------------------------------------------

    @staticmethod
    def _check_cap(evaluations: int, cap: int, what: str) -> None:
        if evaluations > cap:
            logger.warning("classical_cap_exceeded", what=what, evaluations=evaluations, cap=cap)
            raise CapacityError(f"{what} needs {evaluations:.3g} evaluations; cap is {cap:.3g}.")

    @staticmethod
    def orbit_representatives(game: Game, functions: np.ndarray) -> np.ndarray:
        """
        Indices of the functions that are lexicographically first in their
        orbit under the game's relabeling group. Every index when none is declared.
        """
        group = game.relabeling_group
        n_f, n_q = functions.shape
        if len(group) == 1:
            return np.arange(n_f)
        place = game.num_answers ** np.arange(n_q - 1, -1, -1)
        own = np.arange(n_f)
        keep = np.ones(n_f, dtype=bool)
        rows = np.arange(n_q)[None, :]
        for g in group[1:]:
            keep &= g[rows, functions] @ place >= own
        representatives = np.flatnonzero(keep)
        logger.debug("orbit_representatives", game=game.label, group=len(group), kept=len(representatives), of=n_f)
        return representatives

    @staticmethod
    def classical_value(game: Game, cap: int | None = None) -> Fraction:
        """
        max over (f_A, f_B) of the weighted winning probability.

        For fixed f_A the best f_B answers each x2 independently, so the
        search is over f_A only: |O|^|I| * |I|^2 * |O| evaluations, divided
        by the size of the declared relabeling group.
        """
        cap = engine_setting("CLASSICAL_SEARCH_CAP", cap)
        n_q, n_a = game.num_questions, game.num_answers
        n_f = n_a**n_q
        per_function = n_q * n_q * n_a
        what = f"classical_value({game.label})"
        ClassicalSolver._check_cap(n_f // len(game.relabeling_group) * per_function, cap, what)

        functions = deterministic_functions(n_q, n_a)
        representatives = ClassicalSolver.orbit_representatives(game, functions)
        ClassicalSolver._check_cap(len(representatives) * per_function, cap, what)
        functions = functions[representatives]
        n_f = len(functions)
        table = game.win_weights
        rows = np.arange(n_q)[None, :]
        chunk = max(1, CHUNK_ELEMENTS // per_function)
        best = 0
        for start in range(0, n_f, chunk):
            f_a = functions[start:start + chunk]
            # (c, x1, x2, b) -> best response per x2
            gains = table[rows, :, f_a, :].sum(axis=1).max(axis=2).sum(axis=1)
            best = max(best, int(gains.max()))
        value = Fraction(best, game.denominator)
        logger.debug("classical_value", game=game.label, value=str(value))
        return value

    @staticmethod
    def exhaustive_evaluations(game: Game) -> int:
        return game.num_answers**game.num_questions * game.num_questions**2 * game.num_answers

    @staticmethod
    def branch_and_bound_value(game: Game, cap: int | None = None) -> Fraction:
        """
        Exact classical value by depth-first branch and bound over f_A.

        A partial f_A on questions 0..k-1 is bounded by letting every later
        question take its best answer separately for each (x2, b); at a leaf
        the bound is Bob's exact best response. Evaluated table entries are
        counted against CLASSICAL_SEARCH_CAP.
        """
        cap = engine_setting("CLASSICAL_SEARCH_CAP", cap)
        n_q, n_a = game.num_questions, game.num_answers
        what = f"branch_and_bound_value({game.label})"
        # table[x1, a, x2, b]
        table = game.win_weights.transpose(0, 2, 1, 3).astype(np.int64)
        tail = np.zeros((n_q + 1, n_q, n_a), dtype=np.int64)
        tail[:n_q] = np.cumsum(table.max(axis=1)[::-1], axis=0)[::-1]
        per_node = n_q * n_a
        batch = max(1, CHUNK_ELEMENTS // (per_node * n_a))

        best, evaluations, expanded = -1, 0, 0
        stack = [(0, np.zeros((1, n_q, n_a), dtype=np.int64))]
        while stack and best < game.denominator:
            depth, scores = stack.pop()
            scores = scores[(scores + tail[depth]).max(axis=2).sum(axis=1) > best]
            if not len(scores):
                continue
            expanded += len(scores)
            evaluations += len(scores) * n_a * per_node
            ClassicalSolver._check_cap(evaluations, cap, what)
            children = (scores[:, None] + table[depth][None]).reshape(-1, n_q, n_a)
            bounds = (children + tail[depth + 1]).max(axis=2).sum(axis=1)
            if depth + 1 == n_q:
                best = max(best, int(bounds.max()))
                continue
            keep = np.flatnonzero(bounds > best)
            # highest bounds are pushed last and popped first
            keep = keep[np.argsort(bounds[keep], kind="stable")]
            for start in range(0, len(keep), batch):
                stack.append((depth + 1, children[keep[start:start + batch]]))

        value = Fraction(best, game.denominator)
        logger.debug("branch_and_bound_value", game=game.label, value=str(value), expanded=expanded)
        return value

    # ------------------------------------------------------------------
    # Pair values and the strategy graph
    # ------------------------------------------------------------------

    @staticmethod
    def pair_matrix(game: Game, cap: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        """
        Integer matrix P[i, j] = weighted wins of (functions[i], functions[j]),
        plus the function table itself.
        """
        cap = engine_setting("CLASSICAL_SEARCH_CAP", cap)
        n_q, n_a = game.num_questions, game.num_answers
        n_f = n_a**n_q
        ClassicalSolver._check_cap(n_f * n_f * n_q, cap, f"pair_matrix({game.label})")

        functions = deterministic_functions(n_q, n_a)
        rows = np.arange(n_q)[None, :]
        # best[f_A, x2, b] = sum_x1 W V[x1, x2, f_A(x1), b]
        responses = game.win_weights[rows, :, functions, :].sum(axis=1)
        pairs = responses[:, rows, functions].sum(axis=2)
        return pairs, functions

    @staticmethod
    def strategy_graph(game: Game, cap: int | None = None) -> StrategyGraph:
        pairs, functions = ClassicalSolver.pair_matrix(game, cap)
        best = int(pairs.max())
        hits = pairs == best
        edges = [(int(i), int(j)) for i, j in zip(*np.nonzero(np.triu(hits, k=1)))]
        loops = [int(i) for i in np.flatnonzero(np.diag(hits))]
        graph = Graph.from_edges(len(functions), edges, loops, name=f"S[{game.label}]")
        logger.debug("strategy_graph", game=game.label, vertices=len(functions), edges=len(edges), loops=len(loops))
        return StrategyGraph(graph=graph, functions=functions, value=Fraction(best, game.denominator))

    # ------------------------------------------------------------------
    # Value on a graph
    # ------------------------------------------------------------------

    @staticmethod
    def classical_value_on_graph(
        game: Game,
        graph: Graph,
        cap: int | None = None,
        assignment_cap: int | None = None,
    ) -> Fraction:
        """
        max over one deterministic function per vertex of the edge-averaged
        pair value. A single edge is the two-player value. Trees use dynamic
        programming over a rooted orientation; other graphs are searched
        exhaustively with vertex 0 fixed per slice, up to relabeling.
        """
        graph_game = GameOperations.extend_over_graph(game, graph)
        if graph.num_edges == 1:
            value = ClassicalSolver.classical_value(game, cap)
            logger.debug("classical_value_on_graph", game=graph_game.label(), value=str(value))
            return value

        assignment_cap = engine_setting("GRAPH_ASSIGNMENT_CAP", assignment_cap)
        pairs, functions = ClassicalSolver.pair_matrix(game, cap)
        n_f = len(functions)

        if graph.is_tree():
            best = ClassicalSolver._tree_best(pairs, graph)
        else:
            roots = ClassicalSolver.orbit_representatives(game, functions)
            assignments = len(roots) * n_f ** (graph.num_vertices - 1)
            ClassicalSolver._check_cap(assignments, assignment_cap, f"assignments on {graph.label()}")
            best = ClassicalSolver._exhaustive_best(pairs, graph, roots)

        value = Fraction(best, game.denominator * graph.num_edges)
        logger.debug("classical_value_on_graph", game=graph_game.label(), value=str(value))
        return value

    @staticmethod
    def _tree_best(pairs: np.ndarray, tree: Graph) -> int:
        g = tree.to_networkx()
        down = {v: np.zeros(len(pairs), dtype=np.int64) for v in g.nodes}
        for parent, child in reversed(list(nx.bfs_edges(g, 0))):
            down[parent] += (pairs + down[child][None, :]).max(axis=1)
        return int(down[0].max())

    @staticmethod
    def _exhaustive_best(pairs: np.ndarray, graph: Graph, roots: np.ndarray) -> int:
        n, n_f = graph.num_vertices, len(pairs)
        rest = n - 1
        best = 0
        for f0 in roots:
            total = np.zeros((n_f,) * rest, dtype=np.int64)
            for u, v in graph.edges:
                if u == 0:
                    shape = [1] * rest
                    shape[v - 1] = n_f
                    total += pairs[f0].reshape(shape)
                else:
                    shape = [1] * rest
                    shape[u - 1], shape[v - 1] = n_f, n_f
                    # u < v, so axis order in `pairs` matches the broadcast axes
                    total += pairs.reshape(shape)
            best = max(best, int(total.max()))
        return best

    # ------------------------------------------------------------------
    # equal values iff H maps into the strategy graph
    # ------------------------------------------------------------------

    @staticmethod
    def verify_homomorphism_criterion(
        game: Game, graph: Graph, cap: int | None = None
    ) -> HomomorphismCriterionReport:
        if graph.num_edges == 1:
            omega = ClassicalSolver.classical_value_on_graph(game, graph, cap)
            # an optimal pair is an edge or a loop of S_G, so a single edge always maps in
            return HomomorphismCriterionReport(omega_classical=omega, omega_graph=omega, hom_exists=True)

        strategy = ClassicalSolver.strategy_graph(game, cap)
        report = HomomorphismCriterionReport(
            omega_classical=strategy.value,
            omega_graph=ClassicalSolver.classical_value_on_graph(game, graph, cap),
            hom_exists=HomomorphismService.homomorphism_exists(graph, strategy.graph),
        )
        if not report.criterion_consistent:
            logger.error("homomorphism_criterion_inconsistent", game=game.label, graph=graph.label())
        return report

    @staticmethod
    def symmetric_games(num_questions: int, num_answers: int) -> Iterator[Game]:
        """Every symmetric uniform-question predicate, one per subset of swap orbits."""
        shape = (num_questions, num_questions, num_answers, num_answers)
        orbits: dict[tuple, list[tuple]] = {}
        for index in itertools.product(*map(range, shape)):
            x1, x2, a1, a2 = index
            orbits.setdefault(min(index, (x2, x1, a2, a1)), []).append(index)
        orbit_list = list(orbits.values())
        for bits in itertools.product((False, True), repeat=len(orbit_list)):
            predicate = np.zeros(shape, dtype=bool)
            for on, members in zip(bits, orbit_list):
                for index in members:
                    predicate[index] = on
            label = "sym-" + "".join("1" if b else "0" for b in bits)
            yield Game.uniform(label, predicate)

    @staticmethod
    def homomorphism_criterion_sweep(
        max_vertices: int = 4,
    ) -> Iterator[tuple[Game, Graph, HomomorphismCriterionReport]]:
        """The criterion over all (2, 2) symmetric games and connected graphs on 2..max_vertices vertices."""
        graphs = [g for n in range(2, max_vertices + 1) for g in GraphFactory.connected_graphs(n)]
        for game in ClassicalSolver.symmetric_games(2, 2):
            for graph in graphs:
                yield game, graph, ClassicalSolver.verify_homomorphism_criterion(game, graph)

    # ------------------------------------------------------------------
    # OR composition
    # ------------------------------------------------------------------

    @staticmethod
    def or_bound(game: Game, cap: int | None = None) -> OrBoundReport:
        """
        Classical values of G and of its OR-composition, for the min(1, 3 w(G)) check.
        The composition goes to branch and bound once exhaustive search exceeds the cap.
        """
        cap = engine_setting("CLASSICAL_SEARCH_CAP", cap)
        or_game = GameOperations.or_compose(game)
        if ClassicalSolver.exhaustive_evaluations(or_game) <= cap:
            omega_or = ClassicalSolver.classical_value(or_game, cap)
        else:
            omega_or = ClassicalSolver.branch_and_bound_value(or_game, cap)
        return OrBoundReport(omega=ClassicalSolver.classical_value(game, cap), omega_or=omega_or)

    @staticmethod
    def graph_game_value(graph_game: GraphGame, cap: int | None = None) -> Fraction:
        return ClassicalSolver.classical_value_on_graph(graph_game.base, graph_game.graph, cap)
