from fractions import Fraction

import numpy as np
import structlog

from apps.classical.models import StrategyGraph
from apps.classical.services import ClassicalSolver
from apps.core.exceptions import CapacityError, InputRangeError, SolverInconclusive
from apps.core.utils import engine_setting
from apps.games.models import Game
from apps.games.services import GameFactory, GameOperations
from apps.graphs.models import Graph
from apps.graphs.services import GraphFactory, HomomorphismService, MatchingService, TreeFamilyService
from apps.monogamy.models import GraphEntry, MonogamyReport, PolygamyReport
from apps.npa.services import CERTIFYING_LEVELS, NpaBoundService
from apps.quantum.services import StrategyBuilder, StrategyEvaluator

logger = structlog.get_logger(__name__)

MAGIC_SQUARE_CITED_VALUE = Fraction(35, 36)
OR_CHECK_SIZES = [(q, a) for q in (1, 2, 3) for a in (1, 2, 3) if (q, a) != (3, 3)]
OR_CHECK_LARGEST = (3, 3)


def levels_up_to(max_level: str) -> tuple[str, ...]:
    if max_level not in CERTIFYING_LEVELS:
        raise InputRangeError(f"Level {max_level!r} is not one of {', '.join(CERTIFYING_LEVELS)}.")
    return CERTIFYING_LEVELS[: CERTIFYING_LEVELS.index(max_level) + 1]


class MonogamyService:
    """
    Classifies a game over P2, P3 and the families T_2..T_max_k.

    No advantage on P3 and P4 with both mapping into S_G makes the game
    monogamous on every graph that maps into S_G. No advantage on P3 and on
    all of T_max_k extends to every T_k with k > max_k, so the advantage list
    is then complete among graphs mapping into S_G.
    """

    @staticmethod
    def examined_graphs(max_k: int) -> list[tuple[str, Graph]]:
        graphs = [("P2", GraphFactory.path(2)), ("P3", GraphFactory.path(3))]
        for k in range(2, max_k + 1):
            for member in TreeFamilyService.enumerate_Tk(k, max_k):
                graphs.append((member.name, member))
        return graphs

    @staticmethod
    def examine(
        game: Game,
        name: str,
        graph: Graph,
        strategy_graph: StrategyGraph,
        levels: tuple[str, ...],
        tolerance: float,
        tol: float | None = None,
    ) -> GraphEntry:
        omega_graph = ClassicalSolver.classical_value_on_graph(game, graph)
        bound = level = advantage = None
        try:
            solution = NpaBoundService.lowest_certifying_level(
                GameOperations.extend_over_graph(game, graph), float(omega_graph), tolerance, levels, tol
            )
        except (InputRangeError, CapacityError, SolverInconclusive) as exc:
            status = f"unavailable: {exc}"
        else:
            bound, level, status = solution.dual, solution.level, solution.status
            advantage = bound > float(omega_graph) + tolerance

        return GraphEntry(
            name=name,
            num_vertices=graph.num_vertices,
            num_edges=graph.num_edges,
            omega_graph=omega_graph,
            bound=bound,
            level=level,
            status=status,
            hom_exists=HomomorphismService.homomorphism_exists(graph, strategy_graph.graph),
            has_p3_decomposition=MatchingService.fractional_p3_decomposition(graph) is not None,
            in_some_tk=TreeFamilyService.is_in_some_Tk(graph),
            advantage=advantage,
        )

    @staticmethod
    def build_report(
        game: Game,
        max_k: int = 2,
        max_level: str | None = None,
        tolerance: float | None = None,
        tol: float | None = None,
    ) -> MonogamyReport:
        tk_cap = engine_setting("TK_MAX_K")
        if not 2 <= max_k <= tk_cap:
            raise InputRangeError(f"max_k must lie in [2, {tk_cap}], got {max_k}.")
        tolerance = engine_setting("ADVANTAGE_TOLERANCE", tolerance)
        levels = levels_up_to(engine_setting("NPA_DEFAULT_LEVEL", max_level))

        strategy_graph = ClassicalSolver.strategy_graph(game)
        omega = strategy_graph.value
        entries = tuple(
            MonogamyService.examine(game, name, graph, strategy_graph, levels, tolerance, tol)
            for name, graph in MonogamyService.examined_graphs(max_k)
        )
        notes = tuple(f"{e.name}: {e.status}" for e in entries if e.bound is None)
        classification, conclusion = MonogamyService.classify(entries, omega, max_k, tolerance)
        report = MonogamyReport(game.label, omega, max_k, entries, classification, conclusion, notes)
        logger.info("monogamy_classified", game=game.label, max_k=max_k, classification=classification)
        return report

    @staticmethod
    def classify(entries, omega: Fraction, max_k: int, tolerance: float) -> tuple[str, str]:
        by_name = {e.name: e for e in entries}
        advantage = [e.name for e in entries if e.advantage]
        beyond_pair = [e for e in entries if e.num_vertices >= 3]
        p3, p4 = by_name.get("P3"), by_name.get("P4")

        def matches_classical(entry: GraphEntry | None) -> bool:
            return (
                entry is not None
                and entry.hom_exists
                and entry.bound is not None
                and entry.bound <= float(omega) + tolerance
            )

        if any(e.advantage for e in beyond_pair):
            classification = f"advantage-on: [{', '.join(advantage)}]"
        elif matches_classical(p3) and matches_classical(p4):
            return (
                "monogamous",
                "no quantum advantage on any graph H with H -> S_G (P3 and P4 match the classical value)",
            )
        else:
            classification = "inconclusive"

        largest = [e for e in entries if e.in_some_tk and e.num_vertices == 2 * max_k]
        closed = p3 is not None and p3.advantage is False and all(e.advantage is False for e in largest)
        if closed and advantage:
            conclusion = f"nonlocality only on {', '.join(advantage)} among graphs H with H -> S_G"
        elif closed:
            conclusion = "no quantum advantage among graphs H with H -> S_G"
        else:
            conclusion = "advantage beyond the examined graphs is undetermined"
        return classification, conclusion


class PolygamyService:
    """Two simultaneous perfect instances of a game on P3 through OR composition."""

    @staticmethod
    def or_checks(rng: np.random.Generator, num_games: int, include_largest: bool = False) -> tuple:
        """
        OR bound on random symmetric games. (3, 3) games, whose composition
        is solved by branch and bound, are drawn only with include_largest.
        """
        sizes = OR_CHECK_SIZES + [OR_CHECK_LARGEST] if include_largest else OR_CHECK_SIZES
        checks = []
        for index in range(num_games):
            num_questions, num_answers = sizes[rng.integers(len(sizes))]
            game = GameFactory.random_symmetric(rng, num_questions, num_answers, label=f"random-{index}")
            check = ClassicalSolver.or_bound(game)
            if not check.holds:
                logger.error("or_bound_violated", game=game.label, omega=str(check.omega), omega_or=str(check.omega_or))
            checks.append(check)
        return tuple(checks)

    @staticmethod
    def demo(seed: int | None = None, num_games: int = 50, include_largest: bool = False) -> PolygamyReport:
        seed = engine_setting("RANDOM_SEED", seed)
        base = GameFactory.make_magic_square()
        strategy = StrategyBuilder.build_polygamy_strategy(base, StrategyBuilder.magic_square_strategy())
        path = GraphFactory.path(3)

        or_game = GameOperations.extend_over_graph(GameOperations.or_compose(base), path)
        edge_values = StrategyEvaluator.edge_values(or_game, strategy)
        instance_values = {
            f"instance{i}": StrategyEvaluator.edge_values(
                GameOperations.extend_over_graph(GameOperations.project_instance(base, i), path), strategy
            )
            for i in (1, 2)
        }
        omega_base = ClassicalSolver.classical_value(base)
        report = PolygamyReport(
            game=base.label,
            edge_values=edge_values,
            instance_values=instance_values,
            omega_base=omega_base,
            omega_cited=MAGIC_SQUARE_CITED_VALUE,
            or_checks=PolygamyService.or_checks(np.random.default_rng(seed), num_games, include_largest),
            seed=seed,
        )
        if report.flagged:
            logger.warning("classical_value_differs_from_cited", game=base.label, brute_force=str(omega_base))
        return report
