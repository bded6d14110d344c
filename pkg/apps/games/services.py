import itertools
import json
import re
from fractions import Fraction
from pathlib import Path

import numpy as np
import structlog

from apps.core.exceptions import CapacityError, InputRangeError, ParseError
from apps.core.utils import engine_setting
from apps.games.models import Game, GraphGame
from apps.graphs.models import Graph

logger = structlog.get_logger(__name__)

MAGIC_SQUARE_ROWS = 3
GAME_NAME_PATTERN = re.compile(
    r"^(?:(?P<chsh>chsh)|oc(?P<oc>\d+)|(?P<ms>ms|magic-square)|(?P<anti>anti)"
    r"|always-(?P<always>win|lose)(?:-(?P<q>\d+)x(?P<a>\d+))?)$"
)


def deterministic_functions(num_questions: int, num_answers: int) -> np.ndarray:
    """
    All maps f: I -> O as rows of an (|O|^|I|, |I|) array, in lexicographic
    order of (f(0), f(1), ...).
    """
    grids = np.indices((num_answers,) * num_questions)
    return grids.reshape(num_questions, -1).T.copy()


def _combine(first: Game, second: Game, op) -> tuple[np.ndarray, np.ndarray]:
    """
    Product of two games: player i receives (x, x') and answers (a, a').
    The predicate is op(first, second) and the question weights multiply.
    """
    v, w = first.predicate, second.predicate
    n_q = first.num_questions * second.num_questions
    n_a = first.num_answers * second.num_answers
    table = op(
        v[:, None, :, None, :, None, :, None],
        w[None, :, None, :, None, :, None, :],
    ).reshape(n_q, n_q, n_a, n_a)
    weights = (first.weights[:, None, :, None] * second.weights[None, :, None, :]).reshape(n_q, n_q)
    return table, weights


class GameFactory:
    """Constructors for the named games the engine ships with."""

    # ------------------------------------------------------------------
    # Named games
    # ------------------------------------------------------------------

    @staticmethod
    def make_chsh() -> Game:
        """CHSH: win iff a1 xor a2 == x1 and x2."""
        x1, x2, a1, a2 = np.indices((2, 2, 2, 2))
        return Game.uniform("chsh", (a1 ^ a2) == (x1 & x2))

    @staticmethod
    def make_odd_cycle(n: int) -> Game:
        """
        Odd-cycle colouring game on C_n.

        With probability 1/2 both players get the same vertex and must answer
        equally; otherwise they get the two ends of a uniformly random edge
        (in random order) and must answer differently. Question pairs the
        referee never asks carry weight 0.
        """
        if n < 3 or n % 2 == 0:
            raise InputRangeError(f"Odd cycle length must be odd and >= 3, got {n}.")
        x1, x2, a1, a2 = np.indices((n, n, 2, 2))
        same = x1 == x2
        adjacent = ((x1 - x2) % n == 1) | ((x2 - x1) % n == 1)
        predicate = np.where(same, a1 == a2, np.where(adjacent, a1 != a2, True))

        weights = np.zeros((n, n), dtype=np.int64)
        for x in range(n):
            weights[x, x] = 2
            weights[x, (x + 1) % n] = 1
            weights[(x + 1) % n, x] = 1
        return Game(label=f"oc{n}", predicate=predicate, weights=weights)

    @staticmethod
    def make_magic_square() -> Game:
        """
        Symmetric magic-square game over a 3x3 grid.

        Questions 0..2 are rows, 3..5 are columns. An answer is a 3-bit integer
        filling the line: bit c of a row answer is cell (r, c), bit r of a
        column answer is cell (r, c). Rows must have even parity and columns
        odd parity; the two lines must agree on every shared cell.
        """
        lines = 2 * MAGIC_SQUARE_ROWS
        bits = np.array([[(a >> k) & 1 for k in range(3)] for a in range(8)])
        parity = bits.sum(axis=1) % 2
        valid = np.array(
            [[parity[a] == (0 if line < MAGIC_SQUARE_ROWS else 1) for a in range(8)] for line in range(lines)]
        )

        def agree(l1: int, l2: int, a1: int, a2: int) -> bool:
            row1, row2 = l1 < MAGIC_SQUARE_ROWS, l2 < MAGIC_SQUARE_ROWS
            i1, i2 = l1 % MAGIC_SQUARE_ROWS, l2 % MAGIC_SQUARE_ROWS
            if row1 == row2:
                return i1 != i2 or a1 == a2
            # a row and a column share one cell; each line stores it at the other's index
            return bits[a1][i2] == bits[a2][i1]

        predicate = np.zeros((lines, lines, 8, 8), dtype=bool)
        for l1, l2, a1, a2 in itertools.product(range(lines), range(lines), range(8), range(8)):
            predicate[l1, l2, a1, a2] = valid[l1, a1] and valid[l2, a2] and agree(l1, l2, a1, a2)

        # flipping the four corner cells of a rectangle keeps every line parity
        relabelings = []
        for r, c in itertools.product(range(1, MAGIC_SQUARE_ROWS), repeat=2):
            masks = np.zeros(lines, dtype=np.int64)
            masks[[0, r]] = 1 | (1 << c)
            masks[[MAGIC_SQUARE_ROWS, MAGIC_SQUARE_ROWS + c]] = 1 | (1 << r)
            relabelings.append(np.arange(8)[None, :] ^ masks[:, None])
        return Game.uniform("ms", predicate, relabelings)

    @staticmethod
    def make_anti_correlation() -> Game:
        """One question, one bit each: win iff the bits differ."""
        x1, x2, a1, a2 = np.indices((1, 1, 2, 2))
        return Game.uniform("anti", a1 != a2)

    @staticmethod
    def make_constant(win: bool, num_questions: int = 2, num_answers: int = 2) -> Game:
        if num_questions < 1 or num_answers < 1:
            raise InputRangeError("Constant games need at least one question and one answer.")
        predicate = np.full((num_questions, num_questions, num_answers, num_answers), win)
        return Game.uniform(f"always-{'win' if win else 'lose'}-{num_questions}x{num_answers}", predicate)

    @staticmethod
    def random_symmetric(rng: np.random.Generator, num_questions: int, num_answers: int, label: str = "") -> Game:
        """Uniform-question game whose predicate entries are fair coin flips, mirrored to be symmetric."""
        raw = rng.random((num_questions, num_questions, num_answers, num_answers)) < 0.5
        x1, x2, a1, a2 = np.indices(raw.shape)
        upper = x1 * num_answers + a1 <= x2 * num_answers + a2
        predicate = np.where(upper, raw, raw.transpose(1, 0, 3, 2))
        return Game.uniform(label or f"random-{num_questions}x{num_answers}", predicate)

    # ------------------------------------------------------------------
    # Name / file resolution
    # ------------------------------------------------------------------

    @staticmethod
    def named_game(name: str) -> Game:
        """Resolve chsh | oc<n> | ms | anti | always-win[-IxO] | always-lose[-IxO]."""
        match = GAME_NAME_PATTERN.match(name.strip().lower())
        if not match:
            raise ParseError(f"Unknown game name {name!r}.")
        if match["chsh"]:
            return GameFactory.make_chsh()
        if match["oc"]:
            return GameFactory.make_odd_cycle(int(match["oc"]))
        if match["ms"]:
            return GameFactory.make_magic_square()
        if match["anti"]:
            return GameFactory.make_anti_correlation()
        n_q = int(match["q"]) if match["q"] else 2
        n_a = int(match["a"]) if match["a"] else 2
        return GameFactory.make_constant(match["always"] == "win", n_q, n_a)

    @staticmethod
    def resolve(spec: str) -> Game:
        """Accept a game name, a path to a Game JSON file, or "file:<path>"."""
        from apps.games.serializers import GameSerializer

        path_text = spec[len("file:"):] if spec.startswith("file:") else spec
        path = Path(path_text)
        if spec.startswith("file:") or path.suffix == ".json":
            if not path.exists():
                raise InputRangeError(f"Game file not found: {path}")
            try:
                payload = json.loads(path.read_text())
            except json.JSONDecodeError as exc:
                raise InputRangeError(f"Malformed game file {path}: {exc}") from exc
            return GameSerializer.to_game(payload)
        return GameFactory.named_game(spec)


class GameOperations:
    """Predicate access and game combinators."""

    # ------------------------------------------------------------------
    # Evaluation
    # ------------------------------------------------------------------

    @staticmethod
    def eval_predicate(game: Game, x1: int, x2: int, a1: int, a2: int) -> bool:
        for name, value, bound in (
            ("x1", x1, game.num_questions),
            ("x2", x2, game.num_questions),
            ("a1", a1, game.num_answers),
            ("a2", a2, game.num_answers),
        ):
            if not 0 <= value < bound:
                raise InputRangeError(f"{name}={value} out of range [0, {bound}).")
        return bool(game.predicate[x1, x2, a1, a2])

    @staticmethod
    def pair_value(game: Game, f_a, f_b) -> Fraction:
        """Winning probability of the deterministic pair (f_a, f_b)."""
        f_a, f_b = np.asarray(f_a), np.asarray(f_b)
        if f_a.shape != (game.num_questions,) or f_b.shape != (game.num_questions,):
            raise InputRangeError("Deterministic strategies need one answer per question.")
        if (f_a < 0).any() or (f_b < 0).any() or max(f_a.max(), f_b.max()) >= game.num_answers:
            raise InputRangeError("Deterministic strategy answers out of range.")
        q = np.arange(game.num_questions)
        wins = game.win_weights[q[:, None], q[None, :], f_a[:, None], f_b[None, :]]
        return Fraction(int(wins.sum()), game.denominator)

    @staticmethod
    def assignment_value(graph_game: GraphGame, functions) -> Fraction:
        """Edge-averaged value of one deterministic function per vertex."""
        functions = np.asarray(functions)
        if functions.shape[0] != graph_game.num_players:
            raise InputRangeError("Need exactly one deterministic function per vertex.")
        total = sum(
            (GameOperations.pair_value(graph_game.base, functions[u], functions[v]) for u, v in graph_game.edges),
            Fraction(0),
        )
        return total / graph_game.graph.num_edges

    # ------------------------------------------------------------------
    # Combinators
    # ------------------------------------------------------------------

    @staticmethod
    def or_compose(game: Game) -> Game:
        """Two simultaneous instances; won if at least one instance is won."""
        table, weights = _combine(game, game, np.logical_or)
        return Game(label=f"{game.label}|or2", predicate=table, weights=weights)

    @staticmethod
    def project_instance(game: Game, instance: int) -> Game:
        """Two-instance product game that is won iff the given instance (1 or 2) is won."""
        if instance not in (1, 2):
            raise InputRangeError(f"instance must be 1 or 2, got {instance}.")
        ignore = Game(
            label="any",
            predicate=np.ones_like(game.predicate, dtype=bool),
            weights=game.weights,
        )
        pair = (game, ignore) if instance == 1 else (ignore, game)
        table, weights = _combine(*pair, np.logical_and)
        return Game(label=f"{game.label}|inst{instance}", predicate=table, weights=weights)

    @staticmethod
    def parallel_repeat(game: Game, n: int, cap: int | None = None) -> Game:
        """n-fold AND of independent instances."""
        if n < 1:
            raise InputRangeError(f"Repetition count must be positive, got {n}.")
        cap = engine_setting("PARALLEL_REPEAT_CAP", cap)
        size = (game.num_questions * game.num_answers) ** n
        if size > cap:
            logger.warning("parallel_repeat_rejected", game=game.label, n=n, size=size, cap=cap)
            raise CapacityError(
                f"parallel_repeat({game.label}, {n}): (|I|*|O|)^n = ({game.num_questions}*{game.num_answers})^{n}"
                f" = {size} exceeds PARALLEL_REPEAT_CAP = {cap}."
            )
        if n == 1:
            return Game(label=game.label, predicate=game.predicate, weights=game.weights, relabelings=game.relabelings)

        result = game
        for _ in range(n - 1):
            table, weights = _combine(result, game, np.logical_and)
            result = Game(label=result.label, predicate=table, weights=weights)
        return Game(label=f"{game.label}^{n}", predicate=result.predicate, weights=result.weights)

    @staticmethod
    def extend_over_graph(game: Game, graph: Graph) -> GraphGame:
        return GraphGame(base=game, graph=graph)
