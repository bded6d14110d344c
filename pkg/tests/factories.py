"""
factory-boy factories for the engine's frozen domain types.
"""
import factory
import numpy as np

from apps.games.models import Game
from apps.games.services import GameFactory
from apps.graphs.models import Graph


class PathGraphFactory(factory.Factory):
    """P_n on vertices 0..n-1; pass num_vertices for other lengths."""

    class Meta:
        model = Graph

    num_vertices = 3
    edges = factory.LazyAttribute(lambda o: frozenset((i, i + 1) for i in range(o.num_vertices - 1)))
    name = factory.LazyAttribute(lambda o: f"P{o.num_vertices}")


class SymmetricGameFactory(factory.Factory):
    """Uniform-question symmetric game with a coin-flip predicate drawn from `seed`."""

    class Meta:
        model = Game

    class Params:
        num_questions = 2
        num_answers = 2
        seed = 0

    label = factory.Sequence(lambda n: f"random-{n}")
    predicate = factory.LazyAttribute(
        lambda o: GameFactory.random_symmetric(np.random.default_rng(o.seed), o.num_questions, o.num_answers).predicate
    )
    weights = factory.LazyAttribute(lambda o: np.ones((o.num_questions, o.num_questions), dtype=np.int64))
