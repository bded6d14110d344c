"""
Symmetric two-player games and their extension over graphs.

A Game stores its winning predicate as a read-only boolean array indexed
(x1, x2, a1, a2) and its referee distribution as integer weights over
question pairs. The probability of (x1, x2) is weights[x1, x2] / denominator,
which keeps every value computed from a Game an exact rational.

A game may also declare answer relabelings: arrays g of shape (|I|, |O|)
where g[x] permutes the answers to question x and the predicate satisfies
V[x1, x2, g[x1][a1], g[x2][a2]] == V[x1, x2, a1, a2]. The classical search
uses the group they generate to fix one player's function up to symmetry.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import lcm

import numpy as np

from apps.core.exceptions import InputRangeError
from apps.graphs.models import Graph


@dataclass(frozen=True, eq=False)
class Game:
    label: str
    predicate: np.ndarray
    weights: np.ndarray
    relabelings: tuple = ()

    def __post_init__(self):
        predicate = np.array(self.predicate, dtype=bool)
        weights = np.array(self.weights, dtype=np.int64)

        if predicate.ndim != 4:
            raise InputRangeError("Predicate table must be indexed by (x1, x2, a1, a2).")
        n_q, n_q2, n_a, n_a2 = predicate.shape
        if n_q != n_q2 or n_a != n_a2 or n_q < 1 or n_a < 1:
            raise InputRangeError(f"Predicate shape {predicate.shape} is not |I|x|I|x|O|x|O|.")
        if weights.shape != (n_q, n_q):
            raise InputRangeError(f"Question weights must have shape {(n_q, n_q)}.")
        if (weights < 0).any() or weights.sum() <= 0:
            raise InputRangeError("Question weights must be non-negative with a positive total.")

        if not np.array_equal(predicate, predicate.transpose(1, 0, 3, 2)):
            raise InputRangeError(f"Game {self.label!r} is not symmetric under swapping players.")
        if not np.array_equal(weights, weights.T):
            raise InputRangeError(f"Question weights of {self.label!r} are not symmetric.")

        predicate.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "predicate", predicate)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "relabelings", self._checked_relabelings(predicate))

    def _checked_relabelings(self, predicate: np.ndarray) -> tuple[np.ndarray, ...]:
        n_q, _, n_a, _ = predicate.shape
        checked = []
        q = np.arange(n_q)
        for g in self.relabelings:
            try:
                g = np.array(g, dtype=np.int64)
            except ValueError as exc:
                raise InputRangeError(f"Answer relabelings of {self.label!r} must be integer tables: {exc}") from exc
            if g.shape != (n_q, n_a):
                raise InputRangeError(f"Answer relabelings of {self.label!r} must have shape {(n_q, n_a)}.")
            if not (np.sort(g, axis=1) == np.arange(n_a)).all():
                raise InputRangeError(f"Answer relabeling {g.tolist()} is not a permutation per question.")
            image = predicate[q[:, None, None, None], q[None, :, None, None], g[:, None, :, None], g[None, :, None, :]]
            if not np.array_equal(image, predicate):
                raise InputRangeError(f"Answer relabeling {g.tolist()} is not a symmetry of {self.label!r}.")
            g.setflags(write=False)
            checked.append(g)
        return tuple(checked)

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def uniform(cls, label: str, predicate, relabelings=()) -> Game:
        predicate = np.asarray(predicate, dtype=bool)
        n_q = predicate.shape[0]
        return cls(
            label=label,
            predicate=predicate,
            weights=np.ones((n_q, n_q), dtype=np.int64),
            relabelings=tuple(relabelings),
        )

    @classmethod
    def with_fraction_weights(
        cls, label: str, predicate, weights: dict[tuple[int, int], Fraction], relabelings=()
    ) -> Game:
        """Build from a sparse {(x1, x2): probability} map; missing pairs get weight 0."""
        predicate = np.asarray(predicate, dtype=bool)
        n_q = predicate.shape[0]
        common = lcm(*(Fraction(w).denominator for w in weights.values())) if weights else 1
        table = np.zeros((n_q, n_q), dtype=np.int64)
        for (x1, x2), w in weights.items():
            if not (0 <= x1 < n_q and 0 <= x2 < n_q):
                raise InputRangeError(f"Weighted question pair ({x1}, {x2}) is out of range.")
            table[x1, x2] = int(Fraction(w) * common)
        return cls(label=label, predicate=predicate, weights=table, relabelings=tuple(relabelings))

    # ------------------------------------------------------------------
    # Derived quantities
    # ------------------------------------------------------------------

    @property
    def num_questions(self) -> int:
        return self.predicate.shape[0]

    @property
    def num_answers(self) -> int:
        return self.predicate.shape[2]

    @property
    def denominator(self) -> int:
        return int(self.weights.sum())

    @property
    def is_uniform(self) -> bool:
        return bool((self.weights == self.weights[0, 0]).all())

    @property
    def is_binary(self) -> bool:
        return self.num_answers == 2

    @cached_property
    def relabeling_group(self) -> np.ndarray:
        """Closure of the declared relabelings, identity first, as a (|group|, |I|, |O|) array."""
        n_q, n_a = self.num_questions, self.num_answers
        identity = np.tile(np.arange(n_a), (n_q, 1))
        q = np.arange(n_q)[:, None]
        elements = {identity.tobytes(): identity}
        frontier = [identity]
        while frontier:
            fresh = []
            for h in frontier:
                for g in self.relabelings:
                    composed = g[q, h]
                    key = composed.tobytes()
                    if key not in elements:
                        elements[key] = composed
                        fresh.append(composed)
            frontier = fresh
        group = np.stack(list(elements.values()))
        group.setflags(write=False)
        return group

    @cached_property
    def win_weights(self) -> np.ndarray:
        """Integer table weights[x1, x2] * predicate[x1, x2, a1, a2]."""
        table = self.weights[:, :, None, None] * self.predicate
        table.setflags(write=False)
        return table

    def question_probability(self, x1: int, x2: int) -> Fraction:
        return Fraction(int(self.weights[x1, x2]), self.denominator)

    def fraction_weights(self) -> dict[tuple[int, int], Fraction]:
        return {
            (x1, x2): self.question_probability(x1, x2)
            for x1 in range(self.num_questions)
            for x2 in range(self.num_questions)
            if self.weights[x1, x2]
        }

    def is_xor(self) -> bool:
        """True when every asked question pair wins on exactly a1 xor a2 == c(x1, x2)."""
        if not self.is_binary:
            return False
        p = self.predicate
        asked = self.weights > 0
        equal_ok = p[:, :, 0, 0] == p[:, :, 1, 1]
        differ_ok = p[:, :, 0, 1] == p[:, :, 1, 0]
        complementary = p[:, :, 0, 0] != p[:, :, 0, 1]
        return bool((equal_ok & differ_ok & complementary)[asked].all())

    def correlator_signs(self) -> np.ndarray:
        """For XOR games, +1 where equal answers win and -1 where differing answers win."""
        if not self.is_xor():
            raise InputRangeError(f"Game {self.label!r} is not an XOR game.")
        return np.where(self.predicate[:, :, 0, 0], 1, -1)

    def __repr__(self) -> str:
        return f"Game({self.label!r}, |I|={self.num_questions}, |O|={self.num_answers})"


@dataclass(frozen=True, eq=False)
class GraphGame:
    """The n-player game G^H: the base game played on a uniformly random edge of H."""

    base: Game
    graph: Graph

    def __post_init__(self):
        self.graph.require_simple_connected(min_vertices=2)

    @property
    def num_players(self) -> int:
        return self.graph.num_vertices

    @property
    def edges(self) -> list[tuple[int, int]]:
        return self.graph.sorted_edges

    def label(self) -> str:
        return f"{self.base.label}^{self.graph.label()}"
