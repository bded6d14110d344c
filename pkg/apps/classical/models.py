from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from apps.graphs.models import Graph


@dataclass(frozen=True, eq=False)
class StrategyGraph:
    """
    S_G: vertex i is the deterministic function functions[i]. Edge (i, j)
    iff the pair reaches the classical value; loop at i iff (i, i) does.
    """

    graph: Graph
    functions: np.ndarray
    value: Fraction

    def function_label(self, index: int) -> str:
        return "".join(str(int(a)) for a in self.functions[index])


@dataclass(frozen=True)
class HomomorphismCriterionReport:
    omega_classical: Fraction
    omega_graph: Fraction
    hom_exists: bool

    @property
    def criterion_consistent(self) -> bool:
        return (self.omega_classical == self.omega_graph) == self.hom_exists


@dataclass(frozen=True)
class OrBoundReport:
    omega: Fraction
    omega_or: Fraction

    @property
    def bound(self) -> Fraction:
        return min(Fraction(1), 3 * self.omega)

    @property
    def holds(self) -> bool:
        return self.omega_or <= self.bound
