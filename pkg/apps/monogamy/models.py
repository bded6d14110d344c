from dataclasses import dataclass, field
from fractions import Fraction

from apps.classical.models import OrBoundReport


@dataclass(frozen=True)
class GraphEntry:
    """What the report knows about one examined graph H."""

    name: str
    num_vertices: int
    num_edges: int
    omega_graph: Fraction
    bound: float | None
    level: str | None
    status: str
    hom_exists: bool
    has_p3_decomposition: bool
    in_some_tk: bool
    advantage: bool | None


@dataclass(frozen=True)
class MonogamyReport:
    """
    classification is "monogamous", "advantage-on: [..]" or "inconclusive".
    "monogamous" requires P3 and P4 bounds within tolerance of the classical
    value and both paths mapping into the strategy graph.
    """

    game: str
    omega_classical: Fraction
    max_k: int
    entries: tuple[GraphEntry, ...]
    classification: str
    conclusion: str
    notes: tuple[str, ...] = ()

    def entry(self, name: str) -> GraphEntry | None:
        return next((e for e in self.entries if e.name == name), None)

    @property
    def advantage_graphs(self) -> list[str]:
        return [e.name for e in self.entries if e.advantage]


@dataclass(frozen=True)
class PolygamyReport:
    game: str
    edge_values: dict[tuple[int, int], float]
    instance_values: dict[str, dict[tuple[int, int], float]]
    omega_base: Fraction
    omega_cited: Fraction
    or_checks: tuple[OrBoundReport, ...] = field(default_factory=tuple)
    seed: int = 0

    @property
    def flagged(self) -> bool:
        return self.omega_base != self.omega_cited

    @property
    def or_bound_holds(self) -> bool:
        return all(check.holds for check in self.or_checks)
