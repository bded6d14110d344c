"""
Immutable graph types used across the engine.

Vertices are 0..n-1. Edges are stored as sorted pairs, self-loops separately,
so a Graph can carry a strategy graph (loops allowed) as well as the simple
host graphs a game is played on.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import networkx as nx

from apps.core.exceptions import GraphError

Edge = tuple[int, int]
P3Key = tuple[int, tuple[int, int]]  # (center, (leaf_lo, leaf_hi))


@dataclass(frozen=True)
class Graph:
    num_vertices: int
    edges: frozenset[Edge] = field(default_factory=frozenset)
    loops: frozenset[int] = field(default_factory=frozenset)
    name: str = ""

    def __post_init__(self):
        if self.num_vertices < 0:
            raise GraphError("num_vertices must be non-negative.")
        normalized = set()
        for u, v in self.edges:
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise GraphError(f"Edge ({u}, {v}) has an endpoint out of range.")
            if u == v:
                raise GraphError(f"Edge ({u}, {v}) is a loop; list it under loops.")
            normalized.add((min(u, v), max(u, v)))
        for v in self.loops:
            if not 0 <= v < self.num_vertices:
                raise GraphError(f"Loop at {v} is out of range.")
        object.__setattr__(self, "edges", frozenset(normalized))
        object.__setattr__(self, "loops", frozenset(self.loops))

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def from_edges(cls, num_vertices: int, edges, loops=(), name: str = "") -> Graph:
        """Build from an iterable of pairs; duplicate edges are rejected."""
        edge_list = [(int(u), int(v)) for u, v in edges]
        keys = [(min(u, v), max(u, v)) for u, v in edge_list if u != v]
        if len(keys) != len(set(keys)):
            raise GraphError("Duplicate edges are not allowed.")
        loop_set = {int(v) for v in loops} | {u for u, v in edge_list if u == v}
        return cls(
            num_vertices=num_vertices,
            edges=frozenset((u, v) for u, v in edge_list if u != v),
            loops=frozenset(loop_set),
            name=name,
        )

    @classmethod
    def from_networkx(cls, g: nx.Graph, name: str = "") -> Graph:
        mapping = {node: i for i, node in enumerate(sorted(g.nodes))}
        edges = [(mapping[u], mapping[v]) for u, v in g.edges if u != v]
        loops = [mapping[u] for u, v in g.edges if u == v]
        return cls.from_edges(g.number_of_nodes(), edges, loops, name=name)

    # ------------------------------------------------------------------
    # Views
    # ------------------------------------------------------------------

    @cached_property
    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def is_simple(self) -> bool:
        return not self.loops

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        neighbours: list[set[int]] = [set() for _ in range(self.num_vertices)]
        for u, v in self.edges:
            neighbours[u].add(v)
            neighbours[v].add(u)
        return tuple(frozenset(n) for n in neighbours)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.num_vertices))
        g.add_edges_from(self.edges)
        g.add_edges_from((v, v) for v in self.loops)
        return g

    def is_connected(self) -> bool:
        return self.num_vertices > 0 and nx.is_connected(self.to_networkx())

    def is_tree(self) -> bool:
        return self.is_simple and self.num_vertices > 0 and nx.is_tree(self.to_networkx())

    def label(self) -> str:
        return self.name or f"graph[{self.num_vertices}v,{self.num_edges}e]"

    def require_simple_connected(self, min_vertices: int = 1) -> None:
        if self.loops:
            raise GraphError(f"{self.label()} carries loops; a simple graph is required.")
        if self.num_vertices < min_vertices:
            raise GraphError(f"{self.label()} needs at least {min_vertices} vertices.")
        if not self.is_connected():
            raise GraphError(f"{self.label()} is disconnected.")


@dataclass(frozen=True)
class Matching:
    """Fractional perfect matching: edge -> weight, each vertex covered with total weight 1."""

    weights: dict[Edge, Fraction]

    def vertex_sums(self, num_vertices: int) -> list[Fraction]:
        sums = [Fraction(0)] * num_vertices
        for (u, v), w in self.weights.items():
            sums[u] += w
            sums[v] += w
        return sums

    def is_valid(self, num_vertices: int) -> bool:
        in_range = all(0 <= w <= 1 for w in self.weights.values())
        return in_range and all(s == 1 for s in self.vertex_sums(num_vertices))


@dataclass(frozen=True)
class P3Decomposition:
    """Fractional P3-decomposition keyed by (center, (leaf, leaf))."""

    weights: dict[P3Key, Fraction]

    def edge_sums(self, graph: Graph) -> dict[Edge, Fraction]:
        sums = {e: Fraction(0) for e in graph.edges}
        for (center, (a, b)), w in self.weights.items():
            sums[(min(center, a), max(center, a))] += w
            sums[(min(center, b), max(center, b))] += w
        return sums

    def is_valid(self, graph: Graph) -> bool:
        in_range = all(0 <= w <= 1 for w in self.weights.values())
        return in_range and all(s == 1 for s in self.edge_sums(graph).values())
