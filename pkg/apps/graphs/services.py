import itertools
import json
import re
from fractions import Fraction
from pathlib import Path

import networkx as nx
import numpy as np
import structlog
from scipy.optimize import linprog

from apps.core.exceptions import CapacityError, GraphError, InputRangeError, ParseError
from apps.core.utils import engine_setting
from apps.graphs.models import Edge, Graph, Matching, P3Decomposition, P3Key

logger = structlog.get_logger(__name__)

GRAPH_NAME_PATTERN = re.compile(
    r"^(?:P(?P<path>\d+)|C(?P<cycle>\d+)|star-(?P<legs>\d+(?:,\d+)*)|T(?P<k>\d+):(?P<index>\d+))$"
)


def _key(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class GraphFactory:
    """Named graph families and graph input resolution."""

    # ------------------------------------------------------------------
    # Families
    # ------------------------------------------------------------------

    @staticmethod
    def path(n: int) -> Graph:
        if n < 1:
            raise ParseError("Paths need at least one vertex.")
        return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)], name=f"P{n}")

    @staticmethod
    def cycle(n: int) -> Graph:
        if n < 3:
            raise ParseError("Cycles need at least three vertices.")
        return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)], name=f"C{n}")

    @staticmethod
    def star(legs: list[int]) -> Graph:
        """Spider: paths of the given lengths hanging from hub 0."""
        if not legs or any(length < 1 for length in legs):
            raise ParseError("Star legs must be positive lengths.")
        edges, nxt = [], 1
        for length in legs:
            prev = 0
            for _ in range(length):
                edges.append((prev, nxt))
                prev, nxt = nxt, nxt + 1
        return Graph.from_edges(nxt, edges, name="star-" + ",".join(map(str, legs)))

    @staticmethod
    def named_graph(name: str) -> Graph:
        """Resolve Pn | Cn | star-a,b,c | Tk:i (i indexes enumerate_Tk(k) from 0)."""
        match = GRAPH_NAME_PATTERN.match(name.strip())
        if not match:
            raise ParseError(f"Unknown graph name {name!r}.")
        if match["path"]:
            return GraphFactory.path(int(match["path"]))
        if match["cycle"]:
            return GraphFactory.cycle(int(match["cycle"]))
        if match["legs"]:
            return GraphFactory.star([int(part) for part in match["legs"].split(",")])
        members = TreeFamilyService.enumerate_Tk(int(match["k"]))
        index = int(match["index"])
        if index >= len(members):
            raise ParseError(f"T{match['k']} has {len(members)} members; index {index} is out of range.")
        return members[index]

    @staticmethod
    def resolve(spec: str) -> Graph:
        """Accept a graph name, a Graph JSON file, or a plain "i j" edge-list file ("file:" prefix optional)."""
        from apps.graphs.serializers import GraphSerializer

        path_text = spec[len("file:"):] if spec.startswith("file:") else spec
        path = Path(path_text)
        if not spec.startswith("file:") and not path.suffix:
            return GraphFactory.named_graph(spec)
        if not path.exists():
            raise InputRangeError(f"Graph file not found: {path}")
        text = path.read_text()
        if path.suffix == ".json":
            try:
                return GraphSerializer.to_graph(json.loads(text), name=path.stem)
            except json.JSONDecodeError as exc:
                raise InputRangeError(f"Malformed graph file {path}: {exc}") from exc
        return GraphSerializer.parse_edge_list(text, name=path.stem)

    # ------------------------------------------------------------------
    # Exhaustive generation
    # ------------------------------------------------------------------

    @staticmethod
    def connected_graphs(num_vertices: int) -> list[Graph]:
        """
        All connected simple graphs on num_vertices vertices, up to isomorphism.

        Up to 7 vertices this reads the graph atlas. For 8 vertices every
        connected graph has a non-cut vertex, so extending each connected
        7-vertex graph by one vertex joined to a non-empty neighbour set
        reaches all of them; duplicates are removed by WL hash and an exact
        isomorphism test inside each hash bucket.
        """
        if num_vertices < 1:
            raise InputRangeError("num_vertices must be positive.")
        if num_vertices <= 7:
            return [
                Graph.from_networkx(g)
                for g in nx.graph_atlas_g()
                if g.number_of_nodes() == num_vertices and nx.is_connected(g)
            ]
        if num_vertices > 8:
            raise CapacityError("Exhaustive connected-graph generation is limited to 8 vertices.")

        buckets: dict[str, list[nx.Graph]] = {}
        for base in GraphFactory.connected_graphs(7):
            g0 = base.to_networkx()
            for r in range(1, 8):
                for neighbours in itertools.combinations(range(7), r):
                    g = g0.copy()
                    g.add_edges_from((7, v) for v in neighbours)
                    digest = nx.weisfeiler_lehman_graph_hash(g, iterations=4)
                    bucket = buckets.setdefault(digest, [])
                    if not any(nx.is_isomorphic(g, other) for other in bucket):
                        bucket.append(g)
        graphs = [Graph.from_networkx(g) for bucket in buckets.values() for g in bucket]
        logger.info("connected_graphs_generated", num_vertices=num_vertices, count=len(graphs))
        return graphs

    @staticmethod
    def friendly_name(graph: Graph) -> str | None:
        """P<n> for paths, star-a,b,c for spiders, None for any other graph."""
        if graph.is_tree():
            degrees = sorted(graph.degree(v) for v in range(graph.num_vertices))
            if graph.num_vertices <= 2 or degrees[-1] <= 2:
                return f"P{graph.num_vertices}"
            hubs = [v for v in range(graph.num_vertices) if graph.degree(v) >= 3]
            if len(hubs) == 1:
                g = graph.to_networkx()
                lengths = nx.single_source_shortest_path_length(g, hubs[0])
                leaves = [v for v in range(graph.num_vertices) if graph.degree(v) == 1]
                return "star-" + ",".join(str(lengths[v]) for v in sorted(leaves, key=lambda v: lengths[v]))
        return None


class TreeFamilyService:
    """The T_k family: trees built from k disjoint P2 copies joined by k-1 edges."""

    @staticmethod
    def tree_canonical_form(tree: Graph) -> str:
        """AHU parenthesis encoding rooted at the centre (minimum over both centres)."""
        if not tree.is_tree():
            raise GraphError(f"{tree.label()} is not a tree.")
        adjacency = tree.adjacency

        def encode(v: int, parent: int) -> str:
            return "(" + "".join(sorted(encode(c, v) for c in adjacency[v] if c != parent)) + ")"

        return min(encode(c, -1) for c in nx.center(tree.to_networkx()))

    @staticmethod
    def is_in_some_Tk(graph: Graph) -> bool:
        """
        True iff graph is a tree on 2k vertices (k >= 1) with a perfect
        matching. Contracting the matching gives the joining tree on k copies.
        """
        if graph.num_vertices < 2 or graph.num_vertices % 2 or not graph.is_tree():
            return False
        return TreeFamilyService._tree_perfect_matching(graph) is not None

    @staticmethod
    def _tree_perfect_matching(tree: Graph) -> list[Edge] | None:
        """Greedy leaf matching; a tree has at most one perfect matching."""
        neighbours = {v: set(n) for v, n in enumerate(tree.adjacency)}
        matching: list[Edge] = []
        while neighbours:
            leaf = next((v for v, n in neighbours.items() if len(n) <= 1), None)
            if leaf is None or not neighbours[leaf]:
                return None
            partner = next(iter(neighbours[leaf]))
            matching.append(_key(leaf, partner))
            for v in (leaf, partner):
                for w in neighbours.pop(v):
                    if w in neighbours:
                        neighbours[w].discard(v)
        return matching

    @staticmethod
    def enumerate_Tk(k: int, max_k: int | None = None) -> list[Graph]:
        """
        All members of T_k up to isomorphism, sorted by canonical form.

        Each joining tree on k super-vertices is expanded by choosing, for each
        joining edge, which endpoint of the two P2 copies it attaches to.
        """
        max_k = engine_setting("TK_MAX_K", max_k)
        if k < 2:
            raise InputRangeError(f"T_k is enumerated for k >= 2, got {k}.")
        if k > max_k:
            raise CapacityError(f"k={k} exceeds the T_k enumeration cap {max_k}.")

        found: dict[str, list[Edge]] = {}
        for joining in nx.nonisomorphic_trees(k):
            joins = sorted(_key(u, v) for u, v in joining.edges)
            for ends in itertools.product(range(4), repeat=len(joins)):
                edges = [(2 * i, 2 * i + 1) for i in range(k)]
                edges += [(2 * i + (e & 1), 2 * j + (e >> 1)) for (i, j), e in zip(joins, ends)]
                tree = Graph.from_edges(2 * k, edges)
                found.setdefault(TreeFamilyService.tree_canonical_form(tree), edges)

        members = []
        for index, code in enumerate(sorted(found)):
            tree = Graph.from_edges(2 * k, found[code])
            name = GraphFactory.friendly_name(tree) or f"T{k}:{index}"
            members.append(Graph(tree.num_vertices, tree.edges, tree.loops, name=name))
        logger.debug("tk_enumerated", k=k, count=len(members))
        return members

    @staticmethod
    def peel_tk(graph: Graph) -> tuple[Graph, P3Key]:
        """
        Remove one pendant P2 copy and its joining edge from a member of
        T_{k+1}. Returns the remaining T_k member (relabelled 0..2k-1) and the
        removed P3 as (center, (leaf, leaf)) in the input's labels.
        """
        if graph.num_vertices < 4 or not TreeFamilyService.is_in_some_Tk(graph):
            raise GraphError(f"{graph.label()} is not a member of T_k for k >= 2.")
        matching = TreeFamilyService._tree_perfect_matching(graph)
        adjacency = graph.adjacency
        for u, v in sorted(matching):
            for outer, inner in ((u, v), (v, u)):
                # copy {u, v} is pendant when only `inner` has outside neighbours, and exactly one
                outside = adjacency[inner] - {outer}
                if len(adjacency[outer]) == 1 and len(outside) == 1:
                    joint = next(iter(outside))
                    keep = [w for w in range(graph.num_vertices) if w not in (u, v)]
                    relabel = {w: i for i, w in enumerate(keep)}
                    rest = Graph.from_edges(
                        len(keep),
                        [(relabel[a], relabel[b]) for a, b in graph.edges if a in relabel and b in relabel],
                    )
                    return rest, (inner, _key(outer, joint))
        raise GraphError("No pendant P2 copy found.")  # unreachable for trees


class MatchingService:
    """Line graphs, fractional perfect matchings and fractional P3-decompositions."""

    # ------------------------------------------------------------------
    # Line graph
    # ------------------------------------------------------------------

    @staticmethod
    def line_graph(graph: Graph) -> Graph:
        """Vertex i of L(H) is graph.sorted_edges[i]."""
        if graph.loops:
            raise GraphError(f"{graph.label()} has loops; line graphs need a loop-free graph.")
        edges = graph.sorted_edges
        index = {e: i for i, e in enumerate(edges)}
        line = nx.line_graph(graph.to_networkx())
        return Graph.from_edges(
            len(edges),
            [(index[_key(*e)], index[_key(*f)]) for e, f in line.edges],
            name=f"L({graph.label()})",
        )

    # ------------------------------------------------------------------
    # Fractional perfect matching
    # ------------------------------------------------------------------

    @staticmethod
    def fractional_perfect_matching(graph: Graph) -> Matching | None:
        """
        Exact fractional perfect matching or None.

        The feasibility LP is solved with the HiGHS dual simplex; its basic
        solutions are half-integral, so weights are snapped to halves and
        checked exactly. If the LP answer cannot be confirmed, a perfect
        matching of the bipartite double cover decides exactly and supplies
        a half-integral solution.
        """
        if graph.loops:
            raise GraphError(f"{graph.label()} has loops.")
        edges = graph.sorted_edges
        n = graph.num_vertices
        if n == 0:
            return Matching(weights={})
        if not edges:
            return None

        a_eq = np.zeros((n, len(edges)))
        for j, (u, v) in enumerate(edges):
            a_eq[u, j] = a_eq[v, j] = 1
        result = linprog(
            c=np.zeros(len(edges)),
            A_eq=a_eq,
            b_eq=np.ones(n),
            bounds=(0, 1),
            method="highs-ds",
        )
        if result.status == 0:
            weights = {e: Fraction(round(2 * x), 2) for e, x in zip(edges, result.x)}
            candidate = Matching(weights=weights)
            if candidate.is_valid(n):
                return candidate
            logger.warning("lp_snap_failed", graph=graph.label())

        exact = MatchingService._double_cover_matching(graph)
        if (exact is None) != (result.status != 0):
            logger.warning("lp_status_overruled", graph=graph.label(), lp_status=result.status)
        return exact

    @staticmethod
    def _double_cover_matching(graph: Graph) -> Matching | None:
        """H has a fractional perfect matching iff its bipartite double cover has a perfect matching."""
        cover = nx.Graph()
        left = [("L", v) for v in range(graph.num_vertices)]
        cover.add_nodes_from(left, bipartite=0)
        cover.add_nodes_from((("R", v) for v in range(graph.num_vertices)), bipartite=1)
        for u, v in graph.edges:
            cover.add_edge(("L", u), ("R", v))
            cover.add_edge(("L", v), ("R", u))
        mate = nx.bipartite.hopcroft_karp_matching(cover, top_nodes=left)
        if len(mate) != 2 * graph.num_vertices:
            return None
        weights = {e: Fraction(0) for e in graph.edges}
        for u in range(graph.num_vertices):
            weights[_key(u, mate[("L", u)][1])] += Fraction(1, 2)
        return Matching(weights=weights)

    # ------------------------------------------------------------------
    # Fractional P3-decomposition
    # ------------------------------------------------------------------

    @staticmethod
    def p3_subgraphs(graph: Graph) -> list[P3Key]:
        return [
            (center, (a, b))
            for center in range(graph.num_vertices)
            for a, b in itertools.combinations(sorted(graph.adjacency[center]), 2)
        ]

    @staticmethod
    def fractional_p3_decomposition(graph: Graph) -> P3Decomposition | None:
        """
        Pull a fractional perfect matching of L(H) back to P3 subgraphs of H:
        an edge of L(H) is a pair of edges of H sharing a centre vertex.
        Every P3 subgraph of H appears in the result, zero weights included.
        """
        graph.require_simple_connected()
        if graph.num_edges == 0:
            raise GraphError(f"{graph.label()} has no edges to decompose.")
        line = MatchingService.line_graph(graph)
        matching = MatchingService.fractional_perfect_matching(line)
        if matching is None:
            logger.debug("p3_decomposition_absent", graph=graph.label())
            return None

        edges = graph.sorted_edges
        weights: dict[P3Key, Fraction] = {}
        for (i, j), w in matching.weights.items():
            e, f = edges[i], edges[j]
            center = (set(e) & set(f)).pop()
            a = e[0] if e[1] == center else e[1]
            b = f[0] if f[1] == center else f[1]
            weights[(center, _key(a, b))] = w
        decomposition = P3Decomposition(weights=dict(sorted(weights.items())))
        if not decomposition.is_valid(graph):
            raise GraphError(f"P3-decomposition of {graph.label()} failed its edge-sum check.")
        return decomposition

    @staticmethod
    def p3_covering_bound(graph: Graph, edge_values: dict[Edge, float]) -> dict:
        """
        Rewrite the edge average of per-edge values as a convex combination of
        P3-copy averages. The combination weights are 2 w_f / |E|; the edge
        average can therefore never exceed the best P3 copy.
        """
        decomposition = MatchingService.fractional_p3_decomposition(graph)
        if decomposition is None:
            raise GraphError(f"{graph.label()} has no fractional P3-decomposition.")
        m = graph.num_edges
        copies = {}
        for (center, (a, b)), w in decomposition.weights.items():
            copy_value = (edge_values[_key(center, a)] + edge_values[_key(center, b)]) / 2
            copies[(center, (a, b))] = (2 * w / m, copy_value)
        return {
            "edge_average": sum(edge_values[e] for e in graph.edges) / m,
            "mixture": sum(float(weight) * value for weight, value in copies.values()),
            "mixture_weights": {key: weight for key, (weight, _) in copies.items()},
            "bound": max(value for weight, value in copies.values() if weight > 0),
        }


class HomomorphismService:
    @staticmethod
    def homomorphism_exists(source: Graph, target: Graph) -> bool:
        """
        Is there a vertex map sending every edge of source to an edge or loop
        of target (and every loop of source to a loop)? Backtracking in BFS
        order from the highest-degree vertex, candidates restricted to common
        neighbours of the already-placed neighbours' images.
        """
        if source.num_vertices == 0 or target.loops:
            return True
        if target.num_vertices == 0 or source.loops:
            return False

        order: list[int] = []
        g = source.to_networkx()
        for component in nx.connected_components(g):
            root = max(component, key=lambda v: (source.degree(v), -v))
            order.extend(nx.bfs_tree(g, root).nodes)

        image: dict[int, int] = {}
        target_adj = target.adjacency

        def candidates(v: int) -> list[int]:
            placed = [image[w] for w in source.adjacency[v] if w in image]
            if not placed:
                pool = range(target.num_vertices)
                return [t for t in pool if not source.adjacency[v] or target_adj[t]]
            common = set(target_adj[placed[0]])
            for t in placed[1:]:
                common &= target_adj[t]
            return sorted(common)

        def extend(position: int) -> bool:
            if position == len(order):
                return True
            v = order[position]
            for t in candidates(v):
                image[v] = t
                if extend(position + 1):
                    return True
                del image[v]
            return False

        return extend(0)
