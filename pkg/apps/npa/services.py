import dataclasses
import math
import time
from concurrent.futures import ProcessPoolExecutor

import cvxpy as cp
import numpy as np
import structlog
from django.core.cache import cache

from apps.core.exceptions import CapacityError, InputRangeError, SolverInconclusive
from apps.core.utils import ResultHasher, engine_setting
from apps.games.models import GraphGame
from apps.graphs.models import Graph
from apps.graphs.services import TreeFamilyService
from apps.ncpoly.models import Word, canonical_word
from apps.ncpoly.services import CHSH_SIGNS
from apps.npa.models import FeasibilityResult, MomentProblem, Scenario, SdpSolution, real_moment_key
from apps.quantum.models import PureState, QuantumStrategy

logger = structlog.get_logger(__name__)

FALLBACK_SOLVERS = ("CLARABEL", "SCS")
SOLVER_OPTIONS = {
    "CLARABEL": lambda tol: {"tol_gap_abs": tol, "tol_gap_rel": tol, "tol_feas": tol, "max_iter": 500},
    "SCS": lambda tol: {"eps_abs": tol, "eps_rel": tol, "max_iters": 200_000},
}
GAP_LIMIT_FACTOR = 1e3
RESIDUAL_FACTOR = 10
CERTIFYING_LEVELS = ("1", "1+edge-pairs", "2", "3")


def _symmetric_units(size: int, rows: np.ndarray, cols: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Sum of values[k] * E_k where <E_k, X> = X[rows[k], cols[k]] for symmetric X."""
    matrix = np.zeros((size, size))
    half = np.asarray(values, dtype=float) / 2
    np.add.at(matrix, (rows, cols), half)
    np.add.at(matrix, (cols, rows), half)
    return matrix


def _dual_vector(constraint, length: int) -> np.ndarray:
    """Multipliers of an equality constraint; zeros when the solver reports none."""
    if constraint is None or constraint.dual_value is None:
        return np.zeros(length)
    return np.asarray(constraint.dual_value, dtype=float).reshape(-1)


class MomentProblemBuilder:
    """Monomial sets, moment classes and objectives."""

    # ------------------------------------------------------------------
    # Monomials
    # ------------------------------------------------------------------

    @staticmethod
    def words(scenario: Scenario, max_size: int | None = None) -> list[Word]:
        """
        Canonical words of length <= depth, shortest first, plus (for
        "+edge-pairs") every U_x V_y with uv an edge.
        """
        max_size = engine_setting("NPA_MAX_MATRIX", max_size)
        letters = [(p, s) for p in range(scenario.num_parties) for s in range(scenario.num_settings)]
        words: list[Word] = [()]
        layer: list[Word] = [()]
        for length in range(1, scenario.depth + 1):
            grown = {canonical_word(w + (letter,)) for w in layer for letter in letters}
            layer = sorted(w for w in grown if len(w) == length)
            words.extend(layer)
            if len(words) > max_size:
                raise CapacityError(
                    f"Level {scenario.level} needs more than {max_size} monomials "
                    f"for {scenario.num_parties} parties."
                )

        if scenario.edge_pairs:
            present = set(words)
            pairs = {
                canonical_word(((u, x), (v, y)))
                for u, v in scenario.edges
                for x in range(scenario.num_settings)
                for y in range(scenario.num_settings)
            }
            words.extend(sorted(pairs - present))
        if len(words) > max_size:
            raise CapacityError(f"Moment matrix of side {len(words)} exceeds the cap {max_size}.")
        return words

    @staticmethod
    def build(
        scenario: Scenario,
        objective: dict[Word, float],
        constant: float = 0.0,
        max_size: int | None = None,
    ) -> MomentProblem:
        words = MomentProblemBuilder.words(scenario, max_size)
        positions: dict[Word, list[tuple[int, int]]] = {}
        for i, left in enumerate(words):
            adjoint = left[::-1]
            for j in range(i, len(words)):
                positions.setdefault(real_moment_key(adjoint + words[j]), []).append((i, j))

        class_keys = tuple(positions)
        key_index = {key: k for k, key in enumerate(class_keys)}
        reps = np.array([cells[0] for cells in positions.values()])
        members = [(i, j, k) for k, cells in enumerate(positions.values()) for i, j in cells[1:]]
        members = np.array(members, dtype=int).reshape(-1, 3)

        coefficients = np.zeros(len(class_keys))
        for word, value in objective.items():
            key = real_moment_key(word)
            if key not in key_index:
                raise InputRangeError(f"Level {scenario.level} has no moment for the objective word {word}.")
            coefficients[key_index[key]] += value

        logger.debug("moment_problem_built", level=scenario.level, size=len(words), classes=len(class_keys))
        return MomentProblem(
            scenario=scenario,
            words=tuple(words),
            class_keys=class_keys,
            rep_rows=reps[:, 0],
            rep_cols=reps[:, 1],
            member_rows=members[:, 0],
            member_cols=members[:, 1],
            member_class=members[:, 2],
            objective=coefficients,
            constant=float(constant),
            key_index=key_index,
        )

    # ------------------------------------------------------------------
    # Objectives
    # ------------------------------------------------------------------

    @staticmethod
    def game_objective(graph_game: GraphGame) -> tuple[dict[Word, float], float]:
        """
        Edge-averaged winning probability in correlators:
        P(a, b | x, y) = (1 + s_a <U_x> + s_b <V_y> + s_a s_b <U_x V_y>) / 4, s = (+1, -1).
        """
        base = graph_game.base
        if not base.is_binary:
            raise InputRangeError(f"Moment relaxations need binary answers; {base.label!r} has {base.num_answers}.")
        probs = base.win_weights / base.denominator
        signs = np.array([1.0, -1.0])
        first = np.einsum("xyab,a->x", probs, signs) / 4
        second = np.einsum("xyab,b->y", probs, signs) / 4
        joint = np.einsum("xyab,a,b->xy", probs, signs, signs) / 4

        scale = 1 / len(graph_game.edges)
        objective: dict[Word, float] = {}
        for u, v in graph_game.edges:
            for x in range(base.num_questions):
                objective[((u, x),)] = objective.get(((u, x),), 0.0) + scale * first[x]
                objective[((v, x),)] = objective.get(((v, x),), 0.0) + scale * second[x]
                for y in range(base.num_questions):
                    word = ((u, x), (v, y))
                    objective[word] = objective.get(word, 0.0) + scale * joint[x, y]
        return objective, float(probs.sum() / 4)

    @staticmethod
    def bias_objective(edges) -> dict[Word, float]:
        """sum over edges of <U0 V0 + U0 V1 + U1 V0 - U1 V1>."""
        objective: dict[Word, float] = {}
        for u, v in edges:
            for (x, y), sign in CHSH_SIGNS.items():
                objective[((u, x), (v, y))] = objective.get(((u, x), (v, y)), 0.0) + sign
        return objective

    @staticmethod
    def build_moment_problem(graph_game: GraphGame, level: str, max_size: int | None = None) -> MomentProblem:
        objective, constant = MomentProblemBuilder.game_objective(graph_game)
        scenario = Scenario(
            num_parties=graph_game.num_players,
            num_settings=graph_game.base.num_questions,
            level=level,
            edges=tuple(graph_game.edges),
        )
        return MomentProblemBuilder.build(scenario, objective, constant, max_size)

    @staticmethod
    def bias_rows(problem: MomentProblem, edges) -> np.ndarray:
        """Row e maps the moment vector to <B_e>."""
        rows = np.zeros((len(edges), problem.num_classes))
        for e, (u, v) in enumerate(edges):
            for (x, y), sign in CHSH_SIGNS.items():
                rows[e, problem.moment_index(((u, x), (v, y)))] += sign
        return rows

    # ------------------------------------------------------------------
    # Explicit strategies
    # ------------------------------------------------------------------

    @staticmethod
    def moment_matrix_of_strategy(problem: MomentProblem, strategy: QuantumStrategy) -> np.ndarray:
        """Re <psi| w_i* w_j |psi>, mixed states via their eigen-decomposition."""
        scenario = problem.scenario
        state = strategy.state
        if state.num_players != scenario.num_parties or strategy.num_questions != scenario.num_settings:
            raise InputRangeError("Strategy does not match the moment problem's parties and settings.")
        observables = {
            (p, s): strategy.observable(p, s)
            for p in range(scenario.num_parties)
            for s in range(scenario.num_settings)
        }
        if isinstance(state, PureState):
            branches = [(1.0, state.vector)]
        else:
            weights, vectors = np.linalg.eigh(state.matrix)
            branches = [(w, vectors[:, k]) for k, w in enumerate(weights) if w > 1e-14]

        def apply(word: Word, vector: np.ndarray) -> np.ndarray:
            psi = vector.reshape(state.dims)
            for party, setting in reversed(word):
                psi = np.moveaxis(np.tensordot(observables[party, setting], psi, axes=([1], [party])), 0, party)
            return psi.reshape(-1)

        gamma = np.zeros((problem.size, problem.size))
        for weight, vector in branches:
            images = np.array([apply(word, vector) for word in problem.words])
            gamma += weight * (images.conj() @ images.T).real
        return gamma

    @staticmethod
    def class_residual(problem: MomentProblem, matrix: np.ndarray) -> float:
        """Largest violation of normalisation and class equalities."""
        residual = abs(matrix[0, 0] - 1)
        if len(problem.member_class):
            reps = matrix[problem.rep_rows[problem.member_class], problem.rep_cols[problem.member_class]]
            residual = max(residual, float(np.abs(matrix[problem.member_rows, problem.member_cols] - reps).max()))
        return float(residual)


class SdpService:
    """cvxpy formulation and certified bounds from the solver's multipliers."""

    @staticmethod
    def _moment_constraints(problem: MomentProblem, matrix: cp.Variable) -> tuple[cp.Constraint, cp.Constraint | None]:
        normalisation = matrix[0, 0] == 1
        classes = None
        if len(problem.member_class):
            cls = problem.member_class
            classes = (
                matrix[problem.member_rows, problem.member_cols]
                == matrix[problem.rep_rows[cls], problem.rep_cols[cls]]
            )
        return normalisation, classes

    @staticmethod
    def _tie_matrix(problem: MomentProblem, multipliers: np.ndarray) -> np.ndarray:
        """A* applied to the class-equality multipliers."""
        if not multipliers.size:
            return np.zeros((problem.size, problem.size))
        cls = problem.member_class
        return _symmetric_units(problem.size, problem.member_rows, problem.member_cols, multipliers) - _symmetric_units(
            problem.size, problem.rep_rows[cls], problem.rep_cols[cls], multipliers
        )

    @staticmethod
    def _run(cvx_problem: cp.Problem, solver: str, tol: float) -> str | None:
        candidates = [solver] + [name for name in FALLBACK_SOLVERS if name != solver]
        installed = set(cp.installed_solvers())
        for name in candidates:
            if name not in installed:
                continue
            options = SOLVER_OPTIONS.get(name, lambda _: {})(tol)
            try:
                cvx_problem.solve(solver=name, **options)
            except cp.error.SolverError as exc:
                logger.warning("sdp_solver_failed", solver=name, error=str(exc))
                continue
            if cvx_problem.status in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
                return name
            logger.warning("sdp_solver_status", solver=name, status=cvx_problem.status)
        return None

    # ------------------------------------------------------------------
    # Optimisation
    # ------------------------------------------------------------------

    @staticmethod
    def solve_sdp(problem: MomentProblem, tol: float | None = None, solver: str | None = None) -> SdpSolution:
        """
        Maximise the objective over moment matrices. The reported dual is
        constant + mu + min(n * lambda_max(M), sum |M_ij|) with
        M = C - A*(mu, nu), minimised over both sign conventions; every
        such value bounds the primal because the diagonal is fixed to 1.
        """
        tol = engine_setting("SDP_TOLERANCE", tol)
        solver = engine_setting("NPA_SOLVER", solver)
        if tol < 1e-9:
            raise InputRangeError(f"SDP tolerance {tol} is below 1e-9.")

        size = problem.size
        matrix = cp.Variable((size, size), symmetric=True)
        normalisation, classes = SdpService._moment_constraints(problem, matrix)
        constraints = [matrix >> 0, normalisation] + ([classes] if classes is not None else [])
        moments = matrix[problem.rep_rows, problem.rep_cols]
        cvx_problem = cp.Problem(cp.Maximize(problem.objective @ moments + problem.constant), constraints)

        started = time.perf_counter()
        used = SdpService._run(cvx_problem, solver, tol)
        if used is None:
            raise SolverInconclusive(f"No SDP solver produced a solution (last status: {cvx_problem.status}).")

        mu = float(_dual_vector(normalisation, 1)[0])
        objective_matrix = _symmetric_units(size, problem.rep_rows, problem.rep_cols, problem.objective)
        tie = SdpService._tie_matrix(problem, _dual_vector(classes, len(problem.member_class)))
        dual = np.inf
        for sign in (1.0, -1.0):
            reduced = objective_matrix - sign * tie
            reduced[0, 0] -= sign * mu
            slack = min(size * np.linalg.eigvalsh(reduced)[-1], np.abs(reduced).sum())
            dual = min(dual, problem.constant + sign * mu + slack)

        primal = float(cvx_problem.value)
        gap = float(dual - primal)
        optimal = cvx_problem.status == cp.OPTIMAL and gap <= max(GAP_LIMIT_FACTOR * tol, 1e-6)
        solution = SdpSolution(
            primal=primal,
            dual=float(dual),
            gap=gap,
            status="optimal" if optimal else "max-iterations",
            level=problem.scenario.level,
            size=size,
            solver=used,
        )
        logger.info(
            "sdp_solved",
            level=solution.level,
            size=size,
            status=solution.status,
            primal=primal,
            bound=solution.dual,
            seconds=round(time.perf_counter() - started, 3),
        )
        return solution

    @staticmethod
    def feasibility(
        problem: MomentProblem,
        bias_rows: np.ndarray,
        targets: np.ndarray,
        tol: float,
        feas_tol: float,
        solver: str,
    ) -> FeasibilityResult:
        """
        max t s.t. Gamma - t*I PSD, Gamma a moment matrix with bias_rows @ moments = targets.

        From multipliers y normalised to tr(A*y) = 1, with S = A*y and
        lam = lambda_min(S), any feasible t obeys t <= (y.b - lam*n)/(1 - lam*n)
        (t <= y.b when lam >= 0). A negative bound certifies infeasibility.
        """
        size = problem.size
        targets = np.asarray(targets, dtype=float)
        matrix = cp.Variable((size, size), symmetric=True)
        t = cp.Variable()
        normalisation, classes = SdpService._moment_constraints(problem, matrix)
        moments = matrix[problem.rep_rows, problem.rep_cols]
        biases = bias_rows @ moments == targets
        constraints = [matrix - t * np.eye(size) >> 0, normalisation, biases]
        if classes is not None:
            constraints.append(classes)
        cvx_problem = cp.Problem(cp.Maximize(t), constraints)

        used = SdpService._run(cvx_problem, solver, tol)
        if used is None:
            return FeasibilityResult("inconclusive", math.nan, math.inf, math.inf, problem.scenario.level, size)

        mu = float(_dual_vector(normalisation, 1)[0])
        beta = _dual_vector(biases, len(targets))
        applied = SdpService._tie_matrix(problem, _dual_vector(classes, len(problem.member_class))) + _symmetric_units(
            size, problem.rep_rows, problem.rep_cols, beta @ bias_rows
        )
        applied[0, 0] += mu
        y_dot_b = mu + float(beta @ targets)

        certified = 1.0
        for sign in (1.0, -1.0):
            trace = sign * np.trace(applied)
            if trace <= 0:
                continue
            lam = np.linalg.eigvalsh(sign * applied / trace)[0]
            value = sign * y_dot_b / trace
            bound = value if lam >= 0 else (value - lam * size) / (1 - lam * size)
            certified = min(certified, bound)

        gamma = np.asarray(matrix.value)
        residual = max(
            MomentProblemBuilder.class_residual(problem, gamma),
            float(np.abs(bias_rows @ gamma[problem.rep_rows, problem.rep_cols] - targets).max(initial=0.0)),
        )
        t_primal = float(t.value)
        if certified < -feas_tol:
            verdict = "infeasible"
        elif t_primal >= -feas_tol and residual <= RESIDUAL_FACTOR * feas_tol:
            verdict = "feasible"
        else:
            verdict = "inconclusive"
        return FeasibilityResult(verdict, t_primal, float(certified), residual, problem.scenario.level, size)


def _scan_point(task: tuple) -> FeasibilityResult:
    problem, rows, targets, tol, feas_tol, solver = task
    return SdpService.feasibility(problem, rows, targets, tol, feas_tol, solver)


class NpaBoundService:
    """Quantum upper bounds, bias relations and region scans."""

    # ------------------------------------------------------------------
    # Game bounds
    # ------------------------------------------------------------------

    @staticmethod
    def _cache_key(graph_game: GraphGame, level: str, tol: float, solver: str) -> str:
        graph = graph_game.graph
        shape = TreeFamilyService.tree_canonical_form(graph) if graph.is_tree() else graph.sorted_edges
        base = graph_game.base
        payload = {
            "predicate": base.predicate.astype(int).tolist(),
            "weights": base.weights.tolist(),
            "graph": shape,
            "level": level,
            "tol": tol,
            "solver": solver,
        }
        return f"npa:bound:{ResultHasher.generate_hash(payload)}"

    @staticmethod
    def quantum_bound(
        graph_game: GraphGame,
        level: str | None = None,
        tol: float | None = None,
        solver: str | None = None,
        use_cache: bool = True,
    ) -> SdpSolution:
        level = engine_setting("NPA_DEFAULT_LEVEL", level)
        tol = engine_setting("SDP_TOLERANCE", tol)
        solver = engine_setting("NPA_SOLVER", solver)
        key = NpaBoundService._cache_key(graph_game, level, tol, solver)
        if use_cache:
            cached = cache.get(key)
            if cached is not None:
                logger.debug("npa_cache_hit", game=graph_game.label(), level=level)
                return SdpSolution(**cached)

        problem = MomentProblemBuilder.build_moment_problem(graph_game, level)
        solution = SdpService.solve_sdp(problem, tol, solver)
        if use_cache:
            cache.set(key, dataclasses.asdict(solution), timeout=engine_setting("RESULT_CACHE_TIMEOUT"))
        return solution

    @staticmethod
    def quantum_upper_bound(graph_game: GraphGame, level: str | None = None, tol: float | None = None) -> float:
        return NpaBoundService.quantum_bound(graph_game, level, tol).dual

    @staticmethod
    def lowest_certifying_level(
        graph_game: GraphGame,
        target: float,
        tolerance: float | None = None,
        levels=CERTIFYING_LEVELS,
        tol: float | None = None,
        solver: str | None = None,
    ) -> SdpSolution:
        """
        First level (in `levels` order) whose bound is within `tolerance` of
        `target`; the last level that fits the size cap otherwise.
        """
        tolerance = engine_setting("ADVANTAGE_TOLERANCE", tolerance)
        best = None
        for level in levels:
            try:
                solution = NpaBoundService.quantum_bound(graph_game, level, tol, solver)
            except CapacityError:
                logger.info("npa_level_skipped", game=graph_game.label(), level=level)
                break
            best = solution
            if solution.dual <= target + tolerance:
                break
        if best is None:
            raise CapacityError(f"No NPA level fits the size cap for {graph_game.label()}.")
        return best

    # ------------------------------------------------------------------
    # Bias relations
    # ------------------------------------------------------------------

    @staticmethod
    def bias_sum_bound(
        graph: Graph,
        level: str | None = None,
        tol: float | None = None,
        solver: str | None = None,
    ) -> SdpSolution:
        """Certified maximum of sum_e <B_e> over the CHSH scenario on `graph`."""
        graph.require_simple_connected(min_vertices=2)
        scenario = Scenario(graph.num_vertices, 2, engine_setting("NPA_DEFAULT_LEVEL", level), tuple(graph.sorted_edges))
        problem = MomentProblemBuilder.build(scenario, MomentProblemBuilder.bias_objective(graph.sorted_edges))
        return SdpService.solve_sdp(problem, tol, solver)

    @staticmethod
    def quadratic_chain_bound(biases) -> dict:
        """
        Along a path with edge biases b_1..b_k, the pairwise relations
        b_i^2 + b_{i+1}^2 <= 8 give sum b_i <= sqrt(8 (k-1) * sum 1/w_i) by
        Cauchy-Schwarz, w_i counting the pairs that contain edge i.
        """
        biases = [float(b) for b in biases]
        k = len(biases)
        if k == 0:
            raise InputRangeError("At least one edge bias is required.")
        if k == 1:
            bound = math.sqrt(8)
        else:
            multiplicity = [1] + [2] * (k - 2) + [1]
            bound = math.sqrt(8 * (k - 1) * sum(1 / w for w in multiplicity))
        pairs_ok = all(a * a + b * b <= 8 for a, b in zip(biases, biases[1:]))
        return {"sum": sum(biases), "pairs_ok": pairs_ok, "bound": bound, "within": sum(biases) <= bound}

    @staticmethod
    def _bias_problem(graph: Graph, level: str) -> tuple[MomentProblem, np.ndarray]:
        graph.require_simple_connected(min_vertices=2)
        scenario = Scenario(graph.num_vertices, 2, level, tuple(graph.sorted_edges))
        problem = MomentProblemBuilder.build(scenario, {})
        return problem, MomentProblemBuilder.bias_rows(problem, graph.sorted_edges)

    @staticmethod
    def bias_point_feasible(
        graph: Graph,
        target_biases,
        level: str | None = None,
        tol: float | None = None,
        feas_tol: float | None = None,
        solver: str | None = None,
    ) -> FeasibilityResult:
        """target_biases: one value per edge in sorted edge order, or an edge -> value map."""
        level = engine_setting("NPA_DEFAULT_LEVEL", level)
        tol = engine_setting("SDP_TOLERANCE", tol)
        feas_tol = engine_setting("FEASIBILITY_TOLERANCE", feas_tol)
        solver = engine_setting("NPA_SOLVER", solver)
        edges = graph.sorted_edges
        if isinstance(target_biases, dict):
            targets = [float(target_biases[e]) for e in edges]
        else:
            targets = [float(b) for b in target_biases]
        if len(targets) != len(edges):
            raise InputRangeError(f"{len(targets)} biases given for {len(edges)} edges.")

        problem, rows = NpaBoundService._bias_problem(graph, level)
        result = SdpService.feasibility(problem, rows, np.array(targets), tol, feas_tol, solver)
        logger.info("bias_point_checked", graph=graph.label(), verdict=result.verdict, t=result.t_primal)
        return result

    # ------------------------------------------------------------------
    # Region scans
    # ------------------------------------------------------------------

    @staticmethod
    def slice_targets(graph: Graph, x: float, y: float) -> list[float]:
        """Sorted edges alternate x, y, x, ... (AB = CD = EF = x, BC = DE = y on P6)."""
        return [x if index % 2 == 0 else y for index in range(graph.num_edges)]

    @staticmethod
    def scan_region(
        graph: Graph,
        xs,
        ys,
        level: str | None = None,
        workers: int | None = None,
        tol: float | None = None,
        feas_tol: float | None = None,
        solver: str | None = None,
        max_points: int | None = None,
    ) -> list[dict]:
        """
        One row per grid point: x, y, npa_feasible, inside_quadratic
        (x^2 + y^2 <= 8) and inside_linear (n_x x + n_y y <= 2|E|).
        """
        level = engine_setting("NPA_DEFAULT_LEVEL", level)
        workers = engine_setting("SCAN_WORKERS", workers)
        tol = engine_setting("SDP_TOLERANCE", tol)
        feas_tol = engine_setting("FEASIBILITY_TOLERANCE", feas_tol)
        solver = engine_setting("NPA_SOLVER", solver)
        max_points = engine_setting("SCAN_MAX_POINTS", max_points)
        points = [(float(x), float(y)) for x in xs for y in ys]
        if len(points) > max_points:
            raise CapacityError(f"Grid has {len(points)} points; cap is {max_points}.")

        problem, rows = NpaBoundService._bias_problem(graph, level)
        tasks = [
            (problem, rows, np.array(NpaBoundService.slice_targets(graph, x, y)), tol, feas_tol, solver)
            for x, y in points
        ]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_scan_point, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
        else:
            results = []
            for index, task in enumerate(tasks, start=1):
                results.append(_scan_point(task))
                if index % max(1, len(tasks) // 10) == 0:
                    logger.info("scan_progress", done=index, total=len(tasks))

        n_x = (graph.num_edges + 1) // 2
        n_y = graph.num_edges // 2
        return [
            {
                "x": x,
                "y": y,
                "npa_feasible": result.verdict,
                "inside_quadratic": x * x + y * y <= 8,
                "inside_linear": n_x * x + n_y * y <= 2 * graph.num_edges,
            }
            for (x, y), result in zip(points, results)
        ]
