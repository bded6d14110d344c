import json
from math import prod, sqrt
from pathlib import Path

import numpy as np
import structlog
from scipy.optimize import minimize

from apps.core.exceptions import InputRangeError, ParseError
from apps.games.models import Game, GraphGame
from apps.games.services import GameOperations, MAGIC_SQUARE_ROWS
from apps.graphs.services import GraphFactory
from apps.quantum.models import DensityMatrix, PureState, QuantumStrategy, State
from apps.quantum.serializers import StrategySerializer

logger = structlog.get_logger(__name__)

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

PERFECT_STRATEGY_TOL = 1e-9


def projectors_from_observable(observable: np.ndarray) -> np.ndarray:
    """(P_0, P_1) = ((1 + O) / 2, (1 - O) / 2) for a +-1-valued observable O."""
    identity = np.eye(observable.shape[0])
    return np.stack([(identity + observable) / 2, (identity - observable) / 2])


def binary_measurements(observables) -> np.ndarray:
    """Stack per-question observables into a (|I|, 2, d, d) measurement array."""
    return np.stack([projectors_from_observable(o) for o in observables])


def maximally_entangled(dim: int) -> PureState:
    """(1/sqrt d) sum_i |ii>."""
    return PureState(dims=(dim, dim), vector=np.eye(dim).reshape(-1) / sqrt(dim))


class LinearAlgebraService:
    """Partial traces, partial transposes and spectra."""

    @staticmethod
    def _validate_players(state: State, players, what: str) -> list[int]:
        chosen = sorted(set(players))
        if not chosen or any(not 0 <= p < state.num_players for p in chosen):
            raise InputRangeError(f"{what} must be a non-empty subset of players 0..{state.num_players - 1}.")
        return chosen

    @staticmethod
    def partial_trace(state: State, keep) -> DensityMatrix:
        """Reduced state on the kept players (in increasing player order)."""
        keep = LinearAlgebraService._validate_players(state, keep, "keep")
        dims = state.dims
        n = len(dims)
        drop = [p for p in range(n) if p not in keep]
        kept_dims = tuple(dims[p] for p in keep)
        d_keep = prod(kept_dims)

        if isinstance(state, PureState):
            psi = state.vector.reshape(dims).transpose(keep + drop).reshape(d_keep, -1)
            reduced = psi @ psi.conj().T
        else:
            tensor = state.matrix.reshape(dims + dims)
            current = n
            for p in sorted(drop, reverse=True):
                tensor = np.trace(tensor, axis1=p, axis2=p + current)
                current -= 1
            reduced = tensor.reshape(d_keep, d_keep)
        return DensityMatrix(kept_dims, (reduced + reduced.conj().T) / 2)

    @staticmethod
    def partial_transpose(state: DensityMatrix, side) -> np.ndarray:
        side = LinearAlgebraService._validate_players(state, side, "side")
        if len(side) == state.num_players:
            raise InputRangeError("The transposed side must be a proper subset of the players.")
        dims = state.dims
        n = len(dims)
        tensor = state.matrix.reshape(dims + dims)
        for p in side:
            tensor = np.swapaxes(tensor, p, p + n)
        total = prod(dims)
        return tensor.reshape(total, total)

    @staticmethod
    def hermitian_eigenvalues(matrix) -> np.ndarray:
        """All eigenvalues of a Hermitian matrix in ascending order."""
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise InputRangeError("Eigenvalues need a square matrix.")
        if np.abs(matrix - matrix.conj().T).max(initial=0) > 1e-10:
            raise InputRangeError("Matrix is not Hermitian within 1e-10.")
        return np.linalg.eigvalsh(matrix)

    @staticmethod
    def ppt_min_eigenvalue(state: DensityMatrix, side) -> float:
        """Smallest eigenvalue of the partial transpose over `side`; negative means entangled."""
        transposed = LinearAlgebraService.partial_transpose(state, side)
        return float(LinearAlgebraService.hermitian_eigenvalues(transposed)[0])

    @staticmethod
    def swap_operator(dims, *transpositions: tuple[int, int]) -> np.ndarray:
        """
        Permutation operator exchanging the listed pairs of tensor factors,
        applied right to left: swap_operator(d, s, t) = (s)(t).
        """
        dims = tuple(dims)
        total = prod(dims)
        result = np.eye(total)
        for i, j in reversed(transpositions):
            if dims[i] != dims[j]:
                raise InputRangeError(f"Cannot swap factors of dimensions {dims[i]} and {dims[j]}.")
            swap = np.swapaxes(np.eye(total).reshape(dims + dims), i, j).reshape(total, total)
            result = swap @ result
        return result


class StrategyEvaluator:
    """Born-rule evaluation of explicit strategies on graph games."""

    @staticmethod
    def _check_shapes(graph_game: GraphGame, strategy: QuantumStrategy) -> None:
        base = graph_game.base
        if strategy.state.num_players != graph_game.num_players:
            raise InputRangeError(
                f"Strategy has {strategy.state.num_players} players; {graph_game.label()} has {graph_game.num_players}."
            )
        if (strategy.num_questions, strategy.num_answers) != (base.num_questions, base.num_answers):
            raise InputRangeError("Strategy question/answer counts do not match the game.")

    @staticmethod
    def edge_distribution(strategy: QuantumStrategy, u: int, v: int) -> np.ndarray:
        """p[x1, x2, a1, a2] for players u (first) and v (second)."""
        if u > v:
            return StrategyEvaluator.edge_distribution(strategy, v, u).transpose(1, 0, 3, 2)
        reduced = LinearAlgebraService.partial_trace(strategy.state, (u, v))
        d_u, d_v = reduced.dims
        a_meas, b_meas = strategy.measurements[u], strategy.measurements[v]
        n_q, n_a = a_meas.shape[:2]

        # Tr(rho (A (x) B)) = sum rho[i, j, k, l] A[k, i] B[l, j]
        kernel = reduced.matrix.reshape(d_u, d_v, d_u, d_v).transpose(2, 0, 3, 1).reshape(d_u * d_u, d_v * d_v)
        left = a_meas.reshape(n_q * n_a, d_u * d_u)
        right = b_meas.reshape(n_q * n_a, d_v * d_v)
        probs = (left @ kernel @ right.T).real.reshape(n_q, n_a, n_q, n_a)
        return probs.transpose(0, 2, 1, 3)

    @staticmethod
    def edge_values(graph_game: GraphGame, strategy: QuantumStrategy) -> dict[tuple[int, int], float]:
        StrategyEvaluator._check_shapes(graph_game, strategy)
        base = graph_game.base
        weighted = base.win_weights / base.denominator
        return {
            (u, v): float((weighted * StrategyEvaluator.edge_distribution(strategy, u, v)).sum())
            for u, v in graph_game.edges
        }

    @staticmethod
    def strategy_value(graph_game: GraphGame, strategy: QuantumStrategy) -> float:
        """Uniform edge average of the per-edge winning probabilities."""
        values = StrategyEvaluator.edge_values(graph_game, strategy)
        return sum(values.values()) / len(values)

    @staticmethod
    def correlator(state: State, u: int, v: int, obs_u: np.ndarray, obs_v: np.ndarray) -> float:
        reduced = LinearAlgebraService.partial_trace(state, (u, v))
        first, second = (obs_u, obs_v) if u < v else (obs_v, obs_u)
        return float(np.trace(reduced.matrix @ np.kron(first, second)).real)

    @staticmethod
    def bell_biases(state: State, observables, edges) -> dict[tuple[int, int], float]:
        """
        <A0 B0 + A0 B1 + A1 B0 - A1 B1> on each edge (u, v), with
        observables[p] = (O_p0, O_p1).
        """
        biases = {}
        for u, v in edges:
            c = {
                (x, y): StrategyEvaluator.correlator(state, u, v, observables[u][x], observables[v][y])
                for x in (0, 1)
                for y in (0, 1)
            }
            biases[(u, v)] = c[0, 0] + c[0, 1] + c[1, 0] - c[1, 1]
        return biases


class StrategyBuilder:
    """The explicit strategies the engine reproduces."""

    @staticmethod
    def resolve(spec: str) -> QuantumStrategy:
        """A built-in strategy (tsirelson, ms, p4) or a strategy JSON file ("file:" prefix optional)."""
        builders = {
            "tsirelson": StrategyBuilder.tsirelson_strategy,
            "ms": StrategyBuilder.magic_square_strategy,
            "magic-square": StrategyBuilder.magic_square_strategy,
            "p4": StrategyBuilder.build_p4_strategy,
        }
        if spec.strip().lower() in builders:
            return builders[spec.strip().lower()]()
        path = Path(spec.removeprefix("file:"))
        if not path.is_file():
            raise ParseError(f"Unknown strategy {spec!r}: not one of {', '.join(builders)} and no such file.")
        try:
            payload = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ParseError(f"Malformed strategy file {path}: {exc}") from exc
        return StrategySerializer.to_strategy(payload)

    # ------------------------------------------------------------------
    # Two-player strategies
    # ------------------------------------------------------------------

    @staticmethod
    def tsirelson_strategy() -> QuantumStrategy:
        """EPR pair; A measures Z, X and B measures (Z +- X)/sqrt 2. Wins CHSH with 1/2 + 1/(2 sqrt 2)."""
        alice = binary_measurements([SIGMA_Z, SIGMA_X])
        bob = binary_measurements([(SIGMA_Z + SIGMA_X) / sqrt(2), (SIGMA_Z - SIGMA_X) / sqrt(2)])
        return QuantumStrategy(state=maximally_entangled(2), measurements=(alice, bob))

    @staticmethod
    def mermin_peres_observables() -> list[list[np.ndarray]]:
        """3x3 grid of commuting two-qubit observables; rows multiply to +1, columns to -1."""
        k = np.kron
        return [
            [k(SIGMA_X, I2), k(I2, SIGMA_X), k(SIGMA_X, SIGMA_X)],
            [k(I2, SIGMA_Z), k(SIGMA_Z, I2), k(SIGMA_Z, SIGMA_Z)],
            [-k(SIGMA_X, SIGMA_Z), -k(SIGMA_Z, SIGMA_X), k(SIGMA_Y, SIGMA_Y)],
        ]

    @staticmethod
    def magic_square_strategy() -> QuantumStrategy:
        """
        Two EPR pairs. For a line with answer bits b_k the projector is
        prod_k (1 + (-1)^b_k O_k) / 2 over the line's three observables;
        the second player uses the transposes.
        """
        grid = StrategyBuilder.mermin_peres_observables()
        lines = [grid[r] for r in range(MAGIC_SQUARE_ROWS)]
        lines += [[grid[r][c] for r in range(MAGIC_SQUARE_ROWS)] for c in range(MAGIC_SQUARE_ROWS)]

        first = np.zeros((len(lines), 8, 4, 4), dtype=complex)
        for q, observables in enumerate(lines):
            for answer in range(8):
                projector = np.eye(4, dtype=complex)
                for bit, observable in enumerate(observables):
                    sign = -1 if (answer >> bit) & 1 else 1
                    projector = projector @ (np.eye(4) + sign * observable) / 2
                first[q, answer] = projector
        second = first.transpose(0, 1, 3, 2)
        return QuantumStrategy(state=maximally_entangled(4), measurements=(first, second))

    # ------------------------------------------------------------------
    # Four-party CHSH on P4
    # ------------------------------------------------------------------

    P4_OBSERVABLES = (
        (SIGMA_X, SIGMA_Z),
        ((SIGMA_X + SIGMA_Z) / sqrt(2), (SIGMA_X - SIGMA_Z) / sqrt(2)),
        (SIGMA_X, SIGMA_Z),
        ((SIGMA_X + SIGMA_Z) / sqrt(2), (SIGMA_X - SIGMA_Z) / sqrt(2)),
    )

    @staticmethod
    def p4_swap_combination(single_swap: tuple[int, int] = (1, 3)) -> np.ndarray:
        """
        S = (1/20)( -(5 + sqrt5)(AD)(BC) + (5 - 3 sqrt5)(AD) + (-5 + sqrt5) s )
        with parties A, B, C, D = 0..3 and s the single swap (BD by default).
        """
        dims = (2, 2, 2, 2)
        swap = LinearAlgebraService.swap_operator
        r5 = sqrt(5)
        return (
            -(5 + r5) * swap(dims, (0, 3), (1, 2))
            + (5 - 3 * r5) * swap(dims, (0, 3))
            + (-5 + r5) * swap(dims, single_swap)
        ) / 20

    @staticmethod
    def p4_state(single_swap: tuple[int, int] = (1, 3)) -> PureState:
        """Normalised S (|Omega>_AB (x) |Omega>_CD)."""
        omega = maximally_entangled(2).vector
        vector = StrategyBuilder.p4_swap_combination(single_swap) @ np.kron(omega, omega)
        return PureState.normalized((2, 2, 2, 2), vector)

    @staticmethod
    def p4_state_from_amplitudes() -> PureState:
        """
        (1/20) sum_i (3 sqrt5 + 5)|iiii> + (5 + sqrt5)|ii i'i'>
                   + (5 - sqrt5)|i i'i' i> + (3 sqrt5 - 5)|i i' i i'>,  i' = 1 - i.
        """
        r5 = sqrt(5)
        vector = np.zeros(16, dtype=complex)
        for i in (0, 1):
            j = 1 - i
            for bits, amplitude in (
                ((i, i, i, i), 3 * r5 + 5),
                ((i, i, j, j), 5 + r5),
                ((i, j, j, i), 5 - r5),
                ((i, j, i, j), 3 * r5 - 5),
            ):
                vector[int("".join(map(str, bits)), 2)] = amplitude / 20
        return PureState((2, 2, 2, 2), vector)

    @staticmethod
    def build_p4_strategy() -> QuantumStrategy:
        """Four qubits A-B-C-D sharing p4_state(); A and C measure X, Z; B and D measure (X +- Z)/sqrt 2."""
        measurements = tuple(binary_measurements(pair) for pair in StrategyBuilder.P4_OBSERVABLES)
        return QuantumStrategy(state=StrategyBuilder.p4_state(), measurements=measurements)

    @staticmethod
    def recover_observables(
        state: State,
        edges,
        restarts: int = 8,
        seed: int = 0,
    ) -> dict:
        """
        Maximise sum_e <B_e> over one-qubit observables cos(t) Z + sin(t) X,
        one angle per (party, setting), from `restarts` seeded starting points.
        """
        num_parties = state.num_players
        if any(d != 2 for d in state.dims):
            raise InputRangeError("Observable recovery works on qubit parties only.")
        edges = list(edges)
        rng = np.random.default_rng(seed)

        def observables_for(angles: np.ndarray):
            pairs = angles.reshape(num_parties, 2)
            return [tuple(np.cos(t) * SIGMA_Z + np.sin(t) * SIGMA_X for t in row) for row in pairs]

        def objective(angles: np.ndarray) -> float:
            biases = StrategyEvaluator.bell_biases(state, observables_for(angles), edges)
            return -sum(biases.values())

        best = None
        for _ in range(restarts):
            start = rng.uniform(-np.pi, np.pi, size=2 * num_parties)
            result = minimize(objective, start, method="BFGS")
            if best is None or result.fun < best.fun:
                best = result
        angles = best.x.reshape(num_parties, 2)
        logger.info("observables_recovered", total_bias=-best.fun, restarts=restarts)
        return {
            "total_bias": float(-best.fun),
            "angles": angles,
            "observables": observables_for(best.x),
        }

    # ------------------------------------------------------------------
    # Polygamy: OR composition on P3
    # ------------------------------------------------------------------

    @staticmethod
    def _as_pure(state: State) -> PureState:
        if isinstance(state, PureState):
            return state
        values, vectors = np.linalg.eigh(state.matrix)
        if values[-1] < 1 - PERFECT_STRATEGY_TOL:
            raise InputRangeError("The polygamy construction needs a pure base state.")
        return PureState.normalized(state.dims, vectors[:, -1])

    @staticmethod
    def build_polygamy_strategy(base: Game, base_strategy: QuantumStrategy) -> QuantumStrategy:
        """
        Three players A, B, C for or_compose(base) on P3. Registers
        A = (A1, A2), B = (B1, B2), C = (C1, C2) hold |G>_{A1 B1} (x) |G>_{B2 C2}
        with A2 and C1 in |0>. Instance 1 is measured on the A1 B1 copy,
        instance 2 on the B2 C2 copy.
        """
        two_player = GameOperations.extend_over_graph(base, GraphFactory.path(2))
        value = StrategyEvaluator.strategy_value(two_player, base_strategy)
        if value < 1 - PERFECT_STRATEGY_TOL:
            raise InputRangeError(f"Base strategy wins with {value:.12f}; a perfect strategy is required.")

        pure = StrategyBuilder._as_pure(base_strategy.state)
        d1, d2 = pure.dims
        if d1 != d2:
            raise InputRangeError("Base strategy players must share one local dimension.")
        d = d1
        amplitudes = pure.vector.reshape(d, d)
        ket0 = np.zeros(d)
        ket0[0] = 1
        # a1 a2 b1 b2 c1 c2
        vector = np.einsum("ik,j,lm,n->ijklnm", amplitudes, ket0, amplitudes, ket0)
        state = PureState((d * d,) * 3, vector.reshape(-1))

        first, second = base_strategy.measurements
        n_q, n_a = first.shape[:2]

        def product(left: np.ndarray, right: np.ndarray) -> np.ndarray:
            joint = np.einsum("xaij,ybkl->xyabikjl", left, right)
            return joint.reshape(n_q * n_q, n_a * n_a, d * d, d * d)

        measurements = (product(first, first), product(second, first), product(second, second))
        logger.debug("polygamy_strategy_built", base=base.label, local_dim=d * d)
        return QuantumStrategy(state=state, measurements=measurements)
