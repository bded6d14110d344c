"""
Finite-dimensional quantum states and strategies.

Players are tensor factors in the order of `dims`. A strategy's measurement
for player p is an array of shape (|I|, |O|, d_p, d_p): projector
measurements[p][x, a] is applied when player p receives question x and
reports answer a.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import prod

import numpy as np

from apps.core.exceptions import InputRangeError

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-10
STRUCTURAL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    dims: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        matrix = np.array(self.matrix, dtype=complex)
        if not dims or any(d < 1 for d in dims):
            raise InputRangeError("Every player needs a positive local dimension.")
        total = prod(dims)
        if matrix.shape != (total, total):
            raise InputRangeError(f"State shape {matrix.shape} does not match dims {dims}.")
        if np.abs(matrix - matrix.conj().T).max() > HERMITIAN_TOL:
            raise InputRangeError("Density matrix is not Hermitian.")
        if abs(np.trace(matrix) - 1) > TRACE_TOL:
            raise InputRangeError(f"Density matrix trace is {np.trace(matrix).real:.3g}, not 1.")
        if np.linalg.eigvalsh(matrix)[0] < -POSITIVITY_TOL:
            raise InputRangeError("Density matrix has a negative eigenvalue.")
        matrix.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", matrix)

    @property
    def num_players(self) -> int:
        return len(self.dims)

    def density(self) -> DensityMatrix:
        return self


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit state vector; stands in for |psi><psi| without forming it."""

    dims: tuple[int, ...]
    vector: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        vector = np.array(self.vector, dtype=complex).reshape(-1)
        if not dims or any(d < 1 for d in dims):
            raise InputRangeError("Every player needs a positive local dimension.")
        if vector.size != prod(dims):
            raise InputRangeError(f"State vector length {vector.size} does not match dims {dims}.")
        if abs(np.linalg.norm(vector) - 1) > TRACE_TOL:
            raise InputRangeError("State vector is not normalised.")
        vector.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "vector", vector)

    @classmethod
    def normalized(cls, dims, vector) -> PureState:
        vector = np.asarray(vector, dtype=complex).reshape(-1)
        norm = np.linalg.norm(vector)
        if norm == 0:
            raise InputRangeError("Cannot normalise the zero vector.")
        return cls(dims=dims, vector=vector / norm)

    @property
    def num_players(self) -> int:
        return len(self.dims)

    def density(self) -> DensityMatrix:
        return DensityMatrix(self.dims, np.outer(self.vector, self.vector.conj()))


State = DensityMatrix | PureState


@dataclass(frozen=True, eq=False)
class QuantumStrategy:
    state: State
    measurements: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.measurements) != self.state.num_players:
            raise InputRangeError(
                f"{len(self.measurements)} measurement sets for {self.state.num_players} players."
            )
        checked = []
        for player, (dim, povm) in enumerate(zip(self.state.dims, self.measurements)):
            povm = np.array(povm, dtype=complex)
            if povm.ndim != 4 or povm.shape[2:] != (dim, dim):
                raise InputRangeError(f"Player {player}: measurements must have shape (|I|, |O|, {dim}, {dim}).")
            self._check_projective(player, povm)
            povm.setflags(write=False)
            checked.append(povm)
        shapes = {m.shape[:2] for m in checked}
        if len(shapes) != 1:
            raise InputRangeError(f"Players disagree on (|I|, |O|): {sorted(shapes)}.")
        object.__setattr__(self, "measurements", tuple(checked))

    @staticmethod
    def _check_projective(player: int, povm: np.ndarray) -> None:
        dim = povm.shape[-1]
        identity = np.eye(dim)
        for x, projectors in enumerate(povm):
            if np.abs(projectors.sum(axis=0) - identity).max() > STRUCTURAL_TOL:
                raise InputRangeError(f"Player {player}, question {x}: projectors do not sum to identity.")
            products = np.einsum("aij,bjk->abik", projectors, projectors, optimize=True)
            expected = np.einsum("ab,aik->abik", np.eye(len(projectors)), projectors)
            if np.abs(products - expected).max() > STRUCTURAL_TOL:
                raise InputRangeError(f"Player {player}, question {x}: projectors are not orthogonal idempotents.")

    @property
    def num_questions(self) -> int:
        return self.measurements[0].shape[0]

    @property
    def num_answers(self) -> int:
        return self.measurements[0].shape[1]

    def observable(self, player: int, question: int) -> np.ndarray:
        """P_0 - P_1 for binary-answer strategies."""
        if self.num_answers != 2:
            raise InputRangeError("Observables are defined for binary answers only.")
        projectors = self.measurements[player][question]
        return projectors[0] - projectors[1]
