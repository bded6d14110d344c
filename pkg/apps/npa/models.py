"""
Moment-matrix relaxations for binary-outcome scenarios on graphs.

Every party holds +-1 observables indexed by setting. Monomials are words of
letters (party, setting) kept in the canonical form of apps.ncpoly: grouped
by party, no repeated adjacent letters. All moments are real, so a word and
its reverse share one moment variable.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from apps.core.exceptions import ParseError
from apps.ncpoly.models import Word, canonical_word

LEVEL_PATTERN = re.compile(r"^(?P<depth>[1-9]\d*)(?P<pairs>\+edge-pairs)?$")


def real_moment_key(word) -> Word:
    """One key per real moment: the smaller of canon(w) and canon(w reversed)."""
    forward = canonical_word(word)
    return min(forward, canonical_word(reversed(forward)))


@dataclass(frozen=True)
class Scenario:
    num_parties: int
    num_settings: int
    level: str
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        match = LEVEL_PATTERN.match(self.level.replace(" ", ""))
        if not match:
            raise ParseError(f"Unknown NPA level {self.level!r}; expected e.g. 1, 2, 3 or 1+edge-pairs.")
        object.__setattr__(self, "level", self.level.replace(" ", ""))

    @property
    def depth(self) -> int:
        return int(LEVEL_PATTERN.match(self.level)["depth"])

    @property
    def edge_pairs(self) -> bool:
        return bool(LEVEL_PATTERN.match(self.level)["pairs"])


@dataclass(frozen=True, eq=False)
class MomentProblem:
    """
    Gamma[i, j] = <w_i* w_j>. Positions sharing a real moment key form a class;
    the first position of each class (row-major, upper triangle) is its
    representative. The objective is constant + sum_k objective[k] * moment_k.
    """

    scenario: Scenario
    words: tuple[Word, ...]
    class_keys: tuple[Word, ...]
    rep_rows: np.ndarray
    rep_cols: np.ndarray
    member_rows: np.ndarray
    member_cols: np.ndarray
    member_class: np.ndarray
    objective: np.ndarray
    constant: float = 0.0
    key_index: dict[Word, int] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.words)

    @property
    def num_classes(self) -> int:
        return len(self.class_keys)

    def moment_index(self, word) -> int:
        return self.key_index[real_moment_key(word)]


@dataclass(frozen=True)
class SdpSolution:
    """
    primal: solver objective; dual: bound certified from the solver's
    multipliers (valid whatever the solver status); gap = dual - primal.
    """

    primal: float
    dual: float
    gap: float
    status: str
    level: str = ""
    size: int = 0
    solver: str = ""

    STATUSES = ("optimal", "max-iterations", "infeasible")

    @property
    def bound(self) -> float:
        return self.dual


@dataclass(frozen=True)
class FeasibilityResult:
    """
    Outcome of asking whether some moment matrix reaches the target biases.

    t_primal is the largest t with Gamma - t*I PSD that the solver found and
    t_certified an upper bound on it derived from the dual multipliers.
    """

    verdict: str
    t_primal: float
    t_certified: float
    residual: float
    level: str
    size: int

    VERDICTS = ("feasible", "infeasible", "inconclusive")

    @property
    def feasible(self) -> bool | None:
        return {"feasible": True, "infeasible": False}.get(self.verdict)
