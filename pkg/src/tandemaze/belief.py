"""Probabilistic memory of the partner's unknown movement possibilities.

Each (cell, movement action) pair carries a Beta(alpha, beta) posterior
over whether the partner can take that move. Watching the partner take a
move is positive evidence for it and weak negative evidence for the
sibling moves they did not take at that cell -- the partner not trying a
move doesn't prove it is blocked, hence the asymmetric weights.
"""

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple

import numpy as np

from .game import Action, GridPos, MOVE_ACTIONS

_DIR_CHARS = "RULD"


@dataclass(frozen=True)
class ConfidenceFactors:
    """Evidence weights: c_plus for observed moves, c_minus for untried siblings."""

    c_plus: float = 2.0
    c_minus: float = 0.5

    def __post_init__(self):
        if not self.c_plus > self.c_minus > 0:
            raise ValueError(f"need c_plus > c_minus > 0, got {self.c_plus}, {self.c_minus}")


DEFAULT_FACTORS = ConfidenceFactors()


def posterior_mean(alpha: float, beta: float, y: int, factors: ConfidenceFactors) -> float:
    """Posterior expectation after one weighted Bernoulli observation y."""
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    a = alpha + factors.c_plus * y
    b = beta + factors.c_minus * (1 - y)
    return a / (a + b)


def constraint_c_plus(theta: float, c_minus: float) -> float:
    """Positive-evidence weight that makes the weighted Bernoulli sum to one.

    Solves (1-theta)^c_minus + theta^c_plus = 1 for c_plus at a given
    success probability theta. Exposed as a validation utility; the
    table updates themselves use constant factors.
    """
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta must be in (0,1), got {theta}")
    if c_minus <= 0:
        raise ValueError(f"c_minus must be positive, got {c_minus}")
    return math.log(1.0 - (1.0 - theta) ** c_minus) / math.log(theta)


class PartnerHistory:
    """Ordered record of the partner's executed movement actions.

    Keeps a cursor so re-presenting the whole history never double-counts:
    only entries past the cursor are consumed by an ingest.
    """

    def __init__(self, entries: Iterable[Tuple[GridPos, Action]] = ()):
        self._entries = []
        self.cursor = 0
        for cell, action in entries:
            self.append(cell, action)

    def append(self, cell: GridPos, action: Action) -> None:
        if action not in MOVE_ACTIONS:
            raise ValueError(f"history holds movement actions only, got {action!r}")
        self._entries.append((GridPos(*cell), Action(action)))

    def __len__(self) -> int:
        return len(self._entries)

    def __getitem__(self, i):
        return self._entries[i]

    def pending(self) -> Sequence[Tuple[GridPos, Action]]:
        return self._entries[self.cursor:]

    def advance(self) -> None:
        self.cursor = len(self._entries)


class BeliefTable:
    """Per (cell, movement action) Beta parameters with derived means."""

    def __init__(self, width: int, height: int):
        self.width = width
        self.height = height
        n = width * height * 4
        self.alpha = np.ones(n, dtype=np.float64)
        self.beta = np.ones(n, dtype=np.float64)

    def _slot(self, cell: GridPos, action: Action) -> int:
        return (cell[1] * self.width + cell[0]) * 4 + int(action)

    def mean(self, cell: GridPos, action: Action) -> float:
        i = self._slot(cell, action)
        return self.alpha[i] / (self.alpha[i] + self.beta[i])

    def means(self) -> np.ndarray:
        """Flat array of means, indexed (row*width + col)*4 + action."""
        return self.alpha / (self.alpha + self.beta)

    def observe(self, cell: GridPos, action: Action, factors: ConfidenceFactors = DEFAULT_FACTORS) -> None:
        """One history entry: boost the taken move, nudge its siblings down."""
        if action not in MOVE_ACTIONS:
            raise ValueError(f"belief covers movement actions only, got {action!r}")
        base = (cell[1] * self.width + cell[0]) * 4
        for a in MOVE_ACTIONS:
            if a is action:
                self.alpha[base + a] = self.alpha[base + a] + factors.c_plus
            else:
                self.beta[base + a] = self.beta[base + a] + factors.c_minus

    def ingest_history(self, history: PartnerHistory, factors: ConfidenceFactors = DEFAULT_FACTORS) -> "BeliefTable":
        """Consume entries past the history cursor, then advance it."""
        for cell, action in history.pending():
            self.observe(cell, action, factors)
        history.advance()
        return self

    def copy(self) -> "BeliefTable":
        out = BeliefTable.__new__(BeliefTable)
        out.width, out.height = self.width, self.height
        out.alpha = self.alpha.copy()
        out.beta = self.beta.copy()
        return out

    def snapshot(self) -> dict:
        """Wire form: {"col,row,dir": {alpha, beta, mean}} plus a version tag."""
        entries = {}
        for row in range(self.height):
            for col in range(self.width):
                for a in MOVE_ACTIONS:
                    i = (row * self.width + col) * 4 + a
                    entries[f"{col},{row},{_DIR_CHARS[a]}"] = {
                        "alpha": float(self.alpha[i]),
                        "beta": float(self.beta[i]),
                        "mean": float(self.alpha[i] / (self.alpha[i] + self.beta[i])),
                    }
        return {"format_version": 1, "width": self.width, "height": self.height, "entries": entries}

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BeliefTable)
            and self.width == other.width
            and self.height == other.height
            and np.array_equal(self.alpha, other.alpha)
            and np.array_equal(self.beta, other.beta)
        )


def init_belief(width: int, height: int) -> BeliefTable:
    """Fresh table: alpha = beta = 1 everywhere, so every mean is 0.5."""
    return BeliefTable(width, height)
