"""Newcomb's boxes: the classical I/NOT breaker and its qutrojan replacement.

Upper qubit (0) holds the human tactic, lower qubit (1) starts in |0>, the
male strategy. The alliance CNOT(upper -> lower) is Omega's measuring
device. A lower outcome of 0 means both boxes get opened.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial

import numpy as np

from ..core import GateOp, PureState, StateBatch, apply, cnot, gate
from ..montecarlo import run_blocks
from ..rng import RngStream

UPPER, LOWER = 0, 1
OUTCOMES = ((0, 0), (0, 1), (1, 0), (1, 1))


@dataclass(frozen=True)
class BreakerKind:
    variant: str
    prob_not: float = 0.5

    def __post_init__(self):
        if self.variant not in ("classical_switch", "qutrojan"):
            raise ValueError(f"unknown breaker {self.variant!r}")
        if not 0.0 <= self.prob_not <= 1.0:
            raise ValueError(f"prob_not must lie in [0, 1], got {self.prob_not}")

    @classmethod
    def classical_switch(cls, prob_not: float = 0.5) -> "BreakerKind":
        return cls("classical_switch", prob_not)

    @classmethod
    def qutrojan(cls) -> "BreakerKind":
        return cls("qutrojan")


@dataclass(frozen=True)
class NewcombResult:
    """Joint (upper, lower) outcome statistics."""

    counts: dict
    trials: int
    exact: dict

    @property
    def empirical(self) -> dict:
        return {k: v / self.trials for k, v in self.counts.items()}

    def lower_marginal(self, exact: bool = True) -> tuple[float, float]:
        d = self.exact if exact else self.empirical
        return d[(0, 0)] + d[(1, 0)], d[(0, 1)] + d[(1, 1)]

    def upper_marginal(self, exact: bool = True) -> tuple[float, float]:
        d = self.exact if exact else self.empirical
        return d[(0, 0)] + d[(0, 1)], d[(1, 0)] + d[(1, 1)]


def _tactic_vector(tactic) -> np.ndarray:
    if isinstance(tactic, PureState):
        if tactic.num_qubits != 1:
            raise ValueError("the tactic must be a single qubit")
        return tactic.amps
    v = np.asarray(tactic, dtype=np.complex128)
    if v.shape != (2,):
        raise ValueError("the tactic must be a 2-component amplitude vector")
    return v / np.linalg.norm(v)


def _joint(state: PureState) -> dict:
    probs = state.distribution()
    return {(u, l): float(probs[u | (l << 1)]) for u, l in OUTCOMES}


def newcomb_exact(tactic, breaker: BreakerKind) -> dict:
    """Exact joint distribution of (upper, lower)."""
    psi = PureState.product([_tactic_vector(tactic), [1, 0]])
    if breaker.variant == "qutrojan":
        h = GateOp(gate("hadamard"), LOWER)
        return _joint(apply(apply(apply(psi, h), cnot(UPPER, LOWER)), h))
    without = _joint(apply(psi, cnot(UPPER, LOWER)))
    flipped = _joint(apply(apply(psi, GateOp(gate("not"), LOWER)), cnot(UPPER, LOWER)))
    q = breaker.prob_not
    return {k: (1 - q) * without[k] + q * flipped[k] for k in OUTCOMES}


def _newcomb_block(size, rng, tactic, variant, prob_not):
    batch = StateBatch.product([tactic, [1, 0]])
    batch.amps = np.ascontiguousarray(np.broadcast_to(batch.amps, (size, 4)))
    if variant == "qutrojan":
        h = GateOp(gate("hadamard"), LOWER)
        batch.apply(h).apply(cnot(UPPER, LOWER)).apply(h)
    else:
        fire = rng.uniform(size) < prob_not
        batch.apply_where(fire, gate("not"), LOWER).apply(cnot(UPPER, LOWER))
    upper = batch.measure(UPPER, rng.uniform(size))
    lower = batch.measure(LOWER, rng.uniform(size))
    return np.bincount(upper + 2 * lower, minlength=4)


def run_newcomb(tactic, breaker: BreakerKind, trials: int, rng: RngStream,
                workers: int = 1) -> NewcombResult:
    """Sample the breaker circuit ``trials`` times and pair it with the exact law."""
    vec = _tactic_vector(tactic)
    fn = partial(_newcomb_block, tactic=vec, variant=breaker.variant, prob_not=breaker.prob_not)
    c = run_blocks(fn, trials, rng, workers)
    counts = {(u, l): int(c[u | (l << 1)]) for u, l in OUTCOMES}
    return NewcombResult(counts, trials, newcomb_exact(vec, breaker))
