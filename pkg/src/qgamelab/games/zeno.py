"""Gradual-unblocking circuits: the Elitzur-Vaidman breaker and the bomb testers.

All Monte Carlo testers share one loop. A probe qubit starts in |0> and is
rotated a little each round. A coupling gate copies it onto a detector
qubit, which is measured; an outcome of 1 is the explosion. The detector is
then reset for the next round. After ``n`` rounds a final gate is applied
and the probe is read out as the verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from ..core import (GateOp, PureState, SingleQubitGate, StateBatch, apply, cnot, gate,
                    probability, project, toffoli)
from ..montecarlo import binomial_std_err, run_blocks
from ..rng import RngStream


@dataclass(frozen=True)
class BombState:
    working: bool

    @classmethod
    def parse(cls, value) -> "BombState":
        if isinstance(value, BombState):
            return value
        if isinstance(value, str):
            if value not in ("working", "damaged"):
                raise ValueError(f"bomb must be 'working' or 'damaged', got {value!r}")
            return cls(value == "working")
        return cls(bool(value))


WORKING = BombState(True)
DAMAGED = BombState(False)


@dataclass(frozen=True)
class TesterResult:
    """One run: either ``exploded_at`` (1-based round) or a ``verdict`` bit."""

    exploded_at: int | None
    verdict: int | None
    rounds_completed: int

    def __post_init__(self):
        if (self.exploded_at is None) == (self.verdict is None):
            raise ValueError("exactly one of exploded_at / verdict must be set")

    @property
    def exploded(self) -> bool:
        return self.exploded_at is not None


@dataclass(frozen=True)
class OutcomeDistribution:
    """Exact probabilities of explosion and of each verdict."""

    exploded: float
    verdict0: float
    verdict1: float

    @property
    def survival(self) -> float:
        return self.verdict0 + self.verdict1


@dataclass(frozen=True)
class TesterEstimate:
    trials: int
    exploded: int
    verdict0: int
    verdict1: int

    @property
    def survival(self) -> float:
        return (self.verdict0 + self.verdict1) / self.trials

    @property
    def std_err(self) -> float:
        return binomial_std_err(self.verdict0 + self.verdict1, self.trials)


def _check_n(n):
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"n must be an integer >= 1, got {n!r}")
    return int(n)


def zeno_survival(n: int) -> float:
    """Probability that ``n`` measured steps of the n-th root of NOT all leave
    the probe in |0>: cos^{2n}(pi/2n)."""
    n = _check_n(n)
    if n == 1:
        return 0.0
    # cos x = 1 - 2 sin^2(x/2); log1p keeps the tiny deficit accurate for large n
    return math.exp(2 * n * math.log1p(-2 * math.sin(math.pi / (4 * n)) ** 2))


def supply_demand_survival(n: int) -> float:
    """(1 - sin^2(pi/2n)/2)^n, the no-explosion probability with exp(pi H/2n) stages."""
    n = _check_n(n)
    return math.exp(n * math.log1p(-0.5 * math.sin(math.pi / (2 * n)) ** 2))


@dataclass(frozen=True)
class _Layout:
    """Qubit roles and gates for one tester family."""

    num_qubits: int
    probe: int
    detector: int | None
    coupling: GateOp | None
    stage: SingleQubitGate
    final: SingleQubitGate
    prep: tuple[int, ...]


def _ev_layout(n: int, first_qubit: int) -> _Layout:
    # qubit 0: |1/0> strategy, 1: switching-off strategy, 2: ancilla
    return _Layout(3, probe=1, detector=2, coupling=toffoli(0, 1, 2),
                   stage=gate("root_not", n), final=gate("not"), prep=(first_qubit, 0, 0))


def _bomb_layout(n: int, bomb: BombState, supply_demand: bool = False) -> _Layout:
    # qubit 0: probe, 1: bomb detector (only coupled when the fuse works)
    stage = gate("exp_h", math.pi / (2 * n)) if supply_demand else gate("root_not", n)
    final = gate("hadamard") if supply_demand else gate("not")
    if bomb.working:
        return _Layout(2, 0, 1, cnot(0, 1), stage, final, (0, 0))
    return _Layout(2, 0, None, None, stage, final, (0, 0))


def _run_batch(layout: _Layout, n: int, rows: int, rng: RngStream):
    """Vectorized rounds; returns (exploded_at, verdict) arrays, 0 = survived."""
    batch = StateBatch.basis(layout.prep, rows=rows)
    stage = GateOp(layout.stage, layout.probe)
    exploded_at = np.zeros(rows, dtype=np.int64)
    for r in range(1, n + 1):
        batch.apply(stage)
        if layout.coupling is None:
            continue
        batch.apply(layout.coupling)
        fired = batch.measure(layout.detector, rng.uniform(rows))
        exploded_at[(fired == 1) & (exploded_at == 0)] = r
        batch.reset(layout.detector, fired)
    batch.apply(GateOp(layout.final, layout.probe))
    verdict = batch.measure(layout.probe, rng.uniform(rows))
    return exploded_at, verdict


def _single(layout: _Layout, n: int, rng: RngStream) -> TesterResult:
    exploded_at, verdict = _run_batch(layout, n, 1, rng)
    if exploded_at[0]:
        return TesterResult(int(exploded_at[0]), None, int(exploded_at[0]) - 1)
    return TesterResult(None, int(verdict[0]), n)


def _exact(layout: _Layout, n: int) -> OutcomeDistribution:
    state = PureState.basis(layout.prep)
    stage = GateOp(layout.stage, layout.probe)
    alive = 1.0
    exploded = 0.0
    for _ in range(n):
        state = apply(state, stage)
        if layout.coupling is None:
            continue
        state = apply(state, layout.coupling)
        p_fire = probability(state, layout.detector, 1)
        exploded += alive * p_fire
        alive *= 1 - p_fire
        if alive < 1e-300 or 1 - p_fire < 1e-12:
            return OutcomeDistribution(exploded + alive, 0.0, 0.0)
        _, state = project(state, layout.detector, 0)
    state = apply(state, GateOp(layout.final, layout.probe))
    p1 = probability(state, layout.probe, 1)
    return OutcomeDistribution(exploded, alive * (1 - p1), alive * p1)


def run_ev_breaker(n: int, first_qubit: int, rng: RngStream) -> TesterResult:
    """One run of the Elitzur-Vaidman circuit-breaker.

    ``first_qubit`` = 1 lets the ancilla watch the switching-off strategy and
    freezes it (Zeno effect); 0 lets it rotate freely to NOT|0>.
    """
    n = _check_n(n)
    if first_qubit not in (0, 1):
        raise ValueError("first_qubit must be 0 or 1")
    return _single(_ev_layout(n, first_qubit), n, rng)


def ev_breaker_exact(n: int, first_qubit: int) -> OutcomeDistribution:
    n = _check_n(n)
    return _exact(_ev_layout(n, first_qubit), n)


def run_bomb_tester_zeno(n: int, bomb: BombState, rng: RngStream) -> TesterResult:
    """One run of the safe bomb tester; verdict 1 certifies a working fuse."""
    n = _check_n(n)
    return _single(_bomb_layout(n, BombState.parse(bomb)), n, rng)


def bomb_tester_zeno_exact(n: int, bomb: BombState) -> OutcomeDistribution:
    n = _check_n(n)
    return _exact(_bomb_layout(n, BombState.parse(bomb)), n)


def run_supply_demand(n: int, bomb: BombState, rng: RngStream) -> TesterResult:
    """One run of the supply-demand switch: exp(pi H/2n) stages, final H."""
    n = _check_n(n)
    return _single(_bomb_layout(n, BombState.parse(bomb), supply_demand=True), n, rng)


def supply_demand_exact(n: int, bomb: BombState) -> OutcomeDistribution:
    n = _check_n(n)
    return _exact(_bomb_layout(n, BombState.parse(bomb), supply_demand=True), n)


def _tester_block(size, rng, kind, n, param):
    layout = {
        "ev_breaker": lambda: _ev_layout(n, param),
        "zeno": lambda: _bomb_layout(n, BombState(param)),
        "supply_demand": lambda: _bomb_layout(n, BombState(param), supply_demand=True),
    }[kind]()
    exploded_at, verdict = _run_batch(layout, n, size, rng)
    alive = exploded_at == 0
    return np.array([np.count_nonzero(~alive),
                     np.count_nonzero(alive & (verdict == 0)),
                     np.count_nonzero(alive & (verdict == 1))])


def estimate_tester(kind: str, n: int, trials: int, rng: RngStream, *, bomb=WORKING,
                    first_qubit: int = 1, workers: int = 1) -> TesterEstimate:
    """Monte Carlo tally over ``trials`` independent runs.

    ``kind`` is ``"ev_breaker"`` (uses ``first_qubit``), ``"zeno"`` or
    ``"supply_demand"`` (use ``bomb``).
    """
    n = _check_n(n)
    if kind == "ev_breaker":
        if first_qubit not in (0, 1):
            raise ValueError("first_qubit must be 0 or 1")
        param = first_qubit
    elif kind in ("zeno", "supply_demand"):
        param = BombState.parse(bomb).working
    else:
        raise ValueError(f"unknown tester {kind!r}")
    counts = run_blocks(partial(_tester_block, kind=kind, n=n, param=param), trials, rng, workers)
    return TesterEstimate(trials, *(int(c) for c in counts))


def run_bomb_tester_antizeno(n: int, alpha: float, bomb: BombState) -> OutcomeDistribution:
    """Exact verdict law of the anti-Zeno tester (phase-kick model).

    Each of the ``n`` stages applies V_alpha(pi/2n); stages are separated by
    NOT^3. A working bomb adds e^{NOT pi/2n} per stage, i.e. pi/2n to the
    phase of the cumulative tactic. A final NOT precedes the readout. No
    explosions are modelled, so ``exploded`` is always 0.
    """
    n = _check_n(n)
    bomb = BombState.parse(bomb)
    stage = gate("v", alpha, math.pi / (2 * n))
    kick = gate("exp_not", math.pi / (2 * n))
    not3 = gate("not") ** 3
    state = PureState.zero(1)
    for s in range(n):
        state = apply(state, GateOp(stage, 0))
        if bomb.working:
            state = apply(state, GateOp(kick, 0))
        if s < n - 1:
            state = apply(state, GateOp(not3, 0))
    state = apply(state, GateOp(gate("not"), 0))
    p1 = probability(state, 0, 1)
    return OutcomeDistribution(0.0, 1 - p1, p1)


_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "y": np.array([[0, -1j], [1j, 0]]),
    "z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def pauli_coefficients(g: SingleQubitGate) -> dict[str, float]:
    """Real coordinates of ``g`` (rescaled into SU(2)) on I, iX, iY, iZ.

    NOT = iX, so the ``x`` coordinate is the NOT component; H NOT H = -iZ,
    so the ``z`` coordinate is minus the H NOT H component.
    """
    m = g.matrix / np.sqrt(np.linalg.det(g.matrix))
    out = {"i": float(np.trace(m).real / 2)}
    for k, p in _PAULI.items():
        out[k] = float(np.trace(p @ m).imag / 2)
    return out


def in_exp_not_class(g: SingleQubitGate, tol: float = 1e-10) -> bool:
    """Whether ``g`` equals e^{NOT phi} up to a global phase for some phi."""
    c = pauli_coefficients(g)
    return abs(c["z"]) <= tol and abs(c["y"]) <= tol
