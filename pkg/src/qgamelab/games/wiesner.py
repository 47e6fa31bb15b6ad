"""Wiesner banknotes as identification games.

Each sub-game has a secret qubit |psi_T> known only to the issuer and an
Alice bit. Alice's move is a controlled gate on Trent's qubit, and Bob's
(the claimant's) move is the same gate controlled by his bit. Trent then
checks that his qubit is still |psi_T>.

* ``swap`` variant: qubits A, T, T', B. Both moves are controlled swaps of
  T with a fresh Haar-random ancilla T'.
* ``hadamard`` variant: qubits A, T, B. Both moves are controlled-H on T.
  A single H maps the projective coordinate z -> (1 - z)/(1 + z).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from functools import partial
from typing import Sequence

import numpy as np

from ..core import (PAULI_X, GateOp, StateBatch, bloch_state, controlled_swap, gate)
from ..montecarlo import binomial_std_err, run_blocks
from ..rng import RngStream

VARIANTS = ("swap", "hadamard")
FORGERS = ("uniform_guess", "measure_resend", "legitimate")


class BasisPolicy(str, Enum):
    HAAR_RANDOM = "haar_random"
    COMPUTATIONAL_PAIR = "computational_pair"

    @classmethod
    def parse(cls, value) -> "BasisPolicy":
        if isinstance(value, cls):
            return value
        aliases = {"haar": cls.HAAR_RANDOM, "computational": cls.COMPUTATIONAL_PAIR}
        try:
            return aliases.get(value) or cls(value)
        except ValueError:
            raise ValueError(f"unknown basis policy {value!r}") from None


@dataclass(frozen=True)
class SubGameRecord:
    """Trent's secret state (Bloch angles) and Alice's bit for one round."""

    theta: float
    phi: float
    alice_bit: int

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        if not 0.0 <= self.phi < 2 * math.pi:
            raise ValueError(f"phi must lie in [0, 2pi), got {self.phi}")
        if self.alice_bit not in (0, 1):
            raise ValueError("alice_bit must be 0 or 1")

    @property
    def state(self) -> np.ndarray:
        return bloch_state(self.theta, self.phi)

    @property
    def z(self) -> complex:
        """Projective coordinate of |0> + z|1>; ``inf`` for |1>."""
        return state_to_z(self.state)


@dataclass(frozen=True)
class Banknote:
    serial: int
    rounds: tuple[SubGameRecord, ...]

    def __post_init__(self):
        object.__setattr__(self, "rounds", tuple(self.rounds))
        if len(self.rounds) < 1:
            raise ValueError("a banknote needs at least one sub-game")

    @property
    def k(self) -> int:
        return len(self.rounds)

    def to_json(self) -> str:
        """One-line record with fixed field order and 17 significant digits."""
        rounds = ",".join(
            f'{{"theta":{r.theta:.17g},"phi":{r.phi:.17g},"alice_bit":{r.alice_bit}}}'
            for r in self.rounds
        )
        return f'{{"serial":{self.serial},"rounds":[{rounds}]}}'

    @classmethod
    def from_json(cls, text: str) -> "Banknote":
        import json

        data = json.loads(text)
        return cls(int(data["serial"]),
                   tuple(SubGameRecord(float(r["theta"]), float(r["phi"]), int(r["alice_bit"]))
                         for r in data["rounds"]))


def state_to_z(psi) -> complex:
    a, b = complex(psi[0]), complex(psi[1])
    if abs(a) < 1e-15:
        return complex("inf")
    return b / a


def z_to_state(z: complex) -> np.ndarray:
    if cmath.isinf(z):
        return np.array([0, 1], dtype=np.complex128)
    v = np.array([1, z], dtype=np.complex128)
    return v / np.linalg.norm(v)


def hadamard_round_map(z: complex) -> complex:
    """z -> (1 - z)/(1 + z), extended to the Riemann sphere."""
    if cmath.isinf(z):
        return complex(-1)
    if abs(1 + z) < 1e-15:
        return complex("inf")
    return (1 - z) / (1 + z)


def draw_secret_states(policy: BasisPolicy, rng: RngStream, size) -> tuple[np.ndarray, np.ndarray]:
    """Bloch angles (theta, phi) for Trent's secret qubits."""
    policy = BasisPolicy.parse(policy)
    if policy is BasisPolicy.HAAR_RANDOM:
        u = rng.uniform((2,) + tuple(np.atleast_1d(size)))
        return np.arccos(1 - 2 * u[0]), 2 * math.pi * u[1]
    pick = rng.bits(size)
    return math.pi * pick.astype(np.float64), np.zeros(np.shape(pick))


def _states(theta, phi) -> np.ndarray:
    return np.stack([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], axis=-1)


def _basis_gates(theta, phi) -> np.ndarray:
    """Per-row unitaries mapping |0> to the given Bloch states."""
    psi = _states(theta, phi)
    a, b = psi[:, 0], psi[:, 1]
    return np.stack([np.stack([a, -b.conj()], -1), np.stack([b, a.conj()], -1)], -2)


def mint_banknote(k: int, policy: BasisPolicy, serial: int, rng: RngStream) -> Banknote:
    """Issue a note with ``k`` sub-games."""
    if int(k) != k or k < 1:
        raise ValueError(f"k must be an integer >= 1, got {k!r}")
    theta, phi = draw_secret_states(policy, rng, k)
    alice = rng.bits(k)
    return Banknote(serial, tuple(SubGameRecord(float(t), float(p), int(a))
                                  for t, p, a in zip(theta, phi, alice)))


def _round(variant: str, theta, phi, alice, claimant, rng: RngStream):
    """Play one sub-game on a batch of rows.

    ``claimant`` is a per-row bit array, or ``None`` for the measure-resend
    forger, who measures Trent's qubit in the computational basis after
    Alice's move and claims the bit he saw.
    Returns (passed, claimant bits used).
    """
    rows = theta.shape[0]
    if variant == "swap":
        a_q, t_q, tp_q, b_q = 0, 1, 2, 3
        tp_theta, tp_phi = draw_secret_states(BasisPolicy.HAAR_RANDOM, rng, rows)
        qubits = [np.stack([1 - alice, alice], -1), _states(theta, phi),
                  _states(tp_theta, tp_phi), [1, 0]]
        alice_move = controlled_swap(a_q, t_q, tp_q)
        bob_move = controlled_swap(b_q, t_q, tp_q)
    elif variant == "hadamard":
        a_q, t_q, b_q = 0, 1, 2
        qubits = [np.stack([1 - alice, alice], -1), _states(theta, phi), [1, 0]]
        alice_move = [GateOp(gate("hadamard"), t_q, (a_q,))]
        bob_move = [GateOp(gate("hadamard"), t_q, (b_q,))]
    else:
        raise ValueError(f"unknown variant {variant!r}")
    batch = StateBatch.product(qubits)
    for op in alice_move:
        batch.apply(op)
    if claimant is None:
        claimant = batch.measure(t_q, rng.uniform(rows))
    batch.apply_where(np.asarray(claimant) == 1, PAULI_X, b_q)
    for op in bob_move:
        batch.apply(op)
    unchanged = batch.measure_in_basis(t_q, _basis_gates(theta, phi), rng.uniform(rows)) == 0
    return unchanged, np.asarray(claimant, dtype=np.uint8)


def verify_banknote(note: Banknote, claimant_bits: Sequence[int], variant: str,
                    rng: RngStream) -> tuple[bool, int | None]:
    """Trent's check of a presented note. Returns ``(passed, first failing round)``."""
    if len(claimant_bits) != note.k:
        raise ValueError(f"expected {note.k} claimant bits, got {len(claimant_bits)}")
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    for i, (rec, bit) in enumerate(zip(note.rounds, claimant_bits)):
        ok, _ = _round(variant, np.array([rec.theta]), np.array([rec.phi]),
                       np.array([rec.alice_bit]), np.array([int(bit)]), rng)
        if not ok[0]:
            return False, i
    return True, None


@dataclass(frozen=True)
class ForgeryEstimate:
    trials: int
    passes: int

    @property
    def pass_rate(self) -> float:
        return self.passes / self.trials

    @property
    def std_err(self) -> float:
        return binomial_std_err(self.passes, self.trials)


def _forgery_block(size, rng, k, variant, policy, forger):
    theta, phi = draw_secret_states(policy, rng, (size, k))
    alice = rng.bits((size, k))
    if forger == "uniform_guess":
        claims = rng.bits((size, k))
    elif forger == "legitimate":
        claims = alice
    else:
        claims = None
    passed = np.ones(size, dtype=bool)
    for r in range(k):
        ok, _ = _round(variant, theta[:, r], phi[:, r], alice[:, r],
                       None if claims is None else claims[:, r], rng)
        passed &= ok
    return np.array([np.count_nonzero(passed)])


def forgery_experiment(k: int, trials: int, variant: str, policy: BasisPolicy, forger: str,
                       rng: RngStream, workers: int = 1) -> ForgeryEstimate:
    """Pass rate of a forger against freshly minted ``k``-round notes.

    ``uniform_guess`` claims random bits; ``measure_resend`` measures each
    note qubit in the computational basis and claims the result;
    ``legitimate`` presents Alice's own bits (control run).
    """
    if int(k) != k or k < 1:
        raise ValueError(f"k must be an integer >= 1, got {k!r}")
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if forger not in FORGERS:
        raise ValueError(f"unknown forger {forger!r}")
    policy = BasisPolicy.parse(policy)
    fn = partial(_forgery_block, k=int(k), variant=variant, policy=policy, forger=forger)
    passes = run_blocks(fn, trials, rng, workers)
    return ForgeryEstimate(trials, int(passes[0]))
