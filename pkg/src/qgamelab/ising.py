"""Cellular-automaton Metropolis dynamics for the cyclic 1D Ising chain.

Cell ``k`` reads its neighbours ``k-1`` and ``k+1`` and then flips, unless
all three spins are aligned and its I/NOT switch fired (probability ``p``).
With ``p = 1 - exp(-4 beta J)`` this is exactly single-spin Metropolis at
inverse temperature ``beta`` with coupling ``J``.

Spin encoding: bit 0 is sigma = +1 and bit 1 is sigma = -1. The energy is
``E = -sum_k sigma_k sigma_{k+1}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ._backend import kernels
from .core import GateOp, SingleQubitGate, StateBatch, cnot, gate
from .rng import RngStream

CHUNK_SWEEPS = 4096


class ActivationSchedule(str, Enum):
    """Which cells fire in one step; cells firing together are never adjacent.

    ``SINGLE_RANDOM`` (one uniformly chosen cell per step) is the default and
    is ergodic for 0 < p < 1. ``EVEN_ODD`` alternates the two sublattices;
    it keeps the Gibbs measure stationary, but because the cell rule flips
    deterministically whenever the move costs no energy, the sweep chain
    splits into several closed classes. Its averages then depend on the
    initial chain.
    """

    EVEN_ODD = "even_odd_sublattices"
    SINGLE_RANDOM = "single_random_cell"

    @classmethod
    def parse(cls, value) -> "ActivationSchedule":
        if isinstance(value, cls):
            return value
        aliases = {"even_odd": cls.EVEN_ODD, "single_random": cls.SINGLE_RANDOM}
        try:
            return aliases.get(value) or cls(value)
        except ValueError:
            raise ValueError(f"unknown activation schedule {value!r}") from None


@dataclass
class IsingChain:
    spins: np.ndarray

    def __post_init__(self):
        s = np.array(self.spins, dtype=np.int64).ravel()
        if s.size < 3:
            raise ValueError(f"an Ising chain needs at least 3 cells, got {s.size}")
        if not np.all((s == 0) | (s == 1)):
            raise ValueError("spins must be bits (0 = up, 1 = down)")
        self.spins = s.astype(np.uint8)

    @classmethod
    def aligned(cls, n_cells: int, bit: int = 0) -> "IsingChain":
        return cls(np.full(n_cells, bit))

    @classmethod
    def random(cls, n_cells: int, rng: RngStream) -> "IsingChain":
        return cls(rng.bits(n_cells))

    @property
    def n_cells(self) -> int:
        return self.spins.size

    @property
    def sigma(self) -> np.ndarray:
        return 1 - 2 * self.spins.astype(np.int64)

    def energy(self) -> int:
        s = self.sigma
        return int(-(s * np.roll(s, -1)).sum())

    def magnetization(self) -> float:
        return float(self.sigma.mean())

    def copy(self) -> "IsingChain":
        return IsingChain(self.spins.copy())

    def flipped(self) -> "IsingChain":
        return IsingChain(1 - self.spins)


@dataclass(frozen=True)
class MetropolisParams:
    """Switch probability ``p``; optionally tied to ``beta_j`` by p = 1 - e^{-4 beta_j}."""

    p: float
    beta_j: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.beta_j is not None:
            if self.beta_j < 0:
                raise ValueError("beta_j must be >= 0")
            if abs(self.p - p_from_beta(self.beta_j)) >= 1e-12:
                raise ValueError("p and beta_j disagree")

    @classmethod
    def from_beta(cls, beta_j: float) -> "MetropolisParams":
        return cls(p_from_beta(beta_j), beta_j)


def p_from_beta(beta_j: float) -> float:
    return -math.expm1(-4 * beta_j)


def local_rule(s_left: int, s_k: int, s_right: int, ancilla: int) -> int:
    """New strategy of cell ``k``.

    Traced from the cell circuit: the two CNOTs and three NOTs turn the
    neighbour lines into the tests ``s_left == s_right`` and
    ``s_right == s_k``, and ``s_k`` is inverted. The triple-controlled NOT
    (ancilla and both tests) undoes the inversion.
    """
    aligned = s_left == s_right and s_k == s_right
    return (1 - s_k) ^ int(bool(ancilla) and aligned)


def _check_schedule(schedule: ActivationSchedule, n: int):
    if schedule is ActivationSchedule.EVEN_ODD and n % 2:
        raise ValueError(f"even/odd sublattice activation needs an even number of cells, got {n}")


def _assert_non_adjacent(cells: np.ndarray, n: int):
    if cells.size > 1:
        c = np.sort(cells)
        gaps = np.diff(np.append(c, c[0] + n))
        if np.any(gaps < 2):
            raise RuntimeError(f"adjacent cells activated together: {cells.tolist()}")


def activated_cells(n: int, schedule: ActivationSchedule, rng: RngStream, sublattice: int = 0) -> np.ndarray:
    schedule = ActivationSchedule.parse(schedule)
    _check_schedule(schedule, n)
    if schedule is ActivationSchedule.EVEN_ODD:
        cells = np.arange(sublattice % 2, n, 2)
    else:
        cells = np.array([rng.integers(0, n)])
    _assert_non_adjacent(cells, n)
    return cells


def classical_step(chain: IsingChain, params: MetropolisParams, schedule: ActivationSchedule,
                   rng: RngStream, sublattice: int = 0) -> IsingChain:
    """One activation step of the classical automaton (I/NOT switch drawn per cell)."""
    n = chain.n_cells
    cells = activated_cells(n, schedule, rng, sublattice)
    ancilla = rng.uniform(cells.size) < params.p
    old = chain.spins
    new = old.copy()
    for k, a in zip(cells, ancilla):
        new[k] = local_rule(int(old[(k - 1) % n]), int(old[k]), int(old[(k + 1) % n]), int(a))
    return IsingChain(new)


# Cell circuit qubits: switch ancilla, s_{k-1}, s_{k+1}, s_k.
_ANC, _LEFT, _RIGHT, _MID = 0, 1, 2, 3


def _switch_gate(p: float) -> SingleQubitGate:
    # e^{NOT theta} with sin^2 theta = p, so |<1|U|0>|^2 = p
    return gate("exp_not", math.asin(math.sqrt(p)))


def _cell_circuit(left, mid, right, p: float) -> StateBatch:
    batch = StateBatch.basis([0, left, right, mid])
    batch.apply(GateOp(_switch_gate(p), _ANC))
    batch.apply(cnot(_RIGHT, _LEFT))
    batch.apply(cnot(_MID, _RIGHT))
    for q in (_LEFT, _RIGHT, _MID):
        batch.apply(GateOp(gate("not"), q))
    batch.apply(GateOp(gate("not"), _MID, (_ANC, _LEFT, _RIGHT)))
    return batch


def _quantum_cells(left, mid, right, p, uniforms, basis: SingleQubitGate | None):
    batch = _cell_circuit(left, mid, right, p)
    if basis is None:
        return batch.measure(_MID, uniforms)
    bases = np.broadcast_to(basis.matrix, (batch.rows, 2, 2))
    return batch.measure_in_basis(_MID, bases, uniforms)


def quantum_cell_law(s_left: int, s_k: int, s_right: int, p: float,
                     basis: SingleQubitGate | None = None) -> float:
    """Exact probability that the quantized cell reads out 1."""
    batch = _cell_circuit(np.array([s_left]), np.array([s_k]), np.array([s_right]), p)
    if basis is not None:
        batch.apply(GateOp(basis.dagger(), _MID))
    return float(batch.probability(_MID, 1)[0])


def quantum_cell_update(s_left: int, s_k: int, s_right: int, params: MetropolisParams,
                        rng: RngStream, basis: SingleQubitGate | None = None) -> int:
    """Run the quantized cell once: U replaces the I/NOT switch, and the
    ``s_k`` line is measured (in the frame of ``basis`` if given)."""
    bits = _quantum_cells(np.array([s_left]), np.array([s_k]), np.array([s_right]),
                          params.p, rng.uniform(1), basis)
    return int(bits[0])


@dataclass
class IsingSeries:
    """Per-sweep observables after burn-in."""

    sweep: np.ndarray
    magnetization: np.ndarray
    energy: np.ndarray
    nn_correlation: np.ndarray
    state_codes: np.ndarray
    final: IsingChain
    n_batches: int = field(default=50)

    def mean(self, name: str) -> float:
        return float(np.mean(getattr(self, name)))

    def std_err(self, name: str) -> float:
        """Batch-means standard error (accounts for autocorrelation)."""
        return batch_means_std_err(getattr(self, name), self.n_batches)


def batch_means_std_err(x: np.ndarray, n_batches: int = 50) -> float:
    x = np.asarray(x, dtype=np.float64)
    if x.size < 2 * n_batches:
        return float(np.std(x, ddof=1) / math.sqrt(x.size)) if x.size > 1 else float("nan")
    size = x.size // n_batches
    means = x[: size * n_batches].reshape(n_batches, size).mean(axis=1)
    return float(np.std(means, ddof=1) / math.sqrt(n_batches))


def _observables(spins: np.ndarray):
    sigma = 1 - 2 * spins.astype(np.int64)
    code = int(spins.astype(np.int64) @ (1 << np.arange(spins.size, dtype=np.int64))) if spins.size <= 62 else -1
    return int(sigma.sum()) / spins.size, float(-int((sigma * np.roll(sigma, -1)).sum())), code


def _quantum_sweeps(spins, p, schedule, sites, uniforms, mag, energy, codes, basis):
    n = spins.size
    even, odd = np.arange(0, n, 2), np.arange(1, n, 2)
    for s in range(uniforms.shape[0]):
        if schedule == 0:
            for cells in (even, odd):
                spins[cells] = _quantum_cells(spins[(cells - 1) % n], spins[cells],
                                              spins[(cells + 1) % n], p, uniforms[s, cells], basis)
        else:
            for j in range(n):
                k = np.array([sites[s, j]])
                spins[k] = _quantum_cells(spins[(k - 1) % n], spins[k], spins[(k + 1) % n],
                                          p, uniforms[s, j:j + 1], basis)
        mag[s], energy[s], codes[s] = _observables(spins)


def simulate(chain: IsingChain, params: MetropolisParams,
             schedule: ActivationSchedule = ActivationSchedule.SINGLE_RANDOM,
             sweeps: int = 1000, burn_in: int = 100, mode: str = "classical",
             rng: RngStream | None = None, *,
             basis: SingleQubitGate | None = None, n_batches: int = 50) -> IsingSeries:
    """Run ``sweeps`` sweeps in total and keep the ones after ``burn_in``.

    A sweep is both sublattices (even then odd) or ``N`` single-cell steps.
    ``mode`` is ``"classical"`` (compiled kernel when available) or
    ``"quantum_cell"`` (every activation runs the four-qubit cell circuit).
    """
    if not (isinstance(sweeps, int) and isinstance(burn_in, int)) or not sweeps > burn_in >= 0:
        raise ValueError(f"need sweeps > burn_in >= 0, got sweeps={sweeps}, burn_in={burn_in}")
    if mode not in ("classical", "quantum_cell"):
        raise ValueError(f"unknown mode {mode!r}")
    if rng is None:
        raise ValueError("simulate needs an RngStream")
    schedule = ActivationSchedule.parse(schedule)
    n = chain.n_cells
    _check_schedule(schedule, n)
    code = 0 if schedule is ActivationSchedule.EVEN_ODD else 1
    spins = np.ascontiguousarray(chain.spins.copy(), dtype=np.uint8)
    mag = np.empty(sweeps)
    energy = np.empty(sweeps)
    codes = np.empty(sweeps, dtype=np.int64)
    for start in range(0, sweeps, CHUNK_SWEEPS):
        stop = min(start + CHUNK_SWEEPS, sweeps)
        if code:
            sites = np.ascontiguousarray(rng.integers(0, n, size=(stop - start, n)), dtype=np.int64)
        else:
            sites = np.zeros((0, 0), dtype=np.int64)
        u = np.ascontiguousarray(rng.uniform((stop - start, n)))
        if mode == "classical":
            kernels.ising_run(spins, float(params.p), code, sites, u,
                              mag[start:stop], energy[start:stop], codes[start:stop])
        else:
            _quantum_sweeps(spins, params.p, code, sites, u,
                            mag[start:stop], energy[start:stop], codes[start:stop], basis)
    keep = slice(burn_in, sweeps)
    return IsingSeries(
        sweep=np.arange(burn_in + 1, sweeps + 1),
        magnetization=mag[keep],
        energy=energy[keep],
        nn_correlation=-energy[keep] / n,
        state_codes=codes[keep],
        final=IsingChain(spins),
        n_batches=n_batches,
    )


def exact_correlation(n_cells: int, beta_j: float, distance: int) -> float:
    """<sigma_k sigma_{k+m}> on the periodic chain: (t^m + t^{N-m}) / (1 + t^N), t = tanh(beta J)."""
    if not 0 <= distance <= n_cells:
        raise ValueError(f"distance must lie in [0, {n_cells}], got {distance}")
    t = math.tanh(beta_j)
    return (t ** distance + t ** (n_cells - distance)) / (1 + t ** n_cells)
