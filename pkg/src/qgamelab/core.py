"""Dense state-vector engine with the tactic catalog.

Conventions
-----------
* Little-endian qubit order: bit ``q`` of a basis index is the value of qubit
  ``q`` (qubit 0 is the least significant bit).
* ``NOT`` is the SU(2) matrix ``[[0, i], [i, 0]]`` and ``H`` is
  ``(i/sqrt 2)[[1, 1], [1, -1]]``. They differ from the Pauli X and the usual
  Hadamard by a global phase of ``i``, so a controlled ``NOT`` puts a phase
  ``i`` on the flipped branch. Compare gates with :func:`equal_up_to_phase`
  and states at the level of probabilities.
* Controls are positive only (fire on 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._backend import kernels
from .rng import RngStream

UNITARY_TOL = 1e-10
NORM_TOL = 1e-10
DEGENERATE_NORM = 1e-12
MAX_QUBITS = 16


class DegenerateStateError(ValueError):
    """Raised when a measurement branch has (numerically) zero weight."""


class SingleQubitGate:
    """A 2x2 unitary. Construction checks ``M^dagger M = I`` entrywise."""

    __slots__ = ("matrix",)

    def __init__(self, matrix, tol: float = UNITARY_TOL):
        m = np.array(matrix, dtype=np.complex128)
        if m.shape != (2, 2):
            raise ValueError(f"gate must be 2x2, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("gate entries must be finite")
        dev = np.max(np.abs(m.conj().T @ m - np.eye(2)))
        if dev > tol:
            raise ValueError(f"gate is not unitary (deviation {dev:.3g})")
        m.setflags(write=False)
        self.matrix = m

    m00 = property(lambda self: complex(self.matrix[0, 0]))
    m01 = property(lambda self: complex(self.matrix[0, 1]))
    m10 = property(lambda self: complex(self.matrix[1, 0]))
    m11 = property(lambda self: complex(self.matrix[1, 1]))

    def __matmul__(self, other: "SingleQubitGate") -> "SingleQubitGate":
        return compose(self, other)

    def dagger(self) -> "SingleQubitGate":
        return SingleQubitGate(self.matrix.conj().T)

    def __pow__(self, k: int) -> "SingleQubitGate":
        if k < 0:
            return self.dagger() ** (-k)
        return SingleQubitGate(np.linalg.matrix_power(self.matrix, k))

    def __repr__(self):
        rows = ", ".join(
            "[" + ", ".join(f"{z.real:.4g}{z.imag:+.4g}j" for z in row) + "]"
            for row in self.matrix
        )
        return f"SingleQubitGate([{rows}])"


_I2 = np.eye(2, dtype=np.complex128)
_NOT = np.array([[0, 1j], [1j, 0]])
_H = (1j / math.sqrt(2)) * np.array([[1, 1], [1, -1]], dtype=np.complex128)


def _exp_generator(generator, phi):
    # Valid for any generator G with G @ G = -I (NOT and H both qualify).
    return _I2 * math.cos(phi) + generator * math.sin(phi)


def gate(name: str, *params: float) -> SingleQubitGate:
    """Build a catalog tactic.

    ==============  ======================================================
    name            matrix
    ==============  ======================================================
    ``identity``    I
    ``not``         [[0, i], [i, 0]]
    ``hadamard``    (i/sqrt 2)[[1, 1], [1, -1]]
    ``root_not``    n-th root of NOT: I cos(pi/2n) + NOT sin(pi/2n)
    ``exp_not``     e^{NOT phi} = I cos(phi) + NOT sin(phi)
    ``exp_h``       e^{H phi} = I cos(phi) + H sin(phi)
    ``not_pow``     NOT^r = e^{NOT r pi/2}
    ``v``           V_alpha(beta) = NOT cos(beta)
                    + (I cos(alpha) + H NOT H sin(alpha)) sin(beta)
    ==============  ======================================================
    """
    arity = {"identity": 0, "not": 0, "hadamard": 0, "root_not": 1,
             "exp_not": 1, "exp_h": 1, "not_pow": 1, "v": 2}
    if name not in arity:
        raise ValueError(f"unknown gate {name!r}; expected one of {sorted(arity)}")
    if len(params) != arity[name]:
        raise ValueError(f"gate {name!r} takes {arity[name]} parameter(s), got {len(params)}")
    if name == "identity":
        m = _I2
    elif name == "not":
        m = _NOT
    elif name == "hadamard":
        m = _H
    elif name == "root_not":
        n = params[0]
        if n != int(n) or n < 1:
            raise ValueError(f"root_not needs an integer n >= 1, got {n}")
        m = _exp_generator(_NOT, math.pi / (2 * int(n)))
    elif name == "exp_not":
        m = _exp_generator(_NOT, params[0])
    elif name == "exp_h":
        m = _exp_generator(_H, params[0])
    elif name == "not_pow":
        m = _exp_generator(_NOT, params[0] * math.pi / 2)
    else:
        alpha, beta = params
        hnoth = _H @ _NOT @ _H
        m = _NOT * math.cos(beta) + (_I2 * math.cos(alpha) + hnoth * math.sin(alpha)) * math.sin(beta)
    return SingleQubitGate(m)


def gate_for_state(psi) -> SingleQubitGate:
    """Unitary mapping |0> to the normalized qubit state ``psi``."""
    a, b = np.asarray(psi, dtype=np.complex128)
    nrm = math.hypot(abs(a), abs(b))
    a, b = a / nrm, b / nrm
    return SingleQubitGate([[a, -b.conjugate()], [b, a.conjugate()]])


PAULI_X = SingleQubitGate([[0, 1], [1, 0]])


def compose(g2: SingleQubitGate, g1: SingleQubitGate) -> SingleQubitGate:
    """``g2 @ g1``: apply ``g1`` first, then ``g2``."""
    return SingleQubitGate(g2.matrix @ g1.matrix)


def equal_up_to_phase(g1: SingleQubitGate, g2: SingleQubitGate, tol: float = 1e-10) -> bool:
    """True iff ``g1 = lambda * g2`` entrywise within ``tol`` for some unit ``lambda``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    overlap = np.trace(g2.matrix.conj().T @ g1.matrix) / 2
    if abs(overlap) < 1e-15:
        return False
    lam = overlap / abs(overlap)
    return bool(np.max(np.abs(g1.matrix - lam * g2.matrix)) <= tol)


@dataclass(frozen=True)
class GateOp:
    """``gate`` on ``target``, conditioned on every qubit in ``controls`` being 1."""

    gate: SingleQubitGate
    target: int
    controls: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        if self.target in self.controls:
            raise ValueError("target qubit cannot also be a control")
        if len(set(self.controls)) != len(self.controls):
            raise ValueError("duplicate control qubits")

    def check(self, num_qubits: int):
        for q in (self.target, *self.controls):
            if not 0 <= q < num_qubits:
                raise IndexError(f"qubit index {q} out of range for {num_qubits} qubits")

    @property
    def ctrl_mask(self) -> int:
        mask = 0
        for c in self.controls:
            mask |= 1 << c
        return mask


def cnot(control: int, target: int) -> GateOp:
    """The alliance: NOT on ``target`` controlled by ``control``."""
    return GateOp(gate("not"), target, (control,))


def toffoli(c1: int, c2: int, target: int) -> GateOp:
    return GateOp(gate("not"), target, (c1, c2))


def controlled_swap(control: int, a: int, b: int) -> list[GateOp]:
    """Fredkin gate as three Pauli-X based ops (no stray phases)."""
    return [
        GateOp(PAULI_X, a, (b,)),
        GateOp(PAULI_X, b, (control, a)),
        GateOp(PAULI_X, a, (b,)),
    ]


def bloch_state(theta: float, phi: float) -> np.ndarray:
    """cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>."""
    return np.array([math.cos(theta / 2), complex(math.cos(phi), math.sin(phi)) * math.sin(theta / 2)])


def _check_target(num_qubits, target):
    if not 0 <= target < num_qubits:
        raise IndexError(f"qubit index {target} out of range for {num_qubits} qubits")


def _tensor_rows(qubit_states: Sequence[np.ndarray]) -> np.ndarray:
    """Row-wise tensor product of per-qubit (B, 2) arrays, qubit 0 least significant."""
    out = np.asarray(qubit_states[0], dtype=np.complex128)
    for v in qubit_states[1:]:
        v = np.asarray(v, dtype=np.complex128)
        out = (v[:, :, None] * out[:, None, :]).reshape(out.shape[0], -1)
    return np.ascontiguousarray(out)


class PureState:
    """Normalized amplitude vector over ``num_qubits`` qubits."""

    __slots__ = ("num_qubits", "amps")

    def __init__(self, amps, check: bool = True):
        a = np.array(amps, dtype=np.complex128).ravel()
        m = int(a.size).bit_length() - 1
        if a.size < 2 or (1 << m) != a.size:
            raise ValueError(f"amplitude vector length must be 2^m with m >= 1, got {a.size}")
        if m > MAX_QUBITS:
            raise ValueError(f"at most {MAX_QUBITS} qubits supported")
        if check:
            if not np.all(np.isfinite(a)):
                raise ValueError("amplitudes must be finite")
            norm = float(np.vdot(a, a).real)
            if abs(norm - 1) > NORM_TOL:
                raise ValueError(f"state is not normalized (norm^2 = {norm!r})")
        self.num_qubits = m
        self.amps = a

    @classmethod
    def basis(cls, bits: Sequence[int]) -> "PureState":
        """Computational basis state; ``bits[q]`` is the value of qubit ``q``."""
        a = np.zeros(1 << len(bits), dtype=np.complex128)
        a[sum(int(b) << q for q, b in enumerate(bits))] = 1
        return cls(a)

    @classmethod
    def zero(cls, num_qubits: int) -> "PureState":
        return cls.basis([0] * num_qubits)

    @classmethod
    def product(cls, qubit_states: Sequence) -> "PureState":
        """Tensor product of single-qubit vectors, listed from qubit 0 upward."""
        rows = []
        for v in qubit_states:
            v = np.asarray(v, dtype=np.complex128)
            rows.append((v / np.linalg.norm(v))[None, :])
        return cls(_tensor_rows(rows)[0])

    def copy(self) -> "PureState":
        return PureState(self.amps.copy(), check=False)

    def norm_squared(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def distribution(self) -> np.ndarray:
        """Born probabilities of every basis index."""
        return np.abs(self.amps) ** 2

    def __repr__(self):
        return f"PureState(num_qubits={self.num_qubits}, amps={np.round(self.amps, 6)!r})"


def apply(state: PureState, op: GateOp) -> PureState:
    """New state with ``op`` applied."""
    op.check(state.num_qubits)
    amps = state.amps.copy()[None, :]
    kernels.apply_gate(amps, op.gate.matrix[None, :, :].copy(), op.target, op.ctrl_mask)
    return PureState(amps[0], check=False)


def apply_all(state: PureState, ops: Sequence[GateOp]) -> PureState:
    for op in ops:
        state = apply(state, op)
    return state


def probability(state: PureState, target: int, outcome: int) -> float:
    """Born probability that measuring ``target`` yields ``outcome``."""
    _check_target(state.num_qubits, target)
    idx = np.arange(state.amps.size)
    sel = ((idx >> target) & 1) == outcome
    p = float(np.sum(np.abs(state.amps[sel]) ** 2))
    return min(max(p, 0.0), 1.0)


def project(state: PureState, target: int, outcome: int) -> tuple[float, PureState]:
    """Probability of ``outcome`` and the renormalized post-measurement state."""
    p = probability(state, target, outcome)
    if p < DEGENERATE_NORM:
        raise DegenerateStateError(
            f"branch qubit {target} = {outcome} has weight {p:.3g}; nothing to renormalize"
        )
    idx = np.arange(state.amps.size)
    amps = np.where(((idx >> target) & 1) == outcome, state.amps, 0) / math.sqrt(p)
    return p, PureState(amps, check=False)


def measure(state: PureState, target: int, rng: RngStream) -> tuple[int, PureState]:
    """Sample ``target`` by the Born rule and collapse."""
    p1 = probability(state, target, 1)
    bit = int(rng.uniform() < p1)
    _, post = project(state, target, bit)
    return bit, post


def measure_in_basis(state: PureState, target: int, basis: SingleQubitGate,
                     rng: RngStream) -> tuple[int, PureState]:
    """Measure ``target`` in the frame ``{basis|0>, basis|1>}``.

    Outcome ``b`` means the qubit was found in ``basis|b>``; the returned
    state holds it there.
    """
    rotated = apply(state, GateOp(basis.dagger(), target))
    bit, post = measure(rotated, target, rng)
    return bit, apply(post, GateOp(basis, target))


class StateBatch:
    """Many independent states of the same width, advanced in lockstep.

    Gates may be shared by all rows or given per row as a ``(rows, 2, 2)``
    stack; measurements consume one uniform per row.
    """

    def __init__(self, amps):
        a = np.array(amps, dtype=np.complex128, order="C")  # always an owned, writable copy
        if a.ndim != 2:
            raise ValueError("batch amplitudes must be 2-D (rows, 2^m)")
        m = int(a.shape[1]).bit_length() - 1
        if (1 << m) != a.shape[1] or m < 1:
            raise ValueError("row length must be 2^m with m >= 1")
        self.num_qubits = m
        self.amps = a

    @classmethod
    def product(cls, qubit_states: Sequence[np.ndarray]) -> "StateBatch":
        """Row-wise product state; each entry is a ``(rows, 2)`` array or a
        single 2-vector broadcast to every row."""
        rows = max(np.atleast_2d(v).shape[0] for v in qubit_states)
        cols = [np.broadcast_to(np.atleast_2d(np.asarray(v, dtype=np.complex128)), (rows, 2))
                for v in qubit_states]
        return cls(_tensor_rows(cols))

    @classmethod
    def basis(cls, bits: Sequence, rows: int | None = None) -> "StateBatch":
        """Rows of computational basis states; ``bits[q]`` is a scalar or a
        per-row bit array for qubit ``q``."""
        arrs = [np.atleast_1d(np.asarray(b, dtype=np.int64)) for b in bits]
        n = rows or max(a.size for a in arrs)
        a = np.zeros((n, 1 << len(bits)), dtype=np.complex128)
        index = sum(np.broadcast_to(b, (n,)) << q for q, b in enumerate(arrs))
        a[np.arange(n), index] = 1
        return cls(a)

    @property
    def rows(self) -> int:
        return self.amps.shape[0]

    def apply(self, op: GateOp) -> "StateBatch":
        op.check(self.num_qubits)
        kernels.apply_gate(self.amps, op.gate.matrix[None, :, :].copy(), op.target, op.ctrl_mask)
        return self

    def apply_rows(self, matrices: np.ndarray, target: int, controls: Sequence[int] = ()) -> "StateBatch":
        """Apply a different 2x2 matrix to each row."""
        mats = np.ascontiguousarray(matrices, dtype=np.complex128)
        if mats.shape != (self.rows, 2, 2):
            raise ValueError(f"expected per-row matrices of shape ({self.rows}, 2, 2)")
        GateOp(SingleQubitGate(np.eye(2)), target, tuple(controls)).check(self.num_qubits)
        mask = 0
        for c in controls:
            mask |= 1 << c
        kernels.apply_gate(self.amps, mats, target, mask)
        return self

    def apply_where(self, rows_mask: np.ndarray, g: SingleQubitGate, target: int,
                    controls: Sequence[int] = ()) -> "StateBatch":
        """Apply ``g`` only on rows where ``rows_mask`` is true."""
        mats = np.where(np.asarray(rows_mask, dtype=bool)[:, None, None], g.matrix, _I2)
        return self.apply_rows(mats, target, controls)

    def probability(self, target: int, outcome: int) -> np.ndarray:
        _check_target(self.num_qubits, target)
        idx = np.arange(self.amps.shape[1])
        sel = ((idx >> target) & 1) == outcome
        p = np.sum(np.abs(self.amps[:, sel]) ** 2, axis=1)
        return np.clip(p, 0.0, 1.0)

    def collapse(self, target: int, bits: np.ndarray) -> "StateBatch":
        """Project each row onto its given outcome and renormalize."""
        bits = np.asarray(bits, dtype=np.int64)
        idx = np.arange(self.amps.shape[1])
        keep = ((idx[None, :] >> target) & 1) == bits[:, None]
        self.amps[~keep] = 0
        w = np.sum(np.abs(self.amps) ** 2, axis=1)
        if np.any(w < DEGENERATE_NORM):
            raise DegenerateStateError(f"a measured branch of qubit {target} has zero weight")
        self.amps /= np.sqrt(w)[:, None]
        return self

    def measure(self, target: int, uniforms: np.ndarray) -> np.ndarray:
        """Born-rule sample of ``target`` per row (bit = u < P(1)); collapses in place."""
        bits = (np.asarray(uniforms) < self.probability(target, 1)).astype(np.uint8)
        self.collapse(target, bits)
        return bits

    def measure_in_basis(self, target: int, bases: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
        """Per-row conjugate-basis measurement; ``bases[r]`` maps |0> to the
        state that outcome 0 stands for."""
        bases = np.ascontiguousarray(bases, dtype=np.complex128)
        self.apply_rows(np.conj(np.swapaxes(bases, 1, 2)), target)
        bits = self.measure(target, uniforms)
        self.apply_rows(bases, target)
        return bits

    def reset(self, target: int, bits: np.ndarray) -> "StateBatch":
        """Return a just-measured qubit to |0> (flip rows whose outcome was 1)."""
        return self.apply_where(np.asarray(bits) == 1, PAULI_X, target)

    def state(self, row: int) -> PureState:
        return PureState(self.amps[row].copy(), check=False)
