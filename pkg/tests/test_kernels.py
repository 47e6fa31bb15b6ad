"""The compiled kernels and the numpy fallback must agree bit for bit."""

import os

import numpy as np
import pytest

from qgamelab import _pykernels
from qgamelab._backend import BACKEND

from conftest import kron_unitary

compiled = pytest.importorskip("qgamelab._kernels")
BACKENDS = [_pykernels, compiled]


def random_unitary(gen):
    z = gen.normal(size=(2, 2)) + 1j * gen.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_backend_selection():
    # the extension is importable here, so it is used unless the fallback is forced
    expected = "python" if os.environ.get("QGAMELAB_PURE") else "cython"
    assert BACKEND == expected


@pytest.mark.parametrize("impl", BACKENDS, ids=["python", "cython"])
@pytest.mark.parametrize("num_qubits,target,controls", [
    (1, 0, ()), (2, 1, (0,)), (3, 0, (1, 2)), (4, 2, (0, 3)), (5, 4, ()),
])
def test_apply_gate_matches_dense_oracle(impl, num_qubits, target, controls):
    gen = np.random.default_rng(5)
    u = random_unitary(gen)
    amps = gen.normal(size=(3, 2 ** num_qubits)) + 1j * gen.normal(size=(3, 2 ** num_qubits))
    expected = amps @ kron_unitary(u, target, controls, num_qubits).T
    mask = sum(1 << c for c in controls)
    impl.apply_gate(amps, u[None].copy(), target, mask)
    np.testing.assert_allclose(amps, expected, atol=1e-12)


def test_apply_gate_per_row_stack_identical():
    gen = np.random.default_rng(9)
    gates = np.stack([random_unitary(gen) for _ in range(6)])
    amps = gen.normal(size=(6, 8)) + 1j * gen.normal(size=(6, 8))
    a, b = amps.copy(), amps.copy()
    _pykernels.apply_gate(a, gates, 1, 0b100)
    compiled.apply_gate(b, gates, 1, 0b100)
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-15)


def test_apply_gate_rejects_bad_stack():
    amps = np.zeros((3, 4), dtype=np.complex128)
    for impl in BACKENDS:
        with pytest.raises(ValueError):
            impl.apply_gate(amps, np.zeros((2, 2, 2), dtype=np.complex128), 0, 0)


@pytest.mark.parametrize("schedule", [0, 1])
@pytest.mark.parametrize("n", [4, 8, 16])
def test_ising_run_identical(schedule, n):
    gen = np.random.default_rng(n + schedule)
    sweeps = 300
    u = gen.random((sweeps, n))
    sites = gen.integers(0, n, size=(sweeps, n)) if schedule else np.zeros((0, 0), dtype=np.int64)
    start = gen.integers(0, 2, n).astype(np.uint8)
    outs = []
    for impl in BACKENDS:
        spins = start.copy()
        mag, en = np.empty(sweeps), np.empty(sweeps)
        codes = np.empty(sweeps, dtype=np.int64)
        impl.ising_run(spins, 0.6, schedule, np.ascontiguousarray(sites, dtype=np.int64), u,
                       mag, en, codes)
        outs.append((spins, mag, en, codes))
    for x, y in zip(outs[0], outs[1]):
        np.testing.assert_array_equal(x, y)
