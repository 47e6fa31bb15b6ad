"""Compare the compiled kernels with the numpy fallback.

Run with ``python3 benchmarks/bench_kernels.py``. Both backends receive the
same inputs, and their outputs are compared before timing.
"""

import argparse
import timeit

import numpy as np

from qgamelab import _pykernels
from qgamelab.core import gate
from qgamelab.rng import RngStream

try:
    from qgamelab import _kernels
except ImportError:  # extension not built
    _kernels = None


def gate_case(rows, qubits):
    rng = RngStream(1)
    amps = rng.uniform((rows, 2 ** qubits)) + 1j * rng.uniform((rows, 2 ** qubits))
    amps /= np.linalg.norm(amps, axis=1, keepdims=True)
    gates = gate("v", 0.3, 0.8).matrix[None]
    ctrl_mask = 0b1  # controlled on qubit 0, target qubit 1

    def run(mod):
        out = amps.copy()
        mod.apply_gate(out, gates, 1, ctrl_mask)
        return out

    return run


def ising_case(cells, sweeps, schedule):
    rng = RngStream(2)
    spins = np.zeros(cells, dtype=np.uint8)
    uniforms = np.ascontiguousarray(rng.uniform((sweeps, cells)))
    if schedule == 1:
        sites = np.ascontiguousarray(rng.integers(0, cells, size=(sweeps, cells)), dtype=np.int64)
    else:
        sites = np.zeros((0, 0), dtype=np.int64)
    p = -np.expm1(-2.0)

    def run(mod):
        s = spins.copy()
        mag, energy = np.empty(sweeps), np.empty(sweeps)
        codes = np.empty(sweeps, dtype=np.int64)
        mod.ising_run(s, p, schedule, sites, uniforms, mag, energy, codes)
        return np.concatenate([s, mag, energy, codes])

    return run


def bench(label, run, repeat):
    backends = {"python": _pykernels}
    if _kernels is not None:
        backends["cython"] = _kernels
    results = {name: run(mod) for name, mod in backends.items()}
    if "cython" in results:
        assert np.allclose(results["cython"], results["python"], rtol=0, atol=1e-14), label
    times = {name: min(timeit.repeat(lambda m=mod: run(m), number=1, repeat=repeat))
             for name, mod in backends.items()}
    line = f"{label:<40} python {times['python'] * 1e3:9.2f} ms"
    if "cython" in times:
        line += f"   cython {times['cython'] * 1e3:9.2f} ms   speedup {times['python'] / times['cython']:7.1f}x"
    print(line)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if _kernels is None:
        print("compiled extension not available; timing the fallback only")
    bench("apply_gate 8192 rows x 4 qubits", gate_case(8192, 4), args.repeat)
    bench("apply_gate 64 rows x 12 qubits", gate_case(64, 12), args.repeat)
    bench("ising_run N=16, 2000 sweeps, even/odd", ising_case(16, 2000, 0), args.repeat)
    bench("ising_run N=16, 2000 sweeps, single", ising_case(16, 2000, 1), args.repeat)
    bench("ising_run N=256, 200 sweeps, single", ising_case(256, 200, 1), args.repeat)


if __name__ == "__main__":
    main()
