"""Numpy implementations of the compiled kernels (same signatures, same results)."""

import numpy as np


def _active_indices(dim, target, ctrl_mask):
    idx = np.arange(dim, dtype=np.int64)
    keep = ((idx >> target) & 1 == 0) & ((idx & ctrl_mask) == ctrl_mask)
    return idx[keep]


def apply_gate(amps, gates, target, ctrl_mask):
    n_rows, dim = amps.shape
    if gates.shape[0] not in (1, n_rows):
        raise ValueError("gates must have length 1 or match the batch")
    i0 = _active_indices(dim, target, ctrl_mask)
    i1 = i0 | (1 << target)
    a0 = amps[:, i0]
    a1 = amps[:, i1]
    g = gates[:, :, :, None]
    amps[:, i0] = g[:, 0, 0] * a0 + g[:, 0, 1] * a1
    amps[:, i1] = g[:, 1, 0] * a0 + g[:, 1, 1] * a1


def _rule(left, mid, right, ancilla):
    stay = ancilla & (left == mid) & (mid == right)
    return np.where(stay, mid, 1 - mid).astype(np.uint8)


def ising_run(spins, p, schedule, sites, uniforms, magnetization, energy, codes):
    n = spins.shape[0]
    even = np.arange(0, n, 2)
    odd = np.arange(1, n, 2)
    weights = (1 << np.arange(n, dtype=np.int64)) if n <= 62 else None
    for s in range(uniforms.shape[0]):
        if schedule == 0:
            for cells in (even, odd):
                spins[cells] = _rule(spins[(cells - 1) % n], spins[cells],
                                     spins[(cells + 1) % n], uniforms[s, cells] < p)
        else:
            for j in range(n):
                k = int(sites[s, j])
                left, mid, right = spins[(k - 1) % n], spins[k], spins[(k + 1) % n]
                if uniforms[s, j] < p and left == mid == right:
                    continue
                spins[k] = 1 - mid
        sigma = 1 - 2 * spins.astype(np.int64)
        magnetization[s] = int(sigma.sum()) / n
        energy[s] = float(-int((sigma * np.roll(sigma, -1)).sum()))
        codes[s] = int(spins.astype(np.int64) @ weights) if weights is not None else -1
