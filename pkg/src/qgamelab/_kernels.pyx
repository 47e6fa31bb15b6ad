# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: batched controlled-gate application and Ising sweeps.

Both functions mirror :mod:`qgamelab._pykernels` exactly; randomness is
supplied by the caller as pre-drawn uniforms so the two backends agree bit
for bit.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef double complex cplx


def apply_gate(cplx[:, ::1] amps, const cplx[:, :, ::1] gates, int target,
               unsigned long long ctrl_mask):
    """In-place: apply ``gates[row]`` (or ``gates[0]``) to ``target`` on
    every basis index whose ``ctrl_mask`` bits are all set."""
    cdef Py_ssize_t n_rows = amps.shape[0]
    cdef Py_ssize_t dim = amps.shape[1]
    cdef Py_ssize_t n_gates = gates.shape[0]
    cdef unsigned long long tbit = 1ULL << target
    cdef Py_ssize_t r, g, i, j
    cdef cplx g00, g01, g10, g11, a0, a1
    if n_gates != 1 and n_gates != n_rows:
        raise ValueError("gates must have length 1 or match the batch")
    for r in range(n_rows):
        g = 0 if n_gates == 1 else r
        g00 = gates[g, 0, 0]
        g01 = gates[g, 0, 1]
        g10 = gates[g, 1, 0]
        g11 = gates[g, 1, 1]
        for i in range(dim):
            if (<unsigned long long>i & tbit) or (<unsigned long long>i & ctrl_mask) != ctrl_mask:
                continue
            j = i | tbit
            a0 = amps[r, i]
            a1 = amps[r, j]
            amps[r, i] = g00 * a0 + g01 * a1
            amps[r, j] = g10 * a0 + g11 * a1


cdef inline int _rule(int left, int mid, int right, int ancilla) nogil:
    if ancilla and left == mid and mid == right:
        return mid
    return 1 - mid


def ising_run(unsigned char[::1] spins, double p, int schedule,
              const long long[:, ::1] sites, const double[:, ::1] uniforms,
              double[::1] magnetization, double[::1] energy,
              long long[::1] codes):
    """Advance ``spins`` in place by ``uniforms.shape[0]`` sweeps.

    ``schedule`` 0 is even/odd sublattice alternation (one uniform per cell
    per sweep); 1 is single random cell, with ``sites[s, j]`` the cell
    chosen at step ``j`` of sweep ``s``.
    """
    cdef Py_ssize_t n = spins.shape[0]
    cdef Py_ssize_t n_sweeps = uniforms.shape[0]
    cdef Py_ssize_t s, j, k, parity
    cdef long long msum, esum, code
    cdef int sk
    for s in range(n_sweeps):
        if schedule == 0:
            for parity in range(2):
                k = parity
                while k < n:
                    spins[k] = _rule(spins[(k - 1 + n) % n], spins[k],
                                     spins[(k + 1) % n], uniforms[s, k] < p)
                    k += 2
        else:
            for j in range(n):
                k = sites[s, j]
                spins[k] = _rule(spins[(k - 1 + n) % n], spins[k],
                                 spins[(k + 1) % n], uniforms[s, j] < p)
        msum = 0
        esum = 0
        code = 0
        for k in range(n):
            sk = 1 - 2 * spins[k]
            msum += sk
            esum -= sk * (1 - 2 * spins[(k + 1) % n])
            if n <= 62 and spins[k]:
                code |= 1LL << k
        magnetization[s] = <double>msum / n
        energy[s] = <double>esum
        codes[s] = code if n <= 62 else -1
