# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: LFSR clocking and per-column sequence matching."""
import numpy as np

from libc.math cimport isnan


def lfsr_run(const unsigned char[:] state, const Py_ssize_t[:] taps, Py_ssize_t count):
    cdef Py_ssize_t mu = state.shape[0]
    cdef Py_ssize_t ntaps = taps.shape[0]
    cdef Py_ssize_t i, t, head = 0
    cdef unsigned char fb
    # ring buffer: logical register index r lives at reg[(head + r) % mu]
    reg_arr = np.array(state, dtype=np.uint8)
    out_arr = np.empty(count, dtype=np.uint8)
    cdef unsigned char[:] reg = reg_arr
    cdef unsigned char[:] out = out_arr
    for i in range(count):
        out[i] = reg[(head + mu - 1) % mu]
        fb = 0
        for t in range(ntaps):
            fb ^= reg[(head + taps[t]) % mu]
        head = (head + mu - 1) % mu
        reg[head] = fb
    final = np.empty(mu, dtype=np.uint8)
    cdef unsigned char[:] fin = final
    for i in range(mu):
        fin[i] = reg[(head + i) % mu]
    return out_arr, final


def lfsr_period(const unsigned char[:] state, const Py_ssize_t[:] taps, Py_ssize_t limit):
    cdef Py_ssize_t mu = state.shape[0]
    cdef Py_ssize_t ntaps = taps.shape[0]
    cdef Py_ssize_t n, t, i, head = 0
    cdef unsigned char fb
    cdef bint same
    reg_arr = np.array(state, dtype=np.uint8)
    cdef unsigned char[:] reg = reg_arr
    for n in range(1, limit + 1):
        fb = 0
        for t in range(ntaps):
            fb ^= reg[(head + taps[t]) % mu]
        head = (head + mu - 1) % mu
        reg[head] = fb
        same = True
        for i in range(mu):
            if reg[(head + i) % mu] != state[i]:
                same = False
                break
        if same:
            return n
    return 0


def match_sequence(const double complex[:] extracted, const double complex[:] expected,
                   double rtol, double max_erased_frac):
    cdef Py_ssize_t n = expected.shape[0]
    cdef Py_ssize_t i, erased = 0
    cdef double err2 = 0.0, ref2 = 0.0, dr, di
    cdef double complex z, e
    for i in range(n):
        z = extracted[i]
        if isnan(z.real) or isnan(z.imag):
            erased += 1
            continue
        e = expected[i]
        dr = z.real - e.real
        di = z.imag - e.imag
        err2 += dr * dr + di * di
        ref2 += e.real * e.real + e.imag * e.imag
    if n == 0 or erased > max_erased_frac * n:
        return 0
    return 1 if err2 <= rtol * rtol * ref2 else 0
