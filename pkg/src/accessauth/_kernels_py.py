"""Pure-Python reference kernels.

Mirrors the compiled ``_kernels`` extension function for function; used when
the extension is not built or ``ACCESSAUTH_PURE_PYTHON`` is set.
"""
import math

import numpy as np


def lfsr_run(state, taps, count):
    """Clock a Fibonacci register ``count`` times.

    ``state`` is a uint8 vector, ``taps`` holds 0-based register indices
    feeding the XOR. Returns ``(output_bits, final_state)``.
    """
    reg = [int(b) for b in state]
    tap_list = [int(t) for t in taps]
    last = len(reg) - 1
    out = np.empty(count, dtype=np.uint8)
    for i in range(count):
        out[i] = reg[last]
        fb = 0
        for t in tap_list:
            fb ^= reg[t]
        reg.pop()
        reg.insert(0, fb)
    return out, np.array(reg, dtype=np.uint8)


def lfsr_period(state, taps, limit):
    """Clocks until the register returns to ``state``; 0 if above ``limit``."""
    start = [int(b) for b in state]
    reg = list(start)
    tap_list = [int(t) for t in taps]
    for n in range(1, limit + 1):
        fb = 0
        for t in tap_list:
            fb ^= reg[t]
        reg.pop()
        reg.insert(0, fb)
        if reg == start:
            return n
    return 0


def match_sequence(extracted, expected, rtol, max_erased_frac):
    """1 when ``extracted`` equals ``expected`` on non-erased entries.

    Erasures are NaN entries of ``extracted``. A column with more than
    ``max_erased_frac`` erasures never matches.
    """
    n = len(expected)
    erased = 0
    err2 = 0.0
    ref2 = 0.0
    for i in range(n):
        z = complex(extracted[i])
        if math.isnan(z.real) or math.isnan(z.imag):
            erased += 1
            continue
        e = complex(expected[i])
        d = z - e
        err2 += d.real * d.real + d.imag * d.imag
        ref2 += e.real * e.real + e.imag * e.imag
    if n == 0 or erased > max_erased_frac * n:
        return 0
    return 1 if err2 <= rtol * rtol * ref2 else 0
