"""Compare the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from accessauth import _kernels_py

try:
    from accessauth import _kernels
except ImportError:
    _kernels = None


def cases(rng):
    state = np.array([0, 0, 0, 0, 0, 0, 0, 0, 0, 1], dtype=np.uint8)
    taps = np.array([2, 9], dtype=np.intp)             # 1 + x^3 + x^10
    n = 100
    expected = (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    extracted = expected * (1 + 1e-9)
    extracted[::17] = np.nan
    return {
        "lfsr_run 10k bits": lambda k: k.lfsr_run(state, taps, 10_000),
        "lfsr_period mu=10": lambda k: k.lfsr_period(state, taps, 2 ** 10),
        "match_sequence N=100 x200": lambda k: [k.match_sequence(extracted, expected, 1e-6, 0.5) for _ in range(200)],
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--number", type=int, default=20)
    args = ap.parse_args()

    backends = {"python": _kernels_py}
    if _kernels is not None:
        backends["cython"] = _kernels
    else:
        print("compiled extension not built; timing the fallback only")

    rng = np.random.default_rng(0)
    print(f"{'kernel':<28}" + "".join(f"{b:>14}" for b in backends) + f"{'speedup':>10}")
    for name, fn in cases(rng).items():
        results = [fn(k) for k in backends.values()]
        if len(results) == 2:
            a, b = results
            same = all(np.array_equal(x, y) for x, y in zip(a, b)) if isinstance(a, tuple) else a == b
            assert same, f"{name}: backends disagree"
        times = {}
        for b, k in backends.items():
            t = min(timeit.repeat(lambda: fn(k), number=args.number, repeat=args.repeat))
            times[b] = t / args.number
        row = f"{name:<28}" + "".join(f"{times[b] * 1e6:>12.1f}us" for b in backends)
        if "cython" in times:
            row += f"{times['python'] / times['cython']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
