"""Pseudo-random access time slots from a linear feedback shift register.

The register is Fibonacci style: on every clock the output bit is the last
register bit, the feedback bit (XOR of the register bits at the positions
``i`` where ``C_i = 1``, 1-based) enters at the front and everything shifts
one place towards the end.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._backend import kernels
from .errors import AllZeroSeed, EmptySeed, InvalidPolynomial, NonPrimitivePolynomial

# period measurement is cheap up to here
PRIMITIVITY_CHECK_MAX_DEGREE = 16


def _as_bits(bits) -> tuple[int, ...]:
    if isinstance(bits, str):
        bits = [c for c in bits if not c.isspace()]
    out = tuple(int(b) for b in bits)
    if any(b not in (0, 1) for b in out):
        raise ValueError(f"not a bit vector: {bits!r}")
    return out


def bits_to_str(bits) -> str:
    return "".join(str(int(b)) for b in bits)


@dataclass(frozen=True)
class MonicPolynomial:
    """Feedback polynomial ``C_0 + C_1 x + ... + C_mu x^mu`` over GF(2).

    ``coeffs`` is ascending: ``MonicPolynomial.from_string("1101")`` is
    ``1 + x + x^3``.
    """

    coeffs: tuple[int, ...]

    def __post_init__(self):
        coeffs = _as_bits(self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        if len(coeffs) < 2:
            raise InvalidPolynomial("degree must be at least 1")
        if coeffs[0] != 1 or coeffs[-1] != 1:
            raise InvalidPolynomial(f"C_0 and C_mu must both be 1, got {bits_to_str(coeffs)}")

    @classmethod
    def from_string(cls, text: str) -> "MonicPolynomial":
        try:
            return cls(_as_bits(text))
        except ValueError as exc:
            raise InvalidPolynomial(str(exc)) from None

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def taps(self) -> np.ndarray:
        """0-based register indices feeding the XOR."""
        return np.array([i - 1 for i in range(1, self.degree + 1) if self.coeffs[i]], dtype=np.intp)

    def __str__(self) -> str:
        return bits_to_str(self.coeffs)

    def pretty(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append("1" if i == 0 else ("x" if i == 1 else f"x^{i}"))
        return " + ".join(terms)


# 1 + x + x^3, the polynomial used throughout the worked examples
DEFAULT_POLYNOMIAL = MonicPolynomial.from_string("1101")


@dataclass(frozen=True)
class LfsrState:
    bits: tuple[int, ...]

    def __post_init__(self):
        bits = _as_bits(self.bits)
        object.__setattr__(self, "bits", bits)
        if not bits:
            raise EmptySeed("register state is empty")
        if not any(bits):
            raise AllZeroSeed("register state is all-zero")

    def as_array(self) -> np.ndarray:
        return np.array(self.bits, dtype=np.uint8)

    def __str__(self) -> str:
        return bits_to_str(self.bits)


@dataclass(frozen=True)
class AccessSchedule:
    """Transmission permission bits ``l_1 .. l_L`` for one device."""

    bits: np.ndarray
    device_id: int

    def __post_init__(self):
        arr = np.array(self.bits, dtype=np.uint8).ravel()
        if arr.size and arr.max() > 1:
            raise ValueError("schedule bits must be 0/1")
        arr.setflags(write=False)
        object.__setattr__(self, "bits", arr)

    def __len__(self) -> int:
        return self.bits.size

    def __eq__(self, other):
        if not isinstance(other, AccessSchedule):
            return NotImplemented
        return self.device_id == other.device_id and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.device_id, self.bits.tobytes()))

    def __str__(self) -> str:
        return bits_to_str(self.bits)


def lfsr_init(seed_bits, poly: MonicPolynomial) -> LfsrState:
    """Fold an arbitrary-length seed into a ``mu``-bit register state.

    Seeds longer than ``mu`` are cut into ``mu``-bit chunks (the last one
    zero-padded on the right) which are XORed together; shorter seeds are
    zero-padded on the right.
    """
    bits = _as_bits(seed_bits)
    if not bits:
        raise EmptySeed("seed has no bits")
    mu = poly.degree
    state = [0] * mu
    for start in range(0, len(bits), mu):
        chunk = bits[start:start + mu]
        for i, b in enumerate(chunk):
            state[i] ^= b
    if not any(state):
        raise AllZeroSeed(f"seed {bits_to_str(bits)} folds to the all-zero state for mu={mu}")
    return LfsrState(tuple(state))


def clock(state: LfsrState, poly: MonicPolynomial, count: int) -> tuple[np.ndarray, LfsrState]:
    """Like :func:`generate_bits` but also returns the register after the last clock."""
    if len(state.bits) != poly.degree:
        raise ValueError(f"state has {len(state.bits)} bits, polynomial degree is {poly.degree}")
    if count < 0:
        raise ValueError("count must be non-negative")
    out, final = kernels.lfsr_run(state.as_array(), poly.taps, int(count))
    return out, LfsrState(tuple(int(b) for b in final))


def generate_bits(state: LfsrState, poly: MonicPolynomial, count: int) -> np.ndarray:
    if count < 1:
        raise ValueError("count must be at least 1")
    return clock(state, poly, count)[0]


def period(poly: MonicPolynomial, state: LfsrState | None = None, limit: int | None = None) -> int:
    """Cycle length of the register started from ``state`` (default ``0...01``)."""
    mu = poly.degree
    if state is None:
        state = LfsrState((0,) * (mu - 1) + (1,))
    if limit is None:
        limit = 2 ** mu
    return int(kernels.lfsr_period(state.as_array(), poly.taps, int(limit)))


@lru_cache(maxsize=256)
def is_primitive(poly: MonicPolynomial) -> bool:
    """True when the register has maximal period ``2^mu - 1``.

    Measured by clocking, so only practical for small degrees.
    """
    return period(poly) == 2 ** poly.degree - 1


def check_polynomial(poly: MonicPolynomial) -> bool:
    """Warn if ``poly`` is not primitive (degrees above 16 are not checked)."""
    if poly.degree > PRIMITIVITY_CHECK_MAX_DEGREE:
        return True
    if not is_primitive(poly):
        warnings.warn(
            f"polynomial {poly.pretty()} is not primitive: period {period(poly)} < {2 ** poly.degree - 1}",
            NonPrimitivePolynomial,
            stacklevel=2,
        )
        return False
    return True


def monic_polynomials(degree: int):
    """Every polynomial of ``degree`` with ``C_0 = C_mu = 1``."""
    for middle in range(2 ** (degree - 1)):
        inner = [(middle >> i) & 1 for i in range(degree - 1)]
        yield MonicPolynomial(tuple([1] + inner + [1]))


def make_schedule(state: LfsrState, poly: MonicPolynomial, length: int, device_id: int) -> tuple[AccessSchedule, LfsrState]:
    bits, final = clock(state, poly, length)
    return AccessSchedule(bits, device_id), final
