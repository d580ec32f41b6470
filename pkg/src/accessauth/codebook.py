"""Spreading codebook, per-device spreading pools and access-bit tagging.

Device indices are 0-based throughout the library; exported files use 1-based
device numbers.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidDimensions, LengthMismatch
from .schedule import AccessSchedule

_BASE_ALPHABET = (
    1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j,
    3 + 1j, 3 - 1j, -3 + 1j, -3 - 1j,
    1 + 3j, 1 - 3j, -1 + 3j, -1 - 3j,
)
DEFAULT_ALPHABET = tuple(complex(a) for a in _BASE_ALPHABET)
# fraction of zero entries in the 4x6 example codebook (2 of 24)
DEFAULT_SPARSITY = 1 / 12
DEFAULT_CANDIDATES = 4


@dataclass(frozen=True, eq=False)
class Codebook:
    """``N x K`` complex spreading matrix; column ``k`` is device ``k``'s sequence."""

    entries: np.ndarray
    alphabet: tuple[complex, ...] = ()

    def __post_init__(self):
        c = np.array(self.entries, dtype=np.complex128)
        if c.ndim != 2 or 0 in c.shape:
            raise InvalidDimensions(f"codebook must be a non-empty 2-D matrix, got shape {c.shape}")
        if not np.all(np.any(c != 0, axis=0)):
            raise InvalidDimensions("every codebook column needs a nonzero entry")
        c.setflags(write=False)
        object.__setattr__(self, "entries", c)

    @property
    def N(self) -> int:
        return self.entries.shape[0]

    @property
    def K(self) -> int:
        return self.entries.shape[1]

    @property
    def overloaded(self) -> bool:
        return self.K > self.N

    @property
    def overloading_factor(self) -> float:
        return 100.0 * self.K / self.N

    def column(self, k: int) -> np.ndarray:
        return self.entries[:, k]

    def __eq__(self, other):
        if not isinstance(other, Codebook):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)


def build_codebook(N: int, K: int, sparsity: float, rng: np.random.Generator,
                   alphabet=None, zero_mask=None, normalize: bool = True) -> Codebook:
    """Draw a random sparse codebook.

    Each entry is zero with probability ``sparsity``, otherwise uniform over
    ``alphabet``. ``zero_mask`` (boolean ``N x K``) forces zeros at fixed
    positions instead of drawing them. Columns that come out all-zero are
    redrawn. With ``normalize`` the matrix is scaled so the mean column energy
    is one.
    """
    if int(N) != N or int(K) != K or N < 1 or K < 1:
        raise InvalidDimensions(f"need N >= 1 and K >= 1, got N={N}, K={K}")
    if not 0 <= sparsity < 1:
        raise InvalidDimensions(f"sparsity must be in [0, 1), got {sparsity}")
    alpha = np.array(DEFAULT_ALPHABET if alphabet is None else alphabet, dtype=np.complex128)
    if alpha.size == 0 or np.any(alpha == 0):
        raise InvalidDimensions("alphabet must be non-empty and exclude zero")
    N, K = int(N), int(K)

    values = alpha[rng.integers(0, alpha.size, size=(N, K))]
    if zero_mask is not None:
        zeros = np.asarray(zero_mask, dtype=bool)
        if zeros.shape != (N, K):
            raise InvalidDimensions(f"zero_mask shape {zeros.shape} != {(N, K)}")
        if np.any(zeros.all(axis=0)):
            raise InvalidDimensions("zero_mask blanks a whole column")
    else:
        zeros = rng.random((N, K)) < sparsity
        dead = np.flatnonzero(zeros.all(axis=0))
        while dead.size:
            zeros[:, dead] = rng.random((N, dead.size)) < sparsity
            dead = dead[zeros[:, dead].all(axis=0)]
    values[zeros] = 0

    if normalize:
        mean_energy = np.mean(np.sum(np.abs(values) ** 2, axis=0))
        values = values / np.sqrt(mean_energy)
        alpha = alpha / np.sqrt(mean_energy)
    return Codebook(values, tuple(complex(a) for a in alpha))


def construct_pools(cb: Codebook, length: int | None = None) -> list[np.ndarray]:
    """Spreading pool of every device: its codebook column, cycled to ``length``."""
    n = cb.N if length is None else int(length)
    if n < 1:
        raise ValueError("pool length must be at least 1")
    rows = np.arange(n) % cb.N
    return [cb.entries[rows, k].copy() for k in range(cb.K)]


@dataclass(frozen=True, eq=False)
class TaggedPool:
    device_id: int
    values: np.ndarray
    tags: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.complex128).ravel()
        t = np.array(self.tags, dtype=np.uint8).ravel()
        if v.size != t.size:
            raise LengthMismatch(f"{v.size} pool entries but {t.size} tags")
        v.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "tags", t)

    def __len__(self) -> int:
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, TaggedPool):
            return NotImplemented
        return (self.device_id == other.device_id and np.array_equal(self.values, other.values)
                and np.array_equal(self.tags, other.tags))

    def untag(self) -> np.ndarray:
        return self.values.copy()


def tag_pool(pool, sched: AccessSchedule) -> TaggedPool:
    pool = np.asarray(pool, dtype=np.complex128).ravel()
    if pool.size != len(sched):
        raise LengthMismatch(f"pool has {pool.size} entries, schedule has {len(sched)} bits")
    return TaggedPool(sched.device_id, pool, sched.bits)


def candidate_sequences(column, P: int = DEFAULT_CANDIDATES) -> np.ndarray:
    """The ``P`` cyclic shifts of a base column, one per row."""
    column = np.asarray(column)
    return np.stack([np.roll(column, v) for v in range(P)])


def sequence_index(position: int, offset: int, P: int = DEFAULT_CANDIDATES) -> int:
    """Which candidate is in use at window position ``position`` (0-based)."""
    return (position + offset) % P


def expected_sequences(cb: Codebook, devices, position: int, offsets, P: int = DEFAULT_CANDIDATES) -> np.ndarray:
    """Columns in use at ``position`` for ``devices``; returns ``N x len(devices)``."""
    devices = np.asarray(devices, dtype=np.intp)
    shifts = (position + np.asarray(offsets, dtype=np.intp)[devices]) % P
    rows = (np.arange(cb.N)[:, None] - shifts[None, :]) % cb.N
    return cb.entries[rows, devices[None, :]]


# --- text format: one matrix row per line, comma-separated "re+imi" tokens ---

def _format_entry(z: complex) -> str:
    re, im = float(z.real), float(z.imag)
    sign = "-" if (im < 0 or (im == 0 and np.signbit(im))) else "+"
    return f"{re!r}{sign}{abs(im)!r}i"


def _parse_entry(token: str) -> complex:
    token = token.strip()
    if not token.endswith("i"):
        raise ValueError(f"bad codebook token {token!r}")
    return complex(token[:-1] + "j")


def format_codebook(cb: Codebook) -> str:
    lines = [",".join(_format_entry(z) for z in row) for row in cb.entries]
    return "\n".join(lines) + "\n"


def parse_codebook(text: str) -> Codebook:
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([_parse_entry(tok) for tok in line.split(",")])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    if len({len(r) for r in rows}) > 1:
        raise InvalidDimensions("ragged codebook rows")
    return Codebook(np.array(rows, dtype=np.complex128))


def write_codebook(cb: Codebook, path) -> None:
    Path(path).write_text(format_codebook(cb))


def read_codebook(path) -> Codebook:
    return parse_codebook(Path(path).read_text())
