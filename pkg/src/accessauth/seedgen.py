"""Seed derivation from a tagged spreading pool and schedule refresh.

Both ends of a link run exactly the same arithmetic on their own copy of the
pool, so no seed ever crosses the air interface.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .codebook import TaggedPool
from .errors import AllZeroSeed, DegenerateSelection
from .schedule import AccessSchedule, LfsrState, MonicPolynomial, clock, lfsr_init

DEFAULT_SEED_WIDTH = 13


class SeedVariant(str, enum.Enum):
    FULL = "full"   # squared preliminary seed
    LITE = "lite"   # preliminary seed as is, no squaring


@dataclass
class SeedCost:
    """Arithmetic performed while deriving seeds."""

    additions: int = 0
    squarings: int = 0

    def __add__(self, other: "SeedCost") -> "SeedCost":
        return SeedCost(self.additions + other.additions, self.squarings + other.squarings)


@dataclass(frozen=True)
class Seed:
    theta: float
    value: float
    variant: SeedVariant


def complement_tags(tags) -> np.ndarray:
    """XOR with the all-ones mask."""
    return np.asarray(tags, dtype=np.uint8) ^ np.uint8(1)


def derive_seed(pool: TaggedPool, variant=SeedVariant.FULL, cost: SeedCost | None = None) -> Seed:
    variant = SeedVariant(variant)
    keep = complement_tags(pool.tags).astype(bool)
    if not keep.any():
        raise DegenerateSelection(f"device {pool.device_id}: no entry survives tag complementation")
    selected = np.where(keep, pool.values, 0)
    total = complex(np.sum(selected[keep]))
    theta = abs(total)
    if cost is not None:
        cost.additions += int(keep.sum()) - 1
    if theta == 0.0:
        raise DegenerateSelection(f"device {pool.device_id}: selected entries sum to zero")
    if variant is SeedVariant.FULL:
        value = theta * theta
        if cost is not None:
            cost.squarings += 1
    else:
        value = theta
    return Seed(theta=theta, value=value, variant=variant)


def binarize_seed(seed: Seed | float, width: int = DEFAULT_SEED_WIDTH) -> np.ndarray:
    """Fixed-point encoding: ``round(value * 2**(width // 2))``, low ``width`` bits MSB first.

    Rounds half up and saturates at ``2**width - 1``.
    """
    if width < 1:
        raise ValueError("width must be at least 1")
    value = seed.value if isinstance(seed, Seed) else float(seed)
    if not value >= 0:
        raise ValueError(f"seed value must be non-negative, got {value}")
    scaled = math.floor(value * 2 ** (width // 2) + 0.5)
    scaled = min(scaled, 2 ** width - 1)
    return np.array([(scaled >> (width - 1 - i)) & 1 for i in range(width)], dtype=np.uint8)


def seed_offset(bits, P: int) -> int:
    """Secret candidate offset for the next window, taken from the seed bits."""
    return int("".join(str(int(b)) for b in bits), 2) % P if len(bits) else 0


def refresh_cycle(pool: TaggedPool, poly: MonicPolynomial, L: int, variant=SeedVariant.FULL,
                  width: int = DEFAULT_SEED_WIDTH, cost: SeedCost | None = None) -> tuple[Seed, AccessSchedule]:
    """derive_seed -> binarize_seed -> lfsr_init -> generate L bits."""
    seed, schedule, _, _ = refresh_cycle_full(pool, poly, L, variant, width, cost)
    return seed, schedule


def refresh_cycle_full(pool, poly, L, variant=SeedVariant.FULL, width=DEFAULT_SEED_WIDTH, cost=None):
    """:func:`refresh_cycle` plus the seed bits and the register after the window."""
    seed = derive_seed(pool, variant, cost)
    bits = binarize_seed(seed, width)
    state = lfsr_init(bits, poly)
    sched_bits, final = clock(state, poly, L)
    return seed, AccessSchedule(sched_bits, pool.device_id), bits, final


@dataclass
class LinkState:
    """One end's view of a device's schedule window.

    ``register`` is the LFSR state after the current window, kept so the
    schedule can be continued when no usable seed exists.
    """

    device_id: int
    schedule: AccessSchedule
    register: LfsrState
    offset: int
    window: int = 0
    fallbacks: dict = field(default_factory=lambda: {"alternate": 0, "continued": 0})


def provision(device_id: int, initial_state: LfsrState, poly: MonicPolynomial, L: int, offset: int) -> LinkState:
    """Initial window, from a state agreed during upper-layer set-up."""
    bits, final = clock(initial_state, poly, L)
    return LinkState(device_id, AccessSchedule(bits, device_id), final, offset)


def advance(link: LinkState, pool_values, poly: MonicPolynomial, variant=SeedVariant.FULL,
            width: int = DEFAULT_SEED_WIDTH, P: int = 4, cost: SeedCost | None = None) -> LinkState:
    """Move ``link`` to its next window.

    Fallback chain, identical on both ends: the configured variant, then
    lite if that was full, then continue clocking the current register. A
    lite link therefore never squares.
    """
    L = len(link.schedule)
    pool = TaggedPool(link.device_id, pool_values, link.schedule.bits)
    fallbacks = dict(link.fallbacks)
    variant = SeedVariant(variant)
    chain = (variant,) if variant is SeedVariant.LITE else (variant, SeedVariant.LITE)
    for attempt, v in enumerate(chain):
        try:
            _, sched, bits, final = refresh_cycle_full(pool, poly, L, v, width, cost)
        except (DegenerateSelection, AllZeroSeed):
            continue
        if attempt:
            fallbacks["alternate"] += 1
        return LinkState(link.device_id, sched, final, seed_offset(bits, P), link.window + 1, fallbacks)
    fallbacks["continued"] += 1
    bits, final = clock(link.register, poly, L)
    return LinkState(link.device_id, AccessSchedule(bits, link.device_id), final, link.offset,
                     link.window + 1, fallbacks)
