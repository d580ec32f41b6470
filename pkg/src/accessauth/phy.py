"""Grant-free NOMA uplink synthesis: QPSK, AR(1) fading with path loss, superposition, AWGN."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NonPositiveDistance

_SQRT_HALF = np.sqrt(0.5)

# Gray mapping, unit energy
QPSK = {
    (0, 0): complex(1, 1) * _SQRT_HALF,
    (0, 1): complex(-1, 1) * _SQRT_HALF,
    (1, 1): complex(-1, -1) * _SQRT_HALF,
    (1, 0): complex(1, -1) * _SQRT_HALF,
}


def modulate(bits) -> complex:
    b = tuple(int(x) for x in bits)
    if len(b) != 2 or any(x not in (0, 1) for x in b):
        raise ValueError(f"QPSK takes exactly two bits, got {bits!r}")
    return QPSK[b]


def modulate_many(bits: np.ndarray) -> np.ndarray:
    """Vectorised :func:`modulate` over an ``(M, 2)`` bit array."""
    bits = np.asarray(bits, dtype=np.int8).reshape(-1, 2)
    re = 1 - 2 * bits[:, 1]
    im = 1 - 2 * bits[:, 0]
    return (re + 1j * im) * _SQRT_HALF


def demodulate(symbols) -> np.ndarray:
    symbols = np.asarray(symbols)
    return np.stack([(symbols.imag < 0), (symbols.real < 0)], axis=-1).astype(np.uint8)


def random_symbols(rng: np.random.Generator, count: int) -> np.ndarray:
    return modulate_many(rng.integers(0, 2, size=(count, 2)))


def path_loss_db(d_km) -> float | np.ndarray:
    d = np.asarray(d_km, dtype=float)
    if np.any(~(d > 0)):
        raise NonPositiveDistance(f"distance must be positive, got {d_km}")
    pl = 128.1 + 37.6 * np.log10(d)
    return float(pl) if pl.ndim == 0 else pl


def path_gain(d_km) -> np.ndarray:
    return 10.0 ** (-np.asarray(path_loss_db(d_km)) / 10.0)


def complex_normal(rng: np.random.Generator, shape, var: float = 1.0) -> np.ndarray:
    scale = np.sqrt(var / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


@dataclass
class ChannelState:
    """Per-subcarrier channel of ``K`` links.

    ``fading`` holds the small-scale AR(1) process; the path-loss amplitude
    is fixed at initialisation and multiplies it in :attr:`H`.
    """

    fading: np.ndarray
    zeta: float
    sigma2: float
    distances: np.ndarray
    amplitude: np.ndarray = field(init=False)

    def __post_init__(self):
        self.fading = np.asarray(self.fading, dtype=np.complex128)
        self.distances = np.asarray(self.distances, dtype=float)
        if self.fading.ndim != 2 or self.fading.shape[1] != self.distances.size:
            raise DimensionMismatch(f"fading {self.fading.shape} vs {self.distances.size} distances")
        if not 0.0 <= self.zeta <= 1.0:
            raise ValueError(f"zeta must be in [0, 1], got {self.zeta}")
        if not self.sigma2 > 0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2}")
        self.amplitude = np.sqrt(path_gain(self.distances))

    @property
    def H(self) -> np.ndarray:
        return self.fading * self.amplitude[None, :]

    @property
    def gains(self) -> np.ndarray:
        return self.amplitude ** 2


def init_channel(N: int, distances, zeta: float, sigma2: float, rng: np.random.Generator) -> ChannelState:
    distances = np.asarray(distances, dtype=float)
    fading = complex_normal(rng, (N, distances.size), sigma2)
    return ChannelState(fading, zeta, sigma2, distances)


def ar1_step(fading: np.ndarray, zeta: float, sigma2: float, innovation: np.ndarray) -> np.ndarray:
    """``h(j) = zeta h(j-1) + sqrt((1 - zeta^2) sigma2) u`` with unit-variance ``u``."""
    if zeta == 1.0:
        return fading.copy()
    return zeta * fading + np.sqrt((1.0 - zeta * zeta) * sigma2) * innovation


def evolve_channel(state: ChannelState, rng: np.random.Generator) -> ChannelState:
    u = complex_normal(rng, state.fading.shape)
    return ChannelState(ar1_step(state.fading, state.zeta, state.sigma2, u),
                        state.zeta, state.sigma2, state.distances)


def noise_variance(snr_db: float, ref_energy: float = 1.0) -> float:
    """Noise variance per subcarrier for ``snr_db`` relative to ``ref_energy``."""
    return float(ref_energy) / 10.0 ** (float(snr_db) / 10.0)


@dataclass(frozen=True)
class Injection:
    """An illegitimate transmission claiming device ``claimed_id``."""

    claimed_id: int
    sequence: np.ndarray
    symbol: complex
    channel: np.ndarray | None = None


@dataclass
class SlotFrame:
    slot_index: int
    active_set: np.ndarray
    x: np.ndarray
    y: np.ndarray
    G: np.ndarray
    noise_var: float
    adversary_injections: list = field(default_factory=list)
    G_adv: np.ndarray | None = None

    def __post_init__(self):
        nz = np.flatnonzero(self.x)
        if not np.array_equal(np.sort(nz), np.sort(np.asarray(self.active_set))):
            raise ValueError("x must be nonzero exactly on the active set")

    @property
    def S(self) -> int:
        return len(self.active_set)

    def full_system(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(G_full, x_full, support)`` with adversary columns appended after the K devices."""
        K = self.G.shape[1]
        if not self.adversary_injections:
            return self.G, self.x, np.asarray(self.active_set, dtype=np.intp)
        G_full = np.hstack([self.G, self.G_adv])
        x_adv = np.array([inj.symbol for inj in self.adversary_injections], dtype=np.complex128)
        x_full = np.concatenate([self.x, x_adv])
        support = np.concatenate([np.asarray(self.active_set, dtype=np.intp),
                                  K + np.arange(len(self.adversary_injections))])
        return G_full, x_full, support


def synthesize_slot(active_set, symbols, H: np.ndarray, sequences, adversary_injections=(),
                    snr_db: float | None = None, rng: np.random.Generator | None = None,
                    *, slot_index: int = 0, ref_energy: float = 1.0, noise_var: float | None = None,
                    unit_noise: np.ndarray | None = None) -> SlotFrame:
    """Received vector of one slot.

    ``sequences`` is ``N x K`` (the sequence each device would use this slot)
    and ``symbols`` gives one symbol per active device, in ``active_set``
    order. Adversary injections carry their own channel column. Pass
    ``unit_noise`` to reuse a unit-variance noise draw.
    """
    H = np.asarray(H)
    sequences = np.asarray(sequences)
    N, K = H.shape
    if sequences.shape != (N, K):
        raise DimensionMismatch(f"sequences {sequences.shape} vs channel {H.shape}")
    active = np.asarray(active_set, dtype=np.intp).ravel()
    symbols = np.asarray(symbols, dtype=np.complex128).ravel()
    if symbols.size != active.size:
        raise DimensionMismatch(f"{symbols.size} symbols for {active.size} active devices")
    if active.size != np.unique(active).size or (active.size and (active.min() < 0 or active.max() >= K)):
        raise DimensionMismatch("active set has repeated or out-of-range devices")

    x = np.zeros(K, dtype=np.complex128)
    x[active] = symbols
    G = H * sequences
    y = G[:, active] @ symbols if active.size else np.zeros(N, dtype=np.complex128)

    injections = list(adversary_injections)
    G_adv = None
    if injections:
        cols = []
        for inj in injections:
            if inj.channel is None or np.shape(inj.channel) != (N,) or np.shape(inj.sequence) != (N,):
                raise DimensionMismatch("injection needs an N-long channel and sequence")
            cols.append(np.asarray(inj.channel) * np.asarray(inj.sequence))
        G_adv = np.stack(cols, axis=1)
        y = y + G_adv @ np.array([inj.symbol for inj in injections], dtype=np.complex128)

    if noise_var is None:
        noise_var = 0.0 if snr_db is None else noise_variance(snr_db, ref_energy)
    if noise_var > 0:
        if unit_noise is None:
            if rng is None:
                raise ValueError("rng or unit_noise required for a noisy slot")
            unit_noise = complex_normal(rng, N)
        y = y + np.sqrt(noise_var) * unit_noise
    return SlotFrame(slot_index, active, x, y, G, float(noise_var), injections, G_adv)
