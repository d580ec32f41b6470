"""Illegitimate transmitters impersonating a victim identity.

An adversary only sees what goes over the air (the victim's sequences, slot
indices) plus public system parameters. It never receives pools, seeds or
schedules. ``leaked_candidates`` models the worst case where the victim's
candidate sequences have been learned by other means.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .codebook import Codebook
from .phy import Injection, random_symbols


class Strategy(str, enum.Enum):
    RANDOM_ACCESS = "random"
    ALWAYS_ON = "always"
    REPLAY = "replay"


class Knowledge(str, enum.Enum):
    NONE = "none"              # guesses from its own codebook
    CANDIDATES = "candidates"  # knows the victim's candidate sequences, not which is in use


@dataclass(frozen=True)
class Observation:
    """One over-the-air observation of the victim."""

    slot_index: int
    position: int
    window: int
    claimed_id: int
    sequence: np.ndarray


@dataclass
class AdversaryProfile:
    strategy: Strategy
    own_codebook: Codebook
    victim_id: int
    rng: np.random.Generator
    L: int
    transmit_prob: float = 0.5
    power: float = 1.0
    leaked_candidates: np.ndarray | None = None
    observation_noise_var: float = 0.0
    memory: list = field(default_factory=list)

    def __post_init__(self):
        self.strategy = Strategy(self.strategy)


def observe(profile: AdversaryProfile, observations) -> None:
    """Record the victim's observed transmissions (Replay memory)."""
    for obs in observations:
        if obs.claimed_id != profile.victim_id:
            continue
        seq = np.asarray(obs.sequence, dtype=np.complex128)
        if profile.observation_noise_var > 0:
            seq = seq + np.sqrt(profile.observation_noise_var / 2) * (
                profile.rng.standard_normal(seq.shape) + 1j * profile.rng.standard_normal(seq.shape))
        profile.memory.append((obs.window, obs.position, seq))


def _guess_sequence(profile: AdversaryProfile) -> np.ndarray:
    if profile.leaked_candidates is not None:
        cands = profile.leaked_candidates
        return cands[profile.rng.integers(0, cands.shape[0])]
    cb = profile.own_codebook.entries
    return cb[:, profile.rng.integers(0, cb.shape[1])]


def plan_attack(profile: AdversaryProfile, slot_index: int, observations=()) -> Injection | None:
    """Decide whether to transmit in 0-based slot ``slot_index`` and with what.

    ``observations`` are the over-the-air observations made since the last
    call; they are folded into the profile memory first.
    """
    observe(profile, observations)
    position = slot_index % profile.L
    window = slot_index // profile.L
    symbol = complex(random_symbols(profile.rng, 1)[0]) * np.sqrt(profile.power)
    if profile.strategy is Strategy.ALWAYS_ON:
        return Injection(profile.victim_id, _guess_sequence(profile), symbol)
    if profile.strategy is Strategy.RANDOM_ACCESS:
        if profile.rng.random() < profile.transmit_prob:
            return Injection(profile.victim_id, _guess_sequence(profile), symbol)
        return None
    # replay what was seen at this position in the previous window
    for w, pos, seq in reversed(profile.memory):
        if w == window - 1 and pos == position:
            return Injection(profile.victim_id, seq, symbol)
    return None
