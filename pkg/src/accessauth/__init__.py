"""Access-based physical-layer authentication for grant-free NOMA uplinks.

Devices and the access point derive identical pseudo-random access schedules
from a shared spreading pool; the access point authenticates a transmission
by checking that it arrives in a scheduled slot with the expected spreading
sequence.
"""
from ._backend import BACKEND
from .auth import AuthIndicator, Reason, authenticate_slot
from .campaign import run_campaign
from .codebook import Codebook, build_codebook, construct_pools, tag_pool
from .config import SimConfig, load_config
from .detect import extract_codebook, ls_detect
from .metrics import MetricsReport, entropy_bits, key_space
from .schedule import MonicPolynomial, clock, lfsr_init, period
from .seedgen import SeedVariant, binarize_seed, derive_seed, refresh_cycle

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "AuthIndicator", "Reason", "authenticate_slot", "run_campaign", "Codebook",
    "build_codebook", "construct_pools", "tag_pool", "SimConfig", "load_config", "extract_codebook",
    "ls_detect", "MetricsReport", "entropy_bits", "key_space", "MonicPolynomial", "clock", "lfsr_init",
    "period", "SeedVariant", "binarize_seed", "derive_seed", "refresh_cycle",
]
