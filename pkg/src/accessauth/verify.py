"""Acceptance checks, shared by the test suite and the ``verify`` subcommand.

Each check returns a :class:`CheckResult`. Reference values come from small
oracles written here without reusing the library's own implementations (a
bare-list LFSR, a direct birthday enumeration), so a bug in the library
cannot silently agree with itself.
"""
from __future__ import annotations

import copy
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from .campaign import run_campaign
from .codebook import DEFAULT_ALPHABET
from .config import SimConfig
from .detect import extract_codebook, ls_detect
from .metrics import entropy_bits, key_space
from .phy import ar1_step, complex_normal
from .results import to_csv
from .schedule import LfsrState, MonicPolynomial, clock, is_primitive, monic_polynomials, period
from .seedgen import LinkState, SeedVariant, advance, provision

NOISE_FREE = float("inf")


@dataclass
class CheckResult:
    number: int
    title: str
    passed: bool
    detail: str
    values: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number}: {self.title} -- {self.detail}"


# ------------------------------------------------------------------ oracles

def lfsr_oracle(coeffs, state, count):
    """Fibonacci register on plain lists: output the last cell, feed the tap XOR in front."""
    mu = len(coeffs) - 1
    reg = list(state)
    out = []
    for _ in range(count):
        out.append(reg[-1])
        fb = 0
        for i in range(1, mu + 1):
            if coeffs[i]:
                fb ^= reg[i - 1]
        reg = [fb] + reg[:-1]
    return out, reg


def random_access_misdetection(coeffs, L: int, P: int) -> Fraction:
    """Exact acceptance probability of a random-access guess.

    Averages over every nonzero register state, every slot of the window
    and every (secret offset, guessed candidate) pair; the guess passes when
    the slot bit is 1 and it names the candidate in use.
    """
    mu = len(coeffs) - 1
    hits = total = 0
    for code in range(1, 2 ** mu):
        state = [(code >> (mu - 1 - i)) & 1 for i in range(mu)]
        bits, _ = lfsr_oracle(coeffs, state, L)
        for pos, offset, guess in product(range(L), range(P), range(P)):
            total += 1
            hits += bits[pos] == 1 and (pos + offset) % P == guess
    return Fraction(hits, total)


def replay_detection(coeffs, L: int, P: int) -> Fraction:
    """Probability a replay of the previous window's (slot, candidate) is flagged.

    Consecutive windows are modelled as independent uniformly random states
    and offsets; only replays of slots the victim actually used count.
    """
    mu = len(coeffs) - 1
    states = []
    for code in range(1, 2 ** mu):
        bits, _ = lfsr_oracle(coeffs, [(code >> (mu - 1 - i)) & 1 for i in range(mu)], L)
        states.append(bits)
    flagged = total = 0
    for prev, cur in product(states, states):
        for pos, o_prev, o_cur in product(range(L), range(P), range(P)):
            if prev[pos] != 1:
                continue
            total += 1
            passes = cur[pos] == 1 and (pos + o_prev) % P == (pos + o_cur) % P
            flagged += not passes
    return Fraction(flagged, total)


def birthday_oracle(n: int, q: int) -> tuple[Fraction, Fraction]:
    """Mean and variance of the number of devices sharing their value, ``n`` devices over ``q`` values."""
    if n == 0:
        return Fraction(0), Fraction(0)
    s = s2 = 0
    for assign in product(range(q), repeat=n):
        c = sum(1 for a in assign if assign.count(a) > 1)
        s += c
        s2 += c * c
    m = Fraction(s, q ** n)
    return m, Fraction(s2, q ** n) - m * m


def primitive_count(mu: int) -> int:
    """Number of primitive binary polynomials of degree ``mu``: phi(2^mu - 1) / mu."""
    n = 2 ** mu - 1
    phi, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            phi -= phi // p
        p += 1
    if m > 1:
        phi -= phi // m
    return phi // mu


# ------------------------------------------------------------------ checks

def _campaign(cfg):
    t0 = time.perf_counter()
    reports = run_campaign(cfg)
    return reports, time.perf_counter() - t0


def check_zero_false_alarms(trials: int = 1000, desk_trials: int = 1000, shared=None) -> CheckResult:
    cfg = SimConfig(trials=trials, baseline_enabled=True)
    reports, secs = shared if shared is not None else _campaign(cfg)
    desk, desk_secs = _campaign(SimConfig(K=50, N=25, S=10, trials=desk_trials))
    fa = [r.rho_fa.events for r in reports]
    desk_fa = [r.rho_fa.events for r in desk]
    ok = all(e == 0 for e in fa + desk_fa) and secs < 300 and desk_secs < 30
    n = reports[0].rho_fa.trials_n
    return CheckResult(1, "zero false alarms", ok,
                       f"flagged legit auths per SNR {fa} of {n} ({secs:.0f}s); desk scale {desk_fa} ({desk_secs:.1f}s)",
                       {"events": fa, "desk_events": desk_fa, "seconds": secs, "desk_seconds": desk_secs})


def check_random_access_oracle(trials: int = 300) -> CheckResult:
    cfg = SimConfig(K=8, N=16, S=4, L=7, J=70, trials=trials, snr_db=(NOISE_FREE,), strategy="random",
                    candidates=4)
    rep = run_campaign(cfg)[0]
    p0 = random_access_misdetection(cfg.polynomial.coeffs, cfg.L, cfg.candidates)
    n = rep.rho_md.trials_n
    sigma = math.sqrt(float(p0) * (1 - float(p0)) / n)
    dev = abs(rep.rho_md.conditional - float(p0))
    ok = dev <= 3 * sigma and (trials < 300 or n >= 10_000)
    return CheckResult(2, "misdetection vs enumeration", ok,
                       f"empirical {rep.rho_md.conditional:.5f} over {n} auths, oracle {p0} = {float(p0):.5f}, "
                       f"|dev| = {dev / sigma:.2f} sigma", {"empirical": rep.rho_md.conditional, "oracle": p0, "n": n})


def check_snr_trend(trials: int = 1000, shared=None) -> CheckResult:
    cfg = SimConfig(trials=trials, baseline_enabled=True)
    reports, _ = shared if shared is not None else _campaign(cfg)
    md = [r.rho_md.conditional for r in reports]
    ci = [r.rho_md.ci95 for r in reports]
    mono = all(md[i + 1] <= md[i] + 3 * ci[i + 1] for i in range(len(md) - 1))
    base_fa = [r.baseline_fa.conditional for r in reports]
    prop_fa = [r.rho_fa.events for r in reports]
    ok = mono and all(b > 0 for b in base_fa) and all(e == 0 for e in prop_fa)
    return CheckResult(3, "SNR trend and baseline false alarms", ok,
                       f"proposed md {[round(x, 4) for x in md]}, baseline fa {[round(x, 4) for x in base_fa]}",
                       {"md": md, "ci95": ci, "baseline_fa": base_fa})


def check_collision_trend(trials: int = 100, small_trials: int = 2000) -> CheckResult:
    curves = {}
    ok = True
    for of, N in ((150, 133), (200, 100)):
        rates = []
        for S in (10, 20, 40, 80):
            cfg = SimConfig(K=200, N=N, S=S, trials=trials, snr_db=(NOISE_FREE,), adversary_count=0)
            rates.append(run_campaign(cfg)[0].rho_sc)
        per_dev = [r.per_device for r in rates]
        cond = [r.conditional for r in rates]
        ok &= all(b > a for a, b in zip(per_dev, per_dev[1:])) and all(b > a for a, b in zip(cond, cond[1:]))
        curves[of] = cond

    small = SimConfig(K=10, N=4, S=4, J=4, L=4, trials=small_trials, snr_db=(NOISE_FREE,), adversary_count=0,
                      sparsity=0.0, alphabet_size=4)
    rep = run_campaign(small)[0]
    q = len(set(DEFAULT_ALPHABET[:4]))
    hist = rep.counters.active_hist
    mean = sum(h * birthday_oracle(int(n), q)[0] for n, h in hist.items())
    var = sum(h * birthday_oracle(int(n), q)[1] for n, h in hist.items())
    auths = sum(int(n) * h for n, h in hist.items())
    expected = float(mean / auths)
    sigma = math.sqrt(float(var)) / auths
    dev = abs(rep.rho_sc.conditional - expected)
    small_ok = dev <= 3 * sigma
    return CheckResult(4, "collision trend and birthday oracle", ok and small_ok,
                       f"conditional rate vs S=10,20,40,80: OF150 {[round(x, 4) for x in curves[150]]}, "
                       f"OF200 {[round(x, 4) for x in curves[200]]}; small instance {rep.rho_sc.conditional:.5f} "
                       f"vs {expected:.5f} ({dev / sigma:.2f} sigma)",
                       {"curves": curves, "small": rep.rho_sc.conditional, "oracle": expected})


def check_schedule_length_trend(trials: int = 100) -> CheckResult:
    md, ci = [], []
    for L in (8, 16, 32, 64):
        cfg = SimConfig(K=8, N=16, S=4, L=L, J=64, trials=trials, snr_db=(NOISE_FREE,), strategy="random")
        r = run_campaign(cfg)[0].rho_md
        md.append(r.conditional)
        ci.append(r.ci95)
    ok = all(md[i + 1] <= md[i] + 3 * ci[i + 1] for i in range(len(md) - 1))
    return CheckResult(5, "misdetection vs schedule length", ok,
                       f"md for L=8,16,32,64: {[round(x, 4) for x in md]} (ci95 {[round(x, 4) for x in ci]})",
                       {"md": md, "ci95": ci})


def check_seed_agreement(pools: int = 10_000, seed: int = 7) -> CheckResult:
    rng = np.random.default_rng(seed)
    poly = MonicPolynomial.from_string("1101")
    alphabet = np.array((0,) + DEFAULT_ALPHABET)
    agree = 0
    for i in range(pools):
        L = int(rng.integers(2, 17))
        bits = rng.integers(0, 2, size=L).astype(np.uint8)
        state = rng.integers(0, 2, size=3).astype(np.uint8)
        if not state.any():
            state[0] = 1
        values = alphabet[rng.integers(0, alphabet.size, size=L)] * rng.uniform(0.1, 2.0)
        link = provision(i, LfsrState(state), poly, L, int(rng.integers(0, 4)))
        link = LinkState(i, type(link.schedule)(bits, i), link.register, link.offset)
        variant = SeedVariant.FULL if rng.random() < 0.5 else SeedVariant.LITE
        dev = advance(copy.deepcopy(link), values.copy(), poly, variant)
        ap = advance(copy.deepcopy(link), values.copy(), poly, variant)
        agree += dev.schedule == ap.schedule and dev.offset == ap.offset and dev.register == ap.register
    return CheckResult(6, "seed agreement", agree == pools, f"{agree}/{pools} identical refreshes",
                       {"agree": agree, "pools": pools})


def check_lfsr(max_degree: int = 10) -> CheckResult:
    poly = MonicPolynomial.from_string("1101")
    state = LfsrState((0, 0, 1))
    seen = set()
    s = state
    for _ in range(7):
        seen.add(tuple(s.bits))
        _, s = clock(s, poly, 1)
    window, _ = clock(state, poly, 7)
    oracle_bits, _ = lfsr_oracle(poly.coeffs, [0, 0, 1], 7)
    ok = period(poly, state) == 7 and len(seen) == 7 and int(window.sum()) == 4
    ok &= list(window) == oracle_bits
    counts = {}
    for mu in range(1, max_degree + 1):
        flagged = [p for p in monic_polynomials(mu) if is_primitive(p)]
        counts[mu] = len(flagged)
        ok &= len(flagged) == primitive_count(mu)
        ok &= all(period(p) == 2 ** mu - 1 for p in flagged)
    return CheckResult(7, "LFSR properties", bool(ok),
                       f"1+x+x^3: period {period(poly, state)}, {len(seen)} states, window "
                       f"{''.join(map(str, window))}; primitive counts {counts}", {"counts": counts})


def check_numerics(steps: int = 100_000, seed: int = 11) -> CheckResult:
    rng = np.random.default_rng(seed)
    N, K, S = 100, 200, 20
    G = complex_normal(rng, (N, K))
    support = rng.choice(K, S, replace=False)
    x = np.zeros(K, dtype=complex)
    x[support] = complex_normal(rng, S)
    x_hat = ls_detect(G @ x, G, support)
    ls_err = float(np.max(np.abs(x_hat - x)))

    H = complex_normal(rng, (N, K))
    C = complex_normal(rng, (N, K))
    rt = float(np.max(np.abs(extract_codebook(H * C, H) - C) / np.abs(C)))

    lag1 = {}
    for zeta in (0.0, 0.5, 0.9, 1.0):
        h = np.empty(steps, dtype=complex)
        h[0] = complex_normal(rng, 1)[0]
        u = complex_normal(rng, steps)
        for t in range(1, steps):
            h[t] = ar1_step(h[t - 1], zeta, 1.0, u[t])
        lag1[zeta] = float(np.real(np.vdot(h[:-1], h[1:])) / np.real(np.vdot(h[:-1], h[:-1])))
    ok = ls_err <= 1e-9 and rt <= 1e-12 and all(abs(lag1[z] - z) <= 0.02 for z in lag1)
    return CheckResult(8, "numerics", ok,
                       f"LS error {ls_err:.2e}, extraction round trip {rt:.2e}, lag-1 {lag1}",
                       {"ls_err": ls_err, "roundtrip": rt, "lag1": lag1})


TABLE = {9: (512, 8192), 11: (2048, 32768), 13: (8192, 131072), 15: (32768, 524288), 17: (131072, 2097152)}


def check_key_space() -> CheckResult:
    got = {R: (key_space(R, "physical"), key_space(R, "proposed")) for R in TABLE}
    e_half, e_quarter = entropy_bits([0.5]), entropy_bits([0.25])
    ok = got == TABLE and e_half == 1.0 and abs(e_quarter - 0.811278) <= 1e-6
    return CheckResult(9, "key space table and entropy", ok,
                       f"rows {got}; entropy(0.5) = {e_half}, entropy(0.25) = {e_quarter:.6f}", {"rows": got})


def check_lightweight() -> CheckResult:
    small = SimConfig(K=50, N=25, S=5, J=2, trials=1, snr_db=(10.0,), adversary_count=0)
    large = small.replace(trials=100)
    r_small, r_large = run_campaign(small)[0].cost, run_campaign(large)[0].cost
    const = (r_small.authentications == 10 and r_large.authentications == 1000
             and r_small.proposed_per_auth == r_large.proposed_per_auth)

    totals, steps = {}, {}
    for w in (1, 2, 4, 8):
        cfg = SimConfig(K=50, N=25, S=5, L=4, J=4 * w, trials=5, snr_db=(10.0,), baseline_enabled=True)
        rep = run_campaign(cfg)[0]
        totals[w] = rep.cost.baseline_total
        steps[w] = rep.counters.base_threshold_steps
    # the threshold search alone already scales with the number of windows
    linear = all(steps[w] == w * steps[1] and totals[w] >= w * steps[1] for w in steps)
    linear &= all(totals[a] < totals[b] for a, b in zip((1, 2, 4), (2, 4, 8)))
    ok = const and linear
    return CheckResult(10, "lightweight cost", ok,
                       f"proposed per auth {r_small.proposed_per_auth} ({r_small.authentications} auths) vs "
                       f"{r_large.proposed_per_auth} ({r_large.authentications} auths); baseline totals by "
                       f"windows {totals}", {"baseline_totals": totals})


def check_reproducibility(trials: int = 40) -> CheckResult:
    cfg = SimConfig(K=50, N=25, S=10, trials=trials, snr_db=(0.0, 25.0), baseline_enabled=True)
    one = to_csv([(cfg, run_campaign(cfg, workers=1))])
    eight = to_csv([(cfg, run_campaign(cfg, workers=8))])
    ok = one.encode() == eight.encode()
    return CheckResult(11, "reproducibility across workers", ok,
                       f"1-worker and 8-worker CSV {'identical' if ok else 'differ'} ({len(one)} bytes)")


def run_all(quick: bool = False) -> list[CheckResult]:
    """Every check in order; ``quick`` shrinks the Monte Carlo sizes for a smoke run."""
    scale = 10 if quick else 1
    defaults = _campaign(SimConfig(trials=1000 // scale, baseline_enabled=True))
    return [
        check_zero_false_alarms(1000 // scale, 1000 // scale, shared=defaults),
        check_random_access_oracle(300 // scale),
        check_snr_trend(1000 // scale, shared=defaults),
        check_collision_trend(100 // scale, 2000 // scale),
        check_schedule_length_trend(100 // scale),
        check_seed_agreement(10_000 // scale),
        check_lfsr(),
        check_numerics(100_000 // scale),
        check_key_space(),
        check_lightweight(),
        check_reproducibility(),
    ]
