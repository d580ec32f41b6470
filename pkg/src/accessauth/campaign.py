"""Monte Carlo campaign engine.

Every trial draws its randomness from ``SeedSequence([master_seed, trial])``
spawned into independent children (codebook, provisioning, channel, traffic,
adversary, noise, baseline), so a trial's outcome never depends on which
worker runs it or on what ran before. All SNR points of a trial share one
pass through the slots and reuse the same unit-variance noise draws.

Channels are kept in units where the trial's mean path gain is one. SNR is
the average received symbol energy over the per-subcarrier noise variance;
codebooks have unit mean column energy, so the reference energy is
``sigma2``.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .adversary import AdversaryProfile, Knowledge, Observation, Strategy, plan_attack
from .auth import AuthCost, AuthIndicator, Reason, authenticate_one, authenticate_slot
from .baseline import BaselineCost, calibrate_threshold, cir_statistics, draw_calibration_statistics
from .codebook import DEFAULT_ALPHABET, build_codebook, candidate_sequences, expected_sequences
from .config import SimConfig
from .detect import extract_codebook, ls_detect, perturb_csi
from .errors import AccessAuthError, TrialFailed
from .metrics import Counters, MetricsReport, build_report, merge
from .phy import Injection, ar1_step, complex_normal, demodulate, path_gain, random_symbols
from .schedule import LfsrState
from .seedgen import SeedCost, SeedVariant, advance, provision

log = logging.getLogger(__name__)

STREAMS = ("codebook", "provision", "channel", "traffic", "adversary", "noise", "baseline")


def trial_rngs(master_seed: int, trial: int) -> dict[str, np.random.Generator]:
    """Independent generators of one trial, keyed by :data:`STREAMS`."""
    children = np.random.SeedSequence([int(master_seed), int(trial)]).spawn(len(STREAMS))
    return {name: np.random.default_rng(s) for name, s in zip(STREAMS, children)}


def random_states(rng: np.random.Generator, count: int, mu: int) -> np.ndarray:
    """``count`` uniformly random nonzero ``mu``-bit register states."""
    codes = rng.integers(1, 2 ** mu, size=count)
    shifts = np.arange(mu - 1, -1, -1)
    return ((codes[:, None] >> shifts[None, :]) & 1).astype(np.uint8)


@dataclass
class TrialResult:
    counters: list          # one Counters per SNR point
    verdicts: AuthIndicator | None = None


def _schedule_matrix(links) -> np.ndarray:
    return np.stack([ln.schedule.bits for ln in links])


def _offsets(links) -> np.ndarray:
    return np.array([ln.offset for ln in links], dtype=np.intp)


def run_trial(cfg: SimConfig, trial: int, keep_verdicts: bool = False) -> TrialResult:
    """Simulate ``cfg.J`` slots of one trial at every SNR point."""
    try:
        return _run_trial(cfg, trial, keep_verdicts)
    except AccessAuthError as exc:
        raise TrialFailed(trial, exc) from exc


def _run_trial(cfg: SimConfig, trial: int, keep_verdicts: bool) -> TrialResult:
    rng = trial_rngs(cfg.master_seed, trial)
    K, N, L, J, P = cfg.K, cfg.N, cfg.L, cfg.J, cfg.candidates
    poly = cfg.polynomial
    variant = SeedVariant(cfg.seed_variant)
    snrs = np.asarray(cfg.snr_db, dtype=float)
    alphabet = DEFAULT_ALPHABET[:cfg.alphabet_size]

    cb = build_codebook(N, K, cfg.sparsity, rng["codebook"], alphabet=alphabet)
    C = cb.entries
    devices = np.arange(K)

    # both ends are provisioned with the same secret state and offset
    states = random_states(rng["provision"], K, poly.degree)
    offsets0 = rng["provision"].integers(0, P, size=K)
    dev_links = [provision(k, LfsrState(states[k]), poly, L, int(offsets0[k])) for k in range(K)]
    ap_links = [provision(k, LfsrState(states[k]), poly, L, int(offsets0[k])) for k in range(K)]

    # channel, normalised to unit mean path gain over the trial's devices
    r_chan = rng["channel"]
    lo, hi = cfg.distance_km
    gains = path_gain(r_chan.uniform(lo, hi, K))
    mean_gain = float(np.mean(gains))
    amp = np.sqrt(gains / mean_gain)
    fading = complex_normal(r_chan, (N, K), cfg.sigma2)
    ref_energy = cfg.sigma2
    noise_vars = ref_energy / 10.0 ** (snrs / 10.0)

    # adversaries: own codebook, own channel, fixed victim
    r_adv = rng["adversary"]
    n_adv = cfg.adversary_count
    victims = r_adv.integers(0, K, size=n_adv)
    adv_amp = np.sqrt(path_gain(r_adv.uniform(lo, hi, n_adv)) / mean_gain)
    rho = cfg.adversary_corr
    mix = np.sqrt(1.0 - rho * rho)
    adv_fading = rho * fading[:, victims] + mix * complex_normal(r_adv, (N, n_adv), cfg.sigma2)
    profiles = []
    for a in range(n_adv):
        own = build_codebook(N, K, cfg.sparsity, r_adv, alphabet=alphabet)
        leaked = None
        if Knowledge(cfg.knowledge) is Knowledge.CANDIDATES:
            leaked = candidate_sequences(C[:, victims[a]], P)
        profiles.append(AdversaryProfile(Strategy(cfg.strategy), own, int(victims[a]), r_adv, L,
                                         transmit_prob=cfg.adversary_transmit_prob, power=cfg.adversary_power,
                                         leaked_candidates=leaked))
    pending = [[] for _ in range(n_adv)]

    base = Counters(trials=1)
    per_snr = [Counters() for _ in snrs]
    auth_cost = AuthCost()
    seed_cost = SeedCost()
    base_cost = [BaselineCost() for _ in snrs]
    indicator = AuthIndicator(K, J) if keep_verdicts else None
    r_traffic, r_noise, r_base = rng["traffic"], rng["noise"], rng["baseline"]
    thresholds = np.zeros(len(snrs))

    dev_bits = ap_bits = dev_off = ap_off = None
    for j in range(J):
        pos, window = j % L, j // L
        if pos == 0:
            if j > 0 and cfg.refresh:
                # the window just finished: its pool rows, tagged with its schedule
                pool_rows = ((window - 1) * L + np.arange(L)) % N
                new_dev, new_ap = [], []
                for k in range(K):
                    new_dev.append(advance(dev_links[k], C[pool_rows, k], poly, variant, cfg.seed_width, P, seed_cost))
                    new_ap.append(advance(ap_links[k], C[pool_rows, k], poly, variant, cfg.seed_width, P))
                dev_links, ap_links = new_dev, new_ap
                base.refreshes += K
            dev_bits, ap_bits = _schedule_matrix(dev_links), _schedule_matrix(ap_links)
            dev_off, ap_off = _offsets(dev_links), _offsets(ap_links)
            base.ap_device_disagreements += int(np.sum(np.any(dev_bits != ap_bits, axis=1) | (dev_off != ap_off)))
            zeros = np.sum(dev_bits == 0, axis=0)
            for r in range(L):
                base.bump("position_zeros", r, int(zeros[r]))
                base.bump("position_total", r, K)
            if cfg.baseline_enabled:
                for s, nv in enumerate(noise_vars):
                    h0, h1 = draw_calibration_statistics(r_base, cfg.calibration_size, N, cfg.zeta, cfg.sigma2,
                                                         nv, cfg.distance_km, mean_gain)
                    thresholds[s] = calibrate_threshold(h0, h1, cfg.baseline_grid, base_cost[s])

        # channel evolution
        innov = complex_normal(r_chan, (N, K))
        adv_innov = rho * innov[:, victims] + mix * complex_normal(r_adv, (N, n_adv))
        fading_prev, adv_prev = fading, adv_fading
        fading = ar1_step(fading, cfg.zeta, cfg.sigma2, innov)
        adv_fading = ar1_step(adv_fading, cfg.zeta, cfg.sigma2, adv_innov)
        H = fading * amp
        H_adv = adv_fading * adv_amp

        # legitimate traffic: only devices scheduled in this slot transmit
        eligible = np.flatnonzero(dev_bits[:, pos] == 1)
        n_act = min(cfg.S, eligible.size)
        active = np.sort(r_traffic.choice(eligible, n_act, replace=False)) if n_act else eligible[:0]
        symbols = random_symbols(r_traffic, n_act)
        base.bump("active_hist", int(n_act))
        seqs = expected_sequences(cb, active, pos, dev_off, P)

        injections, inj_victims = [], []
        for a, prof in enumerate(profiles):
            inj = plan_attack(prof, j, pending[a])
            pending[a] = []
            if inj is not None:
                injections.append(Injection(inj.claimed_id, np.asarray(inj.sequence), inj.symbol, H_adv[:, a]))
                inj_victims.append(a)

        # received signal; columns: active devices, then injections
        G_leg = H[:, active] * seqs
        cols = [G_leg] + [(inj.channel * inj.sequence)[:, None] for inj in injections]
        G_sup = np.hstack(cols)
        H_sup = np.hstack([H[:, active]] + [inj.channel[:, None] for inj in injections])
        x_sup = np.concatenate([symbols, np.array([inj.symbol for inj in injections], dtype=np.complex128)])
        unit = complex_normal(r_noise, N)
        y_clean = G_sup @ x_sup if x_sup.size else np.zeros(N, dtype=np.complex128)
        Y = y_clean[:, None] + np.sqrt(noise_vars)[None, :] * unit[:, None]

        # authentication, which with perfect CSI does not depend on the noise
        H_ap = perturb_csi(H_sup, cfg.csi_error_var, r_noise)
        extracted = extract_codebook(G_sup, H_ap)
        ext_leg = np.full((N, K), np.nan + 0j)
        ext_leg[:, active] = extracted[:, :n_act]
        expected_ap = expected_sequences(cb, devices, pos, ap_off, P)
        evidence = np.zeros(K, dtype=bool)
        evidence[active] = True
        gamma, reasons = authenticate_slot(ext_leg, ap_bits, expected_ap, evidence, pos, cfg.match_rtol, auth_cost)
        if indicator is not None:
            indicator.set_column(j, gamma, reasons)

        passed = gamma[active] == 1
        n_pass = int(passed.sum())
        base.legit_auths += n_act
        base.legit_flagged += n_act - n_pass
        base.legit_slot_mismatch += int(np.sum(reasons[active] == Reason.SLOT_MISMATCH))
        base.authenticated += n_pass
        base.bump("window_legit_auths", window, n_act)
        base.bump("window_legit_flagged", window, n_act - n_pass)
        if n_pass > 1:
            vals = C[j % N, active[passed]]
            _, inverse, counts = np.unique(vals, return_inverse=True, return_counts=True)
            base.collided += int(np.sum(counts[inverse] > 1))

        for i, (inj, a) in enumerate(zip(injections, inj_victims)):
            v = inj.claimed_id
            reason = authenticate_one(extracted[:, n_act + i], ap_bits[v], expected_ap[:, v], pos,
                                      cfg.match_rtol, auth_cost)
            base.adv_auths += 1
            base.bump("window_adv_auths", window, 1)
            if reason is Reason.PASS:
                base.adv_passed += 1
                base.bump("window_adv_passed", window, 1)
            elif reason is Reason.SLOT_MISMATCH:
                base.adv_slot_flagged += 1
            else:
                base.adv_sequence_flagged += 1

        # over-the-air observations for the adversaries' next move
        for a, prof in enumerate(profiles):
            hit = np.flatnonzero(active == prof.victim_id)
            if hit.size:
                pending[a].append(Observation(j, pos, window, prof.victim_id, seqs[:, hit[0]].copy()))

        # oracle LS detection and data gating, one solve for all SNR points
        if x_sup.size:
            support = np.arange(x_sup.size)
            if x_sup.size > N:
                base.ls_underdetermined += 1
            X = ls_detect(Y, G_sup, support)
            sent = demodulate(symbols)
            for s in range(len(snrs)):
                got = demodulate(X[:n_act, s])
                wrong = np.any(got != sent, axis=1) & passed
                per_snr[s].symbols_detected += n_pass
                per_snr[s].symbol_errors += int(wrong.sum())

        if cfg.baseline_enabled:
            _baseline_slot(per_snr, base_cost, thresholds, noise_vars, r_base, amp, adv_amp,
                           fading_prev, fading, adv_fading, active, victims, inj_victims)

    base.slot_comparisons = auth_cost.slot_comparisons
    base.sequence_comparisons = auth_cost.sequence_comparisons
    base.sequence_checks = auth_cost.sequence_checks
    base.seed_additions = seed_cost.additions
    base.seed_squarings = seed_cost.squarings
    base.refresh_alternate = sum(ln.fallbacks["alternate"] for ln in dev_links)
    base.refresh_continued = sum(ln.fallbacks["continued"] for ln in dev_links)
    out = []
    for s in range(len(snrs)):
        c = per_snr[s]
        c.base_threshold_steps = base_cost[s].threshold_steps
        c.base_calibrations = base_cost[s].calibrations
        c.base_comparisons = base_cost[s].comparisons
        out.append(base + c)
    return TrialResult(out, indicator)


def _baseline_slot(per_snr, costs, thresholds, noise_vars, rng, amp, adv_amp, fading_prev, fading,
                   adv_fading, active, victims, inj_victims) -> None:
    """Channel-correlation test on every claim of this slot, at every SNR point."""
    prev_ids = np.concatenate([active, victims[inj_victims]]).astype(np.intp)
    n_leg = active.size
    if prev_ids.size == 0:
        return
    prev = (fading_prev[:, prev_ids] * amp[prev_ids]).T
    now = np.concatenate([(fading[:, active] * amp[active]).T,
                          (adv_fading[:, inj_victims] * adv_amp[inj_victims]).T])
    u_prev = complex_normal(rng, prev.shape)
    u_now = complex_normal(rng, now.shape)
    for s, nv in enumerate(noise_vars):
        sd = np.sqrt(nv)
        stats = cir_statistics(prev + sd * u_prev, now + sd * u_now)
        accept = stats >= thresholds[s]
        c = per_snr[s]
        c.base_legit_auths += n_leg
        c.base_legit_flagged += int(n_leg - accept[:n_leg].sum())
        c.base_adv_auths += prev_ids.size - n_leg
        c.base_adv_passed += int(accept[n_leg:].sum())
        costs[s].comparisons += prev_ids.size


def run_trials(cfg: SimConfig, trials) -> list[Counters]:
    """Merged counters per SNR point over the given trial indices."""
    results = [run_trial(cfg, t).counters for t in trials]
    return [merge(r[s] for r in results) for s in range(len(cfg.snr_db))]


def _chunks(n: int, parts: int) -> list[range]:
    bounds = np.linspace(0, n, parts + 1).round().astype(int)
    return [range(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def campaign_counters(cfg: SimConfig, workers: int | None = None) -> list[Counters]:
    """Counters per SNR point for trials ``0 .. cfg.trials - 1``.

    Counters are integer tallies, so the merged result is the same whatever
    the number of workers.
    """
    workers = cfg.workers if workers is None else workers
    if workers <= 1:
        return run_trials(cfg, range(cfg.trials))
    chunks = _chunks(cfg.trials, workers * 4)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(run_trials, [cfg] * len(chunks), chunks))
    return [merge(p[s] for p in parts) for s in range(len(cfg.snr_db))]


def run_campaign(cfg: SimConfig, workers: int | None = None) -> list[MetricsReport]:
    """One :class:`MetricsReport` per SNR point."""
    log.info("campaign %s: %d trials, %d SNR points", cfg.campaign_id(), cfg.trials, len(cfg.snr_db))
    counters = campaign_counters(cfg, workers)
    reports = [build_report(snr, cfg.K, c, cfg.baseline_enabled) for snr, c in zip(cfg.snr_db, counters)]
    skipped = counters[0].skipped_trials if counters else 0
    if skipped:
        log.warning("%d trials skipped", skipped)
    return reports


def collect_verdicts(cfg: SimConfig, trials) -> list[tuple[int, AuthIndicator]]:
    """Per-trial ``K x J`` verdict matrices (they are the same at every SNR point)."""
    return [(t, run_trial(cfg, t, keep_verdicts=True).verdicts) for t in trials]
