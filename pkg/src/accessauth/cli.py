"""Command line: ``simulate``, ``sweep`` and ``verify``."""
from __future__ import annotations

import argparse
import itertools
import logging
import sys

from .auth import write_verdicts_csv
from .campaign import collect_verdicts, run_campaign
from .config import load_config
from .errors import AccessAuthError, ValidationError
from .results import emit_results

log = logging.getLogger("accessauth")

# flag -> config field
FLAG_FIELDS = {
    "devices": "K", "resources": "N", "active": "S", "slots": "J", "schedule_len": "L",
    "poly": "poly", "snr_db": "snr_db", "trials": "trials", "seed": "master_seed",
    "strategy": "strategy", "adversaries": "adversary_count", "seed_variant": "seed_variant",
    "baseline": "baseline_enabled", "output": "output", "format": "format",
    "slot_duration": "slot_duration", "knowledge": "knowledge", "workers": "workers",
}


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.replace(",", " ").split()]


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON or YAML config file")
    p.add_argument("--devices", type=int, help="potential devices K")
    p.add_argument("--resources", type=int, help="resources (subcarriers) N")
    p.add_argument("--active", type=int, help="active devices per slot S")
    p.add_argument("--slots", type=int, help="time slots per trial J")
    p.add_argument("--schedule-len", type=int, help="schedule window length L")
    p.add_argument("--poly", help="feedback polynomial, ascending coefficients, e.g. 1101")
    p.add_argument("--snr-db", help="comma-separated SNR points in dB")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--strategy", choices=("random", "always", "replay"))
    p.add_argument("--knowledge", choices=("none", "candidates"), help="what the adversary knows")
    p.add_argument("--adversaries", type=int, help="adversaries per trial")
    p.add_argument("--seed-variant", choices=("full", "lite"))
    p.add_argument("--baseline", action="store_true", default=None, help="also run the channel-correlation baseline")
    p.add_argument("--slot-duration", type=float, help="seconds per slot, for time axes only")
    p.add_argument("--workers", type=int)
    p.add_argument("--output", help="output file (stdout if omitted)")
    p.add_argument("--format", choices=("csv", "json"))


def _flags(args) -> dict:
    return {field: getattr(args, flag) for flag, field in FLAG_FIELDS.items()
            if getattr(args, flag, None) is not None}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="accessauth", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one campaign")
    _add_config_flags(sim)
    sim.add_argument("--verdicts", help="write per-(trial, slot, device) verdicts of the first trials to this CSV")
    sim.add_argument("--verdict-trials", type=int, default=1)

    sw = sub.add_parser("sweep", help="run a grid of campaigns")
    _add_config_flags(sw)
    sw.add_argument("--sweep-active", type=_int_list, help="values of S")
    sw.add_argument("--sweep-schedule-len", type=_int_list, help="values of L")
    sw.add_argument("--sweep-resources", type=_int_list, help="values of N")

    ver = sub.add_parser("verify", help="run the acceptance checks")
    ver.add_argument("--quick", action="store_true", help="smaller Monte Carlo sizes")
    return parser


def _emit(campaigns, cfg) -> None:
    text = emit_results(campaigns, cfg.format, cfg.output)
    if cfg.output is None:
        sys.stdout.write(text)
    else:
        log.info("wrote %s", cfg.output)


def cmd_simulate(args) -> int:
    cfg = load_config(args.config, _flags(args))
    reports = run_campaign(cfg)
    _emit([(cfg, reports)], cfg)
    if args.verdicts:
        write_verdicts_csv(args.verdicts, collect_verdicts(cfg, range(min(args.verdict_trials, cfg.trials))))
    return 0


def cmd_sweep(args) -> int:
    base = load_config(args.config, _flags(args))
    axes = {"S": args.sweep_active, "L": args.sweep_schedule_len, "N": args.sweep_resources}
    axes = {k: v for k, v in axes.items() if v}
    campaigns = []
    for values in itertools.product(*axes.values()):
        cfg = base.replace(**dict(zip(axes, values)))
        log.info("sweep point %s", dict(zip(axes, values)))
        campaigns.append((cfg, run_campaign(cfg)))
    _emit(campaigns, base)
    return 0


def cmd_verify(args) -> int:
    from .verify import run_all

    results = run_all(quick=args.quick)
    for r in results:
        print(r.line())
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 1 if failed else 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return {"simulate": cmd_simulate, "sweep": cmd_sweep, "verify": cmd_verify}[args.command](args)
    except ValidationError as exc:
        for field, msg in exc.errors.items():
            print(f"error: {field}: {msg}", file=sys.stderr)
        return 2
    except AccessAuthError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
