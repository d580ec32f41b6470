"""CSV rows and JSON summaries of campaign reports.

Floats are written with a fixed ``repr``-free format so identical counters
always give identical bytes.
"""
from __future__ import annotations

import csv
import io
import json
import math
from importlib import resources
from pathlib import Path

import jsonschema

from ._backend import BACKEND
from .config import SimConfig
from .errors import ResultsError
from .metrics import MetricsReport, RatePair, TABLE_KEY_LENGTHS, key_space_row

CSV_COLUMNS = (
    "campaign_id", "snr_db", "K", "N", "S", "J", "L", "strategy",
    "rho_fa_paper", "rho_fa_cond", "rho_md_paper", "rho_md_cond", "rho_sc",
    "ci95_fa", "ci95_md", "cost_proposed", "cost_baseline",
)


def fmt(x) -> str:
    """Deterministic text for numbers: integers as is, floats to 10 significant digits."""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return f"{x:.10g}"
    return str(x)


def _num(x: float):
    """JSON-safe float, rounded the same way as the CSV."""
    if math.isinf(x) or math.isnan(x):
        return fmt(x)
    return float(fmt(x))


def csv_row(cfg: SimConfig, report: MetricsReport) -> dict:
    return {
        "campaign_id": cfg.campaign_id(),
        "snr_db": report.snr_db,
        "K": cfg.K, "N": cfg.N, "S": cfg.S, "J": cfg.J, "L": cfg.L,
        "strategy": cfg.strategy,
        "rho_fa_paper": report.rho_fa.per_device,
        "rho_fa_cond": report.rho_fa.conditional,
        "rho_md_paper": report.rho_md.per_device,
        "rho_md_cond": report.rho_md.conditional,
        "rho_sc": report.rho_sc.per_device,
        "ci95_fa": report.rho_fa.ci95,
        "ci95_md": report.rho_md.ci95,
        "cost_proposed": report.cost.proposed_per_auth,
        "cost_baseline": report.cost.baseline_per_auth,
    }


def to_csv(campaigns) -> str:
    """CSV text for ``[(cfg, reports), ...]``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for cfg, reports in campaigns:
        for rep in reports:
            row = csv_row(cfg, rep)
            w.writerow([fmt(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def _rate(r: RatePair | None):
    if r is None:
        return None
    out = {"per_device": _num(r.per_device), "conditional": _num(r.conditional), "events": r.events,
           "n": r.trials_n, "ci95": _num(r.ci95)}
    if r.note:
        out["note"] = r.note
    return out


def _window_rates(events: dict, totals: dict, L: int, slot_duration) -> list:
    rows = []
    for w, n in sorted(totals.items()):
        e = events.get(w, 0)
        rows.append({
            "window": int(w),
            "update_time": _num(w * L * slot_duration) if slot_duration else None,
            "events": int(e),
            "n": int(n),
            "rate": _num(e / n) if n else 0.0,
        })
    return rows


def _figures(cfg: SimConfig, reports) -> dict:
    first = reports[0].counters
    return {
        "false_alarm_vs_update_time": {
            "slot_duration": cfg.slot_duration,
            "proposed": _window_rates(first.window_legit_flagged, first.window_legit_auths, cfg.L,
                                      cfg.slot_duration),
            "baseline_by_snr": [{"snr_db": _num(r.snr_db), "rate": _rate(r.baseline_fa)} for r in reports],
        },
        "misdetection_vs_snr": [
            {"snr_db": _num(r.snr_db), "proposed": _rate(r.rho_md), "baseline": _rate(r.baseline_md)}
            for r in reports
        ],
        "collision": {"S": cfg.S, "overloading_factor": _num(cfg.overloading_factor),
                      "rho_sc": _rate(reports[0].rho_sc)},
        "misdetection_vs_update_time": {
            "L": cfg.L,
            "proposed": _window_rates(first.window_adv_passed, first.window_adv_auths, cfg.L, cfg.slot_duration),
        },
        "cost": [
            {"snr_db": _num(r.snr_db), "authentications": r.cost.authentications,
             "proposed_total": r.cost.proposed_total, "proposed_per_auth": _num(r.cost.proposed_per_auth),
             "baseline_total": r.cost.baseline_total, "baseline_per_auth": _num(r.cost.baseline_per_auth),
             "baseline_calibrations": r.cost.baseline_calibrations}
            for r in reports
        ],
        "key_space": [key_space_row(R) for R in TABLE_KEY_LENGTHS],
    }


def _config_echo(cfg: SimConfig) -> dict:
    d = cfg.to_dict()
    d["snr_db"] = [_num(x) for x in d["snr_db"]]
    return d


def summary(campaigns) -> dict:
    """JSON-ready summary for ``[(cfg, reports), ...]``."""
    out = []
    for cfg, reports in campaigns:
        points = [{
            "snr_db": _num(r.snr_db),
            "rho_fa": _rate(r.rho_fa),
            "rho_md": _rate(r.rho_md),
            "rho_sc": _rate(r.rho_sc),
            "baseline_fa": _rate(r.baseline_fa),
            "baseline_md": _rate(r.baseline_md),
            "entropy_bits": _num(r.entropy_bits),
            "symbol_error_rate": _num(r.symbol_error_rate),
            "cost": {k: (_num(v) if isinstance(v, float) else v) for k, v in vars(r.cost).items()},
            "counters": r.counters.to_dict(),
        } for r in reports]
        out.append({"campaign_id": cfg.campaign_id(), "config": _config_echo(cfg), "points": points,
                    "figures": _figures(cfg, reports)})
    return {"format_version": 1, "backend": BACKEND, "campaigns": out}


def load_schema() -> dict:
    text = resources.files("accessauth").joinpath("schemas/summary.schema.json").read_text()
    return json.loads(text)


def validate_summary(doc: dict) -> None:
    jsonschema.validate(doc, load_schema())


def to_json(campaigns) -> str:
    doc = summary(campaigns)
    validate_summary(doc)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def emit_results(campaigns, fmt_name: str = "csv", path=None) -> str:
    """Render ``[(cfg, reports), ...]`` as CSV or JSON and write it to ``path`` if given.

    Nothing is written when there are no reports.
    """
    campaigns = [(cfg, list(reps)) for cfg, reps in campaigns]
    if not campaigns or any(not reps for _, reps in campaigns):
        raise ResultsError("no reports to emit")
    if fmt_name == "csv":
        text = to_csv(campaigns)
    elif fmt_name == "json":
        text = to_json(campaigns)
    else:
        raise ValueError(f"unknown format {fmt_name!r}")
    if path is not None:
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise ResultsError(f"cannot write {path}: {exc}") from exc
    return text
