"""Campaign result serialization: deterministic CSV plus a JSON mirror.

The CSV is the stable machine-readable artifact: fixed versioned column set,
one row per (criterion, approach, truth, K) cell, floats via ``repr``, no
timestamps — identical configs and seeds produce byte-identical files. The
JSON mirror adds provenance that legitimately varies run to run (timings)
next to the config echo and its hash.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json

from .criteria import Criterion, parse_criterion
from .estimators import Approach
from .montecarlo import CampaignConfig, PccReport
from .scenario import ScenarioConfig, SourceParams
from .structures import Hypothesis

__all__ = [
    "CSV_SCHEMA_VERSION",
    "CSV_COLUMNS",
    "write_results_csv",
    "render_results_csv",
    "read_results_csv",
    "write_results_json",
    "config_to_dict",
    "config_from_dict",
    "config_sha256",
]

CSV_SCHEMA_VERSION = 1

CSV_COLUMNS = (
    "schema",
    "criterion",
    "approach",
    "truth",
    "K",
    "trials",
    "failed",
    "chosen_h1",
    "chosen_h2",
    "chosen_h3",
    "chosen_h4",
    "p_cc",
    "std_err",
)


def render_results_csv(report: PccReport) -> str:
    """The campaign CSV as a string, rows in deterministic cell order."""
    lines = [",".join(CSV_COLUMNS)]
    for key in report.iter_keys():
        ckey, akey, truth, k = key
        stats = report.cells[key]
        row = (
            str(CSV_SCHEMA_VERSION),
            ckey,
            akey,
            f"H{truth}",
            str(k),
            str(stats.trials),
            str(stats.failed),
            str(stats.counts[0]),
            str(stats.counts[1]),
            str(stats.counts[2]),
            str(stats.counts[3]),
            repr(stats.p_cc),
            repr(stats.std_err),
        )
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def write_results_csv(report: PccReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(render_results_csv(report))


def read_results_csv(path) -> list[dict]:
    """Parse a campaign CSV back into typed row dicts.

    Raises ValueError on a header mismatch or malformed row; the message
    names the file and line.
    """
    rows = []
    with open(path, "r", encoding="utf-8") as handle:
        lines = [line.rstrip("\n") for line in handle if line.strip()]
    if not lines:
        raise ValueError(f"{path}: empty results file")
    header = tuple(lines[0].split(","))
    if header != CSV_COLUMNS:
        raise ValueError(
            f"{path}: unexpected CSV header {header!r}; expected {CSV_COLUMNS!r}"
        )
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != len(CSV_COLUMNS):
            raise ValueError(
                f"{path}:{lineno}: expected {len(CSV_COLUMNS)} columns, got {len(parts)}"
            )
        try:
            row = {
                "schema": int(parts[0]),
                "criterion": parts[1],
                "approach": parts[2],
                "truth": parts[3],
                "K": int(parts[4]),
                "trials": int(parts[5]),
                "failed": int(parts[6]),
                "chosen": tuple(int(p) for p in parts[7:11]),
                "p_cc": float(parts[11]),
                "std_err": float(parts[12]),
            }
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from None
        if row["schema"] != CSV_SCHEMA_VERSION:
            raise ValueError(
                f"{path}:{lineno}: unsupported schema {row['schema']}"
            )
        if row["truth"] not in ("H1", "H2", "H3", "H4"):
            raise ValueError(f"{path}:{lineno}: bad truth {row['truth']!r}")
        rows.append(row)
    return rows


def config_to_dict(config: CampaignConfig) -> dict:
    """JSON-ready echo of a campaign config (round-trips via config_from_dict)."""
    sc = config.scenario
    return {
        "scenario": {
            "n": sc.n,
            "sources": [dataclasses.asdict(s) for s in sc.sources],
            "sigma_d": sc.sigma_d,
            "sigma_n2": sc.sigma_n2,
            "snr_db": sc.snr_db,
            "f_v": sc.f_v,
            "seed": sc.seed,
            "freeze_channel_errors": sc.freeze_channel_errors,
            "case_id": sc.case_id,
        },
        "k_grid": list(config.k_grid),
        "trials": config.trials,
        "criteria": [c.key for c in config.criteria],
        "approaches": [a.value for a in config.approaches],
        "truths": [f"H{int(t)}" for t in config.truths],
        "master_seed": config.master_seed,
        "workers": config.workers,
    }


def config_from_dict(data: dict) -> CampaignConfig:
    """Inverse of config_to_dict."""
    sc = data["scenario"]
    scenario = ScenarioConfig(
        n=sc["n"],
        sources=tuple(SourceParams(**s) for s in sc["sources"]),
        sigma_d=sc["sigma_d"],
        sigma_n2=sc["sigma_n2"],
        snr_db=sc["snr_db"],
        f_v=sc["f_v"],
        seed=sc["seed"],
        freeze_channel_errors=sc["freeze_channel_errors"],
        case_id=sc["case_id"],
    )
    return CampaignConfig(
        scenario=scenario,
        k_grid=tuple(data["k_grid"]),
        trials=data["trials"],
        criteria=tuple(parse_criterion(c) for c in data["criteria"]),
        approaches=tuple(Approach.parse(a) for a in data["approaches"]),
        truths=tuple(Hypothesis(int(t.lstrip("H"))) for t in data["truths"]),
        master_seed=data["master_seed"],
        workers=data.get("workers"),
    )


def config_sha256(config: CampaignConfig) -> str:
    """Hash of the canonical config JSON; stable across runs and machines."""
    canonical = json.dumps(config_to_dict(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def write_results_json(report: PccReport, path, package_version: str) -> None:
    """JSON mirror with provenance: config echo + hash, timings, failures."""
    cells = []
    for key in report.iter_keys():
        ckey, akey, truth, k = key
        stats = report.cells[key]
        cells.append(
            {
                "criterion": ckey,
                "approach": akey,
                "truth": f"H{truth}",
                "K": k,
                "trials": stats.trials,
                "failed": stats.failed,
                "chosen_counts": list(stats.counts[:4]),
                "p_cc": stats.p_cc,
                "std_err": stats.std_err,
                "cell_seconds": stats.seconds,
            }
        )
    payload = {
        "schema": CSV_SCHEMA_VERSION,
        "package_version": package_version,
        "config": config_to_dict(report.config),
        "config_sha256": config_sha256(report.config),
        "master_seed": report.config.master_seed,
        "elapsed_seconds": report.elapsed_seconds,
        "cells": cells,
        "failures": [dataclasses.asdict(f) for f in report.failures],
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")
