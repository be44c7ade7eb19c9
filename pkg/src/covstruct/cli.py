"""Command-line front end: run campaigns, classify snapshot files, plot curves.

Subcommands::

    covstruct run       configure and run a Monte Carlo campaign
    covstruct classify  classify one dataset file with one rule
    covstruct plot      re-render P_cc-vs-K SVGs from a results CSV

Exit codes: 0 success, 1 configuration/usage error, 2 runtime failure.
The worker count resolves as: --workers flag, else the COVSTRUCT_WORKERS
environment variable, else the machine CPU count.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import __version__
from .criteria import DEFAULT_CRITERIA, classify, parse_criterion
from .datafmt import DataFormatError, read_dataset
from .estimators import Approach
from .montecarlo import DEFAULT_K_GRID, CampaignConfig, PccReport, run_campaign
from .reporting import (
    config_sha256,
    read_results_csv,
    write_results_csv,
    write_results_json,
)
from .scenario import ScenarioConfig, SourceParams, table_case
from .structures import Hypothesis
from .svgplot import render_pcc_svg

__all__ = ["main"]


class ConfigError(ValueError):
    """Bad experiment file or flag combination."""


# ---------------------------------------------------------------- experiment files

_SCENARIO_KEYS = {
    "n",
    "sources",
    "sigma_d",
    "sigma_n2",
    "snr_db",
    "f_v",
    "seed",
    "freeze_channel_errors",
    "case_id",
}
_TOP_KEYS = {
    "schema_version",
    "case",
    "scenario",
    "k_grid",
    "trials",
    "criteria",
    "approaches",
    "truths",
    "seed",
    "workers",
    "output",
}
_OUTPUT_KEYS = {"dir", "csv", "json", "plots"}
_SOURCE_KEYS = {"cnr_db", "rho", "doppler"}


def _reject_unknown(data: dict, allowed: set, where: str) -> None:
    for key in data:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in {where}")


def parse_experiment(data: dict) -> tuple[CampaignConfig, dict]:
    """Build a campaign config plus output options from an experiment tree.

    Unknown keys are rejected by name. ``case`` selects the Table-defaults
    scenario (1 or 2); an explicit ``scenario`` tree overrides field by field.
    """
    if not isinstance(data, dict):
        raise ConfigError("experiment file must hold a JSON object")
    _reject_unknown(data, _TOP_KEYS, "experiment file")
    schema = data.get("schema_version", 1)
    if schema != 1:
        raise ConfigError(f"unsupported schema_version {schema!r}")

    case = data.get("case", 1)
    if case not in (1, 2):
        raise ConfigError(f"case must be 1 or 2, got {case!r}")
    scenario = table_case(case)

    sc_data = data.get("scenario", {})
    if not isinstance(sc_data, dict):
        raise ConfigError("'scenario' must be an object")
    _reject_unknown(sc_data, _SCENARIO_KEYS, "'scenario'")
    sc_kwargs = dict(sc_data)
    if "sources" in sc_kwargs:
        sources = []
        for idx, entry in enumerate(sc_kwargs["sources"]):
            if not isinstance(entry, dict):
                raise ConfigError(f"source #{idx} must be an object")
            _reject_unknown(entry, _SOURCE_KEYS, f"source #{idx}")
            try:
                sources.append(SourceParams(**entry))
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"source #{idx}: {exc}") from None
        sc_kwargs["sources"] = tuple(sources)
        sc_kwargs.setdefault("case_id", None)
    if sc_kwargs:
        try:
            scenario = dataclasses.replace(scenario, **sc_kwargs)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"scenario: {exc}") from None

    try:
        criteria = tuple(
            parse_criterion(c) for c in data.get("criteria", [c.key for c in DEFAULT_CRITERIA])
        )
        approaches = tuple(Approach.parse(a) for a in data.get("approaches", ["A", "B"]))
        truths = tuple(_parse_truth(t) for t in data.get("truths", ["H1", "H2", "H3", "H4"]))
        config = CampaignConfig(
            scenario=scenario,
            k_grid=tuple(data.get("k_grid", DEFAULT_K_GRID)),
            trials=data.get("trials", 1000),
            criteria=criteria,
            approaches=approaches,
            truths=truths,
            master_seed=data.get("seed", 1),
            workers=data.get("workers"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    output = dict(data.get("output", {}))
    _reject_unknown(output, _OUTPUT_KEYS, "'output'")
    return config, output


def dump_experiment(config: CampaignConfig, output: dict | None = None) -> dict:
    """Experiment tree that re-parses to an identical config."""
    sc = config.scenario
    tree = {
        "schema_version": 1,
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
        "seed": config.master_seed,
        "workers": config.workers,
    }
    if output:
        tree["output"] = dict(output)
    return tree


def _parse_truth(text) -> Hypothesis:
    if isinstance(text, Hypothesis):
        return text
    raw = str(text).strip().upper()
    if raw.startswith("H"):
        raw = raw[1:]
    try:
        return Hypothesis(int(raw))
    except ValueError:
        raise ValueError(f"bad hypothesis {text!r}; expected H1..H4") from None


def _parse_list(text: str, what: str) -> list[str]:
    items = [part.strip() for part in text.split(",") if part.strip()]
    if not items:
        raise ConfigError(f"empty {what} list")
    return items


# ---------------------------------------------------------------- run

def _add_run_parser(sub) -> None:
    p = sub.add_parser("run", help="run a Monte Carlo classification campaign")
    p.add_argument("--config", type=Path, help="experiment file (JSON)")
    p.add_argument("--case", type=int, choices=(1, 2), help="study case preset")
    p.add_argument("--n", type=int, help="number of channels N")
    p.add_argument("--K", dest="k_grid", help="comma-separated K grid, e.g. 26,39")
    p.add_argument("--trials", type=int, help="Monte Carlo trials per cell")
    p.add_argument("--criteria", help="comma-separated rules, e.g. aic,gic:2,tic")
    p.add_argument(
        "--approach", choices=("A", "B", "AB"), help="approach(es) to evaluate"
    )
    p.add_argument("--truths", help="comma-separated truths, e.g. H1,H3")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--snr-db", type=float, help="CUT signal-to-noise ratio in dB")
    p.add_argument("--f-v", type=float, help="steering Doppler")
    p.add_argument("--sigma-d", type=float, help="channel-error std")
    p.add_argument("--workers", type=int, help="worker process count")
    p.add_argument(
        "--freeze-channel-errors",
        action="store_true",
        help="draw the channel-error matrix once per truth instead of per trial",
    )
    p.add_argument("--out-dir", type=Path, default=Path("results"))
    p.add_argument("--no-plots", action="store_true", help="skip SVG output")
    p.set_defaults(func=cmd_run)


def _build_run_config(args) -> tuple[CampaignConfig, dict]:
    data = {}
    if args.config is not None:
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.config}: invalid JSON: {exc}") from None
    if args.case is not None:
        data["case"] = args.case
    config, output = parse_experiment(data)

    scenario_overrides = {}
    if args.n is not None:
        scenario_overrides["n"] = args.n
    if args.snr_db is not None:
        scenario_overrides["snr_db"] = args.snr_db
    if args.f_v is not None:
        scenario_overrides["f_v"] = args.f_v
    if args.sigma_d is not None:
        scenario_overrides["sigma_d"] = args.sigma_d
    if args.freeze_channel_errors:
        scenario_overrides["freeze_channel_errors"] = True
    try:
        scenario = (
            dataclasses.replace(config.scenario, **scenario_overrides)
            if scenario_overrides
            else config.scenario
        )
        campaign_overrides = {}
        if args.k_grid is not None:
            campaign_overrides["k_grid"] = tuple(
                int(x) for x in _parse_list(args.k_grid, "K")
            )
        if args.trials is not None:
            campaign_overrides["trials"] = args.trials
        if args.criteria is not None:
            campaign_overrides["criteria"] = tuple(
                parse_criterion(c) for c in _parse_list(args.criteria, "criteria")
            )
        if args.approach is not None:
            campaign_overrides["approaches"] = (
                (Approach.A, Approach.B)
                if args.approach == "AB"
                else (Approach.parse(args.approach),)
            )
        if args.truths is not None:
            campaign_overrides["truths"] = tuple(
                _parse_truth(t) for t in _parse_list(args.truths, "truths")
            )
        if args.seed is not None:
            campaign_overrides["master_seed"] = args.seed
        if args.workers is not None:
            campaign_overrides["workers"] = args.workers
        config = dataclasses.replace(config, scenario=scenario, **campaign_overrides)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return config, output


def cmd_run(args) -> int:
    config, output = _build_run_config(args)
    out_dir = Path(output.get("dir", args.out_dir))
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / output.get("csv", "results.csv")
    json_path = out_dir / output.get("json", "results.json")
    plots = output.get("plots", not args.no_plots) and not args.no_plots

    print(
        f"campaign: {len(config.truths)} truths x {len(config.k_grid)} K values x "
        f"{config.trials} trials, criteria [{', '.join(c.key for c in config.criteria)}], "
        f"approaches [{', '.join(a.value for a in config.approaches)}], "
        f"seed {config.master_seed}",
        file=sys.stderr,
    )
    try:
        report = run_campaign(config, progress=lambda msg: print(msg, file=sys.stderr))
    except Exception as exc:  # campaign errors are runtime failures
        print(f"error: campaign failed: {exc}", file=sys.stderr)
        return 2

    write_results_csv(report, csv_path)
    write_results_json(report, json_path, __version__)
    written = [str(csv_path), str(json_path)]
    if plots:
        written += _write_plots(report, out_dir)

    print(f"config sha256 {config_sha256(config)} seed {config.master_seed}")
    _print_summary(report)
    print("wrote " + " ".join(written))
    return 0


def _print_summary(report: PccReport) -> None:
    config = report.config
    k_show = config.k_grid[-1]
    print(f"P_cc at K={k_show}:")
    header = "criterion/approach".ljust(22) + "".join(
        f"H{int(t)}".rjust(8) for t in config.truths
    )
    print(header)
    for criterion in config.criteria:
        for approach in config.approaches:
            cells = [
                report.p_cc(criterion, approach, truth, k_show)
                for truth in config.truths
            ]
            name = f"{criterion.key}/{approach.value}"
            print(name.ljust(22) + "".join(f"{p:8.3f}" for p in cells))
    if report.failures:
        print(f"{len(report.failures)} hypothesis failures logged (see JSON mirror)")


def _series_for(rows: list[dict], criterion_keys: list[str], truth: str, approach: str):
    series = []
    for ckey in criterion_keys:
        points = sorted(
            (row["K"], row["p_cc"])
            for row in rows
            if row["criterion"] == ckey
            and row["truth"] == truth
            and row["approach"] == approach
        )
        if points:
            series.append((ckey, points))
        else:
            print(
                f"warning: no cells for criterion {ckey}, truth {truth}, "
                f"approach {approach}; polyline omitted",
                file=sys.stderr,
            )
    return series


def _write_plots(report: PccReport, out_dir: Path) -> list[str]:
    plot_dir = out_dir / "plots"
    plot_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for truth in report.config.truths:
        for approach in report.config.approaches:
            series = []
            for criterion in report.config.criteria:
                points = [
                    (k, report.p_cc(criterion, approach, truth, k))
                    for k in report.config.k_grid
                ]
                series.append((criterion.key, points))
            svg = render_pcc_svg(
                series, f"P_cc vs K, truth H{int(truth)}, approach {approach.value}"
            )
            path = plot_dir / f"pcc_h{int(truth)}_{approach.value.lower()}.svg"
            path.write_text(svg, encoding="utf-8")
            written.append(str(path))
    return written


# ---------------------------------------------------------------- classify

def _add_classify_parser(sub) -> None:
    p = sub.add_parser("classify", help="classify one dataset file")
    p.add_argument("--data", type=Path, required=True, help="dataset file (covstruct-data v1)")
    p.add_argument("--approach", required=True, choices=("A", "B"))
    p.add_argument("--criterion", required=True, help="e.g. tic or gic:2")
    p.add_argument("--json", type=Path, help="write the scorecard as JSON here")
    p.set_defaults(func=cmd_classify)


def cmd_classify(args) -> int:
    try:
        criterion = parse_criterion(args.criterion)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        dataset = read_dataset(args.data)
    except OSError as exc:
        print(f"error: cannot read data file: {exc}", file=sys.stderr)
        return 1
    except DataFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    approach = Approach.parse(args.approach)
    try:
        card = classify(dataset, approach, criterion)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    print(f"criterion {criterion.key}, approach {approach.value}, N={dataset.n}, K={dataset.k}")
    payload = {
        "criterion": criterion.key,
        "approach": approach.value,
        "N": dataset.n,
        "K": dataset.k,
        "scores": {},
        "chosen": None,
    }
    for h in Hypothesis:
        score = card.scores[h]
        if score.failed:
            print(f"  H{int(h)}: failed ({score.failure})")
            payload["scores"][f"H{int(h)}"] = {"failure": score.failure}
        else:
            print(
                f"  H{int(h)}: fit {score.fit:.6f}  penalty {score.penalty:.6f}  "
                f"total {score.total:.6f}"
            )
            payload["scores"][f"H{int(h)}"] = {
                "fit": score.fit,
                "penalty": score.penalty,
                "total": score.total,
            }
    if card.chosen is None:
        print("chosen: none (every hypothesis failed)")
        if args.json:
            args.json.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        return 2
    payload["chosen"] = f"H{int(card.chosen)}"
    print(f"chosen: H{int(card.chosen)}")
    if args.json:
        args.json.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return 0


# ---------------------------------------------------------------- plot

def _add_plot_parser(sub) -> None:
    p = sub.add_parser("plot", help="render SVG curves from a results CSV")
    p.add_argument("--results", type=Path, required=True, help="results.csv from 'run'")
    p.add_argument("--out-dir", type=Path, default=Path("plots"))
    p.set_defaults(func=cmd_plot)


def cmd_plot(args) -> int:
    try:
        rows = read_results_csv(args.results)
    except OSError as exc:
        print(f"error: cannot read results: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    criterion_keys = sorted({row["criterion"] for row in rows})
    truths = sorted({row["truth"] for row in rows})
    approaches = sorted({row["approach"] for row in rows})
    args.out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for truth in truths:
        for approach in approaches:
            series = _series_for(rows, criterion_keys, truth, approach)
            if not series:
                continue
            svg = render_pcc_svg(
                series, f"P_cc vs K, truth {truth}, approach {approach}"
            )
            path = args.out_dir / f"pcc_{truth.lower()}_{approach.lower()}.svg"
            path.write_text(svg, encoding="utf-8")
            written.append(str(path))
    print("wrote " + " ".join(written))
    return 0


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="covstruct",
        description="Classify interference covariance structure and run P_cc campaigns.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_run_parser(sub)
    _add_classify_parser(sub)
    _add_plot_parser(sub)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
