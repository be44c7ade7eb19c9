"""Seeded classification campaigns over truths x K-grid x criteria x approaches.

Each campaign cell (true hypothesis, K) draws ``trials`` independent
datasets; every dataset is classified by every configured (criterion,
approach) pair, so approach contrasts are paired by construction. Per-trial
RNG streams are keyed by (master seed, truth, K, trial index), which makes
the tallies independent of scheduling and worker count: any partition of the
trials sums to the same counts.

A trial where every hypothesis fails numerically under some rule lands in
that rule's "failed" bucket and leaves the P_cc denominator; partial
failures just shrink the argmin. Failures carry their trial index so any
single trial can be replayed.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .criteria import DEFAULT_CRITERIA, Criterion, Scorecard, classify_batch, prepare_estimates
from .estimators import Approach
from .scenario import ScenarioConfig, sample_dataset, truth_instance
from .structures import Hypothesis

__all__ = [
    "CampaignConfig",
    "CellStats",
    "FailureRecord",
    "PccReport",
    "MissingCellError",
    "DEFAULT_K_GRID",
    "run_campaign",
    "confusion_histogram",
]

DEFAULT_K_GRID: tuple[int, ...] = (20, 25, 30, 35, 40, 45)

WORKERS_ENV = "COVSTRUCT_WORKERS"

# Sub-stream tags keeping per-trial draws and frozen channel-error draws apart.
_TRIAL_STREAM = 1
_FROZEN_STREAM = 2


class MissingCellError(KeyError):
    """The report has no cell for the requested (criterion, approach, truth, K)."""


@dataclass(frozen=True)
class CampaignConfig:
    """Everything a campaign needs besides elbow grease."""

    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    k_grid: tuple[int, ...] = DEFAULT_K_GRID
    trials: int = 1000
    criteria: tuple[Criterion, ...] = DEFAULT_CRITERIA
    approaches: tuple[Approach, ...] = (Approach.A, Approach.B)
    truths: tuple[Hypothesis, ...] = tuple(Hypothesis)
    master_seed: int = 1
    workers: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "k_grid", tuple(int(k) for k in self.k_grid))
        object.__setattr__(self, "criteria", tuple(self.criteria))
        object.__setattr__(
            self, "approaches", tuple(Approach.parse(a) for a in self.approaches)
        )
        object.__setattr__(
            self, "truths", tuple(Hypothesis(t) for t in self.truths)
        )
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not self.k_grid:
            raise ValueError("k_grid must not be empty")
        for k in self.k_grid:
            if k <= self.scenario.n:
                raise ValueError(
                    f"every K must exceed N={self.scenario.n}, got K={k}"
                )
        if not self.criteria:
            raise ValueError("need at least one criterion")
        if not self.approaches:
            raise ValueError("need at least one approach")
        if not self.truths:
            raise ValueError("need at least one truth hypothesis")
        seen = set()
        for c in self.criteria:
            if c.key in seen:
                raise ValueError(f"duplicate criterion {c.key!r}")
            seen.add(c.key)


@dataclass(frozen=True)
class CellStats:
    """Tally of one (criterion, approach, truth, K) cell.

    ``counts`` holds chosen-H1..H4 plus the all-failed bucket; the five
    entries sum to the trial count. ``p_cc`` divides correct choices by the
    non-failed trials.
    """

    counts: tuple[int, int, int, int, int]
    trials: int
    p_cc: float
    std_err: float
    seconds: float

    @property
    def failed(self) -> int:
        return self.counts[4]


@dataclass(frozen=True, order=True)
class FailureRecord:
    """One excluded hypothesis (or fully failed trial) with its provenance."""

    truth: int
    k: int
    trial: int
    approach: str
    hypothesis: int
    message: str


@dataclass(frozen=True)
class PccReport:
    """Campaign result: per-cell tallies plus the failure log."""

    config: CampaignConfig
    cells: dict[tuple[str, str, int, int], CellStats] = field(repr=False)
    failures: tuple[FailureRecord, ...] = ()
    elapsed_seconds: float = 0.0

    def cell(
        self, criterion, approach, truth, k: int
    ) -> CellStats:
        key = _cell_key(criterion, approach, truth, k)
        try:
            return self.cells[key]
        except KeyError:
            raise MissingCellError(f"no campaign cell {key}") from None

    def p_cc(self, criterion, approach, truth, k: int) -> float:
        return self.cell(criterion, approach, truth, k).p_cc

    def iter_keys(self):
        """Cell keys in deterministic (criterion, approach, truth, K) order."""
        for criterion in self.config.criteria:
            for approach in self.config.approaches:
                for truth in self.config.truths:
                    for k in self.config.k_grid:
                        yield (criterion.key, approach.value, int(truth), k)


def _cell_key(criterion, approach, truth, k: int) -> tuple[str, str, int, int]:
    ckey = criterion.key if isinstance(criterion, Criterion) else str(criterion)
    akey = Approach.parse(approach).value
    return (ckey, akey, int(Hypothesis(truth)), int(k))


def _resolve_workers(config: CampaignConfig) -> int:
    if config.workers is not None:
        return max(1, int(config.workers))
    env = os.environ.get(WORKERS_ENV, "").strip()
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _trial_rng(master_seed: int, truth: Hypothesis, k: int, trial: int):
    seq = np.random.SeedSequence((master_seed, _TRIAL_STREAM, int(truth), k, trial))
    return np.random.default_rng(seq)


def _frozen_truth_rng(master_seed: int, truth: Hypothesis):
    seq = np.random.SeedSequence((master_seed, _FROZEN_STREAM, int(truth)))
    return np.random.default_rng(seq)


def _run_chunk(args) -> tuple[dict, list, float, tuple[int, int]]:
    """Worker body: classify trials [lo, hi) of one cell, return raw tallies."""
    config, truth_value, k, lo, hi = args
    truth = Hypothesis(truth_value)
    scenario = config.scenario
    started = time.perf_counter()

    frozen = None
    if scenario.freeze_channel_errors:
        frozen = truth_instance(
            truth, scenario, _frozen_truth_rng(config.master_seed, truth)
        )

    prep_approach = (
        Approach.A if Approach.A in config.approaches else config.approaches[0]
    )
    counts: dict[tuple[str, str], np.ndarray] = {
        (c.key, a.value): np.zeros(5, dtype=np.int64)
        for c in config.criteria
        for a in config.approaches
    }
    failures: list[FailureRecord] = []

    for trial in range(lo, hi):
        rng = _trial_rng(config.master_seed, truth, k, trial)
        instance = frozen if frozen is not None else truth_instance(truth, scenario, rng)
        dataset = sample_dataset(instance, scenario, k, rng)
        prepared = prepare_estimates(dataset, prep_approach)
        for approach in config.approaches:
            cards = classify_batch(
                [dataset], approach, config.criteria, prepared_seq=[prepared]
            )[0]
            seen_failures: set[tuple[int, str]] = set()
            for criterion in config.criteria:
                card: Scorecard = cards[criterion]
                tally = counts[(criterion.key, approach.value)]
                if card.chosen is None:
                    tally[4] += 1
                else:
                    tally[int(card.chosen) - 1] += 1
                for h, score in card.scores.items():
                    if score.failure and (int(h), score.failure) not in seen_failures:
                        seen_failures.add((int(h), score.failure))
                        failures.append(
                            FailureRecord(
                                truth=int(truth),
                                k=k,
                                trial=trial,
                                approach=approach.value,
                                hypothesis=int(h),
                                message=score.failure,
                            )
                        )
    return counts, failures, time.perf_counter() - started, (truth_value, k)


def run_campaign(config: CampaignConfig, progress=None) -> PccReport:
    """Run every cell of the campaign and tally the outcome.

    ``progress`` (optional) receives a line of text as each cell finishes.
    Deterministic for a fixed master seed: results do not depend on the
    worker count or on execution order.
    """
    workers = _resolve_workers(config)
    started = time.perf_counter()

    tasks = []
    for truth in config.truths:
        for k in config.k_grid:
            chunk = _chunk_size(config.trials, workers)
            for lo in range(0, config.trials, chunk):
                tasks.append((config, int(truth), k, lo, min(lo + chunk, config.trials)))

    sums: dict[tuple[str, str, int, int], np.ndarray] = {}
    seconds: dict[tuple[int, int], float] = {}
    failures: list[FailureRecord] = []
    done_cells: set[tuple[int, int]] = set()

    def _absorb(result):
        counts, fails, elapsed, cell = result
        for (ckey, akey), tally in counts.items():
            key = (ckey, akey, cell[0], cell[1])
            if key in sums:
                sums[key] += tally
            else:
                sums[key] = tally.copy()
        failures.extend(fails)
        seconds[cell] = seconds.get(cell, 0.0) + elapsed
        if progress is not None and cell not in done_cells:
            done_cells.add(cell)
            truth, k = cell
            progress(f"cell H{truth} K={k} done in {elapsed:.1f}s")

    if workers == 1:
        for task in tasks:
            _absorb(_run_chunk(task))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for result in pool.map(_run_chunk, tasks):
                _absorb(result)

    cells: dict[tuple[str, str, int, int], CellStats] = {}
    for truth in config.truths:
        for k in config.k_grid:
            for criterion in config.criteria:
                for approach in config.approaches:
                    key = (criterion.key, approach.value, int(truth), k)
                    tally = sums[key]
                    failed = int(tally[4])
                    effective = config.trials - failed
                    correct = int(tally[int(truth) - 1])
                    p_cc = correct / effective if effective else 0.0
                    std_err = (
                        float(np.sqrt(p_cc * (1.0 - p_cc) / effective))
                        if effective
                        else 0.0
                    )
                    cells[key] = CellStats(
                        counts=tuple(int(x) for x in tally),
                        trials=config.trials,
                        p_cc=p_cc,
                        std_err=std_err,
                        seconds=seconds[(int(truth), k)],
                    )

    return PccReport(
        config=config,
        cells=cells,
        failures=tuple(sorted(failures)),
        elapsed_seconds=time.perf_counter() - started,
    )


def _chunk_size(trials: int, workers: int) -> int:
    if workers == 1:
        return trials
    return max(1, -(-trials // (workers * 4)))


def confusion_histogram(
    report: PccReport, criterion, approach, k: int
) -> np.ndarray:
    """4x4 row-normalized confusion matrix at one K.

    Rows follow the truth (H1..H4), columns the chosen hypothesis; each row
    sums to 1 over that cell's non-failed trials. Raises MissingCellError
    when any truth cell is absent.
    """
    out = np.zeros((4, 4))
    for truth in Hypothesis:
        stats = report.cell(criterion, approach, truth, k)
        effective = stats.trials - stats.failed
        if effective <= 0:
            continue
        out[int(truth) - 1] = np.asarray(stats.counts[:4], dtype=float) / effective
    return out
