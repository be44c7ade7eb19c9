"""Campaign tallies: determinism, confusion accounting, and trend checks."""

import numpy as np
import pytest

from covstruct.criteria import Criterion, CriterionKind, parse_criterion
from covstruct.estimators import Approach
from covstruct.montecarlo import (
    WORKERS_ENV,
    CampaignConfig,
    CellStats,
    MissingCellError,
    PccReport,
    _resolve_workers,
    confusion_histogram,
    run_campaign,
)
from covstruct.scenario import ScenarioConfig, table_case
from covstruct.structures import Hypothesis

AIC = Criterion(CriterionKind.AIC)
ABIC = Criterion(CriterionKind.ASYMPTOTIC_BIC)


def small_config(**overrides):
    defaults = dict(
        scenario=ScenarioConfig(n=5),
        k_grid=(11,),
        trials=4,
        criteria=(AIC, ABIC),
        approaches=(Approach.A, Approach.B),
        truths=tuple(Hypothesis),
        master_seed=7,
        workers=1,
    )
    defaults.update(overrides)
    return CampaignConfig(**defaults)


def statistical_content(report):
    """Everything except wall-clock timings."""
    cells = {
        key: (cell.counts, cell.trials, cell.p_cc, cell.std_err)
        for key, cell in report.cells.items()
    }
    return cells, report.failures


# ---------------------------------------------------------------------------
# Configuration validation


def test_campaign_config_validation():
    with pytest.raises(ValueError, match="exceed N"):
        small_config(k_grid=(5,))
    with pytest.raises(ValueError, match="trials"):
        small_config(trials=0)
    with pytest.raises(ValueError, match="duplicate criterion"):
        small_config(criteria=(AIC, Criterion(CriterionKind.AIC)))
    with pytest.raises(ValueError, match="k_grid"):
        small_config(k_grid=())
    with pytest.raises(ValueError, match="criterion"):
        small_config(criteria=())
    with pytest.raises(ValueError, match="approach"):
        small_config(approaches=())
    with pytest.raises(ValueError, match="truth"):
        small_config(truths=())


# ---------------------------------------------------------------------------
# Tally accounting


def test_single_trial_places_single_count():
    report = run_campaign(small_config(trials=1, truths=(Hypothesis.H2,)))
    for approach in (Approach.A, Approach.B):
        cell = report.cell(AIC, approach, Hypothesis.H2, 11)
        assert isinstance(cell, CellStats)
        assert sum(cell.counts) == 1
        assert sorted(cell.counts) == [0, 0, 0, 0, 1]
        assert cell.p_cc in (0.0, 1.0)


def test_counts_sum_to_trials_and_pcc_in_range():
    report = run_campaign(small_config())
    for key in report.iter_keys():
        cell = report.cells[key]
        assert sum(cell.counts) == cell.trials == 4
        assert 0.0 <= cell.p_cc <= 1.0
        assert cell.std_err >= 0.0


def test_same_seed_reproduces_report():
    first = run_campaign(small_config())
    second = run_campaign(small_config())
    assert statistical_content(first) == statistical_content(second)
    third = run_campaign(small_config(master_seed=8))
    assert statistical_content(first) != statistical_content(third)


def test_worker_count_does_not_change_tallies():
    serial = run_campaign(small_config(trials=6, truths=(Hypothesis.H3,)))
    pooled = run_campaign(small_config(trials=6, truths=(Hypothesis.H3,), workers=2))
    assert statistical_content(serial) == statistical_content(pooled)


def test_worker_resolution_order(monkeypatch):
    monkeypatch.setenv(WORKERS_ENV, "3")
    assert _resolve_workers(small_config(workers=None)) == 3
    assert _resolve_workers(small_config(workers=2)) == 2
    monkeypatch.delenv(WORKERS_ENV)
    assert _resolve_workers(small_config(workers=None)) >= 1


def test_missing_cell_error():
    report = run_campaign(small_config(truths=(Hypothesis.H1,)))
    with pytest.raises(MissingCellError):
        report.cell(AIC, Approach.A, Hypothesis.H1, 999)
    with pytest.raises(MissingCellError):
        report.cell(parse_criterion("tic"), Approach.A, Hypothesis.H1, 11)
    # The histogram needs all four truth rows.
    with pytest.raises(MissingCellError):
        confusion_histogram(report, AIC, Approach.A, 11)


def test_confusion_rows_sum_to_one():
    report = run_campaign(small_config())
    for approach in (Approach.A, Approach.B):
        for criterion in (AIC, ABIC):
            hist = confusion_histogram(report, criterion, approach, 11)
            assert hist.shape == (4, 4)
            assert np.all(np.abs(hist.sum(axis=1) - 1.0) <= 1e-12)


def test_confusion_of_perfect_classifier_is_identity():
    config = small_config(trials=10)
    cells = {}
    for truth in Hypothesis:
        counts = [0, 0, 0, 0, 0]
        counts[int(truth) - 1] = 10
        cells[("aic", "A", int(truth), 11)] = CellStats(
            counts=tuple(counts), trials=10, p_cc=1.0, std_err=0.0, seconds=0.0
        )
    report = PccReport(config=config, cells=cells)
    hist = confusion_histogram(report, AIC, Approach.A, 11)
    assert np.array_equal(hist, np.eye(4))


def test_degenerate_steering_fails_a_but_not_b():
    # A clutter power of 330 dB drives the steering energy through the ICM
    # inverse below the refusal floor, so every approach-A trial fails while
    # the paired approach-B classification still runs on the same estimates.
    scenario = table_case(1)
    source = scenario.sources[0]
    hot = ScenarioConfig(
        n=13,
        sources=(type(source)(cnr_db=330.0, rho=source.rho, doppler=source.doppler),),
    )
    config = CampaignConfig(
        scenario=hot,
        k_grid=(15,),
        trials=3,
        criteria=(AIC,),
        approaches=(Approach.A, Approach.B),
        truths=(Hypothesis.H4,),
        master_seed=3,
        workers=1,
    )
    report = run_campaign(config)
    cell_a = report.cell(AIC, Approach.A, Hypothesis.H4, 15)
    assert cell_a.counts == (0, 0, 0, 0, 3)
    assert cell_a.failed == 3
    assert cell_a.p_cc == 0.0 and cell_a.std_err == 0.0
    cell_b = report.cell(AIC, Approach.B, Hypothesis.H4, 15)
    assert cell_b.failed == 0
    assert sum(cell_b.counts[:4]) == 3
    steering_failures = [f for f in report.failures if f.approach == Approach.A.value]
    assert len(steering_failures) == 12  # 3 trials x 4 hypotheses
    assert all("steering" in f.message for f in steering_failures)
    assert {f.trial for f in steering_failures} == {0, 1, 2}


# ---------------------------------------------------------------------------
# Statistical behavior (fixed seeds, calibrated bounds)


@pytest.fixture(scope="module")
def abic_case1_report():
    config = CampaignConfig(
        scenario=table_case(1),
        k_grid=(26, 32, 39, 45),
        trials=100,
        criteria=(ABIC,),
        approaches=(Approach.B,),
        truths=tuple(Hypothesis),
        master_seed=11,
        workers=1,
    )
    return run_campaign(config)


def test_asymptotic_bic_strong_at_k45(abic_case1_report):
    for truth in Hypothesis:
        assert abic_case1_report.p_cc(ABIC, Approach.B, truth, 45) >= 0.8


def test_median_pcc_trend_non_decreasing(abic_case1_report):
    grid = (26, 32, 39, 45)
    medians, errs = [], []
    for k in grid:
        cells = [abic_case1_report.cell(ABIC, Approach.B, t, k) for t in Hypothesis]
        medians.append(float(np.median([c.p_cc for c in cells])))
        errs.append(float(np.median([c.std_err for c in cells])))
    for i in range(len(grid) - 1):
        slack = 2.0 * max(errs[i], errs[i + 1], 1.0 / abic_case1_report.config.trials)
        assert medians[i + 1] >= medians[i] - slack


def test_std_err_matches_bootstrap(rng):
    config = CampaignConfig(
        scenario=table_case(1),
        k_grid=(26,),
        trials=1000,
        criteria=(parse_criterion("aicc"),),
        approaches=(Approach.A,),
        truths=(Hypothesis.H1,),
        master_seed=5,
        workers=1,
    )
    report = run_campaign(config)
    cell = report.cell("aicc", Approach.A, Hypothesis.H1, 26)
    assert cell.failed == 0
    assert 0.0 < cell.p_cc < 1.0
    resampled = rng.binomial(cell.trials, cell.p_cc, size=4000) / cell.trials
    bootstrap = float(np.std(resampled))
    assert abs(cell.std_err - bootstrap) <= 0.2 * bootstrap
