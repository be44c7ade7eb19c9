"""Result serialization: deterministic CSV, JSON mirror, config round trip."""

import json

import pytest

from covstruct.criteria import parse_criterion
from covstruct.estimators import Approach
from covstruct.montecarlo import CampaignConfig, run_campaign
from covstruct.reporting import (
    CSV_COLUMNS,
    CSV_SCHEMA_VERSION,
    config_from_dict,
    config_sha256,
    config_to_dict,
    read_results_csv,
    render_results_csv,
    write_results_csv,
    write_results_json,
)
from covstruct.scenario import ScenarioConfig, table_case
from covstruct.structures import Hypothesis

GOLDEN_HEADER = (
    "schema,criterion,approach,truth,K,trials,failed,"
    "chosen_h1,chosen_h2,chosen_h3,chosen_h4,p_cc,std_err"
)
GOLDEN_FIRST_ROW = "1,aic,A,H2,11,4,0,1,3,0,0,0.75,0.21650635094610965"


def golden_config():
    return CampaignConfig(
        scenario=ScenarioConfig(n=5),
        k_grid=(11,),
        trials=4,
        criteria=(parse_criterion("aic"), parse_criterion("asymptotic-bic")),
        approaches=(Approach.A, Approach.B),
        truths=(Hypothesis.H2,),
        master_seed=7,
        workers=1,
    )


@pytest.fixture(scope="module")
def golden_report():
    return run_campaign(golden_config())


def test_csv_header_and_seeded_row_are_pinned(golden_report):
    lines = render_results_csv(golden_report).splitlines()
    assert lines[0] == GOLDEN_HEADER == ",".join(CSV_COLUMNS)
    assert lines[1] == GOLDEN_FIRST_ROW
    assert len(lines) == 1 + 2 * 2 * 1 * 1  # criteria x approaches x truths x K


def test_csv_file_matches_render_and_reruns_identically(tmp_path, golden_report):
    path = tmp_path / "results.csv"
    write_results_csv(golden_report, path)
    assert path.read_text(encoding="utf-8") == render_results_csv(golden_report)
    rerun = run_campaign(golden_config())
    again = tmp_path / "again.csv"
    write_results_csv(rerun, again)
    assert again.read_bytes() == path.read_bytes()


def test_csv_round_trip_recovers_cells(tmp_path, golden_report):
    path = tmp_path / "results.csv"
    write_results_csv(golden_report, path)
    rows = read_results_csv(path)
    assert len(rows) == len(golden_report.cells)
    for row in rows:
        cell = golden_report.cell(
            row["criterion"], row["approach"], int(row["truth"][1]), row["K"]
        )
        assert row["schema"] == CSV_SCHEMA_VERSION
        assert row["chosen"] == cell.counts[:4]
        assert row["failed"] == cell.failed
        assert row["p_cc"] == cell.p_cc
        assert row["std_err"] == cell.std_err


def test_csv_reader_rejects_malformed_input(tmp_path, golden_report):
    path = tmp_path / "results.csv"
    write_results_csv(golden_report, path)
    text = path.read_text(encoding="utf-8")

    empty = tmp_path / "empty.csv"
    empty.write_text("", encoding="utf-8")
    with pytest.raises(ValueError, match="empty results"):
        read_results_csv(empty)

    bad_header = tmp_path / "header.csv"
    bad_header.write_text("a,b,c\n", encoding="utf-8")
    with pytest.raises(ValueError, match="unexpected CSV header"):
        read_results_csv(bad_header)

    lines = text.splitlines()
    short = tmp_path / "short.csv"
    short.write_text("\n".join([lines[0], "1,aic,A"]) + "\n", encoding="utf-8")
    with pytest.raises(ValueError, match="short.csv:2.*columns"):
        read_results_csv(short)

    truth = tmp_path / "truth.csv"
    truth.write_text(
        "\n".join([lines[0], lines[1].replace("H2", "H9")]) + "\n", encoding="utf-8"
    )
    with pytest.raises(ValueError, match="bad truth"):
        read_results_csv(truth)

    schema = tmp_path / "schema.csv"
    schema.write_text(
        "\n".join([lines[0], "9" + lines[1][1:]]) + "\n", encoding="utf-8"
    )
    with pytest.raises(ValueError, match="unsupported schema"):
        read_results_csv(schema)


def test_config_round_trip():
    config = CampaignConfig(
        scenario=table_case(2, n=9, snr_db=7.5, f_v=0.02, seed=42),
        k_grid=(12, 20),
        trials=250,
        criteria=tuple(parse_criterion(c) for c in ("gic:2", "tic", "bic")),
        approaches=(Approach.B,),
        truths=(Hypothesis.H1, Hypothesis.H3),
        master_seed=99,
        workers=3,
    )
    data = config_to_dict(config)
    json.dumps(data)  # must be JSON-serializable as-is
    assert config_from_dict(data) == config
    assert config_from_dict(json.loads(json.dumps(data))) == config


def test_config_sha_is_stable_and_sensitive():
    base = golden_config()
    sha = config_sha256(base)
    assert len(sha) == 64 and int(sha, 16) >= 0
    assert config_sha256(golden_config()) == sha
    assert config_sha256(config_from_dict(config_to_dict(base))) == sha
    bumped = CampaignConfig(
        scenario=base.scenario,
        k_grid=base.k_grid,
        trials=base.trials,
        criteria=base.criteria,
        approaches=base.approaches,
        truths=base.truths,
        master_seed=base.master_seed + 1,
        workers=base.workers,
    )
    assert config_sha256(bumped) != sha


def test_json_mirror_carries_provenance(tmp_path, golden_report):
    path = tmp_path / "results.json"
    write_results_json(golden_report, path, package_version="0.1.0")
    payload = json.loads(path.read_text(encoding="utf-8"))
    assert payload["schema"] == CSV_SCHEMA_VERSION
    assert payload["package_version"] == "0.1.0"
    assert payload["master_seed"] == 7
    assert payload["config_sha256"] == config_sha256(golden_report.config)
    assert config_from_dict(payload["config"]) == golden_report.config
    assert len(payload["cells"]) == len(golden_report.cells)
    first = payload["cells"][0]
    assert first["criterion"] == "aic" and first["approach"] == "A"
    assert first["chosen_counts"] == [1, 3, 0, 0]
    assert "cell_seconds" in first and "elapsed_seconds" in payload
    assert payload["failures"] == []
