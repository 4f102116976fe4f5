import csv
import io
import json
import math

import pytest

from conftest import all_ones_pair, data_doc
from servmine.config import MiningConfig
from servmine.errors import ServMineError
from servmine.harness.cli import main
from servmine.harness.experiment import (
    COLUMNS,
    ExperimentReport,
    ExperimentRow,
    SweepPoint,
    SweepPointError,
    export_csv,
    report_to_csv,
    run_experiment,
    sweep_from_dict,
)
from servmine.harness.review import explain, review_session
from servmine.mining import Lead, NoveltyRegistry, mine, read_leads, write_leads
from servmine.synth import GeneratorParams, generate_repository

DEFAULTS = MiningConfig()


def point(n, **cfg):
    return SweepPoint(GeneratorParams(n_services=n), MiningConfig(**cfg))


def test_handcrafted_all_ones_point():
    sp = SweepPoint(GeneratorParams(n_services=2), DEFAULTS, repository=tuple(all_ones_pair()))
    (row,) = run_experiment([sp]).rows
    assert (row.n_services, row.total_leads, row.interesting_count) == (2, 1, 1)
    assert row.avg_cd == pytest.approx(1.0)


def test_single_service_point():
    (row,) = run_experiment([point(1)]).rows
    assert row.total_leads == 0 and row.interesting_count == 0
    assert math.isnan(row.avg_cd) and math.isnan(row.avg_interestingness)


def test_interesting_equals_cd_passing_n200():
    (row,) = run_experiment([point(200)], base_seed=123).rows
    leads = mine(generate_repository(GeneratorParams(n_services=200, seed=123)))
    assert row.interesting_count == sum(lead.scores.cd >= 0.5 for lead in leads) == row.total_leads


def test_rows_in_sweep_order_and_seeds():
    report = run_experiment([point(5), point(6)], repetitions=2, base_seed=10)
    assert [r.n_services for r in report.rows] == [5, 5, 6, 6]
    assert [r.params_summary.split("seed=")[1] for r in report.rows] == ["10", "11", "10", "11"]
    for r in report.rows:
        assert r.interesting_count <= r.total_leads <= math.comb(r.n_services, 2)


def test_parallel_matches_serial():
    sweep = [point(10), point(15, xi=0.9)]
    serial = run_experiment(sweep, 2, 3)
    parallel = run_experiment(sweep, 2, 3, workers=2)
    assert report_to_csv(serial) == report_to_csv(parallel)


def test_errors_name_the_sweep_point():
    bad = SweepPoint(GeneratorParams(n_services=2), DEFAULTS, label="dup", repository=tuple(all_ones_pair()) * 2)
    with pytest.raises(SweepPointError, match="sweep point 0 \\(dup"):
        run_experiment([bad])
    assert issubclass(SweepPointError, ServMineError)


def test_lead_count_growth_on_matched_seeds():
    sizes = [10, 20, 40]
    for seed in range(10):
        report = run_experiment([point(n) for n in sizes], base_seed=seed)
        totals = [r.total_leads for r in report.rows]
        assert totals == sorted(totals)


def test_csv_empty_report():
    text = report_to_csv(ExperimentReport())
    assert text == ",".join(COLUMNS) + "\r\n"


def test_csv_one_row_and_absent_means(tmp_path):
    row = ExperimentRow('n=1, "quoted"', 1, 0, math.nan, 0, math.nan, 12.5)
    path = tmp_path / "r.csv"
    export_csv(ExperimentReport((row,)), path)
    text = path.read_bytes().decode()
    assert text.count("\r\n") == 2
    parsed = list(csv.reader(io.StringIO(text)))
    assert parsed[1] == ['n=1, "quoted"', "1", "0", "", "0", "", ""]
    assert list(csv.reader(io.StringIO(report_to_csv(ExperimentReport((row,)), True))))[1][-1] == "12.5"


def test_sweep_document_expansion():
    doc = {
        "generator": {"n_services": 10},
        "config": {"xi": 0.6},
        "grid": {"generator.n_services": [5, 10], "config.zeta": [0.4, 0.5]},
    }
    points = sweep_from_dict(doc)
    assert [(p.params.n_services, p.config.zeta, p.config.xi) for p in points] == [
        (5, 0.4, 0.6), (5, 0.5, 0.6), (10, 0.4, 0.6), (10, 0.5, 0.6)
    ]
    assert len(sweep_from_dict({})) == 1
    pts = sweep_from_dict({"points": [{"label": "a", "generator": {"n_services": 3}}]})
    assert pts[0].label == "a" and pts[0].params.n_services == 3
    with pytest.raises(ServMineError):
        sweep_from_dict({"grid": {"n_services": [1]}})
    with pytest.raises(ServMineError):
        sweep_from_dict({"extra": 1})


# ---------------------------------------------------------------------------
# review loop


def scripted(answers):
    it = iter(answers)

    def ask(_prompt):
        try:
            return next(it)
        except StopIteration:
            raise EOFError from None

    return ask


def test_review_session_applies_decisions():
    repo = generate_repository(GeneratorParams(n_services=6, seed=1))
    leads = mine(repo)
    interesting = [lead for lead in leads if lead.status == "interesting"]
    assert len(interesting) >= 3
    out = io.StringIO()
    updated, reg = review_session(leads, NoveltyRegistry(), scripted(["x", "a", "r", "k", "s", "q"]), out)
    statuses = [lead.status for lead in updated if lead.pair in {l.pair for l in interesting}]
    assert statuses[:3] == ["accepted", "rejected", "known"]
    assert set(statuses[3:]) <= {"interesting"}
    assert interesting[2].pair in reg and len(reg) == 1
    assert "unrecognized answer" in out.getvalue()
    for before, after in zip(leads, updated):
        if before.status != "interesting":
            assert after is before


def test_explain_mentions_direction(stove_ac):
    stove, ac = stove_ac
    (lead,) = mine([stove, ac], MiningConfig(zeta=0.0))
    assert "from stove to air-conditioner" in explain(lead)


# ---------------------------------------------------------------------------
# CLI


def run(argv):
    return main([str(a) for a in argv])


def test_cli_generate_and_validate(tmp_path, capsys):
    repo = tmp_path / "repo.json"
    assert run(["generate", "--services", 20, "--seed", 4, "--out", repo]) == 0
    doc = json.loads(repo.read_text())
    assert len(doc["services"]) == 20 and doc["header"]["params"]["seed"] == 4
    assert run(["validate", "--repo", repo]) == 0


def test_cli_generate_params_file(tmp_path):
    params = tmp_path / "p.json"
    params.write_text(json.dumps({"ops_per_service": [2, 2], "n_services": 99}))
    repo = tmp_path / "repo.json"
    assert run(["generate", "--services", 3, "--seed", 1, "--out", repo, "--params", params]) == 0
    doc = json.loads(repo.read_text())
    assert len(doc["services"]) == 3
    assert all(len(s["operations"]) == 2 for s in doc["services"])


def test_cli_validate_shipped_example(tmp_path):
    path = tmp_path / "ac.json"
    path.write_text(json.dumps(data_doc("air_conditioner")))
    assert run(["validate", "--repo", path]) == 0


def test_cli_validate_failure(tmp_path, capsys):
    doc = data_doc("air_conditioner")
    doc["services"][0]["operations"] = []
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    assert run(["validate", "--repo", path]) == 1
    assert "operations empty" in capsys.readouterr().out


def test_cli_malformed_json(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"services": [\n  {oops}\n]}')
    assert run(["validate", "--repo", path]) == 1
    assert "line 2" in capsys.readouterr().err


def test_cli_mine_layers_config(tmp_path):
    repo, cfg, out = tmp_path / "repo.json", tmp_path / "cfg.json", tmp_path / "leads.jsonl"
    run(["generate", "--services", 12, "--seed", 2, "--out", repo])
    cfg.write_text(json.dumps({"zeta": 0.9, "xi": 0.99}))
    assert run(["mine", "--repo", repo, "--config", cfg, "--out", out, "--xi", 0.5]) == 0
    leads = read_leads(out)
    assert len(leads) == 66
    passing = [lead for lead in leads if lead.status != "filtered_cd"]
    assert all(lead.scores.cd >= 0.9 - 1e-12 for lead in passing)
    assert all(lead.status == "interesting" for lead in passing)


def test_cli_mine_rejects_bad_threshold(tmp_path, capsys):
    repo = tmp_path / "repo.json"
    run(["generate", "--services", 3, "--seed", 2, "--out", repo])
    assert run(["mine", "--repo", repo, "--out", tmp_path / "l", "--zeta", 1.01]) == 2
    assert "zeta" in capsys.readouterr().err


def test_cli_mine_rejects_invalid_repository(tmp_path):
    doc = data_doc("smart_home")
    doc["services"].append(doc["services"][0])
    repo = tmp_path / "repo.json"
    repo.write_text(json.dumps(doc))
    assert run(["mine", "--repo", repo, "--out", tmp_path / "l"]) == 1


def test_cli_unknown_flag_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        run(["mine", "--repo", "x", "--out", "y", "--bogus"])
    assert exc.value.code == 2


def test_cli_missing_file_is_usage_error(tmp_path):
    assert run(["validate", "--repo", tmp_path / "absent.json"]) == 2


def test_cli_mine_chain_sim_and_registry(tmp_path):
    repo, reg, out = tmp_path / "repo.json", tmp_path / "reg.json", tmp_path / "l.jsonl"
    repo.write_text(json.dumps(data_doc("smart_home")))
    reg.write_text(json.dumps([["tv", "fridge"]]))
    assert run(["mine", "--repo", repo, "--registry", reg, "--out", out, "--zeta", 0.2, "--verifier", "chain_sim"]) == 0
    leads = {lead.pair: lead for lead in read_leads(out)}
    assert leads[("fridge", "tv")].scores.nov == 0
    assert leads[("air-conditioner service", "stove")].scores.act == 1


def test_cli_review(tmp_path, monkeypatch, capsys):
    leads_path, reg = tmp_path / "l.jsonl", tmp_path / "reg.json"
    leads = mine(all_ones_pair())
    write_leads(leads, leads_path)
    monkeypatch.setattr("builtins.input", lambda _prompt: "k")
    assert run(["review", "--leads", leads_path, "--registry", reg]) == 0
    assert read_leads(leads_path)[0].status == "known"
    assert json.loads(reg.read_text()) == [["a", "b"]]


def test_cli_experiment_deterministic(tmp_path):
    sweep = tmp_path / "sweep.json"
    sweep.write_text(json.dumps({"grid": {"generator.n_services": [5, 10]}}))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(["experiment", "--sweep", sweep, "--reps", 2, "--seed", 7, "--out", a]) == 0
    assert run(["experiment", "--sweep", sweep, "--reps", 2, "--seed", 7, "--out", b]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes().count(b"\r\n") == 5
    assert run(["experiment", "--sweep", sweep, "--reps", 1, "--seed", 7, "--out", a, "--timing"]) == 0
    assert list(csv.DictReader(io.StringIO(a.read_text())))[0]["wall_time_ms"] != ""
