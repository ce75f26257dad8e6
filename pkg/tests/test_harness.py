import json
import warnings

import pytest

from phipbil.engine import EngineConfig
from phipbil.harness import (
    BatchStats,
    ExperimentSpec,
    ReferenceMissing,
    compare_to_reference,
    config_from_reference,
    main,
    parameter_sweep,
    reference_keys,
    reference_row,
    run_batch,
    validate_oracles,
    write_batch,
)


@pytest.fixture(autouse=True)
def quiet_equal_sizes():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        yield


def small_spec(reps=3, out=None, **kw):
    cfg = EngineConfig(100, 60, 3, max_evals=20_000, **kw)
    return ExperimentSpec("twomax", 30, cfg, reps, out)


def rows(evals, optima=None, success=None):
    optima = optima or [2] * len(evals)
    success = success or [1] * len(evals)
    return [{"problem": "p", "seed": i, "evals": e, "optima": o, "success": s, "wall_ms": 0}
            for i, (e, o, s) in enumerate(zip(evals, optima, success))]


# --- reference data -------------------------------------------------------------------

def test_reference_rows_present():
    keys = reference_keys()
    for name in ("Pgrid16", "Pcat28", "Pcatring28", "Pcatring42", "Pcatring56", "Pcatring84"):
        assert f"table3/phi-pbil/{name}" in keys
        assert f"table3/uebna/{name}" in keys
    assert "table2/cg/trapfive-100" in keys and "table2/pv-uniform/twomax-100" in keys
    row = reference_row("table3/phi-pbil/Pcatring84")
    assert (row["optima_mean"], row["optima_sd"], row["evals_mean"]) == (5.7, 0.7, 84539)
    assert (row["n0"], row["nw"], row["p_w"], row["p_old"], row["p_c"], row["k"]) == \
        (4000, 500, 0.75, 0.25, 0.5, 20)
    assert reference_row("table2/cg/twomax-100")["evals_mean"] == 4825
    assert reference_row("table2/pv-uniform/trapfive-100")["operator"] == "pv-uniform"


def test_sweep_settings_from_reference():
    row = reference_row("sweep/Pshuff64")
    cfg = config_from_reference(row)
    assert (cfg.n0, cfg.nw, cfg.k, cfg.max_evals) == (3000, 300, 15, 100_000)
    assert (cfg.p_c, cfg.p_old, cfg.p_w) == (0.5, 0.5, 0.5)
    assert reference_row("sweep/Pcatring42")["n0"] == 2500


def test_missing_reference_is_informative():
    with pytest.raises(ReferenceMissing, match="known rows"):
        reference_row("table3/phi-pbil/Pgrid99")
    with pytest.raises(ReferenceMissing):
        reference_row("table3")
    with pytest.raises(ReferenceMissing, match="n0"):
        config_from_reference(reference_row("table2/cg/trapfive-100"))


# --- statistics ------------------------------------------------------------------------

def test_batch_stats_sample_sd():
    stats = BatchStats("p", rows([10, 20, 30], [1, 2, 3], [1, 0, 1]))
    assert stats.evals_mean == 20 and stats.evals_sd == 10
    assert stats.optima_mean == 2 and stats.optima_sd == 1
    assert stats.success_fraction == pytest.approx(2 / 3)


def test_single_replication_has_no_sd():
    stats = BatchStats("p", rows([10]))
    assert stats.evals_sd is None and stats.optima_sd is None
    summary = json.loads(json.dumps(stats.summary()))
    assert summary["evals_sd"] is None


def test_empty_batch_rejected():
    with pytest.raises(ValueError):
        BatchStats("p", [])


# --- comparison -------------------------------------------------------------------------

def test_compare_within_tolerance():
    stats = BatchStats("Pgrid16", rows([10_500] * 10))
    verdict = compare_to_reference(stats, "table3/phi-pbil/Pgrid16")
    assert verdict.passed
    evals = next(c for c in verdict.checks if c["metric"] == "evals")
    assert evals["rel_error"] == pytest.approx((10_500 - 10_126) / 10_126)


def test_compare_optima_exact_when_sd_zero():
    stats = BatchStats("Pgrid16", rows([10_126] * 10, [2] * 9 + [1]))
    verdict = compare_to_reference(stats, "table3/phi-pbil/Pgrid16")
    assert not verdict.passed
    assert [c["metric"] for c in verdict.checks if not c["passed"]] == ["optima"]


def test_compare_evals_out_of_tolerance():
    stats = BatchStats("Pgrid16", rows([14_000] * 10))
    assert not compare_to_reference(stats, "table3/phi-pbil/Pgrid16").passed
    assert compare_to_reference(stats, "table3/phi-pbil/Pgrid16", {"evals_rel": 0.5}).passed


def test_compare_success_within_one_run():
    row = {"key": "r", "success": 0.97}
    assert compare_to_reference(BatchStats("p", rows([1] * 10, success=[1] * 9 + [0])), row).passed
    assert not compare_to_reference(BatchStats("p", rows([1] * 10, success=[1] * 8 + [0, 0])), row).passed


def test_compare_never_mutates_stats():
    stats = BatchStats("p", rows([10, 20]))
    before = json.dumps(stats.summary())
    compare_to_reference(stats, "table3/phi-pbil/Pcat28")
    assert json.dumps(stats.summary()) == before


def test_compare_rejects_empty():
    with pytest.raises(ValueError):
        compare_to_reference(None, "table3/phi-pbil/Pgrid16")


# --- batches ----------------------------------------------------------------------------

def test_run_batch_writes_stable_outputs(tmp_path):
    a = run_batch(small_spec(out=tmp_path / "a"))
    b = run_batch(small_spec(out=tmp_path / "b"))
    assert a.success_fraction == 1.0
    assert [r["seed"] for r in a.rows] == [0, 1, 2]

    def stable(path):
        lines = path.read_text().splitlines()
        return [line.rsplit(",", 1)[0] for line in lines]

    assert stable(tmp_path / "a.csv") == stable(tmp_path / "b.csv")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    header = (tmp_path / "a.csv").read_text().splitlines()[0]
    assert header == "problem,seed,evals,optima,success,wall_ms"


def test_summary_recomputed_from_csv(tmp_path):
    stats = run_batch(small_spec(out=tmp_path / "run.csv"))
    again = BatchStats.from_csv(tmp_path / "run.csv")
    summary = json.loads((tmp_path / "run.json").read_text())
    for f in ("success_fraction", "evals_mean", "evals_sd", "optima_mean", "optima_sd"):
        assert getattr(again, f) == summary[f] == getattr(stats, f)


def test_seeds_offset_by_replication_index():
    stats = run_batch(small_spec(reps=2, seed=40))
    assert [r["seed"] for r in stats.rows] == [40, 41]
    single = run_batch(small_spec(reps=1, seed=41))
    assert single.rows[0]["evals"] == stats.rows[1]["evals"]


def test_shuffled_hiff_permutation_logged():
    cfg = EngineConfig(100, 50, 3, max_evals=2000)
    stats = run_batch(ExperimentSpec("shuff-hiff", 16, cfg, 2))
    perms = [d["permutation"] for d in stats.details]
    assert sorted(perms[0]) == list(range(16))
    assert perms[0] != perms[1]


def test_write_failure_names_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    stats = BatchStats("p", rows([1]))
    with pytest.raises(OSError, match="file"):
        write_batch(stats, blocker / "sub" / "out")


def test_bad_replications():
    with pytest.raises(ValueError):
        small_spec(reps=0)


# --- sweeps -----------------------------------------------------------------------------

def test_sweep_single_value_equals_batch(tmp_path):
    base = EngineConfig(100, 60, 3, max_evals=20_000)
    report = parameter_sweep("twomax", 30, "p_c", [0.5], base, 2, tmp_path / "sweep.csv")
    batch = run_batch(ExperimentSpec("twomax", 30, base, 2))

    def timeless(stats):
        return [{k: v for k, v in r.items() if k != "wall_ms"} for r in stats.rows]

    assert timeless(report[0.5]) == timeless(batch)
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[0].startswith("value,mean_optima,mean_evals")
    assert len(lines) == 2


def test_sweep_caps_budget_and_sets_value():
    base = EngineConfig(100, 60, 3, max_evals=500_000)
    report = parameter_sweep("twomax", 30, "p_w", [0.0, 1.0], base, 1)
    for v, stats in report.points:
        assert stats.config["p_w"] == v
        assert stats.config["max_evals"] == 100_000
        assert stats.config["p_c"] == 0.5


def test_sweep_validation():
    base = EngineConfig(100, 60, 3)
    with pytest.raises(ValueError):
        parameter_sweep("twomax", 30, "k", [1], base, 1)
    with pytest.raises(ValueError):
        parameter_sweep("twomax", 30, "p_c", [1.5], base, 1)


# --- oracle validation ----------------------------------------------------------------

def test_validate_oracles_passes():
    report = validate_oracles(sequences=50)
    assert report.passed, report.lines()
    names = " ".join(c["name"] for c in report.checks)
    assert "hiff16" in names and "Pgrid16" in names and "incremental" in names


# --- command line ------------------------------------------------------------------------

def test_cli_run(tmp_path, capsys):
    code = main(["run", "--problem", "twomax", "--size", "30", "--n0", "100", "--nw", "60",
                 "--k", "3", "--reps", "2", "--out", str(tmp_path / "tw")])
    assert code == 0
    assert json.loads(capsys.readouterr().out)["success_fraction"] == 1.0
    assert (tmp_path / "tw.csv").exists() and (tmp_path / "tw.json").exists()


def test_cli_config_file_with_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"problem": "twomax", "size": 30, "n0": 100, "nw": 60, "k": 3,
                               "reps": 1, "seed": 5}))
    assert main(["run", "--config", str(cfg), "--seed", "7"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["config"]["seed"] == 7 and out["config"]["n0"] == 100


def test_cli_trace(tmp_path):
    trace = tmp_path / "trace.jsonl"
    assert main(["run", "--problem", "trapfive", "--size", "20", "--n0", "100", "--nw", "50",
                 "--k", "3", "--max-evals", "400", "--trace", str(trace)]) == 0
    lines = trace.read_text().splitlines()
    assert len(lines) == 300 and "hypothesis" in json.loads(lines[0])


def test_cli_sweep(capsys):
    assert main(["sweep", "--problem", "twomax", "--size", "30", "--n0", "100", "--nw", "60",
                 "--k", "3", "--param", "p_old", "--values", "0,1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("value,") and len(lines) == 3


def test_cli_compare_exit_codes(capsys):
    assert main(["compare", "--reference", "table3/phi-pbil/Pgrid16", "--reps", "2"]) == 0
    assert "PASS" in capsys.readouterr().out
    # a deliberately tiny budget cannot reach the reference
    assert main(["compare", "--reference", "table3/phi-pbil/Pgrid16", "--n0", "100", "--nw", "50",
                 "--max-evals", "200"]) == 1


def test_cli_errors(capsys):
    assert main(["compare", "--reference", "nope"]) == 2
    assert "known rows" in capsys.readouterr().err
    assert main(["run", "--problem", "twomax"]) == 2


def test_cli_validate(capsys):
    assert main(["validate"]) == 0
    assert "FAIL" not in capsys.readouterr().out
