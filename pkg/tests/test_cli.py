import csv
import io
import json

import pytest
from click.testing import CliRunner

from main import main


def invoke(*args):
    return CliRunner().invoke(main, [str(a) for a in args])


def error_of(result):
    return json.loads(result.stderr.strip().splitlines()[-1])


def test_help_lists_subcommands():
    result = invoke("--help")
    assert result.exit_code == 0
    for name in ("validate", "evolve", "fcs", "waiting-time", "allan", "sample", "pair",
                 "relative-counts", "discrete", "ki", "zeno", "swp"):
        assert name in result.output


def test_subcommand_help_lists_flags():
    result = invoke("relative-counts", "--help")
    assert result.exit_code == 0
    for flag in ("--spec-a", "--spec-b", "--horizon", "--n-seq", "--n", "--seed", "--threads", "--out"):
        assert flag in result.output


def test_validate_erlang(fixture_path):
    result = invoke("validate", "--spec", fixture_path("erlang3.json"))
    assert result.exit_code == 0
    document = json.loads(result.stdout)
    assert document["kind"] == "elementary"
    assert all(document["flags"].values())


def test_fcs_poisson(fixture_path):
    result = invoke("fcs", "--spec", fixture_path("poisson.json"))
    assert result.exit_code == 0
    document = json.loads(result.stdout)
    assert document["r1"] == pytest.approx(1.0, rel=1e-6)
    assert document["nu"] == pytest.approx(1.0, rel=1e-6)


def test_fcs_cross_method(fixture_path):
    result = invoke("fcs", "--spec", fixture_path("erlang3.json"), "--method", "cross")
    assert result.exit_code == 0
    assert json.loads(result.stdout)["r1"] == pytest.approx(3.0, rel=1e-5)


def test_malformed_spec_is_parse_error(fixture_path):
    result = invoke("fcs", "--spec", fixture_path("malformed.json"))
    assert result.exit_code == 2
    assert error_of(result)["error_kind"] == "parse"
    assert result.stdout == ""


def test_negative_rate_is_parse_error(fixture_path):
    result = invoke("validate", "--spec", fixture_path("negative_rate.json"))
    assert result.exit_code == 2
    assert "rate" in error_of(result)["detail"]


def test_evolve_csv(fixture_path):
    result = invoke("evolve", "--spec", fixture_path("poisson.json"), "--times", "0:2:0.5", "--n-max", 40)
    assert result.exit_code == 0
    rows = list(csv.DictReader(io.StringIO(result.stdout)))
    assert [float(r["t"]) for r in rows] == [0.0, 0.5, 1.0, 1.5, 2.0]
    assert float(rows[-1]["mean"]) == pytest.approx(2.0, abs=1e-7)
    assert float(rows[0]["p_0"]) == 1.0


def test_evolve_plot_data(fixture_path):
    result = invoke("evolve", "--spec", fixture_path("poisson.json"), "--times", "1", "--n-max", 30, "--plot-data")
    assert result.exit_code == 0
    assert result.stdout.splitlines()[0] == "t,n,p"
    assert len(result.stdout.splitlines()) == 32


def test_evolve_truncation_suggests_n_max(fixture_path):
    result = invoke("evolve", "--spec", fixture_path("poisson.json"), "--times", "30", "--n-max", 5)
    assert result.exit_code == 2
    error = error_of(result)
    assert error["error_kind"] == "truncation"
    assert "--n-max" in error["detail"]


def test_bad_time_range_is_validation_error(fixture_path):
    result = invoke("evolve", "--spec", fixture_path("poisson.json"), "--times", "2:1:0.5")
    assert result.exit_code == 2
    assert error_of(result)["error_kind"] == "validation"


def test_waiting_time_json(fixture_path):
    result = invoke("waiting-time", "--spec", fixture_path("erlang3.json"), "--out", "json", "--identity")
    assert result.exit_code == 0
    document = json.loads(result.stdout)
    assert document["mu"] == pytest.approx(3.0, rel=1e-6)
    assert document["identity"]["R1"] == pytest.approx(document["identity"]["R2"], rel=1e-5)


def test_waiting_time_csv_columns(fixture_path):
    result = invoke("waiting-time", "--spec", fixture_path("poisson.json"), "--t-max", 40, "--points", 11)
    assert result.exit_code == 0
    assert result.stdout.splitlines()[0] == "t,density,survival"


def test_allan_formula(fixture_path):
    result = invoke("allan", "--spec", fixture_path("erlang3.json"), "--tau", "1,10")
    assert result.exit_code == 0
    estimates = json.loads(result.stdout)["estimates"]
    assert [e["value"] for e in estimates] == pytest.approx([1 / 9, 1 / 90], rel=1e-5)


def test_allan_trajectory_is_seeded(fixture_path):
    args = ("allan", "--spec", fixture_path("poisson.json"), "--tau", "1", "--mode", "trajectory",
            "--horizon", 1000, "--seed", 5)
    first, second = invoke(*args), invoke(*args)
    assert first.exit_code == 0
    assert first.stdout == second.stdout
    (estimate,) = json.loads(first.stdout)["estimates"]
    assert estimate["bins"] == 999
    assert 0.6 < estimate["value"] < 1.4


def test_sample_jsonl_independent_of_threads(fixture_path):
    base = ("sample", "--spec", fixture_path("erlang3.json"), "--horizon", 30, "--n-traj", 4, "--seed", 9)
    serial = invoke(*base)
    parallel = invoke(*base, "--threads", 3)
    assert serial.exit_code == 0
    assert serial.stdout == parallel.stdout
    records = [json.loads(line) for line in serial.stdout.splitlines()]
    assert [r["clock_id"] for r in records] == ["traj-0", "traj-1", "traj-2", "traj-3"]


def test_pair_sequences(fixture_path):
    result = invoke("pair", "--spec-a", fixture_path("poisson.json"), "--spec-b", fixture_path("erlang3.json"),
                    "--horizon", 10, "--n-seq", 2)
    assert result.exit_code == 0
    sequences = [json.loads(line) for line in result.stdout.splitlines()]
    assert len(sequences) == 2
    assert all(label in ("A", "B") for seq in sequences for label, _ in seq)


def test_relative_counts_short_horizon_is_data_error(fixture_path):
    result = invoke("relative-counts", "--spec-a", fixture_path("erlang3.json"),
                    "--spec-b", fixture_path("poisson.json"), "--horizon", 0.01, "--n-seq", 5, "--n", 3)
    assert result.exit_code == 2
    assert error_of(result)["error_kind"] == "data"


def test_relative_counts_csv(fixture_path):
    result = invoke("relative-counts", "--spec-a", fixture_path("poisson.json"),
                    "--spec-b", fixture_path("poisson.json"), "--horizon", 20, "--n-seq", 50, "--out", "csv")
    assert result.exit_code == 0
    rows = list(csv.DictReader(io.StringIO(result.stdout)))
    assert sum(float(r["p"]) for r in rows) == pytest.approx(1.0)


def test_discrete_exact(fixture_path):
    result = invoke("discrete", "--spec", fixture_path("poisson.json"), "--delta", 0.1, "--steps", 300, "--out", "json")
    assert result.exit_code == 0
    document = json.loads(result.stdout)
    assert document["tv"] < 1e-10
    assert document["order"] == "exact"


def test_discrete_first_order_stability(fixture_path):
    result = invoke("discrete", "--spec", fixture_path("poisson.json"), "--delta", 0.9, "--steps", 100,
                    "--order", "first")
    assert result.exit_code == 2
    assert error_of(result)["error_kind"] == "stability"


def test_ki_on_two_block_channel(fixture_path):
    result = invoke("ki", "--channel", fixture_path("two_block_channel.json"))
    assert result.exit_code == 0
    document = json.loads(result.stdout)
    assert document["blocks"] == [{"c_dim": 2, "f_dim": 1}, {"c_dim": 3, "f_dim": 1}]
    assert document["check"]["kraus_residual"] < 1e-9


def test_zeno_csv(fixture_path):
    result = invoke("zeno", "--omega", 1.0, "--time", 1.0, "--m", "1,4", "--out", "csv")
    assert result.exit_code == 0
    rows = list(csv.DictReader(io.StringIO(result.stdout)))
    assert [int(r["m"]) for r in rows] == [1, 4]
    for row in rows:
        assert float(row["survival"]) == pytest.approx(float(row["closed_form"]), abs=1e-10)


def test_zeno_bad_schedule():
    result = invoke("zeno", "--omega", 1.0, "--time", 1.0, "--schedule", "jitter:x")
    assert result.exit_code == 2
    assert error_of(result)["error_kind"] == "validation"


def test_swp(tmp_path):
    target = tmp_path / "swp.json"
    result = invoke("swp", "--dim", 4, "--alphas", "0.25,0.5", "-o", target)
    assert result.exit_code == 0
    assert result.stdout == ""
    document = json.loads(target.read_text(encoding="utf-8"))
    assert document["overlaps"] == pytest.approx([1.0] * 4)
    assert len(document["arrivals"]) == 8


def test_tolerance_override_is_validated(fixture_path):
    result = invoke("--tolerance", "bogus=1", "fcs", "--spec", fixture_path("poisson.json"))
    assert result.exit_code == 2
    assert error_of(result)["error_kind"] == "validation"
    good = invoke("--tolerance", "structure=1e-8", "fcs", "--spec", fixture_path("poisson.json"))
    assert good.exit_code == 0


@pytest.mark.parametrize(
    "args",
    [
        ("evolve", "--times", "1", "--n-max", "20", "--out", "json"),
        ("fcs",),
        ("waiting-time",),
        ("sample", "--horizon", "5"),
        ("discrete", "--delta", "0.1", "--steps", "10"),
    ],
)
def test_unnormalized_initial_state_is_rejected(fixture_path, args):
    name, *rest = args
    result = invoke(name, "--spec", fixture_path("unnormalized_initial.json"), *rest)
    assert result.exit_code == 2
    error = error_of(result)
    assert error["error_kind"] == "validation"
    assert "trace" in error["detail"]
    assert result.stdout == ""


@pytest.mark.parametrize("name", ["fcs", "validate", "evolve"])
def test_non_hermitian_hamiltonian_is_rejected(fixture_path, name):
    extra = ("--times", "1") if name == "evolve" else ()
    result = invoke(name, "--spec", fixture_path("non_hermitian.json"), *extra)
    assert result.exit_code == 2
    error = error_of(result)
    assert error["error_kind"] == "validation"
    assert "Hermitian" in error["detail"]


def test_non_integer_seed_environment_is_rejected(fixture_path, monkeypatch):
    monkeypatch.setenv("TICKWORK_SEED", "abc")
    result = invoke("sample", "--spec", fixture_path("poisson.json"), "--horizon", 5)
    assert result.exit_code == 2
    error = error_of(result)
    assert error["error_kind"] == "validation"
    assert "TICKWORK_SEED" in error["detail"]
    assert result.stdout == ""
    seeded = invoke("sample", "--spec", fixture_path("poisson.json"), "--horizon", 5, "--seed", 3)
    assert seeded.exit_code == 0
