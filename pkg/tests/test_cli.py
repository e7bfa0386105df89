import csv
import io

import pytest

from mmnoma.cli import (
    COLUMNS,
    FREQUENCY_BANDS,
    SweepSpec,
    UsageError,
    compare_frequencies,
    frequency_ranking,
    main,
    run_sweep,
)
from mmnoma import cli
from mmnoma.config import default_config
from mmnoma.montecarlo import McEstimate, mc_coverage


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_eval_writes_csv(capsys):
    assert main(["eval", "--set", "noise_dbm=-60"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == ",".join(COLUMNS)
    rows = _rows(out)
    assert [r["role"] for r in rows] == ["near", "far"]
    assert all(0 <= float(r["coverage_or_rate"]) <= 1 for r in rows)
    assert all(r["runtime_ms"] == "" for r in rows)


def test_eval_timing_column(capsys):
    assert main(["eval", "--role", "near", "--timing"]) == 0
    assert float(_rows(capsys.readouterr().out)[0]["runtime_ms"]) >= 0


def test_eval_with_monte_carlo(capsys):
    assert main(["eval", "--method", "mc", "--samples", "2000", "--role", "far"]) == 0
    row = _rows(capsys.readouterr().out)[0]
    assert row["method"] == "mc" and float(row["mc_half_width"]) > 0


def test_config_file(tmp_path, capsys):
    path = tmp_path / "net.toml"
    path.write_text("sigma_m = 12.0\nK = 3\nscheme = \"RNFF\"\nj = 5\n")
    assert main(["eval", "--config", str(path), "--role", "near"]) == 0
    assert _rows(capsys.readouterr().out)[0]["scheme"].startswith("RNFF")


@pytest.mark.parametrize("argv", [
    ["eval", "--set", "bogus_key=1"],
    ["eval", "--set", "a_k=0.7"],
    ["eval", "--config", "/nonexistent/net.toml"],
    ["sweep", "--param", "noise_dbm", "--values", ""],
    ["sweep", "--param", "not_a_key", "--values", "1,2"],
    ["sweep", "--param", "noise_dbm", "--values=-60", "--method", "special1", "--set", "alpha_L=2.5"],
    ["nonsense"],
])
def test_usage_errors_exit_one(argv, capsys):
    assert main(argv) == 1


def test_sweep_rows_in_grid_order(tmp_path):
    out = tmp_path / "sweep.csv"
    argv = ["sweep", "--param", "noise_dbm", "--values=-40,-80,-60", "--method", "theorem",
            "--method", "special2", "--out", str(out)]
    assert main(argv) == 0
    rows = _rows(out.read_text())
    assert [float(r["value"]) for r in rows[::4]] == [-80.0, -60.0, -40.0]
    assert len(rows) == 12
    near = [float(r["coverage_or_rate"]) for r in rows if r["role"] == "near" and r["method"] == "theorem"]
    assert near == sorted(near, reverse=True)


def test_sweep_output_is_reproducible(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        argv = ["sweep", "--param", "sigma_m", "--range", "6:10:2", "--method", "theorem", "--method", "mc",
                "--samples", "3000", "--seed", "3", "--out", str(p)]
        assert main(argv) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_rate_sweep(capsys):
    argv = ["sweep", "--param", "noise_dbm", "--values=-60", "--rate", "100e6", "30e6", "--access", "both"]
    assert main(argv) == 0
    rows = _rows(capsys.readouterr().out)
    assert {r["role"] for r in rows} == {"system"}
    assert all(0 <= float(r["coverage_or_rate"]) <= 130e6 for r in rows)


def test_sweep_spec_validation():
    with pytest.raises(UsageError):
        SweepSpec("noise_dbm", [], ["theorem"])
    with pytest.raises(UsageError):
        SweepSpec("noise_dbm", [-40.0, -60.0], ["theorem"])


def test_run_sweep_integer_parameter():
    spec = SweepSpec("K", [1, 2, 3], ["special2"], ["near"])
    rows = run_sweep(default_config(), spec)
    assert [r["value"] for r in rows] == ["1", "2", "3"]


def test_compare_frequencies_ranking():
    rows = compare_frequencies(default_config(), FREQUENCY_BANDS, [-50.0])
    assert frequency_ranking(rows, "near")[0] == 73e9
    assert frequency_ranking(rows, "near")[-1] == 60e9
    assert frequency_ranking(rows, "far")[0] == 28e9
    assert frequency_ranking(rows, "far")[-1] == 73e9


def test_single_frequency_ranking():
    rows = compare_frequencies(default_config(), FREQUENCY_BANDS[:1], [-50.0])
    assert frequency_ranking(rows, "near") == [28e9]
    assert [r["coverage_or_rate"] for r in rows if r["method"].startswith("rank:")] == ["1", "1"]


def test_compare_freq_command(capsys):
    assert main(["compare-freq", "--noise", "-50"]) == 0
    captured = capsys.readouterr()
    assert "near: 73 GHz" in captured.err
    assert len(_rows(captured.out)) == 16


def test_figure_preset_default_path(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(["fig6", "--samples", "2000"]) == 0
    rows = _rows((tmp_path / "figures" / "fig6.csv").read_text())
    labels = {r["method"] for r in rows}
    assert "mc" in labels
    assert {"special1(n1=10,n2=50)", "special1(n1=10,n2=200)", "special1(n1=1,n2=50)"} <= labels
    assert len(rows) == 6 * 13


def test_validate_exit_codes(capsys, monkeypatch):
    base = ["validate", "--samples", "2000", "--set", "bs_density_per_m2=0"]
    assert main(base + ["--tolerance", "1.0"]) == 0
    assert "validation passed" in capsys.readouterr().out

    def biased(*args, **kwargs):
        est = mc_coverage(*args, **kwargs)
        return McEstimate(1.0 - est.mean, est.half_width, est.n_samples, est.seed)

    monkeypatch.setattr(cli, "mc_coverage", biased)
    assert main(base) == 2
    assert "validation FAILED" in capsys.readouterr().out
