"""Figure CSV jobs and the command-line front end (flags, exit codes, bytes)."""

import math
from pathlib import Path

import pytest

from covertfbl.cli import main
from covertfbl.errors import DomainError
from covertfbl.figures import FIGURE_IDS, FigureJob, figure_defaults, parse_grid, \
    run_figure


def read_rows(path: Path):
    lines = path.read_text(encoding="ascii").splitlines()
    assert lines[0].startswith("# covertfbl ")
    header = lines[1].split(",")
    rows = [line.split(",") for line in lines[2:]]
    return header, rows


class TestParseGrid:
    def test_log_grid(self):
        vals = parse_grid("1:100:3:log")
        assert vals == pytest.approx([1.0, 10.0, 100.0])

    def test_lin_grid(self):
        assert parse_grid("0:1:5:lin") == pytest.approx([0.0, 0.25, 0.5, 0.75, 1.0])

    def test_integer_grid_dedupes(self):
        vals = parse_grid("2:10:20:log", integer=True)
        assert vals == sorted(set(vals))
        assert vals[0] == 2 and vals[-1] == 10

    @pytest.mark.parametrize("spec", ["1:10:5", "1:10:5:cubic", "10:1:5:log",
                                      "0:10:5:log", "1:10:1:log", "a:b:5:log"])
    def test_malformed(self, spec):
        with pytest.raises(DomainError):
            parse_grid(spec)


class TestRunFigure:
    def test_fig2_structure_and_bracket(self, tmp_path):
        out = run_figure(FigureJob("FIG2", str(tmp_path / "f.csv"),
                                   {"grid": "100:2000:10:log"}))
        header, rows = read_rows(out)
        assert header == ["n", "theta_necessary", "theta_sufficient", "theta_exact"]
        assert len(rows) == 10
        for row in rows:
            s, x, n_ = float(row[2]), float(row[3]), float(row[1])
            assert s <= x <= n_

    def test_fig3_default_delta(self):
        assert figure_defaults("FIG3")["delta"] == 0.01
        assert figure_defaults("fig2")["delta"] == 0.1
        assert figure_defaults("FIG4") == {"delta": 0.1, "eps": 0.1,
                                           "grid": "500:100000:50:log"}
        assert figure_defaults("FIG5")["n"] == 2000

    def test_fig4_ordering(self, tmp_path):
        out = run_figure(FigureJob("FIG4", str(tmp_path / "f.csv"),
                                   {"grid": "500:20000:8:log"}))
        header, rows = read_rows(out)
        assert header == ["n", "upper_bits", "lower_bits", "approx_bits", "sqrt_n"]
        for row in rows:
            upper, lower, approx = float(row[1]), float(row[2]), float(row[3])
            assert lower <= approx <= upper
            assert float(row[4]) == pytest.approx(math.sqrt(int(row[0])), rel=1e-12)

    def test_fig5_sweeps_delta(self, tmp_path):
        out = run_figure(FigureJob("FIG5", str(tmp_path / "f.csv"),
                                   {"delta_grid": "0.05:0.5:6:lin"}))
        header, rows = read_rows(out)
        assert header[0] == "delta"
        deltas = [float(r[0]) for r in rows]
        assert deltas == pytest.approx([0.05, 0.14, 0.23, 0.32, 0.41, 0.5])
        # power grows with the budget
        exacts = [float(r[3]) for r in rows]
        assert all(a < b for a, b in zip(exacts, exacts[1:]))

    def test_fig6_trichotomy_row(self, tmp_path):
        out = run_figure(FigureJob("FIG6", str(tmp_path / "f.csv"),
                                   {"grid": "100:1000000:10:log"}))
        header, rows = read_rows(out)
        assert header == ["n", "tvd@tau=0.3", "tvd@tau=0.4", "tvd@tau=0.5",
                          "tvd@tau=0.6", "tvd@tau=0.7"]
        last = rows[-1]
        assert int(last[0]) == 1_000_000
        assert float(last[1]) > 0.99              # tau < 1/2: toward one
        assert abs(float(last[3]) - 0.276) < 0.01  # tau = 1/2: stationary level
        assert float(last[5]) < 0.05               # tau > 1/2: toward zero

    def test_fig7_and_fig8_track_exact(self, tmp_path):
        out = run_figure(FigureJob("FIG7", str(tmp_path / "f7.csv"),
                                   {"grid": "10000:1000000:5:log"}))
        header, rows = read_rows(out)
        assert header == ["n", "tvd", "h_sq", "hellinger_ub_improved", "expansion"]
        for row in rows:
            tvd, approx = float(row[1]), float(row[4])
            assert approx == pytest.approx(tvd, rel=0.05)
        out = run_figure(FigureJob("FIG8", str(tmp_path / "f8.csv"),
                                   {"grid": "1000:100000:5:log"}))
        header, rows = read_rows(out)
        assert header == ["n", "tvd", "kl_bound", "hellinger_ub_improved", "expansion"]
        for row in rows:
            tvd, kl_b, approx = float(row[1]), float(row[2]), float(row[4])
            assert approx == pytest.approx(tvd, rel=1e-6)
            assert tvd <= kl_b + 1e-15

    def test_byte_stability(self, tmp_path):
        job1 = FigureJob("FIG2", str(tmp_path / "a.csv"), {"grid": "100:500:6:log"})
        job2 = FigureJob("FIG2", str(tmp_path / "b.csv"), {"grid": "100:500:6:log"})
        assert run_figure(job1).read_bytes() == run_figure(job2).read_bytes()

    def test_unknown_override_rejected_before_compute(self, tmp_path):
        with pytest.raises(DomainError):
            run_figure(FigureJob("FIG2", str(tmp_path / "f.csv"), {"eps": 0.1}))

    def test_out_of_domain_override_rejected(self, tmp_path):
        with pytest.raises(DomainError):
            run_figure(FigureJob("FIG2", str(tmp_path / "f.csv"), {"delta": 1.5}))
        with pytest.raises(DomainError):
            run_figure(FigureJob("FIG6", str(tmp_path / "f.csv"), {"taus": "0.5,2.0"}))

    def test_unknown_figure_and_missing_dir(self, tmp_path):
        with pytest.raises(DomainError):
            run_figure(FigureJob("FIG99", str(tmp_path / "f.csv")))
        with pytest.raises(DomainError):
            run_figure(FigureJob("FIG2", str(tmp_path / "nodir" / "f.csv")))

    def test_every_figure_has_defaults(self):
        for fid in FIGURE_IDS:
            assert figure_defaults(fid)


class TestCli:
    def test_tvd_success(self, capsys):
        assert main(["tvd", "--n", "2", "--theta", "1"]) == 0
        out = capsys.readouterr().out
        assert "tvd = 0.25" in out

    def test_tau_form(self, capsys):
        assert main(["tvd", "--n", "10000", "--tau", "0.5"]) == 0
        assert "theta = 0.01" in capsys.readouterr().out

    def test_bounds_units(self, capsys):
        assert main(["bounds", "--n", "2", "--theta", "1", "--units", "nats"]) == 0
        nats = capsys.readouterr().out
        assert "kl_fwd = 0.3068528194400547" in nats
        assert main(["bounds", "--n", "2", "--theta", "1"]) == 0
        bits = capsys.readouterr().out
        assert "kl_fwd = 0.4426950408889634" in bits  # (1 - ln 2) / ln 2

    def test_power_and_throughput(self, capsys):
        assert main(["power", "--n", "2000", "--delta", "0.1"]) == 0
        assert "theta_exact" in capsys.readouterr().out
        assert main(["throughput", "--n", "2000", "--delta", "0.1",
                     "--eps", "0.1"]) == 0
        out = capsys.readouterr().out
        assert "upper_bits = 40.80" in out

    def test_expand_and_rates_and_mc(self, capsys):
        assert main(["expand", "--n", "10000", "--tau", "0.6"]) == 0
        assert "rel_err_vs_exact" in capsys.readouterr().out
        assert main(["rates", "--tau", "0.75", "--grid", "1000:100000:6:log"]) == 0
        assert "h_sq_slope" in capsys.readouterr().out
        assert main(["mc", "--n", "100", "--theta", "0.1", "--samples", "50000",
                     "--seed", "7"]) == 0
        assert "tvd_hat" in capsys.readouterr().out

    def test_fig_writes_csv(self, tmp_path, capsys):
        out = tmp_path / "fig2.csv"
        assert main(["fig", "fig2", "--out", str(out),
                     "--grid", "100:300:4:log"]) == 0
        assert out.exists()

    def test_usage_errors_exit_1(self, capsys):
        assert main(["tvd", "--n", "2"]) == 1                      # missing theta
        assert main(["tvd", "--n", "2", "--theta", "1", "--tau", "0.5"]) == 1
        assert main(["power", "--n", "100", "--delta", "2.0"]) == 1  # domain
        assert main(["fig", "fig2", "--out", "/tmp/x.csv", "--eps", "0.5"]) == 1
        assert main([]) == 1

    def test_numerical_failure_exits_2(self, capsys):
        # blocklength far beyond the kernel's validity: the transition-zone
        # series exhausts its iteration budget, an explicit exit-2 failure
        assert main(["tvd", "--n", "20000001", "--theta", "1e-7"]) == 2
        err = capsys.readouterr().err
        assert "numerical failure" in err

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0

    def test_accept_fast_reports_and_exits_3(self, capsys):
        # two criteria are deliberately red (see test_acceptance), so the
        # suite must exit with the acceptance-failure code
        assert main(["accept", "--suite", "fast"]) == 3
        out = capsys.readouterr().out
        assert "PASS criterion 1" in out
        assert "SKIP criterion 3" in out
        assert "FAIL criterion 5" in out
        assert "FAIL criterion 6" in out
        assert "PASS criterion 10" in out
