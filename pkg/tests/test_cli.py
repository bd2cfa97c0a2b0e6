import csv
from dataclasses import replace

import numpy as np
import pytest

from soaaa import cli, io
from soaaa.algorithms import fit
from soaaa.cli import EXIT_FIT, EXIT_OK, EXIT_PARSE, EXIT_POLE, main, parse_points
from soaaa.core import SecondOrderBarycentric
from soaaa.statespace import to_realization

from conftest import random_second_order


def read_eval(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    s = np.array([complex(float(r["s_real"]), float(r["s_imag"])) for r in rows])
    h = np.array([complex(float(r["H_real"]), float(r["H_imag"])) for r in rows])
    return s, h


@pytest.fixture
def samples(tmp_path):
    path = tmp_path / "s.csv"
    assert main(["generate", "--order", "2", "--seed", "0", "--n", "40", "-o", str(path)]) == 0
    return path


class TestFit:
    def test_order_two_truth(self, tmp_path, samples):
        model, report = tmp_path / "m.json", tmp_path / "r.csv"
        code = main(["fit", str(samples), "--method", "so", "--kmax", "2", "--tol", "1e-6",
                     "--real", "-o", str(model), "--report", str(report)])
        assert code == EXIT_OK and model.exists()
        assert io.read_report(report)["l2_rel"][-1] < 1e-6

    def test_malformed_row(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("freq_real,freq_imag,g_real,g_imag\n0,1,1,0\n0,2,x,0\n")
        model = tmp_path / "m.json"
        assert main(["fit", str(bad), "-o", str(model)]) == EXIT_PARSE
        assert not model.exists()

    def test_missing_input(self, tmp_path):
        assert main(["fit", str(tmp_path / "none.csv"), "-o", str(tmp_path / "m.json")]) \
            == EXIT_PARSE

    def test_bad_arguments(self, samples, tmp_path):
        assert main(["fit", str(samples), "--method", "xyz", "-o", "m.json"]) == EXIT_PARSE
        assert main(["fit", str(samples), "--kmax", "0", "-o", str(tmp_path / "m.json")]) \
            == EXIT_PARSE

    def test_aaa2_iterations(self, tmp_path, samples):
        report = tmp_path / "r.csv"
        code = main(["fit", str(samples), "--method", "aaa2", "--kmax", "5",
                     "-o", str(tmp_path / "m.json"), "--report", str(report)])
        assert code == EXIT_OK
        np.testing.assert_array_equal(io.read_report(report)["k"], np.arange(1, 11))

    def test_fit_failure_writes_partial_report(self, tmp_path, samples, monkeypatch):
        # repeating a support index makes the second iteration fail
        def failing_fit(data, config):
            return fit(data, replace(config, support_path=[0, 0, 1]))

        monkeypatch.setattr(cli, "fit", failing_fit)
        report, model = tmp_path / "r.csv", tmp_path / "m.json"
        code = main(["fit", str(samples), "--method", "lso", "--kmax", "3",
                     "-o", str(model), "--report", str(report)])
        assert code == EXIT_FIT and not model.exists()
        np.testing.assert_array_equal(io.read_report(report)["k"], [1])

    def test_seed_report_comment(self, tmp_path, samples):
        report = tmp_path / "r.csv"
        main(["fit", str(samples), "--kmax", "2", "--seed-report", "11",
              "-o", str(tmp_path / "m.json"), "--report", str(report)])
        assert report.read_text().startswith("# seed=11\n")

    def test_deterministic(self, tmp_path, samples):
        outs = []
        for i in range(2):
            m, r = tmp_path / f"m{i}.json", tmp_path / f"r{i}.csv"
            main(["fit", str(samples), "--method", "nso", "--kmax", "3", "-o", str(m),
                  "--report", str(r)])
            doc = io.read_model(m)[1]
            doc.pop("trace")
            outs.append((doc, r.read_text()))
        assert outs[0] == outs[1]


class TestEval:
    @pytest.fixture
    def s1_file(self, tmp_path):
        path = tmp_path / "s1.json"
        m = SecondOrderBarycentric([0.0], [1.0], [1.0], [-2.0])
        io.write_model(path, m, realization=to_realization(m))
        return path

    def test_S1_at_one(self, tmp_path, s1_file):
        pts = tmp_path / "p.csv"
        pts.write_text("freq_real,freq_imag\n1,0\n")
        out = tmp_path / "o.csv"
        assert main(["eval", str(s1_file), "--points", str(pts), "-o", str(out)]) == EXIT_OK
        _, h = read_eval(out)
        assert h[0] == pytest.approx(0.25, rel=1e-15)

    def test_via_both(self, tmp_path, capsys):
        m = random_second_order(np.random.default_rng(3), 3)
        path = tmp_path / "m.json"
        io.write_model(path, m, realization=to_realization(m))
        out = tmp_path / "o.csv"
        code = main(["eval", str(path), "--points", "log:0.1:100:50", "--via", "both",
                     "-o", str(out)])
        assert code == EXIT_OK
        dev = float(capsys.readouterr().err.split(":")[-1])
        assert dev < 1e-9
        s, h = read_eval(out)
        assert s.size == 50
        np.testing.assert_allclose(h, m(s), rtol=1e-15)

    def test_empty_grid(self, tmp_path, s1_file):
        out = tmp_path / "o.csv"
        assert main(["eval", str(s1_file), "--points", "log:1:10:0", "-o", str(out)]) == EXIT_OK
        assert read_eval(out)[0].size == 0

    def test_pole(self, tmp_path, s1_file, capsys):
        pts = tmp_path / "p.csv"
        pts.write_text("freq_real,freq_imag\n-1,0\n")
        assert main(["eval", str(s1_file), "--points", str(pts)]) == EXIT_POLE
        assert "-1" in capsys.readouterr().err

    def test_bad_model(self, tmp_path):
        bad = tmp_path / "m.json"
        bad.write_text("[")
        assert main(["eval", str(bad), "--points", "lin:0:1:3"]) == EXIT_PARSE

    def test_parse_points(self):
        np.testing.assert_allclose(parse_points("lin:0:2:3"), [0, 1j, 2j])
        with pytest.raises(io.ParseError):
            parse_points("log:1:x:3")


class TestMorscore:
    def write(self, path, errs):
        with open(path, "w") as fh:
            fh.write("k,objective,l2_rel,linf_rel,ptw_max\n")
            for k, e in enumerate(errs, start=1):
                e = float(e)
                fh.write(f"{k},0,{e!r},{e!r},{e!r}\n")
        return str(path)

    def scores(self, capsys):
        lines = capsys.readouterr().out.splitlines()[1:]
        return {ln.split()[0]: float(ln.split()[1]) for ln in lines}

    def test_constant_cases(self, tmp_path, capsys):
        a = self.write(tmp_path / "half.csv", [1e-4] * 4)
        b = self.write(tmp_path / "zero.csv", [1.0] * 4)
        assert main(["morscore", a, b, "--eps-min", "1e-8"]) == EXIT_OK
        assert self.scores(capsys) == {"half": 0.5, "zero": 0.0}

    def test_pointwise_better(self, tmp_path, capsys):
        errs = np.array([0.3, 1e-2, 1e-3, 1e-5])
        a = self.write(tmp_path / "a.csv", errs)
        b = self.write(tmp_path / "b.csv", errs / 3)
        assert main(["morscore", a, b]) == EXIT_OK
        s = self.scores(capsys)
        assert s["b"] > s["a"]

    def test_parse_error(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("k,l2_rel\n1,abc\n")
        assert main(["morscore", str(bad)]) == EXIT_PARSE


class TestGenerate:
    def test_reproducible(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for p in (a, b):
            assert main(["generate", "--order", "3", "--seed", "5", "--n", "30", "-o", str(p)]) == 0
        assert a.read_text() == b.read_text()
        assert len(io.read_samples(a)) == 30

    def test_invalid_range(self, tmp_path):
        assert main(["generate", "--fmin", "10", "--fmax", "1", "-o", str(tmp_path / "x.csv")]) \
            == EXIT_PARSE
