import csv
import io
import json
import math

import pytest

from cli import build_parser, main
from transform import WORKERS_ENV, hilhorst_uts_closed

REFERENCE = "hilhorst:a=1,b=2,q=1.5"


@pytest.fixture(autouse=True)
def serial(monkeypatch):
    monkeypatch.delenv(WORKERS_ENV, raising=False)


def table(text: str):
    """Header and rows of a CSV artifact, meta lines dropped."""
    body = [line for line in text.splitlines() if not line.startswith("#")]
    rows = list(csv.reader(io.StringIO("\n".join(body))))
    return rows[0], rows[1:]


class TestTransform:
    def test_csv(self, capsys):
        code = main(["transform", "--density", REFERENCE, "--qp", "1.5",
                     "--k-grid=-1:1:3", "--quiet"])
        out = capsys.readouterr().out
        assert code == 0
        assert out.startswith("# ")
        assert '# qp: 1.5' in out.splitlines()
        header, rows = table(out)
        assert header == ["k_re", "k_im", "F_re", "F_im", "abs_err"]
        assert len(rows) == 3
        k, _, re, im, _ = map(float, rows[2])
        expected = hilhorst_uts_closed(math.sqrt(2), 1.5, k)
        assert complex(re, im) == pytest.approx(expected, abs=1e-9)

    def test_json(self, capsys):
        code = main(["transform", "--density", REFERENCE, "--qp", "1.3",
                     "--k-grid=0:2:3", "--k-imag", "0.5", "--format", "json", "--quiet"])
        document = json.loads(capsys.readouterr().out)
        assert code == 0
        assert document["meta"]["density"]["name"] == "hilhorst"
        assert [r["k_im"] for r in document["records"]] == [0.5, 0.5, 0.5]

    def test_narration_stays_off_stdout(self, capsys):
        main(["transform", "--density", REFERENCE, "--qp", "1.5", "--k-grid=0:1:2"])
        captured = capsys.readouterr()
        assert "[*] Density" in captured.err
        assert "[*]" not in captured.out

    def test_out_file(self, tmp_path, capsys):
        path = tmp_path / "table.csv"
        code = main(["transform", "--density", REFERENCE, "--qp", "1.5",
                     "--k-grid=0:1:2", "--out", str(path)])
        assert code == 0
        assert f"[✓] Wrote {path}" in capsys.readouterr().out
        _, rows = table(path.read_text())
        assert float(rows[0][2]) == pytest.approx(1.0, abs=1e-12)

    def test_byte_identical_reruns(self, tmp_path):
        paths = [tmp_path / "first.csv", tmp_path / "second.csv"]
        for path in paths:
            main(["transform", "--density", REFERENCE, "--qp", "1.3",
                  "--k-grid=-2:2:5", "--out", str(path), "--quiet"])
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_tabulated_density(self, tmp_path, capsys):
        path = tmp_path / "tri.csv"
        path.write_text("x,f\n0,0\n1,1\n2,0\n")
        code = main(["transform", "--density", f"tabulated:path={path}", "--qp", "1.3",
                     "--k-grid=0:1:2", "--quiet"])
        assert code == 0
        _, rows = table(capsys.readouterr().out)
        assert float(rows[0][2]) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("argv", [
        ["--qp", "2.5"],
        ["--qp", "1.5", "--format", "xml"],
        ["--qp", "1.5", "--k-grid=1:-1:3"],
        ["--qp", "1.5", "--rel-tol", "0"],
        ["--qp", "1.5", "--workers", "0"],
    ])
    def test_configuration_errors(self, argv, capsys):
        assert main(["transform", "--density", REFERENCE] + argv) == 2
        assert "[!] Configuration error" in capsys.readouterr().err

    def test_wide_support_near_q_one(self, capsys):
        code = main(["transform", "--density", "hilhorst:a=1e-20,b=1,q=1.05", "--qp", "1.5",
                     "--k-grid=0:1:2", "--quiet"])
        assert code == 0
        _, rows = table(capsys.readouterr().out)
        assert all(math.isfinite(float(v)) for row in rows for v in row)
        assert float(rows[0][2]) == pytest.approx(1.0, abs=1e-6)

    def test_bad_density(self, capsys):
        assert main(["transform", "--density", "hilhorst:a=2,b=1,q=1.5", "--qp", "1.5"]) == 2
        assert main(["transform", "--density", "qgaussian:q=1.3,width=-1", "--qp", "1.5"]) == 2


class TestScan:
    def test_json(self, capsys):
        code = main(["scan", "--density", REFERENCE, "--k", "2j", "--qp-grid", "1.3:1.7:3",
                     "--format", "json", "--quiet"])
        document = json.loads(capsys.readouterr().out)
        assert code == 0
        assert document["meta"]["k"] == [0.0, 2.0]
        records = document["records"]
        assert [r["qp"] for r in records] == pytest.approx([1.3, 1.5, 1.7])
        middle = complex(records[1]["F_re"], records[1]["F_im"])
        assert middle == pytest.approx(hilhorst_uts_closed(math.sqrt(2), 1.5, 2j), abs=1e-9)

    def test_inadmissible_grid(self):
        assert main(["scan", "--density", REFERENCE, "--qp-grid", "1.5:2.5:3", "--quiet"]) == 2


class TestClass:
    def test_collapse_and_separation(self, capsys):
        code = main(["class", "--q", "1.5", "--lambda", repr(math.sqrt(2)),
                     "--a-values", "1,1.5", "--k-grid=-2:2:5", "--separate-from", "2",
                     "--quiet"])
        report = json.loads(capsys.readouterr().out)
        assert code == 0
        assert report["collapse_ok"] is True
        assert report["separation_ok"] is True
        assert [m["b"] for m in report["class"]["members"]] == [
            pytest.approx(2.0), pytest.approx(6.0)
        ]
        assert len(report["table"]) == 5
        assert report["meta"]["separate_from"] == 2.0

    def test_single_member(self, capsys):
        code = main(["class", "--q", "1.5", "--lambda", "2", "--a-values", "1", "--quiet"])
        report = json.loads(capsys.readouterr().out)
        assert code == 0
        assert report["collapse_ok"] is None and report["table"] == []

    def test_unachievable_lambda(self, capsys):
        code = main(["class", "--q", "1.5", "--lambda", "0.5", "--a-values", "1"])
        assert code == 3
        err = capsys.readouterr().err
        assert "[!] Numeric failure" in err and "a=1.0" in err

    def test_same_class_separation_is_a_configuration_error(self):
        code = main(["class", "--q", "1.5", "--lambda", "2", "--a-values", "1",
                     "--separate-from", "2", "--quiet"])
        assert code == 2


class TestInvert:
    def test_recovery_table(self, capsys):
        code = main(["invert", "--density", REFERENCE, "--k-max", "50", "--n-k", "500",
                     "--x", "1.5,2.0", "--quiet"])
        out = capsys.readouterr().out
        assert code == 0
        header, rows = table(out)
        assert header == ["x", "f_true", "f_recovered", "abs_err", "flagged"]
        assert [row[-1] for row in rows] == ["false", "true"]
        assert float(rows[0][2]) == pytest.approx(8 / 9, abs=0.05)

    def test_bad_config(self):
        assert main(["invert", "--density", REFERENCE, "--x", "1.5", "--epsilon", "0"]) == 2


class TestSelftest:
    def test_list(self, capsys):
        assert main(["selftest", "--list"]) == 0
        out = capsys.readouterr().out
        assert "hypergeometric" in out
        assert "inverse_recovery" in out and "(slow)" in out

    def test_single_check(self, capsys):
        assert main(["selftest", "--only", "hypergeometric"]) == 0
        out = capsys.readouterr().out
        assert "hypergeometric" in out and "PASS" in out
        assert "[✓] 1/1 checks passed" in out

    def test_loose_tolerance_fails(self, capsys):
        code = main(["selftest", "--only", "full_closed_form", "--rel-tol", "1e-2"])
        assert code == 1
        assert "cannot certify" in capsys.readouterr().out

    def test_unknown_check(self):
        assert main(["selftest", "--only", "bogus", "--quiet"]) == 2


def test_parser_requires_a_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])
