import json

import pytest

from modules.cli import EXIT_BUDGET, EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, main


def run_json(capsys, *argv):
    code = main([*argv, "--json"])
    return code, json.loads(capsys.readouterr().out)


class TestScalarVerbs:
    @pytest.mark.parametrize("argv, expected", [
        (["sigma", "3", "5"], "10"),
        (["sigma", "3", "0"], "0"),
        (["lambda", "3", "8"], "6"),
        (["unrank", "3", "16"], "2 2 0"),
        (["rank", "0", "0", "1"], "4"),
    ])
    def test_text_output(self, capsys, argv, expected):
        assert main(argv) == EXIT_OK
        assert capsys.readouterr().out.strip() == expected

    def test_json_output(self, capsys):
        assert run_json(capsys, "sigma", "3", "17") == (EXIT_OK, {"n": 3, "m": 17, "sigma": 21})
        assert run_json(capsys, "lambda", "2", "10") == (EXIT_OK, {"n": 2, "m": 10, "lambda": 7})

    @pytest.mark.parametrize("argv", [
        ["sigma", "0", "5"],
        ["sigma", "3", "-1"],
        ["lambda", "3", "x"],
        ["rank"],
        ["nonsense"],
        [],
    ])
    def test_bad_arguments(self, capsys, argv):
        assert main(argv) == EXIT_USAGE


class TestSegments:
    def test_segment_text(self, capsys):
        assert main(["segment", "2", "4"]) == EXIT_OK
        assert capsys.readouterr().out == "0 0\n1 0\n0 1\n1 1\n"

    def test_segment_json(self, capsys):
        code, payload = run_json(capsys, "segment", "2", "3")
        assert code == EXIT_OK
        assert payload == {"n": 2, "m": 3, "points": [[0, 0], [1, 0], [0, 1]]}

    def test_segment_cap(self, capsys, monkeypatch):
        monkeypatch.setattr("modules.settings.SEGMENT_CAP", 5)
        assert main(["segment", "2", "6"]) == EXIT_USAGE
        assert "error" in capsys.readouterr().err


class TestPointSetVerbs:
    def test_profile(self, capsys, tmp_path):
        path = tmp_path / "points.txt"
        path.write_text("0 0\n2 3\n5 1\n")
        code, payload = run_json(capsys, "profile", str(path))
        assert code == EXIT_OK
        assert payload == {"kind": "hyperplane", "n": 2, "size": 3, "per_axis": [3, 3], "total": 6}

        code, payload = run_json(capsys, "profile", "--kind", "lambda", str(path))
        assert payload["kind"] == "axis"
        assert payload["total"] == 6

    def test_minimise(self, capsys, tmp_path):
        path = tmp_path / "points.txt"
        path.write_text("0 0\n2 3\n5 1\n")
        code, payload = run_json(capsys, "minimise", str(path))
        assert code == EXIT_OK
        assert payload == {"n": 2, "size": 3, "sigma": 4, "points": [[0, 0], [1, 0], [0, 1]]}

    def test_minimise_trace_of_segment(self, capsys, tmp_path):
        main(["segment", "3", "17"])
        path = tmp_path / "segment.txt"
        path.write_text(capsys.readouterr().out)
        code, records = run_json(capsys, "minimise", "--trace", str(path))
        assert code == EXIT_OK
        assert len(records) == 1
        assert records[0]["sigma"] == 21

    def test_minimise_trace_decreases(self, capsys, tmp_path):
        path = tmp_path / "row.txt"
        path.write_text("".join(f"{k} 0\n" for k in range(5)))
        code, records = run_json(capsys, "minimise", "--trace", str(path))
        assert code == EXIT_OK
        sigmas = [r["sigma"] for r in records]
        assert sigmas == sorted(sigmas, reverse=True)
        assert sigmas[-1] == 5

    def test_malformed_file(self, capsys, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("0 0\n0 0\n")
        assert main(["minimise", str(path)]) == EXIT_USAGE
        assert "line 2" in capsys.readouterr().err

    def test_missing_file(self, capsys, tmp_path):
        assert main(["profile", str(tmp_path / "absent.txt")]) == EXIT_USAGE

    def test_pipeline_failure_is_a_violation(self, capsys, tmp_path, monkeypatch):
        def broken(A):
            raise ValueError("negative slab")

        monkeypatch.setattr("modules.cli.rearrange_to_segment", broken)
        path = tmp_path / "points.txt"
        path.write_text("0 0\n2 3\n")
        assert main(["minimise", str(path)]) == EXIT_VIOLATION
        assert "internal check failed: ValueError while rearranging" in capsys.readouterr().err


class TestOracleVerb:
    def test_small_box(self, capsys):
        code, payload = run_json(capsys, "oracle", "--kind", "sigma", "2", "3", "--box", "3,3")
        assert code == EXIT_OK
        assert payload["min_value"] == 4
        assert payload["box"] == [3, 3]

    def test_budget_refused(self, capsys):
        assert main(["oracle", "3", "5", "--budget", "10"]) == EXIT_BUDGET
        assert "budget" in capsys.readouterr().err

    def test_box_arity(self, capsys):
        assert main(["oracle", "3", "2", "--box", "3,3"]) == EXIT_USAGE


class TestVerify:
    def test_sub_suite(self, capsys):
        code, reports = run_json(capsys, "verify", "--suite", "sub", "--n", "2", "--mmax", "300")
        assert code == EXIT_OK
        assert [r["law"] for r in reports] == ["sub_i", "sub_ii", "sub_iii"]
        assert all(r["cases_checked"] > 0 and r["violations"] == [] for r in reports)

    @pytest.mark.parametrize("argv", [
        ["--suite", "idt", "--n", "3", "--mmax", "500"],
        ["--suite", "hz19", "--n", "3", "--mmax", "500"],
        ["--suite", "lw", "--n", "4", "--mmax", "500"],
        ["--suite", "restate", "--trials", "50"],
        ["--suite", "random", "--trials", "10", "--mmax", "20", "--coord-max", "5"],
    ])
    def test_suites_pass(self, capsys, argv):
        code, reports = run_json(capsys, "verify", *argv)
        assert code == EXIT_OK
        assert all(r["violations"] == [] for r in reports)

    def test_text_report(self, capsys):
        assert main(["verify", "--suite", "lw", "--n", "2", "--mmax", "100"]) == EXIT_OK
        assert "lw_agm" in capsys.readouterr().out

    def test_unknown_suite(self, capsys):
        assert main(["verify", "--suite", "everything"]) == EXIT_USAGE

    @pytest.mark.slow
    @pytest.mark.parametrize("suite", ["stability", "lambda"])
    def test_enumeration_suites(self, capsys, suite):
        code, reports = run_json(capsys, "verify", "--suite", suite, "--threads", "2")
        assert code == EXIT_OK
        assert all(r["violations"] == [] for r in reports)
