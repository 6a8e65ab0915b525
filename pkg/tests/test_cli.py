import csv
import io
import json

import pytest

from bftk.main import EXIT_FAIL, EXIT_PASS, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestMeasure:
    def test_json_record(self, capsys):
        code, out = run(capsys, "measure", "--fn", "fam:or:4", "--measures", "deg,lambda,s")
        assert code == EXIT_PASS
        data = json.loads(out)
        assert data == {"fspec": "tt:4:7fff", "n": 4, "s": 4, "deg": 4, "lambda": pytest.approx(2.0)}

    def test_csv_record(self, capsys):
        code, out = run(capsys, "--format", "csv", "measure", "--fn", "fam:parity:3", "--measures", "lambda")
        assert code == EXIT_PASS
        rows = list(csv.DictReader(io.StringIO(out)))
        assert float(rows[0]["lambda"]) == pytest.approx(3.0)

    def test_emit_graph(self, capsys, tmp_path):
        path = tmp_path / "graph.txt"
        code, _ = run(capsys, "measure", "--fn", "fam:or:2", "--measures", "s", "--emit-graph", str(path))
        assert code == EXIT_PASS
        assert path.read_text().splitlines() == ["0 1", "0 2"]

    def test_parse_error_is_a_usage_error(self, capsys):
        code, _ = run(capsys, "measure", "--fn", "bogus")
        assert code == EXIT_USAGE

    def test_default_measures_above_caps(self, capsys):
        code, out = run(capsys, "measure", "--fn", "fam:or:8")
        assert code == EXIT_PASS
        data = json.loads(out)
        assert data["s"] == 8 and "D" not in data

    def test_cap_error(self, capsys):
        code, _ = run(capsys, "measure", "--fn", "fam:or:8", "--measures", "D")
        assert code == EXIT_USAGE


class TestVerify:
    def test_list_relations(self, capsys):
        code, out = run(capsys, "verify", "--list-relations")
        assert code == EXIT_PASS
        ids = {item["id"]: item["citation"] for item in json.loads(out)}
        assert ids["huang"] == "deg(f) <= lambda(f)^2"

    def test_exhaustive_csv(self, capsys):
        code, out = run(capsys, "--format", "csv", "--jobs", "1", "verify", "--n", "2", "--exhaustive",
                        "--relations", "huang,bs-ge-s")
        assert code == EXIT_PASS
        rows = list(csv.DictReader(io.StringIO(out)))
        assert [r["id"] for r in rows] == ["huang", "bs-ge-s"]
        assert all(r["failed"] == "0" for r in rows)

    def test_exhaustive_cap(self, capsys):
        code, _ = run(capsys, "verify", "--n", "5", "--exhaustive")
        assert code == EXIT_USAGE

    def test_unknown_relation(self, capsys):
        code, _ = run(capsys, "verify", "--n", "2", "--relations", "nope")
        assert code == EXIT_USAGE

    def test_reports_are_byte_identical(self, tmp_path):
        paths = [tmp_path / "a.json", tmp_path / "b.json"]
        for path in paths:
            code = main(["--out", str(path), "--jobs", "2", "--seed", "7", "verify", "--n", "2", "--exhaustive",
                         "--relations", "all"])
            assert code == EXIT_PASS
        assert paths[0].read_bytes() == paths[1].read_bytes()
        assert json.loads(paths[0].read_text())["seed"] == 7


class TestCertificates:
    def test_gamma2_matrix_to_file(self, tmp_path):
        path = tmp_path / "gamma2.json"
        assert main(["--out", str(path), "gamma2", "--n", "12", "--d", "3", "--emit-matrix"]) == EXIT_PASS
        data = json.loads(path.read_text())
        assert data["bound"] == pytest.approx(3.0)
        assert data["band_holds"] is True
        assert data["M"][0][:4] == [0, -1, -2, -3]

    def test_gamma2_bad_degree(self, capsys):
        code, _ = run(capsys, "gamma2", "--n", "3", "--d", "5")
        assert code == EXIT_USAGE

    def test_huang(self, capsys):
        code, out = run(capsys, "huang", "--n", "3")
        assert code == EXIT_PASS
        data = json.loads(out)
        assert data["nonzeros"] == 24
        assert data["square_is_nI"] and data["pattern_is_hypercube"]

    def test_huang_matrix(self, capsys):
        code, out = run(capsys, "huang", "--n", "1", "--emit-matrix")
        assert code == EXIT_PASS
        assert json.loads(out)["matrix"] == [[0, 1], [1, 0]]

    def test_huang_witness(self, capsys):
        code, out = run(capsys, "huang-witness", "--fn", "fam:and_or:2,2")
        assert code == EXIT_PASS
        assert json.loads(out)["holds"] is True

    def test_chain(self, capsys):
        code, out = run(capsys, "chain", "--fn", "fam:majority:3", "--epsilon", "0.25")
        assert code == EXIT_PASS
        assert json.loads(out)["holds"] is True

    def test_adeg(self, capsys):
        code, out = run(capsys, "adeg", "--fn", "fam:parity:2")
        assert code == EXIT_PASS
        data = json.loads(out)
        assert data["degree"] == 2
        assert data["infeasible_below"]["valid"] is True

    def test_identities(self, capsys):
        code, _ = run(capsys, "identities", "--fn", "fam:xor_or:3")
        assert code == EXIT_PASS


class TestOtherCommands:
    def test_compose(self, capsys):
        code, out = run(capsys, "compose", "--f", "fam:or:2", "--g", "fam:and:2")
        assert code == EXIT_PASS
        data = json.loads(out)
        assert data["lambda_composed"] == pytest.approx(2.0)
        assert data["deg_composed"] == 4

    def test_parse_with_window(self, capsys):
        code, out = run(capsys, "parse", "--formula", "((x1 | x2) & x3)", "--adeg")
        assert code == EXIT_PASS
        data = json.loads(out)
        assert data["degree_equals_n"] is True and data["adeg_window_holds"] is True

    def test_parse_error(self, capsys):
        code, _ = run(capsys, "parse", "--formula", "(x1 & x1)")
        assert code == EXIT_USAGE

    def test_graphprop(self, capsys):
        code, out = run(capsys, "graphprop", "--property", "connected", "--vertices", "4")
        assert code == EXIT_PASS
        data = json.loads(out)
        assert data["edge_variables"] == 6 and data["monotone"] is True

    def test_graphprop_unknown(self, capsys):
        code, _ = run(capsys, "graphprop", "--property", "planar", "--vertices", "4")
        assert code == EXIT_USAGE

    def test_argparse_usage(self):
        with pytest.raises(SystemExit) as err:
            main(["measure"])
        assert err.value.code == EXIT_USAGE

    def test_failure_exit_code_constant(self):
        assert EXIT_FAIL == 1

    def test_unexpected_error(self, capsys, monkeypatch):
        from bftk.api import commands

        async def broken(args, cfg):
            raise ZeroDivisionError("boom")

        monkeypatch.setitem(commands.COMMANDS, "huang", broken)
        code = main(["huang", "--n", "2"])
        err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert code == EXIT_FAIL
        assert err["extra"]["type"] == "ZeroDivisionError"
