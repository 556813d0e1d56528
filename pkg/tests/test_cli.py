"""Command-line surface tests."""
import json

import numpy as np
import pytest

from conftest import EX2_MCEP, EX3_A1HAT
from minkinv import cli
from minkinv import fixtures as bundled

EX_PATHS = {name: str(bundled.fixture_path(name)) for name in bundled.NAMES}


def run(capsys, argv):
    status = cli.main(argv)
    captured = capsys.readouterr()
    return status, captured.out, captured.err


def parse(out):
    return json.loads(out)


def entries_to_matrix(entries):
    return np.array([[complex(re, im) for re, im in row] for row in entries])


class TestInverseCommand:
    def test_metric_core_ep_golden(self, capsys):
        status, out, _ = run(capsys, ["inverse", "--kind", "m-core-ep", EX_PATHS["ex2"]])
        assert status == 0
        report = parse(out)
        assert report["schema"] == 1 and report["exists"]
        result = entries_to_matrix(report["result"])
        assert np.linalg.norm(result - EX2_MCEP) <= 1e-8
        assert all(value <= 1e-8 for value in report["residuals"].values())

    @pytest.mark.parametrize("route", ["block", "drazin", "parts", "oracle"])
    def test_routes_agree(self, capsys, route):
        status, out, _ = run(
            capsys, ["inverse", "--kind", "m-core-ep", "--route", route, EX_PATHS["ex2"]]
        )
        assert status == 0
        result = entries_to_matrix(parse(out)["result"])
        assert np.linalg.norm(result - EX2_MCEP) <= 1e-8

    def test_not_invertible_is_clean_negative(self, capsys):
        status, out, _ = run(capsys, ["inverse", "--kind", "m-core-ep", EX_PATHS["ex1"]])
        assert status == 1
        report = parse(out)
        assert report["exists"] is False and report["result"] is None
        assert any("G1 singular" in note for note in report["diagnostics"])

    def test_route_flag_restricted(self, capsys):
        status, _, err = run(
            capsys, ["inverse", "--kind", "drazin", "--route", "oracle", EX_PATHS["ex2"]]
        )
        assert status == 2
        assert "m-core-ep" in err

    def test_every_kind_runs_on_identity(self, capsys, tmp_path):
        payload = {
            "n": 2,
            "entries": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]],
        }
        path = tmp_path / "eye.json"
        path.write_text(json.dumps(payload))
        for kind in sorted(cli.KIND_ALIASES):
            status, out, _ = run(capsys, ["inverse", "--kind", kind, str(path)])
            assert status == 0
            result = entries_to_matrix(parse(out)["result"])
            assert np.linalg.norm(result - np.eye(2)) <= 1e-12


class TestExistsCommand:
    def test_negative(self, capsys):
        status, out, _ = run(capsys, ["exists", "--kind", "m-core-ep", EX_PATHS["ex1"]])
        assert status == 1
        report = parse(out)
        assert report["exists"] is False
        assert "G1 singular" in report["diagnostics"]

    def test_positive(self, capsys):
        status, out, _ = run(capsys, ["exists", "--kind", "m-core-ep", EX_PATHS["ex2"]])
        assert status == 0 and parse(out)["exists"] is True

    def test_always_existing_kinds(self, capsys):
        for kind in ("drazin", "core-ep"):
            status, out, _ = run(capsys, ["exists", "--kind", kind, EX_PATHS["ex1"]])
            assert status == 0 and parse(out)["exists"] is True

    def test_group_negative_on_index_two(self, capsys):
        status, out, _ = run(capsys, ["exists", "--kind", "group", EX_PATHS["ex2"]])
        assert status == 1


class TestOrderCommand:
    def test_bundled_pair_both_directions(self, capsys):
        for pair in (("ex4a", "ex4b"), ("ex4b", "ex4a")):
            status, out, _ = run(
                capsys,
                ["order", "--relation", "m-core-ep", EX_PATHS[pair[0]], EX_PATHS[pair[1]]],
            )
            assert status == 0
            report = parse(out)
            assert report["holds"] and report["agree"]

    def test_unrelated_pair_negative(self, capsys):
        status, out, _ = run(
            capsys, ["order", "--relation", "m-core-ep", EX_PATHS["ex2"], EX_PATHS["ex3"]]
        )
        assert status == 1
        assert parse(out)["holds"] is False

    def test_m_core_relation_on_non_cm_is_negative_exit(self, capsys):
        status, out, _ = run(
            capsys, ["order", "--relation", "m-core", EX_PATHS["ex2"], EX_PATHS["ex3"]]
        )
        assert status == 1  # index 2 input: clean mathematical negative


class TestAdjointAndDecompose:
    def test_adjoint_roundtrip(self, capsys, ex2):
        status, out, _ = run(capsys, ["adjoint", EX_PATHS["ex2"]])
        assert status == 0
        result = entries_to_matrix(parse(out)["result"])
        g = np.diag([1.0, -1.0, -1.0])
        assert np.array_equal(result, g @ ex2.conj().T @ g)

    def test_decompose_reports_blocks(self, capsys):
        status, out, _ = run(capsys, ["decompose", EX_PATHS["ex2"]])
        assert status == 0
        report = parse(out)
        assert report["rank_of_core"] == 1 and report["index"] == 2
        g1 = entries_to_matrix(report["decomposition"]["G1"])
        assert abs(g1[0, 0] - (-1.0 / 9.0)) <= 1e-10
        assert report["g1_invertible"] is True

    def test_m_decompose_golden(self, capsys):
        status, out, _ = run(capsys, ["m-decompose", EX_PATHS["ex3"]])
        assert status == 0
        report = parse(out)
        a1hat = entries_to_matrix(report["decomposition"]["A1hat"])
        assert np.linalg.norm(a1hat - EX3_A1HAT) <= 1e-8

    def test_m_decompose_negative(self, capsys):
        status, out, _ = run(capsys, ["m-decompose", EX_PATHS["ex1"]])
        assert status == 1
        assert parse(out)["exists"] is False


class TestVerifyCommand:
    def test_valid_candidate(self, capsys, tmp_path):
        candidate = tmp_path / "x.json"
        candidate.write_text(
            json.dumps(
                {"n": 3, "entries": [[[float(v), 0.0] for v in row] for row in EX2_MCEP]}
            )
        )
        status, out, _ = run(
            capsys, ["verify", "--kind", "m-core-ep", EX_PATHS["ex2"], str(candidate)]
        )
        assert status == 0
        assert parse(out)["exists"] is True

    def test_wrong_candidate_fails(self, capsys, tmp_path):
        candidate = tmp_path / "x.json"
        eye = np.eye(3)
        candidate.write_text(
            json.dumps({"n": 3, "entries": [[[float(v), 0.0] for v in row] for row in eye]})
        )
        status, out, _ = run(
            capsys, ["verify", "--kind", "m-core-ep", EX_PATHS["ex2"], str(candidate)]
        )
        assert status == 1


class TestInputHandling:
    def test_malformed_json_reports_position(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"n": 3, "entries": [[1, 2')
        status, _, err = run(capsys, ["adjoint", str(bad)])
        assert status == 2
        assert "line" in err and "column" in err

    def test_non_pair_entry_rejected(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"n": 1, "entries": [[1.0]]}))
        status, _, err = run(capsys, ["adjoint", str(bad)])
        assert status == 2
        assert "[re, im]" in err

    def test_missing_file(self, capsys, tmp_path):
        status, _, err = run(capsys, ["adjoint", str(tmp_path / "absent.json")])
        assert status == 2

    def test_unknown_flag_exits_two(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            cli.main(["inverse", "--kind", "m-core-ep", "--bogus", EX_PATHS["ex2"]])
        assert excinfo.value.code == 2

    def test_csv_reader(self, capsys, tmp_path):
        path = tmp_path / "mat.csv"
        path.write_text("1.0,2.0\n3.0,4.0\n")
        status, out, _ = run(capsys, ["adjoint", str(path)])
        assert status == 0
        result = entries_to_matrix(parse(out)["result"])
        assert np.array_equal(result, np.array([[1.0, -3.0], [-2.0, 4.0]]))

    def test_shape_mismatch_in_order(self, capsys, tmp_path):
        small = tmp_path / "small.json"
        small.write_text(json.dumps({"n": 1, "entries": [[[1.0, 0.0]]]}))
        status, _, err = run(
            capsys, ["order", "--relation", "m-core-ep", EX_PATHS["ex2"], str(small)]
        )
        assert status == 2


class TestOutputContract:
    def test_determinism(self, capsys):
        _, first, _ = run(capsys, ["inverse", "--kind", "m-core-ep", EX_PATHS["ex2"]])
        _, second, _ = run(capsys, ["inverse", "--kind", "m-core-ep", EX_PATHS["ex2"]])
        assert first == second

    def test_result_roundtrip_bit_exact(self, capsys, tmp_path):
        _, out, _ = run(capsys, ["inverse", "--kind", "m-core-ep", EX_PATHS["ex3"]])
        report = parse(out)
        path = tmp_path / "result.json"
        path.write_text(json.dumps({"n": 3, "entries": report["result"]}))
        _, reread = cli.read_matrix(str(path))
        assert np.array_equal(reread, entries_to_matrix(report["result"]))

    def test_pretty_mode_renders(self, capsys):
        status, out, _ = run(
            capsys, ["inverse", "--kind", "m-core-ep", "--pretty", EX_PATHS["ex2"]]
        )
        assert status == 0
        assert "residuals" in out and "result" in out

    def test_residual_labels_match_library(self, capsys):
        from minkinv.verify import AXIOM_LABELS

        _, out, _ = run(capsys, ["inverse", "--kind", "m-core-ep", EX_PATHS["ex2"]])
        labels = set(parse(out)["residuals"])
        assert labels == set(AXIOM_LABELS["m_core_ep"])

    def test_tol_env_and_flag(self, capsys, monkeypatch):
        monkeypatch.setenv("MINKINV_TOL", "1e-5")
        _, out, _ = run(capsys, ["exists", "--kind", "m-core-ep", EX_PATHS["ex2"]])
        assert parse(out)["tolerances"]["residual_tol"] == 1e-5
        _, out, _ = run(
            capsys, ["exists", "--kind", "m-core-ep", "--tol", "1e-6", EX_PATHS["ex2"]]
        )
        assert parse(out)["tolerances"]["residual_tol"] == 1e-6

    def test_bad_env_tol_is_input_error(self, capsys, monkeypatch):
        monkeypatch.setenv("MINKINV_TOL", "banana")
        status, _, err = run(capsys, ["exists", "--kind", "m-core-ep", EX_PATHS["ex2"]])
        assert status == 2
