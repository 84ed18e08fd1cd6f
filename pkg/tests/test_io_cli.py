import io
import json

import numpy as np
import pytest

from qharm import (
    CSVFormatError,
    LatticeFunction,
    QLattice,
    lattice_function_to_csv,
    load_lattice_function,
    read_lattice_function,
    report_to_json,
    save_lattice_function,
)
from qharm.cli import main
from qharm.verify import _random_compact


def roundtrip(f, q):
    return read_lattice_function(io.StringIO(lattice_function_to_csv(f)), q)


class TestCSV:
    def test_roundtrip_real(self, rng):
        lat = QLattice(0.5, -3, 7)
        f = LatticeFunction(lat, rng.uniform(-2, 2, lat.size))
        g = roundtrip(f, 0.5)
        np.testing.assert_array_equal(f.values, g.values)
        assert g.value_at_zero is None

    def test_roundtrip_complex_with_origin(self, rng):
        lat = QLattice(0.5, -3, 7)
        vals = rng.uniform(-1, 1, lat.size) + 1j * rng.uniform(-1, 1, lat.size)
        f = LatticeFunction(lat, vals, value_at_zero=1.25 - 0.5j)
        g = roundtrip(f, 0.5)
        np.testing.assert_array_equal(f.values, g.values)
        assert g.value_at_zero == 1.25 - 0.5j

    def test_deterministic_bytes(self, rng):
        lat = QLattice(0.9, -5, 12)
        f = LatticeFunction(lat, rng.uniform(-1, 1, lat.size), value_at_zero=0.75)
        assert lattice_function_to_csv(f) == lattice_function_to_csv(f)
        # serialize -> parse -> serialize is byte-identical
        assert lattice_function_to_csv(roundtrip(f, 0.9)) == lattice_function_to_csv(f)

    def test_file_helpers(self, tmp_path, rng):
        lat = QLattice(0.5, -2, 5)
        f = LatticeFunction(lat, rng.uniform(-1, 1, lat.size))
        path = str(tmp_path / "f.csv")
        save_lattice_function(f, path)
        g = load_lattice_function(path, 0.5)
        np.testing.assert_array_equal(f.values, g.values)

    @pytest.mark.parametrize(
        "text,line",
        [
            ("", 1),
            ("a,b,c,d\n", 1),
            ("n,x,re,im\n", 2),
            ("n,x,re,im\n0,1.0,oops,0.0\n", 2),
            ("n,x,re,im\n0,1.0,1.0\n", 2),
            ("n,x,re,im\n0,1.0,1.0,0.0\n2,0.25,1.0,0.0\n", 3),
            ("n,x,re,im\n0,1.5,1.0,0.0\n", 2),
            ("n,x,re,im\n0,1.0,1.0,0.0\n,0.5,2.0,0.0\n", 3),
            ("n,x,re,im\n,0,2.0,0.0\n,0,2.0,0.0\n0,1.0,1.0,0.0\n", 3),
            ("n,x,re,im\n,0,2.0,0.0\n0,1.0,1.0,0.0\n", 3),
        ],
        ids=[
            "empty",
            "bad-header",
            "no-rows",
            "bad-float",
            "short-row",
            "index-gap",
            "x-mismatch",
            "origin-x-nonzero",
            "duplicate-origin",
            "origin-not-last",
        ],
    )
    def test_parse_errors_carry_line_numbers(self, text, line):
        with pytest.raises(CSVFormatError) as exc:
            read_lattice_function(io.StringIO(text), 0.5)
        assert exc.value.line == line

    def test_blank_lines_ignored(self):
        text = "n,x,re,im\n\n0,1.0,1.0,0.0\n\n1,0.5,2.0,0.0\n"
        f = read_lattice_function(io.StringIO(text), 0.5)
        assert f.lattice.n_min == 0 and f.lattice.n_max == 1

    def test_report_json_deterministic(self):
        payload = {"b": 1.0, "a": complex(1, 2), "arr": np.arange(3)}
        assert report_to_json(payload) == report_to_json(payload)
        parsed = json.loads(report_to_json(payload))
        assert parsed["a"] == {"re": 1.0, "im": 2.0}
        assert parsed["arr"] == [0, 1, 2]


@pytest.fixture
def compact_csv(tmp_path, rng):
    lat = QLattice(0.5, -20, 60)
    f = _random_compact(lat, rng)
    path = str(tmp_path / "in.csv")
    save_lattice_function(f, path)
    return path, f


class TestCLIEval:
    def test_jv_at_zero_is_one(self, capsys):
        assert main(["eval", "jv", "--z", "0", "--qbase", "0.25", "--v", "0"]) == 0
        assert capsys.readouterr().out.strip() == "1"

    def test_finite_pochhammer(self, capsys):
        assert main(["eval", "pochhammer", "--a", "0.5", "--q", "0.5", "--n", "1"]) == 0
        assert float(capsys.readouterr().out) == 0.5

    def test_c_qv_closed_form(self, capsys):
        assert main(["eval", "c_qv", "--q", "0.5", "--v", "0"]) == 0
        assert float(capsys.readouterr().out) == pytest.approx(2.0, rel=1e-14)

    def test_qexp(self, capsys):
        assert main(["eval", "qexp", "--z", "0.25", "--qbase", "0.25"]) == 0
        from qharm import q_exponential

        assert float(capsys.readouterr().out) == pytest.approx(
            q_exponential(0.25, 0.25), rel=1e-14
        )

    def test_missing_argument_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["eval", "jv"])
        assert exc.value.code == 2

    def test_output_file(self, tmp_path):
        path = str(tmp_path / "out.txt")
        assert main(["eval", "c_qv", "--q", "0.5", "--output", path]) == 0
        assert open(path).read().strip() == "2"


class TestCLITransform:
    def test_zero_in_zero_out(self, tmp_path, capsys):
        lat = QLattice(0.5, -20, 60)
        path = str(tmp_path / "z.csv")
        save_lattice_function(LatticeFunction.zero(lat), path)
        assert main(["transform", path]) == 0
        out = capsys.readouterr().out
        g = read_lattice_function(io.StringIO(out), 0.5)
        assert np.all(g.values == 0.0)

    def test_deterministic_bytes(self, compact_csv, tmp_path):
        path, _ = compact_csv
        out1, out2 = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
        assert main(["transform", path, "--output", out1]) == 0
        assert main(["transform", path, "--output", out2]) == 0
        assert open(out1, "rb").read() == open(out2, "rb").read()

    def test_transform_twice_recovers_interior(self, compact_csv, tmp_path):
        from qharm.transform import interior_slice

        path, f = compact_csv
        mid = str(tmp_path / "mid.csv")
        back = str(tmp_path / "back.csv")
        assert main(["transform", path, "--output", mid]) == 0
        assert main(["transform", mid, "--output", back]) == 0
        g = load_lattice_function(back, 0.5)
        sl = interior_slice(f.lattice)
        assert np.abs(g.values[sl] - f.values[sl]).max() < 1e-8

    def test_malformed_csv_exit_2(self, tmp_path, capsys):
        path = str(tmp_path / "bad.csv")
        with open(path, "w") as fh:
            fh.write("n,x,re,im\n0,1.0,nope,0\n")
        assert main(["transform", path]) == 2
        assert "line 2" in capsys.readouterr().err

    def test_missing_file_exit_2(self, capsys):
        assert main(["transform", "/nonexistent/f.csv"]) == 2

    def test_convolve_routes_agree(self, compact_csv, tmp_path, rng):
        path, f = compact_csv
        other = str(tmp_path / "g.csv")
        save_lattice_function(_random_compact(f.lattice, rng), other)
        o1, o2 = str(tmp_path / "s.csv"), str(tmp_path / "d.csv")
        assert main(["convolve", path, other, "--route", "spectral", "--output", o1]) == 0
        assert main(["convolve", path, other, "--route", "direct", "--output", o2]) == 0
        a = load_lattice_function(o1, 0.5)
        b = load_lattice_function(o2, 0.5)
        assert np.abs(a.values - b.values).max() < 1e-8


class TestCLIJudgements:
    def test_probe_qv_json_shape(self, capsys):
        assert main(["probe-qv", "--q", "0.5", "--v", "0"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert set(payload) == {"min_value", "witness", "verdict"}
        assert payload["witness"] is None

    def test_positivity_positive_verdict(self, tmp_path, capsys, rng):
        from qharm import build_transform_table, fourier_transform
        from qharm.qlattice import QParams
        from qharm.verify import _nonneg_density

        lat = QLattice(0.5, -20, 60)
        table = build_transform_table(QParams(q=0.5), lat)
        phi = fourier_transform(_nonneg_density(lat, rng), table)
        path = str(tmp_path / "phi.csv")
        save_lattice_function(phi, path)
        assert main(["positivity", path]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["verdict"] == "POSITIVE"
        assert payload["witness_coefficients"] is None

    def test_positivity_negative_verdict(self, tmp_path, capsys):
        from qharm import build_transform_table, fourier_transform
        from qharm.qlattice import QParams

        lat = QLattice(0.5, -20, 60)
        table = build_transform_table(QParams(q=0.5), lat)
        vals = np.zeros(lat.size)
        vals[lat.index_of(2)] = 1.0
        vals[lat.index_of(4)] = -1.0
        phi = fourier_transform(LatticeFunction(lat, vals), table)
        path = str(tmp_path / "phi.csv")
        save_lattice_function(phi, path)
        assert main(["positivity", path]) == 1
        payload = json.loads(capsys.readouterr().out)
        assert payload["verdict"] == "NEGATIVE"
        assert payload["witness_coefficients"] is not None

    def test_bochner_requires_origin_row(self, compact_csv, capsys):
        path, _ = compact_csv  # written without origin row
        assert main(["bochner", path]) == 2

    def test_bochner_gaussian(self, tmp_path, capsys):
        from qharm import build_transform_table, fourier_transform
        from qharm.qlattice import QParams
        from qharm.verify import _gaussian_density

        lat = QLattice(0.5, -20, 60)
        table = build_transform_table(QParams(q=0.5), lat)
        phi = fourier_transform(_gaussian_density(table, width_exp=1), table)
        path = str(tmp_path / "phi.csv")
        out = str(tmp_path / "measure.csv")
        save_lattice_function(phi, path)
        assert main(["bochner", path, "--output", out]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["accepted"] is True
        recovered = load_lattice_function(out, 0.5)
        assert np.all(np.real(recovered.values) >= -1e-12)


class TestCLIVerify:
    def test_only_single_statement_passes(self, capsys):
        assert main(["verify", "--only", "Prop1"]) == 0
        payload = json.loads(capsys.readouterr().out)
        by_id = {e["statement_id"]: e for e in payload["entries"]}
        assert by_id["Prop1"]["status"] == "pass"
        assert by_id["Prop2"]["status"] == "skip"

    def test_impossible_tolerance_fails_with_repro(self, capsys):
        assert main(["verify", "--only", "Prop1", "--tol", "1e-30"]) == 1
        payload = json.loads(capsys.readouterr().out)
        by_id = {e["statement_id"]: e for e in payload["entries"]}
        assert by_id["Prop1"]["status"] == "fail"
        assert "--only Prop1" in by_id["Prop1"]["repro"]

    def test_verify_deterministic(self, capsys):
        assert main(["verify", "--only", "Prop1,Prop2"]) == 0
        first = capsys.readouterr().out
        assert main(["verify", "--only", "Prop1,Prop2"]) == 0
        second = capsys.readouterr().out
        # runtimes differ between runs; everything else must match
        a, b = json.loads(first), json.loads(second)
        for e in a["entries"] + b["entries"]:
            e["runtime_ms"] = 0.0
        assert a == b
