from fractions import Fraction

import pytest

from rankdec import io as fio
from rankdec.cli import main, table_rows, tau_formula
from rankdec.code import CodeParams

REF = ["--r", "3", "--n", "15", "--m", "2", "--k", "1", "--s", "2"]
SMALL = ["--r", "3", "--n", "5", "--m", "2", "--k", "1", "--s", "2"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def kv(text):
    return fio.parse_kv([ln for ln in text.splitlines() if "=" in ln and not ln.startswith("#")])


def test_params_report(capsys):
    code, out, _ = run(capsys, "params", *REF)
    assert code == 0
    d = kv(out)
    assert d["rate"] == "1/15" and d["e_max"] == "8" and d["tau"] == "8/15"
    assert d["rho"] == "1/2" and d["mrd"] == "0" and d["unique_radius"] == "6"
    assert d["tau_formula"] == "(2/3)(1-2R)"
    assert d["rate_limit"] == "77/225"
    assert out.startswith("# rankdec params")


def test_params_output_is_a_params_file(tmp_path, capsys):
    out = tmp_path / "p.txt"
    assert run(capsys, "params", *SMALL, "--out", str(out))[0] == 0
    assert fio.load_params(out.read_text()) == CodeParams(3, 1, 5, 2, 1, 2)


@pytest.mark.parametrize("argv", [["--r", "3", "--n", "4", "--m", "1", "--k", "1"],
                                  ["--r", "6", "--n", "5", "--m", "1", "--k", "1"],
                                  ["--r", "3", "--n", "5", "--m", "1", "--k", "3"],
                                  ["--r", "3", "--n", "5"]])
def test_invalid_parameters_exit_2(capsys, argv):
    code, _, err = run(capsys, "params", *argv)
    assert code == 2
    assert err.startswith("error=")


def test_tau_formula_only_for_full_folding():
    assert tau_formula(CodeParams(5, 1, 7, 2, 2, 4)) == "(3/4)(1-2R)"
    assert tau_formula(CodeParams(5, 1, 7, 2, 2, 2)) is None


def test_encode_corrupt_decode_pipeline(tmp_path, capsys):
    p = tmp_path / "p.txt"
    run(capsys, "params", *REF, "--out", str(p))
    assert run(capsys, "encode", "--params", str(p), "--seed", "3", "--msg-out", str(tmp_path / "f.txt"),
               "--out", str(tmp_path / "c.txt"))[0] == 0
    assert run(capsys, "corrupt", "--params", str(p), "--matrix", str(tmp_path / "c.txt"), "--e", "8",
               "--seed", "4", "--out", str(tmp_path / "y.txt"), "--error-out", str(tmp_path / "err.txt"))[0] == 0
    params = fio.load_params(p.read_text())
    tower = params.tower()
    from rankdec.code import rank_distance, word_rank
    C = fio.load_matrix((tmp_path / "c.txt").read_text(), tower)
    Y = fio.load_matrix((tmp_path / "y.txt").read_text(), tower)
    E = fio.load_matrix((tmp_path / "err.txt").read_text(), tower)
    assert rank_distance(tower, C, Y) == 8 == word_rank(tower, E)
    assert run(capsys, "decode", "--params", str(p), "--matrix", str(tmp_path / "y.txt"), "--e", "8",
               "--out", str(tmp_path / "dec"))[0] == 0
    stats = fio.load_stats((tmp_path / "dec" / "stats.txt").read_text())
    assert stats["list_size"] == "1" and stats["interp_unknowns"] == "38"
    assert (tmp_path / "dec" / "msg_000.txt").read_text() == (tmp_path / "f.txt").read_text()
    # same pipeline with the message given explicitly
    assert run(capsys, "encode", "--params", str(p), "--msg", str(tmp_path / "f.txt"),
               "--out", str(tmp_path / "c2.txt"))[0] == 0
    assert (tmp_path / "c2.txt").read_text() == (tmp_path / "c.txt").read_text()


def test_decode_to_stdout(tmp_path, capsys):
    run(capsys, "encode", *SMALL, "--seed", "1", "--out", str(tmp_path / "c.txt"))
    code, out, _ = run(capsys, "decode", *SMALL, "--matrix", str(tmp_path / "c.txt"), "--e", "0")
    assert code == 0 and "list_size=1" in out and "rankdec-msg v1" in out


def test_decode_radius_guard(tmp_path, capsys):
    run(capsys, "encode", *SMALL, "--seed", "1", "--out", str(tmp_path / "c.txt"))
    code, _, err = run(capsys, "decode", *SMALL, "--matrix", str(tmp_path / "c.txt"), "--e", "2")
    assert code == 2 and "RadiusTooLarge" in err


def test_missing_file_is_runtime_error(tmp_path, capsys):
    code, _, err = run(capsys, "decode", *SMALL, "--matrix", str(tmp_path / "nope.txt"), "--e", "0")
    assert code == 1 and "FileNotFoundError" in err


def test_malformed_file_is_runtime_error(tmp_path, capsys):
    (tmp_path / "bad.txt").write_text("rankdec-matrix v1 3 1 5 10\n1 2\n")
    code, _, err = run(capsys, "decode", *SMALL, "--matrix", str(tmp_path / "bad.txt"), "--e", "0")
    assert code == 1 and "FormatError" in err


def test_roundtrip_deterministic_csv(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        assert run(capsys, "roundtrip", *SMALL, "--e", "1", "--trials", "6", "--seed", "9", "--out", str(out))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0].startswith("# rankdec roundtrip") and "seed=9" in lines[0] and "e=1" in lines[0]
    assert lines[1].split(",")[:3] == ["trial", "success", "list_size"]
    assert lines[-1].startswith("# success_rate=1.000000")
    assert [ln.split(",")[0] for ln in lines[2:-1]] == [str(i) for i in range(6)]


def test_roundtrip_zero_errors(capsys):
    code, out, _ = run(capsys, "roundtrip", *SMALL, "--e", "0", "--trials", "5")
    assert code == 0 and "# success_rate=1.000000" in out


def test_table_examples(capsys):
    code, out, _ = run(capsys, "table", "--r", "3", "--c", "2", "--rates", "0,1/10,1/5")
    assert code == 0
    lines = out.splitlines()
    assert "# crossover_R=1/5" in lines[1]
    rows = {ln.split(",")[0]: ln.split(",") for ln in lines[3:]}
    assert rows["1/10"][1:] == ["8/15", "9/20", "77/225", "1"]
    assert rows["1/5"][4] == "0"


def test_table_decimal_and_range(capsys):
    code, out, _ = run(capsys, "table", "--r", "3", "--c", "2", "--R-min", "0", "--R-max", "1/2", "--steps", "6",
                       "--decimal")
    assert code == 0
    data = [ln.split(",") for ln in out.splitlines()[3:]]
    assert len(data) == 6 and data[1][:3] == ["0.100000", "0.533333", "0.450000"]


def test_table_c1_has_no_improvement(capsys):
    rows = table_rows(2, 1, [Fraction(0), Fraction(1, 4)])
    assert all(r["tau"] == r["tau_unique"] and not r["beats_unique"] for r in rows)
    code, out, _ = run(capsys, "table", "--r", "2", "--c", "1", "--rates", "0")
    assert code == 0 and "crossover_R=none" in out
    assert run(capsys, "table", "--r", "3", "--c", "3", "--rates", "0")[0] == 2


def test_oracle_commands(tmp_path, capsys):
    code, out, _ = run(capsys, "oracle", "mindist", *SMALL)
    assert code == 0 and kv(out) == {"min_distance": "4", "distance_bound": "4"}
    run(capsys, "encode", *SMALL, "--seed", "2", "--msg-out", str(tmp_path / "f.txt"), "--out", str(tmp_path / "c.txt"))
    run(capsys, "corrupt", *SMALL, "--matrix", str(tmp_path / "c.txt"), "--e", "1", "--out", str(tmp_path / "y.txt"))
    code, out, _ = run(capsys, "oracle", "list", *SMALL, "--matrix", str(tmp_path / "y.txt"), "--e", "1",
                       "--out", str(tmp_path / "ol"))
    assert code == 0
    assert (tmp_path / "ol" / "msg_000.txt").read_text() == (tmp_path / "f.txt").read_text()
    assert run(capsys, "oracle", "list", *SMALL)[0] == 2
    assert run(capsys, "oracle", "mindist", *REF)[0] == 1


def test_precode_build_and_use(tmp_path, capsys):
    hse, des = tmp_path / "hse.txt", tmp_path / "des.txt"
    code, _, err = run(capsys, "precode", "build", *REF, "--mode", "hse", "--zeta", "1/10", "--alpha", "2",
                       "--out", str(hse))
    assert code == 0 and "warning:" in err
    code, _, err = run(capsys, "precode", "build", *REF, "--mode", "design", "--codim", "8", "--M", "4",
                       "--v", "1", "--seed", "2", "--out", str(des))
    assert code == 0 and "passed=1" in err
    assert fio.load_precode(des.read_text()).A == 3
    for path in (hse, des):
        code, out, _ = run(capsys, "roundtrip", *REF, "--precode", str(path), "--trials", "3")
        assert code == 0 and "# success_rate=1.000000" in out
    code, _, err = run(capsys, "roundtrip", *SMALL, "--precode", str(hse), "--trials", "1")
    assert code == 2 and "different code parameters" in err
    assert run(capsys, "precode", "build", *REF, "--mode", "hse")[0] == 2
    assert run(capsys, "precode", "build", *REF, "--mode", "design")[0] == 2


def test_precode_auto_v(tmp_path, capsys):
    code, _, err = run(capsys, "precode", "build", *REF, "--mode", "design", "--epsilon", "4/15", "--M", "4",
                       "--trials", "2")
    assert code == 0 and "method=intersection-lattice" in err
