import json
from pathlib import Path

import jsonschema
import pytest

from are_lab.cli import (
    format_float,
    main,
    parse_pairs_csv,
    read_curve_csv,
    write_curve_csv,
)
from are_lab.errors import ParseError

SCHEMAS = Path(__file__).resolve().parents[1] / "docs" / "schemas"


def _schema(name):
    return json.loads((SCHEMAS / f"{name}.schema.json").read_text())


def _csv(tmp_path, text, name="in.csv"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def _run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    assert code == 0
    return json.loads(out)


# stat ------------------------------------------------------------------------------

def test_stat_concordant(tmp_path, capsys):
    path = _csv(tmp_path, "x,y\n1,1\n2,2\n3,3\n")
    rec = _run_json(capsys, ["stat", "--in", path])
    assert rec["T"] == 1.0 and rec["S"] == 1.0 and rec["n"] == 3
    jsonschema.validate(rec, _schema("stat_result"))


def test_stat_four_rows(tmp_path, capsys):
    path = _csv(tmp_path, "x,y\n1,2\n2,1\n3,4\n4,3\n")
    rec = _run_json(capsys, ["stat", "--in", path])
    assert rec["T"] == pytest.approx(1 / 3, abs=1e-15)
    assert rec["S"] == 0.6
    assert rec["z_T"] == pytest.approx((1 / 3) / (2 / 3 / 2), rel=1e-12)
    assert 0.0 < rec["p_S"] < 0.5


def test_stat_csv_format(tmp_path, capsys):
    path = _csv(tmp_path, "x,y\n1,2\n2,1\n3,4\n4,3\n")
    assert main(["stat", "--in", path, "--format", "csv"]) == 0
    header, row = capsys.readouterr().out.strip().split("\n")
    assert header.split(",") == ["n", "T", "S", "z_T", "z_S", "p_T", "p_S"]
    assert row.split(",")[:3] == ["4", format_float(1 / 3), "0.6"]


def test_stat_errors(tmp_path, capsys):
    assert main(["stat", "--in", _csv(tmp_path, "x,y\n1,2\n1,3\n2,4\n")]) == 2
    assert "x" in capsys.readouterr().err
    assert main(["stat", "--in", _csv(tmp_path, "x,y\n1,2\nfoo,3\n2,4\n")]) == 2
    assert "line 3" in capsys.readouterr().err
    assert main(["stat", "--in", _csv(tmp_path, "x,y\n1,2\n2,3\n")]) == 2
    assert main(["stat", "--in", str(tmp_path / "missing.csv")]) == 4


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError) as exc:
        parse_pairs_csv("a,b\n1,2\n")
    assert exc.value.line == 1
    with pytest.raises(ParseError) as exc:
        parse_pairs_csv("x,y\n1,2\n3\n")
    assert exc.value.line == 3
    with pytest.raises(ParseError):
        parse_pairs_csv("x,y\n1,inf\n")


# are ----------------------------------------------------------------------------------

def test_are_closed_ol(capsys):
    rec = _run_json(capsys, ["are", "--model", "micd-ol", "--theta0", "0", "--method", "closed-form"])
    assert rec["value"] == 2.25 and rec["method"] == "closed-form"
    jsonschema.validate(rec, _schema("are_result"))


def test_are_numeric_examples(capsys):
    rec = _run_json(capsys, ["are", "--model", "micd-as", "--theta0", "0.4", "--method", "numeric"])
    assert rec["value"] == pytest.approx(1.0, abs=5e-3)
    jsonschema.validate(rec, _schema("are_result"))
    rec = _run_json(capsys, ["are", "--model", "micd-al", "--theta0", "0", "--method", "numeric"])
    assert rec["value"] == "inf"
    jsonschema.validate(rec, _schema("are_result"))
    rec = _run_json(capsys, ["are", "--model", "plackett", "--theta0", "1", "--side", "right"])
    assert rec["side"] == "right"


def test_are_errors(capsys):
    assert main(["are", "--model", "plackett", "--theta0", "0", "--method", "closed-form"]) == 2
    assert main(["are", "--model", "micd-as", "--theta0", "1", "--method", "closed-form"]) == 2
    assert main(["are", "--model", "unknown", "--theta0", "0"]) == 2
    capsys.readouterr()


def test_numeric_errors_exit_three(monkeypatch, capsys):
    assert main(["are", "--model", "micd-al", "--theta0", "1", "--method", "numeric"]) == 3
    capsys.readouterr()


# curve -----------------------------------------------------------------------------------

def test_curve_as_is_flat(tmp_path):
    out = tmp_path / "as.csv"
    assert main(["curve", "--model", "micd-as", "--from", "0", "--to", "0.9", "--steps", "10", "--out", str(out)]) == 0
    rows = read_curve_csv(out.read_text())
    assert len(rows) == 10 and all(v == 1.0 for _, v in rows)


def test_curve_single_point(tmp_path):
    out = tmp_path / "ol.csv"
    assert main(["curve", "--model", "micd-ol", "--from", "0", "--to", "0", "--steps", "1", "--out", str(out)]) == 0
    assert out.read_text() == "theta,are\n0.0,2.25\n"


def test_curve_round_trip_is_byte_identical(tmp_path):
    out = tmp_path / "os.csv"
    assert main(["curve", "--model", "micd-os", "--from", "0", "--to", "0.95", "--steps", "20", "--out", str(out)]) == 0
    text = out.read_text()
    assert write_curve_csv(read_curve_csv(text)) == text


def test_curve_closed_vs_numeric_al(tmp_path):
    closed = tmp_path / "closed.csv"
    numeric = tmp_path / "numeric.csv"
    base = ["curve", "--model", "micd-al", "--from", "0.1", "--to", "0.9", "--steps", "9"]
    assert main(base + ["--method", "closed-form", "--out", str(closed)]) == 0
    assert main(base + ["--method", "numeric", "--out", str(numeric)]) == 0
    for (t1, a), (t2, b) in zip(read_curve_csv(closed.read_text()), read_curve_csv(numeric.read_text())):
        assert t1 == t2
        assert abs(a - b) <= 5e-3 * a


def test_curve_with_infinity_round_trips(tmp_path):
    out = tmp_path / "al.csv"
    assert main(["curve", "--model", "micd-al", "--from", "0", "--to", "0.5", "--steps", "3", "--out", str(out)]) == 0
    text = out.read_text()
    assert text.split("\n")[1] == "0.0,inf"
    assert write_curve_csv(read_curve_csv(text)) == text


def test_curve_grid_errors(tmp_path, capsys):
    base = ["curve", "--model", "micd-as", "--out", str(tmp_path / "x.csv")]
    assert main(base + ["--from", "0.5", "--to", "0.1", "--steps", "3"]) == 2
    assert main(base + ["--from", "0.1", "--to", "0.5", "--steps", "1"]) == 2
    assert main(base + ["--from", "0.1", "--to", "0.5", "--steps", "0"]) == 2
    bad = ["curve", "--model", "micd-as", "--from", "0", "--to", "0.5", "--steps", "3", "--out", str(tmp_path / "no" / "x.csv")]
    assert main(bad) == 4
    capsys.readouterr()


# sample -------------------------------------------------------------------------------------

def test_sample_is_reproducible_and_parseable(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    argv = ["sample", "--model", "frank", "--theta", "3", "--n", "50", "--seed", "17"]
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    x, y = parse_pairs_csv(a.read_text())
    assert len(x) == 50


def test_sample_then_stat(tmp_path, capsys):
    path = tmp_path / "s.csv"
    assert main(["sample", "--model", "bvn", "--theta", "0.9", "--n", "200", "--seed", "2", "--out", str(path)]) == 0
    rec = _run_json(capsys, ["stat", "--in", str(path)])
    assert rec["T"] > 0.5 and rec["p_T"] < 1e-10


def test_sample_errors(capsys):
    assert main(["sample", "--model", "fgm", "--theta", "0.2", "--n", "0"]) == 2
    assert main(["sample", "--model", "fgm", "--theta", "0.2", "--n", "5", "--seed", "-1"]) == 2
    capsys.readouterr()


# power -------------------------------------------------------------------------------------

def test_power_null_only(capsys):
    rec = _run_json(capsys, ["power", "--model", "bvn", "--theta0", "0", "--theta", "0", "--reps", "2000", "--seed", "1"])
    assert rec["null_only"] is True
    for w in ("T", "S"):
        assert abs(rec["size"][w]["rate"] - 0.05) <= 3 * (0.05 * 0.95 / 2000) ** 0.5
    jsonschema.validate(rec, _schema("power_result"))


def test_power_ratio_record(capsys):
    argv = ["power", "--model", "micd-os", "--theta", "0.5", "--reps", "600", "--seed", "3"]
    rec = _run_json(capsys, argv)
    assert rec["null_only"] is False and rec["ratio"] > 0
    assert "secondary" in rec and isinstance(rec["invariant"], bool)
    jsonschema.validate(rec, _schema("power_result"))
    again = _run_json(capsys, argv)
    assert again == rec


def test_power_config_error(capsys):
    assert main(["power", "--model", "bvn", "--theta", "0.15", "--alpha", "0.6", "--beta", "0.5"]) == 2
    assert main(["power", "--model", "bvn", "--theta", "0.15", "--reps", "0"]) == 2
    capsys.readouterr()


# check and environment ----------------------------------------------------------------------

def test_check_suites(capsys):
    assert main(["check", "--suite", "theorem"]) == 0
    out = capsys.readouterr().out
    assert "PASS OL ratio_II = 2" in out and "FAIL" not in out
    assert main(["check", "--suite", "constants"]) == 0
    out = capsys.readouterr().out
    assert out.strip().endswith("passed") and "FAIL" not in out


def test_check_reports_failures(monkeypatch, capsys):
    from are_lab import cli
    from are_lab.checks import Check

    monkeypatch.setattr(cli, "run_suite", lambda name: [Check("bogus", 1.0, 2.0, 0.1, False)])
    assert main(["check", "--suite", "oracle"]) == 1
    assert "FAIL bogus" in capsys.readouterr().out


def test_quadrature_order_override(monkeypatch, capsys):
    argv = ["are", "--model", "frank", "--theta0", "1.5", "--method", "numeric"]
    base = _run_json(capsys, argv)["value"]
    monkeypatch.setenv("ARE_LAB_QUAD_ORDER", "32")
    assert _run_json(capsys, argv)["value"] == pytest.approx(base, rel=1e-6)
    monkeypatch.setenv("ARE_LAB_QUAD_ORDER", "banana")
    assert main(argv) == 2
    capsys.readouterr()
