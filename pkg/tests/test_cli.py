import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from tatecalc import schemas
from tatecalc.cli import main, parse_window, run

EXAMPLES = Path(__file__).resolve().parent.parent / "examples_input"
FILES = sorted(EXAMPLES.glob("*.json"))


def invoke(capsys, *argv):
    code, rep = run([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, rep, out, err


def test_examples_exist():
    assert len(FILES) >= 10


def test_roundtrip_of_every_example(capsys):
    code, rep, out, _ = invoke(capsys, "roundtrip", *FILES)
    assert code == 0
    assert all(v.ok for v in rep.verdicts) and len(rep.verdicts) == len(FILES)
    assert json.loads(out)["rows"]


def test_malformed_json_reports_line_and_exits_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "schema": "gmodule",\n  "rank": 1,,\n}\n')
    code, _, _, err = invoke(capsys, "roundtrip", bad)
    assert code == 2
    assert f"{bad}:3" in err


def test_unknown_schema_exits_2(capsys, tmp_path):
    f = tmp_path / "x.json"
    f.write_text('{"schema": "nonsense"}')
    code, _, _, err = invoke(capsys, "roundtrip", f)
    assert code == 2 and "unknown schema" in err


def test_usage_errors_exit_2(capsys):
    assert invoke(capsys, )[0] == 2
    assert invoke(capsys, "no-such-command")[0] == 2
    assert invoke(capsys, "tate-cohomology", "--group", "C3", "--window", "3..1")[0] == 2
    assert invoke(capsys, "tate-cohomology", "--group", "D4")[0] == 2


def test_parse_window():
    assert parse_window("-6..6") == (-6, 6)
    with pytest.raises(Exception):
        parse_window("6")


def test_tate_cohomology_trivial_Z(capsys):
    code, _, out, err = invoke(capsys, "tate-cohomology", "--group", "C4", "--window", "-4..4")
    assert code == 0 and "PASS" in err
    table = json.loads(out)["table"]
    assert table == {str(d): (["4"] if d % 2 == 0 else []) for d in range(-4, 5)}


def test_tate_cohomology_of_a_module_file(capsys):
    code, _, out, _ = invoke(capsys, "tate-cohomology", "--group", "C4", "--module", EXAMPLES / "sign_C4.json",
                             "--window", "-3..3")
    assert code == 0
    table = json.loads(out)["table"]
    # the sign representation swaps the parity of the trivial answer
    assert table == {str(d): ([] if d % 2 == 0 else ["2"]) for d in range(-3, 4)}


def test_group_mismatch_is_a_schema_error(capsys):
    code, rep, _, err = invoke(capsys, "tate-cohomology", "--group", "C3", "--module", EXAMPLES / "sign_C4.json")
    assert code == 2 and "schema error" in err
    assert not rep.ok


def test_output_is_deterministic(capsys):
    argv = ("tate-cohomology", "--group", "C6", "--window", "-3..3")
    first = invoke(capsys, *argv)[2]
    second = invoke(capsys, *argv)[2]
    assert first == second


def test_csv_format(capsys):
    code, _, out, _ = invoke(capsys, "tate-cohomology", "--group", "C2", "--window", "-2..2", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["degree", "invariant_factors"]
    assert {r[0]: r[1] for r in rows[1:]} == {"2": "2", "1": "", "0": "2", "-1": "", "-2": "2"}


def test_out_directory_gets_data_and_report(capsys, tmp_path):
    code, _, out, _ = invoke(capsys, "tate-cohomology", "--group", "C3", "--window", "-2..2", "--out", tmp_path)
    assert code == 0 and out == ""
    assert (tmp_path / "tate-cohomology.json").exists()
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["ok"] and report["first_failure"] is None
    assert report["files"] == [str(tmp_path / "tate-cohomology.json")]
    assert {"command", "version", "wall_clock_s", "verdicts"} <= set(report)


def test_report_written_on_schema_error(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    code, _, _, _ = invoke(capsys, "roundtrip", bad, "--out", tmp_path)
    assert code == 2
    report = json.loads((tmp_path / "report.json").read_text())
    assert not report["ok"] and report["first_failure"]


@pytest.mark.parametrize("preset,r,length", [("tate-cpr", 1, 1), ("tate-cpr", 2, 2), ("tate-circle", 1, 4)])
def test_ss_run_presets(capsys, preset, r, length):
    argv = ["ss-run", "--preset", preset, "--p", "3", "--r", r, "--window", "-4..4"]
    if preset == "tate-circle":
        argv += ["--precision", length]
    code, _, out, _ = invoke(capsys, *argv)
    assert code == 0
    ab = json.loads(out)["abutment"]
    assert all(v == (length if int(k) % 2 == 0 else 0) for k, v in ab.items())


def test_ss_run_reports_failure_when_page_too_early(capsys):
    code, rep, _, _ = invoke(capsys, "ss-run", "--preset", "tate-cpr", "--r", "2", "--max-page", "2",
                             "--window", "-4..4")
    assert code == 1
    assert not rep.ok


def test_ss_run_filtered_complex(capsys):
    code, _, out, _ = invoke(capsys, "ss-run", "--input", EXAMPLES / "filtered_small.json")
    assert code == 0
    assert any(row[0] == "inf" for row in json.loads(out)["rows"])


def test_ss_run_tate_input_file(capsys):
    code, _, _, _ = invoke(capsys, "ss-run", "--input", EXAMPLES / "tate_c3_module.json", "--window", "-4..4")
    assert code == 0


def test_hm_e1_on_circle(capsys):
    code, rep, out, _ = invoke(capsys, "hm-e1", "--input", EXAMPLES / "sigma_circle.json", "--window", "-2..2",
                               "--n-max", "2", "--trials", "20")
    assert code == 0 and len(rep.verdicts) == 3
    assert json.loads(out)["rows"]


def test_operad_check_small(capsys):
    code, rep, out, _ = invoke(capsys, "operad-check", "--trials", "20", "--moore")
    assert code == 0
    assert all(row[1] == 20 and row[2] == 0 for row in json.loads(out)["rows"])


def test_tp_lift_example(capsys):
    code, _, out, _ = invoke(capsys, "tp-lift", "--input", EXAMPLES / "witt_p5.json")
    assert code == 0
    doc = json.loads(out)
    assert doc["p"] == 5 and doc["rows"] == [[0, 0, 0, 12]]


def test_tp_lift_lower_precision_reduces(capsys):
    code, _, out, _ = invoke(capsys, "tp-lift", "--input", EXAMPLES / "witt_p5.json", "--precision", "1")
    assert code == 0
    assert json.loads(out)["rows"] == [[0, 0, 0, 12 % 5]]


def test_tp_lift_malformed_digits(capsys, tmp_path):
    doc = json.loads((EXAMPLES / "witt_p5.json").read_text())
    doc["targets"][0].pop("digits")
    f = tmp_path / "w.json"
    f.write_text(json.dumps(doc))
    code, _, _, err = invoke(capsys, "tp-lift", "--input", f)
    assert code == 2 and "malformed witt data" in err


def test_tor_over_W_shorthands(capsys):
    code, rep, out, _ = invoke(capsys, "tor", "--ring", "tp", "--p", "3", "--N", "4",
                               "--modules", "free", "torsion:1", "--window", "-2..2")
    assert code == 0 and rep.ok
    rows = json.loads(out)["rows"]
    assert all(s <= 1 for s, *_ in rows)
    assert [0, 0, "3"] in rows


def test_tor_shorthand_needs_prime(capsys):
    assert invoke(capsys, "tor", "--ring", "tp", "--modules", "free", "free")[0] == 2


def test_tor_of_module_files(capsys):
    f = EXAMPLES / "kt_residue.json"
    code, _, out, _ = invoke(capsys, "tor", "--modules", f, f, "--window", "0..4")
    assert code == 0
    assert json.loads(out)["rows"]


def test_main_and_module_entry_point(tmp_path):
    assert main(["roundtrip", str(EXAMPLES / "witt_p5.json"), "--out", str(tmp_path)]) == 0
    proc = subprocess.run([sys.executable, "-m", "tatecalc.cli", "tp-lift", "--input", str(EXAMPLES / "witt_p5.json"),
                           "--format", "csv"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines() == ["i,j,generator,coefficient", "0,0,0,12"]


@pytest.mark.parametrize("path", FILES, ids=lambda p: p.name)
def test_schema_round_trip(path):
    ok, first, second = schemas.roundtrip(path)
    assert ok and first == second
    assert first["schema"] == schemas.load_document(path)["schema"]


def test_schema_mismatch_and_top_level(tmp_path):
    with pytest.raises(schemas.SchemaError):
        schemas.load(EXAMPLES / "witt_p5.json", "gmodule")
    f = tmp_path / "list.json"
    f.write_text("[]")
    with pytest.raises(schemas.SchemaError):
        schemas.load_document(f)
    with pytest.raises(schemas.SchemaError):
        schemas.load_document(tmp_path / "missing.json")


def test_toml_input(tmp_path):
    f = tmp_path / "g.toml"
    f.write_text('schema = "gmodule"\ngroup = "C2"\nrank = 1\naction = [[-1]]\n')
    if schemas._toml is None:
        with pytest.raises(schemas.SchemaError, match="TOML"):
            schemas.load(f)
    else:
        assert schemas.load(f, "gmodule").rank == 1


def test_write_atomic_replaces(tmp_path):
    p = tmp_path / "sub" / "a.txt"
    schemas.write_atomic(p, "one")
    schemas.write_atomic(p, "two")
    assert p.read_text() == "two"
    assert [q.name for q in p.parent.iterdir()] == ["a.txt"]
