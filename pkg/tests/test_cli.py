"""Command line reports: schema, determinism, formats, exit codes."""

import json

import numpy as np
import pytest

import pretentious.cli as cli
from pretentious import __version__
from pretentious.characters import character_by_index, character_row, unit_group
from pretentious.errors import TheoremViolation

TOP_KEYS = {"version", "command", "config", "timestamp", "result"}


def run_cli(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, argv):
    code, out, err = run_cli(capsys, argv)
    assert code == 0, err
    return json.loads(out)


# ------------------------------------------------------------------ schema


def test_report_schema(capsys):
    rep = run_json(capsys, ["constants", "--name", "delta1"])
    assert set(rep.keys()) == TOP_KEYS
    assert rep["version"] == __version__
    assert rep["command"] == "constants"
    assert set(rep["config"].keys()) == {"params", "seed", "threads"}
    assert rep["config"]["seed"] == 0
    assert rep["config"]["threads"] == 1
    assert rep["result"]["value"] == pytest.approx(-0.6569990137169279, abs=1e-9)
    assert rep["result"]["name"] == "delta1"


def test_config_round_trip(capsys):
    rep = run_json(capsys, [
        "meanvalues", "halasz", "--f", "mobius", "--x", "2000", "--T", "1.5",
        "--seed", "7", "--threads", "2",
    ])
    assert rep["command"] == "meanvalues halasz"
    assert rep["config"]["params"] == {"f": "mobius", "x": 2000, "T": 1.5}
    assert rep["config"]["seed"] == 7
    assert rep["config"]["threads"] == 2


def test_determinism_modulo_timestamp(capsys):
    argv = ["sieve", "defect", "--f", "mobius", "--x", "3000", "--q", "5"]
    a = run_json(capsys, argv)
    b = run_json(capsys, argv)
    a.pop("timestamp")
    b.pop("timestamp")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_keys_sorted_on_wire(capsys):
    code, out, _ = run_cli(capsys, ["constants", "--name", "delta0"])
    assert code == 0
    top = [l for l in out.splitlines() if l.startswith('  "')]
    keys = [l.split('"')[1] for l in top]
    assert keys == sorted(keys)
    assert keys == ["command", "config", "result", "timestamp", "version"]


def test_out_writes_file(tmp_path, capsys):
    path = tmp_path / "rep.json"
    code, out, _ = run_cli(capsys, [
        "constants", "--name", "repulsion", "--m", "3", "--out", str(path),
    ])
    assert code == 0
    assert out == ""
    rep = json.loads(path.read_text())
    assert rep["result"]["m"] == 3
    assert rep["result"]["value"] == pytest.approx(1 / 3, abs=1e-12)


def test_complex_values_as_re_im(capsys):
    rep = run_json(capsys, ["chars", "eval", "--q", "5", "--index", "1", "--n", "2"])
    val = rep["result"]["value"]
    expected = complex(character_by_index(5, 1)(2))
    assert val["re"] == pytest.approx(expected.real, abs=1e-12)
    assert val["im"] == pytest.approx(expected.imag, abs=1e-12)
    assert isinstance(rep["result"]["angle"], str)  # exact fraction of a turn


# ----------------------------------------------------------------- formats


def test_report_csv_header_and_rows(tmp_path, capsys):
    path = tmp_path / "rows.csv"
    code, _, err = run_cli(capsys, [
        "meanvalues", "report", "--f", "char:5:2", "--x", "2000", "--q", "5",
        "--Q", "5", "--A", "2", "--format", "csv", "--out", str(path),
    ])
    assert code == 0, err
    lines = path.read_text().splitlines()
    assert lines[0] == "a,Re F,Im F,residual,main_term,error_ref_brancha,error_ref_branchb"
    assert len(lines) == 1 + 4  # one row per unit mod 5
    for line in lines[1:]:
        cells = line.split(",")
        assert len(cells) == 7
        int(cells[0])
        for c in cells[1:5]:
            float(c)
        assert float(cells[3]) <= 1e-6  # exact character: residuals vanish


def test_csv_inferred_from_out_extension(tmp_path, capsys):
    path = tmp_path / "rows.csv"
    code, _, _ = run_cli(capsys, [
        "meanvalues", "report", "--f", "one", "--x", "1000", "--q", "4",
        "--Q", "4", "--A", "1", "--out", str(path),
    ])
    assert code == 0
    assert path.read_text().startswith("a,Re F,Im F")


def test_csv_brancha_empty_when_A_is_one(tmp_path, capsys):
    path = tmp_path / "rows.csv"
    run_cli(capsys, [
        "meanvalues", "report", "--f", "one", "--x", "1000", "--q", "3",
        "--Q", "3", "--A", "1", "--format", "csv", "--out", str(path),
    ])
    for line in path.read_text().splitlines()[1:]:
        cells = line.split(",")
        assert cells[5] == ""  # power-window reference undefined at A = 1
        float(cells[6])


def test_csv_main_term_empty_on_principal_fallback(tmp_path, capsys):
    # mobius at this scale pretends to conductor 5, which cannot induce mod 4,
    # so the report falls back to the principal character and has no main term
    path = tmp_path / "rows.csv"
    code, _, err = run_cli(capsys, [
        "meanvalues", "report", "--f", "mobius", "--x", "2000", "--q", "4",
        "--Q", "10", "--A", "2", "--format", "csv", "--out", str(path),
    ])
    assert code == 0, err
    lines = path.read_text().splitlines()
    assert len(lines) == 1 + 2
    for line in lines[1:]:
        cells = line.split(",")
        assert len(cells) == 7
        assert cells[4] == ""
        float(cells[3])


def test_json_report_still_default(capsys):
    rep = run_json(capsys, [
        "meanvalues", "report", "--f", "one", "--x", "1000", "--q", "4",
        "--Q", "4", "--A", "1",
    ])
    assert rep["command"] == "meanvalues report"
    assert rep["result"]["q"] == 4
    assert len(rep["result"]["rows"]) == 2


# -------------------------------------------------------------- exit codes


def test_exit_2_on_bad_spec(capsys):
    code, _, err = run_cli(capsys, ["meanvalues", "halasz", "--f", "bogus:12", "--x", "100"])
    assert code == 2
    assert "error:" in err


def test_exit_3_on_precondition(capsys):
    code, _, err = run_cli(capsys, [
        "meanvalues", "halasz", "--f", "one", "--x", "100", "--T", "0.5",
    ])
    assert code == 3
    assert "error:" in err


def test_exit_4_on_theorem_violation(capsys, monkeypatch):
    def boom(tolerance):
        raise TheoremViolation("forced for the exit-code contract")

    monkeypatch.setattr(cli, "delta1", boom)
    code, _, err = run_cli(capsys, ["constants", "--name", "delta1"])
    assert code == 4
    assert "theorem violation" in err


def test_exit_2_on_unreadable_g_file(tmp_path, capsys):
    code, _, err = run_cli(capsys, [
        "nearchar", "recover", "--q", "5", "--g", str(tmp_path / "absent.txt"),
    ])
    assert code == 2
    assert "cannot read" in err


def test_argparse_rejects_bad_numbers(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["meanvalues", "halasz", "--f", "one", "--x", "-5"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_exit_0_is_returned_not_raised(capsys):
    assert cli.main(["constants"]) == 0
    capsys.readouterr()


# ---------------------------------------------------------------- nearchar


def _write_g_file(path, q, index, perturb=0.0):
    chi = character_by_index(q, index)
    row = character_row(chi)
    lines = ["# unit values, one per line"]
    for u in unit_group(q).units:
        v = complex(row[int(u)])
        if perturb and u != 1:
            v *= np.exp(1j * perturb)
        lines.append(f"{int(u)}: {float(v.real)!r},{float(v.imag)!r}")
    path.write_text("\n".join(lines) + "\n")


def test_nearchar_recover_round_trip(tmp_path, capsys):
    gfile = tmp_path / "g.txt"
    _write_g_file(gfile, 5, 2, perturb=0.05)
    rep = run_json(capsys, ["nearchar", "recover", "--q", "5", "--g", str(gfile)])
    assert rep["result"]["chi"] == "char:5:2"
    assert rep["result"]["epsilon"] <= 0.2
    assert rep["result"]["max_deviation"] <= rep["result"]["uniform_bound"] + 1e-9


def test_nearchar_malformed_line(tmp_path, capsys):
    gfile = tmp_path / "g.txt"
    gfile.write_text("1: 1,0\n2: what\n3: -1,0\n4: 1,0\n")
    code, _, err = run_cli(capsys, ["nearchar", "recover", "--q", "5", "--g", str(gfile)])
    assert code == 2
    assert ":2:" in err  # diagnostic names the offending line


def test_nearchar_missing_unit(tmp_path, capsys):
    gfile = tmp_path / "g.txt"
    gfile.write_text("1: 1,0\n2: 1,0\n3: 1,0\n")
    code, _, err = run_cli(capsys, ["nearchar", "recover", "--q", "5", "--g", str(gfile)])
    assert code == 3
    assert "missing value at unit 4" in err


# ------------------------------------------------------------------- chars


def test_chars_list(capsys):
    rep = run_json(capsys, ["chars", "list", "--q", "8"])
    res = rep["result"]
    assert res["q"] == 8 and res["phi"] == 4
    serials = [c["serial"] for c in res["characters"]]
    assert serials == [f"char:8:{i}" for i in range(4)]
    assert res["characters"][0]["is_principal"]
    assert all(c["is_real"] for c in res["characters"])  # (Z/8)* has exponent 2
    conductors = sorted(c["conductor"] for c in res["characters"])
    assert conductors == [1, 4, 8, 8]


def test_chars_conductor_induced(capsys):
    rep = run_json(capsys, ["chars", "conductor", "--q", "9", "--index", "0"])
    res = rep["result"]
    assert res["conductor"] == 1
    assert not res["is_primitive"]
    assert res["primitive_part"] == "char:1:0"


def test_sieve_legendre_verbose_toggle(capsys):
    argv = ["sieve", "legendre", "--q", "4", "--a", "3", "--x", "2000", "--p-limit", "100"]
    quiet = run_json(capsys, argv)
    loud = run_json(capsys, argv + ["--verbose"])
    assert quiet["result"]["running"] == []
    assert len(loud["result"]["running"]) >= 1
    assert quiet["result"]["infimum"] == loud["result"]["infimum"]


def test_sieve_bad_moduli_and_defect_verbose_toggle(capsys):
    quiet = run_json(capsys, [
        "sieve", "bad-moduli", "--f", "mobius", "--x", "4000", "--q", "4",
        "--a", "3", "--eta", "0.2",
    ])
    assert quiet["result"]["masses"] is None
    loud = run_json(capsys, [
        "sieve", "bad-moduli", "--f", "mobius", "--x", "4000", "--q", "4",
        "--a", "3", "--eta", "0.2", "--verbose",
    ])
    assert loud["result"]["masses"] is not None
    dq = run_json(capsys, ["sieve", "defect", "--f", "mobius", "--x", "3000", "--q", "5"])
    assert dq["result"]["pairs"] == []
    dv = run_json(capsys, [
        "sieve", "defect", "--f", "mobius", "--x", "3000", "--q", "5", "--verbose",
    ])
    assert len(dv["result"]["pairs"]) == 10


def test_pretension_find_cli(capsys):
    rep = run_json(capsys, [
        "pretension", "find", "--f", "char:5:2", "--x", "1000", "--Q", "5", "--A", "0.5",
    ])
    res = rep["result"]
    assert res["psi"] == "char:5:2"
    assert res["conductor"] == 5
    assert abs(res["t"]) <= 1e-4
    assert res["squared_distance"] <= 1e-6
    assert len(res["spectrum"]) >= 2
