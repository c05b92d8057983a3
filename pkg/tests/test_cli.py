import csv
import io
import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from cantorcert.cli import EXIT_ERROR, EXIT_NO_CERTIFICATE, EXIT_OK, main
from cantorcert.expr import eval_exact, parse
from cantorcert.triadic import TriadicRational


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_certify_product(capsys):
    code, out, _ = run(capsys, "certify", "--expr", "x*y")
    assert code == EXIT_OK
    rep = json.loads(out)
    assert rep["schema"] == 1 and rep["status"] == "certified"
    sq = rep["certificate"]["square"]
    assert sq["rank"] <= 4 and len(sq["x_word"]) == sq["rank"]
    assert all(rep["oracle"][k] for k in ("cover_contained", "hit_test", "recursion_ok"))
    assert rep["oracle"]["depths"] == list(range(11))


def test_rational_strings_match_decimals(capsys):
    _, out, _ = run(capsys, "certify", "--expr", "x*y")
    cert = json.loads(out)["certificate"]
    e = parse("x*y")
    lo = eval_exact(e, *(TriadicRational.parse(t).value for t in cert["exact_corners"]["min"]))
    hi = eval_exact(e, *(TriadicRational.parse(t).value for t in cert["exact_corners"]["max"]))
    assert abs(float(lo) - cert["image"]["lo"]) <= 1e-15
    assert abs(float(hi) - cert["image"]["hi"]) <= 1e-15
    x0, x1 = (TriadicRational.parse(t).value for t in cert["square"]["corners"]["x"])
    assert x1 - x0 == F(1, 3 ** cert["square"]["rank"])


def test_certify_with_seed(capsys):
    code, out, _ = run(capsys, "certify", "--expr", "x - y^2", "--seed", "8/9", "1/3")
    assert code == EXIT_OK
    rep = json.loads(out)
    assert rep["seed"]["point"] == ["8/9", "1/3"] and rep["seed"]["case"] == "x-dominant"


def test_seed_outside_cantor_set(capsys):
    code, _, err = run(capsys, "certify", "--expr", "x*y", "--seed", "1/2", "1/3")
    assert code == EXIT_ERROR and "Cantor" in err


def test_no_certificate_exit_code(capsys):
    code, out, _ = run(capsys, "certify", "--expr", "x + 7*y")
    assert code == EXIT_NO_CERTIFICATE
    assert json.loads(out)["status"] == "no-certificate"


def test_parse_error_exit_code(capsys):
    code, _, err = run(capsys, "certify", "--expr", "x + ")
    assert code == EXIT_ERROR and "offset 4" in err


def test_rank_cap_enforced(capsys):
    code, _, err = run(capsys, "certify", "--expr", "x*y", "--max-rank", "40")
    assert code == EXIT_ERROR and "rank cap" in err


def test_cover_commands(capsys):
    code, out, _ = run(capsys, "cover", "--expr", "x*y", "--depth", "1")
    assert code == EXIT_OK
    rep = json.loads(out)
    assert abs(rep["series"][-1]["measure"] - 8 / 9) <= 1e-12
    assert rep["series"][0]["measure"] == 1
    code, out, _ = run(capsys, "cover", "--expr", "x+y", "--depth", "6")
    assert code == EXIT_OK and json.loads(out)["final"]["measure"] == 2
    code, _, err = run(capsys, "cover", "--expr", "1/x")
    assert code == EXIT_ERROR and "DomainError" in err


def test_cover_csv(capsys, tmp_path):
    target = tmp_path / "cover.csv"
    code, out, _ = run(capsys, "cover", "--expr", "x*y", "--depth", "2", "--format", "csv", "--out", str(target))
    assert code == EXIT_OK and out == ""
    rows = list(csv.DictReader(io.StringIO(target.read_text())))
    assert len(rows) >= 2 and all(float(r["lo"]) <= float(r["hi"]) for r in rows)


def test_output_independent_of_workers(capsys):
    outs = []
    for w in ("1", "2", "8"):
        code, out, _ = run(capsys, "certify", "--expr", "sin(x)*cos(y)", "--seed", "2/3", "2/3",
                           "--oracle-depth", "6", "--workers", w)
        assert code == EXIT_OK
        outs.append(out)
    assert outs[0] == outs[1] == outs[2]


@pytest.mark.parametrize("name", ["steinhaus-sum", "steinhaus-diff"])
def test_reproduce(capsys, name):
    code, out, _ = run(capsys, "reproduce", name)
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert all(line.startswith("PASS") for line in lines[:-1])


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cantorcert", "certify", "--expr", "x + 7*y"],
                          capture_output=True, text=True)
    assert proc.returncode == EXIT_NO_CERTIFICATE
