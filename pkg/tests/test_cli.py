import json
import subprocess
import sys

import pytest

from asysig.catalog import data_path
from asysig.cli import main

SYSTEMS = str(data_path("systems.dsl"))
CORPUS = str(data_path("corpus.sig"))


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval(capsys):
    code, out, _ = run(capsys, "eval", "--system", f"{SYSTEMS}#p", "--input", "1 | 0 | 0:1")
    assert (code, out) == (0, "1 | 0 | 1:1\n")


def test_eval_json_and_plot(capsys):
    code, out, _ = run(capsys, "eval", "--system", f"{SYSTEMS}#p", "--input", "1 | 0 | 0:1 ; 2:0",
                       "--format", "json")
    assert json.loads(out) == [{"input": "1 | 0 | 0:1 ; 2:0", "state": "1 | 0 | 1:1 ; 3:0"}]
    code, out, _ = run(capsys, "eval", "--system", f"{SYSTEMS}#p", "--input", "1 | 0 | 0:1",
                       "--plot", "ascii", "--range=-1,3", "--columns", "8")
    assert code == 0 and out.splitlines()[1] == "u __/=====" and out.splitlines()[2] == "x ____/==="


def test_enumerate(capsys):
    code, out, _ = run(capsys, "enumerate", "--system", f"{SYSTEMS}#bdw11", "--input", "1 | 0 | 0:1",
                       "--grid", "0,1/2,1")
    assert code == 0
    assert set(out.split("\n")[:-1]) == {"1 | 0 | 1/2:1", "1 | 0 | 1:1"}


def test_check_passes_with_user_grid(capsys):
    code, out, _ = run(capsys, "check", "--system", f"{SYSTEMS}#p", "--props", "all", "--inputs", CORPUS,
                       "--grid", "0,1/2,1,3/2,2", "--format", "json")
    records = json.loads(out)
    assert code == 0
    assert len(records) == 12
    assert [r["outcome"] for r in records[:-1]] == ["PassCorpusRelative"] * 11
    assert records[-1] == {"property": "AUDIT", "outcome": "Pass", "inconsistencies": []}


def test_check_fail_exit_status(capsys):
    code, out, _ = run(capsys, "check", "--system", f"{SYSTEMS}#step_exc", "--props", "def51",
                       "--inputs", str(data_path("pair.sig")), "--format", "json")
    (verdict, audit) = json.loads(out)
    assert code == 1
    assert verdict["outcome"] == "Fail"
    w = verdict["witness"]
    assert (w["t"], w["u"], w["v"]) == ("1", "1 | 0 | 0:1", "1 | 0 | 0:1 ; 2:0")


def test_check_bounds_flags(capsys):
    code, out, _ = run(capsys, "check", "--system", f"{SYSTEMS}#p", "--props", "iv,vii",
                       "--inputs", CORPUS, "--dmax", "1", "--dd-candidates", "1:1,0:2")
    assert code == 0 and out.count("PassCorpusRelative") == 2
    code, _, err = run(capsys, "check", "--system", f"{SYSTEMS}#p", "--props", "vii",
                       "--inputs", CORPUS, "--dd-candidates", "1")
    assert code == 2 and "d:d'" in err


def test_transfer_and_fundamental_mode(capsys):
    code, out, _ = run(capsys, "transfer", "--system", f"{SYSTEMS}#cover", "--spec",
                       str(data_path("transfer_cover.json")))
    assert code == 0 and json.loads(out)["uTilde"] == "1 | 0 | 1:1 ; 5/2:0 ; 7/2:1"
    code, out, _ = run(capsys, "fm-verify", "--system", f"{SYSTEMS}#bdw11", "--spec",
                       str(data_path("fm_bdw11.json")), "--format", "text")
    assert code == 0 and out.splitlines()[-1] == "0 -u0-> 1 -u1-> 0 -u2-> 1"
    code, out, _ = run(capsys, "fm-verify", "--system", f"{SYSTEMS}#bdw11", "--spec",
                       str(data_path("fm_bdw11_tight.json")))
    assert code == 1 and json.loads(out)["ok"] is False
    code, out, _ = run(capsys, "fm-synth", "--system", f"{SYSTEMS}#bdw11", "--mu", "1,0,1")
    data = json.loads(out)
    assert code == 0 and data["trace"] == "0 -u0-> 1 -u1-> 0 -u2-> 1" and data["verified"]["ok"]


def test_hypothesis_failure_exits_one(capsys, tmp_path):
    spec = json.loads(data_path("transfer_delay.json").read_text())
    spec["muPrime"] = "0"
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(spec))
    code, out, _ = run(capsys, "transfer", "--system", f"{SYSTEMS}#p", "--spec", str(path))
    assert code == 1 and json.loads(out)["equation"] == 4


@pytest.mark.parametrize("argv", [
    ["eval", "--system", f"{SYSTEMS}#bdw", "--input", "1 | 0 | 0:1"],      # not deterministic
    ["eval", "--system", f"{SYSTEMS}#p", "--input", "1 | 0 | 0:0"],        # no-op switch
    ["eval", "--system", f"{SYSTEMS}#nothing", "--input", "1 | 0 |"],
    ["eval", "--system", "/does/not/exist.dsl#p", "--input", "1 | 0 |"],
    ["check", "--system", f"{SYSTEMS}#p", "--props", "C_XX", "--inputs", CORPUS],
    ["plot", "--input", "1 | 0 | 0:1", "--range", "2,1"],
    ["frobnicate"],
    [],
])
def test_usage_errors_exit_two(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_parse_errors_name_the_location(capsys):
    _, _, err = run(capsys, "eval", "--system", f"{SYSTEMS}#p", "--input", "1 | 0 | 0:1 ; 1:1")
    assert "NoOpSwitch" in err and "column" in err


def test_output_is_deterministic(tmp_path, capsys):
    argv = ["check", "--system", f"{SYSTEMS}#bdw", "--inputs", CORPUS, "--format", "json"]
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert main(argv + ["--out", str(first)]) == 0
    assert main(argv + ["--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_plot_command(capsys):
    code, out, _ = run(capsys, "plot", "--input", "u=1 | 0 | 0:1 ; 2:0", "--system", f"{SYSTEMS}#p",
                       "--range=-1,3", "--columns", "16")
    assert code == 0
    lines = out.splitlines()
    assert lines[1].endswith("____/=======\\___")
    assert lines[2].startswith("p(u)") and lines[2].endswith("________/=======")


def test_console_script_help():
    out = subprocess.run([sys.executable, "-m", "asysig.cli", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    for word in ("eval", "enumerate", "check", "transfer", "fm-verify", "fm-synth", "plot", "ASYSIG_BUDGET"):
        assert word in out.stdout
