import pytest

from pmsam.cli import main, parse_args, trace_log
from pmsam.config import parse_config, to_flat
from pmsam.errors import ConfigurationError


def test_defaults(tmp_path):
    empty = tmp_path / "empty.cfg"
    empty.write_text("")
    flat = to_flat(parse_config(empty))
    assert (flat["n"], flat["m"], flat["step_length"], flat["eyesight"]) == (60, 10, 1e-4, 1.0)
    assert (flat["somersault_lo"], flat["somersault_hi"], flat["d"]) == (-1.0, 1.0, 30)
    assert (flat["climb_number"], flat["n_max"], flat["target_value"]) == (50, 20, None)


def test_override_precedence(tmp_path):
    f = tmp_path / "c.cfg"
    f.write_text("# population\nn = 100\nm=10\n")
    assert parse_config(f).ma.n == 100
    assert parse_config(f, ["n=60"]).ma.n == 60


@pytest.mark.parametrize("line,key", [("bogus=1", "bogus"), ("n=lots", "n"), ("n=5", "m")])
def test_errors_name_key(line, key):
    with pytest.raises(ConfigurationError) as err:
        parse_config(None, [line])
    assert err.value.key == key


def test_parse_args():
    cli = parse_args(["run", "--set", "n=30", "--set", "m=3", "--seed", "4", "--function", "f4"])
    assert cli.overrides == ["n=30", "m=3"] and cli.seed == 4 and cli.function == "f4"


def test_trace_starts_at_zero():
    log, report = trace_log()
    assert [ev.t for ev in log[:4]] == [0, 1, 2, 3]
    assert log[-1].t == report.ticks


def test_trace_command_prints_log(capsys):
    assert main(["trace"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert [line.split("\t")[0] for line in lines[1:5]] == ["0", "1", "2", "3"]


def test_unknown_function_one_line_error(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", "--function", "f99", "--out", str(out)]) != 0
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and "f99" in err[0]
    assert not out.exists()


def test_bad_flag_one_line_error(capsys):
    assert main(["run", "--algorithm", "ga"]) != 0
    assert len(capsys.readouterr().err.strip().splitlines()) == 1


def test_run_writes_outputs_deterministically(tmp_path):
    args = ["run", "--function", "f1", "--algorithm", "both", "--set", "n=8", "--set", "m=2",
            "--set", "d=3", "--set", "climb_number=2", "--set", "n_max=2"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b"), "--workers", "2"]) == 0
    for name in ("summary.csv", "convergence.csv", "report.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_bench_creates_files(tmp_path):
    out = tmp_path / "bench"
    args = ["bench", "--runs", "1", "--function", "f12", "--set", "d=3", "--set", "n_max=1",
            "--out", str(out)]
    assert main(args) == 0
    assert (out / "summary.csv").exists() and (out / "report.json").exists()
    assert ",100,100," in (out / "summary.csv").read_text()


def test_compare_writes_timing(tmp_path):
    args = ["compare", "--set", "m=4", "--set", "d=3", "--set", "climb_number=1", "--out",
            str(tmp_path)]
    assert main(args) == 0
    lines = (tmp_path / "timing.csv").read_text().splitlines()
    assert [line.split(",")[0] for line in lines[1:]] == ["20", "40", "80", "160"]
