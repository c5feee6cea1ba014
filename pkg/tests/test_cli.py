"""Command-line interface tests.

Everything runs in-process through main(argv); files go to tmp_path and
stdout is captured. Reruns with the same options must produce identical
bytes, since the CSV text is part of the reproducibility contract.
"""

import json

import pytest

from cfpdesign import Surrogate, __version__, total_degree
from cfpdesign.cli import main


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_missing_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 2


def test_bad_choice_is_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["design", "--family", "triangular"])
    assert info.value.code == 2


def test_design_json_to_stdout(capsys):
    code = main(
        ["design", "--degree", "2", "--candidates", "200", "--seed", "1", "-o", "-"]
    )
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    n = len(total_degree(2, 2))
    assert len(payload["points"]) == 7  # ceil(1.05 * 6)
    assert len(payload["pivot_order"]) == 7
    assert payload["space"] == "Q"
    assert payload["seed"] == 1
    cfg = payload["config"]
    assert cfg["version"] == __version__
    assert cfg["family"] == "uniform"
    assert cfg["rule"] == "TD"
    assert cfg["degree"] == 2
    assert cfg["method"] == "cfp"
    assert cfg["basis_size"] > n  # enriched selection space
    assert payload["det_modulus"] <= 1.0 + 1e-12


def test_design_reruns_are_identical(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    c = tmp_path / "c.json"
    argv = ["design", "--degree", "3", "--candidates", "300", "--seed", "4"]
    assert main(argv + ["-o", str(a)]) == 0
    assert main(argv + ["-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert main(["design", "--degree", "3", "--candidates", "300", "--seed", "5", "-o", str(c)]) == 0
    assert a.read_bytes() != c.read_bytes()


def test_design_afp_method(capsys):
    code = main(
        ["design", "--method", "afp", "--degree", "1", "--dimension", "1",
         "--samples", "2", "--candidates", "100", "-o", "-"]
    )
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["space"] == "P"
    assert payload["config"]["method"] == "afp"


def test_design_with_surrogate_fit(tmp_path):
    design_path = tmp_path / "design.json"
    fit_path = tmp_path / "fit.json"
    code = main(
        ["design", "--degree", "2", "--candidates", "200", "--fit",
         "exp_negsumsq", "--surrogate-output", str(fit_path), "-o", str(design_path)]
    )
    assert code == 0
    blob = json.loads(fit_path.read_text())
    assert blob["target"] == "exp_negsumsq"
    assert blob["version"] == __version__
    assert len(blob["coefficients"]) == len(total_degree(2, 2))
    surrogate = Surrogate.from_json(blob)
    assert len(surrogate.coefficients) == 6


def test_study_cond_csv(tmp_path):
    out = tmp_path / "cond.csv"
    argv = [
        "study", "cond", "--degrees", "2", "--trials", "2",
        "--candidates", "100", "-o", str(out),
    ]
    assert main(argv) == 0
    text = out.read_text()
    lines = text.splitlines()
    comments = [ln for ln in lines if ln.startswith("# ")]
    assert f"# version = {__version__}" == comments[0]
    assert "# study = cond" in comments
    assert "# degrees = 2" in comments
    header = lines[len(comments)]
    assert header == "method,degree,N,M,stat,value"
    rows = lines[len(comments) + 1 :]
    assert len(rows) == 9  # 3 methods x 1 degree x 3 stats
    assert text.endswith("\n")

    again = tmp_path / "again.csv"
    assert main(argv[:-1] + [str(again)]) == 0
    assert out.read_bytes() == again.read_bytes()


def test_study_approx_with_target(capsys):
    code = main(
        ["study", "approx", "--target", "exp_negsum", "--family", "gaussian",
         "--degrees", "1", "--trials", "2", "--candidates", "100",
         "--validation-samples", "50", "--methods", "CFP", "-o", "-"]
    )
    assert code == 0
    text = capsys.readouterr().out
    assert "# target = exp_negsum" in text
    assert "# family = gaussian" in text
    assert "CFP,1," in text


def test_study_elliptic(tmp_path):
    out = tmp_path / "elliptic.csv"
    code = main(
        ["study", "elliptic", "--degrees", "1", "--trials", "2",
         "--candidates", "100", "--validation-samples", "20",
         "--elliptic-grid-points", "101", "--methods", "CFP,MC",
         "-o", str(out)]
    )
    assert code == 0
    text = out.read_text()
    assert "# target = elliptic" in text
    assert "# elliptic_grid_points = 101" in text
    rows = [ln for ln in text.splitlines() if ln.startswith(("CFP", "MC"))]
    assert len(rows) == 6


def test_degrees_parser_through_echo(capsys):
    argv = ["study", "cond", "--trials", "1", "--candidates", "100",
            "--methods", "CFP", "-o", "-"]
    assert main(argv + ["--degrees", "2:4"]) == 0
    assert "# degrees = 2,3,4" in capsys.readouterr().out
    assert main(argv + ["--degrees", "1,3"]) == 0
    assert "# degrees = 1,3" in capsys.readouterr().out


def test_verify_oned_cli(capsys):
    code = main(["verify", "oned", "--family", "gaussian", "--n-max", "2", "-o", "-"])
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    assert "# report = oned" in lines
    assert "# n_max = 2" in lines
    header_at = next(i for i, ln in enumerate(lines) if not ln.startswith("#"))
    assert lines[header_at] == "family,N,start,check,value,threshold,status"
    rows = lines[header_at + 1 :]
    assert len(rows) == 2 * (6 * 6 + 2)
    assert all(row.endswith(",PASS") for row in rows)


def test_config_file_fills_unset_options(tmp_path, capsys):
    cfg = tmp_path / "study.cfg"
    cfg.write_text(
        "# sweep setup\n"
        "degrees = 2\n"
        "trials = 3\n"
        "candidates = 100\n"
        "methods = CFP\n"
        "seed = 3\n"
        "validation_samples = 40\n"
    )
    code = main(
        ["study", "cond", "--config", str(cfg), "--trials", "1", "-o", "-"]
    )
    assert code == 0
    text = capsys.readouterr().out
    assert "# trials = 1" in text  # explicit flag beats the file
    assert "# seed = 3" in text
    assert "# validation_samples = 40" in text


def test_config_file_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("mystery = 4\n")
    assert main(["study", "cond", "--config", str(cfg)]) == 2
    assert "unknown config key" in capsys.readouterr().err


def test_config_file_malformed_line(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("this line has no assignment\n")
    assert main(["study", "cond", "--config", str(cfg)]) == 2
    assert "expected 'key = value'" in capsys.readouterr().err


def test_config_file_missing(capsys):
    assert main(["study", "cond", "--config", "/nonexistent/path.cfg"]) == 2
    assert "error:" in capsys.readouterr().err


def test_design_with_too_few_candidates(capsys):
    assert main(["design", "--samples", "50", "--candidates", "10"]) == 2
    assert "only" in capsys.readouterr().err


def test_study_with_bad_degree_budget(capsys):
    assert main(
        ["study", "cond", "--degrees", "9", "--candidates", "10", "-o", "-"]
    ) == 2
    assert "error:" in capsys.readouterr().err
