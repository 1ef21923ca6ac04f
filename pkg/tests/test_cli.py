"""Config parsing, experiment dispatch, CSV output, exit codes, determinism."""

import glob
import os

import pytest

from hyperdyn.cli import main
from hyperdyn.config import parse_config
from hyperdyn.errors import ConfigError

CRITERION_CFG = """\
kind = criterion
weights = mixing:M=4,eps=0.5
alpha = translation:1
K = [-2,2]
density = 64
I = 1,2
thresholds = 1e-1,1e-2,1e-3,1e-4,1e-5,1e-6
r_max = 120
"""

WITNESS_CFG = """\
kind = witness
weights = mixing:M=4,eps=0.5
alpha = translation:1
u.0 = tent:-1,0,1
v.0 = tent:-1,0,1
r_values = 10,20,30
decay_threshold = 1e-2
"""


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def test_parse_criterion_config():
    cfg = parse_config(CRITERION_CFG)
    assert cfg.kind == "criterion"
    assert cfg.I == (1, 2)
    assert cfg.r_max == 120
    assert cfg.K.intervals == ((-2.0, 2.0),)
    assert cfg.weights.bound == 1.5


def test_unknown_key_rejected():
    with pytest.raises(ConfigError) as err:
        parse_config(CRITERION_CFG + "bogus = 1\n")
    assert "bogus" in str(err.value)


def test_missing_required_key():
    with pytest.raises(ConfigError) as err:
        parse_config("kind = criterion\nalpha = translation:1\n")
    assert "requires" in str(err.value)


def test_duplicate_key_rejected():
    with pytest.raises(ConfigError):
        parse_config(CRITERION_CFG + "r_max = 7\n")


def test_malformed_compact_set():
    with pytest.raises(ConfigError):
        parse_config(CRITERION_CFG.replace("K = [-2,2]", "K = [)"))
    with pytest.raises(ConfigError):
        parse_config(CRITERION_CFG.replace("K = [-2,2]", "K = "))


def test_unknown_kind():
    with pytest.raises(ConfigError):
        parse_config("kind = frobnicate\n")


def test_table_weights_parse():
    cfg = parse_config(
        "kind = criterion\n"
        "weights = table\n"
        "weight.0 = constant:2\n"
        "weight.pos = constant:0.5\n"
        "weight.neg = pwlinear:(0,1.5),(1,0.5)\n"
        "alpha = translation:1\n"
        "K = [0,1]\n"
        "I = 1\n")
    assert cfg.weights.weight(0).value == 2.0
    assert cfg.weights.weight(5).value == 0.5
    assert cfg.weights.weight(-3)(0.0) == 1.5


def test_vector_entries_parse():
    cfg = parse_config(WITNESS_CFG)
    assert list(cfg.u) == [0] and list(cfg.v) == [0]
    assert cfg.u[0](0.0) == 1.0
    assert cfg.r_values == (10, 20, 30)


# ---------------------------------------------------------------------------
# runs and exit codes
# ---------------------------------------------------------------------------

def test_run_criterion_exit_zero(tmp_path):
    cfg = write(tmp_path, "crit.cfg", CRITERION_CFG)
    out = str(tmp_path / "out")
    assert main(["run", cfg, "--out", out, "--no-plot"]) == 0
    assert os.path.exists(os.path.join(out, "crit_trace.csv"))
    assert os.path.exists(os.path.join(out, "crit_summary.txt"))


def test_run_unit_weights_exit_one(tmp_path):
    cfg = write(tmp_path, "flat.cfg",
                CRITERION_CFG.replace("mixing:M=4,eps=0.5", "constant:1"))
    assert main(["run", cfg, "--out", str(tmp_path), "--no-plot"]) == 1


def test_run_malformed_config_exit_two(tmp_path):
    cfg = write(tmp_path, "bad.cfg", CRITERION_CFG.replace("K = [-2,2]", "K = []"))
    assert main(["run", cfg, "--out", str(tmp_path), "--no-plot"]) == 2
    assert main(["run", str(tmp_path / "missing.cfg"), "--no-plot"]) == 2


def test_validate_exit_codes(tmp_path):
    good = write(tmp_path, "good.cfg", CRITERION_CFG)
    bad = write(tmp_path, "bad.cfg", CRITERION_CFG + "junk = 0\n")
    assert main(["validate", good]) == 0
    assert main(["validate", bad]) == 2


def test_domain_error_maps_to_exit_two(tmp_path):
    # weights without an invertibility certificate cannot run the criterion
    cfg = write(tmp_path, "degenerate.cfg",
                CRITERION_CFG.replace("mixing:M=4,eps=0.5", "constant:0"))
    assert main(["run", cfg, "--out", str(tmp_path), "--no-plot"]) == 2


def test_run_witness_kind(tmp_path):
    cfg = write(tmp_path, "wit.cfg", WITNESS_CFG)
    out = str(tmp_path / "w")
    assert main(["run", cfg, "--out", out, "--no-plot"]) == 0
    header = open(os.path.join(out, "wit_trace.csv")).read().splitlines()
    cols = [l for l in header if not l.startswith("#")][0]
    assert cols == "r,d_start,d_end,bound_forward,bound_backward"


def test_figure_rendered(tmp_path):
    cfg = write(tmp_path, "crit.cfg", CRITERION_CFG)
    out = str(tmp_path / "fig")
    assert main(["run", cfg, "--out", out]) == 0
    png = os.path.join(out, "crit_decay.png")
    assert os.path.getsize(png) > 1000


def test_backward_exponent_flag(tmp_path):
    # under the alternative exponent reading the backward factors of this
    # family sit above 1, so the scan honestly fails to certify decay
    cfg = write(tmp_path, "crit.cfg", CRITERION_CFG)
    out = str(tmp_path / "alt")
    assert main(["run", cfg, "--out", out, "--no-plot",
                 "--backward-exponent=-i"]) == 1
    text = open(os.path.join(out, "crit_trace.csv")).read()
    assert "# backward_exponent = -i" in text
    assert "# verdict = not_found_within_budget" in text


# ---------------------------------------------------------------------------
# reproducibility and echo integrity
# ---------------------------------------------------------------------------

def test_rerun_is_byte_identical(tmp_path):
    cfg = write(tmp_path, "crit.cfg", CRITERION_CFG)
    a, b = str(tmp_path / "a"), str(tmp_path / "b")
    assert main(["run", cfg, "--out", a, "--seed", "5", "--no-plot"]) == 0
    assert main(["run", cfg, "--out", b, "--seed", "5", "--no-plot"]) == 0
    bytes_a = open(os.path.join(a, "crit_trace.csv"), "rb").read()
    bytes_b = open(os.path.join(b, "crit_trace.csv"), "rb").read()
    assert bytes_a == bytes_b


def test_header_echoes_every_config_line(tmp_path):
    cfg = write(tmp_path, "crit.cfg", CRITERION_CFG)
    out = str(tmp_path / "echo")
    assert main(["run", cfg, "--out", out, "--no-plot"]) == 0
    text = open(os.path.join(out, "crit_trace.csv")).read()
    for line in CRITERION_CFG.splitlines():
        key, _, value = line.partition("=")
        assert f"# {key.strip()} = {value.strip()}" in text


def test_env_var_overrides_out(tmp_path, monkeypatch):
    cfg = write(tmp_path, "crit.cfg", CRITERION_CFG)
    env_dir = str(tmp_path / "envout")
    monkeypatch.setenv("HYPERDYN_OUT", env_dir)
    assert main(["run", cfg, "--out", str(tmp_path / "ignored"), "--no-plot"]) == 0
    assert os.path.exists(os.path.join(env_dir, "crit_trace.csv"))
    assert not os.path.exists(os.path.join(str(tmp_path / "ignored"), "crit_trace.csv"))


def test_all_kinds_produce_output(tmp_path):
    configs = {
        "mix.cfg": CRITERION_CFG.replace("kind = criterion", "kind = mixing")
        .replace("thresholds = 1e-1,1e-2,1e-3,1e-4,1e-5,1e-6",
                 "threshold = 1e-6\nr_window = 20"),
        "mul.cfg": ("kind = multiplier\nb = pwlinear:(-1,1.5),(0,0.5)\n"
                    "alpha = translation:1\nK = [0,1]\nn_max = 60\n"),
        "seg.cfg": "kind = segal-norm\nf = tent:-1,0,1\ntau = constant:0.5\n",
        "apx.cfg": ("kind = approx-identity\nf = tent:-1,0,1\n"
                    "tau = constant:0.5\ndelta = 0.1\n"),
        "c0w.cfg": ("kind = c0-witness\nweights = mixing:M=4,eps=0.5\n"
                    "alpha = translation:1\ntau = constant:0.5\n"
                    "u.0 = tent:-1,0,1\nv.0 = tent:-1,0,1\n"
                    "r_values = 10,20,30\ndecay_threshold = 1e-1\n"),
        "runa.cfg": "kind = runaway\nalpha = translation:1\nK = [0,1]\nn_max = 10\n",
    }
    for name, text in configs.items():
        path = write(tmp_path, name, text)
        out = str(tmp_path / ("out_" + name))
        assert main(["run", path, "--out", out, "--no-plot"]) == 0, name
        stem = name.rsplit(".", 1)[0]
        assert os.path.exists(os.path.join(out, f"{stem}_trace.csv"))


def test_shipped_example_configs(tmp_path):
    here = os.path.dirname(__file__)
    shipped = sorted(glob.glob(os.path.join(here, "..", "configs", "*.cfg")))
    assert len(shipped) == 8
    for cfg in shipped:
        assert main(["validate", cfg]) == 0, cfg
        out = str(tmp_path / os.path.basename(cfg))
        assert main(["run", cfg, "--out", out, "--no-plot"]) == 0, cfg
