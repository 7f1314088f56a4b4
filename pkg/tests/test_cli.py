import csv
import io
import json

import pytest

from htl import cli
from htl.errors import ConfigError


def _run(argv, capsys, monkeypatch, config=None, tmp_path=None):
    monkeypatch.delenv(cli.CONFIG_ENV, raising=False)
    if config is not None:
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(config))
        monkeypatch.setenv(cli.CONFIG_ENV, str(path))
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_defaults_validate():
    assert cli.RunConfig().validate().grid_size == 2 ** 16


@pytest.mark.parametrize("field,value", [("grid_size", 8), ("grid_size", 3000), ("window", 0.0),
                                         ("arc_depth", 0), ("orders", [64, 16]), ("rho", -1.0),
                                         ("seed", -2), ("output_format", "xml")])
def test_validation_names_field(field, value):
    with pytest.raises(ConfigError) as exc:
        cli.RunConfig(**{field: value}).validate()
    assert exc.value.field == field


def test_insufficient_decades():
    with pytest.raises(ConfigError) as exc:
        cli.RunConfig(theta_min=1e-5, theta_max=1e-3).validate()
    assert exc.value.field == "theta_decades"


def test_grid_size_flag_error(capsys, monkeypatch):
    code, out, err = _run(["symbol", "--grid-size", "8"], capsys, monkeypatch)
    assert code == cli.EXIT_CONFIG and "grid_size" in err and out == ""


def test_arc_depth_zero_error(capsys, monkeypatch):
    code, _, err = _run(["bmolog", "--arc-depth", "0"], capsys, monkeypatch)
    assert code == cli.EXIT_CONFIG and "arc_depth" in err


def test_decades_flag_error(capsys, monkeypatch):
    code, _, err = _run(["asym", "--theta-min", "1e-4"], capsys, monkeypatch)
    assert code == cli.EXIT_CONFIG and "decades" in err


def test_config_file_precedence(tmp_path, monkeypatch):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"seed": 7, "grid_size": 2048}))
    monkeypatch.setenv(cli.CONFIG_ENV, str(path))
    args = cli.build_parser().parse_args(["symbol", "--seed", "3"])
    cfg = cli.load_config(args)
    assert cfg.seed == 3 and cfg.grid_size == 2048


def test_config_file_unknown_key(tmp_path, monkeypatch):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"bogus": 1}))
    with pytest.raises(ConfigError):
        cli.load_config(cli.build_parser().parse_args(["symbol"]), {cli.CONFIG_ENV: str(path)})


def test_symbol_json_schema(capsys, monkeypatch):
    code, out, _ = _run(["symbol"], capsys, monkeypatch)
    doc = json.loads(out)
    assert code == 0
    assert doc["schema_version"] == "1" and doc["command"] == "symbol"
    rep = doc["report"]
    assert rep["winding_number"] == 0 and rep["passed"]
    assert len(rep["coefficients"]) == 33 and rep["max_coeff_error"] <= 1e-6


def test_symbol_csv_to_file(tmp_path, capsys, monkeypatch):
    out_path = tmp_path / "sym.csv"
    code, out, _ = _run(["symbol", "--format", "csv", "--out", str(out_path)], capsys, monkeypatch)
    assert code == 0 and out == ""
    rows = list(csv.reader(io.StringIO(out_path.read_text())))
    assert rows[0] == ["k", "re", "im", "taylor", "abs_error"] and len(rows) == 34


def test_reruns_byte_identical(capsys, monkeypatch):
    first = _run(["asym"], capsys, monkeypatch)[1]
    second = _run(["asym"], capsys, monkeypatch)[1]
    assert first == second


def test_asym_default_passes(capsys, monkeypatch):
    code, out, _ = _run(["asym"], capsys, monkeypatch)
    rep = json.loads(out)["report"]
    assert code == 0
    assert [c["name"] for c in rep["checks"]] == list(cli.si.CHECK_NAMES)
    assert all(c["passed"] for c in rep["checks"])
    assert rep["finite_difference"]["passed"]


def test_asym_rho_one_fails(capsys, monkeypatch):
    code, out, _ = _run(["asym", "--rho", "1"], capsys, monkeypatch)
    rep = json.loads(out)["report"]
    assert code == cli.EXIT_CODES["asym"]
    assert not any(c["passed"] for c in rep["checks"])


def test_bmolog_seed_changes_random_rows_only(tmp_path, capsys, monkeypatch):
    cfg = {"arc_depth": 3, "n_random_arcs": 4, "output_format": "csv"}
    _, out0, _ = _run(["bmolog"], capsys, monkeypatch, dict(cfg, seed=0), tmp_path)
    _, out1, _ = _run(["bmolog"], capsys, monkeypatch, dict(cfg, seed=1), tmp_path)
    rows0 = list(csv.reader(io.StringIO(out0)))
    rows1 = list(csv.reader(io.StringIO(out1)))
    dy0 = [r for r in rows0 if r[1] == "dyadic"]
    dy1 = [r for r in rows1 if r[1] == "dyadic"]
    assert dy0 and dy0 == dy1
    rn0 = [r for r in rows0 if r[1] == "random"]
    rn1 = [r for r in rows1 if r[1] == "random"]
    assert len(rn0) == len(rn1) == 16 and rn0 != rn1


def test_fredholm_single_order_flag(capsys, monkeypatch):
    code, out, _ = _run(["fredholm", "--orders", "8", "--grid-size", "1024"], capsys, monkeypatch)
    rep = json.loads(out)["report"]
    assert "insufficient data for a trend" in rep["flags"]
    assert rep["label"] == "evidence, not proof"
    assert code == cli.EXIT_CODES["fredholm"]


def test_fredholm_grid_too_small(capsys, monkeypatch):
    code, _, err = _run(["fredholm", "--orders", "16,1024", "--grid-size", "1024"], capsys, monkeypatch)
    assert code == cli.EXIT_CONFIG and "grid_size" in err


def test_clean_replaces_non_finite():
    assert cli._clean({"a": float("nan"), "b": [float("inf"), 1j]}) == {"a": None, "b": [None, [0.0, 1.0]]}
