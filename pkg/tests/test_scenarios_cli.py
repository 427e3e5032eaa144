import json
import math

import numpy as np
import pytest

from bohm_moyal import cli
from bohm_moyal.scenarios import (
    Scenario,
    ScenarioError,
    default_scenarios,
    from_mapping,
    load,
    parse_text,
)


def run_cli(capsys, *argv):
    code = cli.run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_text_and_defaults():
    text = "# comment\nkind = gaussian\np0 = 2  # inline\n\nname=demo\n"
    values = parse_text(text)
    assert values == {"kind": "gaussian", "p0": "2", "name": "demo"}
    sc = from_mapping(values)
    assert sc.params["p0"] == 2.0 and sc.params["sigma"] == 1.0
    assert sc.grid().n == 256 and sc.grid().length == 40.0


@pytest.mark.parametrize("mapping", [
    {"kind": "spiral"},
    {"kind": "gaussian", "sigma": "0"},
    {"kind": "gaussian", "sigma": "abc"},
    {"kind": "gaussian", "mass": "-1"},
    {"kind": "gaussian", "grid_n": "100"},
    {"kind": "gaussian", "mode_index": "3"},
    {"kind": "plane_wave", "mode_index": "2.5"},
    {"kind": "gaussian", "derivative": "chebyshev"},
    {"kind": "gaussian", "colour": "red"},
])
def test_invalid_scenarios(mapping):
    with pytest.raises(ScenarioError):
        from_mapping(mapping)


def test_bad_line_and_missing_file(tmp_path):
    with pytest.raises(ScenarioError):
        parse_text("kind gaussian\n")
    with pytest.raises(ScenarioError):
        load(tmp_path / "missing.cfg")


def test_overrides_and_mapping_round_trip():
    sc = from_mapping({"kind": "two_gaussian", "rel_phase": "0.7"})
    again = from_mapping(sc.as_mapping())
    assert again == sc
    assert sc.with_overrides({"sigma": "1.5"}).params["sigma"] == 1.5


def test_default_set_contents():
    kinds = {sc.kind for sc in default_scenarios()}
    assert kinds == {"gaussian", "two_gaussian", "plane_wave", "pauli_ck"}
    with pytest.raises(ScenarioError):
        default_scenarios()[0].cayley_klein()


@pytest.mark.parametrize("argv", [
    ("bohm", "--set", "kind=spiral"),
    ("bohm", "--set", "novalue"),
    ("bohm", "--grid-n", "100"),
    ("bohm", "--mass", "0"),
    ("wigner", "--set", "sigma=-1"),
    ("weak", "--set", "operator=q"),
    ("weak", "--set", "kind=plane_wave", "--set", "post=momentum", "--set", "post_mode=5"),
    ("verify", "--tolerance-scale", "0"),
])
def test_configuration_errors_exit_2(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == 2
    assert "configuration error" in err


def test_scenario_file(capsys, tmp_path):
    path = tmp_path / "g.cfg"
    path.write_text("kind = gaussian\np0 = 2\nsigma = 1\n")
    code, out, _ = run_cli(capsys, "bohm", "--scenario", str(path))
    assert code == 0
    cols, rows, _ = cli.parse_csv(out)
    assert cols == list(cli.BOHM_COLUMNS)
    assert max(abs(r["P_B_weak"] - 2) for r in rows) < 1e-6
    assert max(abs(r["P_B_moyal"] - 2) for r in rows) < 1e-6


def test_csv_round_trip_and_determinism(capsys):
    args = ("bohm", "--set", "kind=two_gaussian", "--grid-n", "128")
    code, first, _ = run_cli(capsys, *args)
    _, second, _ = run_cli(capsys, *args)
    assert code == 0 and first == second
    cols, rows, _ = cli.parse_csv(first)
    assert cli.to_csv(cols, rows) == first


def test_json_round_trip(capsys, tmp_path):
    out_path = tmp_path / "bohm.json"
    code, out, _ = run_cli(capsys, "bohm", "--format", "json", "--output", str(out_path))
    assert code == 0 and out == ""
    text = out_path.read_text()
    meta, rows = cli.parse_json(text)
    assert {"scenario", "grid", "conventions"} <= set(meta)
    assert {"fourier", "wigner"} <= set(meta["conventions"])
    assert meta["grid"]["n"] == 256
    assert cli.to_json(meta, rows) == text
    # 17 significant digits make the floats lossless
    for row in rows[:5]:
        for v in row.values():
            if isinstance(v, float):
                assert float("%.17g" % v) == v


def test_plane_wave_osmotic_zero(capsys):
    _, out, _ = run_cli(capsys, "bohm", "--set", "kind=plane_wave", "--set", "mode_index=3")
    _, rows, _ = cli.parse_csv(out)
    assert max(abs(r["osmotic"]) for r in rows) < 1e-12
    assert all(math.isnan(r["wiseman_v"]) for r in rows)


def test_pauli_column(capsys):
    code, out, _ = run_cli(capsys, "pauli", "--set", "kind=pauli_ck", "--set", f"theta0={np.pi / 3!r}",
                           "--set", "phi_slope=0.8")
    assert code == 0
    cols, rows, _ = cli.parse_csv(out)
    assert cols == list(cli.PAULI_COLUMNS)
    for col in ("P_B_components", "P_B_moyal", "P_B_bst"):
        assert max(abs(r[col] - 0.2) for r in rows) < 1e-6
    code, out, _ = run_cli(capsys, "bohm", "--set", "kind=pauli_ck", "--set",
                           f"theta0={np.pi / 3!r}", "--set", "phi_slope=0.8")
    assert code == 0


def test_wigner_output(capsys):
    # p0 on the momentum lattice so the peak (0, p0) is a sample
    p0 = 2 * np.pi * 10 / 32
    code, out, _ = run_cli(capsys, "wigner", "--set", f"p0={p0!r}", "--grid-n", "128",
                           "--grid-length", "32")
    assert code == 0
    cols, rows, footer = cli.parse_csv(out)
    assert cols == ["x", "p", "value"] and len(rows) == 128 * 128
    peak = [r["value"] for r in rows if r["x"] == 0 and abs(r["p"] - p0) < 1e-12]
    assert len(peak) == 1 and abs(peak[0] - 1 / np.pi) < 1e-6
    assert footer["marginal_x_sum"] == pytest.approx(1.0, abs=1e-8)
    assert footer["marginal_p_sum"] == pytest.approx(1.0, abs=1e-8)


def test_wigner_interference(capsys):
    _, out, _ = run_cli(capsys, "wigner", "--set", "kind=two_gaussian", "--grid-n", "128")
    values = np.array([r["value"] for r in cli.parse_csv(out)[1]])
    assert values.min() < -0.05 and values.max() > 0.05


def test_weak_query(capsys):
    code, out, _ = run_cli(capsys, "weak", "--set", "p0=2", "--set", "post=position", "--set", "post_x=1")
    assert code == 0
    _, rows, _ = cli.parse_csv(out)
    assert rows[0]["real"] == pytest.approx(2.0, abs=1e-10)
    assert rows[0]["imag"] == pytest.approx(0.5, abs=1e-10)
    code, out, _ = run_cli(capsys, "weak", "--set", "p0=2", "--set", "post=momentum",
                           "--set", "post_mode=4", "--format", "json")
    row = json.loads(out)["rows"][0]
    assert row["real"] == pytest.approx(4 * 2 * np.pi / 40, abs=1e-10)


def test_verify_command(capsys):
    code, out, err = run_cli(capsys, "verify")
    assert code == 0 and "identities within tolerance" in err
    _, rows, _ = cli.parse_csv(out)
    assert rows and all(r["passed"] is True for r in rows)
    code, _, err = run_cli(capsys, "verify", "--tolerance-scale", "1e-20")
    assert code == 1 and "FAILED" in err
    code, _, err = run_cli(capsys, "verify", "--empty")
    assert code == 0 and "empty scenario set" in err


def test_bohm_identity_failure_exit_1(capsys):
    code, _, err = run_cli(capsys, "bohm", "--set", "kind=two_gaussian", "--tolerance-scale", "1e-20")
    assert code == 1 and "identity failure" in err


def test_scenario_is_frozen():
    sc = default_scenarios()[0]
    assert isinstance(sc, Scenario)
    with pytest.raises(AttributeError):
        sc.mass = 3.0
