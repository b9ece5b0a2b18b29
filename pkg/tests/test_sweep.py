"""Sweep configuration parsing, execution, and the CSV contract."""

import math

import numpy as np
import pytest

from phonoblock.optimal import single_drive_optimal, two_drive_optimal
from phonoblock.sweep import (
    CSV_COLUMNS,
    ConfigError,
    load_config,
    parse_config,
    resolve_workers,
    run_sweep,
)


def make_config(params, model="", output="", truncation="dims = 3,3"):
    return (
        f"[model]\n{model}\n[params]\n{params}\n"
        f"[output]\n{output}\n[truncation]\n{truncation}\n"
    )


FAST = "delta = 0.1,0.3\nu = 0.5\nj = 0.8"


def test_parse_minimal_defaults():
    config = parse_config("[params]\ndelta = 0:1:5\nu = 0.5\nj = 0.8\n")
    assert config.kind == "mech-only"
    assert config.optimal_mode == "off"
    assert config.dims == (6, 6)
    assert config.observables == ("g2_b", "n_b1", "n_b2")
    assert config.fixed["omega1"] == 0.1
    assert config.fixed["zeta"] == 0.0 and config.fixed["phi"] == 0.0
    assert config.fixed["nth"] == 0.0
    assert not config.convergence
    assert [ax.name for ax in config.axes] == ["delta"]
    assert config.grid_size == 5


def test_grid_value_forms():
    config = parse_config(
        "[params]\n"
        "delta = 0:1:3\n"
        "u = 0.1, 0.2, 0.4\n"
        "j = 0.8\n"
        "nth = 1e-4:1e-1:4:log\n"
        "phi = 0:2:5 pi\n"
    )
    grids = {ax.name: ax.values for ax in config.axes}
    np.testing.assert_allclose(grids["delta"], [0.0, 0.5, 1.0])
    np.testing.assert_allclose(grids["u"], [0.1, 0.2, 0.4])
    np.testing.assert_allclose(grids["nth"], np.geomspace(1e-4, 1e-1, 4))
    np.testing.assert_allclose(grids["phi"], np.linspace(0, 2 * math.pi, 5))
    assert config.grid_size == 3 * 3 * 4 * 5


def test_scalar_pi_suffix():
    config = parse_config("[params]\ndelta = 0.2\nu = 0.5\nj = 0.8,0.9\nphi = 0.5 pi\n")
    assert abs(config.fixed["phi"] - math.pi / 2) < 1e-15


@pytest.mark.parametrize(
    "text,match",
    [
        ("[params]\ndelta = 0:1:0\nu = 1\nj = 1,2\n", "count"),
        ("[params]\ndelta = 0:1:2:log\nu = 1\nj = 1,2\n", "positive"),
        ("[params]\ndelta = 0:1\nu = 1\nj = 1,2\n", "grid"),
        ("[params]\ndelta = abc\nu = 1\nj = 1,2\n", "parse"),
        ("[params]\ndelta = inf\nu = 1\nj = 1,2\n", "finite"),
        ("[params]\ndelta =\nu = 1\nj = 1,2\n", "empty"),
        ("[params]\ndelta = 1\nu = 1\nj = 1,2\nomega1 = 0.1,0.2\n", "single value"),
        ("[surprise]\nx = 1\n[params]\ndelta = 1\nu = 1\nj = 1,2\n", "unknown section"),
        ("[params]\ndelta = 1\nu = 1\nj = 1,2\nmass = 3\n", "unknown key"),
        ("[model]\nkind = strange\n[params]\ndelta = 1\nu = 1\nj = 1,2\n", "kind"),
        ("[model]\noptimal-mode = maybe\n[params]\ndelta = 1\nu = 1\nj = 1,2\n", "optimal-mode"),
        ("[model]\nbranch = plus\n[params]\ndelta = 1\nu = 1\nj = 1,2\n", "branch"),
        ("[params]\ndelta = 1\nu = 1\n", "j must be given"),
        ("[params]\ndelta = 1\nu = 1\nj = 1\n", "axis is required"),
        ("[model]\n", "missing required section"),
        ("[params]\ndelta = 1\nu = 1\nj = 1,2\ntau = 3\n", "axis"),
        ("[params]\ntau = 0:5:3\ndelta = 1,2\nu = 1\nj = 1\n", "last"),
        ("[params]\ndelta = 1\nu = 1\nj = 1\ntau = 1,0.5,2\n", "increasing"),
        ("[params]\ndelta = 1\nu = 1\nj = 1\ntau = -1,0,1\n", "nonnegative"),
        ("[params]\ndelta = 1\nu = 1\nj = 1,2\ng = 1\n", "full-optomech"),
        ("[model]\nkind = full-optomech\n[params]\ndelta = 1\nu = 1\nj = 1,2\ng = 1\n", "kappa"),
        ("[params]\ndelta = 1\nu = 1\nj = 1,2\n[output]\nobservables = g2_a\n", "not available"),
        ("[params]\ndelta = 1\nu = 1\nj = 1,2\n[output]\nobservables = g2_tau\n", "require each other"),
        ("[params]\ndelta = 1\nu = 1\nj = 1\ntau = 0,1\n[output]\nobservables = g2_b\n", "require each other"),
        ("[params]\ndelta = 1\nu = 1\nj = 1,2\n[output]\nconvergence-check = sometimes\n", "convergence-check"),
        ("[params]\ndelta = 1\nu = 1\nj = 1,2\n[truncation]\ndims = 3\n", "entries"),
        ("[params]\ndelta = 1\nu = 1\nj = 1,2\n[truncation]\ndims = 3,x\n", "integers"),
        ("[params]\ndelta = 1\nu = 1\nj = 1,2\n[truncation]\ndims = 1,3\n", "at least 2"),
    ],
)
def test_parse_rejects_bad_configs(text, match):
    with pytest.raises(ConfigError, match=match):
        parse_config(text)


@pytest.mark.parametrize(
    "text,match",
    [
        ("[model]\noptimal-mode = single-drive\n[params]\nj = 1,2\ndelta = 0.1\n", "filled"),
        ("[model]\noptimal-mode = single-drive\n[params]\nj = 1,2\nu = 0.1,0.2\n", "filled"),
        ("[model]\noptimal-mode = single-drive\n[params]\nj = 1,2\nzeta = 1\n", "no effect"),
        ("[model]\noptimal-mode = two-drive-plus\n[params]\ndelta = 1\nu = 1\nj = 1,2\nphi = 0.3\n", "filled"),
        ("[model]\noptimal-mode = two-drive-minus\n[params]\ndelta = 1\nu = 1\nj = 1,2\nzeta = 2\n", "filled"),
        ("[model]\noptimal-mode = single-drive\nbranch = sideways\n[params]\nj = 1,2\n", "branch"),
    ],
)
def test_optimal_mode_conflicts(text, match):
    with pytest.raises(ConfigError, match=match):
        parse_config(text)


def test_empty_truncation_section_keeps_defaults():
    config = parse_config("[params]\ndelta = 1,2\nu = 1\nj = 1\n[truncation]\n")
    assert config.dims == (6, 6)


def test_full_model_parses():
    config = parse_config(
        "[model]\nkind = full-optomech\n"
        "[params]\ndelta = 0.1,0.2\nu = 1\nj = 0.8\ng = 1\nkappa = 10\n"
    )
    assert config.dims == (5, 5, 3)
    assert config.observables == ("g2_b", "n_b1", "n_b2", "g2_a", "n_a")
    assert config.fixed["g"] == 1.0 and config.fixed["kappa"] == 10.0


def test_rows_follow_row_major_axis_order():
    config = parse_config(make_config("delta = 0.1,0.2\nu = 1,2,3\nj = 0.8"))
    result = run_sweep(config)
    assert len(result.rows) == 6
    seen = [(row.delta, row.u) for row in result.rows]
    assert seen == [(0.1, 1.0), (0.1, 2.0), (0.1, 3.0), (0.2, 1.0), (0.2, 2.0), (0.2, 3.0)]
    assert all(row.j == 0.8 for row in result.rows)


def test_output_is_deterministic():
    config = parse_config(make_config(FAST))
    first = run_sweep(config).csv_text(timestamp=False)
    second = run_sweep(config).csv_text(timestamp=False)
    assert first == second
    stamped = run_sweep(config).csv_text()
    body = [l for l in stamped.splitlines() if not l.startswith("# timestamp:")]
    assert body == first.splitlines()


def test_parallel_run_matches_serial():
    config = parse_config(make_config("delta = 0.1,0.2\nu = 0.4,0.6\nj = 0.8"))
    serial = run_sweep(config, workers=1).csv_text(timestamp=False)
    parallel = run_sweep(config, workers=2).csv_text(timestamp=False)
    assert serial == parallel


def test_csv_layout():
    config = parse_config(make_config("delta = 0.1,0.3\nu = 1/3\nj = 1.5".replace("1/3", repr(1 / 3))))
    text = run_sweep(config).csv_text(timestamp=False)
    lines = text.splitlines()
    assert lines[0] == "# phonoblock 0.1.0 sweep"
    comments = [l for l in lines if l.startswith("#")]
    assert any(l == "# axis: delta 2" for l in comments)
    assert any(l.startswith("# > delta = 0.1,0.3") for l in comments)
    header = next(l for l in lines if not l.startswith("#"))
    assert header == ",".join(CSV_COLUMNS)
    data = [l for l in lines if not l.startswith("#")][1:]
    assert len(data) == 2
    cells = data[0].split(",")
    assert len(cells) == 13
    assert cells[1] == "0.333333333333"  # 12 significant digits
    assert cells[11] == "nan"  # no tau axis
    assert cells[12] == "0"


def test_tau_sweep_rows_and_period_header():
    config = parse_config(
        make_config(
            "delta = 0.2359074816\nu = 0.1760075174\nj = 1.5\ntau = 0,1,2,4",
            truncation="dims = 6,6",
        )
    )
    result = run_sweep(config)
    assert len(result.rows) == 4
    text = result.csv_text(timestamp=False)
    expected_period = f"# tau_period_2pi_over_j: {2 * math.pi / 1.5:.12g}"
    assert expected_period in text.splitlines()
    taus = [row.tau for row in result.rows]
    np.testing.assert_allclose(taus, [0, 1, 2, 4])
    # delayed correlation lands in g2_b and starts antibunched before relaxing
    values = [row.g2_b for row in result.rows]
    assert values[0] < 0.1 and all(v > values[0] for v in values[1:])
    assert all(row.error_code == 0 for row in result.rows)
    assert all(row.n_b1 == result.rows[0].n_b1 for row in result.rows)


def test_single_drive_fill_is_recorded():
    config = parse_config(
        make_config("j = 0.6,1.5", model="optimal-mode = single-drive")
    )
    result = run_sweep(config)
    below, above = result.rows
    assert below.error_code == 1
    assert math.isnan(below.g2_b) and math.isnan(below.delta)
    opt = single_drive_optimal(1.5)
    assert above.error_code == 0
    assert abs(above.delta - opt.delta_opt) < 1e-12
    assert abs(above.u - opt.u_opt) < 1e-12


def test_two_drive_fill_is_recorded():
    config = parse_config(
        make_config("delta = 0.5\nu = 0.5\nj = 0.5,0.85", model="optimal-mode = two-drive-minus")
    )
    result = run_sweep(config)
    for row, j in zip(result.rows, (0.5, 0.85)):
        _, minus = two_drive_optimal(0.5, j, 0.5)
        assert abs(row.zeta - minus.zeta) < 1e-12
        assert abs(row.phi - minus.phi) < 1e-12
        assert row.error_code == 0


def test_vacuum_point_flags_undefined_correlation():
    config = parse_config(make_config("delta = 0.1,0.2\nu = 1\nj = 0.8\nomega1 = 0"))
    result = run_sweep(config)
    for row in result.rows:
        assert row.error_code == 3
        assert math.isnan(row.g2_b)
        assert row.n_b1 == 0.0  # later observables still computed
    assert result.n_failed == 2


def test_weak_drive_accounting():
    config = parse_config(make_config(FAST + "\nomega1 = 0.5"))
    result = run_sweep(config)
    assert result.n_weak_drive == len(result.rows)
    assert all(row.error_code == 0 for row in result.rows)


def test_convergence_flag_is_metadata():
    config = parse_config(
        make_config("delta = 0.24\nu = 0.18\nj = 1.5,1.6", output="convergence-check = true",
                    truncation="dims = 5,5")
    )
    result = run_sweep(config)
    assert all(row.converged for row in result.rows)
    assert result.n_unconverged == 0
    assert "converged" not in result.csv_text()


def test_write_csv_roundtrip(tmp_path):
    config = parse_config(make_config(FAST))
    result = run_sweep(config)
    out = tmp_path / "sweep.csv"
    result.write_csv(out)
    text = out.read_text()
    lines = text.splitlines()
    assert lines[0] == "# phonoblock 0.1.0 sweep"
    assert lines[1].startswith("# timestamp: ") and lines[1].endswith("Z")
    body = [l for l in lines if not l.startswith("#")]
    reference = [
        l for l in result.csv_text(timestamp=False).splitlines() if not l.startswith("#")
    ]
    assert body == reference


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "nope.ini")
    path = tmp_path / "ok.ini"
    path.write_text(make_config(FAST))
    assert load_config(path).grid_size == 2


def test_resolve_workers_precedence(monkeypatch):
    monkeypatch.delenv("PHONOBLOCK_WORKERS", raising=False)
    assert resolve_workers() == 1
    monkeypatch.setenv("PHONOBLOCK_WORKERS", "3")
    assert resolve_workers() == 3
    assert resolve_workers(2) == 2
    monkeypatch.setenv("PHONOBLOCK_WORKERS", "zero")
    with pytest.raises(ConfigError, match="integer"):
        resolve_workers()
    monkeypatch.setenv("PHONOBLOCK_WORKERS", "0")
    with pytest.raises(ConfigError, match=">= 1"):
        resolve_workers()
    with pytest.raises(ConfigError, match=">= 1"):
        resolve_workers(0)
