import math
from datetime import datetime, timezone
from pathlib import Path

import pytest

from fracab.constants import TABLE_ACCURACY_THRESHOLD
from fracab.error_analysis import caputo_remainder_bound
from fracab.errors import InvalidRunSpec
from fracab.experiments import (
    CsvTable,
    bound_check,
    figures,
    format_cell,
    render_csv,
    run,
    solve_fisher_profile,
    solve_ode,
    table1,
    write_table,
)
from fracab.schema import Command, RunSpec

FISHER_TABLE_PARAMETERS = {
    "kind": "caputo",
    "forcing": "consistent",
    "seed": "exact",
    "paper_literal": False,
}


@pytest.mark.parametrize(
    "value, expected",
    [
        (True, "true"),
        (False, "false"),
        (3, "3"),
        (0.1, "0.1"),
        (1.0 / 3.0, "0.3333333333333333"),
        (6.6656e-06, "6.6656e-06"),
        (math.nan, "nan"),
        ("ok", "ok"),
    ],
)
def test_format_cell(value, expected: str):
    assert format_cell(value) == expected


def test_render_csv():
    table = CsvTable(header=["h", "error"], rows=[[0.1, 0.5], [0.05, math.nan]])
    assert render_csv(table) == "h,error\n0.1,0.5\n0.05,nan\n"


def test_render_csv_with_timestamp():
    table = CsvTable(header=["a"], rows=[[1]])
    stamp = datetime(2024, 1, 1, tzinfo=timezone.utc)
    assert render_csv(table, stamp) == (
        "# generated: 2024-01-01T00:00:00+00:00\na\n1\n"
    )


def test_write_table(tmp_path: Path):
    table = CsvTable(header=["a", "b"], rows=[[1, "x"]])
    target = tmp_path / "out" / "table.csv"
    text = write_table(table, target, timestamp=False)
    assert text == "a,b\n1,x\n"
    assert target.read_bytes() == b"a,b\n1,x\n"


def test_write_table_without_path_returns_text():
    table = CsvTable(header=["a"], rows=[])
    assert write_table(table, None, timestamp=False) == "a\n"


def test_solve_ode_rejects_missing_parameter():
    with pytest.raises(InvalidRunSpec, match="'h'"):
        solve_ode({"kind": "caputo", "alpha": 0.5, "problem": "sine", "T": 1.0})


def test_solve_ode_exact_seed_rejects_zero_substeps():
    parameters = {
        "kind": "caputo",
        "alpha": 0.5,
        "problem": "sine",
        "h": 0.1,
        "T": 0.5,
        "seed": "exact",
        "substeps": 0,
    }
    with pytest.raises(InvalidRunSpec, match="substeps"):
        solve_ode(parameters)


@pytest.mark.parametrize(
    "dx, N, nodes",
    [
        (0.25, None, 5),
        (0.125, 8, 9),
        (0.22, None, 6),
    ],
)
def test_solve_fisher_profile_grid_from_dx(dx: float, N, nodes: int):
    parameters = {
        "kind": "caputo",
        "alpha": 0.5,
        "delta": 0.01,
        "tau": 1.0,
        "L": 1.0,
        "dt": 0.01,
        "T": 0.05,
        "dx": dx,
        "forcing": "consistent",
        "seed": "exact",
    }
    if N is not None:
        parameters["N"] = N
    table = solve_fisher_profile(parameters)
    assert table.header == ["t", "x", "u_computed", "u_exact", "abs_error"]
    assert len(table.rows) == nodes
    assert table.rows[-1][1] == pytest.approx(1.0)


BOUND_CHECK_PARAMETERS = {
    "kind": "caputo",
    "h": 0.01,
    "T": 1.0,
    "substeps": 32,
}


def test_bound_check_takes_derivative_bound_from_problem():
    parameters = {**BOUND_CHECK_PARAMETERS, "problem": "power-caputo", "alpha": 0.5}
    parameters["h"], parameters["T"] = 0.05, 0.5
    table = bound_check(parameters)
    for row in table.rows:
        n, bound = row[0], row[3]
        assert bound == pytest.approx(caputo_remainder_bound(0.5, 0.05, n, 6.0))


@pytest.mark.parametrize(
    "alpha, worst_ratio",
    [
        (0.3, 3142.0),
        (0.5, 3312.0),
        (0.8, 1771.0),
    ],
)
def test_bound_check_sine_defects_exceed_caputo_bound(alpha: float, worst_ratio):
    table = bound_check({**BOUND_CHECK_PARAMETERS, "problem": "sine", "alpha": alpha})
    statuses = [row[4] for row in table.rows]
    assert statuses.count("violated") >= len(table.rows) - 1
    assert max(row[2] / row[3] for row in table.rows) == pytest.approx(
        worst_ratio, rel=1e-2
    )


def test_solve_ode_exact_seed_from_reference():
    parameters = {
        "kind": "caputo",
        "alpha": 0.5,
        "problem": "sine",
        "h": 0.1,
        "T": 0.5,
        "seed": "exact",
        "substeps": 8,
    }
    table = solve_ode(parameters)
    assert table.header == ["t", "y"]
    assert len(table.rows) == 6
    assert table.rows[1][1] > 0.0


def test_table1_grid_follows_published_spacing():
    table = table1(dict(FISHER_TABLE_PARAMETERS))
    assert [row[3] for row in table.rows] == [4, 4, 8, 16]
    assert [row[2] for row in table.rows] == [0.25, 0.25, 0.125, 0.0625]
    assert [row[0] for row in table.rows] == [0.25, 0.0625, 0.015625, 0.00390625]
    for row in table.rows:
        error, status = row[4], row[6]
        assert status in ("ok", "inaccurate", "unstable")
        assert math.isnan(error) == (status == "unstable")
        if status != "unstable":
            assert (status == "inaccurate") == (error > TABLE_ACCURACY_THRESHOLD)
    assert table.rows[0][6] == "inaccurate"
    assert table.rows[0][4] == pytest.approx(745.28, rel=1e-3)


def test_table1_rejects_unknown_kind():
    with pytest.raises(InvalidRunSpec):
        table1({**FISHER_TABLE_PARAMETERS, "kind": "riesz"})


def test_figures_keep_every_series():
    table = figures({"N": 20, "dt": 0.01, "forcing": "consistent", "seed": "exact"})
    assert table.header[-1] == "status"
    assert len(table.rows) == 15 * 21
    series = [row[0] for row in table.rows]
    assert series.count("kernels") == 3 * 21
    assert series.count("orders") == 4 * 21
    assert series.count("times") == 4 * 21
    assert series.count("lengths") == 4 * 21
    for row in table.rows:
        assert row[-1] in ("ok", "unstable")
        computed = row[6]
        assert isinstance(computed, float)
        assert math.isnan(computed) == (row[-1] == "unstable")


def test_run_dispatches_commands():
    spec = RunSpec(
        command=Command.Discrepancy,
        parameters={
            "kind": "caputo",
            "alpha": 0.5,
            "delta": 1.0,
            "tau": 1.0,
            "L": 1.0,
            "T": 1.0,
            "dt": 0.01,
            "points": 3,
        },
    )
    table = run(spec)
    assert table.header == ["x", "t", "literal", "consistent", "difference"]
    assert len(table.rows) == 9
