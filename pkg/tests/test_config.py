from pathlib import Path

import pytest

from fracab.config import (
    COMMAND_DEFAULTS,
    build_run_spec,
    coerce,
    read_config_file,
    read_environment,
    resolve_parameters,
)
from fracab.errors import InvalidRunSpec
from fracab.schema import Command

from .conftest import does_not_raise


@pytest.fixture(scope="function")
def config_file(tmp_path: Path) -> Path:
    path = tmp_path / "run.env"
    path.write_text("# fisher run\nalpha = 0.35\nN = 40\ndelta=2.5\n")
    return path


def test_every_command_has_defaults():
    assert set(COMMAND_DEFAULTS) == set(Command)


@pytest.mark.parametrize(
    "key, value, expected",
    [
        ("alpha", "0.25", 0.25),
        ("N", "12", 12),
        ("kind", "cf", "cf"),
        ("paper_literal", "true", True),
        ("paper_literal", "0", False),
        ("no_timing", True, True),
    ],
)
def test_coerce(key: str, value, expected):
    assert coerce(key, value) == expected


@pytest.mark.parametrize(
    "key, value, expectation",
    [
        ("alpha", "half", pytest.raises(InvalidRunSpec)),
        ("N", "2.5", pytest.raises(InvalidRunSpec)),
        ("colour", "red", pytest.raises(InvalidRunSpec)),
        ("T", "2", does_not_raise()),
    ],
)
def test_coerce_rejects_bad_values(key: str, value: str, expectation):
    with expectation:
        coerce(key, value)


def test_read_config_file(config_file: Path):
    assert read_config_file(config_file) == {"alpha": 0.35, "N": 40, "delta": 2.5}


def test_read_config_file_rejects_unknown_key(tmp_path: Path):
    path = tmp_path / "bad.env"
    path.write_text("alpha = 0.5\nbeta = 3\n")
    with pytest.raises(InvalidRunSpec, match="beta"):
        read_config_file(path)


def test_read_config_file_rejects_missing_file(tmp_path: Path):
    with pytest.raises(InvalidRunSpec):
        read_config_file(tmp_path / "absent.env")


def test_read_environment():
    environ = {"FRACAB_ALPHA": "0.8", "FRACAB_PAPER_LITERAL": "true", "HOME": "/root"}
    assert read_environment(environ) == {"alpha": 0.8, "paper_literal": True}


def test_parameter_precedence(config_file: Path):
    environ = {"FRACAB_ALPHA": "0.9", "FRACAB_T": "0.4", "FRACAB_N": "16"}
    flags = {"N": "64", "dt": None}
    parameters = resolve_parameters(Command.SolveFisher, flags, config_file, environ)
    assert parameters["N"] == 64
    assert parameters["alpha"] == 0.35
    assert parameters["delta"] == 2.5
    assert parameters["T"] == 0.4
    assert parameters["dt"] == COMMAND_DEFAULTS[Command.SolveFisher]["dt"]
    assert parameters["paper_literal"] is False


def test_flags_override_environment_without_file():
    parameters = resolve_parameters(
        Command.SolveOde, {"alpha": "0.7"}, environ={"FRACAB_ALPHA": "0.2"}
    )
    assert parameters["alpha"] == 0.7


@pytest.mark.parametrize(
    "out, expected",
    [
        (None, None),
        ("-", None),
        ("", None),
        ("results/run.csv", Path("results/run.csv")),
    ],
)
def test_build_run_spec_output_path(out, expected):
    spec = build_run_spec(Command.Table1, {"out": out}, environ={})
    assert spec.output_path == expected
    assert "out" not in spec.parameters
    assert spec.command == Command.Table1
