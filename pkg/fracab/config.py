import logging
import os
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from dotenv import dotenv_values
from pydantic import TypeAdapter, ValidationError

from fracab.constants import ENV_PREFIX
from fracab.errors import InvalidRunSpec
from fracab.schema import Command, RunSpec, Scalar

logger = logging.getLogger(__name__)

PARAMETER_TYPES: Dict[str, Any] = {
    "alpha": float,
    "kind": str,
    "h": float,
    "T": float,
    "dt": float,
    "dx": float,
    "delta": float,
    "tau": float,
    "L": float,
    "N": int,
    "M": float,
    "forcing": str,
    "norm": str,
    "seed": str,
    "problem": str,
    "levels": int,
    "substeps": int,
    "points": int,
    "paper_literal": bool,
    "no_timestamp": bool,
    "no_timing": bool,
    "out": str,
}

_COMMON_DEFAULTS: Dict[str, Scalar] = {"paper_literal": False, "no_timestamp": False}

COMMAND_DEFAULTS: Dict[Command, Dict[str, Scalar]] = {
    Command.SolveOde: {
        "problem": "expdecay",
        "kind": "caputo",
        "alpha": 0.5,
        "h": 0.01,
        "T": 1.0,
        "seed": "euler",
    },
    Command.SolveFisher: {
        "kind": "caputo",
        "alpha": 0.5,
        "delta": 0.01,
        "tau": 1.0,
        "L": 1.0,
        "dt": 0.01,
        "T": 0.1,
        "forcing": "consistent",
        "seed": "exact",
    },
    Command.Table1: {"kind": "all", "forcing": "consistent", "seed": "exact"},
    Command.Table2: {
        "kind": "all",
        "forcing": "consistent",
        "seed": "exact",
        "no_timing": False,
    },
    Command.Convergence: {
        "problem": "cf-linear",
        "kind": "cf",
        "alpha": 0.5,
        "h": 0.1,
        "T": 1.0,
        "levels": 4,
        "seed": "exact",
        "substeps": 32,
    },
    Command.BoundCheck: {
        "problem": "sine",
        "kind": "caputo",
        "alpha": 0.5,
        "h": 0.01,
        "T": 1.0,
        "substeps": 32,
    },
    Command.Discrepancy: {
        "kind": "caputo",
        "alpha": 0.5,
        "delta": 1.0,
        "tau": 1.0,
        "L": 1.0,
        "T": 1.0,
        "dt": 0.01,
        "points": 5,
    },
    Command.Figures: {
        "N": 20,
        "dt": 0.01,
        "forcing": "consistent",
        "seed": "exact",
    },
}


def coerce(key: str, value: Any) -> Scalar:
    """Convert a raw flag, file or environment value to the parameter's type.
    :raises: InvalidRunSpec: If the key is unknown or the value does not convert.
    """
    if key not in PARAMETER_TYPES:
        raise InvalidRunSpec(f"unknown parameter '{key}'")
    try:
        return TypeAdapter(PARAMETER_TYPES[key]).validate_python(value)
    except ValidationError:
        raise InvalidRunSpec(
            f"invalid value {value!r} for parameter '{key}',"
            f" expected {PARAMETER_TYPES[key].__name__}"
        )


def read_config_file(path: Path) -> Dict[str, Scalar]:
    """Read a `key = value` experiment manifest, `#` starting a comment.
    :raises: InvalidRunSpec: If the file is missing or holds unknown keys or bad values.
    """
    if not Path(path).is_file():
        raise InvalidRunSpec(f"config file '{path}' does not exist")
    parameters: Dict[str, Scalar] = {}
    for key, value in dotenv_values(path).items():
        if value is None:
            raise InvalidRunSpec(f"config entry '{key}' in '{path}' has no value")
        parameters[key] = coerce(key, value)
    logger.debug(f"read {len(parameters)} parameters from {path}")
    return parameters


def read_environment(
    environ: Optional[Mapping[str, str]] = None
) -> Dict[str, Scalar]:
    """Collect the FRACAB_<KEY> environment variables, e.g. FRACAB_ALPHA or FRACAB_T."""
    environ = os.environ if environ is None else environ
    parameters: Dict[str, Scalar] = {}
    for key in PARAMETER_TYPES:
        value = environ.get(f"{ENV_PREFIX}{key.upper()}")
        if value is not None:
            parameters[key] = coerce(key, value)
    return parameters


def resolve_parameters(
    command: Command,
    flags: Mapping[str, Any],
    config_path: Optional[Path] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> Dict[str, Scalar]:
    """Merge the parameter sources, highest precedence first: flags, config file,
    environment, built-in defaults. Flags left at None are treated as not given.
    """
    parameters: Dict[str, Scalar] = {**_COMMON_DEFAULTS, **COMMAND_DEFAULTS[command]}
    parameters.update(read_environment(environ))
    if config_path is not None:
        parameters.update(read_config_file(config_path))
    parameters.update(
        {key: coerce(key, value) for key, value in flags.items() if value is not None}
    )
    return parameters


def build_run_spec(
    command: Command,
    flags: Mapping[str, Any],
    config_path: Optional[Path] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> RunSpec:
    parameters = resolve_parameters(command, flags, config_path, environ)
    out = parameters.pop("out", None)
    output_path = None if out in (None, "", "-") else Path(str(out))
    return RunSpec(command=command, parameters=parameters, output_path=output_path)
