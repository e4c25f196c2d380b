import csv
import io
import logging
import math
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Type, TypeVar, Union

import numpy as np
from pydantic import ValidationError

from fracab.ab2_schemes import integrate
from fracab.constants import (
    FIGURE2_ALPHAS,
    FIGURE3_LENGTHS,
    FIGURE3_TIMES,
    FIGURE_SETTINGS,
    FISHER_DEFAULT_N,
    TABLE1_LADDER,
    TABLE1_SETTINGS,
    TABLE2_ROWS,
    TABLE2_SETTINGS,
    TABLE_ACCURACY_THRESHOLD,
)
from fracab.error_analysis import (
    abc_remainder_bound,
    abc_stability_bound,
    caputo_remainder_bound,
    cf_remainder_bound,
    cf_stability_bound,
    local_defects,
    max_error,
    observed_order,
    stability_gap,
    state_increments,
    trajectory_distance,
)
from fracab.errors import InstabilityDetected, InvalidRunSpec, OverflowSignal
from fracab.fisher_pde import exact_solution, forcing_discrepancy, grid, solve_fisher
from fracab.oracles import reference
from fracab.problems import NamedProblem, build_problem
from fracab.schema import (
    BaseModel,
    Command,
    DerivativeKind,
    FisherConfig,
    ForcingMode,
    NormalizationVariant,
    ReferenceConfig,
    RunSpec,
    Scalar,
    SeedMode,
    Trajectory,
    default_norm_variant,
)
from fracab.special_functions import normalization

logger = logging.getLogger(__name__)

Cell = Union[int, float, str]
Parameters = Dict[str, Scalar]
EnumType = TypeVar(
    "EnumType", DerivativeKind, ForcingMode, NormalizationVariant, SeedMode
)
ModelType = TypeVar("ModelType", bound=BaseModel)

ALL_KINDS = (
    DerivativeKind.Caputo,
    DerivativeKind.CaputoFabrizio,
    DerivativeKind.AtanganaBaleanuCaputo,
)
PUBLISHED_COLUMN = {kind: index for index, kind in enumerate(ALL_KINDS)}

OK = "ok"
INACCURATE = "inaccurate"
UNSTABLE = "unstable"
VIOLATED = "violated"
OVERFLOW = "overflow"


class CsvTable(BaseModel):
    header: List[str]
    rows: List[List[Cell]] = []


def format_cell(value: Cell) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return "%.16g" % value
    return str(value)


def render_csv(table: CsvTable, timestamp: Optional[datetime] = None) -> str:
    """Render a table as CSV with `\\n` line endings and 16 significant digits.
    :param timestamp: When given, a `# generated: <ISO timestamp>` line precedes the header.
    """
    buffer = io.StringIO()
    if timestamp is not None:
        buffer.write(f"# generated: {timestamp.isoformat()}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(table.header)
    for row in table.rows:
        writer.writerow([format_cell(value) for value in row])
    return buffer.getvalue()


def write_table(table: CsvTable, output_path: Optional[Path], timestamp: bool) -> str:
    """Render the table and write it to output_path, returning the text written.
    Nothing is written to disk when output_path is None.
    """
    text = render_csv(table, datetime.now(timezone.utc) if timestamp else None)
    if output_path is not None:
        output_path.parent.mkdir(parents=True, exist_ok=True)
        output_path.write_text(text, encoding="utf-8", newline="")
        logger.info(f"wrote {len(table.rows)} rows to {output_path}")
    return text


def _parameter(parameters: Parameters, key: str) -> Any:
    try:
        return parameters[key]
    except KeyError:
        raise InvalidRunSpec(f"missing parameter '{key}'")


def _choice(enum_type: Type[EnumType], value: Any, key: str) -> EnumType:
    try:
        return enum_type(value)
    except ValueError:
        known = ", ".join(str(member.value) for member in enum_type)
        raise InvalidRunSpec(f"invalid {key} '{value}', expected one of: {known}")


def _model(model_type: Type[ModelType], **fields: Any) -> ModelType:
    try:
        return model_type(**fields)
    except ValidationError as e:
        raise InvalidRunSpec(f"invalid {model_type.__name__}: {e}")


def _kind(parameters: Parameters) -> DerivativeKind:
    return _choice(DerivativeKind, _parameter(parameters, "kind"), "kind")


def _kinds(parameters: Parameters) -> Tuple[DerivativeKind, ...]:
    if parameters.get("kind") == "all":
        return ALL_KINDS
    return (_kind(parameters),)


def _norm_variant(parameters: Parameters) -> Optional[NormalizationVariant]:
    if "norm" not in parameters:
        return None
    return _choice(NormalizationVariant, parameters["norm"], "norm")


def _norm(kind: DerivativeKind, alpha: float, parameters: Parameters) -> float:
    variant = _norm_variant(parameters) or default_norm_variant(kind)
    return normalization(alpha, variant)


def _seed_mode(parameters: Parameters) -> SeedMode:
    return _choice(SeedMode, _parameter(parameters, "seed"), "seed")


def _float(parameters: Parameters, key: str) -> float:
    return float(_parameter(parameters, key))


def _int(parameters: Parameters, key: str) -> int:
    return int(_parameter(parameters, key))


def _flag(parameters: Parameters, key: str) -> bool:
    return bool(parameters.get(key, False))


def _exact_seed(
    named: NamedProblem,
    kind: DerivativeKind,
    alpha: float,
    h: float,
    norm: float,
    substeps: int,
) -> np.ndarray:
    """Value at t = h from the exact solution, or from the full-memory reference."""
    if named.exact is not None:
        return np.atleast_1d(np.asarray(named.exact(h), dtype=float))
    cfg = _model(ReferenceConfig, substeps=substeps)
    return reference(kind, named.problem, alpha, h, 2.0 * h, cfg, norm).y[1]


def _run_ode(
    named: NamedProblem,
    kind: DerivativeKind,
    alpha: float,
    h: float,
    T: float,
    norm: float,
    seed_mode: SeedMode,
    parameters: Parameters,
) -> Trajectory:
    seed = None
    if seed_mode == SeedMode.ExactSeed:
        substeps = int(parameters.get("substeps", ReferenceConfig().substeps))
        seed = _exact_seed(named, kind, alpha, h, norm, substeps)
    return integrate(
        named.problem,
        alpha,
        kind,
        h,
        T,
        norm,
        seed_mode,
        seed,
        _flag(parameters, "paper_literal"),
    )


def _problem_setup(
    parameters: Parameters,
) -> Tuple[DerivativeKind, float, float, NamedProblem]:
    kind = _kind(parameters)
    alpha = _float(parameters, "alpha")
    norm = _norm(kind, alpha, parameters)
    named = build_problem(str(_parameter(parameters, "problem")), kind, alpha, norm)
    return kind, alpha, norm, named


def solve_ode(parameters: Parameters) -> CsvTable:
    """Trajectory of a built-in problem, with the exact solution where one is known."""
    kind, alpha, norm, named = _problem_setup(parameters)
    h, T = _float(parameters, "h"), _float(parameters, "T")
    trajectory = _run_ode(
        named, kind, alpha, h, T, norm, _seed_mode(parameters), parameters
    )
    dimension = named.problem.dimension
    names = ["y"] if dimension == 1 else [f"y{i}" for i in range(dimension)]
    header = ["t"] + names
    if named.exact is not None:
        header += [f"{name}_exact" for name in names] + ["error"]
    table = CsvTable(header=header)
    for t, y in trajectory.points():
        row: List[Cell] = [t] + y.tolist()
        if named.exact is not None:
            exact = np.atleast_1d(np.asarray(named.exact(t), dtype=float))
            row += exact.tolist() + [float(np.max(np.abs(y - exact)))]
        table.rows.append(row)
    return table


def _fisher_config(parameters: Parameters, **overrides: Any) -> FisherConfig:
    fields: Dict[str, Any] = {
        key: parameters[key]
        for key in ("delta", "tau", "alpha", "L", "N", "dt", "T")
        if key in parameters
    }
    if "kind" in parameters and parameters["kind"] != "all":
        fields["kind"] = _kind(parameters)
    if "forcing" in parameters:
        fields["forcing_mode"] = _choice(
            ForcingMode, parameters["forcing"], "forcing"
        )
    if "seed" in parameters:
        fields["seed_mode"] = _seed_mode(parameters)
    fields["norm_variant"] = _norm_variant(parameters)
    fields["paper_literal"] = _flag(parameters, "paper_literal")
    fields.update(overrides)
    return _model(FisherConfig, **fields)


def _profile_rows(
    trajectory: Trajectory, cfg: FisherConfig, index: int
) -> List[Tuple[float, float, float, float]]:
    t = float(trajectory.t[index])
    x = grid(cfg)
    exact = np.asarray(exact_solution(x, t, cfg.tau))
    return list(
        zip(x.tolist(), [t] * len(x), trajectory.y[index].tolist(), exact.tolist())
    )


def _fisher_grid_size(parameters: Parameters) -> int:
    """--N, or the node count round(L/dx) when --dx is given instead.
    :raises: InvalidRunSpec: If dx is not positive or disagrees with an explicit N.
    """
    if "dx" not in parameters:
        return _int(parameters, "N") if "N" in parameters else FISHER_DEFAULT_N
    dx, L = _float(parameters, "dx"), _float(parameters, "L")
    if not dx > 0.0:
        raise InvalidRunSpec(f"dx must be positive, not {dx}")
    N = int(round(L / dx))
    if "N" in parameters and _int(parameters, "N") != N:
        raise InvalidRunSpec(
            f"dx={dx:g} on L={L:g} gives N={N}, not N={parameters['N']}"
        )
    if not math.isclose(L / max(N, 1), dx, rel_tol=1e-9):
        logger.warning(f"dx={dx:g} does not divide L={L:g}, using N={N}")
    return N


def solve_fisher_profile(parameters: Parameters) -> CsvTable:
    """Final-time nodal profile of a Fisher run against the exact solution."""
    cfg = _fisher_config(parameters, N=_fisher_grid_size(parameters))
    trajectory, report = solve_fisher(cfg)
    logger.info(f"fisher max error over the run: {report.max_error:.6e}")
    table = CsvTable(header=["t", "x", "u_computed", "u_exact", "abs_error"])
    for x, t, computed, exact in _profile_rows(trajectory, cfg, len(trajectory) - 1):
        table.rows.append([t, x, computed, float(exact), abs(computed - exact)])
    return table


def _table_cell(cfg: FisherConfig) -> Tuple[float, str, float]:
    """(max error, status, cpu seconds) of one table entry. A blow-up is recorded
    as a nan error with status `unstable` instead of aborting the table, and a run
    whose error exceeds the accuracy threshold as `inaccurate`.
    """
    started = time.process_time()
    try:
        _, report = solve_fisher(cfg)
    except InstabilityDetected as e:
        logger.warning(
            f"{cfg.kind.value} run with dt={cfg.dt:g}, N={cfg.N} is unstable: {e}"
        )
        return math.nan, UNSTABLE, time.process_time() - started
    cpu_seconds = time.process_time() - started
    if report.max_error > TABLE_ACCURACY_THRESHOLD:
        logger.warning(
            f"{cfg.kind.value} run with dt={cfg.dt:g}, N={cfg.N} has max error"
            f" {report.max_error:.3e}, above {TABLE_ACCURACY_THRESHOLD:g}"
        )
        return report.max_error, INACCURATE, cpu_seconds
    return report.max_error, OK, cpu_seconds


def _grid_size(parameters: Parameters, dx: float, L: float) -> int:
    """--N when given, otherwise the node count matching the published dx.
    :raises: InvalidRunSpec: If --dx is given, the published rows fix their own dx.
    """
    if "dx" in parameters:
        raise InvalidRunSpec("table rows use the published dx, set the grid with N")
    if "N" in parameters:
        return _int(parameters, "N")
    return max(4, int(round(L / dx)))


def table1(parameters: Parameters) -> CsvTable:
    """Max errors down the (dt, dx) refinement ladder, one column group per kernel.
    dx is the published spacing, dx_used the spacing L/N of the grid actually run.
    """
    kinds = _kinds(parameters)
    header = ["dt", "dx", "dx_used", "N"]
    for kind in kinds:
        header += [f"{kind.value}_error", f"{kind.value}_paper_value"]
        header += [f"{kind.value}_status"]
    table = CsvTable(header=header)
    for dt, dx, published in TABLE1_LADDER:
        L = TABLE1_SETTINGS["L"]
        N = _grid_size(parameters, dx, L)
        row: List[Cell] = [dt, dx, L / N, N]
        for kind in kinds:
            cfg = _fisher_config(
                parameters, **TABLE1_SETTINGS, dt=dt, N=N, kind=kind
            )
            error, status, _ = _table_cell(cfg)
            row += [error, published[PUBLISHED_COLUMN[kind]], status]
        table.rows.append(row)
    return table


def table2(parameters: Parameters) -> CsvTable:
    """Max errors for several fractional orders at a fixed grid, with timings."""
    kinds = _kinds(parameters)
    timing = not _flag(parameters, "no_timing")
    settings = dict(TABLE2_SETTINGS)
    dx = settings.pop("dx")
    N = _grid_size(parameters, dx, settings["L"])
    dx_used = settings["L"] / N
    header = ["alpha", "dt", "dx", "dx_used", "N"]
    for kind in kinds:
        header += [f"{kind.value}_error", f"{kind.value}_paper_value"]
        if timing:
            header += [f"{kind.value}_cpu_seconds"]
        header += [f"{kind.value}_paper_cpu_seconds", f"{kind.value}_status"]
    table = CsvTable(header=header)
    for alpha, published in TABLE2_ROWS:
        row: List[Cell] = [alpha, settings["dt"], dx, dx_used, N]
        for kind in kinds:
            cfg = _fisher_config(parameters, **settings, alpha=alpha, N=N, kind=kind)
            error, status, cpu_seconds = _table_cell(cfg)
            paper_error, paper_cpu_seconds = published[PUBLISHED_COLUMN[kind]]
            row += [error, paper_error]
            if timing:
                row += [cpu_seconds]
            row += [paper_cpu_seconds, status]
        table.rows.append(row)
    return table


def _pairwise_order(coarse: Tuple[float, float], fine: Tuple[float, float]) -> float:
    if not (coarse[1] > 0.0 and fine[1] > 0.0):
        return math.nan
    return observed_order([coarse, fine])[0]


def convergence(parameters: Parameters) -> CsvTable:
    """Errors and observed orders of a built-in problem under repeated step halving.
    Problems without an exact solution are measured against the full-memory reference.
    """
    kind, alpha, norm, named = _problem_setup(parameters)
    h, T = _float(parameters, "h"), _float(parameters, "T")
    levels = _int(parameters, "levels")
    if levels < 1:
        raise InvalidRunSpec(f"levels must be at least 1, not {levels}")
    cfg = _model(ReferenceConfig, substeps=_int(parameters, "substeps"))
    seed_mode = _seed_mode(parameters)
    errors_by_h = []
    for level in range(levels):
        step = h / 2**level
        trajectory = _run_ode(named, kind, alpha, step, T, norm, seed_mode, parameters)
        if named.exact is not None:
            error = max_error(trajectory, named.exact)
        else:
            oracle = reference(kind, named.problem, alpha, step, T, cfg, norm)
            error = trajectory_distance(trajectory, oracle)
        logger.info(f"h={step:g}: max error {error:.6e}")
        errors_by_h.append((step, error))
    table = CsvTable(header=["h", "error", "eoc"])
    previous = None
    for entry in errors_by_h:
        order = math.nan if previous is None else _pairwise_order(previous, entry)
        table.rows.append([entry[0], entry[1], order])
        previous = entry
    return table


def _remainder_bound(
    kind: DerivativeKind,
    alpha: float,
    h: float,
    n: int,
    M: float,
    norm: float,
    paper_literal: bool,
) -> float:
    if kind == DerivativeKind.Caputo:
        return caputo_remainder_bound(alpha, h, n, M, paper_literal)
    if kind == DerivativeKind.CaputoFabrizio:
        return cf_remainder_bound(alpha, h, n, M, norm)
    return abc_remainder_bound(alpha, h, n, M)


def _stability_bound(
    kind: DerivativeKind,
    alpha: float,
    h: float,
    n: int,
    rhs_bound: float,
    gap: float,
    norm: float,
) -> float:
    if kind == DerivativeKind.CaputoFabrizio:
        return cf_stability_bound(alpha, h, n, gap, norm)
    if kind == DerivativeKind.AtanganaBaleanuCaputo:
        return abc_stability_bound(alpha, h, n, rhs_bound, gap, norm)
    return math.nan


def _guarded(bound: Any, *args: Any) -> Tuple[float, bool]:
    try:
        return bound(*args), True
    except OverflowSignal:
        return math.nan, False


def bound_check(parameters: Parameters) -> CsvTable:
    """Per-step defects of the scheme on the reference solution next to the remainder
    bound, and the rhs gaps next to the state increments they control.
    """
    kind, alpha, norm, named = _problem_setup(parameters)
    h, T = _float(parameters, "h"), _float(parameters, "T")
    M = _float(parameters, "M") if "M" in parameters else named.derivative_bound
    paper_literal = _flag(parameters, "paper_literal")
    cfg = _model(ReferenceConfig, substeps=_int(parameters, "substeps"))
    problem = named.problem
    oracle = reference(kind, problem, alpha, h, T, cfg, norm)
    defects = local_defects(oracle, problem, alpha, kind, h, norm, paper_literal)
    trajectory = integrate(
        problem, alpha, kind, h, T, norm, paper_literal=paper_literal
    )
    gaps = dict(stability_gap(trajectory, problem.evaluate))
    increments = dict(state_increments(trajectory))
    rhs_bound = max(
        float(np.max(np.abs(problem.evaluate(t, y)))) for t, y in trajectory.points()
    )
    table = CsvTable(
        header=[
            "n",
            "t",
            "defect",
            "bound",
            "status",
            "gap",
            "increment",
            "stability_bound",
        ]
    )
    violations = 0
    for n, defect in defects:
        bound, available = _guarded(
            _remainder_bound, kind, alpha, h, n, M, norm, paper_literal
        )
        if not available:
            status = OVERFLOW
        elif defect <= bound:
            status = OK
        else:
            status = VIOLATED
            violations += 1
        stability, _ = _guarded(
            _stability_bound, kind, alpha, h, n, rhs_bound, gaps[n], norm
        )
        table.rows.append(
            [n, n * h, defect, bound, status, gaps[n], increments[n], stability]
        )
    if violations:
        logger.warning(f"{violations} of {len(defects)} defects exceed the bound")
    return table


def discrepancy(parameters: Parameters) -> CsvTable:
    """Published forcing against the consistent manufactured forcing at sample points."""
    cfg = _fisher_config(parameters)
    points = _int(parameters, "points")
    if points < 2:
        raise InvalidRunSpec(f"points must be at least 2, not {points}")
    xs = np.linspace(0.0, cfg.L, points)
    ts = np.linspace(0.0, cfg.T, points + 1)[1:]
    table = CsvTable(header=["x", "t", "literal", "consistent", "difference"])
    for row in forcing_discrepancy(cfg, xs.tolist(), ts.tolist()):
        table.rows.append([row.x, row.t, row.literal, row.consistent, row.difference])
    return table


def _time_index(trajectory: Trajectory, t: float) -> int:
    return int(np.argmin(np.abs(trajectory.t - t)))


def _figure_rows(
    series: str, cfg: FisherConfig, t: float, computed: Optional[Trajectory]
) -> List[List[Cell]]:
    """Profile rows of one series at time t; computed is None for a run that blew up."""
    x = grid(cfg)
    if computed is None:
        status = UNSTABLE
        time_node = t
        values = [math.nan] * len(x)
    else:
        status = OK
        index = _time_index(computed, t)
        time_node = float(computed.t[index])
        values = computed.y[index].tolist()
    exact = np.asarray(exact_solution(x, time_node, cfg.tau)).tolist()
    rows: List[List[Cell]] = []
    for node, value, exact_value in zip(x.tolist(), values, exact):
        rows.append(
            [
                series,
                cfg.kind.value,
                cfg.alpha,
                time_node,
                cfg.L,
                node,
                value,
                exact_value,
                status,
            ]
        )
    return rows


def _figure_series(
    series: str, cfg: FisherConfig, times: Sequence[float]
) -> List[List[Cell]]:
    computed: Optional[Trajectory] = None
    try:
        computed, _ = solve_fisher(cfg)
    except InstabilityDetected as e:
        logger.warning(
            f"{series} series ({cfg.kind.value}, alpha={cfg.alpha}, L={cfg.L:g})"
            f" is unstable: {e}"
        )
    rows: List[List[Cell]] = []
    for t in times:
        rows.extend(_figure_rows(series, cfg, t, computed))
    return rows


def figures(parameters: Parameters) -> CsvTable:
    """Data series behind the published profile figures: one profile per kernel at the
    final time, Caputo profiles for several orders, then profiles for several final
    times and several domain lengths. A series whose run blows up keeps its rows, with
    nan computed values and status `unstable`.
    """
    table = CsvTable(
        header=[
            "series",
            "kind",
            "alpha",
            "t",
            "L",
            "x",
            "u_computed",
            "u_exact",
            "status",
        ]
    )
    T = FIGURE_SETTINGS["T"]
    for kind in ALL_KINDS:
        cfg = _fisher_config(parameters, **FIGURE_SETTINGS, kind=kind)
        table.rows.extend(_figure_series("kernels", cfg, [T]))
    for alpha in FIGURE2_ALPHAS:
        settings = {**FIGURE_SETTINGS, "alpha": alpha, "T": 1.0}
        cfg = _fisher_config(parameters, **settings, kind=DerivativeKind.Caputo)
        table.rows.extend(_figure_series("orders", cfg, [1.0]))
    cfg = _fisher_config(parameters, **FIGURE_SETTINGS, kind=DerivativeKind.Caputo)
    table.rows.extend(_figure_series("times", cfg, FIGURE3_TIMES))
    for L in FIGURE3_LENGTHS:
        cfg = _fisher_config(
            parameters, **FIGURE_SETTINGS, L=L, kind=DerivativeKind.Caputo
        )
        table.rows.extend(_figure_series("lengths", cfg, [T]))
    return table


def run(spec: RunSpec) -> CsvTable:
    """Execute a validated run specification and return its CSV table."""
    logger.info(f"running {spec.command.value} with {spec.parameters}")
    parameters = dict(spec.parameters)
    command = spec.command
    if command == Command.SolveOde:
        return solve_ode(parameters)
    if command == Command.SolveFisher:
        return solve_fisher_profile(parameters)
    if command == Command.Table1:
        return table1(parameters)
    if command == Command.Table2:
        return table2(parameters)
    if command == Command.Convergence:
        return convergence(parameters)
    if command == Command.BoundCheck:
        return bound_check(parameters)
    if command == Command.Discrepancy:
        return discrepancy(parameters)
    if command == Command.Figures:
        return figures(parameters)
    assert False

