import enum
import math
from pathlib import Path
from typing import (
    Annotated,
    Any,
    Callable,
    Dict,
    Iterator,
    List,
    Optional,
    Tuple,
    Union,
)

import numpy as np
from pydantic import BaseModel as _BaseModel
from pydantic import (
    ConfigDict,
    Field,
    TypeAdapter,
    ValidationError,
    field_validator,
    model_validator,
)

from fracab.errors import DomainError


class BaseModel(_BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


FractionalOrder = Annotated[float, Field(gt=0.0, le=1.0)]

_FRACTIONAL_ORDER = TypeAdapter(FractionalOrder)


def check_order(alpha: float) -> float:
    """Validate a fractional order, alpha in (0, 1].
    :raises: DomainError: If alpha lies outside the half-open interval.
    """
    try:
        return float(_FRACTIONAL_ORDER.validate_python(alpha))
    except ValidationError:
        raise DomainError(f"fractional order must lie in (0, 1], not {alpha!r}")


def check_unit_interval(alpha: float) -> float:
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1], not {alpha!r}")
    return float(alpha)


class DerivativeKind(enum.Enum):
    Caputo = "caputo"
    CaputoFabrizio = "cf"
    AtanganaBaleanuCaputo = "abc"


class NormalizationVariant(enum.Enum):
    Unit = "unit"
    GammaBlend = "gammablend"


class ForcingMode(enum.Enum):
    PaperLiteral = "literal"
    ConsistentManufactured = "consistent"


class SeedMode(enum.Enum):
    FractionalEuler = "euler"
    ExactSeed = "exact"


class NeumannSide(enum.Enum):
    Left = "left"
    Right = "right"


class Command(enum.Enum):
    SolveOde = "solve-ode"
    SolveFisher = "solve-fisher"
    Table1 = "table1"
    Table2 = "table2"
    Convergence = "convergence"
    BoundCheck = "bound-check"
    Discrepancy = "discrepancy"
    Figures = "figures"


def default_norm_variant(kind: DerivativeKind) -> NormalizationVariant:
    if kind == DerivativeKind.AtanganaBaleanuCaputo:
        return NormalizationVariant.GammaBlend
    return NormalizationVariant.Unit


class StepWeights(BaseModel):
    c_curr: float
    c_prev: float


class Problem(BaseModel):
    rhs: Callable[[float, np.ndarray], np.ndarray]
    y0: np.ndarray

    @field_validator("y0", mode="before")
    @classmethod
    def _as_vector(cls, value: Any) -> np.ndarray:
        return np.atleast_1d(np.asarray(value, dtype=float)).copy()

    @property
    def dimension(self) -> int:
        return int(self.y0.shape[0])

    def evaluate(self, t: float, y: np.ndarray) -> np.ndarray:
        return np.atleast_1d(np.asarray(self.rhs(t, y), dtype=float))


class StepperState(BaseModel):
    n: int = Field(ge=1)
    t: float
    y: np.ndarray
    f: np.ndarray
    f_prev: np.ndarray

    @model_validator(mode="after")
    def _same_dimension(self) -> "StepperState":
        if not self.y.shape == self.f.shape == self.f_prev.shape:
            raise ValueError(
                f"state vectors differ in shape: y{self.y.shape}, f{self.f.shape},"
                f" f_prev{self.f_prev.shape}"
            )
        return self


class Trajectory(BaseModel):
    t: np.ndarray
    y: np.ndarray

    @model_validator(mode="after")
    def _aligned(self) -> "Trajectory":
        if self.y.ndim != 2 or self.y.shape[0] != self.t.shape[0]:
            raise ValueError(
                f"trajectory values of shape {self.y.shape} do not match"
                f" {self.t.shape[0]} time nodes"
            )
        return self

    def __len__(self) -> int:
        return int(self.t.shape[0])

    def points(self) -> Iterator[Tuple[float, np.ndarray]]:
        return iter(zip(self.t.tolist(), self.y))

    @property
    def final(self) -> np.ndarray:
        return self.y[-1]

    @classmethod
    def from_points(
        cls, times: List[float], values: List[np.ndarray]
    ) -> "Trajectory":
        return cls(t=np.asarray(times, dtype=float), y=np.vstack(values))


class Monomial(BaseModel):
    coefficient: float
    exponent: float = Field(ge=1.0)


class ReferenceConfig(BaseModel):
    substeps: int = Field(default=32, ge=1)
    tol: float = Field(default=1e-13, gt=0.0)


class ErrorReport(BaseModel):
    max_error: float
    errors_by_h: List[Tuple[float, float]] = []
    observed_orders: List[float] = []
    bound_values: List[Tuple[int, float]] = []

    @model_validator(mode="after")
    def _consistent(self) -> "ErrorReport":
        steps = [h for h, _ in self.errors_by_h]
        if any(a <= b for a, b in zip(steps, steps[1:])):
            raise ValueError("errors_by_h must be sorted by decreasing h")
        if self.errors_by_h and len(self.observed_orders) != len(steps) - 1:
            raise ValueError(
                f"expected {len(steps) - 1} observed orders,"
                f" got {len(self.observed_orders)}"
            )
        return self


class FisherConfig(BaseModel):
    delta: float = Field(ge=0.0)
    tau: float = Field(ge=1.0)
    alpha: FractionalOrder
    L: float = Field(default=1.0, gt=0.0)
    N: int = Field(default=100, ge=4)
    dt: float = Field(gt=0.0)
    T: float = Field(gt=0.0)
    kind: DerivativeKind = DerivativeKind.Caputo
    forcing_mode: ForcingMode = ForcingMode.ConsistentManufactured
    norm_variant: Optional[NormalizationVariant] = None
    seed_mode: SeedMode = SeedMode.ExactSeed
    paper_literal: bool = False

    @model_validator(mode="after")
    def _two_steps(self) -> "FisherConfig":
        if self.T < 2.0 * self.dt:
            raise ValueError(f"T={self.T} must cover at least two steps of {self.dt}")
        return self

    @property
    def dx(self) -> float:
        return self.L / self.N

    @property
    def n_steps(self) -> int:
        return int(math.floor(self.T / self.dt + 1e-9))

    @property
    def resolved_norm_variant(self) -> NormalizationVariant:
        return self.norm_variant or default_norm_variant(self.kind)

    @property
    def stability_ceiling(self) -> float:
        if self.delta == 0.0:
            return math.inf
        return self.dx**2 / (2.0 * self.delta)


class DiscrepancyRow(BaseModel):
    x: float
    t: float
    literal: float
    consistent: float

    @property
    def difference(self) -> float:
        return self.literal - self.consistent


Scalar = Union[bool, int, float, str]


class RunSpec(BaseModel):
    command: Command
    parameters: Dict[str, Scalar] = {}
    output_path: Optional[Path] = None
