"""
JSON documents accepted by the command line

Domain specs, proper-map descriptors and function recipes are validated with
pydantic before anything is built. Validation failures surface as
SpecValidationError carrying the dotted field path (``pieces.0.A``), JSON
syntax errors as SpecValidationError naming line and column.
"""

import json
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError, field_validator, model_validator

from peakkit.cconvex.body import ConvexBody, weak_peak
from peakkit.numerics.expressions import HoloFunction, from_description
from peakkit.numerics.sampling import SampleRegion
from peakkit.reinhardt.domain import ReinhardtDomain
from peakkit.shared.errors import InputError, SpecValidationError
from peakkit.sympoly.peak import peak_at
from peakkit.transfer.maps import ProperMap, build_map


# Domains -------------------------------------------------------------------

class PolydiscSpec(BaseModel):
    """The unit polydisc D^n"""
    type: Literal["polydisc"]
    n: int = Field(..., ge=1, description="Complex dimension")

    @property
    def dim(self) -> int:
        return self.n

    def build(self) -> None:
        return None

    def region(self) -> SampleRegion:
        return SampleRegion("polydisc", {"n": self.n})


class SymmetrizedPolydiscSpec(BaseModel):
    """The symmetrized polydisc G_n"""
    type: Literal["symmetrized_polydisc"]
    n: int = Field(..., ge=1, le=12, description="Complex dimension")

    @property
    def dim(self) -> int:
        return self.n

    def build(self) -> None:
        return None

    def region(self) -> SampleRegion:
        return SampleRegion("symmetrized_polydisc", {"n": self.n})


class LogPieceSpec(BaseModel):
    """One log polyhedron {x : A x <= b}"""
    A: List[List[float]] = Field(..., min_length=1)
    b: List[float] = Field(..., min_length=1)

    @field_validator("A")
    @classmethod
    def validate_rows(cls, v):
        if len({len(row) for row in v}) != 1 or not v[0]:
            raise ValueError("rows of A must be nonempty and of equal length")
        return v

    @model_validator(mode="after")
    def validate_shape(self):
        if len(self.A) != len(self.b):
            raise ValueError(f"A has {len(self.A)} rows but b has {len(self.b)} entries")
        return self


class ReinhardtSpec(BaseModel):
    """A Reinhardt domain given by the pieces of its logarithmic image"""
    type: Literal["reinhardt"]
    pieces: List[LogPieceSpec] = Field(..., min_length=1)
    meets_axes: List[bool]
    name: str = Field("reinhardt", description="Label used in logs and reports")

    @model_validator(mode="after")
    def validate_dimension(self):
        n = len(self.pieces[0].A[0])
        if any(len(p.A[0]) != n for p in self.pieces):
            raise ValueError("log pieces have different ambient dimensions")
        if len(self.meets_axes) != n:
            raise ValueError(f"meets_axes needs {n} flags, got {len(self.meets_axes)}")
        return self

    @property
    def dim(self) -> int:
        return len(self.meets_axes)

    def build(self) -> ReinhardtDomain:
        return ReinhardtDomain.from_rows([p.model_dump() for p in self.pieces], self.meets_axes, self.name)

    def region(self) -> SampleRegion:
        return SampleRegion("reinhardt", self.build().sampler_params())


class ConvexRowSpec(BaseModel):
    """Half-space <nu, x> <= c in interleaved real coordinates"""
    nu: List[float] = Field(..., min_length=2)
    c: float


class BallSpec(BaseModel):
    center: List[float] = Field(..., description="Interleaved real coordinates of the center")
    radius: float = Field(..., gt=0)


class ConvexSpec(BaseModel):
    """A bounded convex domain: half-spaces, optionally intersected with a ball"""
    type: Literal["convex"]
    rows: List[ConvexRowSpec] = Field(default_factory=list)
    complex_dim: int = Field(..., ge=1)
    ball: Optional[BallSpec] = None
    name: str = "convex"

    @model_validator(mode="after")
    def validate_widths(self):
        width = 2 * self.complex_dim
        for i, row in enumerate(self.rows):
            if len(row.nu) != width:
                raise ValueError(f"rows.{i}.nu has {len(row.nu)} entries, expected {width}")
        if self.ball is not None and len(self.ball.center) != width:
            raise ValueError(f"ball.center has {len(self.ball.center)} entries, expected {width}")
        if not self.rows and self.ball is None:
            raise ValueError("a convex domain needs rows or a ball")
        return self

    @property
    def dim(self) -> int:
        return self.complex_dim

    def build(self) -> ConvexBody:
        rows = [r.nu for r in self.rows] or np.empty((0, 2 * self.complex_dim))
        center = None if self.ball is None else self.ball.center
        radius = None if self.ball is None else self.ball.radius
        return ConvexBody.from_rows(rows, [r.c for r in self.rows], self.complex_dim, center, radius, self.name)

    def region(self) -> SampleRegion:
        return SampleRegion("convex", self.build().sampler_params())


DomainSpec = Annotated[
    Union[PolydiscSpec, SymmetrizedPolydiscSpec, ReinhardtSpec, ConvexSpec],
    Field(discriminator="type"),
]
_DOMAIN_ADAPTER = TypeAdapter(DomainSpec)


# Proper maps ---------------------------------------------------------------

class RegionSpec(BaseModel):
    """A sampler family plus its parameters"""
    model_config = ConfigDict(extra="allow")
    family: str


class SymmetrizationSpec(BaseModel):
    map: Literal["symmetrization"]
    n: int = Field(..., ge=1, le=12)


class PowerMapSpec(BaseModel):
    map: Literal["power"]
    exponents: List[int] = Field(..., min_length=1)
    source: Optional[RegionSpec] = None
    target: Optional[RegionSpec] = None

    @field_validator("exponents")
    @classmethod
    def validate_exponents(cls, v):
        if any(k < 1 for k in v):
            raise ValueError("exponents must be positive")
        return v


class HalfDiscSquareSpec(BaseModel):
    map: Literal["half_disc_square"]


class CompositionSpec(BaseModel):
    map: Literal["composition"]
    maps: List["MapSpec"] = Field(..., min_length=1)


MapSpec = Annotated[
    Union[SymmetrizationSpec, PowerMapSpec, HalfDiscSquareSpec, CompositionSpec],
    Field(discriminator="map"),
]
CompositionSpec.model_rebuild()
_MAP_ADAPTER = TypeAdapter(MapSpec)


# Function recipes ----------------------------------------------------------

class ConstructRecipe(BaseModel):
    """A function built by a named construction rather than spelled out as a tree"""
    construct: Literal["peak_at", "weak_peak"]
    point: List[Union[float, List[float]]] = Field(..., min_length=1)
    domain: Optional[ConvexSpec] = Field(None, description="Body for weak_peak")

    @model_validator(mode="after")
    def validate_domain(self):
        if self.construct == "weak_peak" and self.domain is None:
            raise ValueError("weak_peak needs a convex domain")
        return self


# Loading -------------------------------------------------------------------

_TAGS = {"polydisc", "symmetrized_polydisc", "reinhardt", "convex",
         "symmetrization", "power", "half_disc_square", "composition"}


def _field_path(err: Dict[str, Any], discriminator: str) -> str:
    """Dotted location of a pydantic error with the union tags left out"""
    loc = [str(p) for p in err.get("loc", ()) if not (isinstance(p, str) and p in _TAGS)]
    if loc:
        return ".".join(loc)
    return discriminator if str(err.get("type", "")).startswith("union_tag") else "<document>"


def _raise_validation(exc: ValidationError, discriminator: str) -> None:
    err = exc.errors()[0]
    raise SpecValidationError(err.get("msg", "invalid value"), _field_path(err, discriminator)) from exc


def read_json(path: Union[str, Path]) -> Any:
    """Parse a JSON file; syntax errors name line and column"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecValidationError(f"line {e.lineno} column {e.colno}: {e.msg}", str(path)) from e


def parse_domain(data: Any):
    """Validate a domain document"""
    try:
        return _DOMAIN_ADAPTER.validate_python(data)
    except ValidationError as e:
        _raise_validation(e, "type")


def load_domain(path: Union[str, Path]):
    return parse_domain(read_json(path))


def parse_map(data: Any) -> ProperMap:
    """Validate a proper-map descriptor and build the map"""
    try:
        spec = _MAP_ADAPTER.validate_python(data)
    except ValidationError as e:
        _raise_validation(e, "map")
    return build_map(spec.model_dump(exclude_none=True))


def load_map(path: Union[str, Path]) -> ProperMap:
    return parse_map(read_json(path))


def parse_point(values: Sequence[Union[float, Sequence[float], str]]) -> np.ndarray:
    """Points as numbers, [re, im] pairs or complex literals"""
    out = []
    for v in values:
        if isinstance(v, str):
            try:
                out.append(complex(v.strip().replace(" ", "").replace("i", "j")))
            except ValueError as e:
                raise InputError(f"cannot read {v!r} as a complex number") from e
        elif isinstance(v, (list, tuple)):
            if len(v) != 2:
                raise InputError(f"complex pairs need two entries, got {v!r}")
            out.append(complex(float(v[0]), float(v[1])))
        else:
            out.append(complex(v))
    return np.asarray(out, dtype=complex)


def parse_function(data: Any) -> HoloFunction:
    """
    A function from either an expression tree ({"node": ...}) or a recipe
    ({"construct": "peak_at" | "weak_peak", "point": ...})
    """
    if not isinstance(data, dict):
        raise SpecValidationError("a function must be a JSON object", "")
    if "construct" in data:
        try:
            recipe = ConstructRecipe.model_validate(data)
        except ValidationError as e:
            _raise_validation(e, "construct")
        point = parse_point(recipe.point)
        if recipe.construct == "peak_at":
            return peak_at(point)
        return weak_peak(recipe.domain.build(), point)
    try:
        return from_description(data, map_builder=parse_map)
    except (KeyError, TypeError, ValueError) as e:
        raise SpecValidationError(f"malformed expression tree: {e}", "node") from e


def load_function(path: Union[str, Path]) -> HoloFunction:
    return parse_function(read_json(path))
