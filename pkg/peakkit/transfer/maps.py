"""
Proper holomorphic maps with computable fibers

A ProperMap F: D1 -> D2 of multiplicity m hands out, for each target point
w, its fiber as an (m, source_dim) array listed with multiplicity. That is
all the transfer constructions need: pi_m of a function over the fiber is
holomorphic in w.
"""

import itertools
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from peakkit.numerics.expressions import Compose, Coordinate, HoloFunction, Power, Stack, SymCompose
from peakkit.numerics.polynomials import elementary_symmetric_batch, roots_with_retry
from peakkit.numerics.sampling import SampleRegion
from peakkit.numerics.tolerance import DEFAULT_TOLERANCES, ToleranceProfile
from peakkit.shared.errors import InputError, ScopeViolation
from peakkit.sympoly.geometry import char_poly, is_distinguished


class ProperMap:
    """
    Base class for proper maps

    Subclasses set multiplicity, source_dim, target_dim, source and target and
    implement apply, fiber and as_function.
    """
    multiplicity: int
    source_dim: int
    target_dim: int
    source: SampleRegion
    target: SampleRegion

    def apply(self, Z: np.ndarray) -> np.ndarray:
        """F on every row of Z, shape (N, target_dim)"""
        raise NotImplementedError

    def fiber(self, w) -> np.ndarray:
        """All preimages of w with multiplicity, shape (multiplicity, source_dim)"""
        raise NotImplementedError

    def as_function(self) -> HoloFunction:
        raise NotImplementedError

    def describe(self) -> Dict[str, Any]:
        raise NotImplementedError

    def __call__(self, z) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return self.apply(z[None, :])[0]

    def source_shilov(self, z, tol: ToleranceProfile = DEFAULT_TOLERANCES) -> bool:
        return on_shilov_boundary(self.source, z, tol)

    def target_shilov(self, w, tol: ToleranceProfile = DEFAULT_TOLERANCES) -> bool:
        return on_shilov_boundary(self.target, w, tol)


def on_shilov_boundary(region: SampleRegion, z, tol: ToleranceProfile = DEFAULT_TOLERANCES) -> bool:
    """
    Membership in the Shilov boundary of a catalog region

    Raises:
        ScopeViolation: for regions without a closed-form Shilov boundary
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    band = tol.boundary_band
    if region.family == "polydisc":
        return bool(np.all(np.abs(np.abs(z) - 1.0) <= band))
    if region.family == "annulus":
        r = float(abs(z[0]))
        return abs(r - region.params["r_in"]) <= band or abs(r - region.params["r_out"]) <= band
    if region.family == "symmetrized_polydisc":
        return is_distinguished(z, tol)
    raise ScopeViolation(f"no Shilov boundary test for the {region.family} family")


@dataclass(frozen=True)
class Symmetrization(ProperMap):
    """pi_n: D^n -> G_n, multiplicity n!"""
    n: int
    tol: ToleranceProfile = field(default=DEFAULT_TOLERANCES, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise InputError(f"symmetrization needs n >= 1, got {self.n}")

    @property
    def multiplicity(self) -> int:
        return int(np.prod(np.arange(1, self.n + 1)))

    @property
    def source_dim(self) -> int:
        return self.n

    @property
    def target_dim(self) -> int:
        return self.n

    @property
    def source(self) -> SampleRegion:
        return SampleRegion("polydisc", {"n": self.n})

    @property
    def target(self) -> SampleRegion:
        return SampleRegion("symmetrized_polydisc", {"n": self.n})

    def apply(self, Z):
        return elementary_symmetric_batch(np.asarray(Z, dtype=complex))

    def fiber(self, w):
        r = roots_with_retry(char_poly(w), self.tol)
        return np.array([r[list(p)] for p in itertools.permutations(range(self.n))])

    def as_function(self):
        return SymCompose(self.n, tuple(Coordinate(j) for j in range(1, self.n + 1)))

    def describe(self):
        return {"map": "symmetrization", "n": self.n}


def _power_roots(w: complex, k: int) -> np.ndarray:
    """All k-th roots of w; w = 0 gives 0 repeated k times"""
    if w == 0:
        return np.zeros(k, dtype=complex)
    base = abs(w) ** (1.0 / k) * np.exp(1j * np.angle(w) / k)
    return base * np.exp(2j * np.pi * np.arange(k) / k)


@dataclass(frozen=True)
class PowerMap(ProperMap):
    """
    (z_1^k_1, ..., z_n^k_n), multiplicity prod k_j

    The default regions are the unit polydisc on both sides; pass annulus
    regions to use the map between annuli.
    """
    exponents: Tuple[int, ...]
    source_region: Optional[SampleRegion] = None
    target_region: Optional[SampleRegion] = None

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(int(k) for k in self.exponents))
        if not self.exponents or min(self.exponents) < 1:
            raise InputError(f"power map exponents must be positive integers, got {self.exponents}")

    @property
    def multiplicity(self) -> int:
        return int(np.prod(self.exponents))

    @property
    def source_dim(self) -> int:
        return len(self.exponents)

    @property
    def target_dim(self) -> int:
        return len(self.exponents)

    @property
    def source(self) -> SampleRegion:
        return self.source_region or SampleRegion("polydisc", {"n": self.source_dim})

    @property
    def target(self) -> SampleRegion:
        return self.target_region or SampleRegion("polydisc", {"n": self.target_dim})

    def apply(self, Z):
        return np.power(np.asarray(Z, dtype=complex), np.asarray(self.exponents)[None, :])

    def fiber(self, w):
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        per_coord = [_power_roots(complex(wj), k) for wj, k in zip(w, self.exponents)]
        return np.array(list(itertools.product(*per_coord)), dtype=complex)

    def as_function(self):
        return Stack(tuple(Power(Coordinate(j + 1), k) for j, k in enumerate(self.exponents)))

    def describe(self):
        out: Dict[str, Any] = {"map": "power", "exponents": list(self.exponents)}
        if self.source_region is not None:
            out["source"] = self.source_region.describe()
        if self.target_region is not None:
            out["target"] = self.target_region.describe()
        return out


@dataclass(frozen=True)
class HalfDiscSquare(ProperMap):
    """
    z -> z^2 from the right half disc onto the disc slit along (-1, 0]

    The fiber is the principal square root. The map is proper onto the slit
    disc only, so boundary points on the slit are not images of boundary
    points in any continuous way.
    """

    multiplicity = 1
    source_dim = 1
    target_dim = 1

    @property
    def source(self) -> SampleRegion:
        return SampleRegion("half_disc", {})

    @property
    def target(self) -> SampleRegion:
        return SampleRegion("polydisc", {"n": 1})

    def apply(self, Z):
        return np.asarray(Z, dtype=complex) ** 2

    def fiber(self, w):
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        # +0.0 keeps a -0.0 imaginary part from picking the lower branch
        return np.array([[np.sqrt(complex(w[0].real, w[0].imag + 0.0))]])

    def as_function(self):
        return Power(Coordinate(1), 2)

    def describe(self):
        return {"map": "half_disc_square"}


@dataclass(frozen=True)
class Composition(ProperMap):
    """maps[-1] o ... o maps[0]; multiplicities multiply"""
    maps: Tuple[ProperMap, ...]

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        if not self.maps:
            raise InputError("composition needs at least one map")
        for left, right in zip(self.maps, self.maps[1:]):
            if left.target_dim != right.source_dim:
                raise InputError(f"cannot compose {left.describe()} into {right.describe()}")

    @property
    def multiplicity(self) -> int:
        return int(np.prod([f.multiplicity for f in self.maps]))

    @property
    def source_dim(self) -> int:
        return self.maps[0].source_dim

    @property
    def target_dim(self) -> int:
        return self.maps[-1].target_dim

    @property
    def source(self) -> SampleRegion:
        return self.maps[0].source

    @property
    def target(self) -> SampleRegion:
        return self.maps[-1].target

    def apply(self, Z):
        out = np.asarray(Z, dtype=complex)
        for f in self.maps:
            out = f.apply(out)
        return out

    def fiber(self, w):
        points = np.atleast_1d(np.asarray(w, dtype=complex))[None, :]
        for f in reversed(self.maps):
            points = np.vstack([f.fiber(p) for p in points])
        return points

    def as_function(self):
        out = self.maps[0].as_function()
        for f in self.maps[1:]:
            out = Compose(f.as_function(), out)
        return out

    def describe(self):
        return {"map": "composition", "maps": [f.describe() for f in self.maps]}


def annulus_square(r_in: float = 0.5, r_out: float = 1.0) -> PowerMap:
    """z -> z^2 from {r_in < |z| < r_out} onto {r_in^2 < |w| < r_out^2}"""
    return PowerMap(
        (2,),
        SampleRegion("annulus", {"r_in": r_in, "r_out": r_out}),
        SampleRegion("annulus", {"r_in": r_in ** 2, "r_out": r_out ** 2}),
    )


def build_map(spec: Dict[str, Any]) -> ProperMap:
    """ProperMap from its describe() dictionary"""
    kind = spec.get("map")
    if kind == "symmetrization":
        return Symmetrization(int(spec["n"]))
    if kind == "power":
        regions: Sequence[Optional[SampleRegion]] = [
            SampleRegion(spec[k]["family"], {p: v for p, v in spec[k].items() if p != "family"})
            if k in spec else None
            for k in ("source", "target")
        ]
        return PowerMap(tuple(spec["exponents"]), *regions)
    if kind == "half_disc_square":
        return HalfDiscSquare()
    if kind == "composition":
        return Composition(tuple(build_map(m) for m in spec["maps"]))
    raise InputError(f"unknown proper map {kind!r}")
