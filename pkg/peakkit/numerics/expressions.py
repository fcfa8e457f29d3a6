"""
Evaluable expression trees for constructed holomorphic functions

Every node evaluates on a batch of points: an (N, dim) complex array goes
in, an (N, k) complex array comes out, k being the node's output dimension.
Scalar-valued nodes have k = 1. Single-point evaluation wraps a batch of one.

Evaluation is total on the declared domain of each node. Anything else
(poles, branch cuts, vanishing coordinates under negative exponents,
dimension mismatches) raises a DomainViolation naming the first bad row.
"""

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Dict, Protocol, Sequence, Tuple, Union

import numpy as np

from peakkit.numerics.polynomials import elementary_symmetric_batch
from peakkit.shared.errors import BranchViolation, DomainViolation, PoleHit

Number = Union[complex, float, int]


def _cjson(c: Number) -> list:
    c = complex(c)
    return [c.real, c.imag]


def _first(mask: np.ndarray) -> int:
    return int(np.flatnonzero(mask)[0])


class FiberMap(Protocol):
    """What FiberCompose needs from a proper map"""
    multiplicity: int
    source_dim: int
    target_dim: int

    def fiber(self, w: np.ndarray) -> np.ndarray: ...

    def describe(self) -> Dict[str, Any]: ...


class HoloFunction:
    """Base class of expression-tree nodes"""

    output_dim: int = 1

    def batch(self, Z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def describe(self) -> Dict[str, Any]:
        raise NotImplementedError

    def children(self) -> Tuple["HoloFunction", ...]:
        return ()

    def depth(self) -> int:
        kids = self.children()
        return 1 + (max(k.depth() for k in kids) if kids else 0)

    def __call__(self, z):
        return evaluate(self, z)


def _as_batch(Z) -> np.ndarray:
    Z = np.asarray(Z, dtype=complex)
    if Z.ndim == 1:
        Z = Z[:, None]
    return Z


def _require_dim(Z: np.ndarray, dim: int, node: str) -> None:
    if Z.shape[1] < dim:
        raise DomainViolation(f"{node} needs {dim} coordinates, got {Z.shape[1]}")


@dataclass(frozen=True)
class Coordinate(HoloFunction):
    """z_j, with j counted from 1"""
    j: int

    def batch(self, Z):
        _require_dim(Z, self.j, "Coordinate")
        return Z[:, self.j - 1:self.j]

    def describe(self):
        return {"node": "Coordinate", "j": self.j}


@dataclass(frozen=True)
class Constant(HoloFunction):
    c: complex

    def batch(self, Z):
        return np.full((Z.shape[0], 1), complex(self.c))

    def describe(self):
        return {"node": "Constant", "c": _cjson(self.c)}


@dataclass(frozen=True)
class LinearScale(HoloFunction):
    """c * f"""
    c: complex
    inner: HoloFunction

    @property
    def output_dim(self):
        return self.inner.output_dim

    def batch(self, Z):
        return complex(self.c) * self.inner.batch(Z)

    def children(self):
        return (self.inner,)

    def describe(self):
        return {"node": "LinearScale", "c": _cjson(self.c), "inner": self.inner.describe()}


@dataclass(frozen=True)
class Monomial(HoloFunction):
    """
    c * exp(log_scale) * z^alpha with integer alpha, evaluated through logarithms of moduli

    log_scale keeps large Laurent exponents from underflowing before the
    constant is applied.
    """
    c: complex
    alpha: Tuple[int, ...]
    log_scale: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(int(a) for a in self.alpha))

    def batch(self, Z):
        _require_dim(Z, len(self.alpha), "Monomial")
        rows = Z.shape[0]
        log_mod = np.full(rows, float(self.log_scale))
        phase = np.zeros(rows)
        vanishing = np.zeros(rows, dtype=bool)
        for j, a in enumerate(self.alpha):
            if a == 0:
                continue
            zj = Z[:, j]
            zero = zj == 0
            if a < 0 and zero.any():
                raise DomainViolation(
                    f"Monomial with exponent {a} at vanishing coordinate {j + 1}", _first(zero)
                )
            with np.errstate(divide="ignore"):
                log_mod = log_mod + a * np.log(np.abs(zj))
            phase = phase + a * np.angle(zj)
            vanishing |= zero
        with np.errstate(over="ignore", invalid="ignore"):
            value = complex(self.c) * np.exp(log_mod + 1j * phase)
        value[vanishing] = 0.0
        return value[:, None]

    def describe(self):
        out = {"node": "Monomial", "c": _cjson(self.c), "alpha": list(self.alpha)}
        if self.log_scale:
            out["log_scale"] = float(self.log_scale)
        return out


@dataclass(frozen=True)
class FractionalMap(HoloFunction):
    """
    The map z -> z~(lambda) from C^n to C^(n-1):

        z~_j = ((n - j) z_j + lambda (j + 1) z_{j+1}) / (n + lambda z_1)
    """
    n: int
    lam: complex
    pole_tol: float = 1e-9

    @property
    def output_dim(self):
        return self.n - 1

    def batch(self, Z):
        _require_dim(Z, self.n, "FractionalMap")
        denom = self.n + self.lam * Z[:, 0]
        pole = np.abs(denom) <= self.pole_tol
        if pole.any():
            raise PoleHit(f"n + lambda*z1 vanishes for n={self.n}, lambda={self.lam}", _first(pole))
        j = np.arange(1, self.n)
        numer = (self.n - j) * Z[:, :self.n - 1] + self.lam * (j + 1) * Z[:, 1:self.n]
        return numer / denom[:, None]

    def describe(self):
        return {"node": "FractionalMap", "n": self.n, "lambda": _cjson(self.lam), "pole_tol": self.pole_tol}


@dataclass(frozen=True)
class MobiusAtom(HoloFunction):
    """conj(a) * w for a unimodular a; a is normalized onto the circle"""
    a: complex

    def __post_init__(self):
        if self.a == 0:
            raise DomainViolation("MobiusAtom needs a nonzero point")
        object.__setattr__(self, "a", complex(self.a) / abs(self.a))

    def batch(self, Z):
        return np.conj(self.a) * Z[:, 0:1]

    def describe(self):
        return {"node": "MobiusAtom", "a": _cjson(self.a)}


@dataclass(frozen=True)
class DiscAutomorphism(HoloFunction):
    """(w - c) / (1 - conj(c) w) applied to a scalar inner function, |c| < 1"""
    center: complex
    inner: HoloFunction

    def __post_init__(self):
        if abs(self.center) >= 1.0:
            raise DomainViolation(f"disc automorphism center must satisfy |c| < 1, got {self.center}")

    def batch(self, Z):
        w = self.inner.batch(Z)[:, 0]
        c = complex(self.center)
        denom = 1.0 - np.conj(c) * w
        pole = denom == 0
        if pole.any():
            raise PoleHit("disc automorphism pole", _first(pole))
        return ((w - c) / denom)[:, None]

    def children(self):
        return (self.inner,)

    def describe(self):
        return {"node": "DiscAutomorphism", "center": _cjson(self.center), "inner": self.inner.describe()}


@dataclass(frozen=True)
class ExpInvLog(HoloFunction):
    """
    exp(1 / Log(g / d)) with the principal logarithm; g must stay in Re < 0

    g = 0 exactly is the point the function peaks at and evaluates to its
    limit 1.
    """
    inner: HoloFunction
    d: float

    def batch(self, Z):
        g = self.inner.batch(Z)[:, 0]
        apex = g == 0
        bad = ~(g.real < 0.0) & ~apex
        if bad.any():
            raise BranchViolation(
                f"ExpInvLog argument has nonnegative real part {g[_first(bad)]!r}", _first(bad)
            )
        u = np.where(apex, -1.0, g / self.d)
        u = u.real + 1j * (u.imag + 0.0)  # -0.0 imaginary parts would flip the branch
        out = np.exp(1.0 / np.log(u))
        out[apex] = 1.0
        return out[:, None]

    def children(self):
        return (self.inner,)

    def describe(self):
        return {"node": "ExpInvLog", "d": float(self.d), "inner": self.inner.describe()}


@dataclass(frozen=True)
class AffinePairing(HoloFunction):
    """w = <z - a, nu> = sum_j (z_j - a_j) conj(nu_j)"""
    nu: Tuple[complex, ...]
    a: Tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "nu", tuple(complex(v) for v in self.nu))
        object.__setattr__(self, "a", tuple(complex(v) for v in self.a))

    def batch(self, Z):
        _require_dim(Z, len(self.a), "AffinePairing")
        diff = Z[:, :len(self.a)] - np.asarray(self.a)
        return (diff @ np.conj(np.asarray(self.nu)))[:, None]

    def describe(self):
        return {
            "node": "AffinePairing",
            "nu": [_cjson(v) for v in self.nu],
            "a": [_cjson(v) for v in self.a],
        }


@dataclass(frozen=True)
class SymCompose(HoloFunction):
    """pi_m applied to the values of m scalar functions"""
    m: int
    functions: Tuple[HoloFunction, ...]

    def __post_init__(self):
        object.__setattr__(self, "functions", tuple(self.functions))
        if len(self.functions) != self.m:
            raise ValueError(f"SymCompose expects {self.m} functions, got {len(self.functions)}")

    @property
    def output_dim(self):
        return self.m

    def batch(self, Z):
        values = np.column_stack([f.batch(Z)[:, 0] for f in self.functions])
        return elementary_symmetric_batch(values)

    def children(self):
        return self.functions

    def describe(self):
        return {"node": "SymCompose", "m": self.m, "functions": [f.describe() for f in self.functions]}


@dataclass(frozen=True)
class FiberCompose(HoloFunction):
    """w -> pi_m({h(x) : x in fiber(F, w)}), m the multiplicity of F"""
    proper_map: Any
    inner: HoloFunction

    @property
    def multiplicity(self) -> int:
        return int(self.proper_map.multiplicity)

    @property
    def output_dim(self):
        return self.multiplicity

    def batch(self, Z):
        m = self.multiplicity
        out = np.empty((Z.shape[0], m), dtype=complex)
        for row in range(Z.shape[0]):
            points = self.proper_map.fiber(Z[row, :self.proper_map.target_dim])
            if points.shape[0] != m:
                raise DomainViolation(f"fiber has {points.shape[0]} points, expected {m}", row)
            values = self.inner.batch(points)[:, 0]
            out[row] = elementary_symmetric_batch(values[None, :])[0]
        return out

    def children(self):
        return (self.inner,)

    def describe(self):
        return {
            "node": "FiberCompose",
            "map": self.proper_map.describe(),
            "multiplicity": self.multiplicity,
            "inner": self.inner.describe(),
        }


@dataclass(frozen=True)
class Compose(HoloFunction):
    """outer(inner(z)); the inner output feeds the outer coordinates"""
    outer: HoloFunction
    inner: HoloFunction

    @property
    def output_dim(self):
        return self.outer.output_dim

    def batch(self, Z):
        return self.outer.batch(self.inner.batch(Z))

    def children(self):
        return (self.outer, self.inner)

    def describe(self):
        return {"node": "Compose", "outer": self.outer.describe(), "inner": self.inner.describe()}


@dataclass(frozen=True)
class Product(HoloFunction):
    factors: Tuple[HoloFunction, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))

    def batch(self, Z):
        out = np.ones((Z.shape[0], 1), dtype=complex)
        for f in self.factors:
            out = out * f.batch(Z)[:, 0:1]
        return out

    def children(self):
        return self.factors

    def describe(self):
        return {"node": "Product", "factors": [f.describe() for f in self.factors]}


@dataclass(frozen=True)
class Sum(HoloFunction):
    terms: Tuple[HoloFunction, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    @property
    def output_dim(self):
        return self.terms[0].output_dim

    def batch(self, Z):
        out = self.terms[0].batch(Z)
        for t in self.terms[1:]:
            out = out + t.batch(Z)
        return out

    def children(self):
        return self.terms

    def describe(self):
        return {"node": "Sum", "terms": [t.describe() for t in self.terms]}


@dataclass(frozen=True)
class Power(HoloFunction):
    """f^k for a nonnegative integer k"""
    inner: HoloFunction
    k: int

    def __post_init__(self):
        if int(self.k) < 0:
            raise ValueError("Power exponent must be nonnegative")
        object.__setattr__(self, "k", int(self.k))

    def batch(self, Z):
        return np.power(self.inner.batch(Z)[:, 0:1], self.k)

    def children(self):
        return (self.inner,)

    def describe(self):
        return {"node": "Power", "k": self.k, "inner": self.inner.describe()}


@dataclass(frozen=True)
class Stack(HoloFunction):
    """Vector-valued (f_1, ..., f_k) of scalar functions"""
    functions: Tuple[HoloFunction, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "functions", tuple(self.functions))

    @property
    def output_dim(self):
        return len(self.functions)

    def batch(self, Z):
        return np.column_stack([f.batch(Z)[:, 0] for f in self.functions])

    def children(self):
        return self.functions

    def describe(self):
        return {"node": "Stack", "functions": [f.describe() for f in self.functions]}


def identity(n: int) -> Stack:
    """The identity map of C^n as a Stack of coordinates"""
    return Stack(tuple(Coordinate(j) for j in range(1, n + 1)))


def evaluate_batch(f: HoloFunction, Z) -> np.ndarray:
    """
    Evaluate f on every row of Z

    Returns:
        (N,) array for scalar f, (N, m) array for vector-valued f
    """
    out = f.batch(_as_batch(Z))
    return out[:, 0] if f.output_dim == 1 else out


def evaluate(f: HoloFunction, z: Sequence[Number]):
    """
    Evaluate f at a single point

    Returns:
        complex for scalar f, complex vector otherwise

    Raises:
        DomainViolation: z outside the declared domain
        BranchViolation: an ExpInvLog argument left the open left half-plane
    """
    out = f.batch(np.atleast_1d(np.asarray(z, dtype=complex))[None, :])[0]
    return complex(out[0]) if f.output_dim == 1 else out


def fingerprint(f: HoloFunction) -> str:
    """SHA-256 of the canonical JSON description of the tree"""
    payload = json.dumps(f.describe(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _c(v) -> complex:
    return complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v)


def from_description(d: Dict[str, Any], map_builder=None) -> HoloFunction:
    """
    Rebuild a tree from its describe() dictionary

    Args:
        d: the description
        map_builder: turns a FiberCompose "map" entry back into a proper map

    Raises:
        ValueError: on an unknown node or a FiberCompose without map_builder
    """
    node = d.get("node")
    sub = lambda key: from_description(d[key], map_builder)  # noqa: E731
    many = lambda key: tuple(from_description(x, map_builder) for x in d[key])  # noqa: E731
    if node == "Coordinate":
        return Coordinate(int(d["j"]))
    if node == "Constant":
        return Constant(_c(d["c"]))
    if node == "LinearScale":
        return LinearScale(_c(d["c"]), sub("inner"))
    if node == "Monomial":
        return Monomial(_c(d["c"]), tuple(d["alpha"]), float(d.get("log_scale", 0.0)))
    if node == "FractionalMap":
        return FractionalMap(int(d["n"]), _c(d["lambda"]), float(d.get("pole_tol", 1e-9)))
    if node == "MobiusAtom":
        return MobiusAtom(_c(d["a"]))
    if node == "DiscAutomorphism":
        return DiscAutomorphism(_c(d["center"]), sub("inner"))
    if node == "ExpInvLog":
        return ExpInvLog(sub("inner"), float(d["d"]))
    if node == "AffinePairing":
        return AffinePairing(tuple(_c(v) for v in d["nu"]), tuple(_c(v) for v in d["a"]))
    if node == "SymCompose":
        return SymCompose(int(d["m"]), many("functions"))
    if node == "FiberCompose":
        if map_builder is None:
            raise ValueError("FiberCompose needs a map_builder")
        return FiberCompose(map_builder(d["map"]), sub("inner"))
    if node == "Compose":
        return Compose(sub("outer"), sub("inner"))
    if node == "Product":
        return Product(many("factors"))
    if node == "Sum":
        return Sum(many("terms"))
    if node == "Power":
        return Power(sub("inner"), int(d["k"]))
    if node == "Stack":
        return Stack(many("functions"))
    raise ValueError(f"unknown expression node {node!r}")
