"""
Deterministic point samplers

Every sampler draws from ``numpy.random.default_rng(seed)`` (PCG64), so a
SampleSet is regenerated bit-exactly from its (family, params, seed,
strategy, count) record.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict

import numpy as np

from peakkit.shared.errors import InputError


class SampleStrategy(str, Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    ANNULAR_SHELL = "annular-shell"


@dataclass(frozen=True)
class SampleSet:
    """Sampled points together with the recipe that produced them"""
    points: np.ndarray
    seed: int
    strategy: SampleStrategy
    family: str
    params: Dict[str, Any] = field(default_factory=dict)

    @property
    def count(self) -> int:
        return int(self.points.shape[0])

    def regenerate(self) -> "SampleSet":
        return SAMPLERS[self.family](count=self.count, seed=self.seed, strategy=self.strategy, **self.params)


def uniform_disc(rng: np.random.Generator, count: int, radius: float = 1.0, closed: bool = False) -> np.ndarray:
    """Uniform points of the (open or closed) disc by rejection from the square"""
    out = np.empty(0, dtype=complex)
    while out.size < count:
        batch = max(16, 2 * (count - out.size))
        cand = rng.uniform(-1.0, 1.0, batch) + 1j * rng.uniform(-1.0, 1.0, batch)
        keep = np.abs(cand) <= 1.0 if closed else np.abs(cand) < 1.0
        out = np.concatenate([out, cand[keep]])
    return radius * out[:count]


def uniform_circle(rng: np.random.Generator, count: int) -> np.ndarray:
    return np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, count))


def uniform_annulus(rng: np.random.Generator, count: int, r_in: float, r_out: float) -> np.ndarray:
    """Area-uniform points of {r_in < |z| < r_out}"""
    r = np.sqrt(rng.uniform(r_in ** 2, r_out ** 2, count))
    r = np.clip(r, np.nextafter(r_in, np.inf), np.nextafter(r_out, -np.inf))
    return r * uniform_circle(rng, count)


def sample_polydisc(n: int, count: int, seed: int,
                    strategy: SampleStrategy = SampleStrategy.INTERIOR,
                    shell: float = 1e-2) -> SampleSet:
    """
    Samples of the unit polydisc D^n

    interior: uniform in D^n; boundary: first coordinate on the circle, the rest
    in the closed disc; annular-shell: every coordinate in 1 - shell <= |z| < 1.
    """
    rng = np.random.default_rng(seed)
    strategy = SampleStrategy(strategy)
    if strategy == SampleStrategy.INTERIOR:
        pts = np.column_stack([uniform_disc(rng, count) for _ in range(n)])
    elif strategy == SampleStrategy.BOUNDARY:
        cols = [uniform_circle(rng, count)] + [uniform_disc(rng, count, closed=True) for _ in range(n - 1)]
        pts = np.column_stack(cols)
    else:
        pts = np.column_stack([uniform_annulus(rng, count, 1.0 - shell, 1.0) for _ in range(n)])
    return SampleSet(pts, seed, strategy, "polydisc", {"n": n, "shell": shell})


def sample_annulus(r_in: float, r_out: float, count: int, seed: int,
                   strategy: SampleStrategy = SampleStrategy.INTERIOR) -> SampleSet:
    """Samples of the planar annulus; boundary puts half the points on each circle"""
    rng = np.random.default_rng(seed)
    strategy = SampleStrategy(strategy)
    if strategy == SampleStrategy.BOUNDARY:
        half = count // 2
        pts = np.concatenate([r_in * uniform_circle(rng, half), r_out * uniform_circle(rng, count - half)])
    elif strategy == SampleStrategy.ANNULAR_SHELL:
        pts = uniform_annulus(rng, count, r_out * (1.0 - 1e-2), r_out)
    else:
        pts = uniform_annulus(rng, count, r_in, r_out)
    return SampleSet(pts[:, None], seed, strategy, "annulus", {"r_in": r_in, "r_out": r_out})


def sample_half_disc(count: int, seed: int, strategy: SampleStrategy = SampleStrategy.INTERIOR) -> SampleSet:
    """Samples of {z in D : Re z > 0}"""
    rng = np.random.default_rng(seed)
    strategy = SampleStrategy(strategy)
    pts = np.empty(0, dtype=complex)
    while pts.size < count:
        cand = uniform_disc(rng, 2 * count)
        pts = np.concatenate([pts, cand[cand.real > 0]])
    return SampleSet(pts[:count, None], seed, strategy, "half_disc", {})


SAMPLERS: Dict[str, Callable[..., SampleSet]] = {
    "polydisc": sample_polydisc,
    "annulus": sample_annulus,
    "half_disc": sample_half_disc,
}


def register_sampler(family: str, fn: Callable[..., SampleSet]) -> None:
    """Make a family regenerable through SampleSet.regenerate"""
    SAMPLERS[family] = fn


@dataclass(frozen=True)
class SampleRegion:
    """A named sampler family with fixed parameters, e.g. the source of a proper map"""
    family: str
    params: Dict[str, Any] = field(default_factory=dict)

    def sample(self, count: int, seed: int, strategy: SampleStrategy = SampleStrategy.INTERIOR) -> SampleSet:
        if self.family not in SAMPLERS:
            raise InputError(f"no sampler registered for {self.family!r}")
        return SAMPLERS[self.family](count=count, seed=seed, strategy=strategy, **self.params)

    def describe(self) -> Dict[str, Any]:
        return {"family": self.family, **self.params}
