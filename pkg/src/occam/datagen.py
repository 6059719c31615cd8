"""Synthetic regression and coin data, plus CSV ingestion.

Randomness comes from numpy's PCG64 bit generator seeded explicitly, so a
given seed yields the same data on every platform.

The presets are reconstructions of the three regression scenarios and the
bent-coin run that motivate this package. Their coefficients and noise levels
are invented; only the qualitative behaviour is meant to carry over.
"""
from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .basis import BasisFamily, basis_dimension, build_design_matrix


class Ordering(enum.Enum):
    SORTED_BY_X = "sorted"
    RANDOM = "random"


def make_rng(seed: int) -> np.random.Generator:
    if int(seed) != seed or seed < 0:
        raise ValueError(f"seed must be a non-negative integer, got {seed!r}")
    return np.random.Generator(np.random.PCG64(int(seed)))


@dataclass(frozen=True)
class GeneratorSpec:
    family: BasisFamily
    weights: tuple[float, ...]
    noise_sigma: float
    x_range: tuple[float, float] = (0.0, 1.0)
    n_points: int = 50
    seed: int = 0
    ordering: Ordering = Ordering.SORTED_BY_X
    x_sampling: str = "equispaced"

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if len(self.weights) != basis_dimension(self.family):
            raise ValueError(
                f"{self.family.label} needs {basis_dimension(self.family)} weights, got {len(self.weights)}"
            )
        lo, hi = self.x_range
        if not lo < hi:
            raise ValueError(f"x_range must satisfy lo < hi, got {self.x_range}")
        if self.noise_sigma < 0:
            raise ValueError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if self.n_points < 0:
            raise ValueError(f"n_points must be >= 0, got {self.n_points}")
        if self.x_sampling not in ("equispaced", "uniform"):
            raise ValueError(f"x_sampling must be 'equispaced' or 'uniform', got {self.x_sampling!r}")


def generate(spec: GeneratorSpec) -> np.ndarray:
    """Return an ``(n_points, 2)`` array of ``(x, t)`` rows in streaming order."""
    rng = make_rng(spec.seed)
    lo, hi = spec.x_range
    n = spec.n_points
    if spec.x_sampling == "equispaced":
        xs = np.linspace(lo, hi, n)
    else:
        xs = np.sort(rng.uniform(lo, hi, n))
    if spec.ordering is Ordering.RANDOM:
        xs = xs[rng.permutation(n)]
    clean = build_design_matrix(spec.family, xs) @ np.asarray(spec.weights)
    ts = clean + spec.noise_sigma * rng.standard_normal(n)
    return np.column_stack([xs, ts]) if n else np.zeros((0, 2))


def generate_coin(p_heads: float, n: int, seed: int) -> np.ndarray:
    """Bernoulli tosses with ``0`` = heads (probability ``p_heads``)."""
    if not 0.0 <= p_heads <= 1.0:
        raise ValueError(f"p_heads must be in [0, 1], got {p_heads}")
    u = make_rng(seed).random(int(n))
    return np.where(u < p_heads, 0, 1).astype(np.int8)


def load_csv(path) -> np.ndarray:
    """Read ``x,t`` rows; an optional header line is detected and skipped."""
    text = Path(path).read_text()
    return parse_csv(text)


def parse_csv(text: str) -> np.ndarray:
    rows = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise ValueError(f"line {lineno}: expected 2 columns, got {len(row)}")
        try:
            x, t = float(row[0]), float(row[1])
        except ValueError:
            if lineno == 1 and not rows and [c.strip().lower() for c in row] == ["x", "t"]:
                continue
            raise ValueError(f"line {lineno}: cannot parse {','.join(row)!r} as numbers") from None
        if not (np.isfinite(x) and np.isfinite(t)):
            raise ValueError(f"line {lineno}: non-finite value")
        rows.append((x, t))
    return np.array(rows, dtype=float).reshape(-1, 2)


def dataset_to_csv(data) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "t"])
    for x, t in np.asarray(data, dtype=float).reshape(-1, 2):
        w.writerow([format(x, ".17g"), format(t, ".17g")])
    return buf.getvalue()


@dataclass(frozen=True)
class RegressionPreset:
    name: str
    generator: GeneratorSpec
    models: str
    sigma: float
    sigma_w: float
    description: str

    def spec(self, seed: int) -> GeneratorSpec:
        return replace(self.generator, seed=seed)


@dataclass(frozen=True)
class CoinPreset:
    name: str
    p_heads: float
    n: int
    description: str


PRESETS: dict[str, RegressionPreset | CoinPreset] = {
    "fig4": RegressionPreset(
        "fig4",
        GeneratorSpec(BasisFamily.polynomial(3), (1.0, 0.0, 1.5), noise_sigma=0.1, x_range=(0.0, 1.0), n_points=50),
        models="poly:0..3",
        sigma=0.1,
        sigma_w=10.0,
        description="slight quadratic growth, low noise (reconstruction)",
    ),
    "fig5": RegressionPreset(
        "fig5",
        GeneratorSpec(
            BasisFamily.trigonometric(3),
            (0.0, 0.0, 1.0, 0.0, 0.5, 0.0, 0.5),
            noise_sigma=1.0,
            x_range=(-4.0, 4.0),
            n_points=200,
        ),
        models="poly:0..3,trig:1..3,trig:7..7",
        sigma=1.0,
        sigma_w=10.0,
        description="trigonometric order 3, high noise, long range (reconstruction)",
    ),
    "fig6": RegressionPreset(
        "fig6",
        GeneratorSpec(
            BasisFamily.trigonometric(3),
            (0.0, 0.0, 1.0, 0.0, 0.5, 0.0, 0.5),
            noise_sigma=0.1,
            x_range=(0.0, 2.0),
            n_points=80,
        ),
        models="poly:0..3,trig:1..3",
        sigma=0.1,
        sigma_w=10.0,
        description="trigonometric order 3, low noise, one full cycle (reconstruction)",
    ),
    "fig3-coin": CoinPreset("fig3-coin", p_heads=0.55, n=1000, description="bent coin, 1000 tosses"),
}
