"""Basis-function families and design matrices.

Two families are supported:

* ``Polynomial(k)``: the ``k`` monomials ``1, x, ..., x**(k-1)``.
* ``Trigonometric(k)``: ``1`` plus ``cos(j*pi*x)`` and ``sin(j*pi*x)`` for
  ``j = 1..k``, i.e. ``2k + 1`` functions.

The first basis function is always the constant 1, so every family nests the
constant model.

Report labels follow the convention ``PolyK`` (highest power ``x**K``, i.e.
``Polynomial(K + 1)``) and ``TrigK`` (``Trigonometric(K)``).
"""
from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass

import numpy as np


class BasisKind(enum.Enum):
    POLYNOMIAL = "poly"
    TRIGONOMETRIC = "trig"


@dataclass(frozen=True)
class BasisFamily:
    kind: BasisKind
    order: int

    def __post_init__(self):
        if isinstance(self.order, bool) or int(self.order) != self.order or self.order < 1:
            raise ValueError(f"basis order must be a positive integer, got {self.order!r}")

    @classmethod
    def polynomial(cls, order: int) -> "BasisFamily":
        return cls(BasisKind.POLYNOMIAL, order)

    @classmethod
    def trigonometric(cls, order: int) -> "BasisFamily":
        return cls(BasisKind.TRIGONOMETRIC, order)

    @property
    def dimension(self) -> int:
        return basis_dimension(self)

    @property
    def label(self) -> str:
        if self.kind is BasisKind.POLYNOMIAL:
            return f"Poly{self.order - 1}"
        return f"Trig{self.order}"

    @classmethod
    def from_label(cls, label: str) -> "BasisFamily":
        m = re.fullmatch(r"(Poly|Trig)(\d+)", label.strip())
        if m is None:
            raise ValueError(f"not a model label: {label!r}")
        index = int(m.group(2))
        if m.group(1) == "Poly":
            return cls.polynomial(index + 1)
        return cls.trigonometric(index)


def basis_dimension(family: BasisFamily) -> int:
    """Number of basis functions ``M`` in ``family``."""
    if family.kind is BasisKind.POLYNOMIAL:
        return family.order
    return 2 * family.order + 1


def evaluate_basis(family: BasisFamily, x: float) -> np.ndarray:
    """Return the vector ``(phi_0(x), ..., phi_{M-1}(x))``."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"basis evaluation needs a finite input, got {x}")
    return build_design_matrix(family, [x])[0]


def build_design_matrix(family: BasisFamily, xs) -> np.ndarray:
    """Stack ``evaluate_basis(family, x)`` for each ``x`` in ``xs`` as rows.

    An empty ``xs`` yields a ``0 x M`` matrix.
    """
    xs = np.asarray(xs, dtype=float).reshape(-1)
    if not np.all(np.isfinite(xs)):
        bad = int(np.flatnonzero(~np.isfinite(xs))[0])
        raise ValueError(f"non-finite input at index {bad}: {xs[bad]}")
    m = basis_dimension(family)
    out = np.empty((xs.size, m))
    if family.kind is BasisKind.POLYNOMIAL:
        out[:, 0] = 1.0
        for j in range(1, m):
            out[:, j] = out[:, j - 1] * xs
    else:
        out[:, 0] = 1.0
        for j in range(1, family.order + 1):
            arg = j * np.pi * xs
            out[:, 2 * j - 1] = np.cos(arg)
            out[:, 2 * j] = np.sin(arg)
    return out


_TERM = re.compile(r"^(poly|trig):(\d+)\.\.(\d+)$")


def parse_hypothesis_spec(spec: str) -> list[BasisFamily]:
    """Parse ``"poly:0..3,trig:1..3"`` into basis families.

    Ranges are inclusive and index the report label (``poly:0..2`` gives
    Poly0, Poly1, Poly2). Raises ``ValueError`` naming the offending token.
    """
    if spec is None or not spec.strip():
        raise ValueError("empty hypothesis spec")
    families: list[BasisFamily] = []
    seen: set[str] = set()
    for raw in spec.split(","):
        token = raw.strip().lower()
        m = _TERM.match(token)
        if m is None:
            raise ValueError(f"malformed hypothesis term {raw.strip()!r}")
        kind, lo, hi = m.group(1), int(m.group(2)), int(m.group(3))
        if lo > hi:
            raise ValueError(f"empty range in term {raw.strip()!r}")
        if kind == "trig" and lo < 1:
            raise ValueError(f"trig orders start at 1 in term {raw.strip()!r}")
        for i in range(lo, hi + 1):
            fam = BasisFamily.polynomial(i + 1) if kind == "poly" else BasisFamily.trigonometric(i)
            if fam.label in seen:
                raise ValueError(f"duplicate hypothesis {fam.label} in term {raw.strip()!r}")
            seen.add(fam.label)
            families.append(fam)
    return families
