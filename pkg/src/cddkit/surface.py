"""Pure-quadratic response surfaces.

A surface maps an N-dimensional design point to one objective value:

    z = beta0 + sum_j (linear[j] * x[j] + quadratic[j] * x[j] ** 2)

There are no cross terms, so the surface is separable per coordinate.
Separability is what makes extrema over axis-aligned boxes exact: each
coordinate term is extremized independently over its interval and the
results are summed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import DimensionMismatch, SchemaError

__all__ = ["Interval", "QuadraticResponseSurface", "load_surfaces"]


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi]; lo == hi is allowed and means a point."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError(f"interval bounds must be finite, got [{self.lo}, {self.hi}]")
        if self.lo > self.hi:
            raise ValueError(f"interval lower bound {self.lo} exceeds upper bound {self.hi}")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= x <= self.hi + slack

    def contains_interval(self, other: "Interval", slack: float = 0.0) -> bool:
        return self.lo - slack <= other.lo and other.hi <= self.hi + slack

    def __iter__(self) -> Iterator[float]:
        yield self.lo
        yield self.hi


@dataclass(frozen=True)
class QuadraticResponseSurface:
    """One design objective as a pure-quadratic function of the design point."""

    name: str
    unit: str
    beta0: float
    linear: tuple[float, ...]
    quadratic: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "linear", tuple(float(v) for v in self.linear))
        object.__setattr__(self, "quadratic", tuple(float(v) for v in self.quadratic))
        if len(self.linear) != len(self.quadratic):
            raise DimensionMismatch(
                f"surface {self.name!r}: {len(self.linear)} linear vs "
                f"{len(self.quadratic)} quadratic coefficients"
            )
        values = (self.beta0, *self.linear, *self.quadratic)
        if not all(math.isfinite(v) for v in values):
            raise ValueError(f"surface {self.name!r} has non-finite coefficients")

    @property
    def dim(self) -> int:
        return len(self.linear)

    def _check_dim(self, n: int) -> None:
        if n != self.dim:
            raise DimensionMismatch(f"surface {self.name!r} expects {self.dim} coordinates, got {n}")

    def term(self, j: int, x: float) -> float:
        """Value of the coordinate-j contribution linear[j]*x + quadratic[j]*x**2."""
        return self.linear[j] * x + self.quadratic[j] * x * x

    def term_vertex(self, j: int) -> float | None:
        """Stationary point of the coordinate-j term, or None if the term is linear."""
        q = self.quadratic[j]
        if q == 0.0:
            return None
        return -self.linear[j] / (2.0 * q)

    def term_extremum(self, j: int, interval: Interval, mode: str = "max") -> tuple[float, float]:
        """Exact extremum of the coordinate-j term over an interval.

        Candidates are the two endpoints plus the vertex when it falls
        inside.  Ties prefer the lower coordinate.  Returns (value, x).
        """
        candidates = [interval.lo]
        vertex = self.term_vertex(j)
        if vertex is not None and interval.lo < vertex < interval.hi:
            candidates.append(vertex)
        if interval.hi != interval.lo:
            candidates.append(interval.hi)
        best_x = candidates[0]
        best_v = self.term(j, best_x)
        for x in candidates[1:]:
            v = self.term(j, x)
            if (mode == "max" and v > best_v) or (mode == "min" and v < best_v):
                best_v, best_x = v, x
        return best_v, best_x

    def evaluate(self, point: Sequence[float]) -> float:
        self._check_dim(len(point))
        acc = self.beta0
        for j, x in enumerate(point):
            acc += self.term(j, x)
        return acc

    def gradient(self, point: Sequence[float]) -> tuple[float, ...]:
        """Partial derivatives linear[j] + 2*quadratic[j]*x[j], exact."""
        self._check_dim(len(point))
        return tuple(self.linear[j] + 2.0 * self.quadratic[j] * x for j, x in enumerate(point))

    def sensitivity(self, j: int, point: Sequence[float]) -> float:
        """Slope of this objective along coordinate j at a design point."""
        self._check_dim(len(point))
        if not 0 <= j < self.dim:
            raise IndexError(f"coordinate index {j} out of range for dimension {self.dim}")
        return self.linear[j] + 2.0 * self.quadratic[j] * point[j]

    def box_extremum(self, box: Sequence[Interval], mode: str = "max") -> tuple[float, tuple[float, ...]]:
        """Exact extremum over an axis-aligned box, with an attaining point.

        Exactness follows from separability; no sampling is involved.
        """
        if mode not in ("max", "min"):
            raise ValueError(f"mode must be 'max' or 'min', got {mode!r}")
        self._check_dim(len(box))
        total = self.beta0
        point = []
        for j, interval in enumerate(box):
            value, x = self.term_extremum(j, interval, mode)
            total += value
            point.append(x)
        return total, tuple(point)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "unit": self.unit,
            "beta0": self.beta0,
            "linear": list(self.linear),
            "quadratic": list(self.quadratic),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "QuadraticResponseSurface":
        try:
            return cls(
                name=str(doc["name"]),
                unit=str(doc.get("unit", "")),
                beta0=float(doc["beta0"]),
                linear=tuple(float(v) for v in doc["linear"]),
                quadratic=tuple(float(v) for v in doc["quadratic"]),
            )
        except KeyError as exc:
            raise SchemaError(f"surface document missing key {exc.args[0]!r}") from exc
        except (TypeError, ValueError) as exc:
            if isinstance(exc, DimensionMismatch):
                raise
            raise SchemaError(f"malformed surface document: {exc}") from exc


def load_surfaces(text_or_doc) -> list[QuadraticResponseSurface]:
    """Load a JSON array of surface documents (text, path content, or parsed list)."""
    doc = json.loads(text_or_doc) if isinstance(text_or_doc, str) else text_or_doc
    if not isinstance(doc, list):
        raise SchemaError("expected a JSON array of surface documents")
    return [QuadraticResponseSurface.from_json(item) for item in doc]
