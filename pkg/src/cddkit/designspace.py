"""Design variables, objective constraints, and the feasible region.

Objective constraints have the single form ``z <= c``.  Pushing them
through the response surfaces induces the feasible region in design
space; membership is always computed, never stored.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import (
    BoxOutsideAmbient,
    CapExceeded,
    DimensionMismatch,
    InfeasibleSeed,
    SchemaError,
    UnknownSurfaceReference,
    UnsupportedRelation,
)
from .surface import Interval, QuadraticResponseSurface

__all__ = [
    "DesignVariable",
    "ObjectiveConstraint",
    "DesignProblem",
    "FeasibleRegion",
    "load_problem",
    "quantify_requirement",
    "grid_cap",
]

DEFAULT_TOLERANCE = 1e-6
DEFAULT_GRID_CAP = 10_000_000
GRID_CAP_ENV = "CDD_MAX_GRID"


def grid_cap() -> int:
    """Lattice size cap; the CDD_MAX_GRID environment variable overrides it."""
    raw = os.environ.get(GRID_CAP_ENV)
    if raw is None:
        return DEFAULT_GRID_CAP
    try:
        return int(raw)
    except ValueError as exc:
        raise SchemaError(f"{GRID_CAP_ENV} must be an integer, got {raw!r}") from exc


@dataclass(frozen=True)
class DesignVariable:
    """A named design factor with its measured ambient bounds."""

    name: str
    unit: str
    ambient: Interval

    def __post_init__(self):
        if not self.ambient.lo < self.ambient.hi:
            raise ValueError(f"variable {self.name!r} needs strictly ordered ambient bounds")


@dataclass(frozen=True)
class ObjectiveConstraint:
    """Upper bound on one objective: surface value <= bound."""

    surface: str
    bound: float

    def __str__(self) -> str:
        return f"{self.surface} <= {self.bound!r}"


@dataclass(frozen=True)
class DesignProblem:
    """A full constraint-driven design problem.

    The seed must lie in the ambient box and satisfy every constraint
    with slack of at least ``tolerance``; the greedy solver anchors its
    expansion there.
    """

    variables: tuple[DesignVariable, ...]
    surfaces: tuple[QuadraticResponseSurface, ...]
    constraints: tuple[ObjectiveConstraint, ...]
    seed: tuple[float, ...]
    ranking: tuple[int, ...] | None = None
    tolerance: float = DEFAULT_TOLERANCE
    name: str = "problem"

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "surfaces", tuple(self.surfaces))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "seed", tuple(float(v) for v in self.seed))
        if self.ranking is not None:
            object.__setattr__(self, "ranking", tuple(int(i) for i in self.ranking))

        n = len(self.variables)
        if n == 0:
            raise SchemaError("a problem needs at least one design variable")
        if len(self.seed) != n:
            raise DimensionMismatch(f"seed has {len(self.seed)} coordinates for {n} variables")
        for s in self.surfaces:
            if s.dim != n:
                raise DimensionMismatch(f"surface {s.name!r} has dimension {s.dim}, problem has {n}")
        names = [s.name for s in self.surfaces]
        if len(set(names)) != len(names):
            raise SchemaError("surface names must be unique")
        for c in self.constraints:
            if c.surface not in names:
                raise UnknownSurfaceReference(f"constraint references unknown surface {c.surface!r}")
        if self.ranking is not None and sorted(self.ranking) != list(range(n)):
            raise SchemaError(f"ranking {self.ranking} is not a permutation of 0..{n - 1}")
        if self.tolerance <= 0:
            raise SchemaError("tolerance must be positive")

        for var, x in zip(self.variables, self.seed):
            if not var.ambient.contains(x):
                raise InfeasibleSeed(f"seed coordinate {x} outside ambient bounds of {var.name!r}")
        for c in self.constraints:
            slack = c.bound - self.surface_by_name(c.surface).evaluate(self.seed)
            if slack < self.tolerance:
                raise InfeasibleSeed(f"seed violates {c} (slack {slack:.3g})")

    @property
    def dim(self) -> int:
        return len(self.variables)

    def surface_by_name(self, name: str) -> QuadraticResponseSurface:
        for s in self.surfaces:
            if s.name == name:
                return s
        raise UnknownSurfaceReference(f"no surface named {name!r}")

    def ambient_box(self) -> tuple[Interval, ...]:
        return tuple(v.ambient for v in self.variables)

    def ambient_widths(self) -> tuple[float, ...]:
        return tuple(v.ambient.width for v in self.variables)

    def constrained_pairs(self) -> list[tuple[QuadraticResponseSurface, float]]:
        return [(self.surface_by_name(c.surface), c.bound) for c in self.constraints]

    def region(self) -> "FeasibleRegion":
        return FeasibleRegion(self)

    def with_seed(self, seed: Sequence[float]) -> "DesignProblem":
        return replace(self, seed=tuple(seed))

    def with_ranking(self, ranking: Sequence[int] | None) -> "DesignProblem":
        return replace(self, ranking=None if ranking is None else tuple(ranking))


@dataclass(frozen=True)
class FeasibleRegion:
    """Membership queries for the constraint-induced feasible region."""

    problem: DesignProblem

    def is_point_feasible(self, point: Sequence[float]) -> tuple[bool, tuple[float, ...]]:
        """Feasibility plus the per-constraint slack vector c - z(point).

        A point outside the ambient box is infeasible no matter the slacks.
        """
        p = self.problem
        if len(point) != p.dim:
            raise DimensionMismatch(f"point has {len(point)} coordinates for dimension {p.dim}")
        slacks = tuple(bound - s.evaluate(point) for s, bound in p.constrained_pairs())
        in_ambient = all(v.ambient.contains(x) for v, x in zip(p.variables, point))
        return in_ambient and all(sl >= 0.0 for sl in slacks), slacks

    def is_box_feasible(self, box: Sequence[Interval]) -> tuple[bool, tuple[float, ...]]:
        """Exact box feasibility via per-constraint worst case.

        Returns the per-constraint worst slack c - max(z over box); the
        box is feasible iff all are >= 0.  The box must lie inside the
        ambient bounds.
        """
        p = self.problem
        if len(box) != p.dim:
            raise DimensionMismatch(f"box has {len(box)} intervals for dimension {p.dim}")
        for var, interval in zip(p.variables, box):
            if not var.ambient.contains_interval(interval):
                raise BoxOutsideAmbient(
                    f"interval [{interval.lo}, {interval.hi}] of {var.name!r} "
                    f"outside ambient [{var.ambient.lo}, {var.ambient.hi}]"
                )
        slacks = tuple(bound - s.box_extremum(box, "max")[0] for s, bound in p.constrained_pairs())
        return all(sl >= 0.0 for sl in slacks), slacks

    def violation_witness(self, box: Sequence[Interval]) -> tuple[float, ...] | None:
        """A point of the box violating some constraint, or None if feasible.

        The witness is the analytic attaining point of the violated
        surface maximum, so the check is exact.
        """
        p = self.problem
        for s, bound in p.constrained_pairs():
            worst, at = s.box_extremum(box, "max")
            if worst > bound:
                return at
        return None

    def grid_axes(self, resolution) -> list[np.ndarray]:
        p = self.problem
        counts = self._axis_counts(resolution)
        return [
            np.linspace(v.ambient.lo, v.ambient.hi, r)
            for v, r in zip(p.variables, counts)
        ]

    def _axis_counts(self, resolution) -> tuple[int, ...]:
        p = self.problem
        if isinstance(resolution, int):
            counts = (resolution,) * p.dim
        else:
            counts = tuple(int(r) for r in resolution)
            if len(counts) != p.dim:
                raise DimensionMismatch(f"{len(counts)} resolutions for dimension {p.dim}")
        if any(r < 2 for r in counts):
            raise SchemaError("grid resolution must be at least 2 per axis")
        total = 1
        for r in counts:
            total *= r
        if total > grid_cap():
            raise CapExceeded(f"lattice of {total} points exceeds cap {grid_cap()}")
        return counts

    def grid_feasible_set(self, resolution) -> np.ndarray:
        """Boolean feasibility lattice over the ambient box, row-major.

        The inclusive regular lattice has ``resolution`` points per axis
        (or one count per axis).  Entry order matches sequential
        row-major evaluation.
        """
        p = self.problem
        axes = self.grid_axes(resolution)
        shape = tuple(len(a) for a in axes)
        mask = np.ones(shape, dtype=bool)
        for s, bound in p.constrained_pairs():
            z = np.full(shape, s.beta0)
            for j, axis in enumerate(axes):
                t = s.linear[j] * axis + s.quadratic[j] * axis * axis
                z = z + t.reshape([-1 if k == j else 1 for k in range(p.dim)])
            mask &= z <= bound
        return mask


# --- loading and quantification ------------------------------------------

_PROBLEM_KEYS = {"name", "variables", "surfaces", "constraints", "seed", "ranking", "tolerance"}


def load_problem(text_or_doc) -> DesignProblem:
    """Build a validated problem from its JSON document (text or parsed dict)."""
    doc = json.loads(text_or_doc) if isinstance(text_or_doc, (str, bytes)) else text_or_doc
    if not isinstance(doc, dict):
        raise SchemaError("problem document must be a JSON object")
    unknown = set(doc) - _PROBLEM_KEYS
    if unknown:
        raise SchemaError(f"unknown problem keys: {sorted(unknown)}")
    for key in ("variables", "surfaces", "constraints", "seed"):
        if key not in doc:
            raise SchemaError(f"problem document missing key {key!r}")

    variables = []
    for entry in doc["variables"]:
        try:
            variables.append(
                DesignVariable(
                    name=str(entry["name"]),
                    unit=str(entry.get("unit", "")),
                    ambient=Interval(float(entry["lo"]), float(entry["hi"])),
                )
            )
        except KeyError as exc:
            raise SchemaError(f"variable entry missing key {exc.args[0]!r}") from exc

    surfaces = [QuadraticResponseSurface.from_json(entry) for entry in doc["surfaces"]]

    constraints = []
    for entry in doc["constraints"]:
        try:
            op = entry.get("op", "<=")
            if op != "<=":
                raise SchemaError(f"constraint operator must be '<=', got {op!r}")
            constraints.append(ObjectiveConstraint(str(entry["surface"]), float(entry["bound"])))
        except KeyError as exc:
            raise SchemaError(f"constraint entry missing key {exc.args[0]!r}") from exc

    ranking = doc.get("ranking", "auto")
    if ranking == "auto":
        ranking = None
    elif not isinstance(ranking, list):
        raise SchemaError("ranking must be 'auto' or a list of variable indices")

    try:
        seed = tuple(float(v) for v in doc["seed"])
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"malformed seed: {exc}") from exc

    return DesignProblem(
        variables=tuple(variables),
        surfaces=tuple(surfaces),
        constraints=tuple(constraints),
        seed=seed,
        ranking=None if ranking is None else tuple(ranking),
        tolerance=float(doc.get("tolerance", DEFAULT_TOLERANCE)),
        name=str(doc.get("name", "problem")),
    )


_REQUIREMENT = re.compile(
    r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*(<=|>=|==|=|<|>)\s*(-?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?)\s*$"
)


def quantify_requirement(text: str, problem: DesignProblem) -> ObjectiveConstraint:
    """Turn a one-atom requirement sentence ``NAME <= NUMBER`` into a constraint.

    This is the bridge from a requirement symbol to its interpreted
    relation: the name must resolve to a surface of the problem, and the
    only relation admitted is the upper bound.
    """
    m = _REQUIREMENT.match(text)
    if m is None:
        raise UnsupportedRelation(f"requirement {text!r} does not match 'NAME <= NUMBER'")
    name, op, bound = m.group(1), m.group(2), float(m.group(3))
    if op != "<=":
        raise UnsupportedRelation(f"relation {op!r} not supported; only '<=' is")
    if all(s.name != name for s in problem.surfaces):
        raise UnknownSurfaceReference(f"requirement names unknown surface {name!r}")
    return ObjectiveConstraint(name, bound)
