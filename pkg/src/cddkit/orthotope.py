"""Greedy construction and certification of maximal inscribed orthotopes.

The solver ranks the design variables, then grows an axis-aligned box
from the seed point one factor at a time, pushing each factor to its
constraint limit.  Because the surfaces are separable, each step is
solved in closed form: the budget left for a coordinate after charging
every other coordinate's worst case is a quadratic inequality whose
roots give the exact endpoints.  Every step consumes design space, so
per-constraint slack is non-increasing along the run.

A box is maximal when every face is blocked: pushing any face outward
by an epsilon fraction of the ambient width breaks feasibility, or the
face already sits on an ambient bound.  For containment-ordered
orthotopes this face-wise test is equivalent to set-theoretic
maximality, since a strictly containing box must extend some face.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .designspace import DesignProblem, FeasibleRegion
from .errors import (
    CapExceeded,
    CddError,
    InfeasibleInput,
    SchemaError,
    SeedNotContained,
)
from .surface import Interval

__all__ = [
    "Orthotope",
    "ExpansionStep",
    "FaceCheck",
    "MaximalityCertificate",
    "SolveResult",
    "OracleResult",
    "StepCheck",
    "auto_rank",
    "expand_factor",
    "solve_greedy",
    "verify_maximality",
    "oracle_solve",
    "oracle_check_steps",
]

COEFF_EPS = 1e-12
ORACLE_MAX_RESOLUTION = 201
ORACLE_MAX_DIM = 3
# exhaustive volume search is informational; capped per dimension to stay desk-scale
VOLUME_SEARCH_RESOLUTION = {1: ORACLE_MAX_RESOLUTION, 2: 41, 3: 21}


@dataclass(frozen=True)
class Orthotope:
    """Axis-aligned box: one closed interval per design variable."""

    intervals: tuple[Interval, ...]

    def __post_init__(self):
        object.__setattr__(self, "intervals", tuple(self.intervals))

    @property
    def dim(self) -> int:
        return len(self.intervals)

    def widths(self) -> tuple[float, ...]:
        return tuple(iv.width for iv in self.intervals)

    def volume(self) -> float:
        return math.prod(self.widths())

    def contains_point(self, point: Sequence[float], slack: float = 0.0) -> bool:
        return all(iv.contains(x, slack) for iv, x in zip(self.intervals, point))

    def replaced(self, j: int, interval: Interval) -> "Orthotope":
        items = list(self.intervals)
        items[j] = interval
        return Orthotope(tuple(items))

    @classmethod
    def point(cls, point: Sequence[float]) -> "Orthotope":
        return cls(tuple(Interval(float(x), float(x)) for x in point))

    def to_json(self) -> list[dict]:
        return [{"lo": iv.lo, "hi": iv.hi} for iv in self.intervals]

    @classmethod
    def from_json(cls, doc: list[dict]) -> "Orthotope":
        return cls(tuple(Interval(float(d["lo"]), float(d["hi"])) for d in doc))


@dataclass(frozen=True)
class ExpansionStep:
    """Audit record for one factor expansion."""

    factor: int
    before: Interval
    after: Interval
    binding_lo: str
    binding_hi: str


@dataclass(frozen=True)
class FaceCheck:
    """Outcome of pushing one face outward by the certification epsilon."""

    axis: int
    side: str  # "lo" or "hi"
    blocked_by: str | None  # constraint surface name, "ambient", or None if the face is free
    margin: float

    @property
    def blocked(self) -> bool:
        return self.blocked_by is not None


@dataclass(frozen=True)
class MaximalityCertificate:
    faces: tuple[FaceCheck, ...]
    epsilon: float

    @property
    def maximal(self) -> bool:
        return all(f.blocked for f in self.faces)

    def to_json(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "maximal": self.maximal,
            "faces": [
                {"axis": f.axis, "side": f.side, "blocked_by": f.blocked_by, "margin": f.margin}
                for f in self.faces
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "MaximalityCertificate":
        faces = tuple(
            FaceCheck(int(f["axis"]), str(f["side"]), f["blocked_by"], float(f["margin"]))
            for f in doc["faces"]
        )
        return cls(faces=faces, epsilon=float(doc["epsilon"]))


@dataclass(frozen=True)
class SolveResult:
    orthotope: Orthotope
    ranking: tuple[int, ...]
    steps: tuple[ExpansionStep, ...]
    certificate: MaximalityCertificate

    def to_json(self) -> dict:
        return {
            "orthotope": self.orthotope.to_json(),
            "ranking": list(self.ranking),
            "steps": [
                {
                    "factor": s.factor,
                    "before": {"lo": s.before.lo, "hi": s.before.hi},
                    "after": {"lo": s.after.lo, "hi": s.after.hi},
                    "binding": {"lo": s.binding_lo, "hi": s.binding_hi},
                }
                for s in self.steps
            ],
            "certificate": self.certificate.to_json(),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "SolveResult":
        steps = tuple(
            ExpansionStep(
                factor=int(s["factor"]),
                before=Interval(float(s["before"]["lo"]), float(s["before"]["hi"])),
                after=Interval(float(s["after"]["lo"]), float(s["after"]["hi"])),
                binding_lo=str(s["binding"]["lo"]),
                binding_hi=str(s["binding"]["hi"]),
            )
            for s in doc["steps"]
        )
        return cls(
            orthotope=Orthotope.from_json(doc["orthotope"]),
            ranking=tuple(int(i) for i in doc["ranking"]),
            steps=steps,
            certificate=MaximalityCertificate.from_json(doc["certificate"]),
        )


# --- ranking --------------------------------------------------------------

def auto_rank(problem: DesignProblem) -> tuple[int, ...]:
    """Rank variables by aggregate sensitivity at the seed.

    Score of variable j is sum_i |dz_i/dx_j at seed| * ambient width of j
    (width-weighting normalizes units); higher scores go first, ties
    break by ascending index.
    """
    widths = problem.ambient_widths()
    scores = []
    for j in range(problem.dim):
        total = sum(abs(s.sensitivity(j, problem.seed)) for s in problem.surfaces)
        scores.append(total * widths[j])
    return tuple(sorted(range(problem.dim), key=lambda j: (-scores[j], j)))


# --- one-factor expansion ---------------------------------------------------

def _quadratic_roots(a: float, b: float, c: float) -> tuple[float, float] | None:
    """Real roots of a*x**2 + b*x + c = 0 (a != 0), numerically stable, sorted."""
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return None
    sq = math.sqrt(disc)
    t = -(b + sq) / 2.0 if b >= 0.0 else -(b - sq) / 2.0
    if t == 0.0:
        r1 = r2 = 0.0
    else:
        r1 = t / a
        r2 = c / t
    return (r1, r2) if r1 <= r2 else (r2, r1)


def _admitted_interval(
    l: float,
    q: float,
    budget: float,
    accept: float,
    seed: float,
    ambient: Interval,
    floor: Interval,
) -> tuple[float, float]:
    """Largest interval around the seed where l*x + q*x**2 <= budget.

    ``accept`` (>= budget by the arithmetic noise allowance) decides
    whether the seed itself counts as inside the solution set; this
    keeps downhill growth alive when an earlier step has consumed the
    budget exactly and roundoff puts the seed a hair past the boundary.
    The result is clamped to the ambient bounds and floored at the
    current (feasible) interval, so the caller can intersect results
    across constraints without ever shrinking what it already has.
    """

    def floored(lo: float, hi: float) -> tuple[float, float]:
        return min(lo, floor.lo, seed), max(hi, floor.hi, seed)

    no_growth = floored(floor.lo, floor.hi)
    seed_ok = l * seed + q * seed * seed <= accept

    if abs(q) < COEFF_EPS and abs(l) < COEFF_EPS:
        # the coordinate has no effect on this constraint
        return (ambient.lo, ambient.hi) if accept >= 0.0 else no_growth

    if abs(q) < COEFF_EPS:
        if not seed_ok:
            return no_growth
        x0 = budget / l
        if l > 0.0:
            return floored(ambient.lo, min(ambient.hi, max(x0, seed)))
        return floored(max(ambient.lo, min(x0, seed)), ambient.hi)

    roots = _quadratic_roots(q, l, -budget)
    if q > 0.0:
        # solution set is the interval between the roots (empty if none)
        if not seed_ok or roots is None:
            return no_growth
        r1, r2 = roots
        return floored(max(ambient.lo, min(r1, seed)), min(ambient.hi, max(r2, seed)))

    # concave: solution set is everything outside the roots
    if roots is None:
        # vertex value is at or below the budget, the whole line qualifies
        return ambient.lo, ambient.hi
    if not seed_ok:
        return no_growth
    r1, r2 = roots
    # pick the ray nearest the seed
    if abs(seed - r1) <= abs(seed - r2):
        return floored(ambient.lo, min(ambient.hi, max(r1, seed)))
    return floored(max(ambient.lo, min(r2, seed)), ambient.hi)


_FLOAT_EPS = 2.220446049250313e-16


def _expand_once(
    problem: DesignProblem, box: Orthotope, j: int, bias: float
) -> tuple[Interval, str, str]:
    seed_j = problem.seed[j]
    ambient = problem.variables[j].ambient
    floor = box.intervals[j]

    lo, hi = ambient.lo, ambient.hi
    binding_lo = binding_hi = "ambient"
    for s, bound in problem.constrained_pairs():
        rest = bound - s.beta0
        magnitude = abs(bound) + abs(s.beta0)
        for k, interval in enumerate(box.intervals):
            if k != j:
                tm = s.term_extremum(k, interval, "max")[0]
                rest -= tm
                magnitude += abs(tm)
        # pessimistic slack proportional to the budget's roundoff scale
        noise = (2 * problem.dim + 3) * _FLOAT_EPS * magnitude
        tau = bias * noise
        alo, ahi = _admitted_interval(
            s.linear[j], s.quadratic[j], rest - tau, rest + 4.0 * noise, seed_j, ambient, floor
        )
        if alo > lo:
            lo, binding_lo = alo, s.name
        if ahi < hi:
            hi, binding_hi = ahi, s.name
    # the input interval is feasible by precondition; never return less
    lo = min(lo, floor.lo)
    hi = max(hi, floor.hi)
    return Interval(lo, hi), binding_lo, binding_hi


def _expand_step(problem: DesignProblem, box: Orthotope, j: int) -> tuple[Orthotope, ExpansionStep]:
    if not box.intervals[j].contains(problem.seed[j]):
        raise SeedNotContained(
            f"interval {box.intervals[j]} of factor {j} does not contain seed {problem.seed[j]}"
        )
    region = problem.region()
    before = box.intervals[j]
    interval = before
    binding_lo = binding_hi = "ambient"
    # exact budgets first; on a roundoff trip, retreat by escalating
    # noise-scaled slack, and fall back to no growth
    for bias in (0.0, 1.0, 32.0, 1024.0):
        cand, blo, bhi = _expand_once(problem, box, j, bias)
        ok, _ = region.is_box_feasible(box.replaced(j, cand).intervals)
        if ok:
            interval, binding_lo, binding_hi = cand, blo, bhi
            break
    else:
        interval, binding_lo, binding_hi = before, "numerical", "numerical"
    new_box = box.replaced(j, interval)
    step = ExpansionStep(j, before, interval, binding_lo, binding_hi)
    return new_box, step


def expand_factor(problem: DesignProblem, box: Orthotope, j: int) -> Orthotope:
    """Enlarge interval j of a feasible box to its exact constraint limit.

    Only coordinate j changes; the result stays feasible, still contains
    the seed coordinate, and cannot be extended at either endpoint by
    more than a hair without breaking a constraint or the ambient bound.
    """
    new_box, _ = _expand_step(problem, box, j)
    return new_box


# --- greedy solve -----------------------------------------------------------

def solve_greedy(
    problem: DesignProblem,
    ranking: Sequence[int] | None = None,
    eps: float | None = None,
) -> SolveResult:
    """Factor-ranked greedy maximal orthotope anchored at the seed.

    Expansion order is the explicit ranking argument, then the problem's
    own ranking, then the sensitivity auto-ranking.  Feasibility and
    slack shrinkage are asserted after every step; the result carries a
    face-wise maximality certificate.
    """
    if ranking is not None:
        order = tuple(int(i) for i in ranking)
    elif problem.ranking is not None:
        order = problem.ranking
    else:
        order = auto_rank(problem)
    if sorted(order) != list(range(problem.dim)):
        raise SchemaError(f"ranking {order} is not a permutation of 0..{problem.dim - 1}")

    region = problem.region()
    box = Orthotope.point(problem.seed)
    ok, slacks = region.is_box_feasible(box.intervals)
    if not ok:
        raise InfeasibleInput("seed point box is infeasible")

    steps = []
    for j in order:
        box, step = _expand_step(problem, box, j)
        steps.append(step)
        ok, new_slacks = region.is_box_feasible(box.intervals)
        if not ok:
            raise CddError(f"internal error: box infeasible after expanding factor {j}")
        for old, new in zip(slacks, new_slacks):
            if new > old + 1e-9 * max(1.0, abs(old)):
                raise CddError("internal error: constraint slack grew during expansion")
        slacks = new_slacks

    certificate = verify_maximality(problem, box, eps)
    return SolveResult(box, order, tuple(steps), certificate)


# --- maximality -------------------------------------------------------------

def verify_maximality(
    problem: DesignProblem, box: Orthotope, eps: float | None = None
) -> MaximalityCertificate:
    """Face-wise maximality certificate for a feasible box.

    Each of the 2N faces must either sit within eps*width of an ambient
    bound or become infeasible when pushed outward by eps*width (exact
    box-maximum test).  The certificate names the blocker per face.
    """
    epsilon = problem.tolerance if eps is None else float(eps)
    region = problem.region()
    ok, _ = region.is_box_feasible(box.intervals)
    if not ok:
        raise InfeasibleInput("maximality is only defined for feasible boxes")

    faces = []
    for j, (var, interval) in enumerate(zip(problem.variables, box.intervals)):
        push = epsilon * var.ambient.width
        for side in ("lo", "hi"):
            if side == "lo":
                room = interval.lo - var.ambient.lo
                candidate = Interval(interval.lo - push, interval.hi)
            else:
                room = var.ambient.hi - interval.hi
                candidate = Interval(interval.lo, interval.hi + push)
            if room < push:
                faces.append(FaceCheck(j, side, "ambient", margin=room))
                continue
            feasible, slacks = region.is_box_feasible(box.replaced(j, candidate).intervals)
            if feasible:
                faces.append(FaceCheck(j, side, None, margin=min(slacks) if slacks else math.inf))
            else:
                worst = min(range(len(slacks)), key=lambda i: slacks[i])
                faces.append(
                    FaceCheck(j, side, problem.constraints[worst].surface, margin=-slacks[worst])
                )
    return MaximalityCertificate(faces=tuple(faces), epsilon=epsilon)


# --- brute-force grid oracle -------------------------------------------------

@dataclass(frozen=True)
class OracleResult:
    greedy_box: Orthotope
    volume_box: Orthotope | None
    resolution: int
    ranking: tuple[int, ...]


@dataclass(frozen=True)
class StepCheck:
    factor: int
    grid_lo: float
    grid_hi: float
    stored_lo: float
    stored_hi: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return (
            abs(self.grid_lo - self.stored_lo) <= self.tolerance
            and abs(self.grid_hi - self.stored_hi) <= self.tolerance
        )


def _check_oracle_limits(problem: DesignProblem, resolution: int) -> None:
    if problem.dim > ORACLE_MAX_DIM:
        raise CapExceeded(f"grid oracle supports at most {ORACLE_MAX_DIM} variables")
    if resolution > ORACLE_MAX_RESOLUTION:
        raise CapExceeded(f"grid oracle resolution capped at {ORACLE_MAX_RESOLUTION}")
    if resolution < 2:
        raise SchemaError("grid oracle needs at least 2 points per axis")


def _candidate_feasible(region: FeasibleRegion, box: list[Interval]) -> bool:
    analytic, _ = region.is_box_feasible(box)
    if not analytic:
        return False
    # corner cross-check; implied by the analytic maximum but kept as a guard
    ranges = [(iv.lo, iv.hi) if iv.lo != iv.hi else (iv.lo,) for iv in box]
    corners = [[]]
    for r in ranges:
        corners = [c + [v] for c in corners for v in r]
    return all(region.is_point_feasible(c)[0] for c in corners)


def _grid_sweep(
    region: FeasibleRegion,
    axes: list[np.ndarray],
    box: Orthotope,
    j: int,
    seed_j: float,
) -> tuple[float, float]:
    """Widest grid-endpoint interval for axis j, other axes held as given.

    Endpoints extend independently from the seed anchor; the first
    infeasible grid point stops each sweep (the admitted set along one
    axis is an interval, so feasibility is monotone).
    """
    grid = axes[j]
    tiny = 1e-12 * max(1.0, abs(grid[-1] - grid[0]))
    work = list(box.intervals)

    hi = seed_j
    for g in grid:
        if g < seed_j - tiny:
            continue
        upper = float(max(g, seed_j))
        work[j] = Interval(min(box.intervals[j].lo, seed_j), upper)
        if _candidate_feasible(region, work):
            hi = upper
        else:
            break

    lo = seed_j
    for g in grid[::-1]:
        if g > seed_j + tiny:
            continue
        lower = float(min(g, seed_j))
        work[j] = Interval(lower, max(hi, seed_j))
        if _candidate_feasible(region, work):
            lo = lower
        else:
            break

    return lo, hi


def oracle_solve(
    problem: DesignProblem,
    resolution: int,
    include_volume_box: bool = True,
) -> OracleResult:
    """Desk-scale brute-force reference solver on the ambient lattice.

    Anchored at the seed point, factors expand over grid endpoints in
    ranking order, each candidate tested by the analytic box maximum and
    its corner evaluations.  A separate exhaustive max-volume grid box is
    returned for comparison; that search runs on an internally reduced
    grid above one dimension to stay tractable.
    """
    _check_oracle_limits(problem, resolution)
    region = problem.region()
    order = problem.ranking if problem.ranking is not None else auto_rank(problem)
    axes = region.grid_axes(resolution)

    box = Orthotope.point(problem.seed)
    if not _candidate_feasible(region, list(box.intervals)):
        raise InfeasibleInput("seed point box is infeasible")
    for j in order:
        lo, hi = _grid_sweep(region, axes, box, j, problem.seed[j])
        box = box.replaced(j, Interval(lo, hi))

    volume_box = _volume_search(problem, resolution) if include_volume_box else None
    return OracleResult(greedy_box=box, volume_box=volume_box, resolution=resolution, ranking=order)


def _volume_search(problem: DesignProblem, resolution: int) -> Orthotope:
    n = problem.dim
    k = min(resolution, VOLUME_SEARCH_RESOLUTION[n])
    region = problem.region()
    axes = region.grid_axes(k)

    pair_lists = []
    for j, grid in enumerate(axes):
        seed_j = problem.seed[j]
        a0 = int(np.searchsorted(grid, seed_j, side="right") - 1)
        a0 = max(0, min(a0, len(grid) - 1))
        b0 = int(np.searchsorted(grid, seed_j, side="left"))
        b0 = max(0, min(b0, len(grid) - 1))
        pairs = [(a, b) for a in range(a0 + 1) for b in range(b0, len(grid)) if a < b]
        if not pairs:
            pairs = [(a0, b0)]
        pair_lists.append(pairs)

    term_tables = []
    widths = []
    for j, (grid, pairs) in enumerate(zip(axes, pair_lists)):
        per_surface = []
        for s, _ in problem.constrained_pairs():
            vals = np.array(
                [s.term_extremum(j, Interval(grid[a], grid[b]), "max")[0] for a, b in pairs]
            )
            per_surface.append(vals)
        term_tables.append(per_surface)
        widths.append(np.array([grid[b] - grid[a] for a, b in pairs]))

    shape = tuple(len(p) for p in pair_lists)
    feasible = np.ones(shape, dtype=bool)
    for i, (s, bound) in enumerate(problem.constrained_pairs()):
        total = np.full(shape, s.beta0)
        for j in range(n):
            reshaped = term_tables[j][i].reshape([-1 if d == j else 1 for d in range(n)])
            total = total + reshaped
        feasible &= total <= bound

    volume = np.ones(shape)
    for j in range(n):
        volume = volume * widths[j].reshape([-1 if d == j else 1 for d in range(n)])
    volume = np.where(feasible, volume, -1.0)
    flat_best = int(np.argmax(volume))
    if volume.flat[flat_best] < 0:
        # no feasible grid box with positive volume; report the seed point box
        return Orthotope.point(problem.seed)
    best = np.unravel_index(flat_best, shape)
    intervals = []
    for j, idx in enumerate(best):
        a, b = pair_lists[j][idx]
        intervals.append(Interval(float(axes[j][a]), float(axes[j][b])))
    return Orthotope(tuple(intervals))


def oracle_check_steps(
    problem: DesignProblem, result: SolveResult, resolution: int
) -> list[StepCheck]:
    """Validate each stored expansion step against a fresh grid sweep.

    For step t the sweep runs with the stored intervals of all earlier
    steps in place, so the grid endpoint is guaranteed within one grid
    step of the exact endpoint; disagreement beyond that flags the step.
    """
    _check_oracle_limits(problem, resolution)
    region = problem.region()
    axes = region.grid_axes(resolution)
    box = Orthotope.point(problem.seed)

    checks = []
    for step in result.steps:
        j = step.factor
        lo, hi = _grid_sweep(region, axes, box, j, problem.seed[j])
        width = problem.variables[j].ambient.width
        tol = width / (resolution - 1) + 1e-9 * max(1.0, width)
        checks.append(
            StepCheck(
                factor=j,
                grid_lo=lo,
                grid_hi=hi,
                stored_lo=step.after.lo,
                stored_hi=step.after.hi,
                tolerance=tol,
            )
        )
        box = box.replaced(j, step.after)
    return checks
