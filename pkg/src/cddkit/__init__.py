"""cddkit: constraint-driven design over pure-quadratic response surfaces.

Objective constraints (z <= c) are pushed through the surfaces into a
feasible region of the design space; the solver grows certified-maximal
axis-aligned boxes from a seed point, and the ROSETTA layer reports the
objective, variable, and sensitivity pairings.  A small model-theory
kernel (parsing, Tarski satisfaction, conceptual graphs) provides the
formal substrate for turning requirement sentences into constraints.
"""

from importlib.resources import files
from pathlib import Path

from . import designspace, modeltheory, orthotope, rosetta, surface
from .designspace import DesignProblem, FeasibleRegion, load_problem, quantify_requirement
from .orthotope import Orthotope, SolveResult, auto_rank, oracle_solve, solve_greedy, verify_maximality
from .rosetta import build_report, emit, project_orthotope
from .surface import Interval, QuadraticResponseSurface

__version__ = "0.1.0"


def data_path(name: str) -> Path:
    """Path of a bundled data file, e.g. data_path('emissions.json')."""
    return Path(str(files("cddkit").joinpath("data", name)))


__all__ = [
    "DesignProblem",
    "FeasibleRegion",
    "Interval",
    "Orthotope",
    "QuadraticResponseSurface",
    "SolveResult",
    "auto_rank",
    "build_report",
    "data_path",
    "designspace",
    "emit",
    "load_problem",
    "modeltheory",
    "oracle_solve",
    "orthotope",
    "project_orthotope",
    "quantify_requirement",
    "rosetta",
    "solve_greedy",
    "surface",
    "verify_maximality",
]
