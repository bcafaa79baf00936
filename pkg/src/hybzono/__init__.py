"""Hybrid zonotope set computations and exact MLD reachability."""

from .sets import (
    ConstrainedZonotope,
    HybridZonotope,
    IntegerFeasibleSet,
    Zonotope,
    branch_node,
    cartesian_product,
    decompose,
    leaf,
    lift,
    load_set,
    make_box,
    save_set,
    set_from_json,
    set_to_json,
)
from .setops import (
    Halfspace,
    generalized_intersection,
    halfspace_intersection,
    linear_map,
    minkowski_sum,
)
from .lp import (
    LinearProgram,
    NodeBudgetError,
    NumericalError,
    SolveOutcome,
    SolverError,
    Status,
    lp_solve,
)
from .milp import MilpQuery, Mode, milp_solve
from .queries import (
    EmptySetError,
    contains_point,
    enumerate_integer_feasible,
    intersects_halfspace,
    is_empty,
    support,
)

__version__ = "0.1.0"
