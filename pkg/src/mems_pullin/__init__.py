"""Bifurcation diagram and pull-in load of a 1-D MEMS membrane with Robin edges."""

from .branch_core import (BranchPoint, SteadyProfile, big_A, branch_point, invert_phi,
                          nonlocal_I, phi, reconstruct_profile)
from .errors import (BracketError, ConsistencyError, ConvergenceError, DomainError,
                     InstabilityError, IntegrationError, MemsError, SingularityError)
from .pull_in import (DiagramTable, PullInSolution, SolveResult, E_func, F_func, P_alpha,
                      diagram_sweep, find_s_star, solve_for_lambda)

__version__ = "0.1.0"
