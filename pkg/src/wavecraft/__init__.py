"""Exact travelling-wave solutions by (F'/F)-expansion, Riccati and Exp-function ansatzes."""
from .cases import bratu_pipeline, critical_point, fisher_pipeline, transform_bratu
from .closedform import ClosedFormSolution, assemble_F, build_u, to_exponential_form
from .errors import (
    BalanceError,
    LinearEquation,
    NoBalance,
    NoExactSolution,
    ParseError,
    TooHard,
    WavecraftError,
)
from .expansion import AnsatzPoly, GExpParams, balance_degree, build_system, g_to_f, run_ffx, run_riccati
from .expfn import AnsatzExp, BoundaryCondition, apply_boundary_conditions, exp_collect, run_expfn
from .expr import differentiate, substitute
from .parser import parse, parse_equation
from .polysolve import PolySystem, solve_system, verify_assignment
from .radical import RadicalNumber
from .twreduce import EvolutionPDE, TravellingWaveODE, reduce_to_ode
from .verify import equivalence_check, fd_check, residual

__version__ = "0.1.0"
