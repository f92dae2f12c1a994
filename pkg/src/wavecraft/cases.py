"""Worked applications: Fisher travelling waves and the Bratu-Gelfand ignition problem."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import expr as E
from .closedform import EXPONENTIAL, ClosedFormSolution
from .errors import NoSignChange
from .expansion import run_ffx, run_riccati, same_branch_sets
from .expfn import BVP, AnsatzExp, BoundaryCondition, boundary_residuals, run_expfn
from .parser import parse
from .radical import RadicalNumber
from .solution import SolutionBranch
from .twreduce import EvolutionPDE, TravellingWaveODE, ode_from_expr, reduce_to_ode
from .verify import ResidualReport, equivalence_check, residual

FISHER = "u_t - u_xx - u*(1 - u)"
FISHER_RATE = "1/sqrt(6)"
METHODS = ("FFX", "RICCATI", "EXPFN")


def fisher_pde() -> EvolutionPDE:
    return EvolutionPDE(parse(FISHER))


def fisher_ode(direction: int = 1) -> TravellingWaveODE:
    return reduce_to_ode(fisher_pde(), direction)


def fisher_expfn_ansatz() -> AnsatzExp:
    return AnsatzExp(0, 2, 0, 2, rate=parse(FISHER_RATE), nonzero=("a0",))


@dataclass
class FisherReport:
    method: str
    ode: TravellingWaveODE
    branches: list[SolutionBranch]
    equivalence: dict[str, bool] = field(default_factory=dict)
    details: dict[str, str] = field(default_factory=dict)


def fisher_branches(method: str, ode: TravellingWaveODE | None = None) -> list[SolutionBranch]:
    ode = ode or fisher_ode()
    method = method.upper()
    if method == "FFX":
        return run_ffx(ode)
    if method == "RICCATI":
        return run_riccati(ode)
    if method == "EXPFN":
        return run_expfn(ode, fisher_expfn_ansatz())
    raise ValueError(f"unknown method {method}")


def fisher_pipeline(method: str = "FFX") -> FisherReport:
    """Run one method on Fisher's equation plus the cross-method equivalence checks."""
    ode = fisher_ode()
    runs = {m: fisher_branches(m, ode) for m in METHODS}
    method = method.upper()
    report = FisherReport(method, ode, runs[method])
    speed = RadicalNumber(5) / RadicalNumber.sqrt_of(6)
    ffx = {str(b.exact("c")): b for b in runs["FFX"]}
    plus, minus = ffx.get(str(speed)), ffx.get(str(-speed))
    report.equivalence["FFX~RICCATI"] = same_branch_sets(runs["FFX"], runs["RICCATI"])
    if plus is not None and minus is not None:
        sym = equivalence_check(plus.closed_form.bound(), minus.closed_form.expr, variable_map=E.neg(E.Sym(E.XI)),
                                fit="C")
        report.equivalence["FFX(+c)~FFX(-c) under xi->-xi"] = sym.equivalent
        report.details["FFX(+c)~FFX(-c) under xi->-xi"] = f"C={sym.constant:.12g}, max diff {sym.max_difference:.3g}"
    for m in ("FFX", "RICCATI"):
        ref = [b for b in runs[m] if b.exact("c") == speed]
        exp_b = [b for b in runs["EXPFN"] if b.exact("c") == speed]
        if not ref or not exp_b:
            report.equivalence[f"{m}~EXPFN"] = False
            continue
        eb = exp_b[0]
        fit = eb.assignment.free[0] if eb.assignment.free else None
        res = equivalence_check(ref[0].closed_form.bound(), eb.closed_form.expr, fit=fit)
        report.equivalence[f"{m}~EXPFN"] = res.equivalent
        if res.constant is not None:
            report.details[f"{m}~EXPFN"] = f"{fit}={res.constant:.12g}, max diff {res.max_difference:.3g}"
    return report


# -- Bratu-Gelfand ------------------------------------------------------------


@dataclass
class BratuProblem:
    n: int
    ode: TravellingWaveODE
    bcs: list[BoundaryCondition]
    parameter: str = "lambda"

    def bvp(self) -> BVP:
        return BVP(self.ode, list(self.bcs), (self.parameter,), "x", (0.0, 1.0))


def transform_bratu(n: int = 2) -> BratuProblem:
    """u'' + lambda*exp(u) = 0 rewritten through u = -n*log(v).

    The result is cleared of v**2 (of v**n when n > 2) so it is polynomial.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    x = "x"
    u = E.mul(E.Num(-n), E.func("log", E.Sym("v")))
    dep = {"v": (x,)}
    uxx = E.differentiate(E.differentiate(u, x, dep), x, dep)
    lam = E.Sym("lambda")
    eq = E.add(uxx, E.mul(lam, E.exp(u)))
    eq = E.expand(E.mul(E.power(E.Sym("v"), max(2, n)), eq))
    ode = ode_from_expr(eq, "v")
    # u'(0) = 0 <=> v'(0) = 0 and u(1) = 0 <=> v(1) = 1
    bcs = [BoundaryCondition("derivative", Fraction(0), Fraction(0)), BoundaryCondition("value", Fraction(1), Fraction(1))]
    return BratuProblem(n, ode, bcs)


@dataclass
class BifurcationCurve:
    lam: E.Expr
    a1: E.Expr
    samples: list[tuple[float, float]] = field(default_factory=list)
    critical: tuple[float, float] | None = None
    variable: str = "alpha"

    def __call__(self, alpha: float) -> float:
        return E.eval_numeric(self.lam, {self.variable: alpha})

    def slope(self) -> E.Expr:
        return E.differentiate(self.lam, self.variable)


@dataclass
class BratuResult:
    problem: BratuProblem
    branch: SolutionBranch
    curve: BifurcationCurve
    stages: list

    @property
    def family(self) -> E.Expr:
        return self.branch.closed_form.expr


def bratu_pipeline(samples: int = 31) -> BratuResult:
    """Exp-function solution family of the Bratu problem and its bifurcation curve."""
    problem = transform_bratu(2)
    stages: list = []
    branches = run_expfn(problem.bvp(), AnsatzExp(1, 1, 0, 0), stages=stages)
    br = branches[0]
    lam = br.value("lambda").to_expr()
    a1 = br.value("a1").to_expr()
    curve = BifurcationCurve(lam, a1)
    curve.samples = [(float(a), curve(float(a))) for a in np.linspace(0.1, 3.0, samples)]
    curve.critical = critical_point(curve)
    return BratuResult(problem, br, curve, stages)


def critical_point(curve: BifurcationCurve, bracket=(0.5, 2.5), tol: float = 1e-10) -> tuple[float, float]:
    """Root of d lambda/d alpha by bisection, and lambda there."""
    d = curve.slope()
    f = lambda a: E.eval_numeric(d, {curve.variable: a})
    lo, hi = bracket
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo, curve(lo)
    if fhi == 0:
        return hi, curve(hi)
    if (flo > 0) == (fhi > 0):
        raise NoSignChange(f"d lambda/d alpha has the same sign at {lo} and {hi}")
    while hi - lo >= tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            lo = hi = mid
            break
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    a = 0.5 * (lo + hi)
    return a, curve(a)


def bratu_solution_check(alpha: float, result: BratuResult | None = None, points: int = 101) -> ResidualReport:
    """Residual of the family v(x; alpha) in the transformed ODE, with both boundary conditions."""
    result = result or bratu_pipeline(samples=2)
    br = result.branch
    lam = br.value("lambda").to_expr()
    cf = ClosedFormSolution(EXPONENTIAL, result.family, "x", {"alpha": float(alpha)}, {"lambda": lam})
    bvp = result.problem.bvp()
    rep = residual(bvp.ode.expr, cf, (0.0, 1.0, points), dependent="v", variable="x")
    rep.extra.update(boundary_residuals(cf, bvp))
    return rep


def temperature(result: BratuResult) -> E.Expr:
    """u(x) = -2*log(v(x))."""
    return E.mul(E.Num(-2), E.func("log", result.family))
