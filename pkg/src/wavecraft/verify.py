"""Independent numerical oracles for candidate solutions."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.optimize import least_squares

from . import expr as E
from .closedform import ClosedFormSolution
from .errors import EvaluationError, UnboundSymbol

DEFAULT_GRID = (-5.0, 5.0, 101)
SINGULAR_THRESHOLD = 1e-8
RESIDUAL_TOL = 1e-10


@dataclass
class ResidualReport:
    interval: tuple[float, float]
    points: int
    max_residual: float
    skipped: int = 0
    tolerance: float = RESIDUAL_TOL
    extra: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        ok = self.max_residual < self.tolerance and self.skipped < 0.1 * self.points
        return ok and all(v < self.tolerance for k, v in self.extra.items() if k.startswith("bc"))

    def to_json(self) -> dict:
        out = {
            "max": self.max_residual,
            "grid": {"interval": list(self.interval), "points": self.points},
            "skipped": self.skipped,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }
        if self.extra:
            out["extra"] = dict(self.extra)
        return out


def grid_points(grid=DEFAULT_GRID) -> np.ndarray:
    lo, hi, n = grid
    return np.linspace(lo, hi, int(n))


def _num(v) -> E.Expr:
    return v if isinstance(v, E.Expr) else E.Num(v)


def numeric_bindings(bindings: Mapping) -> dict[str, float]:
    """Floats for a binding map; expression values may refer to the plain numbers."""
    out = {k: float(v) for k, v in bindings.items() if not isinstance(v, E.Expr)}
    for k, v in bindings.items():
        if isinstance(v, E.Expr):
            out[k] = E.eval_numeric(v, out)
    return out


def substituted_residual(equation: E.Expr, profile: E.Expr, dependent: str, variable: str,
                         speed: str = "c", direction: int = 1) -> E.Expr:
    """Plug a profile u(variable) into an equation, differentiating symbolically.

    Jets in x/t are handled through xi = x - direction*speed*t when the profile
    is written in ``xi``; jets in ``variable`` itself act directly.
    """
    rules: dict = {}
    moving = None
    for d in E.derivatives(equation):
        if d.fn != dependent:
            continue
        if all(v in (variable, E.XI) for v in d.variables):
            out = profile
            for _ in d.variables:
                out = E.differentiate(out, variable)
            rules[d] = out
        else:
            if moving is None:
                moving = E.substitute(profile, {variable: E.sub(E.Sym("x"), E.mul(E.Num(direction), E.Sym(speed), E.Sym("t")))})
            out = moving
            for v in d.variables:
                out = E.differentiate(out, v)
            rules[d] = out
    if moving is not None:
        rules[E.Sym(dependent)] = moving
    else:
        rules[E.Sym(dependent)] = profile
    return E.substitute(equation, rules)


def _singular(dens: Sequence[E.Expr], point: dict) -> bool:
    for d in dens:
        try:
            if abs(E.eval_numeric(d, point)) < SINGULAR_THRESHOLD:
                return True
        except EvaluationError:
            return True
    return False


def _eval_guarded(e: E.Expr, dens: Sequence[E.Expr], point: dict) -> float | None:
    if _singular(dens, point):
        return None
    try:
        return E.eval_numeric(e, point)
    except EvaluationError:
        return None


def residual(equation: E.Expr, solution: ClosedFormSolution | E.Expr, grid=DEFAULT_GRID,
             constants: Mapping | None = None, dependent: str = "u", variable: str | None = None,
             speed: str = "c", direction: int = 1, tolerance: float = RESIDUAL_TOL) -> ResidualReport:
    """Max |equation| over a grid after substituting the solution profile.

    ``constants`` binds free constants and any other symbols of the equation
    (wave speed, parameters).  Points where a denominator is below 1e-8 in
    magnitude are skipped.  Near a pole the terms of the equation can be
    huge, so each point's residual is divided by its largest term when that
    exceeds 1.
    """
    if isinstance(solution, ClosedFormSolution):
        values = {k: v for k, v in solution.bindings.items()}
        values.update(solution.constants)
        variable = variable or solution.variable
        profile = solution.expr
    else:
        values = {}
        variable = variable or E.XI
        profile = solution
    values.update(constants or {})
    floats = numeric_bindings(values)
    exact_rules = {k: v for k, v in values.items() if not isinstance(v, float)}
    rules = {k: _num(v) for k, v in exact_rules.items() if k != variable}
    profile = E.substitute(profile, rules) if rules else profile
    eq = E.substitute(equation, rules) if rules else equation
    res = substituted_residual(eq, profile, dependent, variable, speed, direction)
    free = E.free_symbols(res) - {variable, "x", "t"}
    missing = free - floats.keys()
    if missing:
        raise UnboundSymbol(f"unbound constants in residual: {sorted(missing)}")
    dens = E.denominators(res)
    terms = res.terms if isinstance(res, E.Add) else (res,)
    pts = grid_points(grid)
    worst, skipped = 0.0, 0
    for p in pts:
        point = dict(floats)
        point.update({variable: float(p), "x": float(p), "t": 0.0})
        vals = None if _singular(dens, point) else [_eval_guarded(t, (), point) for t in terms]
        if vals is None or any(v is None or not math.isfinite(v) for v in vals):
            skipped += 1
            continue
        scale = max(1.0, max(abs(v) for v in vals))
        worst = max(worst, abs(math.fsum(vals)) / scale)
    return ResidualReport((float(pts[0]), float(pts[-1])), len(pts), worst, skipped, tolerance)


def fd_check(e, var: str, points: Sequence[float], bindings: Mapping | None = None, h: float = 1e-6) -> float:
    """Max relative error between the symbolic derivative and a central difference."""
    e = E.as_expr(e)
    d = E.differentiate(e, var)
    worst = 0.0
    base = dict(bindings or {})
    for p in points:
        at = lambda x: E.eval_numeric(e, {**base, var: x})
        sym = E.eval_numeric(d, {**base, var: p})
        fd = (at(p + h) - at(p - h)) / (2 * h)
        err = abs(sym - fd)
        if sym != 0.0:
            err /= abs(sym)
        worst = max(worst, err)
    return worst


@dataclass
class EquivalenceResult:
    equivalent: bool
    max_difference: float
    constant: float | None = None
    diagnostics: str = ""

    def __bool__(self):
        return self.equivalent


def equivalence_check(u1: E.Expr, u2: E.Expr, variable: str = E.XI,
                      variable_map: E.Expr | Callable | None = None, fit: str | None = None,
                      grid=DEFAULT_GRID, tolerance: float = 1e-9,
                      bindings: Mapping | None = None) -> EquivalenceResult:
    """Do two profiles coincide after a change of variable and a one-constant fit?

    ``variable_map`` is substituted for ``variable`` in ``u2`` (e.g. ``-xi``);
    ``fit`` names a free constant of ``u2`` fitted by least squares.
    """
    u1, u2 = E.as_expr(u1), E.as_expr(u2)
    if variable_map is not None:
        mapped = variable_map(E.Sym(variable)) if callable(variable_map) else E.as_expr(variable_map)
        u2 = E.substitute(u2, {variable: mapped})
    base = numeric_bindings(bindings or {})
    xs = grid_points(grid)
    d1, d2 = E.denominators(u1), E.denominators(u2)

    def sample(e, dens, k=None):
        out = []
        for x in xs:
            pt = dict(base)
            pt[variable] = float(x)
            if k is not None:
                pt[fit] = k
            out.append(_eval_guarded(e, dens, pt))
        return out

    ref = sample(u1, d1)

    def diff(k):
        other = sample(u2, d2, k)
        return np.array([a - b for a, b in zip(ref, other) if a is not None and b is not None])

    if fit is None:
        r = diff(None)
        m = float(np.max(np.abs(r))) if r.size else math.inf
        return EquivalenceResult(m < tolerance, m)
    best = None
    for start in (1.0, -1.0, 0.5, 2.0, 0.1, 10.0, -0.5, -2.0):
        try:
            fitres = least_squares(lambda p: diff(p[0]), [start], xtol=1e-15, ftol=1e-15, gtol=1e-15)
        except (ValueError, EvaluationError):
            continue
        m = float(np.max(np.abs(fitres.fun))) if fitres.fun.size else math.inf
        if best is None or m < best[0]:
            best = (m, float(fitres.x[0]))
        if m < tolerance:
            break
    if best is None:
        return EquivalenceResult(False, math.inf, None, "constant fit diverged from every start")
    ok = best[0] < tolerance
    return EquivalenceResult(ok, best[0], best[1], "" if ok else f"best fit {fit}={best[1]:.6g} leaves {best[0]:.3g}")
