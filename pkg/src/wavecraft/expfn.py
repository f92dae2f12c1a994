"""Exp-function method: rational-exponential ansatz and boundary conditions.

The profile is v = sum_j a_j E**j / sum_j b_j E**j with E = exp(rate*xi).
Derivatives are taken in E-space (d/dxi = rate*E*d/dE), the ODE is cleared of
the common denominator and each power of E gives one polynomial equation.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import expr as E
from .closedform import EXPONENTIAL, ClosedFormSolution, compact_exponential
from .errors import EvaluationError, NoExactSolution, SingularLocation, ZeroDenominator
from .poly import Poly, RatFunc, to_ratfunc
from .polysolve import Assignment, PolySystem, solve_system
from .radical import RadicalNumber
from .solution import SolutionBranch, bind_branch
from .twreduce import TravellingWaveODE
from .verify import DEFAULT_GRID, ResidualReport, numeric_bindings, residual

log = logging.getLogger(__name__)

EVAR = "E"


def coeff_name(prefix: str, j: int) -> str:
    return f"{prefix}m{-j}" if j < 0 else f"{prefix}{j}"


@dataclass(frozen=True)
class AnsatzExp:
    """Numerator exponents -cn..dn, denominator exponents -p..q.

    ``fixed`` pins coefficients to numbers (by default the lowest denominator
    coefficient is 1); ``nonzero`` lists coefficients forced nonzero (by
    default the top numerator coefficient).  ``rate`` is either the name of an
    unknown or a fixed expression.
    """

    cn: int = 1
    dn: int = 1
    p: int = 1
    q: int = 1
    rate: object = "alpha"
    fixed: tuple = ()
    nonzero: tuple = ()

    def __post_init__(self):
        if min(self.cn, self.dn, self.p, self.q) < 0:
            raise ValueError("exponent ranges must be non-negative")

    @classmethod
    def from_ranges(cls, ranges: Sequence[int], **kw) -> "AnsatzExp":
        cn, dn, p, q = ranges
        return cls(cn, dn, p, q, **kw)

    @property
    def numerator(self) -> tuple[str, ...]:
        return tuple(coeff_name("a", j) for j in range(-self.cn, self.dn + 1))

    @property
    def denominator(self) -> tuple[str, ...]:
        return tuple(coeff_name("b", j) for j in range(-self.p, self.q + 1))

    @property
    def pinned(self) -> dict[str, RadicalNumber]:
        if self.fixed:
            return {k: RadicalNumber.coerce(v) for k, v in self.fixed}
        return {self.denominator[0]: RadicalNumber(1)}

    @property
    def forced_nonzero(self) -> tuple[str, ...]:
        return tuple(self.nonzero) if self.nonzero else (self.numerator[-1],)

    @property
    def rate_unknown(self) -> str | None:
        return self.rate if isinstance(self.rate, str) else None

    def rate_expr(self) -> E.Expr:
        return E.Sym(self.rate) if isinstance(self.rate, str) else E.as_expr(self.rate)

    def rate_poly(self) -> Poly:
        if isinstance(self.rate, str):
            return Poly.var(self.rate)
        r = to_ratfunc(E.as_expr(self.rate))
        if not r.is_constant():
            raise ValueError("a fixed rate must be a number")
        return Poly.const(r.constant_value())

    def unknowns(self) -> tuple[str, ...]:
        names = [n for n in self.numerator + self.denominator if n not in self.pinned]
        if self.rate_unknown:
            names.append(self.rate_unknown)
        return tuple(names)

    def polys(self) -> tuple[Poly, Poly]:
        """(N, D) as polynomials in E, both multiplied by E**max(cn, p)."""
        return self._pair(max(self.cn, self.p))

    def _pair(self, s: int) -> tuple[Poly, Poly]:
        num = Poly()
        pins = self.pinned
        for j, n in zip(range(-self.cn, self.dn + 1), self.numerator):
            c = Poly.const(pins[n]) if n in pins else Poly.var(n)
            num = num + c * Poly.var(EVAR, j + s)
        den = Poly()
        for j, n in zip(range(-self.p, self.q + 1), self.denominator):
            c = Poly.const(pins[n]) if n in pins else Poly.var(n)
            den = den + c * Poly.var(EVAR, j + s)
        return num, den

    def profile(self, values: dict | None = None, variable: str = E.XI) -> E.Expr:
        """The ansatz as an expression in ``variable``, with optional coefficient values."""
        values = values or {}
        ex = E.exp(E.mul(self.rate_expr(), E.Sym(variable)))
        pins = self.pinned

        def c(n):
            if n in values:
                v = values[n]
                return v.to_expr() if isinstance(v, RatFunc) else E.as_expr(v)
            return E.Num(pins[n]) if n in pins else E.Sym(n)

        num = E.add(*(E.mul(c(n), E.power(ex, j)) for j, n in zip(range(-self.cn, self.dn + 1), self.numerator)))
        den = E.add(*(E.mul(c(n), E.power(ex, j)) for j, n in zip(range(-self.p, self.q + 1), self.denominator)))
        if isinstance(den, E.Num) and den.value == 0:
            raise ZeroDenominator("ansatz denominator vanishes identically")
        return E.mul(num, E.power(den, -1))


def _d(p: Poly, rate: Poly) -> Poly:
    # d/dxi of a polynomial in E
    return rate * Poly.var(EVAR) * p.diff(EVAR)


def exp_collect(ode: TravellingWaveODE, ansatz: AnsatzExp, allow_stationary: bool = False) -> PolySystem:
    """Coefficient equations over powers of E after clearing the ansatz denominator."""
    jets = ode.jets()
    r = to_ratfunc(ode.expr)
    if r.den.variables() & jets.keys():
        from .errors import NonPolynomial

        raise NonPolynomial("equation is not polynomial in the jets")
    p = r.num
    s = max(ansatz.cn, ansatz.p)
    N, D = ansatz._pair(s)
    if D.is_zero():
        raise ZeroDenominator("ansatz denominator vanishes identically")
    rate = ansatz.rate_poly()
    order = max(jets.values())
    # k-th derivative = nums[k] / D**(k+1)
    nums = [N]
    dD = _d(D, rate)
    for k in range(order):
        nk = nums[-1]
        nums.append(_d(nk, rate) * D - dD * nk * (k + 1))
    weight = {}
    for m in p.terms:
        weight[m] = sum((jets[v] + 1) * k for v, k in m if v in jets)
    J = max(weight.values(), default=0)
    cleared = Poly()
    powers = {0: Poly.const(1)}

    def dpow(n):
        if n not in powers:
            powers[n] = D ** n
        return powers[n]

    for m, c in p.terms.items():
        term = Poly({tuple((v, k) for v, k in m if v not in jets): c})
        for v, k in m:
            if v in jets:
                term = term * nums[jets[v]] ** k
        cleared = cleared + term * dpow(J - weight[m])
    coeffs = cleared.coeffs_in(EVAR)
    eqs, labels = [], []
    for k in sorted(coeffs, reverse=True):
        eqs.append(coeffs[k])
        labels.append(f"E^{k - s * J}")
    unknowns = list(ansatz.unknowns())
    speed_free = ode.speed in p.variables()
    if speed_free:
        unknowns.append(ode.speed)
    params = sorted(p.variables() - jets.keys() - set(unknowns))
    nonzero = [Poly.var(n) for n in ansatz.forced_nonzero if n not in ansatz.pinned]
    if ansatz.rate_unknown:
        nonzero.append(Poly.var(ansatz.rate_unknown))
    if speed_free and not allow_stationary:
        nonzero.append(Poly.var(ode.speed))
    return PolySystem(eqs, tuple(unknowns), tuple(params), nonzero, labels)


@dataclass(frozen=True)
class BoundaryCondition:
    """v(location) = target (kind "value") or v'(location) = target (kind "derivative")."""

    kind: str
    location: Fraction
    target: Fraction
    order: int = 0

    def __post_init__(self):
        if self.kind not in ("value", "derivative"):
            raise ValueError(f"unknown boundary condition kind {self.kind}")
        if self.order == 0 and self.kind == "derivative":
            object.__setattr__(self, "order", 1)

    def __str__(self):
        primes = "'" * self.order
        return f"v{primes}({self.location}) = {self.target}"

    def residual_expr(self, profile: E.Expr, variable: str) -> E.Expr:
        e = profile
        for _ in range(self.order):
            e = E.differentiate(e, variable)
        at = E.substitute(e, {variable: E.Num(Fraction(self.location))})
        return E.sub(at, E.Num(Fraction(self.target)))


def apply_boundary_conditions(family: E.Expr, bcs: Sequence[BoundaryCondition], unknowns: Sequence[str],
                              variable: str = E.XI) -> PolySystem:
    """One equation per condition, polynomial in ``unknowns``.

    Every other symbol (and every exponential of them) is treated as a
    parameter of the system.
    """
    eqs, labels, params = [], [], set()
    for bc in bcs:
        try:
            r = to_ratfunc(bc.residual_expr(family, variable))
        except EvaluationError as exc:
            raise SingularLocation(f"{bc} cannot be evaluated: {exc}") from exc
        eqs.append(r.num)
        labels.append(str(bc))
        params |= r.variables()
    params -= set(unknowns)
    return PolySystem(eqs, tuple(unknowns), tuple(sorted(params)), [], labels)


@dataclass
class BVP:
    """An ODE with boundary conditions and parameters to be solved for."""

    ode: TravellingWaveODE
    bcs: list[BoundaryCondition]
    solve_for: tuple[str, ...] = ()
    variable: str = "x"
    domain: tuple[float, float] = (0.0, 1.0)


@dataclass
class ExpStage:
    system: PolySystem
    solutions: list[Assignment] = field(default_factory=list)


def _carried_nonzero(system: PolySystem, a: Assignment) -> list[Poly]:
    out = []
    for c in system.nonzero:
        r = RatFunc(c).subs(a.values)
        out.append(r.num)
    for v in a.values.values():
        if not v.den.is_constant():
            out.append(v.den)
    return [p for p in out if not p.is_constant()]


def _compose(first: Assignment, second: Assignment, names: Sequence[str]) -> Assignment:
    """Values of ``names`` after applying ``second`` on top of ``first``."""
    vals = dict(second.values)
    out = {}
    for n in names:
        if n in second.values:
            out[n] = second.values[n]
        elif n in first.values:
            v = first.values[n]
            out[n] = v.subs(vals) if v.variables() & vals.keys() else v
    free = tuple(n for n in names if n not in out)
    return Assignment(out, free, list(first.relations) + list(second.relations),
                      list(first.conditions) + list(second.conditions))


def run_expfn(problem: TravellingWaveODE | BVP, ansatz: AnsatzExp | Sequence[int] | None = None,
              allow_stationary: bool = False, grid=None, verify: bool = True,
              stages: list | None = None, keep_constant: bool = False,
              info: dict | None = None) -> list[SolutionBranch]:
    """Exp-function pipeline, with a second elimination stage for boundary conditions.

    ``stages`` (if a list) receives an ExpStage per elimination stage.  Branches
    whose profile is constant are dropped unless ``keep_constant``.
    """
    if ansatz is None:
        ansatz = AnsatzExp()
    elif not isinstance(ansatz, AnsatzExp):
        ansatz = AnsatzExp.from_ranges(ansatz)
    bvp = problem if isinstance(problem, BVP) else None
    ode = bvp.ode if bvp else problem
    variable = bvp.variable if bvp else E.XI
    info = {} if info is None else info
    system = exp_collect(ode, ansatz, allow_stationary)
    info["system"] = system
    found = solve_system(system)
    info["complex_discarded"] = found.complex_discarded
    if stages is not None:
        stages.append(ExpStage(system, list(found)))
    if not found:
        raise NoExactSolution("no real solution of the exp-function coefficient system")
    results: list[tuple[Assignment, tuple, tuple]] = []
    if bvp:
        for a in found:
            family = ansatz.profile(a.values, variable)
            open_unknowns = tuple(u for u in a.free if u != ansatz.rate_unknown) + tuple(bvp.solve_for)
            bc_sys = apply_boundary_conditions(family, bvp.bcs, open_unknowns, variable)
            bc_sys.nonzero.extend(_carried_nonzero(system, a))
            second = solve_system(bc_sys)
            if stages is not None:
                stages.append(ExpStage(bc_sys, list(second)))
            names = tuple(system.unknowns) + tuple(bvp.solve_for)
            params = tuple(sorted(set(system.parameters) - set(bvp.solve_for)))
            for b in second:
                results.append((_compose(a, b, names), names, params))
    else:
        for a in found:
            results.append((a, system.unknowns, system.parameters))
    if not results:
        raise NoExactSolution("boundary conditions admit no exact solution")
    if grid is None:
        grid = (bvp.domain[0], bvp.domain[1], 101) if bvp else DEFAULT_GRID
    branches = []
    for a, names, params in results:
        exact_params = [p for p in params if not p.startswith("exp(")]
        values = bind_branch(a, names, exact_params, negative=(), nonzero=system.nonzero)
        profile = ansatz.profile(a.values, variable)
        free_syms = {n: values[n] for n in a.free}
        env = {k: v for k, v in values.items() if k not in free_syms}
        cf = ClosedFormSolution(EXPONENTIAL, profile, variable, {k: float(v) for k, v in free_syms.items()},
                                env, branch=None)
        if not bvp:
            cf.compact = compact_exponential(profile)
            if not keep_constant and not E.depends_on(cf.compact, variable):
                continue
        br = SolutionBranch("expfn", a, tuple(names), ansatz, cf, bindings=values)
        cf.branch = br
        if verify:
            br.residual = _check(ode, bvp, cf, grid)
            if not br.residual.passed:
                log.warning("branch %r failed the residual check (%g)", br, br.residual.max_residual)
                info.setdefault("rejected", []).append(repr(br))
                continue
        branches.append(br)
    if not branches:
        raise NoExactSolution("every candidate branch failed verification")
    return branches


def _check(ode: TravellingWaveODE, bvp: BVP | None, cf: ClosedFormSolution, grid) -> ResidualReport:
    if not bvp:
        eq = ode.source if ode.source is not None else ode.expr
        return residual(eq, cf, grid, dependent=ode.dependent, speed=ode.speed, direction=ode.direction)
    rep = residual(ode.expr, cf, grid, dependent=ode.dependent, variable=bvp.variable)
    rep.extra.update(boundary_residuals(cf, bvp))
    return rep


def boundary_residuals(cf: ClosedFormSolution, bvp: BVP) -> dict[str, float]:
    values = {k: v for k, v in cf.bindings.items()}
    values.update(cf.constants)
    point = numeric_bindings(values)
    out = {}
    for i, bc in enumerate(bvp.bcs):
        out[f"bc{i}"] = abs(E.eval_numeric(bc.residual_expr(cf.expr, bvp.variable), point))
    return out
