"""Explicit solution profiles assembled from solved coefficient branches."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping

from . import expr as E
from .errors import NonNegativeGamma
from .poly import Poly, RatFunc, _factored_expr, to_ratfunc
from .radical import RadicalNumber

TRIG, HYPERBOLIC, LINEAR, EXPONENTIAL = "TRIG", "HYPERBOLIC", "LINEAR", "EXPONENTIAL"


@dataclass
class ClosedFormSolution:
    case: str
    expr: E.Expr
    variable: str = E.XI
    constants: dict[str, float] = field(default_factory=dict)
    bindings: dict[str, RadicalNumber] = field(default_factory=dict)
    compact: E.Expr | None = None
    limits: dict[str, E.Expr] = field(default_factory=dict)
    branch: Any = None

    @property
    def display(self) -> E.Expr:
        return self.compact if self.compact is not None else self.expr

    def text(self) -> str:
        return E.to_text(self.display)

    def latex(self) -> str:
        return E.to_latex(self.display)

    def bound(self, constants: Mapping[str, float] | None = None) -> E.Expr:
        """The profile with its free constants replaced by numbers (defaults when not given)."""
        vals = dict(self.constants)
        vals.update(constants or {})
        rules = {k: _number(v) for k, v in vals.items()}
        return E.substitute(self.expr, rules)


def _number(v) -> E.Expr:
    if isinstance(v, (RadicalNumber, int, Fraction)):
        return E.Num(v)
    if isinstance(v, E.Expr):
        return v
    return E.Num(Fraction(v).limit_denominator(10**12)) if float(v).is_integer() is False else E.Num(int(v))


def case_of(gamma: RadicalNumber) -> str:
    s = RadicalNumber.coerce(gamma).sign()
    return TRIG if s > 0 else LINEAR if s == 0 else HYPERBOLIC


def _root(x: RadicalNumber) -> E.Expr:
    return E.func("sqrt", E.Num(x))


def assemble_F(gamma, c1="c1", c2="c2", variable: str = E.XI) -> ClosedFormSolution:
    """Solution of F'' + gamma*F = 0 in the branch selected by the sign of gamma."""
    gamma = RadicalNumber.coerce(gamma)
    xi = E.Sym(variable)
    c1, c2 = E.as_expr(c1), E.as_expr(c2)
    case = case_of(gamma)
    if case == TRIG:
        arg = E.mul(_root(gamma), xi)
        f = E.add(E.mul(c1, E.func("cos", arg)), E.mul(c2, E.func("sin", arg)))
    elif case == HYPERBOLIC:
        arg = E.mul(_root(-gamma), xi)
        f = E.add(E.mul(c1, E.func("cosh", arg)), E.mul(c2, E.func("sinh", arg)))
    else:
        f = E.add(c1, E.mul(c2, xi))
    consts = {str(c): 1.0 for c in (c1, c2) if isinstance(c, E.Sym)}
    return ClosedFormSolution(case, f, variable, consts, {"gamma": gamma})


def exp_rate(gamma) -> E.Expr:
    """alpha = sqrt(-gamma) for gamma < 0."""
    gamma = RadicalNumber.coerce(gamma)
    if gamma.sign() >= 0:
        raise NonNegativeGamma(f"exponential form needs gamma < 0, got {gamma}")
    return _root(-gamma)


def to_exponential_form(gamma, c1="c1", c2="c2", variable: str = E.XI) -> E.Expr:
    """F = c1*exp(alpha*xi) + c2*exp(-alpha*xi) with alpha = sqrt(-gamma)."""
    alpha = exp_rate(gamma)
    xi = E.Sym(variable)
    return E.add(E.mul(E.as_expr(c1), E.exp(E.mul(alpha, xi))),
                 E.mul(E.as_expr(c2), E.exp(E.neg(E.mul(alpha, xi)))))


def hyperbolic_to_exponential(c1, c2):
    """Constants (c1, c2) of c1*cosh + c2*sinh mapped to those of the exponential form."""
    half = Fraction(1, 2)
    return (c1 + c2) * half, (c1 - c2) * half


def _coeff_value(v) -> E.Expr:
    if isinstance(v, RatFunc):
        return v.to_expr()
    return E.as_expr(v)


def build_u(coefficients, gamma, riccati: bool = False, variable: str = E.XI,
            constant: str = "C", branch: Any = None, bindings: Mapping | None = None) -> ClosedFormSolution:
    """Profile u = sum_j coefficients[j] * w**j with w = F'/F (or -F'/F for the Riccati variant).

    F is normalised to a single free constant C = c1/c2: C*exp(alpha*xi) + exp(-alpha*xi)
    for gamma < 0, C*cos + sin for gamma > 0 and C + xi for gamma = 0.
    """
    gamma = RadicalNumber.coerce(gamma)
    xi = E.Sym(variable)
    C = E.Sym(constant)
    s = gamma.sign()
    if len(coefficients) == 1:
        u = _coeff_value(coefficients[0])
        return ClosedFormSolution(case_of(gamma) if s >= 0 else EXPONENTIAL, u, variable, {}, dict(bindings or {}),
                                  compact=u, branch=branch)
    if s < 0:
        case = EXPONENTIAL
        F = to_exponential_form(gamma, C, 1, variable)
    elif s > 0:
        case = TRIG
        F = assemble_F(gamma, C, 1, variable).expr
    else:
        case = LINEAR
        F = E.add(C, xi)
    w = E.mul(E.differentiate(F, variable), E.power(F, -1))
    if riccati:
        w = E.neg(w)
    u = E.add(*(E.mul(_coeff_value(b), E.power(w, j)) for j, b in enumerate(coefficients)))
    out = ClosedFormSolution(case, u, variable, {constant: 1.0}, dict(bindings or {}), branch=branch)
    out.bindings.setdefault("gamma", gamma)
    if case == EXPONENTIAL:
        out.compact = compact_exponential(u)
        alpha = exp_rate(gamma)
        sign = -1 if riccati else 1
        out.limits = {
            f"{constant}=0": _limit_value(coefficients, E.mul(E.Num(-sign), alpha)),
            f"{constant}=inf": _limit_value(coefficients, E.mul(E.Num(sign), alpha)),
        }
    return out


def _limit_value(coefficients, w: E.Expr) -> E.Expr:
    return E.expand(E.add(*(E.mul(_coeff_value(b), E.power(w, j)) for j, b in enumerate(coefficients))))


def compact_exponential(u: E.Expr) -> E.Expr:
    """Rewrite a rational function of exponentials as one reduced quotient.

    The quotient is rescaled so the denominator's constant term is 1, a single
    even-power exponential base is replaced by its square, and a denominator
    that is an exact power is shown as such.
    """
    r = to_ratfunc(u)
    num, den = r.num, r.den
    exp_vars = sorted(v for v in (num.variables() | den.variables()) if v.startswith("exp("))
    if len(exp_vars) == 1:
        ev = exp_vars[0]
        degs = [dict(m).get(ev, 0) for p in (num, den) for m in p.terms]
        if all(d % 2 == 0 for d in degs) and any(degs):
            base = E.power(E.exp(E.mul(E.Num(2), _atom_arg(ev))), 1)
            sq = E.to_text(base)
            num, den = _rename_even(num, ev, sq), _rename_even(den, ev, sq)
    d0 = den.constant_value()
    if not d0.is_zero():
        num, den = num.scale(d0.inverse()), den.scale(d0.inverse())
    if den.is_constant():
        return E.mul(num.to_expr(), E.Num(den.constant_value().inverse()))
    return E.mul(num.to_expr(), E.power(_factored_expr(den), -1))


def _atom_arg(name: str) -> E.Expr:
    from .poly import atom

    a = atom(name)
    assert isinstance(a, E.Exp)
    return a.arg


def _rename_even(p: Poly, old: str, new: str) -> Poly:
    d = {}
    for m, c in p.terms.items():
        mm = dict(m)
        k = mm.pop(old, 0)
        if k:
            mm[new] = k // 2
        d[tuple(sorted(mm.items()))] = c
    return Poly(d)
