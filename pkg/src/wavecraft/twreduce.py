"""Travelling-wave reduction of polynomial evolution equations."""
from __future__ import annotations

from dataclasses import dataclass, field

from . import expr as E
from .errors import NonPolynomial
from .poly import to_ratfunc


@dataclass(frozen=True)
class EvolutionPDE:
    """P(u, u_t, u_x, ...) = 0 stored as a single expression equated to zero."""

    expr: E.Expr
    dependent: str = "u"
    independents: tuple[str, ...] = ("x", "t")

    def __post_init__(self):
        for d in E.derivatives(self.expr):
            if d.fn != self.dependent or not set(d.variables) <= set(self.independents):
                raise ValueError(f"jet {E.to_text(d)} is not a derivative of {self.dependent} in {self.independents}")
        _check_polynomial(self.expr, self.dependent)

    @property
    def max_order(self) -> dict[str, int]:
        out = {v: 0 for v in self.independents}
        for d in E.derivatives(self.expr):
            for v in self.independents:
                out[v] = max(out[v], d.variables.count(v))
        return out


@dataclass(frozen=True)
class TravellingWaveODE:
    """Polynomial ODE in u(xi) and its xi-derivatives, equated to zero."""

    expr: E.Expr
    dependent: str = "u"
    speed: str = "c"
    direction: int = 1
    variable: str = E.XI
    source: E.Expr | None = field(default=None, compare=False)

    def jets(self) -> dict[str, int]:
        """Polynomial-variable name of each jet mapped to its derivative order."""
        return jet_orders(self.expr, self.dependent)

    @property
    def order(self) -> int:
        return max(self.jets().values(), default=0)

    def __str__(self):
        return E.to_text(self.expr) + " = 0"


def jet_orders(e: E.Expr, dependent: str) -> dict[str, int]:
    out = {dependent: 0}
    for d in E.derivatives(e):
        if d.fn == dependent:
            if len(set(d.variables)) > 1:
                raise ValueError(f"mixed derivative {E.to_text(d)} in an ODE")
            out[E.to_text(d)] = d.order
    return out


def _check_polynomial(e: E.Expr, dependent: str):
    for node in E.walk(e):
        if isinstance(node, (E.Exp, E.Func)):
            if any((isinstance(n, E.Sym) and n.name == dependent) or (isinstance(n, E.Deriv) and n.fn == dependent)
                   for n in E.walk(node)):
                raise NonPolynomial(f"{dependent} appears inside {E.to_text(node)}")
    r = to_ratfunc(e)
    jets = {dependent} | {E.to_text(d) for d in E.derivatives(e) if d.fn == dependent}
    if r.den.variables() & jets:
        raise NonPolynomial(f"{E.to_text(e)} is not polynomial in the jets of {dependent}")


def scale(e: E.Expr, c) -> E.Expr:
    """Multiply by a number, distributing over a top-level sum."""
    if isinstance(e, E.Add):
        return E.add(*(E.mul(E.as_expr(c), t) for t in e.terms))
    return E.mul(E.as_expr(c), e)


def orient(e: E.Expr, dependent: str, speed: str | None = None) -> E.Expr:
    """Flip the overall sign so the highest-derivative term has a positive coefficient.

    Terms involving ``speed`` are ignored so both directions get the same sign.
    """
    if not isinstance(e, E.Add):
        return e
    top, sign = -1, 1
    for t in e.terms:
        c, rest = E._split_coeff(t)
        if speed is not None and E.depends_on(rest, speed):
            continue
        orders = [n.order for n in E.walk(rest) if isinstance(n, E.Deriv) and n.fn == dependent]
        k = max(orders, default=0)
        if k > top and c.is_rational():
            top, sign = k, c.sign()
    return scale(e, -1) if sign < 0 else e


def reduce_to_ode(pde: EvolutionPDE, direction: int = 1, speed: str = "c") -> TravellingWaveODE:
    """Substitute u(x, t) = u(xi) with xi = x - direction*speed*t."""
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    space, time = pde.independents
    c = E.Sym(speed)
    rules = {}
    for d in E.derivatives(pde.expr):
        n_t = d.variables.count(time)
        factor = E.power(E.mul(E.Num(-direction), c), n_t)
        rules[d] = E.mul(factor, E.deriv(pde.dependent, (E.XI,) * d.order))
    out = E.substitute(pde.expr, rules)
    if any(E.depends_on(out, v) for v in pde.independents):
        raise NonPolynomial("explicit x or t dependence cannot be reduced to a travelling wave")
    return TravellingWaveODE(orient(out, pde.dependent, speed), pde.dependent, speed, direction, source=pde.expr)


def ode_from_expr(e: E.Expr, dependent: str = "u", variable: str | None = None) -> TravellingWaveODE:
    """Wrap an ODE given with jets in one variable (``v_xx`` or ``u''``) as a TravellingWaveODE.

    Jets in another variable are renamed to xi-derivatives.
    """
    rules = {}
    for d in E.derivatives(e):
        if d.fn == dependent and any(v != E.XI for v in d.variables):
            if len(set(d.variables)) != 1:
                raise ValueError(f"mixed derivative {E.to_text(d)} in an ODE")
            rules[d] = E.deriv(dependent, (E.XI,) * d.order)
    out = E.substitute(e, rules) if rules else e
    _check_polynomial(out, dependent)
    return TravellingWaveODE(out, dependent, variable=E.XI, source=e)
