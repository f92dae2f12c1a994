"""Solution branches shared by all methods."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from . import expr as E
from .closedform import ClosedFormSolution
from .errors import ZeroDenominator
from .poly import RatFunc
from .polysolve import Assignment
from .radical import RadicalNumber
from .verify import ResidualReport


@dataclass
class SolutionBranch:
    method: str
    assignment: Assignment
    unknowns: tuple[str, ...]
    ansatz: Any = None
    closed_form: ClosedFormSolution | None = None
    residual: ResidualReport | None = None
    bindings: dict[str, RadicalNumber] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def value(self, name: str) -> RatFunc:
        return self.assignment.value(name)

    def exact(self, name: str) -> RadicalNumber | None:
        return self.assignment.numeric(name)

    def values(self) -> dict[str, E.Expr]:
        return {u: self.value(u).to_expr() for u in self.unknowns}

    @property
    def free(self) -> tuple[str, ...]:
        return self.assignment.free

    @property
    def case(self) -> str | None:
        return self.closed_form.case if self.closed_form else None

    def __repr__(self):
        vals = ", ".join(f"{k}={E.to_text(v)}" for k, v in self.values().items())
        return f"SolutionBranch({self.method}: {vals})"


_CANDIDATES = (1, 2, 3, RadicalNumber(1) / 2, 5)


def bind_branch(assignment: Assignment, unknowns, parameters=(), negative=("gamma",),
                nonzero=()) -> dict[str, RadicalNumber | E.Expr]:
    """Exact values for every unknown and parameter of a branch.

    Free unknowns and parameters are bound to 1 (``negative`` names to -1);
    other small values are tried when that makes a value singular or violates
    a nonzero constraint.  Values that stay transcendental (exponentials of a
    bound symbol) are returned as expressions.
    """
    open_names = list(assignment.free) + [p for p in parameters]
    for k in _CANDIDATES:
        k = RadicalNumber.coerce(k)
        base = {n: -k if n in negative else k for n in open_names}
        rules = {n: RatFunc.const(v) for n, v in base.items()}
        syms = {n: E.Num(v) for n, v in base.items()}
        out: dict = dict(base)
        try:
            for u in unknowns:
                if u in base:
                    continue
                v = assignment.value(u).subs(rules)
                if v.is_constant():
                    out[u] = v.constant_value()
                    continue
                e = E.substitute(v.to_expr(), syms)
                if E.free_symbols(e):
                    raise ZeroDivisionError(u)
                E.eval_numeric(e)
                out[u] = e
            ok = all(_eval_poly(c, out) != 0 for c in nonzero)
        except (ZeroDivisionError, ZeroDenominator):
            continue
        if ok:
            return out
    raise ValueError("could not find a regular binding for the free unknowns")


def _eval_poly(p, values) -> float:
    rules = {k: (v if isinstance(v, E.Expr) else E.Num(v)) for k, v in values.items()}
    return E.eval_numeric(E.substitute(p.to_expr(), rules))
