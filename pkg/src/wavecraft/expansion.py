"""(F'/F)-expansion and Riccati (tanh) methods.

Both methods look for u(xi) = sum_j b_j w**j where w obeys a Riccati equation:
w = F'/F with F'' + gamma*F = 0 gives w' = -(w**2 + gamma), and the Riccati
variant w' = w**2 + gamma corresponds to w = -F'/F.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

from . import expr as E
from .closedform import build_u
from .errors import LinearEquation, NoBalance, NoExactSolution
from .poly import MultiPoly, Poly, RatFunc, to_ratfunc
from .polysolve import PolySystem, solve_system
from .radical import RadicalNumber
from .solution import SolutionBranch, bind_branch
from .twreduce import TravellingWaveODE
from .verify import DEFAULT_GRID, residual

log = logging.getLogger(__name__)

FFX, RICCATI = "FFX", "RICCATI"


def _jet_poly(ode: TravellingWaveODE) -> tuple[Poly, dict[str, int]]:
    jets = ode.jets()
    r = to_ratfunc(ode.expr)
    if r.den.variables() & jets.keys():
        from .errors import NonPolynomial

        raise NonPolynomial("equation is not polynomial in the jets")
    return r.num, jets


def monomial_profile(ode: TravellingWaveODE) -> list[tuple[int, int]]:
    """(number of u-factors, total derivative order) for each monomial."""
    p, jets = _jet_poly(ode)
    out = []
    for m in p.terms:
        n = sum(k for v, k in m if v in jets)
        s = sum(jets[v] * k for v, k in m if v in jets)
        out.append((n, s))
    return out


def balance_degree(ode: TravellingWaveODE) -> int:
    """Homogeneous-balance degree m of the polynomial ansatz.

    The highest derivative order k among the linear terms is balanced against
    the dominant nonlinear monomial (most u-factors, then highest total order):
    m + k = n*m + s.  Every other monomial must stay at or below that degree.
    """
    prof = [ns for ns in monomial_profile(ode) if ns[0] > 0]
    nonlinear = [ns for ns in prof if ns[0] >= 2]
    if not nonlinear:
        raise LinearEquation("no nonlinear term to balance")
    linear = [s for n, s in prof if n == 1]
    k = max(linear) if linear else max(s for _, s in prof)
    n, s = max(nonlinear)
    num = k - s
    if num <= 0 or num % (n - 1):
        raise NoBalance(f"balance m + {k} = {n}m + {s} has no positive integer solution")
    m = num // (n - 1)
    top = m + k
    if any(nn * m + ss > top for nn, ss in prof):
        raise NoBalance(f"with m = {m} some monomial exceeds degree {top}")
    return m


@dataclass(frozen=True)
class AnsatzPoly:
    degree: int
    variant: str = FFX
    w: str = "w"
    gamma: str = "gamma"

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError("ansatz degree must be non-negative")
        if self.variant not in (FFX, RICCATI):
            raise ValueError(f"unknown variant {self.variant}")

    @property
    def prefix(self) -> str:
        return "b" if self.variant == FFX else "a"

    @property
    def coefficients(self) -> tuple[str, ...]:
        return tuple(f"{self.prefix}{j}" for j in range(self.degree + 1))

    @property
    def leading(self) -> str:
        return self.coefficients[-1]

    def poly(self) -> Poly:
        out = Poly()
        for j, b in enumerate(self.coefficients):
            out = out + Poly.var(b) * Poly.var(self.w, j)
        return out

    def derivative_rule(self) -> Poly:
        """w' as a polynomial in w."""
        r = Poly.var(self.w, 2) + Poly.var(self.gamma)
        return -r if self.variant == FFX else r


def w_derivative_closure(p, variant: str = FFX, w: str = "w", gamma: str = "gamma"):
    """d/dxi of a polynomial in w, rewritten through the Riccati rule for w'."""
    rule = AnsatzPoly(0, variant, w, gamma).derivative_rule()
    if isinstance(p, MultiPoly):
        return _closure_multi(p, rule, w)
    return p.diff(w) * rule


def _closure_multi(p: MultiPoly, rule: Poly, w: str) -> MultiPoly:
    try:
        i = p.indeterminates.index(w)
    except ValueError:
        return MultiPoly(p.indeterminates, {})
    terms: dict[tuple[int, ...], RatFunc] = {}
    rule_terms = [(dict(m).get(w, 0), RatFunc(Poly({tuple((v, k) for v, k in m if v != w): c})))
                  for m, c in rule.terms.items()]
    for exps in p.exponents:
        coef = p.coefficient_ratfunc(exps)
        k = exps[i]
        if k == 0:
            continue
        for shift, rc in rule_terms:
            new = list(exps)
            new[i] = k - 1 + shift
            key = tuple(new)
            terms[key] = terms.get(key, RatFunc(Poly())) + coef * rc * k
    return MultiPoly(p.indeterminates, {e: c for e, c in terms.items() if not c.is_zero()})


def build_system(ode: TravellingWaveODE, ansatz: AnsatzPoly, allow_stationary: bool = False) -> PolySystem:
    """Coefficient equations in w obtained by substituting the ansatz into the ODE.

    Equations run from the top power of w down to w**0.  Unknowns are the
    ansatz coefficients, gamma and (if present) the speed.
    """
    p, jets = _jet_poly(ode)
    order = max(jets.values())
    derivs = [ansatz.poly()]
    for _ in range(order):
        derivs.append(w_derivative_closure(derivs[-1], ansatz.variant, ansatz.w, ansatz.gamma))
    sub = p.subs({name: derivs[k] for name, k in jets.items()})
    coeffs = sub.coeffs_in(ansatz.w)
    eqs, labels = [], []
    for k in sorted(coeffs, reverse=True):
        eqs.append(coeffs[k])
        labels.append(f"w^{k}")
    unknowns = list(ansatz.coefficients) + [ansatz.gamma]
    speed_free = ode.speed in p.variables()
    if speed_free:
        unknowns.append(ode.speed)
    params = sorted(p.variables() - jets.keys() - set(unknowns))
    nonzero = [Poly.var(ansatz.leading)] if ansatz.degree > 0 else []
    if speed_free and not allow_stationary:
        nonzero.append(Poly.var(ode.speed))
    return PolySystem(eqs, tuple(unknowns), tuple(params), nonzero, labels)


def _run(ode: TravellingWaveODE, variant: str, m: int | None, allow_stationary: bool,
         grid, verify: bool, info: dict | None) -> list[SolutionBranch]:
    info = {} if info is None else info
    if m is None:
        m = balance_degree(ode)
    info["degree"] = m
    ansatz = AnsatzPoly(m, variant)
    system = build_system(ode, ansatz, allow_stationary)
    info["system"] = system
    found = solve_system(system)
    info["complex_discarded"] = found.complex_discarded
    if not found:
        extra = f" ({found.complex_discarded} complex roots discarded)" if found.complex_discarded else ""
        raise NoExactSolution(f"no real solution of the {variant} coefficient system{extra}")
    method = "ffx" if variant == FFX else "riccati"
    branches = []
    for a in found:
        values = bind_branch(a, system.unknowns, system.parameters, negative=(ansatz.gamma,),
                             nonzero=system.nonzero)
        coeffs = [values[b] for b in ansatz.coefficients]
        env = {k: v for k, v in values.items() if k not in ansatz.coefficients}
        cf = build_u(coeffs, values[ansatz.gamma], riccati=variant == RICCATI, bindings=env)
        br = SolutionBranch(method, a, system.unknowns, ansatz, cf, bindings=values)
        if verify:
            br.residual = residual(ode.source if ode.source is not None else ode.expr, cf, grid,
                                   dependent=ode.dependent, speed=ode.speed, direction=ode.direction)
            if not br.residual.passed:
                log.warning("branch %r failed the residual check (%g)", br, br.residual.max_residual)
                info.setdefault("rejected", []).append(repr(br))
                continue
        branches.append(br)
    if not branches:
        raise NoExactSolution("every candidate branch failed verification")
    return branches


def run_ffx(ode: TravellingWaveODE, m: int | None = None, allow_stationary: bool = False,
            grid=DEFAULT_GRID, verify: bool = True, info: dict | None = None) -> list[SolutionBranch]:
    """Full (F'/F)-expansion pipeline; ``m`` overrides the balance degree.

    ``info`` (if given) receives the degree, the coefficient system and the
    number of discarded complex roots.
    """
    return _run(ode, FFX, m, allow_stationary, grid, verify, info)


def run_riccati(ode: TravellingWaveODE, m: int | None = None, allow_stationary: bool = False,
                grid=DEFAULT_GRID, verify: bool = True, info: dict | None = None) -> list[SolutionBranch]:
    """Riccati/tanh pipeline with a_j in place of b_j."""
    return _run(ode, RICCATI, m, allow_stationary, grid, verify, info)


@dataclass(frozen=True)
class GExpParams:
    """G'' + lam*G' + mu*G = 0 together with coefficients a_j of sum a_j (G'/G)**j."""

    lam: Fraction
    mu: Fraction
    a: tuple


def g_to_f(params: GExpParams) -> tuple[RadicalNumber, list[RadicalNumber]]:
    """Rewrite a (G'/G)-expansion as an (F'/F)-expansion.

    G'/G = F'/F - lam/2 with F'' + gamma*F = 0, gamma = mu - lam**2/4.
    """
    lam = RadicalNumber.coerce(params.lam)
    mu = RadicalNumber.coerce(params.mu)
    gamma = mu - lam * lam / 4
    shift = -lam / 2
    n = len(params.a)
    b = [RadicalNumber(0)] * n
    for j, aj in enumerate(params.a):
        aj = RadicalNumber.coerce(aj)
        for i in range(j + 1):
            b[i] = b[i] + aj * comb(j, i) * shift ** (j - i)
    return gamma, b


def branch_signature(branch: SolutionBranch, flip: bool = False) -> tuple:
    """Exact values of a branch, with odd coefficients negated when ``flip``."""
    an = branch.ansatz
    out = []
    for j, name in enumerate(an.coefficients):
        v = branch.value(name)
        if flip and j % 2:
            v = -v
        out.append(str(v))
    out.append(str(branch.value(an.gamma)))
    for u in branch.unknowns:
        if u not in an.coefficients and u != an.gamma:
            out.append(f"{u}={branch.value(u)}")
    return tuple(out)


def same_branch_sets(ffx: Sequence[SolutionBranch], riccati: Sequence[SolutionBranch]) -> bool:
    """Do FFX and Riccati branches coincide under a_j = (-1)**j b_j?"""
    left = sorted(branch_signature(b) for b in ffx)
    right = sorted(branch_signature(b, flip=True) for b in riccati)
    return left == right
