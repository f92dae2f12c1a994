"""Exact elimination solver for small parametric polynomial systems.

The search is a depth-first case split.  At every node the equations are
reduced (known-nonzero factors stripped, repeated factors removed) and one
move is taken, in this order of preference:

1. an equation linear in some unknown with a coefficient known to be nonzero:
   solve for that unknown and substitute;
2. an equation in a single unknown with numeric coefficients: solve it exactly
   (rational roots, quadratics and biquadratics through square roots);
3. an equation that factors (monomial or content factors): split into one
   branch per factor;
4. an equation linear in some unknown whose coefficient might vanish: split
   into "coefficient nonzero" and "coefficient and remainder both zero".

Parameters are treated as generic: a polynomial in parameters alone is assumed
nonzero (and recorded as a condition), so an equation that reduces to one
kills the branch.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd as igcd
from typing import Iterable, Mapping, Sequence

from .errors import GcdBlowup, TooHard
from .poly import Poly, RatFunc, _subs_poly, content, divide_exact, squarefree, to_poly
from .radical import RadicalNumber

log = logging.getLogger(__name__)

MAX_DEGREE = 24


@dataclass
class PolySystem:
    equations: list[Poly]
    unknowns: tuple[str, ...]
    parameters: tuple[str, ...] = ()
    nonzero: list[Poly] = field(default_factory=list)
    labels: list[str] | None = None

    def __post_init__(self):
        self.equations = [e if isinstance(e, Poly) else to_poly(e) for e in self.equations]
        self.nonzero = [e if isinstance(e, Poly) else to_poly(e) for e in self.nonzero]
        self.unknowns = tuple(self.unknowns)
        self.parameters = tuple(self.parameters)
        # dedupe, keep first occurrence
        seen, eqs, labels = set(), [], []
        for i, e in enumerate(self.equations):
            key = e.monic() if not e.is_zero() else e
            if key in seen:
                continue
            seen.add(key)
            eqs.append(e)
            if self.labels is not None:
                labels.append(self.labels[i])
        self.equations = eqs
        if self.labels is not None:
            self.labels = labels
        allowed = set(self.unknowns) | set(self.parameters)
        for e in self.equations:
            extra = e.variables() - allowed
            if extra:
                raise ValueError(f"equation {e} uses undeclared symbols {sorted(extra)}")

    def nonzero_equations(self) -> list[Poly]:
        return [e for e in self.equations if not e.is_zero()]


@dataclass
class Assignment:
    """One solution branch: exact values for the solved unknowns.

    ``values`` holds every unknown that is not free, as a rational function of
    the free unknowns and the parameters.  ``relations`` keeps the triangular
    form in the order the unknowns were eliminated (each value in terms of the
    unknowns still open at that point).
    """

    values: dict[str, RatFunc]
    free: tuple[str, ...] = ()
    relations: list[tuple[str, RatFunc]] = field(default_factory=list)
    conditions: list[Poly] = field(default_factory=list)

    def value(self, name: str) -> RatFunc:
        if name in self.values:
            return self.values[name]
        if name in self.free:
            return RatFunc(Poly.var(name))
        raise KeyError(name)

    def numeric(self, name: str) -> RadicalNumber | None:
        v = self.value(name)
        return v.constant_value() if v.is_constant() else None

    def relation(self, name: str) -> RatFunc:
        for n, r in self.relations:
            if n == name:
                return r
        return self.value(name)

    def key(self):
        return (len(self.free), tuple(sorted((k, str(v)) for k, v in self.values.items())))


class SolutionSet(list):
    """List of assignments plus bookkeeping on discarded complex roots."""

    complex_discarded: int = 0


@dataclass
class _Node:
    equations: list[Poly]
    pending: list[str]
    solved: list[tuple[str, RatFunc]]
    nonzero: list[Poly]
    conditions: list[Poly]


class _Solver:
    def __init__(self, system: PolySystem, max_nodes: int = 20000, max_degree: int = MAX_DEGREE):
        self.max_degree = max_degree
        self.system = system
        self.unknowns = list(system.unknowns)
        self.params = set(system.parameters)
        self.order = {u: i for i, u in enumerate(system.unknowns)}
        self.complex_discarded = 0
        self.nodes = 0
        self.max_nodes = max_nodes

    # -- helpers ---------------------------------------------------------
    def _nonzero_vars(self, node: _Node) -> set[str]:
        out = set(self.params)
        for p in node.nonzero:
            if len(p) == 1:
                (m, _), = p.terms.items()
                if len(m) == 1:
                    out.add(m[0][0])
        return out

    def _unknowns_in(self, p: Poly, node: _Node) -> set[str]:
        return p.variables() & set(node.pending)

    def _param_content(self, p: Poly, node: _Node) -> Poly:
        """gcd of the parameter-only coefficients of p seen as a polynomial in the unknowns."""
        unk = set(node.pending)
        groups: dict = {}
        for m, c in p.terms.items():
            um = tuple((v, k) for v, k in m if v in unk)
            pm = tuple((v, k) for v, k in m if v not in unk)
            groups.setdefault(um, {})[pm] = c
        from .poly import gcd

        g = Poly()
        for t in groups.values():
            g = gcd(g, Poly(t))
            if g.is_constant():
                return Poly.const(1)
        return g

    def strip(self, p: Poly, node: _Node) -> Poly:
        """Remove factors known to be nonzero; result has the same zero set."""
        if p.is_zero() or p.is_constant():
            return p
        nz = self._nonzero_vars(node)
        m = p.monomial_content()
        drop = tuple((v, k) for v, k in m if v in nz)
        if drop:
            p = p.div_monomial(drop)
        pc = self._param_content(p, node)
        if not pc.is_constant():
            node.conditions.append(pc)
            p = divide_exact(p, pc)
        changed = True
        while changed and not p.is_constant():
            changed = False
            for c in node.nonzero:
                if c.is_constant() or len(c) == 1 and len(next(iter(c.terms))) == 1:
                    continue
                q = divide_exact(p, c)
                if q is not None:
                    p, changed = q, True
        if not p.is_constant():
            try:
                p = squarefree(p)
            except GcdBlowup:
                pass
        return p.monic() if not p.is_zero() else p

    def known_nonzero(self, p: Poly, node: _Node) -> bool:
        if p.is_zero():
            return False
        probe = _Node([], node.pending, [], node.nonzero, [])
        q = self.strip(p, probe)
        if q.is_constant():
            node.conditions.extend(probe.conditions)
            return True
        return False

    # -- substitution --------------------------------------------------------
    def _apply(self, node: _Node, var: str, value: RatFunc) -> _Node:
        def sub(p: Poly) -> Poly:
            if var not in p.variables():
                return p
            if value.den.is_constant():
                return p.subs({var: value.num.scale(value.den.constant_value().inverse())})
            return p.compose_cleared(var, value.num, value.den)

        nonzero = list(node.nonzero)
        if not value.den.is_constant():
            nonzero.append(value.den.monic())
        new_nonzero = []
        for c in nonzero:
            c2 = sub(c)
            new_nonzero.append(c2)
        return _Node(
            equations=[sub(e) for e in node.equations],
            pending=[u for u in node.pending if u != var],
            solved=node.solved + [(var, value)],
            nonzero=new_nonzero,
            conditions=list(node.conditions),
        )

    # -- search --------------------------------------------------------------
    def run(self, node: _Node) -> list[Assignment]:
        self.nodes += 1
        if self.nodes > self.max_nodes:
            raise TooHard("case-split budget exhausted", node.equations)
        big = max((e.degree() for e in node.equations), default=0)
        if big > self.max_degree:
            raise TooHard(f"elimination produced a degree-{big} equation", node.equations)
        # nonzero constraints
        nonzero = []
        for c in node.nonzero:
            if c.is_zero():
                return []
            if c.is_constant():
                continue
            if not (c.variables() & set(node.pending)):
                node.conditions.append(c)
                continue
            nonzero.append(c.monic())
        node.nonzero = list(dict.fromkeys(nonzero))
        # reduce equations
        eqs: list[Poly] = []
        seen = set()
        for e in node.equations:
            if e.is_zero():
                continue
            r = self.strip(e, node)
            if r.is_zero():
                continue
            if r.is_constant():
                return []
            if not (r.variables() & set(node.pending)):
                return []
            if r in seen:
                continue
            seen.add(r)
            eqs.append(r)
        node.equations = eqs
        if not eqs:
            return [self._finish(node)]
        for move in (self._linear_move, self._univariate_move, self._factor_move, self._split_linear_move):
            out = move(node)
            if out is not None:
                return out
        raise TooHard("no elimination step applies", eqs)

    def _linear_move(self, node: _Node):
        for e in node.equations:
            for x in sorted(self._unknowns_in(e, node), key=self.order.get):
                if e.degree(x) != 1:
                    continue
                a = e.coeff(x, 1)
                if self.known_nonzero(a, node):
                    b = e - a * Poly.var(x)
                    return self.run(self._apply(node, x, RatFunc(-b, a)))
        return None

    def _univariate_move(self, node: _Node):
        for e in node.equations:
            unk = self._unknowns_in(e, node)
            if len(unk) != 1 or e.variables() != unk:
                continue
            (x,) = unk
            roots, n_complex = real_roots(e, x)
            self.complex_discarded += n_complex
            out = []
            for r in roots:
                out.extend(self.run(self._apply(node, x, RatFunc.const(r))))
            return out
        return None

    def _factor_move(self, node: _Node):
        for e in node.equations:
            factors = self._split_factors(e, node)
            if factors is None:
                continue
            out = []
            for i, f in enumerate(factors):
                child = _Node(
                    equations=[f] + [q for q in node.equations if q is not e],
                    pending=list(node.pending),
                    solved=list(node.solved),
                    nonzero=node.nonzero + factors[:i],
                    conditions=list(node.conditions),
                )
                out.extend(self.run(child))
            return out
        return None

    def _split_factors(self, e: Poly, node: _Node) -> list[Poly] | None:
        m = e.monomial_content()
        if m:
            rest = e.div_monomial(m)
            factors = [Poly.var(v) for v, _ in m]
            if not rest.is_constant():
                factors.append(rest)
            return factors if len(factors) > 1 else None
        for x in sorted(self._unknowns_in(e, node), key=self.order.get):
            try:
                c = content(e, x)
            except GcdBlowup:
                continue
            if not c.is_constant():
                return [c, divide_exact(e, c)]
        return None

    def _split_linear_move(self, node: _Node):
        for e in node.equations:
            for x in sorted(self._unknowns_in(e, node), key=self.order.get):
                if e.degree(x) != 1:
                    continue
                a = e.coeff(x, 1)
                b = e - a * Poly.var(x)
                out = []
                nz = _Node(list(node.equations), list(node.pending), list(node.solved),
                           node.nonzero + [a], list(node.conditions))
                out.extend(self.run(self._apply(nz, x, RatFunc(-b, a))))
                zero = _Node([a, b] + [q for q in node.equations if q is not e], list(node.pending),
                             list(node.solved), list(node.nonzero), list(node.conditions))
                out.extend(self.run(zero))
                return out
        return None

    def _finish(self, node: _Node) -> Assignment:
        values: dict[str, RatFunc] = {}
        for var, rel in reversed(node.solved):
            values[var] = rel.subs(values) if rel.variables() & values.keys() else rel
        conditions = []
        for c in node.conditions:
            c = c.monic()
            if not c.is_constant() and c not in conditions:
                conditions.append(c)
        free = tuple(u for u in self.unknowns if u in node.pending)
        ordered = {u: values[u] for u in self.unknowns if u in values}
        return Assignment(values=ordered, free=free, relations=list(node.solved), conditions=conditions)


def solve_system(system: PolySystem, max_nodes: int = 20000, max_degree: int = MAX_DEGREE) -> SolutionSet:
    """All real solution branches of ``system`` over the radical tower.

    Raises ``TooHard`` when no elimination move applies, or when the search
    exceeds ``max_nodes`` nodes or meets an equation of degree above
    ``max_degree``; an inconsistent system yields an empty list.
    """
    solver = _Solver(system, max_nodes=max_nodes, max_degree=max_degree)
    root = _Node(
        equations=list(system.equations),
        pending=list(system.unknowns),
        solved=[],
        nonzero=list(system.nonzero),
        conditions=[],
    )
    found = solver.run(root)
    out = SolutionSet()
    seen = []
    for a in sorted(found, key=Assignment.key):
        if any(_same(a, b) for b in seen):
            continue
        if not verify_assignment(system, a):
            log.warning("dropping unsound branch %s", a.values)
            continue
        seen.append(a)
        out.append(a)
    out.complex_discarded = solver.complex_discarded
    return out


def _same(a: Assignment, b: Assignment) -> bool:
    return a.free == b.free and a.values.keys() == b.values.keys() and all(a.values[k] == b.values[k] for k in a.values)


def verify_assignment(system: PolySystem, a: Assignment) -> bool:
    """True iff every equation vanishes identically under the assignment."""
    vals = {k: v for k, v in a.values.items()}
    for e in system.equations:
        if not _subs_poly(e, vals).is_zero():
            return False
    for c in system.nonzero:
        if _subs_poly(c, vals).is_zero():
            return False
    return True


# ---------------------------------------------------------------------------
# univariate real roots


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i != n // i:
                large.append(n // i)
        i += 1
    return small + large[::-1]


def _univariate_coeffs(p: Poly, x: str) -> dict[int, RadicalNumber]:
    return {k: c.constant_value() for k, c in p.coeffs_in(x).items()}


def real_roots(p: Poly, x: str) -> tuple[list[RadicalNumber], int]:
    """Distinct real roots of a univariate polynomial, plus the count of non-real ones."""
    p = squarefree(p)
    cs = _univariate_coeffs(p, x)
    roots: list[RadicalNumber] = []
    low = min(cs)
    if low > 0:
        roots.append(RadicalNumber(0))
        cs = {k - low: c for k, c in cs.items()}
    deg = max(cs)
    more, n_complex = _roots_nonzero(cs, deg, x)
    roots.extend(more)
    return sorted(set(roots), key=lambda r: (float(r), r.terms)), n_complex


def _roots_nonzero(cs: dict[int, RadicalNumber], deg: int, x: str):
    if deg == 0:
        return [], 0
    if deg == 1:
        return [-cs.get(0, RadicalNumber(0)) / cs[1]], 0
    g = 0
    for k in cs:
        g = igcd(g, k)
    if g >= 2 and g % 2 == 0 and deg > 2:
        # polynomial in y = x^2
        ys, nc = _roots_nonzero({k // 2: c for k, c in cs.items()}, deg // 2, x)
        out = []
        for y in ys:
            s = y.sign()
            if s > 0:
                r = y.sqrt()
                out.extend([r, -r])
            elif s == 0:
                out.append(y)
            else:
                nc += 2
        return out, nc
    if all(c.is_rational() for c in cs.values()):
        return _rational_poly_roots(cs, deg, x)
    if deg == 2:
        return _quadratic(cs.get(2), cs.get(1, RadicalNumber(0)), cs.get(0, RadicalNumber(0)))
    raise TooHard(f"degree-{deg} equation in {x} with irrational coefficients")


def _quadratic(a, b, c):
    disc = b * b - a * c * 4
    s = disc.sign()
    if s < 0:
        return [], 2
    if s == 0:
        return [-b / (a * 2)], 0
    try:
        r = disc.sqrt()
    except Exception as exc:
        raise TooHard(f"discriminant {disc} does not denest") from exc
    return [(-b + r) / (a * 2), (-b - r) / (a * 2)], 0


def _rational_poly_roots(cs: dict[int, RadicalNumber], deg: int, x: str):
    q = {k: c.rational_part() for k, c in cs.items()}
    lcm = 1
    for v in q.values():
        lcm = lcm * v.denominator // igcd(lcm, v.denominator)
    ints = [int(q.get(k, 0) * lcm) for k in range(deg + 1)]
    roots = []
    # rational root theorem on the integer polynomial, with deflation
    while len(ints) > 3:
        a0, an = ints[0], ints[-1]
        if a0 == 0:
            roots.append(RadicalNumber(0))
            ints = ints[1:]
            continue
        hit = None
        for pnum in _divisors(a0):
            for qden in _divisors(an):
                for sgn in (1, -1):
                    r = Fraction(sgn * pnum, qden)
                    if _horner(ints, r) == 0:
                        hit = r
                        break
                if hit is not None:
                    break
            if hit is not None:
                break
        if hit is None:
            break
        roots.append(RadicalNumber(hit))
        ints = _deflate(ints, hit)
    d = len(ints) - 1
    if d == 2:
        more, nc = _quadratic(RadicalNumber(ints[2]), RadicalNumber(ints[1]), RadicalNumber(ints[0]))
        return roots + more, nc
    if d == 1:
        return roots + [RadicalNumber(Fraction(-ints[0], ints[1]))], 0
    if d <= 0:
        return roots, 0
    g = 0
    for k, v in enumerate(ints):
        if v:
            g = igcd(g, k)
    if g >= 2 and g % 2 == 0:
        sub = {k // 2: RadicalNumber(v) for k, v in enumerate(ints) if v}
        ys, nc = _roots_nonzero(sub, d // 2, x)
        out = []
        for y in ys:
            s = y.sign()
            if s > 0:
                r = y.sqrt()
                out.extend([r, -r])
            elif s == 0:
                out.append(y)
            else:
                nc += 2
        return roots + out, nc
    raise TooHard(f"degree-{d} factor in {x} has no rational roots")


def _horner(ints: list[int], r: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(ints):
        acc = acc * r + c
    return acc


def _deflate(ints: list[int], r: Fraction) -> list[int]:
    # synthetic division of sum ints[k] x^k by (x - r), result rescaled to integers
    n = len(ints) - 1
    out = [Fraction(0)] * n
    acc = Fraction(0)
    for k in range(n, 0, -1):
        acc = acc * r + ints[k]
        out[k - 1] = acc
    den = 1
    for v in out:
        den = den * v.denominator // igcd(den, v.denominator)
    return [int(v * den) for v in out]


def system_from_exprs(equations: Iterable, unknowns: Sequence[str], parameters: Sequence[str] = (),
                      nonzero: Iterable = (), labels: Sequence[str] | None = None) -> PolySystem:
    """Build a PolySystem from expressions (each cleared of denominators)."""
    from .poly import to_ratfunc

    eqs = []
    for e in equations:
        r = to_ratfunc(e)
        eqs.append(r.num)
    nz = [to_ratfunc(e).num for e in nonzero]
    return PolySystem(eqs, tuple(unknowns), tuple(parameters), nz, list(labels) if labels is not None else None)


def substitute_assignment(p: Poly, a: Assignment) -> RatFunc:
    return _subs_poly(p, dict(a.values))


def as_mapping(a: Assignment) -> Mapping[str, RatFunc]:
    return dict(a.values)
