"""Sparse multivariate polynomials with exact radical coefficients.

``Poly`` is the workhorse of the algebraic layer: variables are strings (the
DSL text of the atom they stand for, e.g. ``"c"``, ``"u''"`` or
``"exp(alpha)"``) and coefficients are ``RadicalNumber`` values.  Rational
functions are carried as ``(numerator, denominator)`` pairs.

``MultiPoly`` is the user-facing view: a polynomial in designated
indeterminates whose coefficients are expressions in the remaining symbols.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd as igcd
from typing import Iterable, Mapping

from . import expr as E
from .errors import EvaluationError, GcdBlowup, NonPolynomial
from .radical import RadicalNumber

Monomial = tuple  # tuple[tuple[str, int], ...], sorted by variable, exponents > 0

_R1 = RadicalNumber(1)
# pseudo-remainder sequences past this total degree are abandoned
GCD_DEGREE_CAP = 48


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, k in b:
        d[v] = d.get(v, 0) + k
    return tuple(sorted(d.items()))


def _mono_div(a: Monomial, b: Monomial):
    """a / b if b divides a, else None."""
    d = dict(a)
    for v, k in b:
        r = d.get(v, 0) - k
        if r < 0:
            return None
        if r:
            d[v] = r
        else:
            del d[v]
    return tuple(sorted(d.items()))


def _mono_deg(m: Monomial) -> int:
    return sum(k for _, k in m)


class Poly:
    __slots__ = ("terms", "_hash", "_vars")

    def __init__(self, terms: Mapping[Monomial, RadicalNumber] | None = None):
        self.terms = {m: c for m, c in (terms or {}).items() if not c.is_zero()}
        self._hash = None
        self._vars = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def const(cls, c) -> "Poly":
        c = RadicalNumber.coerce(c)
        return cls({(): c}) if c else cls()

    @classmethod
    def var(cls, name: str, k: int = 1) -> "Poly":
        return cls({((name, k),): _R1}) if k else cls.const(1)

    # -- queries ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not m for m in self.terms)

    def constant_value(self) -> RadicalNumber:
        return self.terms.get((), RadicalNumber(0))

    def variables(self) -> frozenset[str]:
        if self._vars is None:
            self._vars = frozenset(v for m in self.terms for v, _ in m)
        return self._vars

    def degree(self, var: str | None = None) -> int:
        if not self.terms:
            return -1
        if var is None:
            return max(_mono_deg(m) for m in self.terms)
        return max(dict(m).get(var, 0) for m in self.terms)

    def coeffs_in(self, var: str) -> dict[int, "Poly"]:
        out: dict[int, dict] = {}
        for m, c in self.terms.items():
            d = dict(m)
            k = d.pop(var, 0)
            out.setdefault(k, {})[tuple(sorted(d.items()))] = c
        return {k: Poly(t) for k, t in out.items()}

    def coeff(self, var: str, k: int) -> "Poly":
        return self.coeffs_in(var).get(k, Poly())

    def __len__(self):
        return len(self.terms)

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        d = dict(self.terms)
        for m, c in other.terms.items():
            d[m] = d[m] + c if m in d else c
        return Poly(d)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        if not self.terms or not other.terms:
            return Poly()
        if len(other.terms) == 1 and () in other.terms:
            k = other.terms[()]
            return Poly({m: c * k for m, c in self.terms.items()})
        d: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                c = c1 * c2
                d[m] = d[m] + c if m in d else c
        return Poly(d)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out, base = Poly.const(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def scale(self, c) -> "Poly":
        c = RadicalNumber.coerce(c)
        return Poly({m: v * c for m, v in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, RadicalNumber)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # -- calculus / substitution -------------------------------------------
    def diff(self, var: str) -> "Poly":
        d: dict = {}
        for m, c in self.terms.items():
            dm = dict(m)
            k = dm.get(var, 0)
            if not k:
                continue
            if k == 1:
                del dm[var]
            else:
                dm[var] = k - 1
            key = tuple(sorted(dm.items()))
            d[key] = d[key] + c * k if key in d else c * k
        return Poly(d)

    def subs(self, values: Mapping[str, "Poly | RadicalNumber | int | Fraction"]) -> "Poly":
        """Substitute polynomials for variables (simultaneously)."""
        vals = {v: _coerce(p) for v, p in values.items()}
        if not vals or not (self.variables() & vals.keys()):
            return self
        cache: dict = {}
        out = Poly()
        acc: dict = {}
        for m, c in self.terms.items():
            rest = []
            term = Poly.const(c)
            for v, k in m:
                if v in vals:
                    key = (v, k)
                    if key not in cache:
                        cache[key] = vals[v] ** k
                    term = term * cache[key]
                else:
                    rest.append((v, k))
            if rest:
                term = term * Poly({tuple(rest): _R1})
            for mm, cc in term.terms.items():
                acc[mm] = acc[mm] + cc if mm in acc else cc
        out = Poly(acc)
        return out

    def compose_cleared(self, var: str, num: "Poly", den: "Poly") -> "Poly":
        """den**deg * self(var = num/den): substitution of a fraction, cleared."""
        cs = self.coeffs_in(var)
        k = max(cs, default=0)
        if k == 0:
            return self
        out = Poly()
        npow = [Poly.const(1)]
        dpow = [Poly.const(1)]
        for _ in range(k):
            npow.append(npow[-1] * num)
            dpow.append(dpow[-1] * den)
        for i, c in cs.items():
            out = out + c * npow[i] * dpow[k - i]
        return out

    def evaluate(self, values: Mapping[str, float]) -> float:
        total = 0.0
        for m, c in self.terms.items():
            t = float(c)
            for v, k in m:
                t *= values[v] ** k
            total += t
        return total

    # -- structure ----------------------------------------------------------
    def monomial_content(self) -> Monomial:
        if not self.terms:
            return ()
        it = iter(self.terms)
        common = dict(next(it))
        for m in it:
            dm = dict(m)
            for v in list(common):
                k = min(common[v], dm.get(v, 0))
                if k:
                    common[v] = k
                else:
                    del common[v]
            if not common:
                break
        return tuple(sorted(common.items()))

    def div_monomial(self, m: Monomial) -> "Poly":
        return Poly({_mono_div(k, m): c for k, c in self.terms.items()})

    def leading(self, order: list[str] | None = None) -> tuple[Monomial, RadicalNumber]:
        order = order or sorted(self.variables())
        m = max(self.terms, key=lambda mm: _lex_key(mm, order))
        return m, self.terms[m]

    def monic(self) -> "Poly":
        if not self.terms:
            return self
        _, c = self.leading()
        return self if c == 1 else self.scale(c.inverse())

    def is_rational(self) -> bool:
        return all(c.is_rational() for c in self.terms.values())

    def sorted_terms(self) -> list[tuple[Monomial, RadicalNumber]]:
        order = sorted(self.variables())
        return sorted(self.terms.items(), key=lambda t: (_mono_deg(t[0]), _lex_key(t[0], order)), reverse=True)

    def to_expr(self) -> E.Expr:
        parts = []
        for m, c in self.sorted_terms():
            parts.append(E.mul(E.Num(c), *(E.power(atom(v), k) for v, k in m)))
        return E.add(*parts)

    def __str__(self):
        return E.to_text(self.to_expr())

    __repr__ = __str__


def _coerce(x) -> Poly:
    if isinstance(x, Poly):
        return x
    return Poly.const(x)


def _lex_key(m: Monomial, order: list[str]) -> tuple[int, ...]:
    d = dict(m)
    return tuple(d.get(v, 0) for v in order)


# ---------------------------------------------------------------------------
# division and gcd


def divide_exact(a: Poly, b: Poly) -> Poly | None:
    """Return a / b when b divides a exactly, else None."""
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    if a.is_zero():
        return Poly()
    if b.is_constant():
        return a.scale(b.constant_value().inverse())
    if not b.variables() <= a.variables():
        return None
    order = sorted(a.variables() | b.variables())
    lm_b, lc_b = b.leading(order)
    inv = lc_b.inverse()
    q: dict = {}
    r = a
    while not r.is_zero():
        lm_r, lc_r = r.leading(order)
        t = _mono_div(lm_r, lm_b)
        if t is None:
            return None
        c = lc_r * inv
        q[t] = c
        r = r - Poly({t: c}) * b
    return Poly(q)


def _main_var(a: Poly, b: Poly) -> str:
    return max(a.variables() | b.variables())


def content(p: Poly, var: str) -> Poly:
    g = Poly()
    for c in p.coeffs_in(var).values():
        g = gcd(g, c)
        if g.is_constant():
            return Poly.const(1)
    return g


def _prem(a: Poly, b: Poly, x: str) -> Poly:
    db = b.degree(x)
    lcb = b.coeff(x, db)
    r = a
    while not r.is_zero() and r.degree(x) >= db:
        dr = r.degree(x)
        lcr = r.coeff(x, dr)
        r = r * lcb - lcr * Poly.var(x, dr - db) * b
    return r


def primitive_part(p: Poly, var: str) -> Poly:
    c = content(p, var)
    if c.is_constant():
        return p
    q = divide_exact(p, c)
    assert q is not None
    return q


def gcd(a: Poly, b: Poly) -> Poly:
    """Greatest common divisor, normalised to a monic leading term."""
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    if a.is_constant() or b.is_constant():
        return Poly.const(1)
    ma, mb = a.monomial_content(), b.monomial_content()
    common = tuple(sorted((v, min(k, dict(mb).get(v, 0))) for v, k in ma if dict(mb).get(v, 0)))
    if ma or mb:
        inner = gcd(a.div_monomial(ma), b.div_monomial(mb))
        return (inner * Poly({common: _R1})).monic()
    x = _main_var(a, b)
    if x not in a.variables():
        return gcd(a, content(b, x))
    if x not in b.variables():
        return gcd(content(a, x), b)
    ca, cb = content(a, x), content(b, x)
    c = gcd(ca, cb)
    pa = divide_exact(a, ca) if not ca.is_constant() else a
    pb = divide_exact(b, cb) if not cb.is_constant() else b
    if pa.degree(x) < pb.degree(x):
        pa, pb = pb, pa
    while not pb.is_zero():
        r = _prem(pa, pb, x)
        if r.degree() > GCD_DEGREE_CAP:
            raise GcdBlowup(f"gcd remainder of degree {r.degree()}")
        pa = pb
        if r.is_zero() or r.degree(x) < 0:
            pb = r
        else:
            pb = (primitive_part(r, x) if x in r.variables() else r).monic()
            if pb.is_constant():
                pa = Poly.const(1)
                break
    g = pa if x in pa.variables() else Poly.const(1)
    if x in g.variables():
        g = primitive_part(g, x)
    return (c * g).monic()


def squarefree(p: Poly) -> Poly:
    """Remove repeated factors (same zero set)."""
    if p.is_constant():
        return p
    m = p.monomial_content()
    if m:
        reduced = tuple((v, 1) for v, _ in m)
        return squarefree(p.div_monomial(m)) * Poly({reduced: _R1})
    x = max(p.variables())
    c = content(p, x)
    pp = divide_exact(p, c) if not c.is_constant() else p
    g = gcd(pp, pp.diff(x))
    if not g.is_constant():
        pp = divide_exact(pp, g)
    return squarefree(c) * pp if not c.is_constant() else pp


# ---------------------------------------------------------------------------
# rational functions


class RatFunc:
    """Reduced quotient of two polynomials, denominator monic."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None, reduce: bool = True):
        den = den if den is not None else Poly.const(1)
        if den.is_zero():
            raise EvaluationError("rational function with zero denominator")
        if reduce and not num.is_zero() and not den.is_constant():
            try:
                g = gcd(num, den)
            except GcdBlowup:
                g = Poly.const(1)
            if not g.is_constant():
                num = divide_exact(num, g)
                den = divide_exact(den, g)
        if num.is_zero():
            den = Poly.const(1)
        _, lc = den.leading()
        if lc != 1:
            inv = lc.inverse()
            num, den = num.scale(inv), den.scale(inv)
        self.num, self.den = num, den

    @classmethod
    def const(cls, c) -> "RatFunc":
        return cls(Poly.const(c))

    def is_zero(self):
        return self.num.is_zero()

    def is_poly(self):
        return self.den.is_constant()

    def is_constant(self):
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> RadicalNumber:
        return self.num.constant_value() / self.den.constant_value()

    def variables(self):
        return self.num.variables() | self.den.variables()

    def __add__(self, o):
        o = _rf(o)
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, reduce=False)

    def __sub__(self, o):
        return self + (-_rf(o))

    def __rsub__(self, o):
        return _rf(o) - self

    def __mul__(self, o):
        o = _rf(o)
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise EvaluationError("inverse of zero rational function")
        return RatFunc(self.den, self.num, reduce=False)

    def __truediv__(self, o):
        return self * _rf(o).inverse()

    def __rtruediv__(self, o):
        return _rf(o) * self.inverse()

    def __pow__(self, n: int):
        if n >= 0:
            return RatFunc(self.num ** n, self.den ** n, reduce=False)
        return self.inverse() ** (-n)

    def __eq__(self, o):
        if isinstance(o, (int, Fraction, RadicalNumber, Poly)):
            o = _rf(o)
        if not isinstance(o, RatFunc):
            return NotImplemented
        return (self.num * o.den - o.num * self.den).is_zero()

    def __hash__(self):
        return hash((self.num, self.den))

    def subs(self, values: Mapping[str, "RatFunc"]) -> "RatFunc":
        vals = {k: _rf(v) for k, v in values.items() if k in self.variables()}
        if not vals:
            return self
        return _subs_poly(self.num, vals) / _subs_poly(self.den, vals)

    def evaluate(self, values: Mapping[str, float]) -> float:
        d = self.den.evaluate(values)
        if d == 0.0:
            raise EvaluationError("denominator vanishes at the evaluation point")
        return self.num.evaluate(values) / d

    def to_expr(self) -> E.Expr:
        n = self.num.to_expr()
        if self.den.is_constant():
            return E.mul(n, E.Num(self.den.constant_value().inverse()))
        return E.mul(n, E.power(_factored_expr(self.den), -1))

    def __str__(self):
        return E.to_text(self.to_expr())

    __repr__ = __str__


def _rf(x) -> RatFunc:
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, Poly):
        return RatFunc(x)
    return RatFunc.const(x)


def _subs_poly(p: Poly, vals: Mapping[str, RatFunc]) -> RatFunc:
    if not (p.variables() & vals.keys()):
        return RatFunc(p)
    # clear each substituted variable's denominator in turn
    num, den = p, Poly.const(1)
    for v in sorted(vals.keys() & p.variables()):
        r = vals[v]
        k = num.degree(v)
        if k <= 0:
            continue
        num = num.compose_cleared(v, r.num, r.den)
        den = den * r.den ** k
    return RatFunc(num, den)


def _factored_expr(p: Poly) -> E.Expr:
    """Render a polynomial, showing an exact power of a simpler base when it is one."""
    for k in (4, 3, 2):
        root = perfect_power_root(p, k)
        if root is not None:
            return E.power(root.to_expr(), k)
    return p.to_expr()


def perfect_power_root(p: Poly, k: int) -> Poly | None:
    """Return q with q**k == p (q monic in its leading term), if one exists."""
    if p.is_constant() or p.degree() % k:
        return None
    for v in sorted(p.variables()):
        cs = p.coeffs_in(v)
        d = max(cs)
        if d % k:
            return None
    # integer-root candidate through the leading and trailing structure: Newton
    # iteration on the univariate skeleton is overkill here; try the binomial
    # shape q = a*m1 + b*m2 built from extreme terms.
    terms = p.sorted_terms()
    (m_hi, c_hi), (m_lo, c_lo) = terms[0], terms[-1]
    if any(e % k for _, e in m_hi) or any(e % k for _, e in m_lo):
        return None
    try:
        a = _root_number(c_hi, k)
        b = _root_number(c_lo, k)
    except ValueError:
        return None
    mh = tuple((v, e // k) for v, e in m_hi)
    ml = tuple((v, e // k) for v, e in m_lo)
    for sb in ((1, -1) if k % 2 == 0 else (1,)):
        q = Poly({mh: a}) + Poly({ml: b * sb})
        if q ** k == p:
            return q
    return None


def _root_number(c: RadicalNumber, k: int) -> RadicalNumber:
    if k == 2:
        return c.sqrt()
    if not c.is_rational():
        raise ValueError("no exact root")
    q = c.rational_part()
    sgn = -1 if q < 0 else 1
    if sgn < 0 and k % 2 == 0:
        raise ValueError("no real root")
    n, d = _int_root(abs(q.numerator), k), _int_root(q.denominator, k)
    if n is None or d is None:
        raise ValueError("no exact root")
    return RadicalNumber(Fraction(sgn * n, d))


def _int_root(n: int, k: int) -> int | None:
    r = round(n ** (1.0 / k))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand ** k == n:
            return cand
    return None


# ---------------------------------------------------------------------------
# Expression <-> polynomial conversion


@lru_cache(maxsize=8192)
def atom(name: str) -> E.Expr:
    """Expression atom for a polynomial variable name."""
    from .parser import parse

    return parse(name)


def var_name(e: E.Expr) -> str:
    return E.to_text(e)


def _exp_parts(arg: E.Expr) -> list[tuple[RadicalNumber, E.Expr]]:
    terms = arg.terms if isinstance(arg, E.Add) else (arg,)
    out = []
    for t in terms:
        c, rest = E._split_coeff(t)
        out.append((c, rest))
    return out


def _exp_bases(e: E.Expr) -> dict[E.Expr, tuple[RadicalNumber, int]]:
    """For each exponential rate family, the base coefficient and its scale.

    Returns ``{rest: (kappa, L)}`` such that every exponential ``exp(c*rest)``
    in ``e`` equals ``exp(kappa*rest)**n`` for an integer ``n``.
    """
    groups: dict[E.Expr, list[RadicalNumber]] = {}
    for node in E.walk(e):
        if isinstance(node, E.Exp):
            for c, rest in _exp_parts(node.arg):
                groups.setdefault(rest, []).append(c)
    out = {}
    for rest, cs in groups.items():
        cs = sorted(set(cs), key=lambda c: (abs(float(c)), c.terms))
        kappa = cs[0]
        ratios = []
        for c in cs:
            r = c / kappa
            if not r.is_rational():
                raise NonPolynomial(f"incommensurate exponential rates in {E.to_text(e)}")
            ratios.append(r.rational_part())
        den = 1
        for r in ratios:
            den = den * r.denominator // igcd(den, r.denominator)
        nums = [int(r * den) for r in ratios]
        g = 0
        for n in nums:
            g = igcd(g, n)
        base = kappa * Fraction(g, den)
        if base.sign() < 0:
            base = -base
        out[rest] = base
    return out


def to_ratfunc(e, reduce: bool = True) -> RatFunc:
    """Convert an expression to a rational function in its atoms.

    Exponentials ``exp(c*g)`` become integer powers of a common atom
    ``exp(kappa*g)`` (rates rescaled to their gcd).
    """
    e = E.as_expr(e)
    bases = _exp_bases(e)
    num, den = _conv(e, bases)
    return RatFunc(num, den, reduce=reduce)


def _conv(e: E.Expr, bases) -> tuple[Poly, Poly]:
    if isinstance(e, E.Num):
        return Poly.const(e.value), Poly.const(1)
    if isinstance(e, (E.Sym, E.Deriv, E.Func)):
        return Poly.var(var_name(e)), Poly.const(1)
    if isinstance(e, E.Add):
        n, d = Poly(), Poly.const(1)
        for t in e.terms:
            tn, td = _conv(t, bases)
            if td == d:
                n = n + tn
            elif td.is_constant():
                n = n + tn * d.scale(td.constant_value().inverse())
            elif d.is_constant():
                n = n.scale(d.constant_value().inverse()) * td + tn
                d = td
            else:
                q = divide_exact(d, td)
                if q is not None:
                    n = n + tn * q
                else:
                    n, d = n * td + tn * d, d * td
        return n, d
    if isinstance(e, E.Mul):
        n, d = Poly.const(1), Poly.const(1)
        for f in e.factors:
            fn, fd = _conv(f, bases)
            n, d = n * fn, d * fd
        return n, d
    if isinstance(e, E.Pow):
        bn, bd = _conv(e.base, bases)
        k = e.exponent
        if k > 0:
            return bn ** k, bd ** k
        if bn.is_zero():
            raise EvaluationError("zero raised to a negative power")
        return bd ** (-k), bn ** (-k)
    if isinstance(e, E.Exp):
        n, d = Poly.const(1), Poly.const(1)
        for c, rest in _exp_parts(e.arg):
            base = bases[rest]
            k = c / base
            kk = int(k.rational_part())
            name = var_name(E.exp(E.mul(E.Num(base), rest)))
            if kk >= 0:
                n = n * Poly.var(name, kk)
            else:
                d = d * Poly.var(name, -kk)
        return n, d
    raise TypeError(e)


def to_poly(e) -> Poly:
    r = to_ratfunc(e)
    if not r.den.is_constant():
        raise NonPolynomial(f"{E.to_text(E.as_expr(e))} is not a polynomial")
    return r.num.scale(r.den.constant_value().inverse())


def expr_from(p) -> E.Expr:
    return p.to_expr()


# ---------------------------------------------------------------------------
# MultiPoly: polynomial in designated indeterminates


class MultiPoly:
    """Polynomial in ``indeterminates`` with coefficients rational in the rest.

    Terms are keyed by exponent vectors and listed in graded-lex order.
    """

    def __init__(self, indeterminates: Iterable[str], terms: Mapping[tuple[int, ...], RatFunc]):
        self.indeterminates = tuple(indeterminates)
        self._terms = {k: v for k, v in terms.items() if not v.is_zero()}

    @property
    def exponents(self) -> list[tuple[int, ...]]:
        return sorted(self._terms, key=lambda k: (sum(k), k), reverse=True)

    def coefficient(self, exps) -> E.Expr:
        exps = tuple(exps) if not isinstance(exps, int) else (exps,)
        r = self._terms.get(exps)
        return r.to_expr() if r is not None else E.ZERO

    def coefficient_ratfunc(self, exps) -> RatFunc:
        exps = tuple(exps) if not isinstance(exps, int) else (exps,)
        return self._terms.get(exps, RatFunc.const(0))

    def items(self):
        return [(k, self._terms[k].to_expr()) for k in self.exponents]

    def degree(self) -> int:
        return max((sum(k) for k in self._terms), default=-1)

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return (self.indeterminates == other.indeterminates
                and self._terms.keys() == other._terms.keys()
                and all(self._terms[k] == other._terms[k] for k in self._terms))

    def to_expr(self) -> E.Expr:
        parts = []
        for k in self.exponents:
            mono = [E.power(E.Sym(v) if "(" not in v else atom(v), n) for v, n in zip(self.indeterminates, k)]
            parts.append(E.mul(self._terms[k].to_expr(), *mono))
        return E.add(*parts)

    def __str__(self):
        return E.to_text(self.to_expr())

    def __repr__(self):
        return f"MultiPoly({self.indeterminates}, {self})"


def normalize_poly(e, indeterminates: Iterable[str]) -> MultiPoly:
    """Expand ``e`` and collect it as a polynomial in ``indeterminates``."""
    ind = tuple(v.name if isinstance(v, E.Sym) else v for v in indeterminates)
    e = E.as_expr(e)
    for node in E.walk(e):
        if isinstance(node, (E.Exp, E.Func)) and any(E.depends_on(node, v) for v in ind):
            raise NonPolynomial(f"{ind} appear inside {E.to_text(node)}")
    r = to_ratfunc(e)
    if r.den.variables() & set(ind):
        raise NonPolynomial(f"{E.to_text(e)} has {ind} in a denominator")
    groups: dict[tuple[int, ...], dict] = {}
    for m, c in r.num.terms.items():
        d = dict(m)
        key = tuple(d.pop(v, 0) for v in ind)
        groups.setdefault(key, {})[tuple(sorted(d.items()))] = c
    return MultiPoly(ind, {k: RatFunc(Poly(t), r.den) for k, t in groups.items()})
