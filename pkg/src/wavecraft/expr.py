"""Immutable canonical expression trees.

Every node is built through the smart constructors (``add``, ``mul``,
``power``, ``exp``, ``func``, ...) which keep the tree canonical:

* numbers are exact ``RadicalNumber`` values;
* sums and products are flattened, like terms / like bases are merged and
  operands are sorted by ``sort_key``;
* integer powers never carry exponent 0 or 1, and never sit on a number,
  a product or an exponential (those are distributed or folded);
* products of exponentials are merged into a single exponential.

Canonical trees compare structurally, so ``==`` is a sound equality test
for identical canonical forms (not a full zero-equivalence test; use
``expand`` or the polynomial layer for that).
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .errors import EvaluationError, UnboundSymbol
from .radical import RadicalNumber

XI = "xi"

# node-kind ranks used for operand ordering
_R_NUM, _R_SYM, _R_DERIV, _R_EXP, _R_FUNC, _R_MUL, _R_ADD = range(7)

FUNCTIONS = ("cos", "sin", "cosh", "sinh", "log", "sqrt")


class Expr:
    __slots__ = ("_hash", "_key")
    rank = -1

    def __init__(self):
        self._hash = None
        self._key = None

    # subclasses define: args (tuple used for equality), payload()
    def _args(self) -> tuple:
        raise NotImplementedError

    def payload(self):
        raise NotImplementedError

    def sort_key(self) -> tuple:
        if self._key is None:
            self._key = (self.rank, self.payload(), 1)
        return self._key

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Expr):
            if isinstance(other, (int, Fraction, RadicalNumber)):
                return isinstance(self, Num) and self.value == other
            return NotImplemented
        return type(self) is type(other) and hash(self) == hash(other) and self._args() == other._args()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((type(self).__name__, self._args()))
        return self._hash

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    # arithmetic sugar
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return add(self, neg(as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), neg(self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return mul(self, power(as_expr(other), -1))

    def __rtruediv__(self, other):
        return mul(as_expr(other), power(self, -1))

    def __neg__(self):
        return neg(self)

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        return power(self, n)

    def __str__(self):
        return to_text(self)

    def __repr__(self):
        return f"{type(self).__name__}({to_text(self)})"

    def children(self) -> tuple["Expr", ...]:
        return ()


class Num(Expr):
    __slots__ = ("value",)
    rank = _R_NUM

    def __init__(self, value):
        super().__init__()
        self.value = RadicalNumber.coerce(value)

    def _args(self):
        return (self.value,)

    def payload(self):
        return self.value.terms


class Sym(Expr):
    __slots__ = ("name",)
    rank = _R_SYM

    def __init__(self, name: str):
        super().__init__()
        self.name = name

    def _args(self):
        return (self.name,)

    def payload(self):
        return self.name


class Deriv(Expr):
    """Jet marker: derivative of the function symbol ``fn`` w.r.t. ``variables``."""

    __slots__ = ("fn", "variables")
    rank = _R_DERIV

    def __init__(self, fn: str, variables: tuple[str, ...]):
        super().__init__()
        self.fn = fn
        self.variables = variables

    def _args(self):
        return (self.fn, self.variables)

    def payload(self):
        return (self.fn, self.variables)

    @property
    def order(self) -> int:
        return len(self.variables)


class Pow(Expr):
    __slots__ = ("base", "exponent")

    def __init__(self, base: Expr, exponent: int):
        super().__init__()
        self.base = base
        self.exponent = exponent

    @property
    def rank(self):
        return self.base.rank

    def _args(self):
        return (self.base, self.exponent)

    def sort_key(self):
        if self._key is None:
            b = self.base.sort_key()
            self._key = (b[0], b[1], self.exponent)
        return self._key

    def children(self):
        return (self.base,)


class Add(Expr):
    __slots__ = ("terms",)
    rank = _R_ADD

    def __init__(self, terms: tuple[Expr, ...]):
        super().__init__()
        self.terms = terms

    def _args(self):
        return self.terms

    def payload(self):
        return tuple(t.sort_key() for t in self.terms)

    def children(self):
        return self.terms


class Mul(Expr):
    __slots__ = ("factors",)
    rank = _R_MUL

    def __init__(self, factors: tuple[Expr, ...]):
        super().__init__()
        self.factors = factors

    def _args(self):
        return self.factors

    def payload(self):
        return tuple(f.sort_key() for f in self.factors)

    def children(self):
        return self.factors


class Exp(Expr):
    __slots__ = ("arg",)
    rank = _R_EXP

    def __init__(self, arg: Expr):
        super().__init__()
        self.arg = arg

    def _args(self):
        return (self.arg,)

    def payload(self):
        return self.arg.sort_key()

    def children(self):
        return (self.arg,)


class Func(Expr):
    __slots__ = ("name", "arg")
    rank = _R_FUNC

    def __init__(self, name: str, arg: Expr):
        super().__init__()
        self.name = name
        self.arg = arg

    def _args(self):
        return (self.name, self.arg)

    def payload(self):
        return (self.name, self.arg.sort_key())

    def children(self):
        return (self.arg,)


def _key(e: Expr) -> tuple:
    return e.sort_key()


ZERO = Num(0)
ONE = Num(1)


# ---------------------------------------------------------------------------
# smart constructors


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction, RadicalNumber)):
        return Num(x)
    if isinstance(x, str):
        return Sym(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an expression")


def num(x) -> Num:
    return Num(x)


def sym(name: str) -> Sym:
    return Sym(name)


def symbols(names: str) -> tuple[Sym, ...]:
    return tuple(Sym(n) for n in names.replace(",", " ").split())


def deriv(fn: str, variables: Iterable[str]) -> Expr:
    variables = tuple(sorted(variables))
    if not variables:
        return Sym(fn)
    return Deriv(fn, variables)


def _split_coeff(e: Expr) -> tuple[RadicalNumber, Expr]:
    """Split a term into (numeric coefficient, rest)."""
    if isinstance(e, Num):
        return e.value, ONE
    if isinstance(e, Mul) and isinstance(e.factors[0], Num):
        rest = e.factors[1:]
        return e.factors[0].value, rest[0] if len(rest) == 1 else Mul(rest)
    return RadicalNumber(1), e


def _with_coeff(c: RadicalNumber, rest: Expr) -> Expr:
    if c.is_zero():
        return ZERO
    if rest == ONE:
        return Num(c)
    if c == 1:
        return rest
    if isinstance(rest, Mul):
        return Mul((Num(c),) + rest.factors)
    return Mul((Num(c), rest))


def add(*args) -> Expr:
    coeffs: dict[Expr, RadicalNumber] = {}
    stack = [as_expr(a) for a in args]
    flat = []
    while stack:
        a = stack.pop()
        if isinstance(a, Add):
            stack.extend(a.terms)
        else:
            flat.append(a)
    for a in flat:
        c, rest = _split_coeff(a)
        if c.is_zero():
            continue
        coeffs[rest] = coeffs[rest] + c if rest in coeffs else c
    terms = [_with_coeff(c, rest) for rest, c in coeffs.items() if not c.is_zero()]
    if not terms:
        return ZERO
    if len(terms) == 1:
        return terms[0]
    terms.sort(key=_key)
    return Add(tuple(terms))


def neg(e: Expr) -> Expr:
    return mul(Num(-1), e)


def sub(a, b) -> Expr:
    return add(a, neg(as_expr(b)))


def _split_power(e: Expr) -> tuple[Expr, int]:
    if isinstance(e, Pow):
        return e.base, e.exponent
    return e, 1


def _raw_power(base: Expr, n: int) -> Expr:
    return base if n == 1 else Pow(base, n)


def mul(*args) -> Expr:
    coeff = RadicalNumber(1)
    powers: dict[Expr, int] = {}
    exp_args: list[Expr] = []
    stack = [as_expr(a) for a in args]
    while stack:
        a = stack.pop()
        if isinstance(a, Mul):
            stack.extend(a.factors)
        elif isinstance(a, Num):
            coeff = coeff * a.value
        elif isinstance(a, Exp):
            exp_args.append(a.arg)
        else:
            b, n = _split_power(a)
            powers[b] = powers.get(b, 0) + n
    if coeff.is_zero():
        return ZERO
    factors = [_raw_power(b, n) for b, n in powers.items() if n != 0]
    if exp_args:
        e = exp(add(*exp_args))
        if isinstance(e, Num):
            coeff = coeff * e.value
        elif isinstance(e, Exp):
            factors.append(e)
        else:
            # exp folded into powers (e.g. exp(2*log(v)) -> v^2); merge again
            return mul(Num(coeff), *factors, e)
    if not factors:
        return Num(coeff)
    factors.sort(key=_key)
    if coeff == 1:
        return factors[0] if len(factors) == 1 else Mul(tuple(factors))
    return Mul((Num(coeff),) + tuple(factors))


def power(base, n: int) -> Expr:
    base = as_expr(base)
    if not isinstance(n, int):
        raise TypeError("only integer exponents are supported")
    if n == 0:
        return ONE
    if n == 1:
        return base
    if isinstance(base, Num):
        if base.value.is_zero() and n < 0:
            raise EvaluationError("zero raised to a negative power")
        return Num(base.value ** n)
    if isinstance(base, Pow):
        return power(base.base, base.exponent * n)
    if isinstance(base, Mul):
        return mul(*(power(f, n) for f in base.factors))
    if isinstance(base, Exp):
        return exp(mul(Num(n), base.arg))
    return Pow(base, n)


def exp(arg) -> Expr:
    arg = as_expr(arg)
    if arg == ZERO:
        return ONE
    # exp(k*log(x) + rest) -> x^k * exp(rest) for integer k
    terms = arg.terms if isinstance(arg, Add) else (arg,)
    logs, rest = [], []
    for t in terms:
        c, r = _split_coeff(t)
        if isinstance(r, Func) and r.name == "log" and c.is_rational() and c.rational_part().denominator == 1:
            logs.append(power(r.arg, int(c.rational_part())))
        else:
            rest.append(t)
    if logs:
        return mul(*logs, exp(add(*rest)))
    return Exp(arg)


def func(name: str, arg) -> Expr:
    arg = as_expr(arg)
    if name not in FUNCTIONS:
        raise ValueError(f"unknown function {name!r}")
    if name == "log":
        if isinstance(arg, Exp):
            return arg.arg
        if arg == ONE:
            return ZERO
    elif name == "sqrt":
        if isinstance(arg, Num) and arg.value.sign() >= 0:
            try:
                return Num(arg.value.sqrt())
            except Exception:
                pass
    elif arg == ZERO:
        return ONE if name in ("cos", "cosh") else ZERO
    return Func(name, arg)


def canonicalize(e: Expr) -> Expr:
    """Rebuild ``e`` bottom-up through the smart constructors."""
    return rebuild(e, canonicalize)


def rebuild(e: Expr, f: Callable[[Expr], Expr]) -> Expr:
    """Apply ``f`` to the children of ``e`` and reassemble canonically."""
    if isinstance(e, (Num, Sym, Deriv)):
        return e
    if isinstance(e, Add):
        return add(*(f(t) for t in e.terms))
    if isinstance(e, Mul):
        return mul(*(f(t) for t in e.factors))
    if isinstance(e, Pow):
        return power(f(e.base), e.exponent)
    if isinstance(e, Exp):
        return exp(f(e.arg))
    if isinstance(e, Func):
        return func(e.name, f(e.arg))
    raise TypeError(e)


# ---------------------------------------------------------------------------
# structural queries


def walk(e: Expr):
    yield e
    for c in e.children():
        yield from walk(c)


def free_symbols(e: Expr) -> set[str]:
    return {n.name for n in walk(e) if isinstance(n, Sym)}


def derivatives(e: Expr) -> set[Deriv]:
    return {n for n in walk(e) if isinstance(n, Deriv)}


def contains(e: Expr, target: Expr) -> bool:
    return any(n == target for n in walk(e))


def depends_on(e: Expr, name: str) -> bool:
    return any((isinstance(n, Sym) and n.name == name) for n in walk(e))


# ---------------------------------------------------------------------------
# calculus and rewriting


def differentiate(e, var: str, functions: Mapping[str, Iterable[str]] | None = None) -> Expr:
    """Exact derivative of ``e`` with respect to the symbol ``var``.

    ``functions`` maps function symbols to the variables they depend on, so that
    ``d v/dx`` becomes the jet ``v_x``.  Without it every other symbol and every
    jet marker is treated as a constant.
    """
    e = as_expr(e)
    if isinstance(var, Sym):
        var = var.name
    deps = {k: tuple(v) for k, v in (functions or {}).items()}
    return _diff(e, var, deps)


def _diff(e: Expr, var: str, deps) -> Expr:
    if isinstance(e, Num):
        return ZERO
    if isinstance(e, Sym):
        if e.name == var:
            return ONE
        if var in deps.get(e.name, ()):
            return deriv(e.name, (var,))
        return ZERO
    if isinstance(e, Deriv):
        if var in deps.get(e.fn, ()):
            return deriv(e.fn, e.variables + (var,))
        return ZERO
    if isinstance(e, Add):
        return add(*(_diff(t, var, deps) for t in e.terms))
    if isinstance(e, Mul):
        out = []
        fs = e.factors
        for i, f in enumerate(fs):
            df = _diff(f, var, deps)
            if df != ZERO:
                out.append(mul(*fs[:i], df, *fs[i + 1:]))
        return add(*out)
    if isinstance(e, Pow):
        db = _diff(e.base, var, deps)
        if db == ZERO:
            return ZERO
        return mul(Num(e.exponent), power(e.base, e.exponent - 1), db)
    if isinstance(e, Exp):
        return mul(e, _diff(e.arg, var, deps))
    if isinstance(e, Func):
        da = _diff(e.arg, var, deps)
        if da == ZERO:
            return ZERO
        a = e.arg
        outer = {
            "log": lambda: power(a, -1),
            "cos": lambda: neg(func("sin", a)),
            "sin": lambda: func("cos", a),
            "cosh": lambda: func("sinh", a),
            "sinh": lambda: func("cosh", a),
            "sqrt": lambda: mul(Num(Fraction(1, 2)), power(e, -1)),
        }[e.name]()
        return mul(outer, da)
    raise TypeError(e)


def substitute(e, rules: Mapping) -> Expr:
    """Simultaneous replacement of symbols / subtrees, then canonicalisation."""
    table = {as_expr(k): as_expr(v) for k, v in rules.items()}
    if not table:
        return canonicalize(as_expr(e))

    def go(node: Expr) -> Expr:
        hit = table.get(node)
        if hit is not None:
            return hit
        return rebuild(node, go)

    return go(as_expr(e))


def expand(e) -> Expr:
    """Distribute products over sums and expand positive powers of sums."""
    e = as_expr(e)
    if isinstance(e, (Num, Sym, Deriv)):
        return e
    if isinstance(e, Add):
        return add(*(expand(t) for t in e.terms))
    if isinstance(e, Mul):
        acc = [ONE]
        for f in e.factors:
            f = expand(f)
            parts = f.terms if isinstance(f, Add) else (f,)
            acc = [mul(a, p) for a in acc for p in parts]
        return add(*acc)
    if isinstance(e, Pow):
        b = expand(e.base)
        if e.exponent > 0 and isinstance(b, Add):
            out = b
            for _ in range(e.exponent - 1):
                out = expand(mul(out, b))
            return out
        return power(b, e.exponent)
    if isinstance(e, Exp):
        return exp(expand(e.arg))
    if isinstance(e, Func):
        return func(e.name, expand(e.arg))
    raise TypeError(e)


# ---------------------------------------------------------------------------
# numeric evaluation


def _lookup(bindings: Mapping, node: Expr, label: str):
    if node in bindings:
        return bindings[node]
    if label in bindings:
        return bindings[label]
    raise UnboundSymbol(f"no value bound for {label}")


def eval_numeric(e, bindings: Mapping | None = None) -> float:
    """IEEE double evaluation.  ``bindings`` maps symbol names (or nodes) to floats."""
    e = as_expr(e)
    bindings = bindings or {}
    return _eval(e, bindings)


def _eval(e: Expr, b) -> float:
    if isinstance(e, Num):
        return float(e.value)
    if isinstance(e, Sym):
        return float(_lookup(b, e, e.name))
    if isinstance(e, Deriv):
        return float(_lookup(b, e, to_text(e)))
    if isinstance(e, Add):
        return math.fsum(_eval(t, b) for t in e.terms)
    if isinstance(e, Mul):
        out = 1.0
        for f in e.factors:
            out *= _eval(f, b)
        return out
    if isinstance(e, Pow):
        base = _eval(e.base, b)
        if e.exponent < 0 and base == 0.0:
            raise EvaluationError(f"division by zero evaluating {to_text(e)}")
        return base ** e.exponent
    if isinstance(e, Exp):
        try:
            return math.exp(_eval(e.arg, b))
        except OverflowError:
            return math.inf
    if isinstance(e, Func):
        a = _eval(e.arg, b)
        if e.name == "log":
            if a <= 0.0:
                raise EvaluationError(f"log of non-positive value {a}")
            return math.log(a)
        if e.name == "sqrt":
            if a < 0.0:
                raise EvaluationError(f"sqrt of negative value {a}")
            return math.sqrt(a)
        return getattr(math, e.name)(a)
    raise TypeError(e)


def denominators(e: Expr) -> list[Expr]:
    """Bases raised to negative powers anywhere in ``e`` (pole candidates)."""
    return [n.base for n in walk(e) if isinstance(n, Pow) and n.exponent < 0]


# ---------------------------------------------------------------------------
# printing


def _jet_text(d: Deriv) -> str:
    if all(v == XI for v in d.variables):
        return d.fn + "'" * d.order
    if all(v in ("x", "t") for v in d.variables):
        return f"{d.fn}_{''.join(d.variables)}"
    return f"{d.fn}_{''.join(d.variables)}"


def _is_negative(c: RadicalNumber) -> bool:
    return len(c.terms) == 1 and c.sign() < 0


def _num_text(v: RadicalNumber, in_product: bool) -> str:
    s = str(v)
    if in_product and len(v.terms) > 1:
        return f"({s})"
    return s


def to_text(e: Expr) -> str:
    """Render in the input DSL; ``parse(to_text(e)) == e`` for canonical trees."""
    return _text(e, 0)


# precedence: 0 sum context, 1 product context, 2 power-base context
def _text(e: Expr, prec: int) -> str:
    if isinstance(e, Num):
        s = str(e.value)
        simple = e.value.is_rational() and e.value.rational_part().denominator == 1 and e.value.sign() >= 0
        if prec >= 2 and not simple:
            return f"({s})"
        if prec >= 1 and (len(e.value.terms) > 1 or s.startswith("-")):
            return f"({s})"
        return s
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, Deriv):
        return _jet_text(e)
    if isinstance(e, Add):
        parts = []
        for i, t in enumerate(e.terms):
            c, rest = _split_coeff(t)
            negative = _is_negative(c)
            body = _text(_with_coeff(-c, rest) if negative else t, 0 if isinstance(t, Add) else 1)
            if i == 0:
                parts.append(("-" + body) if negative else body)
            else:
                parts.append((" - " if negative else " + ") + body)
        s = "".join(parts)
        return f"({s})" if prec >= 1 else s
    if isinstance(e, Mul):
        c, rest = _split_coeff(e)
        factors = rest.factors if isinstance(rest, Mul) else (rest,)
        numer = [f for f in factors if not (isinstance(f, Pow) and f.exponent < 0)]
        denom = [power(f.base, -f.exponent) for f in factors if isinstance(f, Pow) and f.exponent < 0]
        lead = ""
        negative = _is_negative(c)
        cc = -c if negative else c
        pieces = [_text(f, 1) for f in numer]
        if cc != 1:
            pieces.insert(0, _num_text(cc, True))
        if not pieces:
            pieces = ["1"]
        s = "*".join(pieces)
        if denom:
            ds = "*".join(_text(f, 1) for f in denom)
            s += "/" + (f"({ds})" if len(denom) > 1 else _text(denom[0], 2))
        if negative:
            lead = "-"
        s = lead + s
        return f"({s})" if prec >= 2 or (negative and prec >= 1) else s
    if isinstance(e, Pow):
        if e.exponent < 0:
            s = "1/" + _text(power(e.base, -e.exponent), 2)
            return f"({s})" if prec >= 2 else s
        return f"{_text(e.base, 2)}^{e.exponent}"
    if isinstance(e, Exp):
        return f"exp({_text(e.arg, 0)})"
    if isinstance(e, Func):
        return f"{e.name}({_text(e.arg, 0)})"
    raise TypeError(e)


_GREEK = {"lambda", "mu", "gamma", "alpha", "xi", "eta", "omega", "beta", "sigma"}
_INDEXED = re.compile(r"^([A-Za-z])(m?)(\d+)$")


def _latex_name(name: str) -> str:
    if name in _GREEK:
        return "\\" + name
    m = _INDEXED.match(name)
    if m:
        return f"{m.group(1)}_{{{'-' if m.group(2) else ''}{m.group(3)}}}"
    return name


def to_latex(e: Expr) -> str:
    return _latex(e, 0)


def _latex(e: Expr, prec: int) -> str:
    if isinstance(e, Num):
        s = e.value.latex()
        if (prec >= 1 and len(e.value.terms) > 1) or (prec >= 2 and s.startswith("-")):
            return rf"\left({s}\right)"
        return s
    if isinstance(e, Sym):
        return _latex_name(e.name)
    if isinstance(e, Deriv):
        if all(v == XI for v in e.variables):
            return e.fn + "'" * e.order if e.order <= 3 else f"{e.fn}^{{({e.order})}}"
        return f"{e.fn}_{{{''.join(e.variables)}}}"
    if isinstance(e, Add):
        out = ""
        for i, t in enumerate(e.terms):
            c, rest = _split_coeff(t)
            negative = _is_negative(c)
            body = _latex(_with_coeff(-c, rest) if negative else t, 1)
            if i == 0:
                out += ("-" if negative else "") + body
            else:
                out += (" - " if negative else " + ") + body
        return rf"\left({out}\right)" if prec >= 1 else out
    if isinstance(e, Mul):
        c, rest = _split_coeff(e)
        factors = rest.factors if isinstance(rest, Mul) else (rest,)
        numer = [f for f in factors if not (isinstance(f, Pow) and f.exponent < 0)]
        denom = [power(f.base, -f.exponent) for f in factors if isinstance(f, Pow) and f.exponent < 0]
        negative = _is_negative(c)
        cc = -c if negative else c
        top = [_latex(f, 1) for f in numer]
        bottom = [_latex(f, 1) for f in denom]
        if cc.is_rational():
            q = cc.rational_part()
            if q.numerator != 1:
                top.insert(0, str(q.numerator))
            if q.denominator != 1:
                bottom.insert(0, str(q.denominator))
        elif cc != 1:
            top.insert(0, _latex(Num(cc), 1))
        s = " ".join(top) or "1"
        if bottom:
            s = rf"\frac{{{s}}}{{{' '.join(bottom)}}}"
        return ("-" if negative else "") + s
    if isinstance(e, Pow):
        if e.exponent < 0:
            return rf"\frac{{1}}{{{_latex(power(e.base, -e.exponent), 1)}}}"
        return f"{_latex(e.base, 2)}^{{{e.exponent}}}"
    if isinstance(e, Exp):
        return f"e^{{{_latex(e.arg, 0)}}}"
    if isinstance(e, Func):
        if e.name == "sqrt":
            return rf"\sqrt{{{_latex(e.arg, 0)}}}"
        name = "\\ln" if e.name == "log" else "\\" + e.name
        return rf"{name}\left({_latex(e.arg, 0)}\right)"
    raise TypeError(e)
