"""Line-oriented problem files.

Example::

    # Fisher's equation
    func u(x, t);
    eq: u_t = u_xx + u*(1 - u)

Statements (one per line or separated by ``;``)::

    func v(x);              dependent function and its variables
    param lambda;           symbolic parameter(s), comma separated
    unknown lambda;         parameter(s) to solve for through boundary conditions
    eq: lhs = rhs           the equation (exactly one)
    bc: v_x(0) = 0          boundary condition (ODE problems only)
    ranges: 1,1,0,0         exp-function exponent ranges cN,dN,p,q
    rate: 1/sqrt(6)         exp-function rate (a number, or a name to solve for)
    nonzero: a0             ansatz coefficients forced nonzero
    fix: b0 = 1             ansatz coefficients pinned to numbers
    degree: 2               polynomial ansatz degree (overrides the balance)
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import expr as E
from .errors import ParseError
from .expfn import BVP, AnsatzExp, BoundaryCondition
from .parser import parse, parse_equation
from .poly import to_ratfunc
from .twreduce import EvolutionPDE, TravellingWaveODE, ode_from_expr, reduce_to_ode

_FUNC = re.compile(r"^([A-Za-z][A-Za-z0-9]*)\s*\(\s*([A-Za-z]+(?:\s*,\s*[A-Za-z]+)*)\s*\)$")
_BC = re.compile(r"^([A-Za-z][A-Za-z0-9]*)(?:_([A-Za-z]+)|('+))?\s*\((.+)\)\s*=\s*(.+)$")
_NAME = re.compile(r"^[A-Za-z][A-Za-z0-9]*$")


@dataclass
class ProblemFile:
    equation: E.Expr
    functions: dict[str, tuple[str, ...]] = field(default_factory=dict)
    params: tuple[str, ...] = ()
    unknowns: tuple[str, ...] = ()
    bcs: list[BoundaryCondition] = field(default_factory=list)
    ranges: tuple[int, int, int, int] | None = None
    rate: object = None
    nonzero: tuple[str, ...] = ()
    fixed: tuple = ()
    degree: int | None = None
    source: str = ""

    @property
    def dependent(self) -> str:
        return next(iter(self.functions))

    @property
    def variables(self) -> tuple[str, ...]:
        return self.functions[self.dependent]

    @property
    def is_pde(self) -> bool:
        return len(self.variables) == 2

    @property
    def is_bvp(self) -> bool:
        return bool(self.bcs)

    def pde(self) -> EvolutionPDE:
        return EvolutionPDE(self.equation, self.dependent, self.variables)

    def ode(self, direction: int = 1) -> TravellingWaveODE:
        if self.is_pde:
            return reduce_to_ode(self.pde(), direction)
        return ode_from_expr(self.equation, self.dependent)

    def bvp(self) -> BVP:
        locs = sorted({float(bc.location) for bc in self.bcs})
        domain = (locs[0], locs[-1]) if len(locs) > 1 else (0.0, 1.0)
        return BVP(self.ode(), list(self.bcs), tuple(self.unknowns), self.variables[0], domain)

    def expfn_ansatz(self, ranges=None) -> AnsatzExp:
        r = tuple(ranges or self.ranges or (1, 1, 1, 1))
        kw = {}
        if self.rate is not None:
            kw["rate"] = self.rate
        return AnsatzExp(*r, nonzero=tuple(self.nonzero), fixed=tuple(self.fixed), **kw)


def _fail(lineno: int, msg: str, exc: ParseError | None = None):
    if exc is not None and exc.position is not None:
        msg = str(exc)
    raise ParseError(f"line {lineno}: {msg}")


def _names(text: str, lineno: int) -> list[str]:
    out = [t.strip() for t in text.split(",") if t.strip()]
    for n in out:
        if not _NAME.match(n):
            _fail(lineno, f"invalid name {n!r}")
    return out


def _rational(text: str, lineno: int) -> Fraction:
    try:
        r = to_ratfunc(parse(text))
    except ParseError as exc:
        _fail(lineno, str(exc), exc)
    if not r.is_constant() or not r.constant_value().is_rational():
        _fail(lineno, f"{text.strip()!r} is not a rational number")
    return r.constant_value().rational_part()


def parse_problem(text: str, source: str = "") -> ProblemFile:
    """Parse problem-file text."""
    functions: dict[str, tuple[str, ...]] = {}
    params: list[str] = []
    unknowns: list[str] = []
    eqs: list[tuple[int, str]] = []
    bc_lines: list[tuple[int, str]] = []
    opts: dict = {"nonzero": [], "fixed": []}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        for stmt in line.split(";"):
            stmt = stmt.strip()
            if not stmt:
                continue
            if ":" in stmt:
                key, body = (t.strip() for t in stmt.split(":", 1))
            else:
                parts = stmt.split(None, 1)
                key, body = parts[0], (parts[1] if len(parts) > 1 else "")
            if key == "func":
                m = _FUNC.match(body)
                if not m:
                    _fail(lineno, f"expected 'func name(x[, t])', got {body!r}")
                functions[m.group(1)] = tuple(v.strip() for v in m.group(2).split(","))
            elif key == "param":
                params.extend(_names(body, lineno))
            elif key == "unknown":
                unknowns.extend(_names(body, lineno))
            elif key == "eq":
                eqs.append((lineno, body))
            elif key == "bc":
                bc_lines.append((lineno, body))
            elif key == "ranges":
                try:
                    vals = tuple(int(v) for v in body.split(","))
                except ValueError:
                    vals = ()
                if len(vals) != 4 or min(vals) < 0:
                    _fail(lineno, "ranges needs four non-negative integers cN,dN,p,q")
                opts["ranges"] = vals
            elif key == "rate":
                opts["rate"] = body if _NAME.match(body) else _parse_rate(body, lineno)
            elif key == "nonzero":
                opts["nonzero"].extend(_names(body, lineno))
            elif key == "fix":
                name, eq, val = body.partition("=")
                if not eq or not _NAME.match(name.strip()):
                    _fail(lineno, "expected 'fix: name = number'")
                opts["fixed"].append((name.strip(), _rational(val, lineno)))
            elif key == "degree":
                if not body.isdigit() or int(body) < 1:
                    _fail(lineno, "degree must be a positive integer")
                opts["degree"] = int(body)
            else:
                _fail(lineno, f"unknown statement {key!r}")
    if len(eqs) != 1:
        raise ParseError(f"expected exactly one equation, found {len(eqs)}")
    lineno, body = eqs[0]
    declared = None
    if functions:
        declared = set(functions) | set(params) | set(unknowns)
    try:
        equation = parse_equation(body, declared)
    except ParseError as exc:
        _fail(lineno, str(exc), exc)
    if not functions:
        functions = _infer_functions(equation)
    if len(functions) != 1:
        raise ParseError("exactly one dependent function is supported")
    dep = next(iter(functions))
    variables = functions[dep]
    if len(variables) not in (1, 2):
        raise ParseError("the dependent function needs one (ODE) or two (x, t) variables")
    bcs = []
    for ln, b in bc_lines:
        if len(variables) != 1:
            _fail(ln, "boundary conditions are only allowed for ODE problems")
        bcs.append(_parse_bc(b, dep, variables[0], ln))
    return ProblemFile(
        equation=equation,
        functions=functions,
        params=tuple(params),
        unknowns=tuple(unknowns),
        bcs=bcs,
        ranges=opts.get("ranges"),
        rate=opts.get("rate"),
        nonzero=tuple(opts["nonzero"]),
        fixed=tuple(opts["fixed"]),
        degree=opts.get("degree"),
        source=source,
    )


def _parse_rate(body: str, lineno: int) -> E.Expr:
    try:
        e = parse(body)
    except ParseError as exc:
        _fail(lineno, str(exc), exc)
    if E.free_symbols(e):
        _fail(lineno, "rate must be a number or a single name")
    return e


def _infer_functions(equation: E.Expr) -> dict[str, tuple[str, ...]]:
    fns: dict[str, set] = {}
    for d in E.derivatives(equation):
        fns.setdefault(d.fn, set()).update(v for v in d.variables if v != E.XI)
    if not fns:
        return {"u": ("x", "t")} if "u" in E.free_symbols(equation) else {}
    out = {}
    for fn, vs in fns.items():
        out[fn] = ("x", "t") if "t" in vs else ("x",)
    return out


def _parse_bc(body: str, dep: str, var: str, lineno: int) -> BoundaryCondition:
    m = _BC.match(body.strip())
    if not m or m.group(1) != dep:
        _fail(lineno, f"expected a condition like '{dep}({0}) = 1' or '{dep}_{var}(0) = 0'")
    if m.group(2) and set(m.group(2)) != {var}:
        _fail(lineno, f"derivative must be taken in {var}")
    order = len(m.group(2) or m.group(3) or "")
    loc = _rational(m.group(4), lineno)
    target = _rational(m.group(5), lineno)
    kind = "derivative" if order else "value"
    return BoundaryCondition(kind, loc, target, order)


def load_problem(path) -> ProblemFile:
    p = Path(path)
    return parse_problem(p.read_text(), str(p))
