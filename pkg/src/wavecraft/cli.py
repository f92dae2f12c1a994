"""Command-line front end.

Exit codes: 0 at least one branch, 2 no exact solution, 3 input error,
4 balance failure, 5 solver gave up.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import expr as E
from .cases import bratu_pipeline, bratu_solution_check, fisher_pipeline
from .closedform import ClosedFormSolution
from .errors import BalanceError, NoExactSolution, NonPolynomial, ParseError, TooHard, WavecraftError
from .expansion import run_ffx, run_riccati
from .expfn import boundary_residuals, run_expfn
from .parser import parse
from .poly import RatFunc
from .problem import ProblemFile, load_problem
from .radical import RadicalNumber
from .solution import SolutionBranch
from .verify import DEFAULT_GRID, ResidualReport, numeric_bindings, residual

EXIT_OK, EXIT_FAIL, EXIT_NO_SOLUTION, EXIT_INPUT, EXIT_BALANCE, EXIT_TOO_HARD = 0, 1, 2, 3, 4, 5


def _exact(v) -> dict:
    if isinstance(v, RatFunc):
        e = v.to_expr()
        return {"exact": E.to_text(e), "float": float(v.constant_value()) if v.is_constant() else None}
    if isinstance(v, RadicalNumber):
        return {"exact": str(v), "float": float(v)}
    e = E.as_expr(v)
    try:
        f = E.eval_numeric(e)
    except WavecraftError:
        f = None
    return {"exact": E.to_text(e), "float": f}


def residual_json(rep: ResidualReport | None) -> dict | None:
    return rep.to_json() if rep is not None else None


def branch_json(b: SolutionBranch) -> dict:
    assignments = {}
    for u in b.unknowns:
        if u in b.free:
            assignments[u] = {"exact": u, "float": None, "free": True}
        else:
            assignments[u] = _exact(b.value(u))
    cf = b.closed_form
    closed = None
    if cf is not None:
        closed = {
            "text": cf.text(),
            "latex": cf.latex(),
            "expr": E.to_text(cf.expr),
            "variable": cf.variable,
            "constants": dict(cf.constants),
            "bindings": {k: _exact(v) for k, v in cf.bindings.items()},
            "limits": {k: E.to_text(v) for k, v in cf.limits.items()},
        }
    out = {
        "assignments": assignments,
        "closed_form": closed,
        "case": b.case,
        "residual": residual_json(b.residual),
    }
    rel = {n: E.to_text(r.to_expr()) for n, r in b.assignment.relations}
    if rel:
        out["relations"] = rel
    conds = [str(c) for c in b.assignment.conditions]
    if conds:
        out["conditions"] = [c + " != 0" for c in conds]
    return out


def _system_json(system) -> list:
    labels = system.labels or [str(i) for i in range(len(system.equations))]
    return [{"label": l, "equation": str(e) + " = 0"} for l, e in zip(labels, system.equations)]


def solve(problem: ProblemFile, method: str, direction: int = 1, ranges=None):
    """Run one method on a problem; returns (branches, diagnostics)."""
    diag: dict = {"problem": problem.source}
    info: dict = {}
    if method in ("ffx", "riccati"):
        if problem.is_bvp:
            raise ParseError("boundary-value problems need --method expfn")
        ode = problem.ode(direction)
        diag["ode"] = str(ode)
        run = run_ffx if method == "ffx" else run_riccati
        try:
            branches = run(ode, m=problem.degree, info=info)
        finally:
            if "degree" in info:
                diag["degree"] = info["degree"]
            if "system" in info:
                diag["system"] = _system_json(info["system"])
            diag["complex_roots_discarded"] = info.get("complex_discarded", 0)
        return branches, diag
    if method == "expfn":
        ansatz = problem.expfn_ansatz(ranges)
        diag["ranges"] = [ansatz.cn, ansatz.dn, ansatz.p, ansatz.q]
        stages: list = []
        target = problem.bvp() if problem.is_bvp else problem.ode(direction)
        diag["ode"] = str(target.ode if problem.is_bvp else target)
        try:
            branches = run_expfn(target, ansatz, stages=stages, info=info)
        finally:
            diag["stages"] = [_system_json(s.system) for s in stages]
            diag["complex_roots_discarded"] = info.get("complex_discarded", 0)
        return branches, diag
    raise ValueError(f"unknown method {method}")


def report_json(method: str, direction: int, branches, diag) -> str:
    doc = {
        "method": method,
        "direction": direction,
        "branches": [branch_json(b) for b in branches],
        "diagnostics": diag,
    }
    return json.dumps(doc, indent=2)


def report_text(method: str, branches, diag) -> str:
    lines = [f"method: {method}", f"equation: {diag.get('ode', '')}"]
    if "degree" in diag:
        lines.append(f"balance degree: {diag['degree']}")
    for i, b in enumerate(branches, 1):
        lines.append(f"branch {i}" + (f" [{b.case}]" if b.case else ""))
        for u in b.unknowns:
            v = "free" if u in b.free else E.to_text(b.value(u).to_expr())
            lines.append(f"  {u} = {v}")
        if b.closed_form is not None:
            lines.append(f"  profile: {b.closed_form.text()}")
        if b.residual is not None:
            r = b.residual
            status = "pass" if r.passed else "FAIL"
            lines.append(f"  residual: {r.max_residual:.3e} on [{r.interval[0]:g}, {r.interval[1]:g}] x {r.points} ({status})")
    n = diag.get("complex_roots_discarded")
    if n:
        lines.append(f"complex roots discarded: {n}")
    return "\n".join(lines)


def report_latex(method: str, branches, diag) -> str:
    out = [f"% method: {method}"]
    for i, b in enumerate(branches, 1):
        out.append(f"% branch {i}")
        out.append("\\begin{align*}")
        rows = []
        for u in b.unknowns:
            v = E.Sym(u) if u in b.free else b.value(u).to_expr()
            rows.append(f"{E.to_latex(E.Sym(u))} &= {E.to_latex(v)}")
        if b.closed_form is not None:
            var = E.to_latex(E.Sym(b.closed_form.variable))
            rows.append(f"u({var}) &= {b.closed_form.latex()}")
        out.append(" \\\\\n".join(rows))
        out.append("\\end{align*}")
    return "\n".join(out)


def verify_file(problem: ProblemFile, doc: dict) -> list[tuple[int, ResidualReport]]:
    """Recompute the residual of every branch stored in a solve report."""
    direction = int(doc.get("direction", 1))
    out = []
    for i, br in enumerate(doc["branches"], 1):
        cfd = br["closed_form"]
        expr = parse(cfd["expr"])
        bindings = {k: parse(v["exact"]) for k, v in cfd["bindings"].items()}
        cf = ClosedFormSolution(br.get("case") or "", expr, cfd["variable"], dict(cfd["constants"]), bindings)
        if problem.is_bvp:
            bvp = problem.bvp()
            grid = (bvp.domain[0], bvp.domain[1], 101)
            rep = residual(bvp.ode.expr, cf, grid, dependent=problem.dependent, variable=bvp.variable)
            rep.extra.update(boundary_residuals(cf, bvp))
        else:
            eq = problem.pde().expr if problem.is_pde else problem.ode().expr
            grid = tuple(br["residual"]["grid"]["interval"]) + (br["residual"]["grid"]["points"],) \
                if br.get("residual") else DEFAULT_GRID
            rep = residual(eq, cf, grid, dependent=problem.dependent, direction=direction)
        out.append((i, rep))
    return out


def demo_fisher(out) -> None:
    rep = fisher_pipeline("FFX")
    print(f"travelling-wave ODE: {rep.ode}", file=out)
    for i, b in enumerate(rep.branches, 1):
        vals = ", ".join(f"{u} = {E.to_text(v)}" for u, v in b.values().items())
        print(f"branch {i}: {vals}", file=out)
        print(f"  u(xi) = {b.closed_form.text()}", file=out)
        for k, v in b.closed_form.limits.items():
            print(f"  limit {k}: u = {E.to_text(v)}", file=out)
        print(f"  residual {b.residual.max_residual:.3e} ({'pass' if b.residual.passed else 'FAIL'})", file=out)
    print("cross-method equivalence:", file=out)
    for k, v in rep.equivalence.items():
        extra = rep.details.get(k)
        print(f"  {k}: {v}" + (f" ({extra})" if extra else ""), file=out)


def demo_bratu(out) -> None:
    res = bratu_pipeline()
    print(f"transformed equation: {res.problem.ode}", file=out)
    for i, st in enumerate(res.stages, 1):
        print(f"stage {i} equations:", file=out)
        for row in _system_json(st.system):
            print(f"  [{row['label']}] {row['equation']}", file=out)
    b = res.branch
    for u in ("am1", "a0", "a1", "lambda"):
        print(f"{u} = {E.to_text(b.value(u).to_expr())}", file=out)
    print(f"v(x) = {E.to_text(res.family)}", file=out)
    a_c, l_c = res.curve.critical
    print(f"alpha_c = {a_c:.8f}", file=out)
    print(f"lambda_c = {l_c:.8f}", file=out)
    print("alpha     lambda(alpha)  residual   bc", file=out)
    for a in (0.5, 1.0, a_c, 2.0, 3.0):
        rep = bratu_solution_check(a, res)
        bc = max(rep.extra.values())
        print(f"{a:<9.6f} {res.curve(a):<14.10f} {rep.max_residual:.1e}  {bc:.1e}", file=out)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wavecraft", description="Exact travelling-wave solutions of polynomial PDEs.")
    sub = ap.add_subparsers(dest="command", required=True)
    s = sub.add_parser("solve", help="solve a problem file")
    s.add_argument("file")
    s.add_argument("--method", choices=("ffx", "riccati", "expfn"), default="ffx")
    s.add_argument("--direction", choices=("+", "-"), default="+", help="xi = x - c*t (+) or x + c*t (-)")
    s.add_argument("--ranges", help="exp-function exponent ranges cN,dN,p,q")
    s.add_argument("--output", choices=("json", "text", "latex"), default="text")
    v = sub.add_parser("verify", help="re-check a JSON solution report against a problem file")
    v.add_argument("file")
    v.add_argument("solution")
    d = sub.add_parser("demo", help="run a worked example")
    d.add_argument("name", choices=("fisher", "bratu"))
    return ap


def _ranges(text: str | None):
    if text is None:
        return None
    try:
        vals = tuple(int(t) for t in text.split(","))
    except ValueError:
        vals = ()
    if len(vals) != 4 or min(vals) < 0:
        raise ParseError("--ranges needs four non-negative integers cN,dN,p,q")
    return vals


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors, which here means "no exact solution"
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        if args.command == "solve":
            problem = load_problem(args.file)
            direction = 1 if args.direction == "+" else -1
            branches, diag = solve(problem, args.method, direction, _ranges(args.ranges))
            if args.output == "json":
                print(report_json(args.method, direction, branches, diag), file=out)
            elif args.output == "latex":
                print(report_latex(args.method, branches, diag), file=out)
            else:
                print(report_text(args.method, branches, diag), file=out)
            return EXIT_OK
        if args.command == "verify":
            problem = load_problem(args.file)
            with open(args.solution) as fh:
                doc = json.load(fh)
            ok = True
            for i, rep in verify_file(problem, doc):
                status = "pass" if rep.passed else "FAIL"
                ok &= rep.passed
                extra = "".join(f", {k} {v:.1e}" for k, v in rep.extra.items())
                print(f"branch {i}: max residual {rep.max_residual:.3e}{extra} ({status})", file=out)
            return EXIT_OK if ok else EXIT_FAIL
        if args.command == "demo":
            (demo_fisher if args.name == "fisher" else demo_bratu)(out)
            return EXIT_OK
    except (ParseError, NonPolynomial, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT
    except BalanceError as exc:
        print(f"balance failure: {exc}", file=err)
        return EXIT_BALANCE
    except NoExactSolution as exc:
        print(f"no exact solution: {exc}", file=err)
        return EXIT_NO_SOLUTION
    except TooHard as exc:
        print(f"solver gave up: {exc}", file=err)
        if exc.system:
            for e in exc.system:
                print(f"  {e} = 0", file=err)
        return EXIT_TOO_HARD
    except WavecraftError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_FAIL
    return EXIT_FAIL
