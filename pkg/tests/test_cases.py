import math

import numpy as np
import pytest

import oracles
from wavecraft import expr as E
from wavecraft.cases import (
    bratu_pipeline,
    bratu_solution_check,
    critical_point,
    fisher_branches,
    fisher_pipeline,
    temperature,
    transform_bratu,
)
from wavecraft.errors import NoBalance, NoExactSolution, NoSignChange
from wavecraft.expansion import run_ffx, run_riccati
from wavecraft.parser import parse
from wavecraft.poly import to_ratfunc
from wavecraft.radical import RadicalNumber

ALPHAS = list(np.linspace(0.1, 3.0, 20))
# 50-digit evaluation of the curve maximum
ALPHA_C = 1.19967864025773
LAMBDA_C = 0.878457679781291


def same(a, b):
    return to_ratfunc(E.sub(a, b)).is_zero()


@pytest.fixture(scope="module")
def bratu():
    return bratu_pipeline()


@pytest.mark.parametrize("method", ["FFX", "RICCATI", "EXPFN"])
def test_fisher_pipeline(method):
    rep = fisher_pipeline(method)
    assert rep.branches
    assert all(rep.equivalence.values()) and len(rep.equivalence) == 4
    speed = RadicalNumber(5) / RadicalNumber.sqrt_of(6)
    assert speed in {b.exact("c") for b in rep.branches}


def test_fisher_branch_counts():
    assert len(fisher_branches("FFX")) == 2
    assert len(fisher_branches("RICCATI")) == 2
    with pytest.raises(ValueError):
        fisher_branches("nope")


def test_transform_bratu():
    two = transform_bratu(2).ode
    assert same(two.expr, E.substitute(parse("2*(w1^2 - v*w2) + lambda"),
                                       {"w1": E.deriv("v", (E.XI,)), "w2": E.deriv("v", (E.XI, E.XI))}))
    one = transform_bratu(1).ode
    assert same(one.expr, E.substitute(parse("lambda*v + w1^2 - v*w2"),
                                       {"w1": E.deriv("v", (E.XI,)), "w2": E.deriv("v", (E.XI, E.XI))}))
    assert transform_bratu(3).ode.order == 2
    with pytest.raises(ValueError):
        transform_bratu(0)


def test_critical_point(bratu):
    a, lam = bratu.curve.critical
    assert abs(a - 1.19967864) < 1e-6
    assert abs(lam - 0.8784576797) < 1e-8
    assert abs(a - ALPHA_C) < 1e-8 and abs(lam - LAMBDA_C) < 1e-12


def test_critical_point_needs_sign_change(bratu):
    with pytest.raises(NoSignChange):
        critical_point(bratu.curve, bracket=(1.5, 2.5))


@pytest.mark.parametrize("alpha", ALPHAS)
def test_bratu_family_along_the_curve(bratu, alpha):
    lam = bratu.curve(alpha)
    assert lam > 0
    assert math.isclose(lam, oracles.bratu_oracle(alpha)[0], rel_tol=1e-12)
    rep = bratu_solution_check(alpha, bratu)
    assert rep.max_residual < 1e-10
    assert rep.extra["bc0"] < 1e-12 and rep.extra["bc1"] < 1e-12
    u = temperature(bratu)
    vals = [E.eval_numeric(u, {"alpha": alpha, "x": x}) for x in np.linspace(0, 1, 51)]
    assert min(vals) >= -1e-15
    assert abs(vals[-1]) < 1e-14
    assert lam <= bratu.curve.critical[1] + 1e-15


@pytest.mark.parametrize("alpha", [1.0, ALPHA_C, 2.0])
def test_bratu_solution_check(bratu, alpha):
    assert bratu_solution_check(alpha, bratu).passed


def test_slope_changes_sign_once(bratu):
    d = bratu.curve.slope()
    signs = [E.eval_numeric(d, {"alpha": a}) > 0 for a in np.linspace(0.01, 3.0, 300)]
    assert sum(1 for s, t in zip(signs, signs[1:]) if s != t) == 1


def test_bratu_negative_control():
    o = transform_bratu(2).ode
    for run in (run_ffx, run_riccati):
        with pytest.raises((NoBalance, NoExactSolution)):
            run(o)
