import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from wavecraft import expr as E
from wavecraft.cases import fisher_ode
from wavecraft.closedform import (
    EXPONENTIAL,
    HYPERBOLIC,
    LINEAR,
    TRIG,
    assemble_F,
    build_u,
    case_of,
    exp_rate,
    hyperbolic_to_exponential,
    to_exponential_form,
)
from wavecraft.errors import NonNegativeGamma
from wavecraft.expansion import run_ffx
from wavecraft.parser import parse
from wavecraft.radical import RadicalNumber
from wavecraft.verify import equivalence_check

XI = E.XI


def test_assemble_branches():
    assert assemble_F(1).expr == parse("c1*cos(xi) + c2*sin(xi)")
    assert assemble_F(0).expr == parse("c1 + c2*xi")
    hyp = assemble_F(Fraction(-1, 24))
    assert hyp.case == HYPERBOLIC
    arg = next(n.arg for n in E.walk(hyp.expr) if isinstance(n, E.Func) and n.name == "cosh")
    assert math.isclose(E.eval_numeric(arg, {XI: 1.0}), 1 / (2 * math.sqrt(6)))


def test_case_tags():
    assert (case_of(2), case_of(0), case_of(-3)) == (TRIG, LINEAR, HYPERBOLIC)


def test_exponential_form():
    assert to_exponential_form(-1, 1, 0) == E.exp(E.Sym(XI))
    assert hyperbolic_to_exponential(1, 0) == (Fraction(1, 2), Fraction(1, 2))
    assert math.isclose(E.eval_numeric(exp_rate(Fraction(-1, 24))), 1 / (2 * math.sqrt(6)))
    with pytest.raises(NonNegativeGamma):
        exp_rate(0)


gammas = st.fractions(min_value=-4, max_value=4, max_denominator=12).filter(lambda g: g != 0)
consts = st.floats(-3, 3).filter(lambda v: abs(v) > 1e-3)


@given(gammas, consts, consts, st.lists(st.floats(-2, 2), min_size=50, max_size=50))
@settings(max_examples=200)
def test_assembled_F_solves_ode(gamma, c1, c2, xs):
    F = assemble_F(gamma).expr
    F2 = E.differentiate(E.differentiate(F, XI), XI)
    res = E.add(F2, E.mul(E.Num(gamma), F))
    for x in xs:
        assert abs(E.eval_numeric(res, {XI: x, "c1": c1, "c2": c2})) < 1e-12 * max(1.0, abs(c1) + abs(c2)) * 50


@given(gammas.filter(lambda g: g < 0), consts, consts, st.lists(st.floats(-2, 2), min_size=20, max_size=20))
@settings(max_examples=200)
def test_exponential_matches_hyperbolic(gamma, c1, c2, xs):
    hyp = assemble_F(gamma).expr
    e1, e2 = hyperbolic_to_exponential(c1, c2)
    ex = to_exponential_form(gamma, "k1", "k2")
    for x in xs:
        a = E.eval_numeric(hyp, {XI: x, "c1": c1, "c2": c2})
        b = E.eval_numeric(ex, {XI: x, "k1": e1, "k2": e2})
        assert abs(a - b) <= 1e-12 * max(1.0, abs(a))


@pytest.fixture(scope="module")
def fisher():
    return {str(b.exact("c")): b for b in run_ffx(fisher_ode())}


@pytest.mark.parametrize("C", [0.5, 1.0, 2.0])
def test_fisher_profile(fisher, C):
    b = fisher[str(RadicalNumber(5) / RadicalNumber.sqrt_of(6))]
    u = b.closed_form.bound({"C": C})
    for k in range(101):
        x = -5 + k / 10
        assert abs(E.eval_numeric(u, {XI: x}) - oracles.fisher_profile(C, x)) < 1e-12


def test_fisher_compact_text(fisher):
    b = fisher[str(RadicalNumber(5) / RadicalNumber.sqrt_of(6))]
    assert b.closed_form.case == EXPONENTIAL
    assert b.closed_form.text() == "1/(1 + C*exp(1/6*sqrt(6)*xi))^2"
    assert E.to_text(b.closed_form.limits["C=0"]) == "1"
    assert E.to_text(b.closed_form.limits["C=inf"]) == "0"
    assert "\\exp" in b.closed_form.latex() or "e^" in b.closed_form.latex()


def test_mirror_branch_under_reflection(fisher):
    s = RadicalNumber(5) / RadicalNumber.sqrt_of(6)
    plus, minus = fisher[str(s)], fisher[str(-s)]
    res = equivalence_check(plus.closed_form.bound(), minus.closed_form.expr, variable_map=E.neg(E.Sym(XI)), fit="C")
    assert res.equivalent


def test_constant_ansatz():
    cf = build_u([7], -1)
    assert cf.expr == E.Num(7)


def test_trig_and_linear_profiles():
    cf = build_u([0, 1], 1)
    assert cf.case == TRIG
    x = 0.3
    assert math.isclose(E.eval_numeric(cf.expr, {XI: x, "C": 2.0}),
                        (-2 * math.sin(x) + math.cos(x)) / (2 * math.cos(x) + math.sin(x)))
    lin = build_u([0, 1], 0)
    assert lin.case == LINEAR
    assert math.isclose(E.eval_numeric(lin.expr, {XI: x, "C": 2.0}), 1 / (2 + x))
