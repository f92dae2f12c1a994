import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from strategies import small_polys_in
from wavecraft import expr as E
from wavecraft.cases import fisher_ode, transform_bratu
from wavecraft.errors import LinearEquation, NoBalance, NoExactSolution
from wavecraft.expansion import (
    FFX,
    RICCATI,
    AnsatzPoly,
    GExpParams,
    balance_degree,
    build_system,
    g_to_f,
    run_ffx,
    run_riccati,
    same_branch_sets,
    w_derivative_closure,
)
from wavecraft.parser import parse
from wavecraft.poly import MultiPoly, Poly, normalize_poly
from wavecraft.polysolve import verify_assignment
from wavecraft.radical import RadicalNumber
from wavecraft.twreduce import EvolutionPDE, ode_from_expr, reduce_to_ode

SPEED = RadicalNumber(5) / RadicalNumber.sqrt_of(6)
w, g = Poly.var("w"), Poly.var("gamma")


def ode(text):
    return ode_from_expr(parse(text))


@pytest.mark.parametrize("text, m", [("u'' + c*u' + u*(1 - u)", 2), ("u''' + u*u'", 2), ("u'' + u^3", 1),
                                     ("u'' - u + u^2 + c*u'", 2), ("u' + u^2", 1)])
def test_balance_degree(text, m):
    assert balance_degree(ode(text)) == m


def test_balance_failures():
    with pytest.raises(LinearEquation):
        balance_degree(ode("u'' + c*u'"))
    with pytest.raises(NoBalance):
        balance_degree(transform_bratu(2).ode)
    with pytest.raises(NoBalance):
        balance_degree(ode("u' + u*u'''"))


def test_closure_rules():
    assert w_derivative_closure(w, FFX) == -(w * w + g)
    assert w_derivative_closure(w, RICCATI) == w * w + g
    assert w_derivative_closure(w * w, FFX) == w ** 3 * -2 - g * w * 2


def test_closure_on_multipoly():
    p = normalize_poly(parse("b2*w^2 + b1*w + b0"), ["w"])
    out = w_derivative_closure(p, FFX)
    assert isinstance(out, MultiPoly)
    assert out.degree() == 3
    assert E.to_text(out.coefficient((3,))) == "-2*b2"


@given(small_polys_in(), st.sampled_from([FFX, RICCATI]))
@settings(max_examples=250)
def test_closure_degree_law(p, variant):
    d = p.degree("w")
    assert w_derivative_closure(p, variant).degree("w") == d + 1


def test_fisher_system_shape():
    sys = build_system(fisher_ode(), AnsatzPoly(2))
    assert sys.unknowns == ("b0", "b1", "b2", "gamma", "c")
    assert len(sys.equations) == 5
    assert sys.equations[0] == Poly.var("b2") * 6 - Poly.var("b2") ** 2


def test_fisher_ffx_branches():
    branches = run_ffx(fisher_ode())
    assert len(branches) == 2
    assert {b.exact("c") for b in branches} == {SPEED, -SPEED}
    for b in branches:
        c = b.exact("c")
        assert b.exact("b2") == 6
        assert b.exact("b1") == -6 * c / 5
        assert b.exact("gamma") == -c * c / 100
        gamma = b.exact("gamma")
        assert b.exact("b0") == (25 * (8 * gamma + 1) - c * c) / 50
        assert b.exact("b0") == Fraction(1, 4)
        assert b.exact("gamma") == Fraction(-1, 24)
        assert b.residual.passed
        assert b.case == "HYPERBOLIC" or b.case == "EXPONENTIAL"


def test_fisher_relations_are_symbolic():
    b = run_ffx(fisher_ode(), verify=False)[0]
    rel = dict((n, str(r)) for n, r in b.assignment.relations)
    assert rel["b1"] == "-6/5*c"
    assert rel["gamma"] == "-1/100*c^2"


def test_riccati_matches_ffx():
    ffx, ric = run_ffx(fisher_ode()), run_riccati(fisher_ode())
    assert same_branch_sets(ffx, ric)
    for b in ric:
        assert b.exact("a1") == 6 * b.exact("c") / 5


def test_advection_family():
    o = reduce_to_ode(EvolutionPDE(parse("u_t + u_x")))
    with pytest.raises(LinearEquation):
        run_ffx(o)
    branches = run_ffx(o, m=1)
    assert len(branches) == 1
    assert branches[0].exact("c") == 1
    assert set(branches[0].free) >= {"b0", "b1"}


def test_heat_equation_has_no_polynomial_branch():
    o = reduce_to_ode(EvolutionPDE(parse("u_t - u_xx")))
    info = {}
    try:
        branches = run_ffx(o, m=1, info=info)
    except NoExactSolution:
        return
    for b in branches:
        assert b.residual.passed


def test_riccati_cubic_has_no_real_branch():
    info = {}
    with pytest.raises(NoExactSolution):
        run_riccati(ode("u'' + u^3"), info=info)
    assert info["complex_discarded"] > 0


@pytest.mark.parametrize("params, gamma, b", [
    (GExpParams(2, 3, (0, 1)), 2, [-1, 1]),
    (GExpParams(2, 1, (0, 0, 1)), 0, [1, -2, 1]),
])
def test_g_to_f_examples(params, gamma, b):
    got_gamma, got_b = g_to_f(params)
    assert got_gamma == gamma
    assert got_b == [RadicalNumber(v) for v in b]


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=100)
def test_g_to_f_equivalence(seed):
    rng = random.Random(seed)
    lam, mu = oracles.random_rational(rng), oracles.random_rational(rng)
    a = [oracles.random_rational(rng) for _ in range(3)]
    assert oracles.g_to_f_max_error(lam, mu, a, rng) < 1e-12


def test_every_branch_satisfies_its_system():
    info = {}
    for run in (run_ffx, run_riccati):
        for b in run(fisher_ode(), info=info):
            assert verify_assignment(info["system"], b.assignment)


def test_bratu_is_out_of_reach():
    o = transform_bratu(2).ode
    for run in (run_ffx, run_riccati):
        with pytest.raises((NoBalance, NoExactSolution)):
            run(o)
