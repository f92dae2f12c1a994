from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wavecraft.cases import fisher_ode
from wavecraft.errors import TooHard
from wavecraft.expansion import AnsatzPoly, build_system
from wavecraft.poly import Poly
from wavecraft.polysolve import Assignment, PolySystem, solve_system, verify_assignment
from wavecraft.radical import RadicalNumber

x, y, z = Poly.var("x"), Poly.var("y"), Poly.var("z")


def test_leading_fisher_equation():
    b = Poly.var("b2")
    found = solve_system(PolySystem([b * b - b * 6], ("b2",), nonzero=[b]))
    assert [str(a.value("b2")) for a in found] == ["6"]


def test_square_root_branches():
    found = solve_system(PolySystem([x * x - 2], ("x",)))
    assert sorted(float(a.numeric("x")) for a in found) == pytest.approx([-2 ** 0.5, 2 ** 0.5])
    assert {a.numeric("x") for a in found} == {RadicalNumber.sqrt_of(2), -RadicalNumber.sqrt_of(2)}


def test_complex_roots_are_counted():
    found = solve_system(PolySystem([x * x + 2], ("x",)))
    assert len(found) == 0 and found.complex_discarded == 2


def test_fisher_system():
    sys = build_system(fisher_ode(), AnsatzPoly(2))
    assert len(sys.equations) == 5
    found = solve_system(sys)
    speed = RadicalNumber(5) / RadicalNumber.sqrt_of(6)
    assert sorted(str(a.numeric("c")) for a in found) == sorted([str(speed), str(-speed)])
    for a in found:
        c = a.numeric("c")
        assert a.numeric("gamma") == -c * c / 100
        assert verify_assignment(sys, a)


def test_verify_rejects_perturbed_assignment():
    sys = build_system(fisher_ode(), AnsatzPoly(2))
    a = solve_system(sys)[0]
    bad = Assignment(dict(a.values), a.free)
    bad.values["b2"] = bad.values["b2"] + 1
    assert not verify_assignment(sys, bad)


def test_empty_system():
    assert verify_assignment(PolySystem([], ()), Assignment({}))
    assert len(solve_system(PolySystem([], ()))) == 1


def test_too_hard():
    with pytest.raises(TooHard):
        solve_system(PolySystem([x ** 3 + x * y + 1, y ** 3 + x + y * y * x - 3], ("x", "y")))


def test_deterministic_order():
    sys = build_system(fisher_ode(), AnsatzPoly(2))
    runs = [[str(sorted((k, str(v)) for k, v in a.values.items())) for a in solve_system(sys)] for _ in range(3)]
    assert runs[0] == runs[1] == runs[2]


# -- planted triangular systems ----------------------------------------------------

small = st.integers(-4, 4)
coef = st.fractions(min_value=-3, max_value=3, max_denominator=3)


@st.composite
def factor(draw, var, earlier):
    """(var - r1)(var - r2), x^2 - k or var - (affine in earlier unknowns)."""
    kind = draw(st.sampled_from(["two", "sqrt", "affine"] if earlier else ["two", "sqrt", "one"]))
    v = Poly.var(var)
    if kind == "two":
        return (v - draw(small)) * (v - draw(small))
    if kind == "sqrt":
        return v * v - draw(st.integers(1, 7))
    if kind == "one":
        return v - draw(small)
    out = v - draw(coef)
    for e in earlier:
        out = out - Poly.var(e) * draw(coef)
    return out


@st.composite
def triangular(draw):
    n = draw(st.integers(1, 3))
    names = ["x", "y", "z"][:n]
    eqs = [draw(factor(v, names[:i])) for i, v in enumerate(names)]
    return names, eqs


def numeric_roots(names, eqs):
    """Independent oracle: peel the triangle with numpy root finding."""
    sols = [{}]
    for v, e in zip(names, eqs):
        nxt = []
        for s in sols:
            coeffs = e.coeffs_in(v)
            deg = max(coeffs)
            poly = [coeffs.get(k, Poly()).evaluate(s) for k in range(deg, -1, -1)]
            for r in np.roots(poly):
                if abs(r.imag) < 1e-6:
                    nxt.append({**s, v: float(r.real)})
        sols = nxt
    uniq = []
    for s in sols:
        key = tuple(round(s[v], 6) for v in names)
        if key not in uniq:
            uniq.append(key)
    return sorted(uniq)


@given(triangular())
@settings(max_examples=200)
def test_planted_triangular_systems(case):
    names, eqs = case
    sys = PolySystem(eqs, tuple(names))
    found = solve_system(sys)
    for a in found:
        assert verify_assignment(sys, a)
    got = sorted({tuple(round(float(a.numeric(v)), 6) for v in names) for a in found})
    assert got == numeric_roots(names, eqs)


@given(st.sampled_from([1, 2, 3]), st.integers(-3, 3), st.integers(1, 3))
@settings(max_examples=200)
def test_soundness_on_expansion_systems(m, k, p):
    from wavecraft import expr as E
    from wavecraft.twreduce import ode_from_expr

    ode = ode_from_expr(E.add(E.deriv("u", (E.XI,) * 2), E.mul(E.Sym("c"), E.deriv("u", (E.XI,))),
                              E.mul(k, E.Sym("u")), E.mul(-1, E.power(E.Sym("u"), p + 1))))
    sys = build_system(ode, AnsatzPoly(m))
    try:
        found = solve_system(sys)
    except TooHard:
        return
    for a in found:
        assert verify_assignment(sys, a)
