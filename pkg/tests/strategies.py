"""Hypothesis strategies shared by the property tests."""
from fractions import Fraction

from hypothesis import strategies as st

from wavecraft import expr as E
from wavecraft.radical import RadicalNumber

SYMBOLS = ("x", "y", "a", "b2", "lambda")

rationals = st.fractions(min_value=-6, max_value=6, max_denominator=7)
nonzero_rationals = rationals.filter(lambda q: q != 0)


@st.composite
def radicals(draw, radicands=(1, 2, 3, 6)):
    terms = {r: draw(rationals) for r in draw(st.sets(st.sampled_from(radicands), min_size=1, max_size=3))}
    out = RadicalNumber(0)
    for r, q in terms.items():
        out = out + RadicalNumber.sqrt_of(r) * q if r != 1 else out + q
    return out


leaves = st.one_of(
    st.integers(-5, 9).map(E.Num),
    rationals.map(E.Num),
    st.sampled_from(SYMBOLS).map(E.Sym),
    st.sampled_from(["u_x", "u_xx", "u_t"]).map(lambda s: E.deriv("u", tuple(s.split("_")[1]))),
    st.integers(1, 2).map(lambda k: E.deriv("u", (E.XI,) * k)),
)


def _node(children):
    return st.one_of(
        st.lists(children, min_size=2, max_size=3).map(lambda xs: E.add(*xs)),
        st.lists(children, min_size=2, max_size=3).map(lambda xs: E.mul(*xs)),
        st.tuples(children, st.integers(2, 3)).map(lambda t: E.power(t[0], t[1])),
        st.tuples(st.sampled_from(SYMBOLS[:2]).map(E.Sym), st.integers(-2, -1)).map(lambda t: E.power(t[0], t[1])),
        children.map(E.exp),
        st.tuples(st.sampled_from(["cos", "sin", "cosh", "sinh"]), children).map(lambda t: E.func(*t)),
    )


expressions = st.recursive(leaves, _node, max_leaves=8)


@st.composite
def small_polys_in(draw, var="w", params=("g",), max_degree=3):
    """A polynomial expression in ``var`` with small rational/parameter coefficients."""
    from wavecraft.poly import Poly

    deg = draw(st.integers(1, max_degree))
    p = Poly()
    for k in range(deg + 1):
        c = Poly.const(draw(rationals))
        if draw(st.booleans()):
            c = c + Poly.var(draw(st.sampled_from(params))) * draw(rationals)
        if k == deg and c.is_zero():
            c = Poly.const(draw(nonzero_rationals))
        p = p + c * Poly.var(var, k)
    return p
