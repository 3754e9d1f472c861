from __future__ import annotations

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from hkrlab.algebra import AlgebraError, KahlerModule, parse_algebra, parse_polynomial
from hkrlab.exactalg import QQ, ZZ, MultiPoly


def nf(A, text: str) -> MultiPoly:
    return A.normal_form(parse_polynomial(text, A.generators, A.ring))


def test_truncated_line():
    A = parse_algebra("Q[x]/(x^3)")
    assert nf(A, "x^4").is_zero()
    assert A.dim(2) == 1 and A.dim(3) == 0


def test_cusp_reduction_against_sympy():
    A = parse_algebra("Q[x(2),y(3)]/(y^2-x^3)")
    x, y = sympy.symbols("x y")
    _, rem = sympy.reduced(y**3, [y**2 - x**3], y, x, order="lex")
    assert str(nf(A, "y^3")) == "x^3*y"
    assert sympy.expand(rem - x**3 * y) == 0


def test_free_algebra_normal_form_is_identity():
    A = parse_algebra("Z[x,y]")
    f = parse_polynomial("3*x^2*y - y^5 + 7", A.generators, ZZ)
    assert A.normal_form(f) == f


def test_weights_and_bases():
    A = parse_algebra("Q[x(2),y(3)]/(y^2-x^3)")
    assert A.weights == (2, 3)
    # monomials x^a y^b with b <= 1
    assert [A.dim(d) for d in range(8)] == [1, 0, 1, 1, 1, 1, 1, 1]


@pytest.mark.parametrize("text", ["Q[x", "Q[x]/(z)", "F_4[x]", "Q[x(0)]"])
def test_bad_input(text):
    with pytest.raises((AlgebraError, ValueError)):
        parse_algebra(text)


def test_integral_needs_monomial_relations():
    parse_algebra("Z[x,y]/(x*y)")
    with pytest.raises(AlgebraError):
        parse_algebra("Z[x,y]/(x^2-y^2)")


def test_smoothness():
    assert parse_algebra("F_3[x,y]").is_smooth
    assert not parse_algebra("Q[x]/(x^2)").is_smooth


def test_kahler_ranks():
    assert [KahlerModule(parse_algebra("Q[x]/(x^3)")).rank(d) for d in (1, 2, 3)] == [1, 1, 0]
    # d(x^3) = 3x^2 dx vanishes mod 3, so x^2 dx survives
    assert [KahlerModule(parse_algebra("F_3[x]/(x^3)")).rank(d) for d in (1, 2, 3)] == [1, 1, 1]


coeff = st.integers(-3, 3)


def sympy_dims(rels, gens, dmax):
    """Oracle: standard monomials of sympy's grlex Groebner basis (gens listed most significant first)."""
    G = sympy.groebner(rels, *gens, order="grlex") if rels else None
    leads = [sympy.Poly(g, *gens).monoms(order="grlex")[0] for g in G.exprs] if G else []
    dims = []
    for d in range(dmax + 1):
        mons = [e for e in sympy.itermonomials(gens, d, d)]
        exps = [sympy.Poly(m, *gens).monoms()[0] for m in mons]
        dims.append(sum(1 for e in exps if not any(all(a >= b for a, b in zip(e, l)) for l in leads)))
    return dims


@given(st.lists(coeff, min_size=3, max_size=3), st.lists(coeff, min_size=4, max_size=4))
def test_hilbert_function_matches_sympy(q, c):
    x, y = sympy.symbols("x y")
    rels = [e for e in (q[0] * x**2 + q[1] * x * y + q[2] * y**2, c[0] * x**3 + c[1] * x**2 * y + c[2] * x * y**2 + c[3] * y**3) if e != 0]
    text = ",".join(str(e).replace("**", "^") for e in rels)
    A = parse_algebra(f"Q[x,y]/({text})" if rels else "Q[x,y]")
    # our tie-break makes the last generator most significant
    assert [A.dim(d) for d in range(6)] == sympy_dims(rels, (y, x), 5)


@given(st.lists(coeff, min_size=3, max_size=3), st.dictionaries(st.tuples(st.integers(0, 4), st.integers(0, 4)), coeff, max_size=5))
def test_normal_form_matches_sympy_remainder(q, f_terms):
    x, y = sympy.symbols("x y")
    rel = q[0] * x**2 + q[1] * x * y + q[2] * y**2
    if rel == 0:
        return
    A = parse_algebra(f"Q[x,y]/({str(rel).replace('**', '^')})")
    f = MultiPoly(("x", "y"), f_terms, QQ)
    G = sympy.groebner([rel], y, x, order="grlex")
    expr = sum((c * x**a * y**b for (a, b), c in f_terms.items()), sympy.Integer(0))
    _, rem = sympy.reduced(expr, list(G.exprs), y, x, order="grlex")
    ours = sum((c * x**a * y**b for (a, b), c in A.normal_form(f).terms.items()), sympy.Integer(0))
    assert sympy.expand(ours - rem) == 0
