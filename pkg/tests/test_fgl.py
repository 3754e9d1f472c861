from __future__ import annotations

from math import comb, factorial

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from hkrlab.exactalg import ZZ, MultiPoly, PrimeField
from hkrlab.fgl import (
    additive_fgl,
    cartier_interpolation_check,
    distributions,
    divided_power_algebra,
    gr_matches_divided_powers,
    interpolation_fgl,
    intvalued_structure,
    multiplicative_fgl,
    multiplicative_matches_intvalued,
)

X, Y = sympy.symbols("X Y")


def as_sympy(poly: MultiPoly):
    return sum((sympy.Integer(int(c)) * X ** e[0] * Y ** e[1] for e, c in poly.terms.items()), sympy.Integer(0))


def forward_difference_coords(f, top):
    """Oracle: the coefficient of C(x, k) in an integer-valued f is the k-th forward difference at 0."""
    x = sympy.Symbol("x")
    vals = [f.subs(x, v) for v in range(top + 1)]
    return {k: int(sum((-1) ** (k - i) * comb(k, i) * vals[i] for i in range(k + 1))) for k in range(top + 1)}


def test_endpoints():
    assert as_sympy(additive_fgl(4).series) == X + Y
    assert as_sympy(multiplicative_fgl(4).series) == X + Y + X * Y


@pytest.mark.parametrize("lam", [0, 1, 2, -1])
@pytest.mark.parametrize("ring", [ZZ, PrimeField(2), PrimeField(3)], ids=str)
def test_group_law_axioms(lam, ring):
    assert all(interpolation_fgl(lam, 6, ring).check_axioms().values())


@pytest.mark.parametrize("lam", [0, 1, 2, -3])
def test_inverse_series(lam):
    T = sympy.Symbol("T")
    expected = sympy.series(-T / (1 + lam * T), T, 0, 7).removeO()
    got = interpolation_fgl(lam, 6).inverse_series()
    assert [int(c) for c in got] == [int(expected.coeff(T, k)) for k in range(1, 7)]


@pytest.mark.parametrize("lam", [0, 1, 2])
def test_distribution_products_are_power_coefficients(lam):
    F = interpolation_fgl(lam, 6)
    D = distributions(F)
    series = X + Y + lam * X * Y
    for (i, j), v in D.mult.items():
        want = {n: int(sympy.Poly(sympy.expand(series**n), X, Y).coeff_monomial(X**i * Y**j)) for n in range(i + j + 1)}
        assert {n: int(c) for n, c in v.items()} == {n: c for n, c in want.items() if c}


def test_additive_powers_of_first_distribution():
    D = distributions(additive_fgl(6))
    v = D.basis_vec(0)
    for n in range(1, 7):
        v = D.mul(v, D.basis_vec(1))
        assert {k: int(c) for k, c in v.items()} == {n: factorial(n)}


@pytest.mark.parametrize("F", [additive_fgl(6), multiplicative_fgl(6), interpolation_fgl(2, 6)], ids=["add", "mult", "lam2"])
def test_distributions_hopf_axioms(F):
    assert all(distributions(F).check_axioms().values())


def test_intvalued_small_products():
    V = intvalued_structure(4)
    assert V.product(1, 1) == {1: 1, 2: 2}
    assert V.product(1, 2) == {2: 2, 3: 3}
    assert V.hopf.comult[2] == {(0, 2): 1, (1, 1): 1, (2, 0): 1}


@given(st.integers(0, 6), st.integers(0, 6))
def test_intvalued_products_match_forward_differences(i, j):
    x = sympy.Symbol("x")
    V = intvalued_structure(12)
    want = forward_difference_coords(sympy.binomial(x, i) * sympy.binomial(x, j), i + j)
    assert V.product(i, j) == {k: c for k, c in want.items() if c}


@pytest.mark.parametrize("n", range(7))
def test_intvalued_coproduct_and_antipode(n):
    x = sympy.Symbol("x")
    V = intvalued_structure(6).hopf
    # C(x + y, n) = Σ C(x, a) C(y, n - a)
    assert V.comult[n] == {(a, n - a): 1 for a in range(n + 1)}
    want = forward_difference_coords(sympy.expand_func(sympy.binomial(-x, n)), n)
    assert {k: int(c) for k, c in V.antipode[n].items()} == {k: c for k, c in want.items() if c}


def test_multiplicative_distributions_are_intvalued():
    assert multiplicative_matches_intvalued(8)["pass"]


def test_gr_is_divided_powers():
    r = gr_matches_divided_powers(12)
    assert r["pass"] and r["multiplicative"] and r["gr_ranks_ok"] and r["mismatches"] == []


def test_divided_powers_axioms():
    assert all(divided_power_algebra(6).check_axioms().values())


@pytest.mark.parametrize("p,N,ms", [(2, 1, [0, 1]), (2, 3, [0, 1, 2]), (3, 2, [0, 1]), (3, 6, [0, 1])])
def test_cartier_interpolation(p, N, ms):
    r = cartier_interpolation_check(p, N)
    assert r["verdict"] == "pass"
    assert sorted({row["m"] for row in r["rows"]}) == ms


def test_bounds():
    with pytest.raises(ValueError):
        intvalued_structure(13)
    with pytest.raises(ValueError):
        distributions(multiplicative_fgl(9))
    with pytest.raises(ValueError):
        interpolation_fgl(1, 1)
    with pytest.raises(ValueError):
        cartier_interpolation_check(5, 2)
