from __future__ import annotations

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from hkrlab.exactalg import QQ, ZZ, MultiPoly, PrimeField
from hkrlab.testrings import DualNumbers, FiniteField, PolyRing
from hkrlab.witt import (
    WittError,
    build_witt_law,
    char_zero_fixed_points_check,
    enumerate_kernel,
    field_point_surjectivity_check,
    frobenius,
    frobenius_modp,
    ghost,
    ghost_polynomials,
    gm_action,
    gp_map,
    is_cyclic_group,
    teichmuller,
    witt_add,
    witt_mul,
    witt_sub,
    witt_vector,
    zero_vector,
)


def to_sympy(f: MultiPoly):
    syms = sympy.symbols(f.variables)
    return sympy.expand(sum((c * sympy.prod([s**e for s, e in zip(syms, exps)]) for exps, c in f.terms.items()), sympy.Integer(0)))


def sympy_ghost_solve(p: int, m: int, op):
    """Oracle: solve the Ghost equations over Q with sympy, one coordinate at a time."""
    x = sympy.symbols(f"x_0:{m}")
    y = sympy.symbols(f"y_0:{m}")
    gx = [sum(p**j * x[j] ** (p ** (n - j)) for j in range(n + 1)) for n in range(m)]
    gy = [sum(p**j * y[j] ** (p ** (n - j)) for j in range(n + 1)) for n in range(m)]
    sols = []
    for n in range(m):
        rest = op(gx[n], gy[n]) - sum(p**j * sols[j] ** (p ** (n - j)) for j in range(n))
        sols.append(sympy.expand(rest / p**n))
    return sols


@pytest.mark.parametrize("p,m", [(2, 2), (2, 3), (3, 2), (5, 2)])
def test_laws_match_sympy_ghost_solve(p, m):
    law = build_witt_law(p, m)
    assert [to_sympy(f) for f in law.sum_polys] == sympy_ghost_solve(p, m, lambda a, b: a + b)
    assert [to_sympy(f) for f in law.product_polys] == sympy_ghost_solve(p, m, lambda a, b: a * b)


def test_p2_m2_closed_forms():
    law = build_witt_law(2, 2)
    x0, x1, y0, y1 = sympy.symbols("x_0 x_1 y_0 y_1")
    assert to_sympy(law.sum_polys[1]) == x1 + y1 - x0 * y0
    assert to_sympy(law.product_polys[1]) == sympy.expand(x0**2 * y1 + x1 * y0**2 + 2 * x1 * y1)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_first_components(p):
    law = build_witt_law(p, 1)
    x0, y0 = sympy.symbols("x_0 y_0")
    assert to_sympy(law.sum_polys[0]) == x0 + y0
    assert to_sympy(law.product_polys[0]) == x0 * y0


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_integral_and_ghost_natural(p, m):
    law = build_witt_law(p, m)
    assert law.is_integral()
    assert all(law.check_ghost_identities().values())


def test_bounds_enforced():
    with pytest.raises(WittError):
        build_witt_law(11, 2)
    with pytest.raises(WittError):
        build_witt_law(2, 6)
    with pytest.raises(WittError):
        build_witt_law(4, 2)


def test_ghost_examples():
    assert ghost(witt_vector(2, (1, 0, 0), ZZ)).components == (1, 1, 1)
    a = 3
    assert ghost(witt_vector(3, (a, 0, 0), ZZ)).components == (a, a**3, a**9)
    x0, x1 = sympy.symbols("x_0 x_1")
    g = ghost_polynomials(2, 2)
    assert [to_sympy(f) for f in g] == [x0, x0**2 + 2 * x1]


def test_addition_examples():
    w = witt_vector(2, (1, 1), ZZ)
    assert witt_add(w, zero_vector(2, 2, ZZ)) == w
    assert witt_add(w, w).coords == (2, 1)


ints = st.integers(-50, 50)


@given(st.lists(ints, min_size=3, max_size=3), st.lists(ints, min_size=3, max_size=3), st.sampled_from([2, 3]))
def test_ghost_additive_and_multiplicative(a, b, p):
    u, v = witt_vector(p, a, ZZ), witt_vector(p, b, ZZ)
    gu, gv = ghost(u).components, ghost(v).components
    assert ghost(witt_add(u, v)).components == tuple(x + y for x, y in zip(gu, gv))
    assert ghost(witt_mul(u, v)).components == tuple(x * y for x, y in zip(gu, gv))
    assert ghost(witt_sub(u, v)).components == tuple(x - y for x, y in zip(gu, gv))
    assert ghost(frobenius(u)).components == gu[1:]


def test_frobenius_examples():
    assert frobenius(witt_vector(2, (3, 5), ZZ)).coords == (19,)
    F2 = PrimeField(2)
    w = witt_vector(2, (1, 0), F2)
    assert frobenius_modp(w) == w


@given(st.integers(-20, 20), st.sampled_from([2, 3]))
def test_frobenius_of_teichmuller(a, p):
    t = teichmuller(a, p, 3, ZZ)
    assert frobenius(t).coords == teichmuller(a**p, p, 2, ZZ).coords


def test_gm_action_examples():
    R = PolyRing(("a", "x0", "x1"), ZZ)
    a, x0, x1 = R.gens()
    w = witt_vector(2, (x0, x1), R)
    assert gm_action(R.one, w) == w
    assert gm_action(a, w).coords == (a * x0, a**2 * x1)
    assert witt_mul(witt_vector(2, (a, R.zero), R), w).coords == gm_action(a, w).coords


def test_gm_action_scales_ghost():
    R = PolyRing(("a", "x0", "x1", "x2"), ZZ)
    a, *xs = R.gens()
    w = witt_vector(3, xs, R)
    g = ghost(w).components
    assert ghost(gm_action(a, w)).components == tuple(a ** (3**i) * c for i, c in enumerate(g))


def test_gm_action_additive_and_commutes_with_frobenius():
    R = PolyRing(("a", "x0", "x1", "y0", "y1"), ZZ)
    a, x0, x1, y0, y1 = R.gens()
    u, v = witt_vector(2, (x0, x1), R), witt_vector(2, (y0, y1), R)
    assert gm_action(a, witt_add(u, v)) == witt_add(gm_action(a, u), gm_action(a, v))
    assert frobenius(gm_action(a, u)) == gm_action(a**2, frobenius(u))


def test_gp_map_examples():
    F2 = PrimeField(2)
    w = witt_vector(2, (1, 0), F2)
    assert gp_map(w, 1).coords == (0, 0)
    for coords in [(0, 1), (1, 1)]:
        u = witt_vector(2, coords, F2)
        assert gp_map(u, 1) == witt_sub(frobenius_modp(u), u)
        assert gp_map(u, 0) == frobenius_modp(u)


def test_kernel_counts():
    ker = enumerate_kernel("frobenius_minus_id", PrimeField(2), 2, 2)
    assert len(ker) == 4 and is_cyclic_group(ker)
    assert len(enumerate_kernel("frobenius_minus_id", FiniteField(2, 2), 2, 1)) == 2
    eps = enumerate_kernel("frobenius", DualNumbers(2), 2, 1)
    assert sorted(DualNumbers(2).format(w.coords[0]) for w in eps) == ["0", "e"]


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("m", [1, 2, 3])
def test_artin_schreier_witt_count(p, m):
    assert len(enumerate_kernel("frobenius_minus_id", PrimeField(p), p, m)) == p**m


def test_enumeration_needs_finite_ring():
    with pytest.raises(WittError, match="enumeration requires finite ring"):
        enumerate_kernel("frobenius", QQ, 2, 1)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_char_zero_fixed_points(p):
    r = char_zero_fixed_points_check(p, 2)
    assert r["fixed_points_are_diagonal"] and r["kernel_is_first_ghost_coordinate"] and r["pass"]
    assert r["kernel_ghost_basis"] == [["1", "0"]]
    deg = char_zero_fixed_points_check(p, 1)
    assert deg["degenerate"] and deg["pass"]


def test_field_points():
    r = field_point_surjectivity_check(2, 1)
    assert r["rational"]["surjective"] and r["rational"]["frobenius_minus_id_rank"] == 1
    f2 = r["finite_fields"][0]
    assert f2["field"] == "F_2" and f2["artin_schreier_image"] == 1 and f2["frobenius_image"] == 2
    for p in (3, 5):
        rows = field_point_surjectivity_check(p, 2)["finite_fields"]
        assert rows[0]["frobenius_image"] == p
        assert all(row["artin_schreier_image"] == row["artin_schreier_expected"] for row in rows)
    assert field_point_surjectivity_check(3, 2)["pass"]


def test_json_schema():
    obj = witt_vector(2, (1, 1), ZZ).to_json()
    assert obj == {"p": 2, "m": 2, "coords": ["1", "1"]}
    law = build_witt_law(2, 2).to_json(("sum",))
    assert law["sum"][1]["vars"] == ["x_0", "x_1", "y_0", "y_1"]
    assert {"exps": [1, 0, 1, 0], "coef": "-1"} in law["sum"][1]["terms"]
