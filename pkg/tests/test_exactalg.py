from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from hkrlab.exactalg import (
    QQ,
    ZZ,
    ExactMatrix,
    IntegralityError,
    MultiPoly,
    PLocalIntegers,
    PrimeField,
    invariant_factors,
    kernel_basis,
    parse_ring,
    rank,
    smith_normal_form,
    solve,
)


def diag(D: ExactMatrix) -> list[int]:
    return [D.entries[i][i] for i in range(min(D.shape))]


def test_snf_two_by_two():
    D, U, V = smith_normal_form(ExactMatrix.from_rows(ZZ, [[2, 4], [6, 8]]))
    assert [abs(x) for x in diag(D)] == [2, 4]


def test_snf_identity_and_zero():
    I = ExactMatrix.identity(ZZ, 3)
    assert smith_normal_form(I)[0] == I
    Z = ExactMatrix.from_rows(ZZ, [[0]])
    assert smith_normal_form(Z)[0] == Z


matrices = st.integers(1, 8).flatmap(
    lambda m: st.integers(1, 8).flatmap(
        lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=m, max_size=m)
    )
)


@given(matrices)
def test_snf_random_against_sympy(rows):
    M = ExactMatrix.from_rows(ZZ, rows)
    D, U, V = smith_normal_form(M)
    assert U @ M @ V == D
    assert all(D.entries[i][j] == 0 for i in range(D.rows) for j in range(D.cols) if i != j)
    d = [abs(x) for x in diag(D) if x]
    assert all(b % a == 0 for a, b in zip(d, d[1:]))
    assert abs(sympy.Matrix(U.to_lists()).det()) == 1
    assert abs(sympy.Matrix(V.to_lists()).det()) == 1
    oracle = [abs(int(x)) for x in sympy_snf(sympy.Matrix(rows), domain=sympy.ZZ).diagonal() if x]
    assert d == oracle


def test_kernel_examples():
    k = kernel_basis(ExactMatrix.from_rows(PrimeField(2), [[1, 1]]))
    assert k == [[1, 1]]
    assert kernel_basis(ExactMatrix.identity(QQ, 3)) == []
    (v,) = kernel_basis(ExactMatrix.from_rows(QQ, [[1, 2], [2, 4]]))
    assert v[0] * -1 == 2 * v[1]  # proportional to (2, -1)


@given(st.lists(st.lists(st.integers(-5, 5), min_size=4, max_size=4), min_size=1, max_size=4))
def test_kernel_dimension_over_q(rows):
    M = ExactMatrix.from_rows(QQ, rows)
    ker = kernel_basis(M)
    assert len(ker) == 4 - sympy.Matrix(rows).rank()
    assert all(not any(M.apply(v)) for v in ker)


def test_solve_and_rank():
    M = ExactMatrix.from_rows(QQ, [[1, 1], [0, 2]])
    assert solve(M, [3, 4]) == [1, 2]
    assert rank(ExactMatrix.from_rows(PrimeField(3), [[1, 2], [2, 1]])) == 1


def test_plocal_units():
    R = PLocalIntegers(3)
    assert R.is_unit(2) and not R.is_unit(6)
    assert invariant_factors(ExactMatrix.from_rows(ZZ, [[2, 0], [0, 3]])) in ([1, 6], [-1, 6], [1, -6])


def test_parse_ring():
    assert parse_ring("F_5") == PrimeField(5)
    assert parse_ring("Q") == QQ and parse_ring("Z") == ZZ
    with pytest.raises(ValueError):
        parse_ring("F_6")


XY = ("x", "y")


def test_poly_examples():
    x, y = MultiPoly.gens(XY, ZZ)
    f = x**2 + y**2 - (x + y) ** 2
    assert f.divide_exactly_by_integer(2) == -x * y
    assert (x + y).substitute({"x": 0}) == y
    assert x * x == MultiPoly.monomial(XY, (2, 0), 1, ZZ)


def test_inexact_division_raises():
    x, y = MultiPoly.gens(XY, ZZ)
    with pytest.raises(IntegralityError):
        (x + 2 * y).divide_exactly_by_integer(2)


polys = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), st.integers(-20, 20), max_size=5).map(
    lambda t: MultiPoly(XY, t, ZZ)
)


@given(polys, polys, polys)
def test_distributivity(f, g, h):
    assert (f + g) * h == f * h + g * h


@given(polys, st.integers(-4, 4), st.integers(-4, 4))
def test_evaluation_matches_sympy(f, a, b):
    sx, sy = sympy.symbols("x y")
    expr = sum((c * sx**e[0] * sy**e[1] for e, c in f.terms.items()), sympy.Integer(0))
    assert f.evaluate([a, b]) == expr.subs({sx: a, sy: b})


def test_rational_coefficients():
    x, _ = MultiPoly.gens(XY, QQ)
    assert (x * Fraction(1, 2)).coefficient((1, 0)) == Fraction(1, 2)
