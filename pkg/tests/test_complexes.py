from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hkrlab.algebra import parse_algebra
from hkrlab.complexes import (
    ChainComplex,
    ComplexError,
    FilteredComplex,
    HomologyGroup,
    MixedComplex,
    associated_graded,
    cone,
    homology,
    identity_map,
    point,
    tensor,
    total_u_complex,
    u_homology,
)
from hkrlab.exactalg import QQ, ZZ, ExactMatrix, PLocalIntegers
from hkrlab.hochschild import de_rham


def times(R, k: int) -> ChainComplex:
    """0 -> R --k--> R -> 0 in degrees 1, 0."""
    return ChainComplex(R, {0: 1, 1: 1}, {1: ExactMatrix.from_rows(R, [[k]])})


def test_multiplication_by_two():
    H = homology(times(ZZ, 2), range(2))
    assert H[0] == HomologyGroup(0, (2,))
    assert H[1].is_zero()


def test_zero_differentials():
    C = ChainComplex(ZZ, {0: 2, 1: 3, 3: 1})
    assert {n: g.free_rank for n, g in homology(C, range(4)).items()} == {0: 2, 1: 3, 2: 0, 3: 1}


def test_koszul_degree_three():
    # Q·x^2 --x--> Q·x^3 is an isomorphism of 1-dimensional spaces
    C = ChainComplex(QQ, {1: 1, 0: 1}, {1: ExactMatrix.from_rows(QQ, [[1]])})
    assert all(g.is_zero() for g in homology(C, range(2)).values())


def test_plocal_drops_prime_to_p_torsion():
    H = homology(times(PLocalIntegers(2), 6), [0])
    assert H[0].to_json() == {"free_rank": 0, "torsion": ["2^1"]}


def test_torsion_reported_primary():
    assert HomologyGroup(0, (12,)).to_json()["torsion"] == ["2^2", "3^1"]


def test_point_u_tower():
    M = MixedComplex(point(QQ))
    H = homology(total_u_complex(M, 3), range(-5, 1))
    assert [n for n, g in H.items() if g.free_rank] == [-4, -2, 0]
    assert all(g.free_rank <= 1 for g in H.values())


def test_zero_B_total_is_shifted_sum():
    C = ChainComplex(ZZ, {0: 2, 1: 1}, {1: ExactMatrix.from_rows(ZZ, [[2], [0]])})
    T = total_u_complex(MixedComplex(C), 3)
    HC = homology(C, range(-6, 3))
    HT = homology(T, range(-6, 3))
    for n in range(-6, 3):
        expect = [HC.get(n + 2 * j, HomologyGroup(0)) for j in range(3)]
        assert HT[n].free_rank == sum(g.free_rank for g in expect)
        assert sorted(HT[n].torsion) == sorted(t for g in expect for t in g.torsion)


def test_de_rham_line_u2_degree_zero():
    # u^0 M_0 ⊕ u^1 M_2 = Q x^d, differential x^d -> u·d x^{d-1}dx; kernel is the constants
    A = parse_algebra("Q[x]")
    for d in range(5):
        H = homology(total_u_complex(de_rham(A, d).mixed(), 2), [0])
        assert H[0].free_rank == (1 if d == 0 else 0)


def test_u_stabilization_window():
    A = parse_algebra("Q[x]")
    for U in (2, 3, 4):
        for d in range(4):
            M = de_rham(A, d).mixed()
            res = u_homology(M, U, range(-2 * (U - 2), 2))
            assert all(r.stable for r in res.values())


def test_two_step_tower():
    C = ChainComplex(ZZ, {0: 2})
    F = FilteredComplex.from_levels(C, {0: [0, 1]})
    gr = associated_graded(F)
    assert gr.rank_table() == {0: {0: 1}, 1: {0: 1}}


def test_constant_then_zero_tower():
    C = times(ZZ, 2)
    F = FilteredComplex.from_levels(C, {0: [1], 1: [1]}, start=0, stop=1)
    gr = associated_graded(F)
    assert gr.piece(0) is None
    assert gr.piece(1).ranks == C.ranks


def test_form_degree_filtration_of_de_rham():
    A = parse_algebra("Q[x]")
    dr = de_rham(A, 3)
    C = dr.mixed().underlying
    levels = {n: [n] * C.rank(n) for n in C.ranks}
    gr = associated_graded(FilteredComplex.from_levels(C, levels))
    assert gr.rank_table() == {0: {0: 1}, 1: {1: 1}}
    assert all(not c.diffs or all(M.is_zero() for M in c.diffs.values()) for c in gr.pieces.values())


def test_cone_of_identity_is_acyclic():
    C = times(ZZ, 3)
    H = homology(cone(identity_map(C)), range(-1, 4))
    assert all(g.is_zero() for g in H.values())


def test_tensor_with_point():
    C = times(ZZ, 5)
    T = tensor(point(ZZ), C)
    assert T.ranks == C.ranks and T.d(1) == C.d(1)


def test_tensor_of_two_torsion():
    H = homology(tensor(times(ZZ, 2), times(ZZ, 2)), range(3))
    assert H[0] == HomologyGroup(0, (2,))
    assert H[1] == HomologyGroup(0, (2,))
    assert H[2].is_zero()


@given(st.lists(st.integers(-3, 3), min_size=4, max_size=4), st.lists(st.integers(-3, 3), min_size=2, max_size=2))
def test_d_squared_checked(a, b):
    d2 = ExactMatrix.from_rows(ZZ, [a[:2], a[2:]])
    d1 = ExactMatrix.from_rows(ZZ, [b])
    if (d1 @ d2).is_zero():
        ChainComplex(ZZ, {0: 1, 1: 2, 2: 2}, {1: d1, 2: d2})
    else:
        with pytest.raises(ComplexError):
            ChainComplex(ZZ, {0: 1, 1: 2, 2: 2}, {1: d1, 2: d2})


@given(st.integers(-3, 3), st.integers(-3, 3))
def test_mixed_identities_checked(b0, d1):
    C = ChainComplex(QQ, {0: 1, 1: 1}, {1: ExactMatrix.from_rows(QQ, [[d1]])})
    B = {0: ExactMatrix.from_rows(QQ, [[b0]])}
    # dB + Bd on degree 0 is d1*b0; on degree 1 it is b0*d1
    if b0 * d1 == 0:
        MixedComplex(C, B)
    else:
        with pytest.raises(ComplexError):
            MixedComplex(C, B)


@given(st.lists(st.integers(0, 3), min_size=1, max_size=6))
def test_filtration_exhaustive(levels):
    C = ChainComplex(QQ, {0: len(levels)})
    gr = associated_graded(FilteredComplex.from_levels(C, {0: levels}))
    assert sum(c.rank(0) for c in gr.pieces.values()) == C.rank(0)
