from __future__ import annotations

from collections import Counter

from hypothesis import given
from hypothesis import strategies as st

from hkrlab.algebra import parse_algebra
from hkrlab.complexes import ChainComplex, FilteredComplex, GradedComplex, associated_graded, point
from hkrlab.exactalg import QQ, ZZ, ExactMatrix
from hkrlab.hochschild import de_rham
from hkrlab.rees import (
    FilteredAlgebraData,
    ReesModule,
    day_tensor,
    fiber_at_one,
    fiber_at_zero,
    filtration_from_grading,
    free_rees,
    gr_tensor_check,
    rees_of,
)


def levels_filtration(R, levels: list[int], start=None, stop=None) -> FilteredComplex:
    return FilteredComplex.from_levels(ChainComplex(R, {0: len(levels)}), {0: levels}, start, stop)


def weight_ranks(G: GradedComplex, degree: int = 0) -> dict[int, int]:
    return {w: c.rank(degree) for w, c in G.pieces.items() if c.rank(degree)}


def test_rees_of_two_step_tower():
    Rm = rees_of(levels_filtration(ZZ, [0, 1]))
    assert Rm.rank_table() == {-1: {0: 2}, 0: {0: 2}, 1: {0: 1}, 2: {}}
    assert Rm.t_map(0, 0) == ExactMatrix.from_rows(ZZ, [[0], [1]])
    assert Rm.honest


def test_constant_filtration_is_free():
    F = levels_filtration(QQ, [2, 2], start=0, stop=2)
    Rm = rees_of(F)
    for w in (0, 1):
        assert Rm.t_map(w, 0) == ExactMatrix.identity(QQ, 2)
    assert weight_ranks(fiber_at_zero(Rm)) == {2: 2}


def test_form_degree_filtration_ranks():
    A = parse_algebra("Q[x]")
    C = de_rham(A, 2).mixed().underlying
    Rm = rees_of(FilteredComplex.from_levels(C, {n: [n] * C.rank(n) for n in C.ranks}, 0, 1))
    totals = {w: sum(r.values()) for w, r in Rm.rank_table().items()}
    assert (totals[0], totals[1], totals[2]) == (2, 1, 0)


def test_fibers_of_two_step_tower():
    Rm = rees_of(levels_filtration(ZZ, [0, 1]))
    assert weight_ranks(fiber_at_zero(Rm)) == {0: 1, 1: 1}
    assert fiber_at_one(Rm).ranks == {0: 2}


def test_free_rank_one():
    Rm = free_rees(point(ZZ))
    assert weight_ranks(fiber_at_zero(Rm)) == {0: 1}
    assert fiber_at_one(Rm).rank(0) == 1


def test_split_filtration_fibers():
    G = GradedComplex({0: ChainComplex(QQ, {0: 2}), 1: ChainComplex(QQ, {0: 1, 1: 1}), 3: ChainComplex(QQ, {1: 2})})
    Rm = rees_of(filtration_from_grading(G))
    assert fiber_at_zero(Rm).rank_table() == G.rank_table()
    one = fiber_at_one(Rm)
    assert one.ranks == {0: 3, 1: 3}


def test_dishonest_module_flagged():
    zero = ExactMatrix.zeros(QQ, 1, 1)
    Rm = ReesModule((point(QQ), point(QQ)), ({0: zero},), 0)
    assert not Rm.honest
    # cokernel of the zero map is everything
    assert weight_ranks(fiber_at_zero(Rm)) == {0: 1, 1: 1}


def test_day_tensor_unit():
    F = levels_filtration(QQ, [0, 1, 1, 2])
    unit = FilteredComplex((point(QQ),), (), 0)
    assert weight_ranks(associated_graded(day_tensor(F, unit))) == weight_ranks(associated_graded(F))


def test_two_step_filtrations_tensor():
    F = levels_filtration(QQ, [0, 1])
    G = levels_filtration(QQ, [0, 1])
    assert weight_ranks(associated_graded(day_tensor(F, G))) == {0: 1, 1: 2, 2: 1}


def convolve(a: list[int], b: list[int]) -> dict[int, int]:
    """Oracle: a basis adapted to both filtrations has levels i + j."""
    c = Counter(i + j for i in a for j in b)
    return dict(c)


level_lists = st.lists(st.integers(0, 2), min_size=1, max_size=3)


@given(level_lists, level_lists)
def test_gr_commutes_with_tensor(a, b):
    F = levels_filtration(QQ, a, 0, 2)
    G = levels_filtration(QQ, b, 0, 2)
    assert weight_ranks(associated_graded(day_tensor(F, G))) == convolve(a, b)
    assert gr_tensor_check(F, G)


@given(st.lists(st.integers(-1, 2), min_size=1, max_size=4))
def test_round_trip(levels):
    F = levels_filtration(QQ, levels)
    Rm = rees_of(F)
    assert fiber_at_one(Rm).rank(0) == len(levels)
    assert weight_ranks(fiber_at_zero(Rm)) == dict(Counter(levels))
    assert Rm.honest


def test_multiplicative_filtration():
    # k[x]/x^3 with the x-adic filtration
    F = levels_filtration(QQ, [0, 1, 2])
    prod = [[[0] * 3 for _ in range(3)] for _ in range(3)]
    for i in range(3):
        for j in range(3):
            if i + j < 3:
                prod[i][j][i + j] = 1
    assert FilteredAlgebraData(F, prod).check_multiplicative()
    # x in F^0, x^2 in F^1 is coarser and still multiplicative
    G = levels_filtration(QQ, [0, 0, 1])
    assert FilteredAlgebraData(G, prod).check_multiplicative()
    # x in F^1 forces x^2 in F^2
    H = levels_filtration(QQ, [0, 1, 1])
    assert not FilteredAlgebraData(H, prod).check_multiplicative()
