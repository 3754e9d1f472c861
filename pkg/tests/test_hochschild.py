from __future__ import annotations

from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hkrlab.algebra import AlgebraError, parse_algebra
from hkrlab.complexes import HomologyBasis, homology
from hkrlab.hochschild import (
    BudgetExceeded,
    comparison_map_check,
    de_rham,
    de_rham_cohomology,
    filtered_hc_minus_dr_model,
    gr_vs_truncation_check,
    hc_minus,
    hc_minus_dr,
    hkr_check,
    hkr_map,
    hochschild_homology,
    hochschild_slice,
    mixed_vs_de_rham_check,
    slice_budget,
    truncated_de_rham_homology,
)


def ranks(H) -> list[int]:
    return [g.free_rank for _, g in sorted(H.items())]


def test_base_field():
    A = parse_algebra("Q")
    assert ranks(hochschild_homology(A, 0, 3)) == [1, 0, 0, 0]


@pytest.mark.parametrize("d", range(1, 6))
def test_polynomial_line(d):
    # classical HKR: Ω^0_d and Ω^1_d are both one-dimensional
    assert ranks(hochschild_homology(parse_algebra("Q[x]"), d, 4)) == [1, 1, 0, 0, 0]


def test_dual_numbers_totals():
    A = parse_algebra("Q[x]/(x^2)")
    totals = [0] * 5
    for d in range(7):
        for n, g in hochschild_homology(A, d, 4).items():
            totals[n] += g.free_rank
    assert totals == [2, 1, 1, 1, 1]


def test_B_in_degree_zero():
    A = parse_algebra("Q[x]")
    sl = hochschild_slice(A, 3)
    ((a0,),) = sl.bases[0]
    col = sl._B(0).column(0)
    (j,) = [i for i, c in enumerate(col) if c]
    assert sl.bases[1][j] == (A.one(), a0) and col[j] == 1


def test_B_of_x_squared_is_twice_x_dx():
    A = parse_algebra("Q[x]")
    sl = hochschild_slice(A, 2)
    HB = HomologyBasis(sl.complex(), 1)
    Bx2 = sl._B(0).column(sl.index(0)[((2,),)])
    eps = hkr_map(A, 1, 2, sl).column(0)  # the form x dx
    assert [2 * c for c in HB.coords(eps)] == HB.coords(Bx2)


homogeneous_algebras = st.tuples(
    st.lists(st.integers(-2, 2), min_size=3, max_size=3),
    st.sampled_from(["Q", "F_2", "F_3"]),
).map(lambda t: f"{t[1]}[x,y]/({t[0][0]}*x^2+{t[0][1]}*x*y+{t[0][2]}*y^2)".replace("+-", "-"))


@given(homogeneous_algebras, st.integers(0, 4))
def test_slice_identities(text, d):
    try:
        A = parse_algebra(text)
    except AlgebraError:
        A = parse_algebra(text.split("/")[0])  # all coefficients vanished
    sl = hochschild_slice(A, d)
    assert all(sl.check_identities().values())
    for n, M in sl.B.items():
        assert M.shape == (sl.rank(n + 1), sl.rank(n))


def test_cubic_relations_identities():
    for text in ("Q[x,y]/(x^3-y^2*x)", "F_2[x]/(x^3)", "Q[x(2),y(3)]/(y^2-x^3)"):
        A = parse_algebra(text)
        for d in range(6):
            assert all(hochschild_slice(A, d).check_identities().values())


def test_hkr_f2_line():
    A = parse_algebra("F_2[x]")
    r = hkr_check(A, 1, 3)
    assert r["omega_rank"] == 1 and r["hh"].free_rank == 1 and r["iso"]


def test_hkr_plane_top_form():
    A = parse_algebra("Q[x,y]")
    sl = hochschild_slice(A, 2, 3)
    eps = hkr_map(A, 2, 2, sl)
    x, y = A.generator_monomial(0), A.generator_monomial(1)
    col = eps.column(0)
    idx = sl.index(2)
    assert col[idx[(A.one(), x, y)]] == 1 and col[idx[(A.one(), y, x)]] == -1
    assert sum(1 for c in col if c) == 2
    assert hkr_check(A, 2, 2)["iso"]


@pytest.mark.parametrize("base", ["Q", "F_2", "F_3", "Z"])
def test_hkr_ranks_plane(base):
    A = parse_algebra(f"{base}[x,y]")
    for q in range(3):
        for d in range(4):
            r = hkr_check(A, q, d)
            # Ω^q_d of k[x,y]: C(2,q) times the monomials of degree d - q
            assert r["omega_rank"] == comb(2, q) * max(d - q + 1, 0)
            assert r["iso"], (q, d)


def test_non_smooth_rejected():
    with pytest.raises(AlgebraError, match="smooth algebras only"):
        hkr_check(parse_algebra("Q[x]/(x^2)"), 1, 2)


def test_budget(monkeypatch):
    A = parse_algebra("Q[x,y]")
    with pytest.raises(BudgetExceeded):
        hochschild_slice(A, 5, budget=10)
    monkeypatch.setenv("HKRLAB_BUDGET", "123")
    assert slice_budget() == 123


def test_de_rham_line():
    A = parse_algebra("Q[x]")
    for d in range(6):
        H = de_rham_cohomology(A, d)
        assert (H[0].free_rank, H[1].free_rank) == ((1, 0) if d == 0 else (0, 0))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_de_rham_mod_p(p):
    A = parse_algebra(f"F_{p}[x]")
    for d in range(12):
        # d(x^d) = d x^{d-1} dx vanishes exactly when p | d
        assert de_rham_cohomology(A, d)[0].free_rank == (1 if d % p == 0 else 0)


def test_point_truncations():
    A = parse_algebra("Q")
    assert all(g.is_zero() for g in truncated_de_rham_homology(A, 1, 0).values())
    assert de_rham(A, 0).rank(1) == 0


def test_hc_minus_of_point():
    A = parse_algebra("Q")
    entries = hc_minus(A, 4, 0, range(-6, 1))
    assert [e.n for e in entries if e.group.free_rank] == [-6, -4, -2, 0]


def test_models_agree_on_line_weight_one():
    A = parse_algebra("Q[x]")
    bar = {e.n: e.group for e in hc_minus(A, 4, 1, range(-4, 3)) if e.stable}
    dr = {e.n: e.group for e in hc_minus_dr(A, 4, 1, range(-4, 3)) if e.stable}
    assert bar and all(bar[n] == dr[n] for n in bar.keys() & dr.keys())


def test_u_truncations_agree_in_window():
    A = parse_algebra("Q[x]")
    for d in range(3):
        for U in (2, 3):
            a = {e.n: e.group for e in hc_minus(A, U, d, range(-2, 3))}
            b = {e.n: e.group for e in hc_minus(A, U + 1, d, range(-2, 3))}
            stable = [e.n for e in hc_minus(A, U, d, range(-2, 3)) if e.stable]
            assert all(a[n] == b[n] for n in stable)


def test_graded_pieces_line():
    A = parse_algebra("Q[x]")
    m0 = filtered_hc_minus_dr_model(A, 3, 0)
    assert m0.gr_homology(0, [0])[0].free_rank == 1
    for d in range(1, 4):
        m = filtered_hc_minus_dr_model(A, 3, d)
        assert m.gr_homology(1, [1])[1].free_rank == 1  # x^{d-1} dx in degree 2·1 - 1


def test_graded_pieces_point():
    A = parse_algebra("Q")
    m = filtered_hc_minus_dr_model(A, 4, 0)
    # u^i has Hodge weight -i
    for i in range(4):
        H = m.gr_homology(-i, range(-8, 3))
        assert {n: g.free_rank for n, g in H.items() if not g.is_zero()} == {-2 * i: 1}
    assert all(g.is_zero() for g in m.gr_homology(1, range(-8, 3)).values())


@pytest.mark.parametrize("text", ["Q[x]", "F_3[x]", "Q[x,y]"])
def test_gr_matches_truncation(text):
    A = parse_algebra(text)
    for d in range(5 if A.nvars == 1 else 3):
        r = gr_vs_truncation_check(A, A.nvars + 2, d, range(3))
        assert r["pass"] and all(row["complete"] for row in r["rows"])


def test_incomplete_levels_flagged():
    # with U = 1 only levels i >= nvars see all of Ω^{>=i}
    r = gr_vs_truncation_check(parse_algebra("Q[x,y]"), 1, 2, range(3))
    assert [row["complete"] for row in r["rows"]] == [False, False, True]


def test_comparison_line_and_point():
    assert comparison_map_check(parse_algebra("Q[x]"), 4, 4, range(-6, 3))["pass"]
    r = comparison_map_check(parse_algebra("Q"), 0, 3, range(-4, 1))
    assert r["pass"] and r["rows"]


def test_comparison_plane():
    r = comparison_map_check(parse_algebra("Q[x,y]"), 3, 4, range(-3, 4))
    assert r["pass"] and r["rows"]


def test_comparison_mod_p_only_flags():
    r = comparison_map_check(parse_algebra("F_3[x]"), 4, 4, range(-4, 3))
    assert r["pass"]
    assert all(not row["equal"] for row in r["rows"] if (row["n"], row["internal_degree"]) in r["flagged"])


@pytest.mark.parametrize("text", ["Q[x]", "Q[x,y]"])
def test_B_is_de_rham_differential(text):
    A = parse_algebra(text)
    for q in range(3):
        for d in range(4):
            assert mixed_vs_de_rham_check(A, q, d)["agree"]


def test_hh_over_z_torsion_free_for_polynomials():
    H = homology(hochschild_slice(parse_algebra("Z[x]"), 4).complex(), range(4))
    assert all(not g.torsion for g in H.values())
