from __future__ import annotations

import pytest

from hkrlab.algebra import parse_algebra
from hkrlab.circlehopf import (
    HopfError,
    AugmentedAlgebra,
    additive_hopf,
    bar_tor_dims,
    cartier_dual_check,
    coaction_of,
    comodule_failures,
    exterior_hopf,
    ext_colimit_tower,
    ext_self,
    ext_transition,
    function_hopf,
    hopf_pairing_check,
    mu_hopf,
    mu_z_duality_check,
    strict_mixed_category_check,
    witt_kernel_hopf,
)
from hkrlab.complexes import ChainComplex, MixedComplex, point
from hkrlab.exactalg import QQ, ExactMatrix, PrimeField
from hkrlab.hochschild import de_rham


def periodic_dims(N: int, bound: int) -> dict:
    """Oracle: the resolution ... -> A --T^{N-1}--> A --T--> A -> k has generators in weights 0, 1, N, N+1, 2N, ..."""
    w = lambda s: (s // 2) * N + (s % 2)
    return {(s, s, -w(s)): 1 for s in range(bound + 1)}


def test_exterior_ext_is_polynomial_on_u():
    e = ext_self(AugmentedAlgebra.exterior(QQ), 5)
    assert dict(e.dims) == {(s, 2 * s, -s): 1 for s in range(6)}
    assert all(list(c) == [1] for c in e.products.values())


@pytest.mark.parametrize("p,N", [(2, 2), (2, 4), (3, 3), (3, 9), (5, 5)])
def test_truncated_polynomial_ext(p, N):
    A = AugmentedAlgebra.truncated_polynomial(PrimeField(p), N)
    e = ext_self(A, 4)
    assert dict(e.dims) == periodic_dims(N, 4)
    assert dict(e.dims) == bar_tor_dims(A, 3 if N > 4 else 4) | {k: v for k, v in e.dims.items() if k[0] > (3 if N > 4 else 4)}


def test_square_of_degree_one_class():
    # F_2[T]/T^2: Ext = F_2[v]; for N >= 3 the degree-one class squares to zero
    sq = lambda p, N: ext_self(AugmentedAlgebra.truncated_polynomial(PrimeField(p), N), 3).products[(1, 0, 1, 0)]
    assert list(sq(2, 2)) == [1]
    assert list(sq(3, 3)) == [0]
    assert list(sq(2, 4)) == [0]


def test_tower_p2():
    assert ext_transition(2, 1, 3) == {0: 1, 1: 1, 2: 0, 3: 0}
    r = ext_colimit_tower(2, 2)
    assert r["colimit"] == {0: 1, 1: 1, 2: 0, 3: 0}


@pytest.mark.parametrize("p", [2, 3])
def test_tower_colimit(p):
    r = ext_colimit_tower(p, 3)
    assert r["colimit"] == {0: 1, 1: 1, 2: 0, 3: 0} and r["ranks_constant"]
    assert all(stage == {0: 1, 1: 1, 2: 1, 3: 1} for stage in r["stages"].values())


@pytest.mark.parametrize("p,m,rank", [(2, 1, 2), (2, 2, 4), (3, 1, 3), (3, 2, 9)])
def test_cartier_duality(p, m, rank):
    r = cartier_dual_check(p, m)
    assert r["verdict"] == "pass" and r["rank"] == rank and not r["diagnostics"]


def test_cartier_images():
    assert cartier_dual_check(2, 2)["images"] == {"l0": {"T^1*": "1"}, "l1": {"T^2*": "1"}}


def test_alpha_2_self_dual():
    H = additive_hopf(PrimeField(2), 2)
    D = H.dual()
    assert D.structure_equal(witt_kernel_hopf(2, 1)) and D.structure_equal(H)
    assert cartier_dual_check(2, 1)["verdict"] == "pass"


def test_mu_z_duality():
    assert mu_z_duality_check(QQ, 2)["verdict"] == "pass"
    for p in (2, 3):
        assert mu_z_duality_check(PrimeField(p), p)["verdict"] == "pass"


def test_pairing_nondegenerate_over_q_only():
    P = [[1, 1], [1, -1]]
    assert hopf_pairing_check(mu_hopf(QQ, 2), mu_hopf(QQ, 2), P)["nondegenerate"]
    r = hopf_pairing_check(mu_hopf(PrimeField(2), 2), mu_hopf(PrimeField(2), 2), P)
    assert not r["nondegenerate"] and r["diagnostics"]


INSTANCES = [
    lambda: exterior_hopf(QQ),
    lambda: additive_hopf(PrimeField(3), 9),
    lambda: additive_hopf(PrimeField(2), 4),
    lambda: mu_hopf(PrimeField(2), 4),
    lambda: function_hopf(QQ, 3),
    lambda: witt_kernel_hopf(2, 2),
    lambda: witt_kernel_hopf(3, 2),
]


@pytest.mark.parametrize("make", INSTANCES)
def test_hopf_axioms_and_double_dual(make):
    H = make()
    assert all(H.check_axioms().values())
    D = H.dual()
    assert all(D.check_axioms().values())
    assert D.dual().structure_equal(H)


def test_truncation_length_must_be_power_of_characteristic():
    with pytest.raises(HopfError):
        additive_hopf(QQ, 4)
    with pytest.raises(HopfError):
        additive_hopf(PrimeField(3), 4)
    with pytest.raises(HopfError):
        additive_hopf(PrimeField(2), 6)


def test_exterior_primitive():
    L = exterior_hopf(QQ)
    assert L.comul(L.basis_vec(1)) == {(0, 1): 1, (1, 0): 1}


def samples():
    A = parse_algebra("Q[x]")
    return [MixedComplex(point(QQ)), de_rham(A, 2).mixed(), de_rham(parse_algebra("Q[x,y]"), 2).mixed()]


def test_strict_mixed_category():
    r = strict_mixed_category_check(samples())
    assert r["verdict"] == "pass" and r["pairs"] == 9


def test_trivial_coaction_on_point():
    rho = coaction_of(MixedComplex(point(QQ)))
    assert rho[0][0] == ExactMatrix.identity(QQ, 1) and rho[0][1].rows == 0


def test_bad_coactions_rejected():
    C = ChainComplex(QQ, {0: 1, 1: 1}, {1: ExactMatrix.from_rows(QQ, [[1]])})
    one = ExactMatrix.identity(QQ, 1)
    # B_0 = 1 does not anticommute with d = 1
    rho = {0: (one, one), 1: (one, ExactMatrix.zeros(QQ, 0, 1))}
    assert any("chain map" in f for f in comodule_failures(C, rho))
    rho = {0: (one.scale(2), ExactMatrix.zeros(QQ, 1, 1)), 1: (one, ExactMatrix.zeros(QQ, 0, 1))}
    assert any("counit" in f for f in comodule_failures(C, rho))
