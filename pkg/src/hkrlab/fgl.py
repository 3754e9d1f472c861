"""One-dimensional formal group laws and the Hopf algebras around them.

Distributions are the dual basis ``δ_n`` to ``1, T, T^2, ...`` in the
coordinate ring; truncating at ``N`` keeps products ``δ_i δ_j`` only for
``i + j <= N``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Sequence

from .circlehopf import GradedHopfAlgebra, additive_hopf, mu_hopf, _acc
from .complexes import ChainComplex, FilteredComplex
from .exactalg import ZZ, BaseRing, ExactMatrix, IntegralityError, MultiPoly, PrimeField, rank
from .rees import ReesModule, fiber_at_one, fiber_at_zero, rees_of

MAX_DIST_N = 8
MAX_INTVALUED_N = 12

XY = ("X", "Y")
XYZ = ("X", "Y", "Z")


class _Truncated:
    """Polynomials modulo total degree ``> N`` as an evaluation carrier."""

    def __init__(self, variables: Sequence[str], ring: BaseRing, N: int):
        self.variables = tuple(variables)
        self.ring = ring
        self.N = N

    @property
    def zero(self):
        return MultiPoly(self.variables, {}, self.ring)

    def from_int(self, n):
        return MultiPoly.constant(self.variables, n, self.ring)

    from_fraction = from_int

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return (a * b).truncate(self.N)

    def pow(self, a, e):
        out = self.from_int(1)
        for _ in range(e):
            out = self.mul(out, a)
        return out


@dataclass(frozen=True, eq=False)
class FormalGroupLaw:
    """``F(X, Y)`` modulo total degree ``N + 1``."""

    ring: BaseRing
    N: int
    series: MultiPoly

    def __post_init__(self):
        if self.series.variables != XY:
            raise ValueError("series must be in variables X, Y")
        object.__setattr__(self, "series", self.series.truncate(self.N))

    def compose(self, left: MultiPoly, right: MultiPoly) -> MultiPoly:
        """``F(left, right)`` truncated, for series in a common variable list."""
        carrier = _Truncated(left.variables, self.ring, self.N)
        return self.series.evaluate([left, right], ring_ops=carrier)

    def check_axioms(self) -> dict[str, bool]:
        R = self.ring
        X, Y = MultiPoly.gens(XY, R)
        zero = MultiPoly(XY, {}, R)
        g = MultiPoly.gens(XYZ, R)
        F = self.series
        lhs = self.compose(self.compose(g[0], g[1]), g[2])
        rhs = self.compose(g[0], self.compose(g[1], g[2]))
        return {
            "left_unit": self.compose(X, zero) == X,
            "right_unit": self.compose(zero, Y) == Y,
            "commutative": F == F.rename(("Y", "X")).embed(XY),
            "associative": lhs == rhs,
            "linear_term": all(
                F.coefficient(e) == R(c) for e, c in (((0, 0), 0), ((1, 0), 1), ((0, 1), 1))
            ),
        }

    def power_coefficients(self) -> dict[int, MultiPoly]:
        """``F^n`` truncated, for ``0 <= n <= N``."""
        carrier = _Truncated(XY, self.ring, self.N)
        out = {0: carrier.from_int(1)}
        for n in range(1, self.N + 1):
            out[n] = carrier.mul(out[n - 1], self.series)
        return out

    def inverse_series(self) -> list:
        """Coefficients ``ι_1..ι_N`` of ``[-1](T)`` with ``F(T, ι(T)) = 0``."""
        R = self.ring
        T = ("X",)
        iota = {1: R(-1)}
        for k in range(2, self.N + 1):
            t = MultiPoly.gen(T, "X", R)
            i_poly = MultiPoly(T, {(e,): c for e, c in iota.items()}, R)
            carrier = _Truncated(T, R, k)
            val = self.series.evaluate([t, i_poly], ring_ops=carrier)
            c = val.coefficient((k,))
            if c:
                iota[k] = R(iota.get(k, 0) - c)
        return [iota.get(k, R.zero) for k in range(1, self.N + 1)]

    def to_json(self) -> dict:
        return {"ring": str(self.ring), "N": self.N, "series": self.series.to_json()}


def interpolation_fgl(lam, N: int, ring: BaseRing = ZZ) -> FormalGroupLaw:
    """``F(X, Y) = X + Y + λXY``: additive at ``λ = 0``, multiplicative at ``λ = 1``."""
    if N < 2:
        raise ValueError("N must be >= 2")
    X, Y = MultiPoly.gens(XY, ring)
    return FormalGroupLaw(ring, N, X + Y + X * Y * ring(lam))


def additive_fgl(N: int, ring: BaseRing = ZZ) -> FormalGroupLaw:
    return interpolation_fgl(0, N, ring)


def multiplicative_fgl(N: int, ring: BaseRing = ZZ) -> FormalGroupLaw:
    return interpolation_fgl(1, N, ring)


# ---------------------------------------------------------------------------
# Distributions
# ---------------------------------------------------------------------------


def distributions(F: FormalGroupLaw, N: int | None = None) -> GradedHopfAlgebra:
    """Truncated Hopf algebra of distributions ``δ_0..δ_N``.

    ``δ_i δ_j = Σ_n [X^i Y^j] F^n · δ_n`` and ``Δδ_n = Σ_{a+b=n} δ_a ⊗ δ_b``.
    """
    N = F.N if N is None else N
    if N > F.N:
        raise ValueError("series known only up to its truncation order")
    if N > MAX_DIST_N:
        raise ValueError(f"N must be <= {MAX_DIST_N}")
    if F.ring.kind not in ("Integers", "Rationals"):
        raise ValueError("distributions are built over Z or Q; reduce afterwards")
    R = F.ring
    powers = F.power_coefficients()
    mult = {}
    for i in range(N + 1):
        for j in range(N + 1 - i):
            v = {}
            for n in range(i + j + 1):
                c = powers[n].coefficient((i, j))
                if c:
                    v[n] = R(c)
            mult[(i, j)] = v
    comult = {n: {(a, n - a): R.one for a in range(n + 1)} for n in range(N + 1)}
    iota = F.inverse_series()
    # (Sδ_n)(T^k) = δ_n(ι(T)^k) = [T^n] ι^k
    T = ("X",)
    ipoly = MultiPoly(T, {(e + 1,): c for e, c in enumerate(iota) if c}, R)
    carrier = _Truncated(T, R, N)
    ipow = [carrier.from_int(1)]
    for k in range(1, N + 1):
        ipow.append(carrier.mul(ipow[-1], ipoly))
    antipode = {}
    for n in range(N + 1):
        antipode[n] = {k: R(ipow[k].coefficient((n,))) for k in range(N + 1) if ipow[k].coefficient((n,))}
    return GradedHopfAlgebra(
        R, tuple(f"d{n}" for n in range(N + 1)), (0,) * (N + 1), tuple(range(N + 1)),
        mult, {0: R.one}, comult, tuple(R.one if n == 0 else R.zero for n in range(N + 1)),
        antipode, weight_bound=N,
    )


# ---------------------------------------------------------------------------
# Integer-valued polynomials and divided powers
# ---------------------------------------------------------------------------


def _binom_poly(n: int) -> list[Fraction]:
    """Coefficients (ascending) of ``C(X, n) = X(X-1)...(X-n+1)/n!``."""
    coeffs = [Fraction(1)]
    for k in range(n):
        nxt = [Fraction(0)] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i + 1] += c
            nxt[i] -= k * c
        coeffs = nxt
    f = factorial(n)
    return [c / f for c in coeffs]


def _poly_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _in_binomial_basis(f: list[Fraction], basis: list[list[Fraction]]) -> dict[int, Fraction]:
    """Expand ``f`` in ``C(X, k)`` by peeling off leading terms."""
    f = list(f)
    out = {}
    for k in range(len(f) - 1, -1, -1):
        if not f[k]:
            continue
        c = f[k] / basis[k][k]
        out[k] = c
        for i, x in enumerate(basis[k]):
            f[i] -= c * x
    return out


def _require_integral(v: dict[int, Fraction], what: str) -> dict[int, int]:
    for k, c in v.items():
        if c.denominator != 1:
            raise IntegralityError(f"{what}: coefficient {c} of c_{k} is not an integer")
    return {k: int(c) for k, c in v.items() if c}


@dataclass(frozen=True, eq=False)
class IntValuedPolyAlgebra:
    """Integer-valued polynomials with basis ``c_n = C(X, n)``, ``n <= N``.

    The degree filtration is recorded decreasingly: ``F^{-n}`` is spanned by
    ``c_0..c_n``, so ``F^{-N}`` is everything and ``F^1 = 0``.
    """

    N: int
    hopf: GradedHopfAlgebra

    def product(self, i: int, j: int) -> dict[int, int]:
        return dict(self.hopf.mult.get((i, j), {}))

    @property
    def filtration(self) -> FilteredComplex:
        C = ChainComplex(ZZ, {0: self.N + 1})
        return FilteredComplex.from_levels(C, {0: tuple(-k for k in range(self.N + 1))}, -self.N, 0)

    def rees(self) -> ReesModule:
        return rees_of(self.filtration)

    def check_multiplicative(self) -> bool:
        """``F^{-i} · F^{-j} ⊆ F^{-(i+j)}``: no ``c_k`` with ``k > i + j`` appears."""
        return all(max(v, default=0) <= i + j for (i, j), v in self.hopf.mult.items())

    def gr_products(self) -> dict[tuple[int, int], int]:
        """Products in the associated graded: the ``c_{i+j}`` coefficient of ``c_i c_j``."""
        return {(i, j): v.get(i + j, 0) for (i, j), v in self.hopf.mult.items()}


def intvalued_structure(N: int) -> IntValuedPolyAlgebra:
    """Structure constants computed over Q and checked to be integers."""
    if N > MAX_INTVALUED_N:
        raise ValueError(f"N must be <= {MAX_INTVALUED_N}")
    basis = [_binom_poly(n) for n in range(N + 1)]
    mult = {}
    for i in range(N + 1):
        for j in range(N + 1 - i):
            f = _poly_mul(basis[i], basis[j])
            mult[(i, j)] = _require_integral(_in_binomial_basis(f, basis), f"c_{i}*c_{j}")
    # Δc_n: finite differences of g(x, y) = C(x + y, n) in both variables
    comult = {}
    for n in range(N + 1):
        t = {}
        for a in range(n + 1):
            for b in range(n + 1 - a):
                c = sum(
                    (-1) ** (a - l + b - m) * comb(a, l) * comb(b, m) * comb(l + m, n)
                    for l in range(a + 1)
                    for m in range(b + 1)
                )
                if c:
                    t[(a, b)] = c
        comult[n] = t
    # S(c_n)(X) = C(-X, n)
    antipode = {}
    for n in range(N + 1):
        neg = [c * (-1) ** i for i, c in enumerate(basis[n])]
        antipode[n] = _require_integral(_in_binomial_basis(neg, basis), f"S(c_{n})")
    hopf = GradedHopfAlgebra(
        ZZ, tuple(f"c{n}" for n in range(N + 1)), (0,) * (N + 1), tuple(range(N + 1)),
        mult, {0: 1}, comult, tuple(1 if n == 0 else 0 for n in range(N + 1)),
        antipode, weight_bound=N,
    )
    return IntValuedPolyAlgebra(N, hopf)


def divided_power_algebra(N: int, ring: BaseRing = ZZ) -> GradedHopfAlgebra:
    """``γ_i γ_j = C(i+j, i) γ_{i+j}``, ``Δγ_n = Σ γ_a ⊗ γ_{n-a}``."""
    R = ring
    mult = {(i, j): {i + j: R(comb(i + j, i))} for i in range(N + 1) for j in range(N + 1 - i)}
    mult = {k: {a: b for a, b in v.items() if b} for k, v in mult.items()}
    return GradedHopfAlgebra(
        R, tuple(f"g{n}" for n in range(N + 1)), (0,) * (N + 1), tuple(range(N + 1)),
        mult, {0: R.one}, {n: {(a, n - a): R.one for a in range(n + 1)} for n in range(N + 1)},
        tuple(R.one if n == 0 else R.zero for n in range(N + 1)),
        {n: {n: R((-1) ** n)} for n in range(N + 1)}, weight_bound=N,
    )


def gr_matches_divided_powers(N: int) -> dict:
    """Degree-filtration gr of the integer-valued polynomials versus divided powers."""
    V = intvalued_structure(N)
    D = divided_power_algebra(N)
    gr = V.gr_products()
    mism = [
        (i, j) for (i, j), c in gr.items()
        if D.mult.get((i, j), {}).get(i + j, 0) != c
    ]
    R = V.rees()
    graded = fiber_at_zero(R)
    ranks_ok = all(graded.piece(-n) is not None and graded.piece(-n).rank(0) == 1 for n in range(N + 1))
    underlying_ok = fiber_at_one(R).rank(0) == N + 1
    return {
        "N": N,
        "pass": not mism and ranks_ok and underlying_ok and V.check_multiplicative(),
        "multiplicative": V.check_multiplicative(),
        "gr_ranks_ok": ranks_ok,
        "mismatches": mism,
    }


def multiplicative_matches_intvalued(N: int) -> dict:
    """``δ_n -> c_n`` identifies distributions of the multiplicative law with ``c``-constants."""
    D = distributions(multiplicative_fgl(max(N, 2)), N)
    V = intvalued_structure(N).hopf
    diag = []
    for key in set(D.mult) | set(V.mult):
        if _clean_int(D.mult.get(key, {})) != _clean_int(V.mult.get(key, {})):
            diag.append(f"product {key}")
    for n in range(N + 1):
        if _clean_int(D.comult.get(n, {})) != _clean_int(V.comult.get(n, {})):
            diag.append(f"coproduct {n}")
        if _clean_int(D.antipode.get(n, {})) != _clean_int(V.antipode.get(n, {})):
            diag.append(f"antipode {n}")
    return {"N": N, "pass": not diag, "diagnostics": diag}


def _clean_int(d) -> dict:
    return {k: int(v) for k, v in d.items() if v}


# ---------------------------------------------------------------------------
# Comparison with finite group schemes
# ---------------------------------------------------------------------------


def _truncated_morphism_failures(H: GradedHopfAlgebra, K: GradedHopfAlgebra, phi: dict[int, dict[int, object]]) -> list[str]:
    """Check a map on the basis subset ``phi`` (indices of ``H``) against ``K``.

    Products are checked where both factors and the product lie in the subset.
    """
    R = K.ring
    fails = []
    dom = sorted(phi)
    M = ExactMatrix.from_columns(R, [[phi[a].get(c, R.zero) for c in range(K.rank)] for a in dom], K.rank)
    if rank(M) != K.rank or len(dom) != K.rank:
        fails.append("not bijective onto the target")

    def ap(u):
        out = {}
        for a, x in u.items():
            if a not in phi:
                return None
            for c, y in phi[a].items():
                _acc(out, c, x * y, R)
        return out

    if ap(dict(H.unit)) != {k: R(v) for k, v in K.unit.items() if R(v)}:
        fails.append("unit")
    for a in dom:
        if K.eps(phi[a]) != R(H.counit[a]):
            fails.append(f"counit on {H.names[a]}")
        lhs = {}
        for (i, j), x in H.comult.get(a, {}).items():
            for c, y in phi[i].items():
                for d, z in phi[j].items():
                    _acc(lhs, (c, d), x * y * z, R)
        if lhs != K.comul(phi[a]):
            fails.append(f"coproduct on {H.names[a]}")
        for b in dom:
            if not H._defined(a, b):
                continue
            prod = H.mul(H.basis_vec(a), H.basis_vec(b))
            img = ap(prod)
            if img is None:
                continue
            if img != K.mul(phi[a], phi[b]):
                fails.append(f"product {H.names[a]}*{H.names[b]}")
    return fails


def cartier_interpolation_check(p: int, N: int) -> dict:
    """Distributions mod ``p`` against duals of ``O(μ_{p^m})`` and ``O(α_{p^m})``.

    For every ``m`` with ``p^m <= N + 1`` the first ``p^m`` distributions are
    sent to the dual: ``δ_n -> Σ_a C(a, n) (U^a)*`` for ``μ`` and
    ``δ_n -> (T^n)*`` for ``α``.  The same map is checked on the mod-``p``
    integer-valued basis ``c_n``.
    """
    if p not in (2, 3) or N > 6 or N < 1:
        raise ValueError("need p in {2, 3} and 1 <= N <= 6")
    R = PrimeField(p)
    Nd = max(N, 2)
    mult = distributions(multiplicative_fgl(Nd), N).change_ring(R)
    add = distributions(additive_fgl(Nd), N).change_ring(R)
    intv = intvalued_structure(N).hopf.change_ring(R)
    rows = []
    ok = True
    for name, H in (("multiplicative", mult), ("intvalued", intv), ("additive", add)):
        fails = []
        if H.comul(H.basis_vec(0)) != {(0, 0): R.one} or dict(H.unit) != {0: R.one}:
            fails.append("degree-0 element is not the grouplike unit")
        if H.comul(H.basis_vec(1)) != {(1, 0): R.one, (0, 1): R.one}:
            fails.append("degree-1 element is not primitive")
        rows.append({"m": 0, "rank": 1, "check": f"{name}_unit_primitive", "verdict": "pass" if not fails else "fail", "diagnostics": fails})
        ok = ok and not fails
    m = 1
    while p**m <= N + 1:
        q = p**m
        mu_dual = mu_hopf(R, q).dual()
        alpha_dual = additive_hopf(R, q).dual()
        phi_mu = {n: {a: R(comb(a, n)) for a in range(q) if R(comb(a, n))} for n in range(q)}
        phi_alpha = {n: {n: R.one} for n in range(q)}
        checks = {
            "multiplicative_vs_mu": _truncated_morphism_failures(mult, mu_dual, phi_mu),
            "intvalued_vs_mu": _truncated_morphism_failures(intv, mu_dual, phi_mu),
            "additive_vs_alpha": _truncated_morphism_failures(add, alpha_dual, phi_alpha),
        }
        for name, fails in checks.items():
            rows.append({"m": m, "rank": q, "check": name, "verdict": "pass" if not fails else "fail", "diagnostics": fails})
            ok = ok and not fails
        m += 1
    return {"p": p, "N": N, "verdict": "pass" if ok else "fail", "rows": rows}
