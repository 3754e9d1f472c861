"""Hochschild homology of graded algebras and its de Rham counterparts.

Chains live in the normalized cyclic bar complex ``C_n = A ⊗ Ā^{⊗n}``,
split by internal weight ``d``.  Since every bar slot has weight >= 1,
``C_n`` vanishes for ``n > d`` and each slice is finite.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations
from typing import Iterable, Mapping

from .algebra import AlgebraError, FPGradedAlgebra, Mono
from .complexes import (
    ChainComplex,
    FilteredComplex,
    GradedComplex,
    HomologyBasis,
    HomologyGroup,
    MixedComplex,
    associated_graded,
    homology,
    total_u_complex,
    u_homology,
    u_stable_from,
)
from .exactalg import ExactMatrix, invariant_factors, rank

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 20000

Chain = tuple[Mono, ...]


class BudgetExceeded(RuntimeError):
    def __init__(self, what: str, dim: int, budget: int):
        super().__init__(f"{what} has dimension {dim}, over the budget {budget} (raise HKRLAB_BUDGET)")
        self.dim = dim
        self.budget = budget


def slice_budget() -> int:
    """Maximum total dimension of one slice; ``HKRLAB_BUDGET`` overrides."""
    raw = os.environ.get("HKRLAB_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


def _require_smooth(A: FPGradedAlgebra, what: str):
    if not A.is_smooth:
        raise AlgebraError(f"{what} implemented for smooth algebras only")


def _matrix(R, sparse: Mapping[int, Mapping[int, object]], rows: int, cols: int) -> ExactMatrix:
    """Build from ``{col: {row: value}}``."""
    grid = [[R.zero] * cols for _ in range(rows)]
    for j, col in sparse.items():
        for i, v in col.items():
            grid[i][j] = v
    return ExactMatrix.from_rows(R, grid, cols)


# ---------------------------------------------------------------------------
# Bar complex slices
# ---------------------------------------------------------------------------


def _bar_words(A: FPGradedAlgebra, n: int, d: int) -> list[tuple[Mono, ...]]:
    """Tuples of ``n`` standard monomials, each of positive weight, summing to ``d``."""
    if n == 0:
        return [()] if d == 0 else []
    out = []
    for w in range(1, d - n + 2):
        heads = A.basis(w)
        if not heads:
            continue
        for rest in _bar_words(A, n - 1, d - w):
            out.extend((h,) + rest for h in heads)
    return out


def chain_basis(A: FPGradedAlgebra, n: int, d: int) -> list[Chain]:
    out = []
    for w0 in range(d + 1):
        a0s = A.basis(w0)
        if not a0s:
            continue
        words = _bar_words(A, n, d - w0)
        out.extend((a0,) + w for a0 in a0s for w in words)
    return out


@dataclass(frozen=True, eq=False)
class HochschildSlice:
    """Normalized bar complex of ``A`` in internal weight ``degree``, degrees ``0..top``.

    ``b[n] : C_n -> C_{n-1}`` and ``B[n] : C_n -> C_{n+1}``.  When ``top >= degree``
    the slice is the whole weight-``degree`` complex.
    """

    algebra: FPGradedAlgebra
    degree: int
    top: int
    bases: tuple[tuple[Chain, ...], ...]
    b: Mapping[int, ExactMatrix] = field(repr=False)
    B: Mapping[int, ExactMatrix] = field(repr=False)

    @property
    def complete(self) -> bool:
        return self.top >= self.degree

    def index(self, n: int) -> dict[Chain, int]:
        return {c: i for i, c in enumerate(self.bases[n])}

    def rank(self, n: int) -> int:
        return len(self.bases[n]) if 0 <= n <= self.top else 0

    def complex(self) -> ChainComplex:
        R = self.algebra.ring
        ranks = {n: self.rank(n) for n in range(self.top + 1) if self.rank(n)}
        return ChainComplex(R, ranks, dict(self.b), check=False)

    def mixed(self) -> MixedComplex:
        """Packaged as a mixed complex; only valid for complete slices."""
        if not self.complete:
            raise ValueError("mixed complex needs the full slice (top >= degree)")
        return MixedComplex(self.complex(), dict(self.B), check=False)

    def check_identities(self) -> dict[str, bool]:
        C = self.complex()
        bb = all((C.d(n - 1) @ C.d(n)).is_zero() for n in range(2, self.top + 1))
        BB = all((self._B(n + 1) @ self._B(n)).is_zero() for n in range(self.top - 1))
        bB = all((C.d(n + 1) @ self._B(n) + self._B(n - 1) @ C.d(n)).is_zero() for n in range(self.top))
        return {"bb": bb, "BB": BB, "bB+Bb": bB}

    def _B(self, n: int) -> ExactMatrix:
        M = self.B.get(n)
        if M is None:
            return ExactMatrix.zeros(self.algebra.ring, self.rank(n + 1), self.rank(n))
        return M


def _b_of(A: FPGradedAlgebra, chain: Chain) -> dict[Chain, object]:
    R = A.ring
    n = len(chain) - 1
    out: dict[Chain, object] = {}

    def acc(key, c):
        v = R(out.get(key, 0) + c)
        if v:
            out[key] = v
        else:
            out.pop(key, None)

    for i in range(n):
        sign = -1 if i % 2 else 1
        for m, c in A.multiply(chain[i], chain[i + 1]).items():
            acc(chain[:i] + (m,) + chain[i + 2:], sign * c)
    sign = -1 if n % 2 else 1
    for m, c in A.multiply(chain[n], chain[0]).items():
        acc((m,) + chain[1:n], sign * c)
    return out


def _B_of(A: FPGradedAlgebra, chain: Chain) -> dict[Chain, object]:
    n = len(chain) - 1
    if A.weight(chain[0]) == 0:
        return {}  # a scalar lands in a bar slot
    one = A.one()
    out: dict[Chain, object] = {}
    for i in range(n + 1):
        key = (one,) + chain[i:] + chain[:i]
        sign = -1 if (n * i) % 2 else 1
        v = out.get(key, 0) + sign
        if v:
            out[key] = v
        else:
            out.pop(key, None)
    return out


def hochschild_slice(A: FPGradedAlgebra, d: int, top: int | None = None, budget: int | None = None) -> HochschildSlice:
    """Build ``b`` and ``B`` in weight ``d`` for degrees ``0..top`` (default: all)."""
    if d < 0:
        raise ValueError("internal degree must be >= 0")
    top = d if top is None else min(top, d)
    budget = slice_budget() if budget is None else budget
    return _slice_cached(A, d, top, budget)


@lru_cache(maxsize=256)
def _slice_cached(A: FPGradedAlgebra, d: int, top: int, budget: int) -> HochschildSlice:
    R = A.ring
    bases = []
    total = 0
    for n in range(top + 1):
        bs = chain_basis(A, n, d)
        total += len(bs)
        if total > budget:
            raise BudgetExceeded(f"Hochschild slice (weight {d}, degrees 0..{n})", total, budget)
        bases.append(tuple(bs))
    idx = [{c: i for i, c in enumerate(bs)} for bs in bases]
    b = {}
    for n in range(1, top + 1):
        if not bases[n] or not bases[n - 1]:
            continue
        cols = {}
        for j, ch in enumerate(bases[n]):
            cols[j] = {idx[n - 1][k]: v for k, v in _b_of(A, ch).items()}
        b[n] = _matrix(R, cols, len(bases[n - 1]), len(bases[n]))
    B = {}
    for n in range(top):
        if not bases[n] or not bases[n + 1]:
            continue
        cols = {}
        for j, ch in enumerate(bases[n]):
            cols[j] = {idx[n + 1][k]: R(v) for k, v in _B_of(A, ch).items()}
        B[n] = _matrix(R, cols, len(bases[n + 1]), len(bases[n]))
    return HochschildSlice(A, d, top, tuple(bases), b, B)


def connes_B(sl: HochschildSlice) -> MixedComplex:
    """The slice as a mixed complex ``(C, b, B)``; identities are validated."""
    M = sl.mixed()
    M.validate()
    return M


def hochschild_homology(A: FPGradedAlgebra, d: int, N: int) -> dict[int, HomologyGroup]:
    """``HH_n(A)`` in internal weight ``d`` for ``0 <= n <= N``."""
    sl = hochschild_slice(A, d, N + 1)
    return homology(sl.complex(), range(N + 1))


def hochschild_table(A: FPGradedAlgebra, max_degree: int, N: int) -> list[dict]:
    rows = []
    for d in range(max_degree + 1):
        for n, g in hochschild_homology(A, d, N).items():
            rows.append({"n": n, "internal_degree": d, **g.to_json()})
    return rows


# ---------------------------------------------------------------------------
# Differential forms
# ---------------------------------------------------------------------------

Form = tuple[Mono, tuple[int, ...]]


def form_basis(A: FPGradedAlgebra, q: int, d: int) -> list[Form]:
    """``m · dx_I`` with ``|I| = q`` (increasing) and total weight ``d``."""
    _require_smooth(A, "differential forms")
    out = []
    for I in combinations(range(A.nvars), q):
        wI = sum(A.weights[i] for i in I)
        out.extend((m, I) for m in A.basis(d - wI))
    return out


def _d_form(A: FPGradedAlgebra, form: Form) -> dict[Form, int]:
    m, I = form
    out = {}
    for j, e in enumerate(m):
        if e == 0 or j in I:
            continue
        sign = -1 if sum(1 for i in I if i < j) % 2 else 1
        mm = list(m)
        mm[j] -= 1
        out[(tuple(mm), tuple(sorted(I + (j,))))] = sign * e
    return out


@dataclass(frozen=True, eq=False)
class DeRhamData:
    """Weight-``degree`` part of ``Ω^0 -> Ω^1 -> ... -> Ω^n``; ``D[q] : Ω^q -> Ω^{q+1}``."""

    algebra: FPGradedAlgebra
    degree: int
    bases: tuple[tuple[Form, ...], ...]
    D: Mapping[int, ExactMatrix] = field(repr=False)

    @property
    def top(self) -> int:
        return len(self.bases) - 1

    def rank(self, q: int) -> int:
        return len(self.bases[q]) if 0 <= q <= self.top else 0

    def d(self, q: int) -> ExactMatrix:
        M = self.D.get(q)
        if M is None:
            return ExactMatrix.zeros(self.algebra.ring, self.rank(q + 1), self.rank(q))
        return M

    def truncation(self, i: int) -> ChainComplex:
        """``Ω^{>=i}`` with ``Ω^q`` placed in homological degree ``2i - q``."""
        R = self.algebra.ring
        qs = [q for q in range(max(i, 0), self.top + 1) if self.rank(q)]
        ranks = {2 * i - q: self.rank(q) for q in qs}
        diffs = {2 * i - q: self.d(q) for q in qs if self.rank(q + 1)}
        return ChainComplex(R, ranks, diffs)

    def cochain_complex(self) -> ChainComplex:
        """``Ω^q`` in homological degree ``-q``."""
        R = self.algebra.ring
        qs = [q for q in range(self.top + 1) if self.rank(q)]
        diffs = {-q: self.d(q) for q in qs if self.rank(q + 1)}
        return ChainComplex(R, {-q: self.rank(q) for q in qs}, diffs)

    def mixed(self) -> MixedComplex:
        """``(Ω, 0, d_dR)`` with ``Ω^q`` in degree ``q`` and weight label ``q``."""
        R = self.algebra.ring
        ranks = {q: self.rank(q) for q in range(self.top + 1) if self.rank(q)}
        weights = {q: (q,) * r for q, r in ranks.items()}
        C = ChainComplex(R, ranks, {}, weights)
        B = {q: self.d(q) for q in ranks if self.rank(q + 1)}
        return MixedComplex(C, B, weight_shift=1)


def de_rham(A: FPGradedAlgebra, d: int) -> DeRhamData:
    return _de_rham_cached(A, d)


@lru_cache(maxsize=256)
def _de_rham_cached(A: FPGradedAlgebra, d: int) -> DeRhamData:
    _require_smooth(A, "de Rham complex")
    R = A.ring
    bases = [tuple(form_basis(A, q, d)) for q in range(A.nvars + 1)]
    D = {}
    for q in range(A.nvars):
        if not bases[q] or not bases[q + 1]:
            continue
        idx = {f: i for i, f in enumerate(bases[q + 1])}
        cols = {j: {idx[k]: R(v) for k, v in _d_form(A, f).items()} for j, f in enumerate(bases[q])}
        D[q] = _matrix(R, cols, len(bases[q + 1]), len(bases[q]))
    return DeRhamData(A, d, tuple(bases), D)


def de_rham_cohomology(A: FPGradedAlgebra, d: int) -> dict[int, HomologyGroup]:
    """``H^q`` of the weight-``d`` de Rham complex, keyed by ``q``."""
    D = de_rham(A, d)
    H = homology(D.cochain_complex(), [-q for q in range(A.nvars + 1)])
    return {q: H[-q] for q in range(A.nvars + 1)}


def truncated_de_rham_homology(A: FPGradedAlgebra, i: int, d: int) -> dict[int, HomologyGroup]:
    """Homology of ``Ω^{>=i}`` in weight ``d``, degrees ``2i - n .. 2i - i``."""
    return homology(de_rham(A, d).truncation(i), truncation_degrees(A, i))


def truncation_degrees(A: FPGradedAlgebra, i: int) -> range:
    """Homological degrees occupied by ``Ω^{>=i}``."""
    return range(2 * i - A.nvars, 2 * i - max(i, 0) + 1)


# ---------------------------------------------------------------------------
# HKR
# ---------------------------------------------------------------------------


def _perm_sign(p: tuple[int, ...]) -> int:
    sign = 1
    seen = [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def hkr_map(A: FPGradedAlgebra, q: int, d: int, sl: HochschildSlice | None = None) -> ExactMatrix:
    """Antisymmetrization ``ε_q : Ω^q_d -> C_q`` as a matrix (integral entries)."""
    _require_smooth(A, "HKR comparison")
    R = A.ring
    forms = form_basis(A, q, d)
    sl = sl or hochschild_slice(A, d, q + 1)
    if q > sl.top:
        return ExactMatrix.zeros(R, 0, len(forms))
    idx = sl.index(q)
    gens = [A.generator_monomial(i) for i in range(A.nvars)]
    cols = {}
    for j, (m, I) in enumerate(forms):
        col = {}
        for p in permutations(range(q)):
            key = (m,) + tuple(gens[I[k]] for k in p)
            col[idx[key]] = R(_perm_sign(p))
        cols[j] = col
    return _matrix(R, cols, sl.rank(q), len(forms))


def hkr_check(A: FPGradedAlgebra, q: int, d: int) -> dict:
    """Check that ``ε_q`` lands in cycles and induces ``Ω^q_d ≅ HH_q(A)_d``.

    Over a field: ε-images are independent modulo boundaries and their count
    equals ``dim HH_q``.  Over Z or Z_(p) additionally the lattice spanned by
    boundaries and ε-images must be saturated (all invariant factors units).
    """
    _require_smooth(A, "HKR comparison")
    R = A.ring
    sl = hochschild_slice(A, d, q + 1)
    C = sl.complex()
    eps = hkr_map(A, q, d, sl)
    omega = eps.cols
    hh = homology(C, [q])[q]
    cycles = (C.d(q) @ eps).is_zero() if C.rank(q) and q >= 1 else True
    bd = C.d(q + 1)
    rb = rank(bd) if C.rank(q + 1) and C.rank(q) else 0
    if C.rank(q) == 0:
        joint = ExactMatrix.zeros(R, 0, omega)
        rj = 0
    else:
        joint = bd.hstack(eps) if C.rank(q + 1) else eps
        rj = rank(joint) if joint.cols else 0
    independent = rj - rb == omega
    iso = cycles and independent and hh.free_rank == omega and not hh.torsion
    if iso and R.is_integral and joint.cols:
        iso = all(R.is_unit(f) for f in invariant_factors(joint))
    return {
        "q": q,
        "internal_degree": d,
        "omega_rank": omega,
        "hh": hh,
        "cycles": cycles,
        "iso": iso,
    }


def mixed_vs_de_rham_check(A: FPGradedAlgebra, q: int, d: int) -> dict:
    """Compare ``[B ε_q ω]`` with ``[ε_{q+1} d_dR ω]`` in ``HH_{q+1}`` (field base).

    In characteristic zero these agree: on normalized chains
    ``π B = (n+1) d π`` and ``π ε = n!`` for ``π(a_0⊗...⊗a_n) = a_0 da_1...da_n``.
    """
    _require_smooth(A, "HKR comparison")
    R = A.ring
    if not R.is_field:
        raise ValueError("field required")
    sl = hochschild_slice(A, d, q + 2)
    C = sl.complex()
    eps_q = hkr_map(A, q, d, sl)
    eps_q1 = hkr_map(A, q + 1, d, sl)
    dR = de_rham(A, d).d(q)
    if eps_q.cols == 0:
        return {"q": q, "internal_degree": d, "agree": True, "checked": 0}
    if C.rank(q + 1) == 0:
        return {"q": q, "internal_degree": d, "agree": True, "checked": eps_q.cols}
    HB = HomologyBasis(C, q + 1)
    Bq = sl._B(q)
    agree = True
    for j in range(eps_q.cols):
        lhs = Bq.apply(eps_q.column(j))
        if eps_q1.cols:
            rhs = eps_q1.apply(dR.column(j)) if dR.rows else [R.zero] * C.rank(q + 1)
        else:
            rhs = [R.zero] * C.rank(q + 1)
        if HB.coords(lhs) != HB.coords(rhs):
            agree = False
    return {"q": q, "internal_degree": d, "agree": agree, "checked": eps_q.cols}


# ---------------------------------------------------------------------------
# Negative cyclic homology
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HCEntry:
    n: int
    internal_degree: int
    group: HomologyGroup
    stable: bool

    def to_json(self) -> dict:
        return {"n": self.n, "internal_degree": self.internal_degree, **self.group.to_json(), "stable": self.stable}


def hc_minus(A: FPGradedAlgebra, U: int, d: int, degrees: Iterable[int]) -> list[HCEntry]:
    """``HC^-`` of the bar model in weight ``d`` modulo ``u^U``, with stability flags."""
    M = hochschild_slice(A, d).mixed()
    res = u_homology(M, U, degrees)
    return [HCEntry(n, d, r.group, r.stable) for n, r in sorted(res.items())]


def hc_minus_dr(A: FPGradedAlgebra, U: int, d: int, degrees: Iterable[int]) -> list[HCEntry]:
    """``HC^-`` of the de Rham model ``(Ω, 0, d_dR)`` modulo ``u^U``."""
    M = de_rham(A, d).mixed()
    res = u_homology(M, U, degrees)
    return [HCEntry(n, d, r.group, r.stable) for n, r in sorted(res.items())]


@dataclass(frozen=True, eq=False)
class FilteredHCModel:
    """De Rham model of ``HC^-`` in one weight, with its Hodge filtration.

    ``u^j Ω^q`` has Hodge weight ``q - j``; ``F^i`` is spanned by weight ``>= i``.
    """

    algebra: FPGradedAlgebra
    degree: int
    U: int
    total: ChainComplex
    filtration: FilteredComplex
    graded: GradedComplex

    def gr_homology(self, i: int, degrees: Iterable[int]) -> dict[int, HomologyGroup]:
        piece = self.graded.piece(i)
        degrees = list(degrees)
        if piece is None:
            return {n: HomologyGroup(0) for n in degrees}
        return homology(piece, degrees)


def filtered_hc_minus_dr_model(A: FPGradedAlgebra, U: int, d: int) -> FilteredHCModel:
    _require_smooth(A, "filtered de Rham model")
    M = de_rham(A, d).mixed()
    T = total_u_complex(M, U)
    F = FilteredComplex.from_levels(T, T.weights)
    return FilteredHCModel(A, d, U, T, F, associated_graded(F))


def gr_vs_truncation_check(A: FPGradedAlgebra, U: int, d: int, levels: Iterable[int]) -> dict:
    """Compare ``gr^i`` of the filtered model with ``H(Ω^{>=i})`` (shift ``2i - q``).

    ``gr^i`` only sees ``u^j`` with ``j < U``, i.e. forms of degree ``< i + U``;
    levels where that cuts off ``Ω^{>=i}`` are reported as ``"truncated"``.
    """
    model = filtered_hc_minus_dr_model(A, U, d)
    rows = []
    ok = True
    for i in levels:
        degrees = truncation_degrees(A, i)
        gr = model.gr_homology(i, degrees)
        tr = truncated_de_rham_homology(A, i, d)
        complete = i + U - 1 >= A.nvars
        match = all(gr[n] == tr.get(n, HomologyGroup(0)) for n in degrees)
        if complete:
            ok = ok and match
        rows.append({
            "level": i,
            "internal_degree": d,
            "complete": complete,
            "match": match,
            "gr": {n: gr[n] for n in degrees},
        })
    return {"pass": ok, "rows": rows}


def comparison_map_check(A: FPGradedAlgebra, max_degree: int, U: int, degrees: Iterable[int]) -> dict:
    """Compare bar-model and de Rham-model ``HC^-`` groups degree by degree.

    Only degrees that are provably stable in both truncations are compared.
    In positive characteristic mismatches are recorded, not treated as failure.
    """
    _require_smooth(A, "comparison map")
    degrees = list(degrees)
    char0 = A.ring.characteristic == 0
    rows = []
    mismatches = []
    for d in range(max_degree + 1):
        bar = hochschild_slice(A, d).mixed()
        dr = de_rham(A, d).mixed()
        lo = max(u_stable_from(bar, U) or -10**9, u_stable_from(dr, U) or -10**9)
        hb = homology(total_u_complex(bar, U), degrees)
        hd = homology(total_u_complex(dr, U), degrees)
        for n in degrees:
            if n < lo:
                continue
            eq = hb[n] == hd[n]
            rows.append({"n": n, "internal_degree": d, "bar": hb[n], "de_rham": hd[n], "equal": eq})
            if not eq:
                mismatches.append((n, d))
    if mismatches and not char0:
        log.info("bar and de Rham models of HC^- differ at %s over %s", mismatches, A.ring)
    return {
        "pass": not mismatches if char0 else True,
        "flagged": [] if char0 else mismatches,
        "rows": rows,
    }
