"""Chain complexes, mixed complexes, filtered/graded complexes and their homology.

Conventions: homological grading (``d_n : C_n -> C_{n-1}``), Koszul sign
``d(x⊗y) = dx⊗y + (-1)^|x| x⊗dy``, and ``u`` of homological degree -2 and
weight -1 in :func:`total_u_complex`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .exactalg import (
    BaseRing,
    ExactMatrix,
    block_matrix,
    diagonal_sum,
    invariant_factors,
    kernel_basis,
    p_adic_valuation,
    prime_power_factors,
    rank,
    solve,
    split_cokernel,
)

log = logging.getLogger(__name__)


class ComplexError(ValueError):
    pass


def kron(A: ExactMatrix, B: ExactMatrix) -> ExactMatrix:
    R = A.ring
    rows = []
    for ra in A.entries:
        for rb in B.entries:
            rows.append(tuple(R(a * b) for a in ra for b in rb))
    return ExactMatrix(A.rows * B.rows, A.cols * B.cols, tuple(rows), R)


def _freeze(d: Mapping | None) -> Mapping:
    return MappingProxyType(dict(d or {}))


# ---------------------------------------------------------------------------
# Chain complexes
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ChainComplex:
    """Finitely supported complex of free modules.

    ``ranks[n]`` is the rank of ``C_n`` and ``diffs[n]`` the matrix of
    ``d_n : C_n -> C_{n-1}`` (shape ``rank(n-1) x rank(n)``).  Missing
    differentials are zero.  ``weights[n]``, when given, labels each basis
    element of ``C_n`` with an internal weight which ``d`` must preserve.
    """

    ring: BaseRing
    ranks: Mapping[int, int]
    diffs: Mapping[int, ExactMatrix] = field(default_factory=dict)
    weights: Mapping[int, tuple[int, ...]] | None = None
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "ranks", _freeze({n: r for n, r in self.ranks.items() if r}))
        object.__setattr__(self, "diffs", _freeze(self.diffs))
        if self.weights is not None:
            object.__setattr__(self, "weights", _freeze({n: tuple(w) for n, w in self.weights.items() if w}))
        for n, M in self.diffs.items():
            if M.shape != (self.rank(n - 1), self.rank(n)):
                raise ComplexError(f"d_{n} has shape {M.shape}, expected {(self.rank(n - 1), self.rank(n))}")
            if M.ring != self.ring:
                raise ComplexError(f"d_{n} is over {M.ring}, complex over {self.ring}")
        if self.weights is not None:
            for n in self.ranks:
                if len(self.weights.get(n, ())) != self.rank(n):
                    raise ComplexError(f"weights in degree {n} do not match rank")
        if self.check:
            self.validate()

    def validate(self):
        for n in self.diffs:
            if n - 1 in self.diffs:
                dd = self.d(n - 1) @ self.d(n)
                if not dd.is_zero():
                    raise ComplexError(f"d_{n - 1} ∘ d_{n} != 0")
        if self.weights is not None:
            for n, M in self.diffs.items():
                ws, wt = self.weights.get(n, ()), self.weights.get(n - 1, ())
                for i, row in enumerate(M.entries):
                    for j, a in enumerate(row):
                        if a and ws[j] != wt[i]:
                            raise ComplexError(f"d_{n} does not preserve weight ({ws[j]} -> {wt[i]})")

    def rank(self, n: int) -> int:
        return self.ranks.get(n, 0)

    def d(self, n: int) -> ExactMatrix:
        M = self.diffs.get(n)
        if M is None:
            return ExactMatrix.zeros(self.ring, self.rank(n - 1), self.rank(n))
        return M

    def weight_labels(self, n: int) -> tuple[int, ...] | None:
        if self.weights is None:
            return None
        return self.weights.get(n, ())

    @property
    def degrees(self) -> list[int]:
        return sorted(self.ranks)

    def support(self) -> tuple[int, int] | None:
        if not self.ranks:
            return None
        return min(self.ranks), max(self.ranks)

    def weight_part(self, w: int) -> ChainComplex:
        """Subcomplex spanned by basis elements of weight ``w``."""
        if self.weights is None:
            raise ComplexError("complex carries no weights")
        idx = {n: [i for i, x in enumerate(self.weights.get(n, ())) if x == w] for n in self.ranks}
        ranks = {n: len(v) for n, v in idx.items()}
        diffs = {}
        for n, M in self.diffs.items():
            if idx.get(n) and idx.get(n - 1):
                diffs[n] = M.submatrix(idx[n - 1], idx[n])
        return ChainComplex(self.ring, ranks, diffs, {n: (w,) * r for n, r in ranks.items()}, check=False)

    def shift(self, k: int) -> ChainComplex:
        """``C[k]``: degree ``n`` moves to ``n + k`` (differential signs kept)."""
        w = None if self.weights is None else {n + k: v for n, v in self.weights.items()}
        return ChainComplex(self.ring, {n + k: r for n, r in self.ranks.items()}, {n + k: M for n, M in self.diffs.items()}, w, check=False)


@dataclass(frozen=True)
class HomologyGroup:
    """Finitely generated abelian group ``Z^free_rank ⊕ ⊕ Z/t`` (or a vector space)."""

    free_rank: int
    torsion: tuple[int, ...] = ()

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def primary_torsion(self) -> list[tuple[int, int]]:
        out = []
        for t in self.torsion:
            out.extend(prime_power_factors(t))
        return sorted(out)

    def to_json(self) -> dict:
        return {
            "free_rank": self.free_rank,
            "torsion": [f"{q}^{e}" for q, e in self.primary_torsion()],
        }

    def __str__(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("R" if self.free_rank == 1 else f"R^{self.free_rank}")
        parts.extend(f"Z/{t}" for t in self.torsion)
        return " + ".join(parts) if parts else "0"


def homology(C: ChainComplex, degrees: Iterable[int] | None = None) -> dict[int, HomologyGroup]:
    """Homology per degree.  Fields: dimensions; Z and Z_(p): Smith normal form.

    Degrees outside the support are reported as zero.  Over Z_(p) torsion
    prime to p is dropped (with a log warning).
    """
    R = C.ring
    if degrees is None:
        sup = C.support()
        degrees = range(sup[0], sup[1] + 1) if sup else []
    if not (R.is_field or R.is_integral):
        raise ComplexError(f"homology over {R} is not supported (use a field, Z or Z_(p))")
    out = {}
    rank_cache: dict[int, int] = {}

    def rk(n):
        if n not in rank_cache:
            rank_cache[n] = rank(C.d(n)) if n in C.diffs else 0
        return rank_cache[n]

    for n in degrees:
        free = C.rank(n) - rk(n) - rk(n + 1)
        torsion: tuple[int, ...] = ()
        if R.is_integral and n + 1 in C.diffs:
            facs = [abs(f) for f in invariant_factors(C.d(n + 1)) if abs(f) != 1]
            if R.kind == "PLocalIntegers":
                kept = []
                for f in facs:
                    if f % R.p == 0:
                        kept.append(R.p ** p_adic_valuation(f, R.p))
                    if f % R.p != 0 or f != R.p ** p_adic_valuation(f, R.p):
                        log.warning("dropping prime-to-%d torsion from Z/%d in degree %d", R.p, f, n)
                facs = kept
            torsion = tuple(facs)
        out[n] = HomologyGroup(free, torsion)
    return out


class HomologyBasis:
    """Cycle representatives for a basis of ``H_n`` over a field, with class coordinates."""

    def __init__(self, C: ChainComplex, n: int):
        R = C.ring
        if not R.is_field:
            raise ComplexError("field required")
        self.ring = R
        self.degree = n
        cycles = kernel_basis(C.d(n)) if C.rank(n) else []
        bd = C.d(n + 1)
        self._bd_cols = [c for c in bd.columns() if any(c)]
        span = list(self._bd_cols)
        base_rank = rank(ExactMatrix.from_columns(R, span, C.rank(n))) if span else 0
        reps = []
        for z in cycles:
            trial = span + [z]
            r = rank(ExactMatrix.from_columns(R, trial, C.rank(n)))
            if r > base_rank:
                span, base_rank = trial, r
                reps.append(z)
        self.reps = reps
        self.dim = len(reps)
        self._n = C.rank(n)
        self._d = C.d(n)

    def coords(self, z: Sequence) -> list:
        """Coordinates of the class of the cycle ``z`` in the basis ``reps``."""
        R = self.ring
        if any(self._d.apply(z)):
            raise ComplexError("not a cycle")
        cols = self.reps + self._bd_cols
        if not cols:
            return []
        M = ExactMatrix.from_columns(R, cols, self._n)
        x = solve(M, z)
        if x is None:
            raise ComplexError("cycle not in span (inconsistent basis)")
        return x[: self.dim]


# ---------------------------------------------------------------------------
# Chain maps, cones, tensors
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ChainMap:
    source: ChainComplex
    target: ChainComplex
    maps: Mapping[int, ExactMatrix]
    check: bool = True

    def __post_init__(self):
        object.__setattr__(self, "maps", _freeze(self.maps))
        if self.source.ring != self.target.ring:
            raise ComplexError("ring mismatch")
        if self.check:
            degs = set(self.source.ranks) | set(self.target.ranks)
            for n in degs:
                if self.f(n - 1) @ self.source.d(n) != self.target.d(n) @ self.f(n):
                    raise ComplexError(f"not a chain map in degree {n}")

    def f(self, n: int) -> ExactMatrix:
        M = self.maps.get(n)
        if M is None:
            return ExactMatrix.zeros(self.source.ring, self.target.rank(n), self.source.rank(n))
        return M


def identity_map(C: ChainComplex) -> ChainMap:
    return ChainMap(C, C, {n: ExactMatrix.identity(C.ring, r) for n, r in C.ranks.items()})


def cone(f: ChainMap) -> ChainComplex:
    """Mapping cone: ``Cone_n = C_{n-1} ⊕ D_n``, ``d(c, x) = (-dc, f c + dx)``."""
    C, D = f.source, f.target
    R = C.ring
    degs = sorted(set(n + 1 for n in C.ranks) | set(D.ranks))
    ranks = {n: C.rank(n - 1) + D.rank(n) for n in degs}
    diffs = {}
    for n in degs:
        if ranks.get(n - 1, 0) == 0:
            continue
        blocks = [[-C.d(n - 1), None], [f.f(n - 1), D.d(n)]]
        diffs[n] = block_matrix(R, blocks, [C.rank(n - 2), D.rank(n - 1)], [C.rank(n - 1), D.rank(n)])
    return ChainComplex(R, ranks, diffs)


def _tensor_layout(C: ChainComplex, D: ChainComplex) -> dict[int, list[tuple[int, int]]]:
    layout: dict[int, list[tuple[int, int]]] = {}
    for i in sorted(C.ranks):
        for j in sorted(D.ranks):
            layout.setdefault(i + j, []).append((i, j))
    return layout


def tensor(C: ChainComplex, D: ChainComplex) -> ChainComplex:
    """Tensor product with the Koszul sign rule.

    Degree ``n`` is ordered by blocks ``C_i ⊗ D_j`` (increasing ``i``), each
    block in Kronecker order.
    """
    if C.ring != D.ring:
        raise ComplexError("ring mismatch")
    R = C.ring
    layout = _tensor_layout(C, D)
    ranks = {n: sum(C.rank(i) * D.rank(j) for i, j in blocks) for n, blocks in layout.items()}
    offsets = {}
    for n, blocks in layout.items():
        off = 0
        for i, j in blocks:
            offsets[(i, j)] = off
            off += C.rank(i) * D.rank(j)
    diffs = {}
    for n, blocks in layout.items():
        if ranks.get(n - 1, 0) == 0:
            continue
        rows = [[0] * ranks[n] for _ in range(ranks[n - 1])]
        for i, j in blocks:
            src = offsets[(i, j)]
            if (i - 1, j) in offsets and C.rank(i - 1):
                M = kron(C.d(i), ExactMatrix.identity(R, D.rank(j)))
                _place(rows, M, offsets[(i - 1, j)], src)
            if (i, j - 1) in offsets and D.rank(j - 1):
                M = kron(ExactMatrix.identity(R, C.rank(i)), D.d(j))
                if i % 2:
                    M = -M
                _place(rows, M, offsets[(i, j - 1)], src)
        diffs[n] = ExactMatrix.from_rows(R, rows, ranks[n])
    weights = None
    if C.weights is not None and D.weights is not None:
        weights = {}
        for n, blocks in layout.items():
            w = []
            for i, j in blocks:
                for a in C.weights.get(i, ()):
                    for b in D.weights.get(j, ()):
                        w.append(a + b)
            weights[n] = tuple(w)
    return ChainComplex(R, ranks, diffs, weights)


def _place(rows, M: ExactMatrix, r0: int, c0: int):
    for i, row in enumerate(M.entries):
        target = rows[r0 + i]
        for j, a in enumerate(row):
            if a:
                target[c0 + j] += a


def point(ring: BaseRing, weight: int | None = None) -> ChainComplex:
    """The base ring in degree 0."""
    return ChainComplex(ring, {0: 1}, {}, None if weight is None else {0: (weight,)})


# ---------------------------------------------------------------------------
# Mixed complexes
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MixedComplex:
    """Chain complex with a degree +1 operator ``B``, ``B² = 0``, ``dB + Bd = 0``.

    ``B[n] : C_n -> C_{n+1}``.  When the underlying complex carries weights,
    ``B`` must shift them by ``weight_shift`` (1 for the ε-weight).
    """

    underlying: ChainComplex
    B: Mapping[int, ExactMatrix] = field(default_factory=dict)
    weight_shift: int = 1
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "B", _freeze(self.B))
        C = self.underlying
        for n, M in self.B.items():
            if M.shape != (C.rank(n + 1), C.rank(n)):
                raise ComplexError(f"B_{n} has shape {M.shape}, expected {(C.rank(n + 1), C.rank(n))}")
        if self.check:
            self.validate()

    @property
    def ring(self) -> BaseRing:
        return self.underlying.ring

    def b(self, n: int) -> ExactMatrix:
        M = self.B.get(n)
        if M is None:
            C = self.underlying
            return ExactMatrix.zeros(C.ring, C.rank(n + 1), C.rank(n))
        return M

    def d(self, n: int) -> ExactMatrix:
        return self.underlying.d(n)

    def validate(self):
        C = self.underlying
        for n in C.ranks:
            if not (self.b(n + 1) @ self.b(n)).is_zero():
                raise ComplexError(f"B∘B != 0 on degree {n}")
            if not (C.d(n + 1) @ self.b(n) + self.b(n - 1) @ C.d(n)).is_zero():
                raise ComplexError(f"dB + Bd != 0 on degree {n}")
        if C.weights is not None:
            for n, M in self.B.items():
                ws, wt = C.weights.get(n, ()), C.weights.get(n + 1, ())
                for i, row in enumerate(M.entries):
                    for j, a in enumerate(row):
                        if a and wt[i] != ws[j] + self.weight_shift:
                            raise ComplexError(f"B_{n} does not shift weight by {self.weight_shift}")


def tensor_mixed(X: MixedComplex, Y: MixedComplex) -> MixedComplex:
    """Tensor of mixed complexes with ``B = B⊗1 + (-1)^|x| 1⊗B`` (ε primitive)."""
    T = tensor(X.underlying, Y.underlying)
    C, D = X.underlying, Y.underlying
    R = C.ring
    layout = _tensor_layout(C, D)
    offsets = {}
    for n, blocks in layout.items():
        off = 0
        for i, j in blocks:
            offsets[(i, j)] = off
            off += C.rank(i) * D.rank(j)
    B = {}
    for n, blocks in layout.items():
        if T.rank(n + 1) == 0:
            continue
        rows = [[0] * T.rank(n) for _ in range(T.rank(n + 1))]
        for i, j in blocks:
            src = offsets[(i, j)]
            if (i + 1, j) in offsets:
                _place(rows, kron(X.b(i), ExactMatrix.identity(R, D.rank(j))), offsets[(i + 1, j)], src)
            if (i, j + 1) in offsets:
                M = kron(ExactMatrix.identity(R, C.rank(i)), Y.b(j))
                if i % 2:
                    M = -M
                _place(rows, M, offsets[(i, j + 1)], src)
        B[n] = ExactMatrix.from_rows(R, rows, T.rank(n))
    return MixedComplex(T, B, X.weight_shift)


def total_u_complex(M: MixedComplex, U: int) -> ChainComplex:
    """Truncated product totalization of ``(M[[u]], d + uB)`` modulo ``u^U``.

    Degree ``n`` is ``⊕_{j<U} u^j M_{n+2j}`` (blocks ordered by ``j``).  If
    ``M`` has weights, ``u^j x`` gets weight ``w(x) - j``.
    """
    if U < 1:
        raise ComplexError("U must be >= 1")
    C = M.underlying
    R = C.ring
    sup = C.support()
    if sup is None:
        return ChainComplex(R, {})
    lo, hi = sup[0] - 2 * (U - 1), sup[1]
    ranks = {n: sum(C.rank(n + 2 * j) for j in range(U)) for n in range(lo, hi + 1)}
    diffs = {}
    for n in range(lo + 1, hi + 1):
        if not ranks.get(n) or not ranks.get(n - 1):
            continue
        blocks = [[None] * U for _ in range(U)]
        for j in range(U):
            blocks[j][j] = C.d(n + 2 * j)
            if j + 1 < U:
                blocks[j + 1][j] = M.b(n + 2 * j)
        diffs[n] = block_matrix(R, blocks, [C.rank(n - 1 + 2 * j) for j in range(U)], [C.rank(n + 2 * j) for j in range(U)])
    weights = None
    if C.weights is not None:
        weights = {}
        for n in ranks:
            w = []
            for j in range(U):
                w.extend(x - j for x in C.weights.get(n + 2 * j, ()))
            weights[n] = tuple(w)
    return ChainComplex(R, ranks, diffs, weights)


def u_stable_from(M: MixedComplex, U: int) -> int | None:
    """Lowest degree from which the ``u^U`` truncation provably agrees with the limit.

    The kernel of the ``u^{U+1} -> u^U`` restriction is ``M[-2U]`` with
    differential ``d``; it cannot affect degrees ``n`` with ``n + 2U - 1`` above
    the support of ``M``.
    """
    sup = M.underlying.support()
    if sup is None:
        return None
    return sup[1] + 2 - 2 * U


@dataclass(frozen=True)
class UHomology:
    group: HomologyGroup
    stable: bool


def u_homology(M: MixedComplex, U: int, degrees: Iterable[int]) -> dict[int, UHomology]:
    """Homology of the ``u^U`` truncation, flagged stable where ``U+1`` gives the same group."""
    degrees = list(degrees)
    a = homology(total_u_complex(M, U), degrees)
    b = homology(total_u_complex(M, U + 1), degrees)
    return {n: UHomology(a[n], a[n] == b[n]) for n in degrees}


# ---------------------------------------------------------------------------
# Filtered and graded complexes
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GradedComplex:
    pieces: Mapping[int, ChainComplex]

    def __post_init__(self):
        object.__setattr__(self, "pieces", _freeze({w: c for w, c in self.pieces.items() if c.ranks}))

    def piece(self, w: int) -> ChainComplex | None:
        return self.pieces.get(w)

    def rank_table(self) -> dict[int, dict[int, int]]:
        return {w: dict(sorted(c.ranks.items())) for w, c in sorted(self.pieces.items())}

    def total(self) -> ChainComplex:
        """Direct sum over weights (weights recorded as basis labels)."""
        ws = sorted(self.pieces)
        if not ws:
            raise ComplexError("empty graded complex")
        R = self.pieces[ws[0]].ring
        degs = sorted({n for c in self.pieces.values() for n in c.ranks})
        ranks = {n: sum(self.pieces[w].rank(n) for w in ws) for n in degs}
        diffs = {n: diagonal_sum(R, [self.pieces[w].d(n) for w in ws]) for n in degs if ranks.get(n - 1)}
        weights = {n: tuple(w for w in ws for _ in range(self.pieces[w].rank(n))) for n in degs}
        return ChainComplex(R, ranks, diffs, weights)


@dataclass(frozen=True, eq=False)
class FilteredComplex:
    """Finite decreasing tower ``F^s ⊇ F^{s+1} ⊇ ... ⊇ F^N``.

    ``pieces[k]`` is ``F^{start+k}`` and ``inclusions[k][n]`` the matrix of
    ``F^{start+k+1}_n -> F^{start+k}_n``.  Below ``start`` the filtration is
    constant, above ``N`` it is zero.
    """

    pieces: tuple[ChainComplex, ...]
    inclusions: tuple[Mapping[int, ExactMatrix], ...]
    start: int = 0
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        object.__setattr__(self, "inclusions", tuple(_freeze(m) for m in self.inclusions))
        if len(self.inclusions) != max(len(self.pieces) - 1, 0):
            raise ComplexError("need one inclusion per consecutive pair")
        if self.check:
            self.validate()

    @property
    def ring(self) -> BaseRing:
        return self.pieces[0].ring

    @property
    def stop(self) -> int:
        return self.start + len(self.pieces) - 1

    def F(self, i: int) -> ChainComplex:
        if i > self.stop:
            return ChainComplex(self.ring, {})
        return self.pieces[max(i, self.start) - self.start]

    def inclusion(self, i: int, n: int) -> ExactMatrix:
        """``F^{i+1}_n -> F^i_n``."""
        k = i - self.start
        src, tgt = self.F(i + 1), self.F(i)
        if k < 0:
            return ExactMatrix.identity(self.ring, tgt.rank(n))
        M = self.inclusions[k].get(n) if k < len(self.inclusions) else None
        if M is None:
            return ExactMatrix.zeros(self.ring, tgt.rank(n), src.rank(n))
        return M

    def validate(self):
        for k in range(len(self.inclusions)):
            i = self.start + k
            src, tgt = self.F(i + 1), self.F(i)
            for n in set(src.ranks) | set(tgt.ranks):
                inc = self.inclusion(i, n)
                if inc.shape != (tgt.rank(n), src.rank(n)):
                    raise ComplexError(f"inclusion F^{i + 1} -> F^{i} in degree {n} has wrong shape")
                if src.rank(n) and rank(inc) != src.rank(n):
                    raise ComplexError(f"F^{i + 1} -> F^{i} is not injective in degree {n}")
                if self.inclusion(i, n - 1) @ src.d(n) != tgt.d(n) @ inc:
                    raise ComplexError(f"F^{i + 1} -> F^{i} is not a chain map in degree {n}")

    def to_total(self, i: int, n: int) -> ExactMatrix:
        """Composite inclusion ``F^i_n -> F^start_n``."""
        R = self.ring
        M = ExactMatrix.identity(R, self.F(i).rank(n))
        for k in range(i - 1, self.start - 1, -1):
            M = self.inclusion(k, n) @ M
        return M

    @classmethod
    def from_levels(cls, C: ChainComplex, levels: Mapping[int, Sequence[int]], start: int | None = None, stop: int | None = None) -> FilteredComplex:
        """Filtration spanned by basis subsets: ``F^i`` = span of basis elements with level >= i."""
        all_levels = [x for n in C.ranks for x in levels.get(n, ())]
        if start is None:
            start = min(all_levels, default=0)
        if stop is None:
            stop = max(all_levels, default=start)
        idx = {i: {n: [a for a, x in enumerate(levels.get(n, ())) if x >= i] for n in C.ranks} for i in range(start, stop + 1)}
        pieces = []
        for i in range(start, stop + 1):
            sel = idx[i]
            ranks = {n: len(s) for n, s in sel.items()}
            diffs = {}
            for n in C.diffs:
                if sel.get(n) and sel.get(n - 1):
                    sub = C.d(n).submatrix(sel[n - 1], sel[n])
                    full = C.d(n).submatrix(list(range(C.rank(n - 1))), sel[n])
                    # levels must define a subcomplex
                    outside = [r for r in range(C.rank(n - 1)) if r not in set(sel[n - 1])]
                    if any(full.entries[r][j] for r in outside for j in range(len(sel[n]))):
                        raise ComplexError(f"level {i} is not a subcomplex in degree {n}")
                    diffs[n] = sub
                elif sel.get(n):
                    if any(x for r in C.d(n).entries for x in (r[j] for j in sel[n])):
                        raise ComplexError(f"level {i} is not a subcomplex in degree {n}")
            w = None
            if C.weights is not None:
                w = {n: tuple(C.weights[n][a] for a in s) for n, s in sel.items()}
            pieces.append(ChainComplex(C.ring, ranks, diffs, w))
        incs = []
        for i in range(start, stop):
            m = {}
            for n in C.ranks:
                big, small = idx[i][n], idx[i + 1][n]
                pos = {a: r for r, a in enumerate(big)}
                rows = [[0] * len(small) for _ in big]
                for c, a in enumerate(small):
                    rows[pos[a]][c] = 1
                m[n] = ExactMatrix.from_rows(C.ring, rows, len(small))
            incs.append(m)
        return cls(tuple(pieces), tuple(incs), start)


def quotient_complex(sub: ChainComplex, big: ChainComplex, inc: Mapping[int, ExactMatrix]) -> ChainComplex:
    """``big / sub`` for a degreewise split injective chain map."""
    R = big.ring
    P, s = {}, {}
    for n in big.ranks:
        M = inc.get(n)
        if M is None or sub.rank(n) == 0:
            P[n] = ExactMatrix.identity(R, big.rank(n))
            s[n] = P[n]
        else:
            P[n], s[n] = split_cokernel(M)
    ranks = {n: P[n].rows for n in big.ranks}
    diffs = {}
    for n in big.ranks:
        if ranks.get(n) and ranks.get(n - 1):
            diffs[n] = P[n - 1] @ big.d(n) @ s[n]
    return ChainComplex(R, ranks, diffs)


def associated_graded(F: FilteredComplex) -> GradedComplex:
    """``gr^i = F^i / F^{i+1}`` for each level of the tower."""
    pieces = {}
    for i in range(F.start, F.stop + 1):
        big = F.F(i)
        if i == F.stop:
            pieces[i] = big
            continue
        inc = {n: F.inclusion(i, n) for n in big.ranks}
        pieces[i] = quotient_complex(F.F(i + 1), big, inc)
    return GradedComplex(pieces)
