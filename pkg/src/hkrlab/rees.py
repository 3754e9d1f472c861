"""Filtered complexes as graded modules over ``k[t]`` (``t`` of weight -1).

A decreasing filtration ``F^s ⊇ F^{s+1} ⊇ ... ⊇ F^N`` becomes the graded
module with ``F^i`` in weight ``i`` and ``t`` acting by the inclusions.
Setting ``t = 0`` gives the associated graded; inverting ``t`` gives the
underlying complex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .complexes import (
    ChainComplex,
    ComplexError,
    FilteredComplex,
    GradedComplex,
    _freeze,
    _tensor_layout,
    associated_graded,
    kron,
    quotient_complex,
    tensor,
)
from .exactalg import ExactMatrix, block_matrix, image_basis, rank, solve


@dataclass(frozen=True, eq=False)
class ReesModule:
    """Weights ``start..stop``; ``t[k][n] : M_{start+k+1, n} -> M_{start+k, n}``.

    Below ``start`` every ``t`` is the identity, above ``stop`` the module is 0.
    ``honest`` records whether ``t`` is injective wherever its source is nonzero.
    """

    pieces: tuple[ChainComplex, ...]
    t: tuple[Mapping[int, ExactMatrix], ...]
    start: int = 0
    honest: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        object.__setattr__(self, "t", tuple(_freeze(m) for m in self.t))
        if len(self.t) != max(len(self.pieces) - 1, 0):
            raise ComplexError("need one t-map per consecutive pair of weights")
        honest = True
        for k, maps in enumerate(self.t):
            src = self.pieces[k + 1]
            for n in src.ranks:
                M = self.t_map(self.start + k, n)
                if rank(M) != src.rank(n):
                    honest = False
        object.__setattr__(self, "honest", honest)

    @property
    def ring(self):
        return self.pieces[0].ring

    @property
    def stop(self) -> int:
        return self.start + len(self.pieces) - 1

    def piece(self, w: int) -> ChainComplex:
        if w > self.stop:
            return ChainComplex(self.ring, {})
        return self.pieces[max(w, self.start) - self.start]

    def t_map(self, w: int, n: int) -> ExactMatrix:
        """``t : M_{w+1} -> M_w`` in homological degree ``n``."""
        tgt, src = self.piece(w), self.piece(w + 1)
        if w < self.start:
            return ExactMatrix.identity(self.ring, tgt.rank(n))
        k = w - self.start
        M = self.t[k].get(n) if k < len(self.t) else None
        return M if M is not None else ExactMatrix.zeros(self.ring, tgt.rank(n), src.rank(n))

    def rank_table(self) -> dict[int, dict[int, int]]:
        """``{weight: {degree: rank}}`` for weights ``start - 1 .. stop + 1``."""
        return {w: dict(sorted(self.piece(w).ranks.items())) for w in range(self.start - 1, self.stop + 2)}

    def to_json(self) -> dict:
        return {
            "start": self.start,
            "honest": self.honest,
            "ranks": [
                {"weight": w, "degree": n, "rank": r}
                for w, row in self.rank_table().items()
                for n, r in row.items()
            ],
        }


def rees_of(F: FilteredComplex) -> ReesModule:
    return ReesModule(F.pieces, F.inclusions, F.start)


def free_rees(C: ChainComplex, weight: int = 0) -> ReesModule:
    """``C ⊗ k[t]`` generated in ``weight`` (the constant filtration)."""
    return ReesModule((C,), (), weight)


def fiber_at_zero(R: ReesModule) -> GradedComplex:
    """Cokernel of ``t`` in each weight."""
    pieces = {}
    for w in range(R.start, R.stop + 1):
        big = R.piece(w)
        if w == R.stop:
            pieces[w] = big
            continue
        inc = {}
        for n in big.ranks:
            M = R.t_map(w, n)
            if M.cols and not M.is_zero():
                inc[n] = M if rank(M) == M.cols else image_basis(M)
        sub = ChainComplex(R.ring, {n: M.cols for n, M in inc.items()}, check=False)
        pieces[w] = quotient_complex(sub, big, inc)
    return GradedComplex(pieces)


def fiber_at_one(R: ReesModule) -> ChainComplex:
    """Colimit along ``t`` (towards low weight); ``t`` is invertible below ``start``."""
    return R.piece(R.start)


# ---------------------------------------------------------------------------
# Day convolution
# ---------------------------------------------------------------------------


def _tensor_chain_map(C: ChainComplex, D: ChainComplex, C2: ChainComplex, D2: ChainComplex, f: Mapping[int, ExactMatrix], g: Mapping[int, ExactMatrix]) -> dict[int, ExactMatrix]:
    """``f ⊗ g : C ⊗ D -> C2 ⊗ D2`` degreewise, in the block layout of :func:`tensor`."""
    R = C2.ring
    src, tgt = _tensor_layout(C, D), _tensor_layout(C2, D2)
    out = {}
    for n in set(src) | set(tgt):
        sb, tb = src.get(n, []), tgt.get(n, [])
        col_sizes = [C.rank(i) * D.rank(j) for i, j in sb]
        row_sizes = [C2.rank(i) * D2.rank(j) for i, j in tb]
        blocks = [[None] * len(sb) for _ in tb]
        for a, (i, j) in enumerate(tb):
            for b, (i2, j2) in enumerate(sb):
                if (i, j) == (i2, j2):
                    blocks[a][b] = kron(f[i], g[j])
        out[n] = block_matrix(R, blocks, row_sizes, col_sizes)
    return out


def _subcomplex(T: ChainComplex, spans: Mapping[int, ExactMatrix]) -> ChainComplex:
    """Subcomplex whose degree-``n`` basis is the columns of ``spans[n]``."""
    R = T.ring
    ranks = {n: M.cols for n, M in spans.items() if M.cols}
    diffs = {}
    for n in ranks:
        if not ranks.get(n - 1):
            continue
        image = T.d(n) @ spans[n]
        cols = []
        for j in range(image.cols):
            x = solve(spans[n - 1], image.column(j))
            if x is None:
                raise ComplexError(f"span in degree {n} is not a subcomplex")
            cols.append(x)
        diffs[n] = ExactMatrix.from_columns(R, cols, ranks[n - 1])
    return ChainComplex(R, ranks, diffs)


def _express(big: ExactMatrix, small: ExactMatrix) -> ExactMatrix:
    """``X`` with ``big @ X = small`` (columns of ``small`` lie in the span of ``big``)."""
    cols = []
    for j in range(small.cols):
        x = solve(big, small.column(j))
        if x is None:
            raise ComplexError("filtration step is not contained in the previous one")
        cols.append(x)
    return ExactMatrix.from_columns(big.ring, cols, big.cols)


def day_tensor(F: FilteredComplex, G: FilteredComplex) -> FilteredComplex:
    """``(F⊗G)^n = Σ_{i+j=n} image(F^i ⊗ G^j)`` inside ``F^s ⊗ G^s``."""
    if F.ring != G.ring:
        raise ComplexError(f"ring mismatch: {F.ring} vs {G.ring}")
    R = F.ring
    C0, D0 = F.F(F.start), G.F(G.start)
    T = tensor(C0, D0)
    start, stop = F.start + G.start, F.stop + G.stop + 1
    spans: list[dict[int, ExactMatrix]] = []
    for level in range(start, stop + 1):
        gens: dict[int, list[ExactMatrix]] = {n: [] for n in T.ranks}
        for i in range(F.start, F.stop + 1):
            j = level - i
            if j > G.stop:
                continue
            j = max(j, G.start)
            Ci, Dj = F.F(i), G.F(j)
            fi = {n: F.to_total(i, n) for n in C0.ranks}
            gj = {n: G.to_total(j, n) for n in D0.ranks}
            m = _tensor_chain_map(Ci, Dj, C0, D0, _with_zeros(fi, C0, Ci), _with_zeros(gj, D0, Dj))
            for n, M in m.items():
                if M.cols and n in gens:
                    gens[n].append(M)
        span = {}
        for n in T.ranks:
            if gens[n]:
                M = gens[n][0]
                for X in gens[n][1:]:
                    M = M.hstack(X)
                span[n] = image_basis(M) if M.cols else ExactMatrix.zeros(R, T.rank(n), 0)
            else:
                span[n] = ExactMatrix.zeros(R, T.rank(n), 0)
        spans.append(span)
    pieces = [_subcomplex(T, s) for s in spans]
    incs = []
    for k in range(len(spans) - 1):
        incs.append({n: _express(spans[k][n], spans[k + 1][n]) for n in T.ranks if spans[k + 1][n].cols})
    return FilteredComplex(tuple(pieces), tuple(incs), start)


def _with_zeros(maps: Mapping[int, ExactMatrix], tgt: ChainComplex, src: ChainComplex) -> dict[int, ExactMatrix]:
    out = dict(maps)
    for n in src.ranks:
        if n not in out:
            out[n] = ExactMatrix.zeros(tgt.ring, tgt.rank(n), src.rank(n))
    return out


def graded_tensor(X: GradedComplex, Y: GradedComplex) -> GradedComplex:
    """Weightwise tensor ``(X⊗Y)_n = ⊕_{i+j=n} X_i ⊗ Y_j`` (direct sum of pieces)."""
    from .complexes import diagonal_sum

    pieces: dict[int, list[ChainComplex]] = {}
    for i, A in X.pieces.items():
        for j, B in Y.pieces.items():
            pieces.setdefault(i + j, []).append(tensor(A, B))
    out = {}
    for w, cs in pieces.items():
        R = cs[0].ring
        degs = sorted({n for c in cs for n in c.ranks})
        ranks = {n: sum(c.rank(n) for c in cs) for n in degs}
        diffs = {n: diagonal_sum(R, [c.d(n) for c in cs]) for n in degs if ranks.get(n - 1)}
        out[w] = ChainComplex(R, ranks, diffs)
    return GradedComplex(out)


def filtration_from_grading(G: GradedComplex) -> FilteredComplex:
    """Split filtration ``F^i = ⊕_{w >= i} G_w``."""
    T = G.total()
    return FilteredComplex.from_levels(T, T.weights)


# ---------------------------------------------------------------------------
# Filtered algebras
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FilteredAlgebraData:
    """Filtration on a module in degree 0 with a bilinear product.

    ``product[a][b]`` is the vector of ``e_a · e_b`` in the basis of ``F^start``.
    """

    filtration: FilteredComplex
    product: Sequence[Sequence[Sequence]]

    def check_multiplicative(self, degree: int = 0) -> bool:
        """``F^i · F^j ⊆ F^{i+j}`` checked on spanning vectors of each step."""
        F = self.filtration
        span = {i: F.to_total(i, degree) for i in range(F.start, F.stop + 1)}
        for i in range(F.start, F.stop + 1):
            for j in range(F.start, F.stop + 1):
                target = span.get(min(i + j, F.stop + 1))
                for a in span[i].columns():
                    for b in span[j].columns():
                        v = self._mul(a, b)
                        if not any(v):
                            continue
                        if target is None or target.cols == 0:
                            return False
                        if solve(target, v) is None:
                            return False
        return True

    def _mul(self, a, b):
        R = self.filtration.ring
        n = len(a)
        out = [R.zero] * n
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                if not y:
                    continue
                for k, c in enumerate(self.product[i][j]):
                    if c:
                        out[k] = R(out[k] + x * y * c)
        return out


def gr_tensor_check(F: FilteredComplex, G: FilteredComplex) -> bool:
    """``gr(F⊗G)`` and ``gr F ⊗ gr G`` have equal ranks and homology per weight (field base)."""
    from .complexes import homology

    lhs = associated_graded(day_tensor(F, G))
    rhs = graded_tensor(associated_graded(F), associated_graded(G))
    ws = set(lhs.pieces) | set(rhs.pieces)
    empty = ChainComplex(F.ring, {})
    for w in ws:
        a, b = lhs.piece(w) or empty, rhs.piece(w) or empty
        degs = set(a.ranks) | set(b.ranks)
        if any(a.rank(n) != b.rank(n) for n in degs):
            return False
        if degs and homology(a, degs) != homology(b, degs):
            return False
    return True
