"""Finitely presented, positively graded commutative algebras.

Monomials are exponent tuples.  The term order compares weighted degree
first and breaks ties lexicographically with the *last* generator most
significant, so in ``Q[x(2),y(3)]/(y^2 - x^3)`` the leading term is ``y^2``.
"""

from __future__ import annotations

import ast
import re
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from .exactalg import QQ, BaseRing, ExactMatrix, MultiPoly, parse_ring, rank

Mono = tuple[int, ...]


class AlgebraError(ValueError):
    pass


def _divides(a: Mono, b: Mono) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Mono, b: Mono) -> Mono:
    return tuple(max(x, y) for x, y in zip(a, b))


def _sub(a: Mono, b: Mono) -> Mono:
    return tuple(x - y for x, y in zip(a, b))


def _add(a: Mono, b: Mono) -> Mono:
    return tuple(x + y for x, y in zip(a, b))


class FPGradedAlgebra:
    """``k[x_1..x_n] / I`` with positive generator weights.

    Over a field the relations are completed to a reduced Gröbner basis
    (Buchberger).  Over Z or Z_(p) only monomial relations with unit
    coefficient are accepted, which keeps every graded piece free.
    """

    def __init__(self, ring: BaseRing, generators: Sequence[str], weights: Sequence[int] | None = None, relations: Sequence[MultiPoly | str] = ()):
        self.ring = ring
        self.generators = tuple(generators)
        self.weights = tuple(weights or (1,) * len(self.generators))
        if len(self.weights) != len(self.generators):
            raise AlgebraError("one weight per generator")
        if any(w <= 0 for w in self.weights):
            raise AlgebraError("generator weights must be positive")
        rels = []
        for r in relations:
            if isinstance(r, str):
                r = parse_polynomial(r, self.generators, ring)
            if r.variables != self.generators:
                r = r.embed(self.generators)
            if r.ring != ring:
                r = r.change_ring(ring)
            if not r.is_zero():
                rels.append(r)
        self.relations = tuple(rels)
        if ring.is_field:
            self._gb = _reduced_groebner([dict(r.terms) for r in rels], ring, self._key)
        elif ring.is_integral:
            gb = []
            for r in rels:
                terms = dict(r.terms)
                if len(terms) != 1 or not ring.is_unit(next(iter(terms.values()))):
                    raise AlgebraError("monomial ideals only over non-field base")
                gb.append({next(iter(terms)): ring.one})
            self._gb = _minimalize_monomials(gb)
        else:
            raise AlgebraError(f"algebras over {ring} are not supported")
        self._leads = [max(g, key=self._key) for g in self._gb]

    # -- presentation --------------------------------------------------------
    @property
    def nvars(self) -> int:
        return len(self.generators)

    @property
    def is_smooth(self) -> bool:
        return not self.relations

    @property
    def groebner_basis(self) -> list[MultiPoly]:
        return [MultiPoly(self.generators, g, self.ring) for g in self._gb]

    def _key(self, e: Mono):
        return (self.weight(e), tuple(reversed(e)))

    def weight(self, e: Mono) -> int:
        return sum(w * a for w, a in zip(self.weights, e))

    def is_homogeneous(self) -> bool:
        return all(len({self.weight(e) for e in g}) <= 1 for g in self._gb)

    def __str__(self):
        gens = ",".join(f"{g}({w})" if w != 1 else g for g, w in zip(self.generators, self.weights))
        s = f"{self.ring}[{gens}]"
        if self.relations:
            s += "/(" + ",".join(str(r) for r in self.relations) + ")"
        return s

    def to_json(self) -> dict:
        return {
            "ring": str(self.ring),
            "generators": list(self.generators),
            "weights": list(self.weights),
            "relations": [str(r) for r in self.relations],
        }

    # -- normal forms ----------------------------------------------------------
    def is_standard(self, e: Mono) -> bool:
        return not any(_divides(l, e) for l in self._leads)

    def reduce(self, terms: Mapping[Mono, object]) -> dict[Mono, object]:
        """Normal form of a polynomial given as ``{exponents: coefficient}``."""
        R = self.ring
        work = {e: R(c) for e, c in terms.items() if R(c) != 0}
        out: dict[Mono, object] = {}
        while work:
            e = max(work, key=self._key)
            c = work.pop(e)
            for g, lead in zip(self._gb, self._leads):
                if _divides(lead, e):
                    shift = _sub(e, lead)
                    f = R.div(c, g[lead]) if R.is_field else R(c * g[lead])
                    for ge, gc in g.items():
                        if ge == lead:
                            continue
                        k = _add(ge, shift)
                        v = R(work.get(k, 0) - f * gc)
                        if v:
                            work[k] = v
                        else:
                            work.pop(k, None)
                    break
            else:
                out[e] = c
        return out

    def normal_form(self, f: MultiPoly | str) -> MultiPoly:
        if isinstance(f, str):
            f = parse_polynomial(f, self.generators, self.ring)
        if f.variables != self.generators:
            f = f.embed(self.generators)
        return MultiPoly(self.generators, self.reduce(f.terms), self.ring)

    # -- graded pieces -----------------------------------------------------------
    def basis(self, d: int) -> list[Mono]:
        """Standard monomials of weight ``d`` (sorted)."""
        return _basis_cached(self, d)

    def dim(self, d: int) -> int:
        return len(self.basis(d))

    def multiply(self, a: Mono, b: Mono) -> dict[Mono, object]:
        return _mul_cached(self, a, b)

    def one(self) -> Mono:
        return (0,) * self.nvars

    def generator_monomial(self, i: int) -> Mono:
        e = [0] * self.nvars
        e[i] = 1
        return tuple(e)

    def __hash__(self):
        return id(self)


@lru_cache(maxsize=None)
def _all_monomials(weights: tuple[int, ...], d: int) -> tuple[Mono, ...]:
    if not weights:
        return ((),) if d == 0 else ()
    out = []
    w0 = weights[0]
    for a in range(d // w0 + 1):
        for rest in _all_monomials(weights[1:], d - a * w0):
            out.append((a,) + rest)
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def _basis_cached(A: FPGradedAlgebra, d: int) -> list[Mono]:
    if d < 0:
        return []
    if not A.is_homogeneous():
        raise AlgebraError("graded pieces need weighted-homogeneous relations")
    return [e for e in _all_monomials(A.weights, d) if A.is_standard(e)]


@lru_cache(maxsize=None)
def _mul_cached(A: FPGradedAlgebra, a: Mono, b: Mono) -> dict[Mono, object]:
    e = _add(a, b)
    if A.is_standard(e):
        return {e: A.ring.one}
    return A.reduce({e: A.ring.one})


# ---------------------------------------------------------------------------
# Buchberger
# ---------------------------------------------------------------------------


def _normalize(g: dict, R: BaseRing, key) -> dict:
    lead = max(g, key=key)
    inv = R.inv(g[lead])
    return {e: R(c * inv) for e, c in g.items()}


def _reduce_by(f: dict, G: list[dict], R: BaseRing, key) -> dict:
    leads = [max(g, key=key) for g in G]
    work = dict(f)
    out = {}
    while work:
        e = max(work, key=key)
        c = work.pop(e)
        for g, lead in zip(G, leads):
            if _divides(lead, e):
                shift = _sub(e, lead)
                fct = R.div(c, g[lead])
                for ge, gc in g.items():
                    if ge == lead:
                        continue
                    k = _add(ge, shift)
                    v = R(work.get(k, 0) - fct * gc)
                    if v:
                        work[k] = v
                    else:
                        work.pop(k, None)
                break
        else:
            out[e] = c
    return out


def _s_poly(f: dict, g: dict, R: BaseRing, key) -> dict:
    lf, lg = max(f, key=key), max(g, key=key)
    L = _lcm(lf, lg)
    sf, sg = _sub(L, lf), _sub(L, lg)
    out: dict = {}
    cf, cg = R.inv(f[lf]), R.inv(g[lg])
    for e, c in f.items():
        k = _add(e, sf)
        out[k] = R(out.get(k, 0) + c * cf)
    for e, c in g.items():
        k = _add(e, sg)
        out[k] = R(out.get(k, 0) - c * cg)
    return {e: c for e, c in out.items() if c}


def _reduced_groebner(polys: list[dict], R: BaseRing, key) -> list[dict]:
    G = [_normalize(p, R, key) for p in polys if p]
    pairs = [(i, j) for i in range(len(G)) for j in range(i)]
    while pairs:
        i, j = pairs.pop()
        li, lj = max(G[i], key=key), max(G[j], key=key)
        if all(a == 0 or b == 0 for a, b in zip(li, lj)):
            continue  # coprime leading terms
        h = _reduce_by(_s_poly(G[i], G[j], R, key), G, R, key)
        if h:
            G.append(_normalize(h, R, key))
            n = len(G) - 1
            pairs.extend((n, k) for k in range(n))
    # minimal
    leads = [max(g, key=key) for g in G]
    keep = []
    for i, g in enumerate(G):
        if any(_divides(leads[j], leads[i]) and (leads[j] != leads[i] or j < i) for j in range(len(G)) if j != i):
            continue
        keep.append(g)
    # reduced
    out = []
    for i, g in enumerate(keep):
        others = keep[:i] + keep[i + 1:]
        lead = max(g, key=key)
        tail = {e: c for e, c in g.items() if e != lead}
        red = _reduce_by(tail, others, R, key) if others else tail
        red[lead] = g[lead]
        out.append(_normalize(red, R, key))
    out.sort(key=lambda g: key(max(g, key=key)))
    return out


def _minimalize_monomials(gb: list[dict]) -> list[dict]:
    leads = [next(iter(g)) for g in gb]
    keep = []
    for i, l in enumerate(leads):
        if any(_divides(leads[j], l) and (leads[j] != l or j < i) for j in range(len(leads)) if j != i):
            continue
        keep.append(gb[i])
    return keep


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def parse_polynomial(text: str, variables: Sequence[str], ring: BaseRing = QQ) -> MultiPoly:
    """Parse ``y^2 - x^3 + 2*x*y`` style input (``^`` or ``**`` for powers)."""
    variables = tuple(variables)
    tree = ast.parse(text.replace("^", "**"), mode="eval")

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.BinOp):
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Pow):
                if not isinstance(b, int) and not (isinstance(b, MultiPoly) and b.total_degree() <= 0):
                    raise AlgebraError("exponent must be a nonnegative integer")
                e = b if isinstance(b, int) else int(b.coefficient((0,) * len(variables)))
                if isinstance(a, int):
                    return a**e
                return a**e
            if isinstance(node.op, ast.Div):
                if isinstance(b, int):
                    return a * Fraction(1, b) if ring.kind == "Rationals" else a * ring.inv(b)
            raise AlgebraError(f"unsupported operator in {text!r}")
        if isinstance(node, ast.UnaryOp):
            v = ev(node.operand)
            if isinstance(node.op, ast.USub):
                return -v
            if isinstance(node.op, ast.UAdd):
                return v
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return node.value
        if isinstance(node, ast.Name):
            if node.id not in variables:
                raise AlgebraError(f"unknown variable {node.id!r}")
            return MultiPoly.gen(variables, node.id, ring)
        raise AlgebraError(f"cannot parse {text!r}")

    v = ev(tree)
    if isinstance(v, MultiPoly):
        return v
    return MultiPoly.constant(variables, v, ring)


_ALG_RE = re.compile(r"^\s*(?P<base>[^\[/\s]+)\s*(?:\[(?P<gens>[^\]]*)\])?\s*(?:/\s*\((?P<rels>.*)\)\s*)?$")


def parse_algebra(text: str) -> FPGradedAlgebra:
    """Parse ``BASE[x(w1),y(w2)]/(rel1,rel2)``; weights default to 1, a bare ``BASE`` has no generators."""
    m = _ALG_RE.match(text)
    if not m:
        raise AlgebraError(f"cannot parse algebra {text!r}; expected BASE[x(w),...]/(rel,...)")
    ring = parse_ring(m.group("base"))
    gens, weights = [], []
    body = (m.group("gens") or "").strip()
    if body:
        for part in body.split(","):
            part = part.strip()
            g = re.match(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\((\d+)\))?$", part)
            if not g:
                raise AlgebraError(f"bad generator {part!r}")
            gens.append(g.group(1))
            weights.append(int(g.group(2) or 1))
    rels = []
    if m.group("rels"):
        rels = [r for r in (s.strip() for s in m.group("rels").split(",")) if r]
    return FPGradedAlgebra(ring, gens, weights, rels)


# ---------------------------------------------------------------------------
# Kähler differentials
# ---------------------------------------------------------------------------


class KahlerModule:
    """``Ω¹_{A/k}``: free on ``dx_i`` modulo ``A·d(relations)``, graded by weight."""

    def __init__(self, A: FPGradedAlgebra):
        self.algebra = A

    def free_basis(self, d: int) -> list[tuple[Mono, int]]:
        """Pairs ``(monomial, i)`` meaning ``monomial · dx_i`` of total weight ``d``."""
        A = self.algebra
        out = []
        for i, w in enumerate(A.weights):
            out.extend((m, i) for m in A.basis(d - w))
        return out

    def relation_matrix(self, d: int) -> ExactMatrix:
        """Columns: ``a · d(g)`` for ``g`` in the Gröbner basis, ``a`` a standard monomial."""
        A = self.algebra
        R = A.ring
        basis = self.free_basis(d)
        index = {b: k for k, b in enumerate(basis)}
        cols = []
        for g in A.groebner_basis:
            wg = next(iter(g.weighted_degrees(A.weights)))
            for a in A.basis(d - wg):
                col = [R.zero] * len(basis)
                for e, c in g.terms.items():
                    for i, ei in enumerate(e):
                        if ei == 0:
                            continue
                        de = list(e)
                        de[i] -= 1
                        prod = A.reduce({_add(tuple(de), a): R(c * ei)})
                        for mono, coef in prod.items():
                            k = index[(mono, i)]
                            col[k] = R(col[k] + coef)
                cols.append(col)
        return ExactMatrix.from_columns(R, cols, len(basis))

    def rank(self, d: int) -> int:
        """Dimension of ``Ω¹`` in weight ``d`` (field base)."""
        if not self.algebra.ring.is_field:
            if self.algebra.is_smooth:
                return len(self.free_basis(d))
            raise AlgebraError("field required for non-free Kähler modules")
        M = self.relation_matrix(d)
        return M.rows - (rank(M) if M.cols else 0)
