"""p-typical Witt vectors of finite length.

The universal addition, multiplication, negation and Frobenius polynomials
are obtained by solving the Ghost equations one coordinate at a time over
the integers; each step ends with an exact division by ``p^n`` which raises
:class:`~hkrlab.exactalg.IntegralityError` if integrality ever failed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product
from typing import Callable, Sequence

from .exactalg import QQ, ExactMatrix, MultiPoly, PrimeField, is_prime, kernel_basis, rank
from .testrings import FiniteField, PolyRing

log = logging.getLogger(__name__)

MAX_P = 7
MAX_M = 5


class WittError(ValueError):
    pass


def witt_variables(m: int) -> tuple[str, ...]:
    return tuple(f"x_{i}" for i in range(m)) + tuple(f"y_{i}" for i in range(m))


def ghost_polynomial(p: int, i: int, xs: Sequence[MultiPoly]) -> MultiPoly:
    """``sum_{j<=i} p^j x_j^{p^(i-j)}``."""
    acc = xs[0] ** (p**i)
    for j in range(1, i + 1):
        acc = acc + xs[j] ** (p ** (i - j)) * (p**j)
    return acc


def ghost_polynomials(p: int, m: int, names: Sequence[str] | None = None) -> list[MultiPoly]:
    names = tuple(names or (f"x_{i}" for i in range(m)))
    xs = MultiPoly.gens(names)
    return [ghost_polynomial(p, i, xs) for i in range(m)]


def _solve_ghost(p: int, targets: Sequence[MultiPoly]) -> list[MultiPoly]:
    """Integral ``W_0..W_{k-1}`` with ``sum_{j<=n} p^j W_j^{p^(n-j)} = targets[n]``."""
    sols: list[MultiPoly] = []
    for n, target in enumerate(targets):
        rest = target
        for j, w in enumerate(sols):
            rest = rest - (w ** (p ** (n - j))) * (p**j)
        sols.append(rest.divide_exactly_by_integer(p**n))
    return sols


class WittLaw:
    """Universal polynomials for ``W^(m)`` at the prime ``p``.

    All families live in ``Z[x_0..x_{m-1}, y_0..y_{m-1}]``.  Products are
    built on first access since they dominate the cost.
    """

    def __init__(self, p: int, m: int):
        if not is_prime(p):
            raise WittError(f"{p} is not prime")
        if m < 1:
            raise WittError("length m must be >= 1")
        if p > MAX_P or m > MAX_M:
            raise WittError(f"truncation out of range: need p <= {MAX_P} and m <= {MAX_M}, got p={p}, m={m}")
        self.p = p
        self.m = m
        self.variables = witt_variables(m)
        gens = MultiPoly.gens(self.variables)
        self._x = gens[:m]
        self._y = gens[m:]
        self.ghost_x = [ghost_polynomial(p, i, self._x) for i in range(m)]
        self.ghost_y = [ghost_polynomial(p, i, self._y) for i in range(m)]

    def __repr__(self):
        return f"WittLaw(p={self.p}, m={self.m})"

    @cached_property
    def sum_polys(self) -> list[MultiPoly]:
        return _solve_ghost(self.p, [a + b for a, b in zip(self.ghost_x, self.ghost_y)])

    @cached_property
    def product_polys(self) -> list[MultiPoly]:
        return _solve_ghost(self.p, [a * b for a, b in zip(self.ghost_x, self.ghost_y)])

    @cached_property
    def negation_polys(self) -> list[MultiPoly]:
        return _solve_ghost(self.p, [-a for a in self.ghost_x])

    @cached_property
    def frobenius_polys(self) -> list[MultiPoly]:
        return _solve_ghost(self.p, self.ghost_x[1:])

    def ghost_of(self, polys: Sequence[MultiPoly]) -> list[MultiPoly]:
        """Ghost components of a vector of polynomials."""
        return [ghost_polynomial(self.p, i, polys) for i in range(len(polys))]

    def check_ghost_identities(self, include_products: bool = True) -> dict[str, bool]:
        """Verify the defining Ghost identities as exact polynomial equalities."""
        out = {
            "sum": self.ghost_of(self.sum_polys) == [a + b for a, b in zip(self.ghost_x, self.ghost_y)],
            "negation": self.ghost_of(self.negation_polys) == [-a for a in self.ghost_x],
            "frobenius": self.ghost_of(self.frobenius_polys) == self.ghost_x[1:],
        }
        if include_products:
            out["product"] = self.ghost_of(self.product_polys) == [a * b for a, b in zip(self.ghost_x, self.ghost_y)]
        return out

    def is_integral(self) -> bool:
        fams = [self.sum_polys, self.product_polys, self.negation_polys, self.frobenius_polys]
        return all(isinstance(c, int) for fam in fams for f in fam for c in f.terms.values())

    def to_json(self, families: Sequence[str] = ("sum", "product", "negation", "frobenius")) -> dict:
        table = {
            "sum": "sum_polys",
            "product": "product_polys",
            "negation": "negation_polys",
            "frobenius": "frobenius_polys",
        }
        return {
            "p": self.p,
            "m": self.m,
            **{name: [f.to_json() for f in getattr(self, table[name])] for name in families},
        }


@lru_cache(maxsize=None)
def build_witt_law(p: int, m: int) -> WittLaw:
    """Cached universal law; accessing a family triggers (and checks) its construction."""
    return WittLaw(p, m)


# ---------------------------------------------------------------------------
# Witt vectors over a carrier
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WittVector:
    p: int
    coords: tuple
    ring: object

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))

    @property
    def m(self) -> int:
        return len(self.coords)

    def truncate(self, n: int) -> WittVector:
        return WittVector(self.p, self.coords[:n], self.ring)

    def to_json(self) -> dict:
        fmt = getattr(self.ring, "format", str)
        return {"p": self.p, "m": self.m, "coords": [fmt(c) for c in self.coords]}

    def __str__(self):
        fmt = getattr(self.ring, "format", str)
        return "(" + ", ".join(fmt(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class GhostVector:
    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))


def witt_vector(p: int, coords: Sequence, ring) -> WittVector:
    """Build a Witt vector, coercing plain integers into the carrier."""
    return WittVector(p, tuple(ring.from_int(c) if isinstance(c, int) else c for c in coords), ring)


def zero_vector(p: int, m: int, ring) -> WittVector:
    return WittVector(p, (ring.zero,) * m, ring)


def one_vector(p: int, m: int, ring) -> WittVector:
    return WittVector(p, (ring.one,) + (ring.zero,) * (m - 1), ring)


def _same(w1: WittVector, w2: WittVector):
    if w1.p != w2.p or w1.m != w2.m:
        raise WittError("Witt vectors of different prime or length")
    if w1.ring != w2.ring:
        raise WittError(f"carrier mismatch: {w1.ring} vs {w2.ring}")


def _eval(polys: Sequence[MultiPoly], values: Sequence, ring) -> tuple:
    return tuple(f.evaluate(values, ring_ops=ring) for f in polys)


def ghost(w: WittVector) -> GhostVector:
    R, p = w.ring, w.p
    comps = []
    for i in range(w.m):
        acc = R.zero
        for j in range(i + 1):
            acc = R.add(acc, R.mul(R.from_int(p**j), R.pow(w.coords[j], p ** (i - j))))
        comps.append(acc)
    return GhostVector(tuple(comps))


def witt_add(w1: WittVector, w2: WittVector) -> WittVector:
    _same(w1, w2)
    law = build_witt_law(w1.p, w1.m)
    return WittVector(w1.p, _eval(law.sum_polys, w1.coords + w2.coords, w1.ring), w1.ring)


def witt_mul(w1: WittVector, w2: WittVector) -> WittVector:
    _same(w1, w2)
    law = build_witt_law(w1.p, w1.m)
    return WittVector(w1.p, _eval(law.product_polys, w1.coords + w2.coords, w1.ring), w1.ring)


def witt_neg(w: WittVector) -> WittVector:
    law = build_witt_law(w.p, w.m)
    return WittVector(w.p, _eval(law.negation_polys, w.coords + (w.ring.zero,) * w.m, w.ring), w.ring)


def witt_sub(w1: WittVector, w2: WittVector) -> WittVector:
    return witt_add(w1, witt_neg(w2))


def frobenius(w: WittVector) -> WittVector:
    """Truncated Frobenius ``W^(m) -> W^(m-1)`` (Ghost shift)."""
    if w.m < 2:
        raise WittError("truncated Frobenius needs length >= 2")
    law = build_witt_law(w.p, w.m)
    return WittVector(w.p, _eval(law.frobenius_polys, w.coords + (w.ring.zero,) * w.m, w.ring), w.ring)


def frobenius_modp(w: WittVector) -> WittVector:
    """Full-length Frobenius over an F_p-algebra: coordinatewise p-th power."""
    R = w.ring
    if not R.is_fp_algebra(w.p):
        raise WittError(f"frobenius_modp needs an F_{w.p}-algebra carrier, got {R}")
    return WittVector(w.p, tuple(R.pow(c, w.p) for c in w.coords), R)


def verschiebung(w: WittVector) -> WittVector:
    """Coordinate shift ``(λ_0, λ_1, ...) -> (0, λ_0, λ_1, ...)`` (same length)."""
    return WittVector(w.p, (w.ring.zero,) + w.coords[:-1], w.ring)


def teichmuller(a, p: int, m: int, ring) -> WittVector:
    return WittVector(p, (a,) + (ring.zero,) * (m - 1), ring)


def gm_action(a, w: WittVector) -> WittVector:
    """``[a] : (λ_i) -> (a^{p^i} λ_i)``."""
    R = w.ring
    return WittVector(w.p, tuple(R.mul(R.pow(a, w.p**i), c) for i, c in enumerate(w.coords)), R)


def gp_map(w: WittVector, a) -> WittVector:
    """``F(w) - [a^{p-1}](w)``.

    Over F_p-algebras the Frobenius keeps the length; otherwise the
    truncated Frobenius is used and the result has length ``m - 1``.
    """
    R = w.ring
    scaled = gm_action(R.pow(a, w.p - 1), w)
    if R.is_fp_algebra(w.p):
        return witt_sub(frobenius_modp(w), scaled)
    return witt_sub(frobenius(w), scaled.truncate(w.m - 1))


def witt_equal(w1: WittVector, w2: WittVector) -> bool:
    return w1.p == w2.p and w1.coords == w2.coords


def is_zero_vector(w: WittVector) -> bool:
    R = w.ring
    return all(c == R.zero for c in w.coords)


# ---------------------------------------------------------------------------
# Enumeration over finite carriers
# ---------------------------------------------------------------------------

MAP_KINDS = ("frobenius_minus_id", "frobenius", "gp_at")


def _map_for(kind: str, p: int, ring, a=None) -> Callable[[WittVector], WittVector]:
    fp = ring.is_fp_algebra(p)
    if kind == "frobenius_minus_id":
        if fp:
            return lambda w: witt_sub(frobenius_modp(w), w)
        return lambda w: witt_sub(frobenius(w), w.truncate(w.m - 1))
    if kind == "frobenius":
        return frobenius_modp if fp else frobenius
    if kind == "gp_at":
        if a is None:
            raise WittError("gp_at needs the parameter a")
        return lambda w: gp_map(w, a)
    raise WittError(f"unknown map kind {kind!r}; expected one of {MAP_KINDS}")


def all_vectors(p: int, m: int, ring):
    if not getattr(ring, "is_finite", False):
        raise WittError("enumeration requires finite ring")
    elems = list(ring.elements())
    for coords in product(elems, repeat=m):
        yield WittVector(p, coords, ring)


def enumerate_kernel(kind: str, ring, p: int, m: int, a=None) -> list[WittVector]:
    """All ``w`` in ``W^(m)(ring)`` killed by the chosen map; checked to form a subgroup."""
    if not getattr(ring, "is_finite", False):
        raise WittError("enumeration requires finite ring")
    f = _map_for(kind, p, ring, a)
    kernel = [w for w in all_vectors(p, m, ring) if is_zero_vector(f(w))]
    check_subgroup(kernel)
    return kernel


def check_subgroup(elements: Sequence[WittVector]):
    if not elements:
        raise WittError("kernel is empty (zero vector missing)")
    keys = {w.coords for w in elements}
    w0 = elements[0]
    if zero_vector(w0.p, w0.m, w0.ring).coords not in keys:
        raise WittError("kernel does not contain 0")
    for u in elements:
        if witt_neg(u).coords not in keys:
            raise WittError(f"kernel not closed under negation at {u}")
        for v in elements:
            if witt_add(u, v).coords not in keys:
                raise WittError(f"kernel not closed under addition at {u} + {v}")


def additive_order(w: WittVector, bound: int = 10_000) -> int:
    acc = w
    for n in range(1, bound + 1):
        if is_zero_vector(acc):
            return n
        acc = witt_add(acc, w)
    raise WittError("order exceeds bound")


def is_cyclic_group(elements: Sequence[WittVector]) -> bool:
    return any(additive_order(w) == len(elements) for w in elements)


# ---------------------------------------------------------------------------
# Characteristic zero
# ---------------------------------------------------------------------------


def ghost_inverse(p: int, omegas: Sequence[MultiPoly]) -> list[MultiPoly]:
    """Witt coordinates with the given Ghost components (over Q)."""
    lam: list[MultiPoly] = []
    for i, om in enumerate(omegas):
        rest = om
        for j, l in enumerate(lam):
            rest = rest - (l ** (p ** (i - j))) * (p**j)
        lam.append(rest * Fraction(1, p**i))
    return lam


def char_zero_fixed_points_check(p: int, m: int) -> dict:
    """Fixed points and kernel of the truncated Frobenius over Q.

    In Ghost coordinates ``F`` is the shift ``W^(m) -> W^(m-1)``; the fixed
    locus ``F(w) = w|_{m-1}`` and the kernel are computed as kernels of the
    corresponding rational matrices.  The resulting Ghost solutions are
    pulled back to Witt coordinates over ``Q[c]`` and fed through the
    universal Frobenius polynomials as an independent confirmation.
    """
    if m < 1:
        raise WittError("need m >= 1")
    if m == 1:
        # F lands in W^(0) = 0: every point is fixed and every point is killed
        return {
            "p": p, "m": 1,
            "fixed_points_ghost_basis": [["1"]], "kernel_ghost_basis": [["1"]],
            "fixed_points_are_diagonal": True, "kernel_is_first_ghost_coordinate": True,
            "witt_coordinates_confirm": True, "diagonal_witt_coords": ["c"],
            "degenerate": True, "pass": True,
        }
    shift = ExactMatrix.from_rows(QQ, [[1 if j == i + 1 else 0 for j in range(m)] for i in range(m - 1)], m)
    restrict = ExactMatrix.from_rows(QQ, [[1 if j == i else 0 for j in range(m)] for i in range(m - 1)], m)
    fixed = kernel_basis(shift - restrict)
    ker = kernel_basis(shift)
    diag = len(fixed) == 1 and len(set(fixed[0])) == 1 and fixed[0][0] != 0
    first = len(ker) == 1 and ker[0][0] != 0 and all(x == 0 for x in ker[0][1:])

    C = PolyRing(("c",), QQ)
    c = C.gen("c")
    w_diag = WittVector(p, tuple(ghost_inverse(p, [c] * m)), C)
    w_ker = WittVector(p, tuple(ghost_inverse(p, [c] + [C.zero] * (m - 1))), C)
    diag_witt = frobenius(w_diag).coords == w_diag.truncate(m - 1).coords and ghost(w_diag).components == (c,) * m
    ker_witt = all(x.is_zero() for x in frobenius(w_ker).coords)
    return {
        "p": p,
        "m": m,
        "fixed_points_ghost_basis": [[str(x) for x in v] for v in fixed],
        "kernel_ghost_basis": [[str(x) for x in v] for v in ker],
        "fixed_points_are_diagonal": diag,
        "kernel_is_first_ghost_coordinate": first,
        "witt_coordinates_confirm": bool(diag_witt and ker_witt),
        "diagonal_witt_coords": [str(x) for x in w_diag.coords],
        "degenerate": False,
        "pass": bool(diag and first and diag_witt and ker_witt),
    }


def field_point_surjectivity_check(p: int, m: int) -> dict:
    """Surjectivity data for ``F`` and ``F - id`` at rational and finite-field points.

    Over Q both maps ``W^(m+1) -> W^(m)`` are linear in Ghost coordinates, so
    surjectivity is a rank computation.  Over ``F_{p^k}`` (k <= 3) the report
    gives image sizes of ``x -> x^p`` and ``x -> x^p - x`` and, where the
    enumeration is small, of ``F - id`` on ``W^(m)``.  Only Fermat bijectivity
    and the trace-kernel count ``p^(k-1)`` are asserted; finite fields are not
    closed, so ``x^p - x`` is not expected to be onto.
    """
    if not is_prime(p) or p > MAX_P:
        raise WittError(f"p must be a prime <= {MAX_P}")
    if not 1 <= m <= 3:
        raise WittError("field-point check supports 1 <= m <= 3")
    shift = ExactMatrix.from_rows(QQ, [[1 if j == i + 1 else 0 for j in range(m + 1)] for i in range(m)], m + 1)
    restrict = ExactMatrix.from_rows(QQ, [[1 if j == i else 0 for j in range(m + 1)] for i in range(m)], m + 1)
    rational = {
        "frobenius_rank": rank(shift),
        "frobenius_minus_id_rank": rank(shift - restrict),
        "target_dim": m,
    }
    rational["surjective"] = rational["frobenius_rank"] == m == rational["frobenius_minus_id_rank"]

    fields = []
    ok = rational["surjective"]
    for k in (1, 2, 3):
        F = PrimeField(p) if k == 1 else FiniteField(p, k)
        elems = list(F.elements())
        frob_img = {F.pow(x, p) for x in elems}
        as_img = {F.sub(F.pow(x, p), x) for x in elems}
        row = {
            "field": f"F_{p ** k}",
            "size": len(elems),
            "frobenius_image": len(frob_img),
            "artin_schreier_image": len(as_img),
            "artin_schreier_expected": p ** (k - 1),
        }
        ok = ok and len(frob_img) == len(elems) and len(as_img) == p ** (k - 1)
        if len(elems) ** m <= 4096:
            f = _map_for("frobenius_minus_id", p, F)
            img = {f(w).coords for w in all_vectors(p, m, F)}
            row["witt_image"] = len(img)
            row["witt_size"] = len(elems) ** m
            # image of a homomorphism = |group| / |kernel|, kernel has p^m points
            ok = ok and len(img) * p**m == len(elems) ** m
        fields.append(row)
    return {"p": p, "m": m, "rational": rational, "finite_fields": fields, "pass": ok}
