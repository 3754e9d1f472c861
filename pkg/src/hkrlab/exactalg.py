"""Exact base rings, dense exact matrices, Smith normal form and sparse polynomials.

Nothing in here touches floating point.  Ring elements are plain Python
``int`` (integers, residues, p-local integers) or ``fractions.Fraction``
(rationals); the owning :class:`BaseRing` knows how to normalise them.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from types import MappingProxyType
from typing import Iterator, Mapping, Sequence

log = logging.getLogger(__name__)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def p_adic_valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def prime_power_factors(n: int) -> list[tuple[int, int]]:
    """Factor ``n > 1`` as ``[(q, e), ...]`` with ``q`` prime."""
    n = abs(n)
    out = []
    q = 2
    while q * q <= n:
        if n % q == 0:
            e = 0
            while n % q == 0:
                n //= q
                e += 1
            out.append((q, e))
        q += 1
    if n > 1:
        out.append((n, 1))
    return out


# ---------------------------------------------------------------------------
# Base rings
# ---------------------------------------------------------------------------

_KINDS = ("Integers", "Rationals", "PrimeField", "CyclicRing", "PLocalIntegers")


@dataclass(frozen=True)
class BaseRing:
    """One of Z, Q, F_p, Z/p^k or Z_(p).

    Use the module level constructors (:data:`ZZ`, :data:`QQ`,
    :func:`PrimeField`, :func:`CyclicRing`, :func:`PLocalIntegers`).
    """

    kind: str
    p: int | None = None
    k: int | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown ring kind {self.kind!r}")
        if self.kind in ("PrimeField", "CyclicRing", "PLocalIntegers"):
            if self.p is None or not is_prime(self.p):
                raise ValueError(f"{self.kind} needs a prime p, got {self.p!r}")
        if self.kind == "CyclicRing" and (self.k is None or self.k < 1):
            raise ValueError("CyclicRing needs k >= 1")

    # -- classification ----------------------------------------------------
    @property
    def is_field(self) -> bool:
        return self.kind in ("Rationals", "PrimeField")

    @property
    def is_integral(self) -> bool:
        """Integers or p-local integers (computed integrally)."""
        return self.kind in ("Integers", "PLocalIntegers")

    @property
    def modulus(self) -> int | None:
        if self.kind == "PrimeField":
            return self.p
        if self.kind == "CyclicRing":
            return self.p**self.k
        return None

    @property
    def characteristic(self) -> int:
        return self.modulus or 0

    @property
    def is_finite(self) -> bool:
        return self.modulus is not None

    def is_fp_algebra(self, p: int) -> bool:
        return self.characteristic == p

    def __str__(self) -> str:
        if self.kind == "Integers":
            return "Z"
        if self.kind == "Rationals":
            return "Q"
        if self.kind == "PrimeField":
            return f"F_{self.p}"
        if self.kind == "CyclicRing":
            return f"Z/{self.p}^{self.k}"
        return f"Z_({self.p})"

    # -- arithmetic --------------------------------------------------------
    def __call__(self, x) -> int | Fraction:
        """Coerce an int or Fraction into the ring."""
        if self.kind == "Rationals":
            return Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator == 1:
                x = x.numerator
            elif self.modulus is not None:
                return x.numerator * pow(x.denominator, -1, self.modulus) % self.modulus
            else:
                raise ValueError(f"{x} is not an element of {self}")
        x = int(x)
        m = self.modulus
        return x % m if m else x

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def add(self, a, b):
        return self(a + b)

    def sub(self, a, b):
        return self(a - b)

    def neg(self, a):
        return self(-a)

    def mul(self, a, b):
        return self(a * b)

    def pow(self, a, e: int):
        m = self.modulus
        if m:
            return pow(a, e, m)
        return a**e

    def from_int(self, n: int):
        return self(n)

    def from_fraction(self, q: Fraction):
        return self(q)

    def is_zero(self, a) -> bool:
        return a == 0

    def is_unit(self, a) -> bool:
        if self.kind == "Rationals":
            return a != 0
        if self.kind == "Integers":
            return a in (1, -1)
        if self.kind == "PLocalIntegers":
            return a % self.p != 0
        return a % self.p != 0

    def inv(self, a):
        if self.kind == "Rationals":
            if a == 0:
                raise ZeroDivisionError("inverse of 0")
            return 1 / Fraction(a)
        m = self.modulus
        if m:
            return pow(a, -1, m)
        if a in (1, -1):
            return a
        raise ZeroDivisionError(f"{a} is not invertible in {self}")

    def div(self, a, b):
        """Exact division.  Over Z_(p) the divisor must be prime to p and divide exactly."""
        if self.kind == "PLocalIntegers":
            if b % self.p == 0:
                raise ZeroDivisionError(f"{b} is not a unit in {self}")
            if a % b:
                raise ArithmeticError(f"{a}/{b} is not integral (p-local ring computed integrally)")
            return a // b
        if self.kind == "Integers":
            if b == 0 or a % b:
                raise ArithmeticError(f"{a}/{b} is not an integer")
            return a // b
        return self.mul(a, self.inv(b))

    def elements(self) -> Iterator:
        m = self.modulus
        if m is None:
            raise ValueError("enumeration requires finite ring")
        return iter(range(m))

    def size(self) -> int:
        m = self.modulus
        if m is None:
            raise ValueError("enumeration requires finite ring")
        return m

    def format(self, a) -> str:
        return str(a)


ZZ = BaseRing("Integers")
QQ = BaseRing("Rationals")


def PrimeField(p: int) -> BaseRing:
    return BaseRing("PrimeField", p)


def CyclicRing(p: int, k: int) -> BaseRing:
    return BaseRing("CyclicRing", p, k)


def PLocalIntegers(p: int) -> BaseRing:
    return BaseRing("PLocalIntegers", p)


def parse_ring(text: str) -> BaseRing:
    """Parse ``Z``, ``Q``, ``F_p``/``Fp``/``GF(p)``, ``Z/p^k``/``Z/n`` or ``Z_(p)``."""
    t = text.strip().replace(" ", "")
    if t in ("Z", "ZZ"):
        return ZZ
    if t in ("Q", "QQ"):
        return QQ
    for prefix in ("F_", "GF(", "F"):
        if t.startswith(prefix):
            num = t[len(prefix):].rstrip(")")
            if num.isdigit():
                return PrimeField(int(num))
    if t.startswith("Z_(") and t.endswith(")"):
        return PLocalIntegers(int(t[3:-1]))
    if t.startswith("Z/"):
        rest = t[2:]
        if "^" in rest:
            p, k = rest.split("^")
            return CyclicRing(int(p), int(k))
        n = int(rest)
        fac = prime_power_factors(n)
        if len(fac) != 1:
            raise ValueError(f"Z/{n}: only prime-power moduli are supported")
        q, e = fac[0]
        return PrimeField(q) if e == 1 else CyclicRing(q, e)
    raise ValueError(f"cannot parse base ring {text!r}")


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ExactMatrix:
    """Dense immutable matrix over a :class:`BaseRing`.

    Columns are the images of basis vectors (maps act on column vectors).
    """

    rows: int
    cols: int
    entries: tuple[tuple, ...]
    ring: BaseRing

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError("entry shape does not match rows x cols")

    @classmethod
    def from_rows(cls, ring: BaseRing, rows: Sequence[Sequence], ncols: int | None = None) -> ExactMatrix:
        rows = [tuple(ring(x) for x in r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        return cls(len(rows), ncols, tuple(rows), ring)

    @classmethod
    def zeros(cls, ring: BaseRing, rows: int, cols: int) -> ExactMatrix:
        z = ring.zero
        return cls(rows, cols, tuple((z,) * cols for _ in range(rows)), ring)

    @classmethod
    def identity(cls, ring: BaseRing, n: int) -> ExactMatrix:
        return cls.from_rows(ring, [[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, ring: BaseRing, columns: Sequence[Sequence], nrows: int) -> ExactMatrix:
        return cls.from_rows(ring, [[c[i] for c in columns] for i in range(nrows)], len(columns))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash((self.shape, self.entries))

    def __repr__(self) -> str:
        return f"ExactMatrix({self.rows}x{self.cols} over {self.ring}, {[list(r) for r in self.entries]})"

    def to_lists(self) -> list[list]:
        return [list(r) for r in self.entries]

    def column(self, j: int) -> list:
        return [r[j] for r in self.entries]

    def columns(self) -> list[list]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> ExactMatrix:
        return ExactMatrix(self.cols, self.rows, tuple(zip(*self.entries)) if self.rows else tuple(() for _ in range(self.cols)), self.ring)

    @property
    def T(self) -> ExactMatrix:
        return self.transpose()

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.entries for x in r)

    def __matmul__(self, other: ExactMatrix) -> ExactMatrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        R = self.ring
        ot = other.entries
        out = []
        for row in self.entries:
            acc = [0] * other.cols
            for k, a in enumerate(row):
                if a:
                    orow = ot[k]
                    for j, b in enumerate(orow):
                        if b:
                            acc[j] += a * b
            out.append(tuple(R(x) for x in acc))
        return ExactMatrix(self.rows, other.cols, tuple(out), R)

    def __add__(self, other: ExactMatrix) -> ExactMatrix:
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        R = self.ring
        return ExactMatrix(self.rows, self.cols, tuple(tuple(R(a + b) for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)), R)

    def __neg__(self) -> ExactMatrix:
        R = self.ring
        return ExactMatrix(self.rows, self.cols, tuple(tuple(R(-a) for a in r) for r in self.entries), R)

    def __sub__(self, other: ExactMatrix) -> ExactMatrix:
        return self + (-other)

    def scale(self, c) -> ExactMatrix:
        R = self.ring
        return ExactMatrix(self.rows, self.cols, tuple(tuple(R(c * a) for a in r) for r in self.entries), R)

    def apply(self, v: Sequence) -> list:
        R = self.ring
        return [R(sum(a * b for a, b in zip(r, v) if a and b)) for r in self.entries]

    def hstack(self, other: ExactMatrix) -> ExactMatrix:
        if self.rows != other.rows:
            raise ValueError("row mismatch")
        return ExactMatrix(self.rows, self.cols + other.cols, tuple(r + s for r, s in zip(self.entries, other.entries)), self.ring)

    def vstack(self, other: ExactMatrix) -> ExactMatrix:
        if self.cols != other.cols:
            raise ValueError("column mismatch")
        return ExactMatrix(self.rows + other.rows, self.cols, self.entries + other.entries, self.ring)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> ExactMatrix:
        return ExactMatrix(len(rows), len(cols), tuple(tuple(self.entries[i][j] for j in cols) for i in rows), self.ring)

    def change_ring(self, ring: BaseRing) -> ExactMatrix:
        return ExactMatrix.from_rows(ring, self.entries, self.cols)


def block_matrix(ring: BaseRing, blocks: Sequence[Sequence[ExactMatrix | None]], row_sizes: Sequence[int], col_sizes: Sequence[int]) -> ExactMatrix:
    """Assemble a matrix from blocks; ``None`` means a zero block."""
    rows = []
    z = ring.zero
    for bi, rs in enumerate(row_sizes):
        for i in range(rs):
            row = []
            for bj, cs in enumerate(col_sizes):
                blk = blocks[bi][bj]
                if blk is None:
                    row.extend([z] * cs)
                else:
                    if blk.shape != (rs, cs):
                        raise ValueError(f"block ({bi},{bj}) has shape {blk.shape}, expected {(rs, cs)}")
                    row.extend(blk.entries[i])
            rows.append(tuple(row))
    return ExactMatrix(sum(row_sizes), sum(col_sizes), tuple(rows), ring)


def diagonal_sum(ring: BaseRing, mats: Sequence[ExactMatrix]) -> ExactMatrix:
    n = len(mats)
    blocks = [[mats[i] if i == j else None for j in range(n)] for i in range(n)]
    return block_matrix(ring, blocks, [m.rows for m in mats], [m.cols for m in mats])


# ---------------------------------------------------------------------------
# Elimination
# ---------------------------------------------------------------------------


def _field_rref(rows: list[list], R: BaseRing) -> tuple[list[list], list[int]]:
    """Reduced row echelon form over a field; returns (rows, pivot columns)."""
    A = [list(r) for r in rows]
    if not A:
        return A, []
    ncols = len(A[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = R.inv(A[r][c])
        A[r] = [R(x * inv) for x in A[r]]
        prow = A[r]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [R(x - f * y) for x, y in zip(A[i], prow)]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A, pivots


def _integer_rank(rows: list[list]) -> int:
    """Rank over Q of an integer matrix by fraction-free elimination."""
    A = [list(r) for r in rows if any(r)]
    if not A:
        return 0
    ncols = len(A[0])
    rank = 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(A)) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        prow = A[rank]
        pc = prow[c]
        for i in range(rank + 1, len(A)):
            f = A[i][c]
            if f:
                g = gcd(pc, f)
                a, b = pc // g, f // g
                new = [a * x - b * y for x, y in zip(A[i], prow)]
                cont = 0
                for x in new:
                    if x:
                        cont = gcd(cont, x)
                        if cont == 1:
                            break
                if cont > 1:
                    new = [x // cont for x in new]
                A[i] = new
        rank += 1
        if rank == len(A):
            break
    return rank


def rank(M: ExactMatrix) -> int:
    """Rank (over the fraction field for Z and Z_(p))."""
    if M.rows == 0 or M.cols == 0:
        return 0
    R = M.ring
    if R.is_field:
        return len(_field_rref(M.to_lists(), R)[1])
    if R.is_integral:
        return _integer_rank(M.to_lists())
    raise ValueError(f"rank over {R} is not defined here (not a domain)")


def kernel_basis(M: ExactMatrix) -> list[list]:
    """Basis of the right kernel ``{v : M v = 0}``."""
    R = M.ring
    if not R.is_field:
        raise ValueError("field required")
    n = M.cols
    if M.rows == 0:
        return [[R(1 if i == j else 0) for i in range(n)] for j in range(n)]
    A, pivots = _field_rref(M.to_lists(), R)
    pivset = set(pivots)
    basis = []
    for free in range(n):
        if free in pivset:
            continue
        v = [R.zero] * n
        v[free] = R.one
        for row, pc in zip(A, pivots):
            v[pc] = R(-row[free])
        basis.append(v)
    return basis


def column_space_basis(M: ExactMatrix) -> list[list]:
    """Independent columns of M spanning its column space (field case)."""
    R = M.ring
    if not R.is_field:
        raise ValueError("field required")
    if M.cols == 0 or M.rows == 0:
        return []
    _, pivots = _field_rref(M.to_lists(), R)
    return [M.column(j) for j in pivots]


def solve(M: ExactMatrix, b: Sequence) -> list | None:
    """One solution of ``M x = b`` or ``None``.  Fields, Z and Z_(p) (integrally)."""
    R = M.ring
    if R.is_field:
        aug = [list(r) + [R(bi)] for r, bi in zip(M.entries, b)]
        if M.rows == 0:
            return [R.zero] * M.cols
        A, pivots = _field_rref(aug, R)
        if M.cols in pivots:
            return None
        x = [R.zero] * M.cols
        for row, pc in zip(A, pivots):
            x[pc] = row[-1]
        return x
    if R.is_integral:
        D, U, V = smith_normal_form(M)
        c = U.apply(b)
        y = [0] * M.cols
        r = min(M.rows, M.cols)
        for i in range(M.rows):
            d = D.entries[i][i] if i < r else 0
            if d == 0:
                if c[i] != 0:
                    return None
            else:
                if c[i] % d:
                    return None
                y[i] = c[i] // d
        return V.apply(y)
    raise ValueError(f"solve over {R} not supported")


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


def _snf_work(A: list[list], R: BaseRing, track: bool):
    """In-place Smith reduction.

    Returns (A, U, Uinv, V, Vinv) as lists with U*A0*V = A (diagonal).
    Integral rings pivot on the smallest absolute value; fields on any nonzero entry.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    integral = R.is_integral
    norm = (lambda x: abs(x)) if integral else (lambda x: 0 if x == 0 else 1)

    def ident(k):
        return [[1 if i == j else 0 for j in range(k)] for i in range(k)] if track else None

    U, Uinv, V, Vinv = ident(m), ident(m), ident(n), ident(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        if track:
            U[i], U[j] = U[j], U[i]
            for row in Uinv:
                row[i], row[j] = row[j], row[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        if track:
            for row in V:
                row[i], row[j] = row[j], row[i]
            Vinv[i], Vinv[j] = Vinv[j], Vinv[i]

    def add_row(dst, src, f):
        # row_dst += f * row_src
        A[dst] = [R(x + f * y) for x, y in zip(A[dst], A[src])]
        if track:
            U[dst] = [R(x + f * y) for x, y in zip(U[dst], U[src])]
            for row in Uinv:
                row[src] = R(row[src] - f * row[dst])

    def add_col(dst, src, f):
        for row in A:
            if row[src]:
                row[dst] = R(row[dst] + f * row[src])
        if track:
            for row in V:
                if row[src]:
                    row[dst] = R(row[dst] + f * row[src])
            Vinv[src] = [R(x - f * y) for x, y in zip(Vinv[src], Vinv[dst])]

    def scale_row(i, u):
        # u a unit; keep Uinv consistent
        A[i] = [R(x * u) for x in A[i]]
        if track:
            U[i] = [R(x * u) for x in U[i]]
            ui = R.inv(u)
            for row in Uinv:
                row[i] = R(row[i] * ui)

    def quotient(a, b):
        if integral:
            return a // b
        return R.mul(a, R.inv(b))

    t = 0
    while t < min(m, n):
        # choose pivot of minimal norm in the remaining block
        best = None
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                x = row[j]
                if x != 0:
                    nx = norm(x)
                    if best is None or nx < best[0]:
                        best = (nx, i, j)
                        if nx == 1:
                            break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        if i != t:
            swap_rows(i, t)
        if j != t:
            swap_cols(j, t)
        while True:
            p = A[t][t]
            done = True
            for i in range(t + 1, m):
                x = A[i][t]
                if x:
                    q = quotient(x, p)
                    add_row(i, t, R(-q))
                    if A[i][t] != 0:
                        done = False
            for j in range(t + 1, n):
                x = A[t][j]
                if x:
                    q = quotient(x, p)
                    add_col(j, t, R(-q))
                    if A[t][j] != 0:
                        done = False
            if done:
                # divisibility of the remaining block
                bad = None
                if integral:
                    for i in range(t + 1, m):
                        for j in range(t + 1, n):
                            if A[i][j] % p:
                                bad = i
                                break
                        if bad is not None:
                            break
                if bad is None:
                    break
                add_row(t, bad, 1)
                continue
            # move the smallest entry of row/column t into the pivot
            best = (norm(A[t][t]), t, t)
            for i in range(t + 1, m):
                if A[i][t] != 0 and norm(A[i][t]) < best[0]:
                    best = (norm(A[i][t]), i, t)
            for j in range(t + 1, n):
                if A[t][j] != 0 and norm(A[t][j]) < best[0]:
                    best = (norm(A[t][j]), t, j)
            _, i, j = best
            if i != t:
                swap_rows(i, t)
            if j != t:
                swap_cols(j, t)
        if integral:
            if A[t][t] < 0:
                scale_row(t, -1)
        elif A[t][t] != R.one:
            scale_row(t, R.inv(A[t][t]))
        t += 1
    return A, U, Uinv, V, Vinv


def smith_normal_form(M: ExactMatrix) -> tuple[ExactMatrix, ExactMatrix, ExactMatrix]:
    """Return ``(D, U, V)`` with ``U @ M @ V == D``.

    ``D`` is diagonal with ``d_1 | d_2 | ... | d_r`` followed by zeros and
    ``U``, ``V`` are invertible (determinant +-1 over Z).  Over a field the
    nonzero diagonal entries are all 1.  Z_(p) input is reduced integrally.
    """
    D, U, V, _, _ = smith_form_with_inverses(M)
    return D, U, V


def smith_form_with_inverses(M: ExactMatrix):
    """Like :func:`smith_normal_form` but also returns ``U^-1`` and ``V^-1``."""
    R = M.ring
    if not (R.is_field or R.is_integral):
        raise ValueError(f"Smith normal form over {R} not supported")
    m, n = M.shape
    A = M.to_lists()
    if m == 0 or n == 0:
        A, U, Ui, V, Vi = A, _id(m), _id(m), _id(n), _id(n)
    else:
        A, U, Ui, V, Vi = _snf_work(A, R, track=True)
    mk = lambda rows, c: ExactMatrix(len(rows), c, tuple(tuple(r) for r in rows), R)
    return mk(A, n), mk(U, m), mk(V, n), mk(Ui, m), mk(Vi, n)


def _id(k):
    return [[1 if i == j else 0 for j in range(k)] for i in range(k)]


def invariant_factors(M: ExactMatrix) -> list:
    """Nonzero diagonal of the Smith form (no transforms tracked)."""
    R = M.ring
    if M.rows == 0 or M.cols == 0:
        return []
    if R.is_field:
        return [R.one] * rank(M)
    if not R.is_integral:
        raise ValueError(f"invariant factors over {R} not supported")
    A, *_ = _snf_work(M.to_lists(), R, track=False)
    return [A[i][i] for i in range(min(M.shape)) if A[i][i] != 0]


def split_cokernel(M: ExactMatrix) -> tuple[ExactMatrix, ExactMatrix]:
    """For a split injection ``M : S -> C`` return ``(P, s)``.

    ``P : C -> C/S`` is the projection and ``s`` a section with ``P s = 1``
    and ``P M = 0``.  Raises if ``M`` is not split injective.
    """
    R = M.ring
    n = M.rows
    D, U, V, Ui, Vi = smith_form_with_inverses(M)
    r = M.cols
    diag = [D.entries[i][i] for i in range(min(D.shape))]
    if len([d for d in diag if d != 0]) != r or any(not R.is_unit(d) for d in diag if d != 0):
        raise ValueError("map is not a split injection")
    rows = list(range(r, n))
    P = U.submatrix(rows, list(range(n)))
    s = Ui.submatrix(list(range(n)), rows)
    return P, s


def image_basis(M: ExactMatrix) -> ExactMatrix:
    """Matrix whose columns form a basis of the image lattice/space of M."""
    R = M.ring
    if R.is_field:
        cols = column_space_basis(M)
        return ExactMatrix.from_columns(R, cols, M.rows)
    D, U, V, Ui, Vi = smith_form_with_inverses(M)
    r = sum(1 for i in range(min(D.shape)) if D.entries[i][i] != 0)
    # image = Ui * D * (first r coordinates)
    cols = []
    for j in range(r):
        d = D.entries[j][j]
        cols.append([R(Ui.entries[i][j] * d) for i in range(M.rows)])
    return ExactMatrix.from_columns(R, cols, M.rows)


# ---------------------------------------------------------------------------
# Sparse multivariate polynomials
# ---------------------------------------------------------------------------

_BITS = 24
_MASK = (1 << _BITS) - 1
_CARRY = 1 << (_BITS - 1)


class IntegralityError(ArithmeticError):
    """Raised when an exact division by an integer fails.

    ``term`` carries the offending exponent vector and coefficient.
    """

    def __init__(self, message: str, term=None, poly=None):
        super().__init__(message)
        self.term = term
        self.poly = poly


def _pack(exps: Sequence[int]) -> int:
    key = 0
    for i, e in enumerate(exps):
        if e < 0 or e >= _CARRY:
            raise OverflowError(f"exponent {e} out of range")
        key |= e << (_BITS * i)
    return key


def _unpack(key: int, n: int) -> tuple[int, ...]:
    return tuple((key >> (_BITS * i)) & _MASK for i in range(n))


class MultiPoly:
    """Sparse polynomial with exact coefficients in a fixed variable list.

    Exponent vectors are stored packed into single integers so that
    multiplying monomials is integer addition.  Instances are immutable.
    """

    __slots__ = ("variables", "ring", "_t")

    def __init__(self, variables: Sequence[str], terms: Mapping[Sequence[int], object] | None = None, ring: BaseRing = ZZ):
        self.variables = tuple(variables)
        self.ring = ring
        t = {}
        n = len(self.variables)
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != n:
                raise ValueError(f"exponent vector {e} has wrong length for {self.variables}")
            c = ring(c)
            if c != 0:
                k = _pack(e)
                t[k] = ring(t.get(k, 0) + c)
                if t[k] == 0:
                    del t[k]
        self._t = t

    @classmethod
    def _raw(cls, variables, ring, packed: dict) -> MultiPoly:
        obj = cls.__new__(cls)
        obj.variables = variables
        obj.ring = ring
        obj._t = packed
        return obj

    # -- constructors -------------------------------------------------------
    @classmethod
    def gen(cls, variables: Sequence[str], name: str, ring: BaseRing = ZZ) -> MultiPoly:
        variables = tuple(variables)
        i = variables.index(name)
        e = [0] * len(variables)
        e[i] = 1
        return cls(variables, {tuple(e): 1}, ring)

    @classmethod
    def gens(cls, variables: Sequence[str], ring: BaseRing = ZZ) -> list[MultiPoly]:
        return [cls.gen(variables, v, ring) for v in variables]

    @classmethod
    def constant(cls, variables: Sequence[str], c, ring: BaseRing = ZZ) -> MultiPoly:
        return cls(variables, {(0,) * len(tuple(variables)): c}, ring)

    @classmethod
    def monomial(cls, variables: Sequence[str], exps: Sequence[int], c=1, ring: BaseRing = ZZ) -> MultiPoly:
        return cls(variables, {tuple(exps): c}, ring)

    # -- views ---------------------------------------------------------------
    @property
    def terms(self) -> Mapping[tuple[int, ...], object]:
        n = len(self.variables)
        return MappingProxyType({_unpack(k, n): c for k, c in self._t.items()})

    def __len__(self) -> int:
        return len(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def sorted_terms(self) -> list[tuple[tuple[int, ...], object]]:
        """Terms in descending graded-lex order."""
        items = list(self.terms.items())
        items.sort(key=lambda kv: (sum(kv[0]), kv[0]), reverse=True)
        return items

    def coefficient(self, exps: Sequence[int]):
        return self._t.get(_pack(exps), self.ring.zero)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, var: str) -> int:
        i = self.variables.index(var)
        return max((e[i] for e in self.terms), default=-1)

    def weighted_degrees(self, weights: Sequence[int]) -> set[int]:
        return {sum(w * a for w, a in zip(weights, e)) for e in self.terms}

    # -- arithmetic ---------------------------------------------------------
    def _check(self, other: MultiPoly):
        if self.variables != other.variables or self.ring != other.ring:
            raise ValueError("polynomials live in different rings")

    def _coerce(self, other) -> MultiPoly:
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        return MultiPoly.constant(self.variables, other, self.ring)

    def __add__(self, other) -> MultiPoly:
        other = self._coerce(other)
        R = self.ring
        t = dict(self._t)
        for k, c in other._t.items():
            v = R(t.get(k, 0) + c)
            if v:
                t[k] = v
            else:
                t.pop(k, None)
        return MultiPoly._raw(self.variables, R, t)

    __radd__ = __add__

    def __neg__(self) -> MultiPoly:
        R = self.ring
        return MultiPoly._raw(self.variables, R, {k: R(-c) for k, c in self._t.items()})

    def __sub__(self, other) -> MultiPoly:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> MultiPoly:
        return self._coerce(other) - self

    def __mul__(self, other) -> MultiPoly:
        if not isinstance(other, MultiPoly):
            c = self.ring(other)
            if c == 0:
                return MultiPoly._raw(self.variables, self.ring, {})
            R = self.ring
            t = {}
            for k, a in self._t.items():
                v = R(a * c)
                if v:
                    t[k] = v
            return MultiPoly._raw(self.variables, R, t)
        self._check(other)
        R = self.ring
        a_items = list(self._t.items())
        b_items = list(other._t.items())
        if len(a_items) < len(b_items):
            a_items, b_items = b_items, a_items
        t: dict[int, object] = {}
        get = t.get
        for kb, cb in b_items:
            for ka, ca in a_items:
                k = ka + kb
                t[k] = get(k, 0) + ca * cb
        if R.modulus or R.kind == "Rationals":
            t = {k: R(v) for k, v in t.items()}
        t = {k: v for k, v in t.items() if v}
        out = MultiPoly._raw(self.variables, R, t)
        out._guard()
        return out

    __rmul__ = __mul__

    def _guard(self):
        # an exponent reaching the top bit of its field is about to carry into the next one
        n = len(self.variables)
        probe = 0
        for k in self._t:
            probe |= k
        for i in range(n):
            if (probe >> (_BITS * i)) & _CARRY:
                raise OverflowError("exponent overflow in packed monomial")

    def __pow__(self, e: int) -> MultiPoly:
        if e < 0:
            raise ValueError("negative power")
        result = MultiPoly.constant(self.variables, 1, self.ring)
        if e == 0:
            return result
        if len(self._t) == 1:
            (k, c), = self._t.items()
            ce = self.ring.pow(c, e)
            out = MultiPoly._raw(self.variables, self.ring, {k * e: ce} if ce else {})
            out._guard()
            return out
        # multiplying by a short base is cheaper than squaring a long result
        if len(self._t) <= 12:
            for _ in range(e):
                result = result * self
            return result
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self.variables == other.variables and self._t == other._t
        if not self._t:
            return other == 0
        return len(self._t) == 1 and 0 in self._t and self._t[0] == other

    def __hash__(self):
        return hash((self.variables, frozenset(self._t.items())))

    def map_coefficients(self, f, ring: BaseRing | None = None) -> MultiPoly:
        ring = ring or self.ring
        return MultiPoly(self.variables, {e: f(c) for e, c in self.terms.items()}, ring)

    def change_ring(self, ring: BaseRing) -> MultiPoly:
        return MultiPoly(self.variables, dict(self.terms), ring)

    def divide_exactly_by_integer(self, n: int) -> MultiPoly:
        """Divide every coefficient by ``n``; raise :class:`IntegralityError` if some term is not divisible."""
        if n == 0:
            raise ZeroDivisionError("division by zero")
        R = self.ring
        t = {}
        for k, c in self._t.items():
            if R.kind == "Rationals":
                t[k] = Fraction(c) / n
                continue
            if R.modulus:
                if n % R.p == 0:
                    raise IntegralityError(f"{n} is not invertible in {R}")
                t[k] = R(c * pow(n, -1, R.modulus))
                continue
            if c % n:
                e = _unpack(k, len(self.variables))
                raise IntegralityError(
                    f"coefficient {c} of {_fmt_monomial(self.variables, e)} is not divisible by {n}",
                    term=(e, c),
                    poly=self,
                )
            t[k] = c // n
        return MultiPoly._raw(self.variables, R, t)

    def substitute(self, mapping: Mapping[str, object]) -> MultiPoly:
        """Replace variables by polynomials (same variable list) or constants."""
        vals = []
        for v in self.variables:
            if v in mapping:
                val = mapping[v]
                if not isinstance(val, MultiPoly):
                    val = MultiPoly.constant(self.variables, val, self.ring)
                vals.append(val)
            else:
                vals.append(MultiPoly.gen(self.variables, v, self.ring))
        target = vals[0] if vals else self
        return self.evaluate(vals, MultiPoly.constant(target.variables, 1, target.ring))

    def evaluate(self, values: Sequence, one=None, ring_ops=None):
        """Evaluate at ``values`` (one per variable).

        ``values`` may be MultiPoly instances or elements of a carrier ring;
        in the latter case pass ``ring_ops`` (an object with ``add``, ``mul``,
        ``pow``, ``from_int``, ``zero``).  Powers are cached per variable.
        """
        n = len(self.variables)
        if len(values) != n:
            raise ValueError("wrong number of values")
        if ring_ops is None:
            # polynomial (or plain number) evaluation
            acc = None
            cache: dict[tuple[int, int], object] = {}
            for e, c in self.terms.items():
                term = None
                for i, a in enumerate(e):
                    if a:
                        key = (i, a)
                        if key not in cache:
                            cache[key] = values[i] ** a
                        term = cache[key] if term is None else term * cache[key]
                if term is None:
                    term = one * c if one is not None else c
                else:
                    term = term * c
                acc = term if acc is None else acc + term
            if acc is None:
                return one * 0 if one is not None else 0
            return acc
        ops = ring_ops
        acc = ops.zero
        cache = {}
        for e, c in self.terms.items():
            term = ops.from_int(c) if not isinstance(c, Fraction) else ops.from_fraction(c)
            for i, a in enumerate(e):
                if a:
                    key = (i, a)
                    if key not in cache:
                        cache[key] = ops.pow(values[i], a)
                    term = ops.mul(term, cache[key])
            acc = ops.add(acc, term)
        return acc

    def rename(self, variables: Sequence[str]) -> MultiPoly:
        """Same terms, new variable names (same length)."""
        if len(variables) != len(self.variables):
            raise ValueError("length mismatch")
        return MultiPoly._raw(tuple(variables), self.ring, dict(self._t))

    def embed(self, variables: Sequence[str]) -> MultiPoly:
        """Re-express in a larger variable list containing all current variables."""
        variables = tuple(variables)
        idx = [variables.index(v) for v in self.variables]
        out = {}
        for e, c in self.terms.items():
            f = [0] * len(variables)
            for i, a in zip(idx, e):
                f[i] = a
            out[tuple(f)] = c
        return MultiPoly(variables, out, self.ring)

    def truncate(self, max_total_degree: int) -> MultiPoly:
        n = len(self.variables)
        t = {k: c for k, c in self._t.items() if sum(_unpack(k, n)) <= max_total_degree}
        return MultiPoly._raw(self.variables, self.ring, t)

    def __str__(self) -> str:
        if not self._t:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = _fmt_monomial(self.variables, e)
            if mono == "1":
                s = str(c)
            elif c == 1:
                s = mono
            elif c == -1:
                s = "-" + mono
            else:
                s = f"{c}*{mono}"
            parts.append(s)
        out = parts[0]
        for s in parts[1:]:
            out += " - " + s[1:] if s.startswith("-") else " + " + s
        return out

    def __repr__(self) -> str:
        return f"MultiPoly({self})"

    def to_json(self) -> dict:
        return {
            "vars": list(self.variables),
            "terms": [{"exps": list(e), "coef": str(c)} for e, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, obj: Mapping, ring: BaseRing = ZZ) -> MultiPoly:
        conv = Fraction if ring.kind == "Rationals" else int
        return cls(obj["vars"], {tuple(t["exps"]): conv(t["coef"]) for t in obj["terms"]}, ring)


def _fmt_monomial(variables: Sequence[str], e: Sequence[int]) -> str:
    parts = []
    for v, a in zip(variables, e):
        if a == 1:
            parts.append(v)
        elif a > 1:
            parts.append(f"{v}^{a}")
    return "*".join(parts) if parts else "1"
