"""Carrier rings on which Witt vectors are evaluated.

Every carrier exposes the same small protocol as :class:`~hkrlab.exactalg.BaseRing`:
``zero``, ``one``, ``add``, ``sub``, ``neg``, ``mul``, ``pow``, ``from_int``,
``from_fraction``, ``characteristic``, ``is_finite`` and (for finite ones)
``elements()``.  Elements must be hashable.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Iterator, Sequence

from .exactalg import ZZ, BaseRing, MultiPoly, PrimeField, is_prime

# Monic irreducible x^k + c_{k-1} x^{k-1} + ... + c_0, stored as (c_0, ..., c_{k-1}).
CONWAY = {
    (2, 1): (1,),
    (2, 2): (1, 1),
    (2, 3): (1, 1, 0),
    (3, 1): (1,),
    (3, 2): (2, 2),
    (3, 3): (1, 2, 0),
    (5, 1): (3,),
    (5, 2): (2, 4),
    (5, 3): (3, 3, 0),
    (7, 1): (4,),
    (7, 2): (3, 6),
    (7, 3): (4, 0, 6),
}


class FiniteField:
    """``F_{p^k}`` for ``k <= 3`` as ``F_p[α]/(conway)``; elements are coefficient tuples."""

    def __init__(self, p: int, k: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if (p, k) not in CONWAY:
            raise ValueError(f"F_{p}^{k} not tabulated (p <= 7, k <= 3)")
        self.p = p
        self.k = k
        self.modpoly = CONWAY[(p, k)]

    def __repr__(self):
        return f"FiniteField({self.p}, {self.k})"

    def __eq__(self, other):
        return isinstance(other, FiniteField) and (self.p, self.k) == (other.p, other.k)

    def __hash__(self):
        return hash(("F", self.p, self.k))

    def __str__(self):
        return f"F_{self.p ** self.k}"

    characteristic = property(lambda self: self.p)
    is_finite = True

    def is_fp_algebra(self, p: int) -> bool:
        return self.p == p

    @property
    def zero(self):
        return (0,) * self.k

    @property
    def one(self):
        return (1,) + (0,) * (self.k - 1)

    def from_int(self, n: int):
        return (n % self.p,) + (0,) * (self.k - 1)

    def from_fraction(self, q: Fraction):
        return self.from_int(q.numerator * pow(q.denominator, -1, self.p))

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple((x - y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        return tuple(-x % self.p for x in a)

    def mul(self, a, b):
        p, k = self.p, self.k
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        for d in range(2 * k - 2, k - 1, -1):
            c = prod[d] % p
            if c:
                prod[d] = 0
                for i, m in enumerate(self.modpoly):
                    prod[d - k + i] -= c * m
        return tuple(x % p for x in prod[:k])

    def pow(self, a, e: int):
        result = self.one
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def is_zero(self, a) -> bool:
        return not any(a)

    def elements(self) -> Iterator:
        return iter(product(range(self.p), repeat=self.k))

    def size(self) -> int:
        return self.p**self.k

    def format(self, a) -> str:
        terms = []
        for i, c in enumerate(a):
            if c:
                mono = "" if i == 0 else ("a" if i == 1 else f"a^{i}")
                terms.append(f"{c}{'*' + mono if mono and c != 1 else mono}" if mono else str(c))
        return " + ".join(terms) if terms else "0"


class DualNumbers:
    """``F_p[ε]/(ε²)``; elements are pairs ``(a, b)`` meaning ``a + bε``."""

    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p

    def __repr__(self):
        return f"DualNumbers({self.p})"

    def __eq__(self, other):
        return isinstance(other, DualNumbers) and self.p == other.p

    def __hash__(self):
        return hash(("D", self.p))

    def __str__(self):
        return f"F_{self.p}[e]/e^2"

    characteristic = property(lambda self: self.p)
    is_finite = True

    def is_fp_algebra(self, p: int) -> bool:
        return self.p == p

    zero = property(lambda self: (0, 0))
    one = property(lambda self: (1, 0))

    def from_int(self, n: int):
        return (n % self.p, 0)

    def from_fraction(self, q: Fraction):
        return self.from_int(q.numerator * pow(q.denominator, -1, self.p))

    def add(self, a, b):
        return ((a[0] + b[0]) % self.p, (a[1] + b[1]) % self.p)

    def sub(self, a, b):
        return ((a[0] - b[0]) % self.p, (a[1] - b[1]) % self.p)

    def neg(self, a):
        return (-a[0] % self.p, -a[1] % self.p)

    def mul(self, a, b):
        return ((a[0] * b[0]) % self.p, (a[0] * b[1] + a[1] * b[0]) % self.p)

    def pow(self, a, e: int):
        if e == 0:
            return self.one
        # (a + bε)^e = a^e + e a^{e-1} b ε
        return (pow(a[0], e, self.p), e * pow(a[0], e - 1, self.p) * a[1] % self.p)

    def is_zero(self, a) -> bool:
        return a == (0, 0)

    def elements(self) -> Iterator:
        return iter(product(range(self.p), repeat=2))

    def size(self) -> int:
        return self.p**2

    def format(self, a) -> str:
        if a[1] == 0:
            return str(a[0])
        eps = "e" if a[1] == 1 else f"{a[1]}e"
        return eps if a[0] == 0 else f"{a[0]} + {eps}"


class PolyRing:
    """Polynomial ring over Z or Q used as a symbolic carrier (elements are MultiPoly)."""

    is_finite = False

    def __init__(self, variables: Sequence[str], coeffs: BaseRing = ZZ):
        self.variables = tuple(variables)
        self.coeffs = coeffs

    def __repr__(self):
        return f"PolyRing({self.variables}, {self.coeffs})"

    def __eq__(self, other):
        return isinstance(other, PolyRing) and (self.variables, self.coeffs) == (other.variables, other.coeffs)

    def __hash__(self):
        return hash(("P", self.variables, self.coeffs))

    def __str__(self):
        return f"{self.coeffs}[{','.join(self.variables)}]"

    @property
    def characteristic(self) -> int:
        return self.coeffs.characteristic

    def is_fp_algebra(self, p: int) -> bool:
        return self.coeffs.characteristic == p

    def gen(self, name: str) -> MultiPoly:
        return MultiPoly.gen(self.variables, name, self.coeffs)

    def gens(self) -> list[MultiPoly]:
        return [self.gen(v) for v in self.variables]

    @property
    def zero(self):
        return MultiPoly(self.variables, {}, self.coeffs)

    @property
    def one(self):
        return MultiPoly.constant(self.variables, 1, self.coeffs)

    def from_int(self, n: int):
        return MultiPoly.constant(self.variables, n, self.coeffs)

    def from_fraction(self, q: Fraction):
        return MultiPoly.constant(self.variables, q, self.coeffs)

    def __call__(self, x):
        if isinstance(x, MultiPoly):
            return x
        return MultiPoly.constant(self.variables, x, self.coeffs)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def pow(self, a, e: int):
        return a**e

    def is_zero(self, a) -> bool:
        return a.is_zero()

    def elements(self):
        raise ValueError("enumeration requires finite ring")

    def format(self, a) -> str:
        return str(a)


def parse_carrier(text: str):
    """Parse a carrier name: ``F_4``/``F_2^2``, ``F_2[e]``, ``Z/9``, ``F_3``, ``Z``, ``Q``."""
    from .exactalg import parse_ring

    t = text.strip().replace(" ", "")
    if t.endswith("[e]") or t.endswith("[e]/e^2") or "[eps]" in t:
        base = parse_ring(t.split("[")[0])
        if base.kind != "PrimeField":
            raise ValueError("dual numbers need a prime field base")
        return DualNumbers(base.p)
    if t.startswith("F_") and "^" in t:
        p, k = t[2:].split("^")
        return FiniteField(int(p), int(k)) if int(k) > 1 else PrimeField(int(p))
    if t.startswith("F_") and t[2:].isdigit():
        q = int(t[2:])
        from .exactalg import prime_power_factors

        fac = prime_power_factors(q)
        if len(fac) != 1:
            raise ValueError(f"F_{q}: not a prime power")
        p, k = fac[0]
        return PrimeField(p) if k == 1 else FiniteField(p, k)
    return parse_ring(t)
