"""Prime fields F_p and their extensions F_{p^m} in a fixed power basis.

Elements of F_{p^m} are coefficient tuples over the power basis
1, w, ..., w^(m-1) of a monic irreducible defining polynomial f, where w is
the class of X mod f. All arithmetic is exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import linalg

FIELD_SIZE_CAP = 10**6


def _trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mul(a, b, p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _trim(out)


def _poly_divmod(a, b, p: int):
    a = list(a)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = linalg.inv_mod(b[-1], p)
    q = [0] * max(0, len(a) - len(b) + 1)
    while len(a) >= len(b) and _trim(a):
        shift = len(a) - len(b)
        f = (a[-1] * inv_lead) % p
        q[shift] = f
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - f * bi) % p
        _trim(a)
    return _trim(q), _trim(a)


def _poly_gcd(a, b, p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _poly_divmod(a, b, p)[1]
    if a:
        inv = linalg.inv_mod(a[-1], p)
        a = [(v * inv) % p for v in a]
    return a


def _poly_powmod(base, e: int, mod, p: int) -> list[int]:
    result = [1]
    base = _poly_divmod(base, mod, p)[1]
    while e > 0:
        if e & 1:
            result = _poly_divmod(_poly_mul(result, base, p), mod, p)[1]
        base = _poly_divmod(_poly_mul(base, base, p), mod, p)[1]
        e >>= 1
    return result


def _prime_divisors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible_poly(coeffs, p: int) -> bool:
    """Irreducibility of a monic polynomial over F_p (Rabin's criterion)."""
    f = list(coeffs)
    m = len(f) - 1
    if m < 1 or f[-1] != 1:
        raise ValueError("polynomial must be monic of degree >= 1")
    x_mod_f = _poly_divmod([0, 1], f, p)[1]
    if _poly_powmod([0, 1], p**m, f, p) != x_mod_f:
        return False
    for q in _prime_divisors(m):
        h = _poly_sub(_poly_powmod([0, 1], p ** (m // q), f, p), x_mod_f, p)
        if len(_poly_gcd(h, f, p)) != 1:
            return False
    return True


def _poly_sub(a, b, p: int) -> list[int]:
    out = [0] * max(len(a), len(b))
    for i, v in enumerate(a):
        out[i] = v % p
    for i, v in enumerate(b):
        out[i] = (out[i] - v) % p
    return _trim(out)


def find_irreducible(p: int, m: int) -> tuple[int, ...]:
    """Lex-smallest monic irreducible of degree m over F_p.

    Candidates X^m + c_{m-1}X^{m-1} + ... + c_0 are scanned in ascending
    lexicographic order of (c_{m-1}, ..., c_0), so the choice is canonical.
    Returns coefficients low-to-high, length m+1, leading 1.
    """
    linalg.check_prime(p)
    if m < 1:
        raise ValueError(f"extension degree must be >= 1, got {m}")
    if p**m > FIELD_SIZE_CAP:
        raise ValueError(f"field size {p}^{m} exceeds cap {FIELD_SIZE_CAP}")
    for tail in itertools.product(range(p), repeat=m):
        coeffs = tuple(reversed(tail)) + (1,)
        if is_irreducible_poly(coeffs, p):
            return coeffs
    raise AssertionError("unreachable: irreducibles of every degree exist")


@dataclass(frozen=True)
class PrimeFieldElement:
    """A residue in F_p."""

    p: int
    value: int

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % self.p)

    def __int__(self) -> int:
        return self.value

    def _check(self, other: "PrimeFieldElement"):
        if self.p != other.p:
            raise ValueError("mixed characteristics")

    def __add__(self, other: "PrimeFieldElement") -> "PrimeFieldElement":
        self._check(other)
        return PrimeFieldElement(self.p, self.value + other.value)

    def __mul__(self, other: "PrimeFieldElement") -> "PrimeFieldElement":
        self._check(other)
        return PrimeFieldElement(self.p, self.value * other.value)

    def __neg__(self) -> "PrimeFieldElement":
        return PrimeFieldElement(self.p, -self.value)

    def inverse(self) -> "PrimeFieldElement":
        return PrimeFieldElement(self.p, linalg.inv_mod(self.value, self.p))


@dataclass(frozen=True)
class ExtFieldCtx:
    """The field F_{p^m} presented as F_p[X]/(f) with f monic irreducible.

    defining_poly holds the coefficients of f low-to-high (length m+1,
    leading coefficient 1). Use ext_field_ctx() to get the canonical f.
    """

    p: int
    m: int
    defining_poly: tuple[int, ...]

    def __post_init__(self):
        linalg.check_prime(self.p)
        if self.m < 1:
            raise ValueError(f"extension degree must be >= 1, got {self.m}")
        f = tuple(v % self.p for v in self.defining_poly)
        if len(f) != self.m + 1 or f[-1] != 1:
            raise ValueError("defining polynomial must be monic of degree m")
        if not is_irreducible_poly(f, self.p):
            raise ValueError(f"defining polynomial {f} is reducible mod {self.p}")
        object.__setattr__(self, "defining_poly", f)

    @property
    def order(self) -> int:
        return self.p**self.m

    def element(self, coeffs) -> "ExtFieldElement":
        return ExtFieldElement(self, tuple(coeffs))

    def from_int(self, c: int) -> "ExtFieldElement":
        return self.element((c,) + (0,) * (self.m - 1))

    def zero(self) -> "ExtFieldElement":
        return self.from_int(0)

    def one(self) -> "ExtFieldElement":
        return self.from_int(1)

    def gen(self) -> "ExtFieldElement":
        """The class of X mod f (the power-basis generator w)."""
        if self.m == 1:
            return self.from_int(-self.defining_poly[0])
        return self.element((0, 1) + (0,) * (self.m - 2))

    def iter_elements(self):
        """All p^m elements, lexicographic in the coefficient tuple."""
        for coeffs in itertools.product(range(self.p), repeat=self.m):
            yield self.element(coeffs)


def ext_field_ctx(p: int, m: int, defining_poly=None) -> ExtFieldCtx:
    """Build F_{p^m}; the canonical defining polynomial unless one is given."""
    if defining_poly is None:
        defining_poly = find_irreducible(p, m)
    return ExtFieldCtx(p, m, tuple(defining_poly))


@dataclass(frozen=True)
class ExtFieldElement:
    """An element of F_{p^m}: coefficients over the power basis, length m."""

    ctx: ExtFieldCtx
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.ctx.m:
            raise ValueError(
                f"expected {self.ctx.m} coefficients, got {len(self.coeffs)}"
            )
        object.__setattr__(
            self, "coeffs", tuple(v % self.ctx.p for v in self.coeffs)
        )

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.coeffs)

    def as_int(self) -> int:
        """The value of a prime-subfield element as a plain residue."""
        if any(self.coeffs[1:]):
            raise ValueError(f"{self.coeffs} is not in the prime subfield")
        return self.coeffs[0]


def _same_ctx(a: ExtFieldElement, b: ExtFieldElement):
    if a.ctx != b.ctx:
        raise ValueError("elements live in different field presentations")


def ext_add(a: ExtFieldElement, b: ExtFieldElement) -> ExtFieldElement:
    _same_ctx(a, b)
    return a.ctx.element(tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))


def ext_sub(a: ExtFieldElement, b: ExtFieldElement) -> ExtFieldElement:
    _same_ctx(a, b)
    return a.ctx.element(tuple(x - y for x, y in zip(a.coeffs, b.coeffs)))


def ext_neg(a: ExtFieldElement) -> ExtFieldElement:
    return a.ctx.element(tuple(-x for x in a.coeffs))


def ext_scalar_mul(c: int, a: ExtFieldElement) -> ExtFieldElement:
    return a.ctx.element(tuple(c * x for x in a.coeffs))


def ext_mul(a: ExtFieldElement, b: ExtFieldElement) -> ExtFieldElement:
    _same_ctx(a, b)
    ctx = a.ctx
    prod = _poly_mul(list(a.coeffs), list(b.coeffs), ctx.p)
    rem = _poly_divmod(prod, list(ctx.defining_poly), ctx.p)[1]
    rem = rem + [0] * (ctx.m - len(rem))
    return ctx.element(tuple(rem))


def ext_inv(a: ExtFieldElement) -> ExtFieldElement:
    """Multiplicative inverse via the extended Euclidean algorithm."""
    if a.is_zero():
        raise ZeroDivisionError("inverse of 0 in F_{p^m}")
    ctx = a.ctx
    p = ctx.p
    r0, r1 = list(ctx.defining_poly), _trim(list(a.coeffs))
    s0, s1 = [], [1]
    while r1:
        q, r = _poly_divmod(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1, p), p)
    # r0 is a unit constant: scale s0 by its inverse
    inv = linalg.inv_mod(r0[0], p)
    s0 = [(v * inv) % p for v in s0]
    s0 = s0 + [0] * (ctx.m - len(s0))
    return ctx.element(tuple(s0))


def ext_pow(a: ExtFieldElement, e: int) -> ExtFieldElement:
    if e < 0:
        return ext_pow(ext_inv(a), -e)
    result = a.ctx.one()
    base = a
    while e > 0:
        if e & 1:
            result = ext_mul(result, base)
        base = ext_mul(base, base)
        e >>= 1
    return result


def frobenius(a: ExtFieldElement, i: int) -> ExtFieldElement:
    """The automorphism x -> x^(p^i); requires 0 <= i < m."""
    if not 0 <= i < a.ctx.m:
        raise ValueError(f"frobenius power must satisfy 0 <= i < {a.ctx.m}")
    return ext_pow(a, a.ctx.p**i)


def norm(a: ExtFieldElement) -> int:
    """Field norm down to F_p via the exponent (p^m - 1)/(p - 1); norm(0) = 0."""
    if a.is_zero():
        return 0
    ctx = a.ctx
    e = (ctx.order - 1) // (ctx.p - 1)
    return ext_pow(a, e).as_int()


def norm_via_conjugates(a: ExtFieldElement) -> int:
    """Independent route: the product of all Frobenius conjugates of a."""
    prod = a.ctx.one()
    for i in range(a.ctx.m):
        prod = ext_mul(prod, frobenius(a, i))
    return prod.as_int()


def is_normal_element(a: ExtFieldElement) -> bool:
    """True iff the conjugates of a form an F_p-basis of F_{p^m}."""
    rows = [list(frobenius(a, i).coeffs) for i in range(a.ctx.m)]
    return linalg.mat_rank(rows, a.ctx.p) == a.ctx.m
