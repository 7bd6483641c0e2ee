"""The residue ring R = F_q[x]/(x^N - 1) and its index-set combinatorics.

A ring element is the length-N coefficient vector of its canonical
representative (labels, low-to-high).  Multiplication is cyclic convolution,
so expanding a ring element to its circulant matrix turns ring products into
matrix products.  The gcd machinery lifts elements to F_q[x] and runs Euclid
against x^N - 1; it backs the puncturing criteria of every construction.

Support combinatorics: Index(a) is the support of a, Delta(M) the multiset of
pairwise cyclic differences of a set M (both signs), and a modular Golomb
ruler is a set whose Delta values are nonzero and all distinct.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from math import gcd
from typing import Iterable, Sequence

from .fields import Field, NotPrimeError, is_prime


class RingError(ValueError):
    pass


class ContextMismatchError(RingError):
    pass


class ZeroPolynomialError(RingError):
    pass


class TooSmallError(RingError):
    pass


@dataclass(frozen=True)
class RingContext:
    """F_q[x]/(x^N - 1) for a fixed field and modulus length N."""

    field: Field
    size: int

    def __post_init__(self):
        if self.size < 1:
            raise RingError("N must be positive")
        if gcd(self.size, self.field.characteristic) != 1:
            raise RingError(
                f"gcd(N={self.size}, p={self.field.characteristic}) must be 1")

    # -- constructors ----------------------------------------------------------

    def from_coeffs(self, labels: Iterable[int]) -> "RingPoly":
        labels = tuple(labels)
        if len(labels) != self.size:
            raise RingError(f"need exactly {self.size} coefficients")
        if any(not 0 <= c < self.field.order for c in labels):
            raise RingError("coefficient labels out of range")
        return RingPoly(self, labels)

    def from_support(self, exponents: Iterable[int], coeff: int = 1) -> "RingPoly":
        c = [0] * self.size
        for e in exponents:
            c[e % self.size] = self.field.label_add(c[e % self.size], coeff)
        return RingPoly(self, tuple(c))

    def monomial(self, exponent: int, coeff: int = 1) -> "RingPoly":
        c = [0] * self.size
        c[exponent % self.size] = coeff % self.field.order
        return RingPoly(self, tuple(c))

    @property
    def zero(self) -> "RingPoly":
        return RingPoly(self, (0,) * self.size)

    @property
    def one(self) -> "RingPoly":
        return self.monomial(0)

    # -- text form: "x^230 + x^29" for GF(2), "{c@e, ...}" otherwise -----------

    def parse(self, text: str) -> "RingPoly":
        text = text.strip()
        if text.startswith("{"):
            if not text.endswith("}"):
                raise RingError(f"unterminated coefficient list: {text!r}")
            c = [0] * self.size
            body = text[1:-1].strip()
            if body:
                for part in body.split(","):
                    m = re.fullmatch(r"\s*(\d+)\s*@\s*(\d+)\s*", part)
                    if not m:
                        raise RingError(f"bad term {part!r}, expected coeff@exp")
                    coeff, exp = int(m.group(1)), int(m.group(2))
                    c[exp % self.size] = self.field.label_add(
                        c[exp % self.size], coeff % self.field.order)
            return RingPoly(self, tuple(c))
        if text == "0":
            return self.zero
        c = [0] * self.size
        for part in text.split("+"):
            part = part.strip()
            if re.fullmatch(r"\d+", part):
                exp, coeff = 0, int(part)
            elif part == "x":
                exp, coeff = 1, 1
            else:
                m = re.fullmatch(r"x\^(\d+)", part)
                if not m:
                    raise RingError(f"bad term {part!r}")
                exp, coeff = int(m.group(1)), 1
            c[exp % self.size] = self.field.label_add(
                c[exp % self.size], coeff % self.field.order)
        return RingPoly(self, tuple(c))

    def format(self, a: "RingPoly") -> str:
        self.check(a)
        if a.is_zero:
            return "0"
        if self.field.order == 2:
            terms = []
            for e in sorted(a.support, reverse=True):
                terms.append("1" if e == 0 else ("x" if e == 1 else f"x^{e}"))
            return " + ".join(terms)
        return "{" + ", ".join(f"{a.coeffs[e]}@{e}"
                               for e in sorted(a.support, reverse=True)) + "}"

    def check(self, a: "RingPoly") -> None:
        if a.ctx != self:
            raise ContextMismatchError("ring element from a different context")


@dataclass(frozen=True)
class RingPoly:
    """An element of F_q[x]/(x^N - 1) as its coefficient label vector."""

    ctx: RingContext
    coeffs: tuple[int, ...]

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.coeffs) if c)

    @property
    def weight(self) -> int:
        return sum(1 for c in self.coeffs if c)

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __add__(self, other: "RingPoly") -> "RingPoly":
        self._same(other)
        f = self.ctx.field
        return RingPoly(self.ctx, tuple(
            f.label_add(a, b) for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "RingPoly") -> "RingPoly":
        self._same(other)
        f = self.ctx.field
        return RingPoly(self.ctx, tuple(
            f.label_sub(a, b) for a, b in zip(self.coeffs, other.coeffs)))

    def __mul__(self, other: "RingPoly") -> "RingPoly":
        self._same(other)
        f, n = self.ctx.field, self.ctx.size
        out = [0] * n
        for i in self.support:
            ci = self.coeffs[i]
            for j in other.support:
                k = i + j
                if k >= n:
                    k -= n
                out[k] = f.label_add(out[k], f.label_mul(ci, other.coeffs[j]))
        return RingPoly(self.ctx, tuple(out))

    def __pow__(self, e: int) -> "RingPoly":
        if e < 0:
            raise RingError("negative ring powers are not defined")
        r, base = self.ctx.one, self
        while e:
            if e & 1:
                r = r * base
            base = base * base
            e >>= 1
        return r

    def scale(self, label: int) -> "RingPoly":
        f = self.ctx.field
        return RingPoly(self.ctx, tuple(f.label_mul(label, c) for c in self.coeffs))

    def _same(self, other: "RingPoly") -> None:
        if self.ctx != other.ctx:
            raise ContextMismatchError("operands from different ring contexts")

    def __repr__(self) -> str:
        return f"RingPoly({self.ctx.format(self)!r}, N={self.ctx.size})"


# ----------------------------------------------------------------------------
# gcd machinery in F_q[x]
# ----------------------------------------------------------------------------

def _poly_deg(a: Sequence[int]) -> int:
    d = len(a) - 1
    while d >= 0 and a[d] == 0:
        d -= 1
    return d


def poly_gcd(field: Field, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    """Monic gcd of two label-coefficient polynomials over F_q."""
    a, b = list(a), list(b)
    while _poly_deg(b) >= 0:
        da, db = _poly_deg(a), _poly_deg(b)
        inv_lead = field.label_inv(b[db])
        while da >= db:
            f = field.label_mul(a[da], inv_lead)
            for k in range(db + 1):
                a[da - db + k] = field.label_sub(
                    a[da - db + k], field.label_mul(f, b[k]))
            da = _poly_deg(a)
        a, b = b, a[:da + 1]
    da = _poly_deg(a)
    a = a[:da + 1]
    inv_lead = field.label_inv(a[-1])
    return tuple(field.label_mul(inv_lead, c) for c in a)


def _gf2_poly_gcd(a: int, b: int) -> int:
    while b:
        db = b.bit_length()
        while a.bit_length() >= db:
            a ^= b << (a.bit_length() - db)
        a, b = b, a
    return a


def gcd_with_modulus(a: RingPoly) -> tuple[int, ...]:
    """Monic gcd(a(x), x^N - 1) in F_q[x], lifting a to its canonical
    degree < N representative."""
    if a.is_zero:
        raise ZeroPolynomialError("gcd with the zero element is x^N - 1 itself")
    field, n = a.ctx.field, a.ctx.size
    if field.order == 2:
        av = 0
        for e in a.support:
            av |= 1 << e
        g = _gf2_poly_gcd((1 << n) | 1, av)
        return tuple((g >> i) & 1 for i in range(g.bit_length()))
    modulus = [0] * (n + 1)
    modulus[0] = field.label_neg(1)
    modulus[n] = 1
    return poly_gcd(field, list(a.coeffs), modulus)


def poly_format(g: Sequence[int]) -> str:
    terms = [(f"{c}*" if c != 1 else "") + ("1" if i == 0 else ("x" if i == 1 else f"x^{i}"))
             for i, c in enumerate(g) if c]
    return " + ".join(reversed(terms)) if terms else "0"


POLY_ONE = (1,)


def poly_x_minus_one(field: Field) -> tuple[int, ...]:
    return (field.label_neg(1), 1)


# ----------------------------------------------------------------------------
# number theory and difference sets
# ----------------------------------------------------------------------------

def is_primitive_root(q_order: int, n: int) -> bool:
    """True iff q_order generates the multiplicative group mod the prime n;
    equivalently 1 + x + ... + x^(n-1) is irreducible over F_q."""
    if not is_prime(n):
        raise NotPrimeError(f"{n} is not prime")
    if gcd(q_order, n) != 1:
        raise RingError(f"gcd({q_order}, {n}) != 1")
    target = n - 1
    x, order = q_order % n, 1
    while x != 1:
        x = x * q_order % n
        order += 1
        if order > target:
            return False
    return order == target


def index_set(a: RingPoly) -> tuple[int, ...]:
    """The sorted support of a ring element."""
    return a.support


@dataclass(frozen=True)
class DeltaSet:
    """Multiset of pairwise cyclic differences (both signs) of a support set."""

    values: tuple[int, ...]
    is_set: bool

    def __contains__(self, v: int) -> bool:
        return v in self.values


def delta_set(members: Iterable[int], n: int) -> DeltaSet:
    members = sorted(set(m % n for m in members))
    if len(members) < 2:
        raise TooSmallError("need at least two members for a difference set")
    values = []
    for a, b in combinations(members, 2):
        values.append((b - a) % n)
        values.append((a - b) % n)
    return DeltaSet(tuple(values), len(set(values)) == len(values))


def is_modular_golomb(members: Iterable[int], n: int) -> bool:
    members = sorted(set(m % n for m in members))
    if len(members) < 2:
        return True
    d = delta_set(members, n)
    return d.is_set and 0 not in d.values


def set_sum(a: Iterable[int], b: Iterable[int], n: int) -> frozenset[int]:
    return frozenset((x + y) % n for x in a for y in b)


def set_diff(a: Iterable[int], b: Iterable[int], n: int) -> frozenset[int]:
    return frozenset((x - y) % n for x in a for y in b)
