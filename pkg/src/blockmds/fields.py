"""Finite field arithmetic in GF(p^m).

Elements are reduced coordinate vectors over GF(p), low-to-high powers of the
generator alpha, wrapped in :class:`FieldElement`.  The integer label of an
element packs its coordinates base p (so in characteristic 2 label addition is
plain XOR), and every element corresponds to exactly one label in
``[0, order)``.  The label-level operations (``label_add`` etc.) are the fast
path used by the polynomial-ring and matrix layers; small fields additionally
expose numpy multiplication/inverse tables for vectorized elimination.

Moduli are arbitrary monic irreducible polynomials, checked at construction by
trial division (fields here are tiny, degree <= 16).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class FieldError(ValueError):
    """Base class for field construction/arithmetic errors."""


class NotPrimeError(FieldError):
    pass


class NotIrreducibleError(FieldError):
    pass


class DegreeMismatchError(FieldError):
    pass


class OutOfRangeError(FieldError):
    pass


# Largest order for which dense q x q lookup tables are built.
_TABLE_LIMIT = 4096

_MAX_DEGREE = 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


# ----------------------------------------------------------------------------
# Polynomial helpers over the prime field GF(p): coefficient lists of ints
# mod p, low-to-high.  Used for the irreducibility check before the extension
# field exists.
# ----------------------------------------------------------------------------

def _pf_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pf_mod(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a = list(a)
    db = len(b) - 1
    inv_lead = pow(b[-1], p - 2, p) if p > 2 else 1
    while len(_pf_trim(a)) - 1 >= db and a:
        da = len(a) - 1
        f = a[da] * inv_lead % p
        for k in range(db + 1):
            a[da - db + k] = (a[da - db + k] - f * b[k]) % p
        _pf_trim(a)
    return a


def _pf_is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by all monic polynomials of degree <= deg(poly)/2."""
    m = len(poly) - 1
    if m <= 0:
        return False
    if m == 1:
        return True
    for d in range(1, m // 2 + 1):
        for code in range(p ** d):
            rest, div = code, []
            for _ in range(d):
                div.append(rest % p)
                rest //= p
            div.append(1)
            if not _pf_mod(poly, div, p):
                return False
    return True


@dataclass(frozen=True)
class FieldElement:
    """A field element as its reduced coordinate vector."""

    coords: tuple[int, ...]

    def __repr__(self) -> str:
        return f"FieldElement{self.coords}"


class Field:
    """GF(p^m) given by characteristic, degree and a monic irreducible modulus.

    Immutable after construction; all operations are pure functions, so a
    Field is safe to share across threads.
    """

    def __init__(self, characteristic: int, degree: int,
                 modulus: Sequence[int] | None = None):
        if not is_prime(characteristic):
            raise NotPrimeError(f"characteristic {characteristic} is not prime")
        if degree < 1 or degree > _MAX_DEGREE:
            raise DegreeMismatchError(f"degree must be in [1, {_MAX_DEGREE}]")
        p = characteristic
        if modulus is None:
            if degree != 1:
                raise DegreeMismatchError("modulus required for degree > 1")
            modulus = (0, 1)  # x
        modulus = tuple(c % p for c in modulus)
        if len(modulus) != degree + 1:
            raise DegreeMismatchError(
                f"modulus has degree {len(modulus) - 1}, expected {degree}")
        if modulus[-1] != 1:
            raise DegreeMismatchError("modulus must be monic")
        if not _pf_is_irreducible(modulus, p):
            raise NotIrreducibleError(f"modulus {list(modulus)} is reducible over GF({p})")
        self.characteristic = p
        self.degree = degree
        self.modulus = modulus
        self.order = p ** degree
        self._mod_mask = sum(1 << i for i, c in enumerate(modulus) if c)
        self._mul_table: np.ndarray | None = None
        self._inv_table: np.ndarray | None = None

    # -- identity / hashing ---------------------------------------------------

    def __eq__(self, other) -> bool:
        return (isinstance(other, Field)
                and self.characteristic == other.characteristic
                and self.modulus == other.modulus)

    def __hash__(self) -> int:
        return hash((self.characteristic, self.modulus))

    def __repr__(self) -> str:
        return f"Field(GF({self.characteristic}^{self.degree}))"

    # -- element <-> label conversion -----------------------------------------

    def encode(self, n: int) -> FieldElement:
        """Base-p digit expansion of an integer label onto coordinates."""
        if not 0 <= n < self.order:
            raise OutOfRangeError(f"label {n} outside [0, {self.order})")
        p = self.characteristic
        coords = []
        for _ in range(self.degree):
            coords.append(n % p)
            n //= p
        return FieldElement(tuple(coords))

    def decode(self, a: FieldElement) -> int:
        self._check(a)
        n = 0
        for c in reversed(a.coords):
            n = n * self.characteristic + c
        return n

    def element(self, coords: Iterable[int]) -> FieldElement:
        coords = tuple(coords)
        if len(coords) != self.degree:
            raise DegreeMismatchError(
                f"expected {self.degree} coordinates, got {len(coords)}")
        if any(not 0 <= c < self.characteristic for c in coords):
            raise OutOfRangeError("coordinates must be reduced mod p")
        return FieldElement(coords)

    def _check(self, a: FieldElement) -> None:
        if len(a.coords) != self.degree:
            raise DegreeMismatchError("element does not belong to this field")

    @property
    def zero(self) -> FieldElement:
        return FieldElement((0,) * self.degree)

    @property
    def one(self) -> FieldElement:
        return self.encode(1)

    @property
    def alpha(self) -> FieldElement:
        """The generator (the class of x) for extension fields."""
        if self.degree == 1:
            return self.one
        return self.encode(self.characteristic)

    # -- label-level arithmetic (fast path) ------------------------------------

    def label_add(self, a: int, b: int) -> int:
        if self.characteristic == 2:
            return a ^ b
        p, r, mul = self.characteristic, 0, 1
        for _ in range(self.degree):
            r += ((a + b) % p) * mul
            a //= p
            b //= p
            mul *= p
        return r

    def label_neg(self, a: int) -> int:
        if self.characteristic == 2:
            return a
        p, r, mul = self.characteristic, 0, 1
        for _ in range(self.degree):
            r += (-a % p) * mul
            a //= p
            mul *= p
        return r

    def label_sub(self, a: int, b: int) -> int:
        return self.label_add(a, self.label_neg(b))

    def label_mul(self, a: int, b: int) -> int:
        p, m = self.characteristic, self.degree
        if m == 1:
            return a * b % p
        if p == 2:
            # carry-less multiply reduced by the modulus bitmask
            mod_mask = self._mod_mask
            r = 0
            while b:
                if b & 1:
                    r ^= a
                a <<= 1
                if a >> m & 1:
                    a ^= mod_mask
                b >>= 1
            return r
        da = self._digits(a)
        db = self._digits(b)
        prod = [0] * (2 * m - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % p
        # reduce by modulus
        for d in range(len(prod) - 1, m - 1, -1):
            f = prod[d]
            if f:
                for k in range(m + 1):
                    prod[d - m + k] = (prod[d - m + k] - f * self.modulus[k]) % p
        n = 0
        for c in reversed(prod[:m]):
            n = n * p + c
        return n

    def label_pow(self, a: int, e: int) -> int:
        if e < 0:
            a = self.label_inv(a)
            e = -e
        r, base = 1, a
        while e:
            if e & 1:
                r = self.label_mul(r, base)
            base = self.label_mul(base, base)
            e >>= 1
        return r

    def label_inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no multiplicative inverse")
        return self.label_pow(a, self.order - 2)

    def _digits(self, n: int) -> list[int]:
        p = self.characteristic
        out = []
        for _ in range(self.degree):
            out.append(n % p)
            n //= p
        return out

    # -- element-level arithmetic ----------------------------------------------

    def add(self, a: FieldElement, b: FieldElement) -> FieldElement:
        return self.encode(self.label_add(self.decode(a), self.decode(b)))

    def sub(self, a: FieldElement, b: FieldElement) -> FieldElement:
        return self.encode(self.label_sub(self.decode(a), self.decode(b)))

    def mul(self, a: FieldElement, b: FieldElement) -> FieldElement:
        return self.encode(self.label_mul(self.decode(a), self.decode(b)))

    def neg(self, a: FieldElement) -> FieldElement:
        return self.encode(self.label_neg(self.decode(a)))

    def inv(self, a: FieldElement) -> FieldElement:
        return self.encode(self.label_inv(self.decode(a)))

    def pow(self, a: FieldElement, e: int) -> FieldElement:
        return self.encode(self.label_pow(self.decode(a), e))

    # -- vectorized tables -----------------------------------------------------

    @property
    def mul_table(self) -> np.ndarray:
        """q x q label multiplication table (lazily built, order <= 4096)."""
        if self._mul_table is None:
            if self.order > _TABLE_LIMIT:
                raise FieldError(f"no dense tables for order {self.order}")
            dtype = np.uint8 if self.order <= 256 else np.uint16
            t = np.zeros((self.order, self.order), dtype=dtype)
            for a in range(1, self.order):
                for b in range(a, self.order):
                    v = self.label_mul(a, b)
                    t[a, b] = v
                    t[b, a] = v
            self._mul_table = t
        return self._mul_table

    @property
    def inv_table(self) -> np.ndarray:
        if self._inv_table is None:
            dtype = np.uint8 if self.order <= 256 else np.uint16
            t = np.zeros(self.order, dtype=dtype)
            for a in range(1, self.order):
                t[a] = self.label_inv(a)
            self._inv_table = t
        return self._inv_table

    def add_labels(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Elementwise label addition for numpy arrays."""
        if self.characteristic == 2:
            return a ^ b
        p = self.characteristic
        out = np.zeros(np.broadcast(a, b).shape, dtype=a.dtype)
        aa, bb, mul = a.astype(np.int64), np.asarray(b, dtype=np.int64), 1
        for _ in range(self.degree):
            out += (((aa + bb) % p) * mul).astype(out.dtype)
            aa //= p
            bb //= p
            mul *= p
        return out

    def neg_labels(self, a: np.ndarray) -> np.ndarray:
        """Elementwise label negation for numpy arrays."""
        if self.characteristic == 2:
            return a
        p = self.characteristic
        out = np.zeros(a.shape, dtype=a.dtype)
        aa, mul = a.astype(np.int64), 1
        for _ in range(self.degree):
            out += (((-aa) % p) * mul).astype(out.dtype)
            aa //= p
            mul *= p
        return out

    # -- serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        return {"p": self.characteristic, "m": self.degree,
                "modulus": list(self.modulus)}

    @classmethod
    def from_dict(cls, d: dict) -> "Field":
        return cls(int(d["p"]), int(d["m"]),
                   [int(c) for c in d["modulus"]] if "modulus" in d else None)


def GF2() -> Field:
    return Field(2, 1)


# GF(2^7) with modulus x^7 + x + 1, the field used by the non-binary fixtures.
def GF128() -> Field:
    return Field(2, 7, [1, 1, 0, 0, 0, 0, 0, 1])
