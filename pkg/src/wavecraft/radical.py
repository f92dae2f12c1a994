"""Exact numbers of the form q0 + sum(q_i * sqrt(r_i)) with rational q_i.

The radicands r_i are squarefree positive integers, so the representation is
unique and equality is structural.  The set is a field (a multiquadratic
extension of Q): inverses are computed by rationalising one prime square
root at a time.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

from .errors import WavecraftError


@lru_cache(maxsize=4096)
def _prime_factors(n: int) -> tuple[int, ...]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out.append(n)
    return tuple(out)


@lru_cache(maxsize=4096)
def _square_split(n: int) -> tuple[int, int]:
    """Return (s, r) with n == s*s*r and r squarefree."""
    if n == 0:
        return 0, 1
    s, r = 1, 1
    m = n
    p = 2
    while p * p <= m:
        k = 0
        while m % p == 0:
            m //= p
            k += 1
        s *= p ** (k // 2)
        if k % 2:
            r *= p
        p += 1 if p == 2 else 2
    r *= m
    return s, r


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


class RadicalNumber:
    __slots__ = ("_terms", "_hash")

    def __init__(self, value=0, _terms=None):
        if _terms is not None:
            self._terms = _terms
        elif isinstance(value, RadicalNumber):
            self._terms = value._terms
        else:
            q = _as_fraction(value)
            self._terms = ((1, q),) if q else ()
        self._hash = None

    @classmethod
    def _from_dict(cls, d: dict) -> "RadicalNumber":
        return cls(_terms=tuple(sorted((r, q) for r, q in d.items() if q)))

    @classmethod
    def sqrt_of(cls, q) -> "RadicalNumber":
        """Square root of a non-negative rational, reduced to canonical form."""
        q = _as_fraction(q)
        if q < 0:
            raise ValueError("square root of a negative rational is not real")
        if q == 0:
            return cls(0)
        n = q.numerator * q.denominator
        s, r = _square_split(n)
        return cls._from_dict({r: Fraction(s, q.denominator)})

    @classmethod
    def coerce(cls, x) -> "RadicalNumber":
        return x if isinstance(x, RadicalNumber) else cls(x)

    # -- structure -------------------------------------------------------
    @property
    def terms(self) -> tuple[tuple[int, Fraction], ...]:
        return self._terms

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and self._terms[0][0] == 1)

    def rational_part(self) -> Fraction:
        for r, q in self._terms:
            if r == 1:
                return q
        return Fraction(0)

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.rational_part()

    def radicands(self) -> tuple[int, ...]:
        return tuple(r for r, _ in self._terms if r != 1)

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        try:
            other = RadicalNumber.coerce(other)
        except TypeError:
            return NotImplemented
        d = dict(self._terms)
        for r, q in other._terms:
            d[r] = d.get(r, 0) + q
        return RadicalNumber._from_dict(d)

    __radd__ = __add__

    def __neg__(self):
        return RadicalNumber(_terms=tuple((r, -q) for r, q in self._terms))

    def __sub__(self, other):
        try:
            other = RadicalNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return RadicalNumber.coerce(other) - self

    def __mul__(self, other):
        try:
            other = RadicalNumber.coerce(other)
        except TypeError:
            return NotImplemented
        d: dict[int, Fraction] = {}
        for r1, q1 in self._terms:
            for r2, q2 in other._terms:
                g = math.gcd(r1, r2)
                r = (r1 // g) * (r2 // g)
                d[r] = d.get(r, 0) + q1 * q2 * g
        return RadicalNumber._from_dict(d)

    __rmul__ = __mul__

    def inverse(self) -> "RadicalNumber":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.is_rational():
            return RadicalNumber(1 / self.rational_part())
        p = self._largest_prime()
        a, b = self._split(p)
        conj = a - b * RadicalNumber.sqrt_of(p)
        norm = a * a - b * b * p
        return conj * norm.inverse()

    def __truediv__(self, other):
        try:
            other = RadicalNumber.coerce(other)
        except TypeError:
            return NotImplemented
        if other.is_rational():
            if other.is_zero():
                raise ZeroDivisionError("division by zero")
            f = 1 / other.rational_part()
            return RadicalNumber(_terms=tuple((r, q * f) for r, q in self._terms))
        return self * other.inverse()

    def __rtruediv__(self, other):
        return RadicalNumber.coerce(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        base = self if n >= 0 else self.inverse()
        result = RadicalNumber(1)
        n = abs(n)
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def _largest_prime(self) -> int:
        return max(p for r in self.radicands() for p in _prime_factors(r))

    def _split(self, p: int) -> tuple["RadicalNumber", "RadicalNumber"]:
        """Write self as a + b*sqrt(p) with a, b free of sqrt(p)."""
        da: dict[int, Fraction] = {}
        db: dict[int, Fraction] = {}
        for r, q in self._terms:
            if r % p == 0:
                db[r // p] = q
            else:
                da[r] = q
        return RadicalNumber._from_dict(da), RadicalNumber._from_dict(db)

    # -- order -----------------------------------------------------------
    def sign(self) -> int:
        if self.is_rational():
            q = self.rational_part()
            return (q > 0) - (q < 0)
        p = self._largest_prime()
        a, b = self._split(p)
        sa, sb = a.sign(), b.sign()
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb if sa == 0 else sa
        return sa * (a * a - b * b * p).sign()

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def sqrt(self) -> "RadicalNumber":
        """Exact non-negative square root, when it lies in the tower.

        Rationals always work.  a + b*sqrt(p) is denested when a**2 - p*b**2 is
        a rational square.
        """
        if self.sign() < 0:
            raise ValueError("square root of a negative number is not real")
        if self.is_rational():
            return RadicalNumber.sqrt_of(self.rational_part())
        rads = self.radicands()
        if len(rads) == 1:
            r = rads[0]
            a, b = self.rational_part(), dict(self._terms)[r]
            disc = a * a - b * b * r
            if disc >= 0:
                d = RadicalNumber.sqrt_of(disc)
                if d.is_rational():
                    d = d.rational_part()
                    x, y = (a + d) / 2, (a - d) / 2
                    if x >= 0 and y >= 0:
                        root = RadicalNumber.sqrt_of(x) + (1 if b > 0 else -1) * RadicalNumber.sqrt_of(y)
                        if root * root == self:
                            return root
        raise WavecraftError(f"square root of {self} does not denest into the radical tower")

    # -- comparison / hashing -------------------------------------------
    def __eq__(self, other):
        if isinstance(other, RadicalNumber):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == RadicalNumber(other)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(self.rational_part())
            else:
                self._hash = hash(self._terms)
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def __float__(self):
        return math.fsum(float(q) * math.sqrt(r) for r, q in self._terms)

    # -- printing --------------------------------------------------------
    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for r, q in self._terms:
            if r == 1:
                parts.append(str(q))
            elif q == 1:
                parts.append(f"sqrt({r})")
            elif q == -1:
                parts.append(f"-sqrt({r})")
            else:
                parts.append(f"{q}*sqrt({r})")
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def __repr__(self):
        return f"RadicalNumber({self})"

    def latex(self) -> str:
        parts = []
        for r, q in self._terms:
            sgn = "-" if q < 0 else "+"
            q = abs(q)
            if r == 1:
                body = str(q.numerator) if q.denominator == 1 else rf"\frac{{{q.numerator}}}{{{q.denominator}}}"
            else:
                root = rf"\sqrt{{{r}}}"
                if q.denominator == 1:
                    body = root if q.numerator == 1 else f"{q.numerator}{root}"
                else:
                    num = root if q.numerator == 1 else f"{q.numerator}{root}"
                    body = rf"\frac{{{num}}}{{{q.denominator}}}"
            parts.append((sgn, body))
        if not parts:
            return "0"
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sgn, body in parts[1:]:
            out += f" {sgn} {body}"
        return out
