"""Exact coefficient rings.

Rationals are ``gmpy2.mpq``.  On top of them this module provides square
classes of Q*, the quadratic fields Q(sqrt d), l-adic valuations and the
truncated Witt rings W(F_{p^s})/p^N for s in {1, 2}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import gmpy2
from gmpy2 import mpq, mpz
from sympy import factorint, primerange

from .errors import (
    InvalidInput,
    NonUnitClass,
    NotEllIntegral,
    PrecisionLoss,
    SingularInput,
    WittMismatch,
    ZeroInput,
)

Rat = type(mpq())


def rat(x) -> mpq:
    """Coerce an int, decimal string ``"p/q"``, Fraction or mpq to mpq."""
    if isinstance(x, Rat):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, (int, type(mpz()))):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        s = x.strip()
        try:
            if "/" in s:
                num, den = s.split("/")
                if int(den) == 0:
                    raise ZeroDivisionError
                return mpq(int(num), int(den))
            return mpq(int(s))
        except (ValueError, ZeroDivisionError):
            raise InvalidInput(f"not a rational literal: {x!r}") from None
    raise InvalidInput(f"cannot read {x!r} as a rational")


def rat_str(x) -> str:
    x = rat(x)
    if x.denominator == 1:
        return str(int(x.numerator))
    return f"{int(x.numerator)}/{int(x.denominator)}"


def rational_sqrt(x) -> mpq | None:
    """Exact square root of a nonnegative rational, or None."""
    x = rat(x)
    if x < 0:
        return None
    num, den = x.numerator, x.denominator
    if gmpy2.is_square(num) and gmpy2.is_square(den):
        return mpq(gmpy2.isqrt(num), gmpy2.isqrt(den))
    return None


# ---------------------------------------------------------------------------
# square classes


_SMALL_PRIMES = tuple(primerange(2, 1 << 14))


@lru_cache(maxsize=4096)
def _squarefree_abs(n: int) -> int:
    # Spinor norms arrive as products of large factor norms whose square
    # class is small, so strip small primes first and only factor a
    # leftover that is not already a square.
    out = 1
    n = mpz(n)
    for prime in _SMALL_PRIMES:
        if prime * prime > n:
            break
        if n % prime == 0:
            n, exp = gmpy2.remove(n, prime)
            if exp % 2:
                out *= prime
    if n == 1 or gmpy2.is_square(n):
        return out
    if gmpy2.is_prime(n):
        return out * int(n)
    for prime, exp in factorint(int(n)).items():
        if exp % 2:
            out *= prime
    return out


def squarefree_part(n: int) -> int:
    """Signed squarefree part of a nonzero integer."""
    n = int(n)
    if n == 0:
        raise ZeroInput("0 has no squarefree part")
    sign = -1 if n < 0 else 1
    if gmpy2.is_square(abs(n)):
        return sign
    return sign * _squarefree_abs(abs(n))


def _is_squarefree(n: int) -> bool:
    return n != 0 and _squarefree_abs(abs(n)) == abs(n)


@dataclass(frozen=True, order=True)
class SquareClass:
    """An element of Q*/(Q*)^2, represented by a signed squarefree integer."""

    representative: int

    def __post_init__(self):
        rep = int(self.representative)
        if not _is_squarefree(rep):
            raise InvalidInput(f"{rep} is not a squarefree nonzero integer")
        object.__setattr__(self, "representative", rep)

    def __mul__(self, other: SquareClass) -> SquareClass:
        return class_mul(self, other)

    @property
    def is_trivial(self) -> bool:
        return self.representative == 1

    def __str__(self):
        return str(self.representative)


def class_mul(c1: SquareClass, c2: SquareClass) -> SquareClass:
    # squarefree a, b: a*b/gcd(a,b)^2 is squarefree, so no factoring is needed
    a, b = c1.representative, c2.representative
    g = math.gcd(a, b)
    return _trusted_class(a * b // (g * g))


def _trusted_class(rep: int) -> SquareClass:
    # skips the squarefree check for values squarefree by construction
    out = object.__new__(SquareClass)
    object.__setattr__(out, "representative", rep)
    return out


def square_class(x) -> SquareClass:
    x = rat(x)
    if x == 0:
        raise ZeroInput("the square class of 0 is undefined")
    num, den = int(x.numerator), int(x.denominator)
    return class_mul(_trusted_class(squarefree_part(num)), _trusted_class(squarefree_part(den)))


def ell_valuation(x, ell: int) -> int | float:
    """l-adic valuation; ``math.inf`` for zero."""
    x = rat(x)
    if x == 0:
        return math.inf
    num, den = x.numerator, x.denominator
    v = 0
    while num % ell == 0:
        num //= ell
        v += 1
    while den % ell == 0:
        den //= ell
        v -= 1
    return v


def legendre(a: int, p: int) -> int:
    return int(gmpy2.legendre(a, p))


def class_in_local_units(c: SquareClass, local, *, residue_closed: bool = False) -> bool:
    """Is the class ``c`` a square in the local unit group?

    ``local`` is a prime l (meaning Z_l) or a pair ``(p, s)`` meaning
    W(F_{p^s}).  With ``residue_closed`` every unit is a square (p odd).
    """
    rep = c.representative
    if isinstance(local, tuple):
        p, s = local
        if p == 2:
            raise InvalidInput("Witt rings are only supported for odd p")
        if rep % p == 0:
            raise NonUnitClass(f"{rep} has odd {p}-adic valuation")
        if residue_closed or s % 2 == 0:
            # F_p* sits inside the squares of F_{p^2}
            return True
        return legendre(rep, p) == 1
    ell = int(local)
    if rep % ell == 0:
        raise NonUnitClass(f"{rep} has odd {ell}-adic valuation")
    if residue_closed:
        return True
    if ell == 2:
        return rep % 8 == 1
    return legendre(rep, ell) == 1


# ---------------------------------------------------------------------------
# Q(sqrt d)


class QuadScalar:
    """a + b*sqrt(d) with a, b rational and d squarefree, d != 0, 1."""

    __slots__ = ("d", "a", "b")

    def __init__(self, d: int, a=0, b=0):
        self.d = int(d)
        self.a = rat(a)
        self.b = rat(b)

    @classmethod
    def sqrt_of(cls, d: int) -> QuadScalar:
        return cls(d, 0, 1)

    def _coerce(self, other):
        if isinstance(other, QuadScalar):
            if other.d != self.d:
                raise InvalidInput(f"mixing Q(sqrt {self.d}) with Q(sqrt {other.d})")
            return other
        if isinstance(other, (int, Rat, type(mpz()), Fraction)):
            return QuadScalar(self.d, other, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadScalar(self.d, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QuadScalar(self.d, -self.a, -self.b)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadScalar(self.d, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadScalar(self.d, self.a * o.a + self.d * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def conj(self) -> QuadScalar:
        return QuadScalar(self.d, self.a, -self.b)

    def norm(self) -> mpq:
        return self.a * self.a - self.d * self.b * self.b

    def inverse(self) -> QuadScalar:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("QuadScalar division by zero")
        return QuadScalar(self.d, self.a / n, -self.b / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out, base = QuadScalar(self.d, 1, 0), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.d, self.a, self.b))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def sign_key(self) -> int:
        """Sign used for normalization: sign of a, then of b."""
        if self.a != 0:
            return 1 if self.a > 0 else -1
        if self.b != 0:
            return 1 if self.b > 0 else -1
        return 0

    def sqrt(self) -> QuadScalar | None:
        """A square root inside Q(sqrt d), or None when there is none."""
        if self.b == 0:
            r = rational_sqrt(self.a)
            if r is not None:
                return QuadScalar(self.d, r, 0)
            u = rational_sqrt(self.a / self.d)
            if u is not None:
                return QuadScalar(self.d, 0, u)
            return None
        m = rational_sqrt(self.norm())
        if m is None:
            return None
        for cand in ((self.a + m) / 2, (self.a - m) / 2):
            u = rational_sqrt(cand)
            if u is not None and u != 0:
                root = QuadScalar(self.d, u, self.b / (2 * u))
                if root * root == self:
                    return root
        return None

    def __str__(self):
        if self.b == 0:
            return rat_str(self.a)
        return f"{rat_str(self.a)}+{rat_str(self.b)}*sqrt({self.d})"

    __repr__ = __str__


def quad_from_str(text: str, d: int) -> QuadScalar:
    """Parse ``"a"``, ``"a+b*sqrt(d)"`` back into a QuadScalar."""
    s = text.strip()
    if "sqrt" not in s:
        return QuadScalar(d, rat(s), 0)
    head, _, tail = s.partition("*sqrt(")
    if int(tail.rstrip(")")) != d:
        raise InvalidInput(f"{text!r} is not in Q(sqrt {d})")
    # the rational part may itself be negative: split on the last '+'
    idx = head.rfind("+")
    if idx <= 0:
        raise InvalidInput(f"malformed quadratic literal {text!r}")
    return QuadScalar(d, rat(head[:idx]), rat(head[idx + 1 :]))


# ---------------------------------------------------------------------------
# truncated Witt rings


def _smallest_nonresidue(p: int) -> int:
    if p % 4 == 3:
        return p - 1  # -1; gives the modulus u^2 + 1
    for a in range(2, p):
        if legendre(a, p) == -1:
            return a
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class WittRing:
    """W(F_{p^s}) / p^N presented as (Z/p^N)[u] / (u^2 - nu) when s = 2.

    ``nu`` is -1 for p = 3 mod 4 and the least quadratic nonresidue
    otherwise, so the Frobenius lift is exactly u -> -u.
    """

    p: int
    s: int
    N: int

    def __post_init__(self):
        if self.p < 3 or not gmpy2.is_prime(self.p):
            raise InvalidInput(f"Witt rings need an odd prime, got {self.p}")
        if self.s not in (1, 2):
            raise InvalidInput("residue degree must be 1 or 2")
        if self.N < 1:
            raise InvalidInput("precision must be at least 1")

    @property
    def modulus(self) -> int:
        return self.p**self.N

    @property
    def nu(self) -> int:
        if self.s == 1:
            return 0
        nu = _smallest_nonresidue(self.p)
        return -1 if nu == self.p - 1 else nu

    def __call__(self, *coeffs) -> WittScalar:
        if len(coeffs) == 1 and isinstance(coeffs[0], (list, tuple)):
            coeffs = tuple(coeffs[0])
        if len(coeffs) > self.s:
            raise InvalidInput(f"too many coefficients for s={self.s}")
        padded = tuple(int(c) for c in coeffs) + (0,) * (self.s - len(coeffs))
        return WittScalar(self, padded)

    def zero(self) -> WittScalar:
        return self(0)

    def one(self) -> WittScalar:
        return self(1)

    def u(self) -> WittScalar:
        if self.s == 1:
            raise InvalidInput("u only exists for s = 2")
        return self(0, 1)

    def with_precision(self, N: int) -> WittRing:
        return WittRing(self.p, self.s, N)

    def residue_elements(self):
        """All residue-field elements as coefficient tuples (including 0)."""
        p = self.p
        if self.s == 1:
            return [(a,) for a in range(p)]
        return [(a, b) for b in range(p) for a in range(p)]

    def descriptor(self) -> dict:
        return {"p": self.p, "s": self.s, "N": self.N}


class WittScalar:
    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: WittRing, coeffs: tuple):
        m = ring.modulus
        self.ring = ring
        self.coeffs = tuple(c % m for c in coeffs)

    def _coerce(self, other):
        if isinstance(other, WittScalar):
            if other.ring != self.ring:
                raise WittMismatch(f"{other.ring} vs {self.ring}")
            return other
        if isinstance(other, (int, type(mpz()))):
            return self.ring(int(other))
        if isinstance(other, Rat):
            if other.denominator % self.ring.p == 0:
                raise NotEllIntegral(f"{other} is not p-integral")
            return self.ring(int(other.numerator)) * self.ring(int(other.denominator)).inverse()
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return WittScalar(self.ring, tuple(x + y for x, y in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return WittScalar(self.ring, tuple(-x for x in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return WittScalar(self.ring, tuple(x - y for x, y in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.ring.s == 1:
            return WittScalar(self.ring, (self.coeffs[0] * o.coeffs[0],))
        a0, a1 = self.coeffs
        b0, b1 = o.coeffs
        nu = self.ring.nu
        return WittScalar(self.ring, (a0 * b0 + nu * a1 * b1, a0 * b1 + a1 * b0))

    __rmul__ = __mul__

    def conj(self) -> WittScalar:
        if self.ring.s == 1:
            return self
        return WittScalar(self.ring, (self.coeffs[0], -self.coeffs[1]))

    def norm(self) -> int:
        """Norm down to Z/p^N (the coefficient itself when s = 1)."""
        if self.ring.s == 1:
            return self.coeffs[0]
        a0, a1 = self.coeffs
        return (a0 * a0 - self.ring.nu * a1 * a1) % self.ring.modulus

    def is_unit(self) -> bool:
        return self.norm() % self.ring.p != 0

    def inverse(self) -> WittScalar:
        if not self.is_unit():
            raise ZeroDivisionError(f"{self} is not a unit")
        inv = pow(self.norm(), -1, self.ring.modulus)
        if self.ring.s == 1:
            return WittScalar(self.ring, (inv,))
        c = self.conj()
        return WittScalar(self.ring, tuple(x * inv for x in c.coeffs))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out, base = self.ring.one(), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except InvalidInput:
            return False
        if o is NotImplemented:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        if all(c == 0 for c in self.coeffs[1:]):
            return hash(self.coeffs[0]) ^ hash(self.ring)
        return hash((self.ring, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def valuation(self) -> int | float:
        """p-adic valuation capped by the precision; inf for zero."""
        if not any(self.coeffs):
            return math.inf
        p, v = self.ring.p, 0
        cs = self.coeffs
        while all(c % p == 0 for c in cs):
            cs = tuple(c // p for c in cs)
            v += 1
        return v

    def residue(self) -> tuple:
        return tuple(c % self.ring.p for c in self.coeffs)

    def frobenius(self) -> WittScalar:
        return self.conj()

    def truncate(self, N: int) -> WittScalar:
        if N > self.ring.N:
            raise InvalidInput("cannot raise precision by truncation")
        return WittScalar(self.ring.with_precision(N), self.coeffs)

    def lift_precision(self, N: int) -> WittScalar:
        """Same coefficients read in a finer ring (an arbitrary lift)."""
        return WittScalar(self.ring.with_precision(N), self.coeffs)

    def divide_by_p(self) -> WittScalar:
        """x/p at precision N-1; x must be divisible by p."""
        p = self.ring.p
        if self.ring.N <= 1:
            raise PrecisionLoss("dividing by p would leave precision 0")
        if any(c % p for c in self.coeffs):
            raise NotEllIntegral(f"{self} is not divisible by {p}")
        return WittScalar(self.ring.with_precision(self.ring.N - 1), tuple(c // p for c in self.coeffs))

    def to_json(self) -> dict:
        return {**self.ring.descriptor(), "coeffs": list(self.coeffs)}

    def __str__(self):
        if self.ring.s == 1:
            return str(self.coeffs[0])
        return f"{self.coeffs[0]}+{self.coeffs[1]}u"

    __repr__ = __str__


def witt_from_json(obj, ring: WittRing | None = None) -> WittScalar:
    """Read ``{"p","s","N","coeffs"}``, a bare coefficient list, or an int."""
    if isinstance(obj, dict):
        r = WittRing(int(obj["p"]), int(obj["s"]), int(obj["N"]))
        if ring is not None and r != ring:
            raise WittMismatch(f"{r} vs {ring}")
        return r(*[int(c) for c in obj["coeffs"]])
    if ring is None:
        raise InvalidInput("a bare Witt coefficient needs a ring descriptor")
    if isinstance(obj, (list, tuple)):
        return ring(*[int(c) for c in obj])
    return ring(int(obj))


def witt_frobenius(x: WittScalar) -> WittScalar:
    return x.frobenius()


def _residue_pow(ring: WittRing, r: tuple, k: int) -> tuple:
    field = ring.with_precision(1)
    return (field(*r) ** k).coeffs


def teichmueller(r, ring: WittRing) -> WittScalar:
    """Teichmueller lift of a nonzero residue ``r`` (int or coefficient tuple)."""
    if isinstance(r, WittScalar):
        r = r.residue()
    if isinstance(r, int):
        r = (r,)
    r = tuple(int(c) % ring.p for c in r)
    if not any(r):
        raise ZeroInput("0 has no Teichmueller lift in the unit group")
    q = ring.p**ring.s
    x = ring(*r)
    for _ in range(ring.N):
        x = x**q
    return x


def witt_sqrt(x: WittScalar) -> WittScalar | None:
    """Square root of a unit of W/p^N (p odd), or None if the residue is a nonsquare."""
    ring = x.ring
    if not x.is_unit():
        raise NonUnitClass(f"{x} is not a unit")
    field = ring.with_precision(1)
    target = field(*x.residue())
    root = None
    for cand in ring.residue_elements():
        y = field(*cand)
        if y * y == target:
            root = cand
            break
    if root is None:
        return None
    y = ring(*root)
    half = ring(2).inverse()
    for _ in range(ring.N):
        y = (y + x / y) * half
    assert y * y == x
    return y


# ---------------------------------------------------------------------------
# l-local integrality of matrices


@dataclass(frozen=True)
class LocalIntegralityReport:
    prime: int
    min_valuation: int | float
    integral: bool
    unimodular: bool

    def to_json(self) -> dict:
        mv = self.min_valuation
        return {
            "prime": self.prime,
            "min_valuation": None if mv == math.inf else int(mv),
            "integral": self.integral,
            "unimodular": self.unimodular,
        }


def local_integrality(matrix, ell: int) -> LocalIntegralityReport:
    """Integrality of a rational matrix over Z_(l), with and without inverse."""
    from .linalg import inverse

    vals = [ell_valuation(x, ell) for row in matrix for x in row]
    mv = min(vals)
    integral = mv >= 0
    unimodular = False
    if integral:
        try:
            inv = inverse(matrix)
        except SingularInput:
            inv = None
        if inv is not None:
            unimodular = all(ell_valuation(x, ell) >= 0 for row in inv for x in row)
    return LocalIntegralityReport(ell, mv, integral, unimodular)
