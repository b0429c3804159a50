"""Exact arithmetic substrate: places of Q and of quadratic fields, factorization,
Legendre and Hilbert symbols, local square tests.

Everything here is computed with exact integer / rational arithmetic.  All public
functions are pure; memoization is internal and invisible to callers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering


class DomainError(ValueError):
    """Raised when an argument is outside the mathematical domain of an operation."""


Rational = Fraction | int

# ---------------------------------------------------------------------------
# primality and factorization
# ---------------------------------------------------------------------------

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond the 2**63 input cap."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    """Brent's variant; returns a nontrivial factor of composite odd n."""
    if n % 2 == 0:
        return 2
    for c in range(1, 100):
        x, y, d = 2, 2, 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
    raise ArithmeticError(f"rho failed on {n}")  # pragma: no cover


@lru_cache(maxsize=65536)
def _factor_positive(n: int) -> tuple[tuple[int, int], ...]:
    factors: dict[int, int] = {}
    for p in (2, 3, 5):
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    # trial division on a 6k+-1 wheel, then rho for the hard tail
    f = 7
    while f * f <= n and f < 1 << 16:
        for step in (0, 4):
            d = f + step
            while n % d == 0:
                factors[d] = factors.get(d, 0) + 1
                n //= d
        f += 6
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            factors[m] = factors.get(m, 0) + 1
            continue
        d = _pollard_rho(m)
        stack.extend((d, m // d))
    return tuple(sorted(factors.items()))


def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Factor |n| into sorted (prime, exponent) pairs.  The sign is the caller's
    business; factorize(-1) == ()."""
    if n == 0:
        raise DomainError("cannot factor 0")
    return _factor_positive(abs(n))


def squarefree_part(x: Rational) -> int:
    """The squarefree integer representing the square class of a nonzero rational."""
    x = Fraction(x)
    if x == 0:
        raise DomainError("0 has no square class")
    n = x.numerator * x.denominator
    s = -1 if n < 0 else 1
    for p, e in factorize(n):
        if e % 2:
            s *= p
    return s


def is_rational_square(x: Rational) -> bool:
    x = Fraction(x)
    if x < 0:
        return False
    if x == 0:
        return True
    rn = math.isqrt(x.numerator)
    rd = math.isqrt(x.denominator)
    return rn * rn == x.numerator and rd * rd == x.denominator


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) in {-1, 0, 1} for an odd prime p."""
    if p == 2 or not is_prime(p):
        raise DomainError(f"{p} is not an odd prime")
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def valuation(x: Rational, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    x = Fraction(x)
    if x == 0:
        raise DomainError("valuation of 0")
    v = 0
    n = x.numerator
    while n % p == 0:
        n //= p
        v += 1
    d = x.denominator
    while d % p == 0:
        d //= p
        v -= 1
    return v


# ---------------------------------------------------------------------------
# places of Q
# ---------------------------------------------------------------------------


@total_ordering
@dataclass(frozen=True)
class Place:
    """A place of Q: the real place (p is None) or a finite prime."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None and not is_prime(self.p):
            raise DomainError(f"{self.p} is not prime")

    @staticmethod
    def real() -> "Place":
        return Place(None)

    @staticmethod
    def finite(p: int) -> "Place":
        return Place(p)

    @property
    def is_real(self) -> bool:
        return self.p is None

    def _key(self):
        return (0, 0) if self.p is None else (1, self.p)

    def __lt__(self, other: "Place") -> bool:
        return self._key() < other._key()

    def __str__(self) -> str:
        return "inf" if self.p is None else str(self.p)


INF = Place.real()


def _symbol_at_p(p: int, va: int, ua: int, vb: int, ub: int) -> int:
    """Hilbert symbol from valuations and unit parts; ua, ub need only be correct
    mod p (odd p) or mod 8 (p = 2)."""
    if p == 2:
        eps_a, eps_b = (ua - 1) // 2 % 2, (ub - 1) // 2 % 2
        om_a, om_b = (ua * ua - 1) // 8 % 2, (ub * ub - 1) // 8 % 2
        e = eps_a * eps_b + va * om_b + vb * om_a
        return -1 if e % 2 else 1
    e = va * vb * ((p - 1) // 2)
    sign = -1 if e % 2 else 1
    if vb % 2:
        sign *= legendre(ua, p)
    if va % 2:
        sign *= legendre(ub, p)
    return sign


def hilbert_q(a: Rational, b: Rational, v: Place) -> int:
    """Hilbert symbol (a, b)_v over the completion of Q at v: +1 iff
    z^2 = a*x^2 + b*y^2 has a nontrivial solution there."""
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise DomainError("hilbert symbol needs nonzero arguments")
    if v.is_real:
        return -1 if (a < 0 and b < 0) else 1
    p = v.p
    # replace by squarefree representatives; the symbol only sees square classes
    sa, sb = squarefree_part(a), squarefree_part(b)
    va, vb = (1 if sa % p == 0 else 0), (1 if sb % p == 0 else 0)
    ua, ub = sa // p if va else sa, sb // p if vb else sb
    return _symbol_at_p(p, va, ua % (8 if p == 2 else p), vb, ub % (8 if p == 2 else p))


def hilbert_relevant_places(a: Rational, b: Rational) -> list[Place]:
    """Places where (a, b)_v can be nontrivial: the real place and primes
    dividing 2ab (on squarefree representatives)."""
    primes = {2}
    for x in (a, b):
        primes.update(p for p, _ in factorize(squarefree_part(x)))
    return [INF] + [Place.finite(p) for p in sorted(primes)]


def hilbert_reciprocity_defect(a: Rational, b: Rational) -> int:
    """Product of the local symbols over every place that can be nontrivial.
    Contract: always +1."""
    prod = 1
    for v in hilbert_relevant_places(a, b):
        prod *= hilbert_q(a, b, v)
    return prod


# ---------------------------------------------------------------------------
# quadratic fields Q(sqrt(m))
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadField:
    """The quadratic field Q(sqrt(m)) for a squarefree integer m not in {0, 1}."""

    m: int

    def __post_init__(self):
        if self.m in (0, 1):
            raise DomainError("m must not be 0 or 1")
        if any(e > 1 for _, e in factorize(self.m)):
            raise DomainError(f"{self.m} is not squarefree")

    @property
    def is_real(self) -> bool:
        return self.m > 0

    @property
    def discriminant(self) -> int:
        return self.m if self.m % 4 == 1 else 4 * self.m

    def __call__(self, a: Rational, b: Rational = 0) -> "QuadFieldElement":
        return QuadFieldElement(Fraction(a), Fraction(b), self)

    def sqrt_gen(self) -> "QuadFieldElement":
        return QuadFieldElement(Fraction(0), Fraction(1), self)

    def __str__(self) -> str:
        return f"Q(sqrt({self.m}))"


@dataclass(frozen=True)
class QuadFieldElement:
    """a + b*sqrt(m), with exact rational coordinates."""

    a: Fraction
    b: Fraction
    field: QuadField

    def _coerce(self, other) -> "QuadFieldElement | None":
        if isinstance(other, QuadFieldElement):
            if other.field != self.field:
                raise DomainError("mixed quadratic fields")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadFieldElement(Fraction(other), Fraction(0), self.field)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadFieldElement(self.a + o.a, self.b + o.b, self.field)

    __radd__ = __add__

    def __neg__(self):
        return QuadFieldElement(-self.a, -self.b, self.field)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        m = self.field.m
        return QuadFieldElement(
            self.a * o.a + m * self.b * o.b, self.a * o.b + self.b * o.a, self.field
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError
        c = self * o.conjugate()
        return QuadFieldElement(c.a / n, c.b / n, self.field)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        return o / self

    def conjugate(self) -> "QuadFieldElement":
        return QuadFieldElement(self.a, -self.b, self.field)

    def norm(self) -> Fraction:
        return self.a * self.a - self.field.m * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    def sign_at(self, embedding: int) -> int:
        """Sign under the real embedding sending sqrt(m) to +|sqrt(m)| (1) or
        -|sqrt(m)| (2).  Exact: compares a^2 with m*b^2."""
        if self.field.m < 0:
            raise DomainError("no real embeddings for imaginary fields")
        if embedding not in (1, 2):
            raise DomainError("embedding index must be 1 or 2")
        if self.is_zero():
            return 0
        b = self.b if embedding == 1 else -self.b
        if self.a == 0:
            return 1 if b > 0 else -1
        if b == 0 or (self.a > 0) == (b > 0):
            return 1 if self.a > 0 else -1
        # opposite signs: the larger of a^2, m*b^2 wins
        return (1 if self.a > 0 else -1) * (1 if self.a * self.a > self.field.m * b * b else -1)

    def __str__(self) -> str:
        return f"{self.a}+{self.b}r"

    __repr__ = __str__


def quad_element(field: QuadField, x) -> QuadFieldElement:
    if isinstance(x, QuadFieldElement):
        if x.field != field:
            raise DomainError("element of a different field")
        return x
    return field(Fraction(x))


# ---------------------------------------------------------------------------
# places of a quadratic field
# ---------------------------------------------------------------------------

SPLIT, INERT, RAMIFIED = "split", "inert", "ram"


def prime_splitting(p: int, K: QuadField) -> str:
    """Splitting behaviour of p in Q(sqrt(m))."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    m = K.m
    if p == 2:
        if m % 2 == 0 or m % 4 == 3:
            return RAMIFIED
        return SPLIT if m % 8 == 1 else INERT
    if m % p == 0:
        return RAMIFIED
    return SPLIT if legendre(m, p) == 1 else INERT


@total_ordering
@dataclass(frozen=True)
class PlaceK:
    """A place of Q(sqrt(m)): a real embedding or a prime ideal with its
    splitting type.  For a split p the two ideals are labelled 1 and 2 by the
    canonical choice of sqrt(m) in Z_p (see split_root)."""

    field: QuadField
    kind: str  # "inf" | "split" | "inert" | "ram"
    p: int | None = None
    index: int | None = None  # 1 or 2 for real embeddings and split ideals

    def __post_init__(self):
        if self.kind == "inf":
            if not self.field.is_real:
                raise DomainError("no real embeddings when m < 0")
            if self.index not in (1, 2):
                raise DomainError("real embedding index must be 1 or 2")
        elif self.kind in (SPLIT, INERT, RAMIFIED):
            if self.p is None or prime_splitting(self.p, self.field) != self.kind:
                raise DomainError(f"{self.p} does not have type {self.kind} in {self.field}")
            if self.kind == SPLIT and self.index not in (1, 2):
                raise DomainError("split ideal index must be 1 or 2")
        else:
            raise DomainError(f"unknown place kind {self.kind!r}")

    @property
    def is_real(self) -> bool:
        return self.kind == "inf"

    @property
    def local_degree(self) -> int:
        return 1 if self.kind in ("inf", SPLIT) else 2

    @property
    def residue_degree(self) -> int:
        return 2 if self.kind == INERT else 1

    @property
    def residue_char(self) -> int | None:
        return self.p

    def conjugate(self) -> "PlaceK":
        if self.kind in ("inf", SPLIT):
            return PlaceK(self.field, self.kind, self.p, 3 - self.index)
        return self

    def underlying(self) -> Place:
        return INF if self.kind == "inf" else Place.finite(self.p)

    def _key(self):
        if self.kind == "inf":
            return (0, 0, 0, self.index)
        order = {SPLIT: 0, INERT: 1, RAMIFIED: 2}
        return (1, self.p, order[self.kind], self.index or 0)

    def __lt__(self, other: "PlaceK") -> bool:
        return self._key() < other._key()

    def __str__(self) -> str:
        if self.kind == "inf":
            return f"inf{self.index}"
        if self.kind == SPLIT:
            return f"{self.p}:split:{self.index}"
        return f"{self.p}:{'inert' if self.kind == INERT else 'ram'}"


def places_above(v: Place, K: QuadField) -> list[PlaceK]:
    """The places of K over a place of Q (empty for the real place of an
    imaginary field)."""
    if v.is_real:
        if not K.is_real:
            return []
        return [PlaceK(K, "inf", index=1), PlaceK(K, "inf", index=2)]
    t = prime_splitting(v.p, K)
    if t == SPLIT:
        return [PlaceK(K, SPLIT, v.p, 1), PlaceK(K, SPLIT, v.p, 2)]
    return [PlaceK(K, t, v.p)]


@lru_cache(maxsize=4096)
def split_root(m: int, p: int, precision: int) -> int:
    """The canonical root r of x^2 = m mod p^precision labelling the first
    ideal over a split prime: the smaller lift mod p for odd p, the lift
    congruent to 1 mod 4 for p = 2."""
    if p == 2:
        # m = 1 mod 8; both 2-adic roots are odd, one is 1 mod 4
        r = 1
        for k in range(3, precision):
            if (r * r - m) % (1 << (k + 1)):
                r += 1 << (k - 1)
        r %= 1 << precision
        if r % 4 != 1:
            r = (1 << precision) - r
        return r
    r = min(x for x in range(1, p) if (x * x - m) % p == 0)
    pk = p
    while pk < p**precision:
        pk = pk * pk
        inv = pow(2 * r, -1, pk)
        r = (r - (r * r - m) * inv) % pk
    r %= p**precision
    # keep the branch whose reduction mod p is the smaller lift
    if r % p > p - (r % p):
        r = p**precision - r
    return r


# ---------------------------------------------------------------------------
# valuations and integral structure
# ---------------------------------------------------------------------------


def _omega_coords(x: QuadFieldElement) -> tuple[Fraction, Fraction]:
    """Coordinates of x in the integral basis (1, w) of O_K, where w = sqrt(m)
    or (1 + sqrt(m))/2 for m = 1 mod 4."""
    m = x.field.m
    if m % 4 == 1:
        return x.a - x.b, 2 * x.b
    return x.a, x.b


def _from_omega(K: QuadField, s: Rational, t: Rational) -> QuadFieldElement:
    s, t = Fraction(s), Fraction(t)
    if K.m % 4 == 1:
        return QuadFieldElement(s + t / 2, t / 2, K)
    return QuadFieldElement(s, t, K)


def is_integral(x: QuadFieldElement) -> bool:
    s, t = _omega_coords(x)
    return s.denominator == 1 and t.denominator == 1


def uniformizer(w: PlaceK) -> QuadFieldElement:
    """An exact element of K with valuation 1 at the finite place w."""
    K = w.field
    if w.kind in (SPLIT, INERT):
        return K(w.p)
    m = K.m
    if m % w.p == 0:
        return K.sqrt_gen()  # norm -m has valuation 1 at p
    # ramified over 2 with m = 3 mod 4: norm(1 + sqrt m) = 1 - m = 2 mod 4
    return K(1) + K.sqrt_gen()


def val_k(x: QuadFieldElement, w: PlaceK) -> int:
    """Valuation of nonzero x at the finite place w (normalized: val(pi) = 1)."""
    if x.is_zero():
        raise DomainError("valuation of 0")
    p = w.p
    if w.kind == INERT:
        vn = valuation(x.norm(), p)
        assert vn % 2 == 0
        return vn // 2
    if w.kind == RAMIFIED:
        return valuation(x.norm(), p)
    # split: valuation of the image in Q_p under the labelled embedding
    v, _ = _split_image(x, w)
    return v


def _split_image(x: QuadFieldElement, w: PlaceK, extra: int = 4) -> tuple[int, int]:
    """(valuation, unit part mod p^extra) of the image of x in Q_p at a split
    place.  Exact: precision is raised until the valuation is resolved."""
    p = w.p
    den = (x.a.denominator * x.b.denominator)
    y = x * den * den  # same square class; p-integral coordinates
    bound = valuation(y.norm(), p) if not y.is_zero() else 0
    N = bound + extra + 3
    while True:
        r = split_root(x.field.m, p, N)
        if w.index == 2:
            r = p**N - r
        img = (y.a.numerator * y.b.denominator + y.b.numerator * y.a.denominator * r)
        img %= p**N
        if img != 0:
            v = 0
            while img % p == 0:
                img //= p
                v += 1
            vden = valuation(Fraction(y.a.denominator * y.b.denominator), p)
            return v - vden - 2 * valuation(den, p), img % p**extra
        N += extra + 3  # pragma: no cover


@lru_cache(maxsize=4096)
def _ideal_power_lattice(m: int, kind: str, p: int, k: int) -> tuple[int, int, int]:
    """HNF (d1, c; 0, d2) of the ideal P^k at the nonsplit place, as a
    sublattice of O_K = Z + Z*w.  Index p^(f*k)."""
    K = QuadField(m)
    if k == 0:
        return (1, 0, 1)
    if kind == INERT:
        q = p**k
        return (q, 0, q)
    # ramified: P^2 = (p), P = (p, pi) for any pi of valuation 1
    j, r = divmod(k, 2)
    if r == 0:
        q = p**j
        return (q, 0, q)
    w = PlaceK(K, kind, p)
    pi = uniformizer(w)
    if m % 4 == 1:
        wgen = _from_omega(K, 0, 1)
    else:
        wgen = K.sqrt_gen()
    pj = p**j
    gens = []
    for x in (K(p), K(p) * wgen, pi, pi * wgen):
        s, t = _omega_coords(x * pj)
        gens.append((int(s), int(t)))
    lat = _hnf_generic(gens)
    assert lat[0] * lat[2] == p ** (2 * j + 1)
    return lat


def _hnf_generic(gens: list[tuple[int, int]]) -> tuple[int, int, int]:
    """HNF (d1, c; 0, d2) of the full-rank lattice spanned by integer pairs."""
    vecs = [list(g) for g in gens if g != (0, 0)]
    # reduce second coordinates to a single pivot by gcd elimination
    pivot = None
    firsts = []
    for v in vecs:
        if pivot is None:
            pivot = v
            continue
        a2, b2 = v
        a1, b1 = pivot
        while b2 != 0:
            if b1 == 0 or abs(b2) < abs(b1):
                a1, a2, b1, b2 = a2, a1, b2, b1
            q = b2 // b1
            a2, b2 = a2 - q * a1, b2 - q * b1
        pivot = [a1, b1]
        if a2:
            firsts.append(abs(a2))
    assert pivot is not None and pivot[1] != 0 and firsts
    d1 = 0
    for x in firsts:
        d1 = math.gcd(d1, x)
    a1, b1 = pivot
    if b1 < 0:
        a1, b1 = -a1, -b1
    return (d1, a1 % d1, b1)


class _NonsplitContext:
    """Integer-only residue arithmetic of O_K modulo powers of the prime
    ideal P at a nonsplit finite place, with exact square-residue tests."""

    def __init__(self, m: int, kind: str, p: int):
        self.K = QuadField(m)
        self.w = PlaceK(self.K, kind, p)
        self.kind, self.p = kind, p
        tv = 0 if p != 2 else (1 if kind == INERT else 2)
        self.T = 2 * tv + 1  # local square theorem precision
        self.vmax = 2 * tv  # largest valuation of t^2 - u for a unit nonsquare u
        self.P = 3 * tv + 1  # enumeration precision for norm values
        self.Kprec = self.vmax + 1 + self.T
        if m % 4 == 1:
            self.D, self.half = (m - 1) // 4, True
        else:
            self.D, self.half = m, False
        s, t = _omega_coords(uniformizer(self.w))
        self.pi_coords = (int(s), int(t))
        self._square_sets: dict[int, frozenset] = {}

    def lattice(self, k: int):
        return _ideal_power_lattice(self.K.m, self.kind, self.p, k)

    def mul(self, x: tuple[int, int], y: tuple[int, int]) -> tuple[int, int]:
        s1, t1 = x
        s2, t2 = y
        return (
            s1 * s2 + self.D * t1 * t2,
            s1 * t2 + t1 * s2 + (t1 * t2 if self.half else 0),
        )

    def reduce(self, x: tuple[int, int], k: int) -> tuple[int, int]:
        d1, c, d2 = self.lattice(k)
        s, t = x
        q = t // d2
        s, t = s - q * c, t - q * d2
        return s % d1, t

    def in_power(self, x: tuple[int, int], k: int) -> bool:
        return self.reduce(x, k) == (0, 0)

    def val_from_coords(self, x: tuple[int, int], bound: int) -> int:
        """Valuation of a residue known to have valuation < bound."""
        v = 0
        while v < bound and self.in_power(x, v + 1):
            v += 1
        if v >= bound:
            raise ArithmeticError("valuation exceeds residue precision")
        return v

    def residues(self, k: int):
        d1, _, d2 = self.lattice(k)
        for s in range(d1):
            for t in range(d2):
                yield (s, t)

    def square_set(self, k: int) -> frozenset:
        """All residues of squares mod P^k."""
        cached = self._square_sets.get(k)
        if cached is None:
            cached = frozenset(self.reduce(self.mul(x, x), k) for x in self.residues(k))
            self._square_sets[k] = cached
        return cached

    def is_square_residue(self, z: tuple[int, int], vbound: int) -> bool:
        """Is a residue (valuation < vbound, known mod P^(vbound+T)) the
        residue of a local square?  z of valuation v is a square iff it is
        congruent to a square mod P^(v+T)."""
        v = self.val_from_coords(z, vbound)
        if v % 2:
            return False
        k = v + self.T
        return self.reduce(z, k) in self.square_set(k)

    def element_residue(self, x: QuadFieldElement, k: int) -> tuple[int, int]:
        s, t = _omega_coords(x)
        assert s.denominator == 1 and t.denominator == 1
        return self.reduce((int(s), int(t)), k)

    def is_square_element(self, x: QuadFieldElement) -> bool:
        """Exact local squareness for a nonzero element of any valuation."""
        y = _normalize_for_symbol(x, self.w)
        return self.is_square_residue(self.element_residue(y, 2 + self.T), 2)


@lru_cache(maxsize=64)
def _nonsplit_ctx(m: int, kind: str, p: int) -> _NonsplitContext:
    return _NonsplitContext(m, kind, p)


def is_local_square(x, w) -> bool:
    """Is x a nonzero square in the completion at w?  Accepts rationals at a
    Place and rationals or field elements at a PlaceK."""
    if isinstance(w, Place):
        x = Fraction(x)
        if x == 0:
            raise DomainError("0 is not classified")
        if w.is_real:
            return x > 0
        s = squarefree_part(x)
        if s == 1:
            return True
        if s % w.p == 0:
            return False
        return (s % 8 == 1) if w.p == 2 else legendre(s, w.p) == 1
    K = w.field
    x = quad_element(K, x)
    if x.is_zero():
        raise DomainError("0 is not classified")
    if w.is_real:
        return x.sign_at(w.index) > 0
    if w.kind == SPLIT:
        v, u = _split_image(x, w)
        if v % 2:
            return False
        return (u % 8 == 1) if w.p == 2 else legendre(u, w.p) == 1
    d = x.a.denominator * x.b.denominator
    x = x * d * d  # integral; same square class
    v = val_k(x, w)
    if v % 2:
        return False
    if w.p != 2:
        pi = uniformizer(w)
        u = x
        for _ in range(v):
            u = u / pi
        return _residue_chi(u, w) == 1
    ctx = _nonsplit_ctx(K.m, w.kind, w.p)
    return ctx.is_square_element(x)


def _residue_chi(u: QuadFieldElement, w: PlaceK) -> int:
    """Quadratic character of the residue of a unit u at a place of odd
    residue characteristic."""
    p = w.p
    if w.kind == RAMIFIED:
        # residue field F_p; sqrt(m) maps to 0 when p | m
        if u.field.m % p == 0:
            r = u.a
            assert valuation(r, p) >= 0 if r else True
            num = r.numerator * pow(r.denominator, -1, p)
            return legendre(num, p)
        raise DomainError("odd ramified place must divide m")  # pragma: no cover
    # inert: residue field F_p[X]/(X^2 - m), character = u^((p^2-1)/2)
    m = u.field.m % p
    a = u.a.numerator * pow(u.a.denominator, -1, p) % p
    b = u.b.numerator * pow(u.b.denominator, -1, p) % p
    c0, c1 = a, b
    r0, r1 = 1, 0
    e = (p * p - 1) // 2
    while e:
        if e & 1:
            r0, r1 = (r0 * c0 + r1 * c1 * m) % p, (r0 * c1 + r1 * c0) % p
        c0, c1 = (c0 * c0 + c1 * c1 * m) % p, (2 * c0 * c1) % p
        e >>= 1
    assert r1 == 0 and r0 in (1, p - 1)
    return 1 if r0 == 1 else -1


# ---------------------------------------------------------------------------
# Hilbert symbols over K
# ---------------------------------------------------------------------------


def _normalize_for_symbol(x: QuadFieldElement, w: PlaceK) -> QuadFieldElement:
    """Multiply/divide x by exact squares so that it is integral with
    valuation 0 or 1 at the dyadic place w.  Square classes are unchanged."""
    pi2 = uniformizer(w)
    pi2 = pi2 * pi2
    y = x
    v = val_k(y, w)
    while v >= 2:
        y = y / pi2
        v -= 2
    while v < 0:
        y = y * pi2
        v += 2
    # an element of valuation 0 or 1 at a dyadic place has odd denominators in
    # the integral basis; clearing them is a unit-square scaling at w
    s, t = _omega_coords(y)
    d = math.lcm(s.denominator, t.denominator)
    assert d % 2 == 1
    y = y * d * d
    # strip odd square content to keep coordinates small
    s, t = _omega_coords(y)
    g = math.gcd(int(s), int(t))
    if g > 1:
        r = 1
        for p, e in factorize(g):
            if p != 2:
                r *= p ** (e // 2)
        if r > 1:
            y = y / (r * r)
    return y


def hilbert_k(a, b, w: PlaceK) -> int:
    """Hilbert symbol over the completion of K = Q(sqrt(m)) at the place w."""
    K = w.field
    a = quad_element(K, a)
    b = quad_element(K, b)
    if a.is_zero() or b.is_zero():
        raise DomainError("hilbert symbol needs nonzero arguments")
    if w.is_real:
        return -1 if (a.sign_at(w.index) < 0 and b.sign_at(w.index) < 0) else 1
    if w.kind == SPLIT:
        va, ua = _split_image(a, w)
        vb, ub = _split_image(b, w)
        mod = 8 if w.p == 2 else w.p
        return _symbol_at_p(w.p, va % 2, ua % mod, vb % 2, ub % mod)
    if w.p != 2:
        # tame formula: (-1)^(va*vb*(q-1)/2) * chi(ua)^vb * chi(ub)^va
        pi = uniformizer(w)
        va, vb = val_k(a, w), val_k(b, w)
        ua, ub = a, b
        for _ in range(abs(va)):
            ua = ua / pi if va > 0 else ua * pi
        for _ in range(abs(vb)):
            ub = ub / pi if vb > 0 else ub * pi
        q_half = (w.p - 1) // 2 if w.kind == RAMIFIED else (w.p * w.p - 1) // 2
        sign = -1 if (va * vb * q_half) % 2 else 1
        if vb % 2:
            sign *= _residue_chi(ua, w)
        if va % 2:
            sign *= _residue_chi(ub, w)
        return sign
    return _hilbert_dyadic(a, b, w)


def _hilbert_dyadic(a: QuadFieldElement, b: QuadFieldElement, w: PlaceK) -> int:
    """Symbol at a nonsplit place over 2.

    (a, b) = +1 iff b is a norm from the extension by sqrt(a).  The nonzero
    values x^2 - a*y^2 realize every norm square class with x/y (or y/x)
    running over residues mod P^(3*val(2)+1), so b is tested against that
    finite net by exact square-residue checks on b*(t^2 - a).
    """
    ctx = _nonsplit_ctx(w.field.m, w.kind, w.p)
    a = _normalize_for_symbol(a, w)
    b = _normalize_for_symbol(b, w)
    ra = ctx.element_residue(a, ctx.Kprec)
    rb = ctx.element_residue(b, ctx.Kprec)
    return _dyadic_symbol_from_residues(w.field.m, w.kind, w.p, ra, rb)


@lru_cache(maxsize=16384)
def _dyadic_symbol_from_residues(m: int, kind: str, p: int, ra, rb) -> int:
    ctx = _nonsplit_ctx(m, kind, p)
    if ctx.is_square_residue(ra, 2) or ctx.is_square_residue(rb, 2):
        return 1
    pi1 = ctx.pi_coords
    vb = ctx.vmax + 2
    for t in ctx.residues(ctx.P):
        c = ctx.mul(t, t)
        c = (c[0] - ra[0], c[1] - ra[1])
        if ctx.is_square_residue(ctx.mul(rb, c), vb):
            return 1
        pt = ctx.mul(pi1, t)
        c2 = ctx.mul(ctx.mul(pt, pt), ra)
        c2 = (1 - c2[0], -c2[1])
        if ctx.is_square_residue(ctx.mul(rb, c2), vb):
            return 1
    return -1


def relevant_places_k(K: QuadField, elements) -> list[PlaceK]:
    """Real embeddings plus all places over 2, primes dividing m, and primes
    dividing the norms of the given nonzero elements."""
    primes = {2}
    primes.update(p for p, _ in factorize(K.m))
    for x in elements:
        x = quad_element(K, x)
        n = x.norm()
        primes.update(p for p, _ in factorize(n.numerator))
        primes.update(p for p, _ in factorize(n.denominator))
    out: list[PlaceK] = []
    if K.is_real:
        out.extend(places_above(INF, K))
    for p in sorted(primes):
        out.extend(places_above(Place.finite(p), K))
    return out
