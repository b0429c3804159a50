"""Quadratic forms over Q and over quadratic fields: diagonalization,
classical invariants (discriminant, Hasse symbols, signatures), local and
global isotropy, equivalence, and similarity.

Forms carry their original Gram matrix together with a cached diagonalization
and the exact change of basis relating the two, so every reduction step is
checkable after the fact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import (
    INF,
    DomainError,
    Place,
    PlaceK,
    QuadField,
    QuadFieldElement,
    factorize,
    hilbert_k,
    hilbert_q,
    is_local_square,
    quad_element,
    relevant_places_k,
    squarefree_part,
)

Scalar = Fraction | QuadFieldElement


def _coerce(base: QuadField | None, x) -> Scalar:
    if base is None:
        if isinstance(x, QuadFieldElement):
            raise DomainError("field element in a rational form")
        return Fraction(x)
    return quad_element(base, x)


def _is_zero(x: Scalar) -> bool:
    return x.is_zero() if isinstance(x, QuadFieldElement) else x == 0


def _size(x: Scalar) -> Fraction:
    """Pivot-selection size: |x| over Q, |norm| over a quadratic field."""
    if isinstance(x, QuadFieldElement):
        return abs(x.norm())
    return abs(x)


def _fraction_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    rn, rd = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if rn * rn == x.numerator and rd * rd == x.denominator:
        return Fraction(rn, rd)
    return None


def sqrt_in_field(x: Scalar, base: QuadField | None):
    """Exact square root of x in the base field, or None."""
    if base is None:
        return _fraction_sqrt(Fraction(x))
    x = quad_element(base, x)
    if x.is_zero():
        return base(0)
    if x.b == 0:
        r = _fraction_sqrt(x.a)
        if r is not None:
            return base(r)
        r = _fraction_sqrt(x.a / base.m)
        if r is not None:
            return base(0, r)
        return None
    n2 = x.norm()
    n = _fraction_sqrt(n2)
    if n is None:
        return None
    for nn in (n, -n):
        c2 = (x.a + nn) / 2
        if c2 == 0:
            continue
        c = _fraction_sqrt(c2)
        if c is None:
            continue
        d = x.b / (2 * c)
        cand = base(c, d)
        if (cand * cand - x).is_zero():
            return cand
    return None


def is_square_in_field(x: Scalar, base: QuadField | None) -> bool:
    return sqrt_in_field(x, base) is not None


def reduce_square_class(x: Scalar, base: QuadField | None) -> Scalar:
    """Small representative of the square class of x: the squarefree kernel
    over Q; over a quadratic field, integral coordinates with square content
    removed."""
    if base is None:
        return Fraction(squarefree_part(x))
    x = quad_element(base, x)
    if x.is_zero():
        raise DomainError("0 has no square class")
    d = math.lcm(x.a.denominator, x.b.denominator)
    y = x * d * d
    g = math.gcd(int(y.a), int(y.b))
    if g > 1:
        r = 1
        for p, e in factorize(g):
            r *= p ** (e // 2)
        if r > 1:
            y = y / (r * r)
    return y


@dataclass(frozen=True)
class QuadraticForm:
    """A nondegenerate quadratic form with cached diagonalization.

    basis is the change-of-basis matrix U with U^T * gram * U equal to the
    diagonal matrix of diag (columns express the diagonalizing basis in the
    original coordinates)."""

    base: QuadField | None
    gram: tuple[tuple[Scalar, ...], ...]
    diag: tuple[Scalar, ...]
    basis: tuple[tuple[Scalar, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.diag)

    def scaled(self, c) -> "QuadraticForm":
        c = _coerce(self.base, c)
        if _is_zero(c):
            raise DomainError("scaling by zero")
        gram = tuple(tuple(c * x for x in row) for row in self.gram)
        diag = tuple(reduce_square_class(c * x, self.base) for x in self.diag)
        # rebuild the basis scaling for the reduced entries
        return diagonalize(gram, self.base)

    def evaluate(self, vec) -> Scalar:
        n = self.rank
        acc = _coerce(self.base, 0)
        for i in range(n):
            for j in range(n):
                acc = acc + self.gram[i][j] * vec[i] * vec[j]
        return acc

    def __str__(self) -> str:
        return ",".join(str(x) for x in self.diag)


def diagonal_form(entries, base: QuadField | None = None) -> QuadraticForm:
    """Form with the given diagonal (entries must be nonzero)."""
    entries = [_coerce(base, x) for x in entries]
    if any(_is_zero(x) for x in entries):
        raise DomainError("degenerate form")
    n = len(entries)
    gram = tuple(
        tuple(entries[i] if i == j else _coerce(base, 0) for j in range(n)) for i in range(n)
    )
    return diagonalize(gram, base)


def diagonalize(gram, base: QuadField | None = None) -> QuadraticForm:
    """Symmetric congruence diagonalization with squarefree reduction of the
    diagonal entries.  Raises on degenerate input."""
    M = [[_coerce(base, x) for x in row] for row in gram]
    n = len(M)
    if any(len(row) != n for row in M):
        raise DomainError("gram matrix must be square")
    for i in range(n):
        for j in range(i):
            if not _is_zero(M[i][j] - M[j][i]):
                raise DomainError("gram matrix must be symmetric")
    U = [[_coerce(base, 1 if i == j else 0) for j in range(n)] for i in range(n)]

    def add_col(dst, src, f):
        # column op: col_dst += f * col_src, with the symmetric row op
        for i in range(n):
            M[i][dst] = M[i][dst] + f * M[i][src]
        for j in range(n):
            M[dst][j] = M[dst][j] + f * M[src][j]
        for i in range(n):
            U[i][dst] = U[i][dst] + f * U[i][src]

    def swap_cols(i, j):
        for r in range(n):
            M[r][i], M[r][j] = M[r][j], M[r][i]
        for c in range(n):
            M[i][c], M[j][c] = M[j][c], M[i][c]
        for r in range(n):
            U[r][i], U[r][j] = U[r][j], U[r][i]

    for k in range(n):
        # pick the smallest nonzero diagonal pivot at or after k
        pivot = None
        best = None
        for i in range(k, n):
            if not _is_zero(M[i][i]):
                s = _size(M[i][i])
                if best is None or s < best:
                    best, pivot = s, i
        if pivot is None:
            # all-zero diagonal: make a pivot from an off-diagonal entry
            found = False
            for i in range(k, n):
                for j in range(i + 1, n):
                    if not _is_zero(M[i][j]):
                        add_col(i, j, _coerce(base, 1))
                        found = True
                        break
                if found:
                    break
            if not found:
                raise DomainError("degenerate form")
            pivot = k
            while _is_zero(M[pivot][pivot]):
                pivot += 1
        if pivot != k:
            swap_cols(k, pivot)
        for i in range(k + 1, n):
            if not _is_zero(M[i][k]):
                add_col(i, k, -(M[i][k] / M[k][k]))

    diag = []
    for i in range(n):
        e = M[i][i]
        if _is_zero(e):
            raise DomainError("degenerate form")
        r = reduce_square_class(e, base)
        ratio = e / r if isinstance(e, QuadFieldElement) else Fraction(e, 1) / r
        c = sqrt_in_field(ratio, base)
        assert c is not None, "square-class reduction must differ by a square"
        inv = 1 / c if not isinstance(c, QuadFieldElement) else base(1) / c
        for row in range(n):
            U[row][i] = U[row][i] * inv
        diag.append(r)

    gram_t = tuple(tuple(_coerce(base, x) for x in row) for row in gram)
    return QuadraticForm(base, gram_t, tuple(diag), tuple(tuple(r) for r in U))


def check_diagonalization(q: QuadraticForm) -> bool:
    """U^T * gram * U equals diag exactly."""
    n = q.rank
    for i in range(n):
        for j in range(n):
            acc = _coerce(q.base, 0)
            for r in range(n):
                for s in range(n):
                    acc = acc + q.basis[r][i] * q.gram[r][s] * q.basis[s][j]
            want = q.diag[i] if i == j else _coerce(q.base, 0)
            if not _is_zero(acc - want):
                return False
    return True


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------


def discriminant(q: QuadraticForm) -> Scalar:
    """Squarefree representative of det(diag) modulo squares."""
    d = _coerce(q.base, 1)
    for x in q.diag:
        d = d * x
    return reduce_square_class(d, q.base)


def _symbol(base: QuadField | None, a, b, v) -> int:
    if base is None:
        return hilbert_q(a, b, v)
    return hilbert_k(a, b, v)


def hasse_invariant(q: QuadraticForm, v) -> int:
    """Product over i < j of the local Hilbert symbols (d_i, d_j) at v."""
    sign = 1
    n = q.rank
    for i in range(n):
        for j in range(i + 1, n):
            sign *= _symbol(q.base, q.diag[i], q.diag[j], v)
    return sign


def signature_at(q: QuadraticForm, v) -> tuple[int, int]:
    """(positives, negatives) at a real place/embedding."""
    pos = neg = 0
    for x in q.diag:
        s = x.sign_at(v.index) if isinstance(x, QuadFieldElement) else (1 if x > 0 else -1)
        if s > 0:
            pos += 1
        else:
            neg += 1
    return pos, neg


def relevant_places(q: QuadraticForm):
    """Finite list of places where local invariants can be nontrivial."""
    if q.base is None:
        primes = {2}
        for x in q.diag:
            primes.update(p for p, _ in factorize(squarefree_part(x)))
        return [INF] + [Place.finite(p) for p in sorted(primes)]
    return relevant_places_k(q.base, q.diag)


def is_isotropic_local(q: QuadraticForm, v) -> bool:
    """Standard local isotropy criteria by rank."""
    n = q.rank
    if n <= 1:
        return False
    if (isinstance(v, Place) and v.is_real) or (isinstance(v, PlaceK) and v.is_real):
        pos, neg = signature_at(q, v)
        return pos > 0 and neg > 0
    d = discriminant(q)
    if n == 2:
        return is_local_square(-d, v)
    eps = hasse_invariant(q, v)
    if n == 3:
        return eps == _symbol(q.base, -1, -d, v)
    if n == 4:
        if not is_local_square(d, v):
            return True
        return eps == _symbol(q.base, -1, -1, v)
    return True


def is_isotropic(q: QuadraticForm) -> bool:
    """Global isotropy by the local-global principle over the finite set of
    relevant places."""
    n = q.rank
    if n <= 1:
        return False
    if n == 2:
        return is_square_in_field(-discriminant(q), q.base)
    return all(is_isotropic_local(q, v) for v in relevant_places(q))


def equivalent(q1: QuadraticForm, q2: QuadraticForm) -> bool:
    """Same rank, discriminant class, signatures, and Hasse invariants."""
    if q1.base != q2.base:
        raise DomainError("forms over different base fields")
    if q1.rank != q2.rank:
        return False
    d1, d2 = discriminant(q1), discriminant(q2)
    if not is_square_in_field(d1 * d2, q1.base):
        return False
    places = {str(v): v for v in relevant_places(q1)}
    places.update({str(v): v for v in relevant_places(q2)})
    for v in places.values():
        if getattr(v, "is_real", False):
            if signature_at(q1, v) != signature_at(q2, v):
                return False
        elif hasse_invariant(q1, v) != hasse_invariant(q2, v):
            return False
    return True


def similar(q1: QuadraticForm, q2: QuadraticForm):
    """A scalar c with q1 equivalent to c * q2, or None.

    Candidates are squarefree integers supported on -1, primes dividing
    2*disc(q1)*disc(q2), and primes where either form has Hasse invariant -1
    (over a quadratic field also times sqrt(m)); every candidate is verified
    with equivalent, so the candidate set is falsifiable by tests.
    """
    if q1.base != q2.base:
        raise DomainError("forms over different base fields")
    if q1.rank != q2.rank:
        return None
    primes: set[int] = {2}
    for q in (q1, q2):
        d = discriminant(q)
        if q.base is None:
            primes.update(p for p, _ in factorize(squarefree_part(d)))
        else:
            nd = d.norm()
            primes.update(p for p, _ in factorize(nd.numerator))
            primes.update(p for p, _ in factorize(nd.denominator))
            primes.update(p for p, _ in factorize(q.base.m))
        for v in relevant_places(q):
            real = getattr(v, "is_real", False)
            if not real and hasse_invariant(q, v) == -1:
                primes.add(v.p)
    # even rank: similarity preserves the discriminant class, a cheap filter
    if q1.rank % 2 == 0 and q1.base is None:
        if squarefree_part(discriminant(q1) * discriminant(q2)) != 1:
            return None
    plist = sorted(primes)
    if len(plist) > 14:
        raise DomainError("similarity search support too large")
    candidates: list = []
    for mask in range(1 << len(plist)):
        c = 1
        for i, p in enumerate(plist):
            if mask >> i & 1:
                c *= p
        candidates.extend([c, -c])
    candidates.sort(key=lambda c: (abs(c), c < 0))
    if q1.base is not None:
        root = q1.base.sqrt_gen()
        candidates = [q1.base(c) for c in candidates] + [root * c for c in candidates]
    elif q1.rank % 2 == 1:
        # odd rank: c must lie in the square class of d1*d2
        target = squarefree_part(discriminant(q1) * discriminant(q2))
        candidates = [c for c in candidates if squarefree_part(Fraction(c)) == target]
    for c in candidates:
        if equivalent(q1, q2.scaled(c)):
            return _coerce(q1.base, c)
    return None


# ---------------------------------------------------------------------------
# brute-force point search (the independent oracle)
# ---------------------------------------------------------------------------


def _verify_zero(gram, vec) -> bool:
    n = len(vec)
    acc = 0
    for i in range(n):
        for j in range(n):
            acc += gram[i][j] * vec[i] * vec[j]
    return acc == 0


def _primitive(vec):
    g = 0
    for x in vec:
        g = math.gcd(g, abs(x))
    out = tuple(x // g for x in vec)
    lead = next((x for x in out if x), 0)
    return tuple(-x for x in out) if lead < 0 else out


def _solve_last(gram, head) -> list[int]:
    """Integer roots t of q(head, t) = 0."""
    n = len(gram)
    a_nn = gram[n - 1][n - 1]
    B = 2 * sum(gram[n - 1][i] * head[i] for i in range(n - 1))
    C = 0
    for i in range(n - 1):
        for j in range(n - 1):
            C += gram[i][j] * head[i] * head[j]
    roots: list[int] = []
    if a_nn == 0:
        if B != 0:
            if C % B == 0:
                roots.append(-C // B)
        elif C == 0:
            roots.append(0)
    else:
        disc = B * B - 4 * a_nn * C
        if disc >= 0:
            r = math.isqrt(disc)
            if r * r == disc:
                for sgn in ((1, -1) if r else (1,)):
                    num = -B + sgn * r
                    if num % (2 * a_nn) == 0:
                        roots.append(num // (2 * a_nn))
    return sorted(set(roots))


def _search_shells(gram, height: int):
    """Shell-lexicographic search: ascending max-norm, lexicographic within a
    shell, solving for the last coordinate.  Deterministic minimal witness."""
    import itertools

    n = len(gram)
    for s in range(0, height + 1):
        rng = range(-s, s + 1)
        for head in itertools.product(rng, repeat=n - 1):
            for t in _solve_last(gram, head):
                if abs(t) > s:
                    continue
                vec = head + (t,)
                if max(abs(x) for x in vec) != s:
                    continue  # already visited in an earlier shell
                if any(vec):
                    return _primitive(vec)
    return None


def _search_lex(gram, height: int):
    """Single lexicographic pass over the leading coordinates (used for
    search boxes too large to re-sweep shell by shell)."""
    import itertools

    n = len(gram)
    rng = range(-height, height + 1)
    for head in itertools.product(rng, repeat=n - 1):
        for t in _solve_last(gram, head):
            if abs(t) <= height and any(head + (t,)):
                return _primitive(head + (t,))
    return None


def _search_diag_numpy(diag, height: int):
    """Meet-in-the-middle zero search for diagonal rank 3/4 forms."""
    n = len(diag)
    xs = np.arange(0, height + 1, dtype=np.int64)
    sq = xs * xs
    if n == 3:
        A = diag[0] * sq[:, None] + diag[1] * sq[None, :]
        B = -diag[2] * sq
        a_shape = A.shape
        A = A.ravel()
    else:
        A = (diag[0] * sq[:, None] + diag[1] * sq[None, :]).ravel()
        B = (-diag[2] * sq[:, None] - diag[3] * sq[None, :]).ravel()
        a_shape = (height + 1, height + 1)
    common = np.intersect1d(A, B)
    for v in common:
        ia = int(np.flatnonzero(A == v)[0])
        ib = int(np.flatnonzero(B == v)[0])
        x1, x2 = divmod(ia, a_shape[1])
        if n == 3:
            vec = (x1, x2, int(ib))
        else:
            x3, x4 = divmod(ib, height + 1)
            vec = (x1, x2, x3, x4)
        if any(vec):
            return _primitive(vec)
    return None


def oracle_point_search(q: QuadraticForm, height: int):
    """A primitive integer zero of q with coordinates bounded by height, or
    None if none exists in the box.  Any returned vector satisfies q = 0
    exactly; the search itself never consults the local-global machinery."""
    if q.base is not None:
        raise DomainError("point search oracle is for rational forms")
    if height < 1:
        raise DomainError("height must be positive")
    den = 1
    for row in q.gram:
        for x in row:
            den = math.lcm(den, Fraction(x).denominator)
    gram = [[int(x * den) for x in row] for row in q.gram]
    n = len(gram)
    is_diag = all(gram[i][j] == 0 for i in range(n) for j in range(n) if i != j)
    budget = (2 * height + 1) ** (n - 1)
    if is_diag and n in (3, 4) and budget > 20_000:
        vec = _search_diag_numpy([gram[i][i] for i in range(n)], height)
    elif budget <= 20_000:
        vec = _search_shells(gram, height)
    elif budget <= 3_000_000:
        vec = _search_lex(gram, height)
    else:
        raise DomainError("search space too large for a dense gram matrix")
    if vec is None:
        return None
    assert _verify_zero(gram, vec)
    return vec
