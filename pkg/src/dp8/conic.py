"""Conics as 2-torsion Brauer classes.

A smooth conic a x^2 + b y^2 + c z^2 = 0 is encoded by the finite set of
places where it has no local point; that set determines the conic up to
isomorphism, is empty iff the conic has a rational point, and adds by
symmetric difference.  This module provides the class computation, the
realization of an arbitrary even place set by a conic over Q, Brauer
products, common splitting fields, and base change / descent along a
quadratic extension.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .arith import (
    INF,
    SPLIT,
    DomainError,
    Place,
    PlaceK,
    QuadField,
    QuadFieldElement,
    hilbert_q,
    hilbert_relevant_places,
    is_prime,
    prime_splitting,
    squarefree_part,
)
from .qform import (
    QuadraticForm,
    diagonal_form,
    is_isotropic,
    is_isotropic_local,
    reduce_square_class,
    relevant_places,
)


@dataclass(frozen=True)
class BrauerClass2:
    """An element of the 2-torsion of the Brauer group of Q or of a quadratic
    field, stored as its even set of ramified places."""

    base: QuadField | None
    places: frozenset

    def __post_init__(self):
        if len(self.places) % 2:
            raise DomainError("a quaternion class ramifies at an even number of places")
        for w in self.places:
            ok = isinstance(w, Place) if self.base is None else (
                isinstance(w, PlaceK) and w.field == self.base
            )
            if not ok:
                raise DomainError("place does not belong to the base field")

    @property
    def is_trivial(self) -> bool:
        return not self.places

    def __add__(self, other: "BrauerClass2") -> "BrauerClass2":
        if self.base != other.base:
            raise DomainError("classes over different fields")
        return BrauerClass2(self.base, self.places ^ other.places)

    def conjugate(self) -> "BrauerClass2":
        if self.base is None:
            raise DomainError("conjugation needs a quadratic base field")
        return BrauerClass2(self.base, frozenset(w.conjugate() for w in self.places))

    def sorted_places(self):
        return tuple(sorted(self.places))

    def labels(self) -> tuple[str, ...]:
        return tuple(str(w) for w in self.sorted_places())

    def __str__(self) -> str:
        return "{" + ",".join(self.labels()) + "}"


def trivial_class(base: QuadField | None = None) -> BrauerClass2:
    return BrauerClass2(base, frozenset())


@dataclass(frozen=True)
class Conic:
    """A smooth conic up to isomorphism: reduced coefficients plus the cached
    ramification set of the associated quaternion algebra."""

    base: QuadField | None
    coeffs: tuple
    cls: BrauerClass2 = field(compare=False)

    @property
    def is_trivial(self) -> bool:
        return self.cls.is_trivial

    def form(self) -> QuadraticForm:
        return diagonal_form(self.coeffs, self.base)

    def __str__(self) -> str:
        return ",".join(str(c) for c in self.coeffs)


def conic_from_coeffs(a, b, c, base: QuadField | None = None) -> Conic:
    """The conic a x^2 + b y^2 + c z^2 = 0 with its Brauer class computed."""
    form = diagonal_form([a, b, c], base)
    coeffs = form.diag
    cls = BrauerClass2(base, frozenset(
        v for v in relevant_places(form) if not is_isotropic_local(form, v)
    ))
    return Conic(base, coeffs, cls)


def brauer_class(C: Conic) -> BrauerClass2:
    return C.cls


def isomorphic_conics(C1: Conic, C2: Conic) -> bool:
    """Conics over the same field are isomorphic iff their classes agree."""
    if C1.base != C2.base:
        raise DomainError("conics over different base fields")
    return C1.cls == C2.cls


def base_change(C: Conic, K: QuadField) -> Conic:
    """The conic over K = Q(sqrt(m)) defined by the same rational equation."""
    if C.base is not None:
        raise DomainError("base change starts from a rational conic")
    a, b, c = (K(Fraction(x)) for x in C.coeffs)
    return conic_from_coeffs(a, b, c, base=K)


def galois_conjugate(C: Conic) -> Conic:
    """Coefficient-wise Galois conjugation of a conic over a quadratic field."""
    if C.base is None:
        raise DomainError("a rational conic has no conjugate")
    a, b, c = (x.conjugate() for x in C.coeffs)
    out = conic_from_coeffs(a, b, c, base=C.base)
    assert out.cls == C.cls.conjugate()
    return out


def quaternion_pair(C: Conic) -> tuple:
    """(A, B) with the conic of A x^2 + B y^2 - z^2 isomorphic to C: the
    symbol presentation of its quaternion algebra."""
    a, b, c = C.coeffs
    if C.base is None:
        return (squarefree_part(Fraction(-a * c)), squarefree_part(Fraction(-b * c)))
    return (reduce_square_class(-a * c, C.base), reduce_square_class(-b * c, C.base))


def _quaternion_ram_set(a: int, b: int) -> frozenset[Place]:
    return frozenset(
        v for v in hilbert_relevant_places(a, b) if hilbert_q(a, b, v) == -1
    )


def _subset_products(gens: list[int], cap: int = 10**6) -> list[int]:
    vals = {1}
    for g in gens:
        vals |= {v * g for v in vals if abs(v * g) <= cap}
    return sorted(vals, key=lambda v: (abs(v), v < 0))


def conic_with_class(places) -> Conic:
    """A conic over Q whose Brauer class is exactly the given even set of
    places.  Searches symbol pairs supported on the set's primes, -1, 2 and a
    growing pool of auxiliary primes; the result is verified exactly, so the
    search bound is not trusted."""
    S = frozenset(places)
    if len(S) % 2:
        raise DomainError("reciprocity violation: odd place set")
    for v in S:
        if not isinstance(v, Place):
            raise DomainError("expected places of Q")
    return _conic_with_class_impl(S)


@lru_cache(maxsize=4096)
def _conic_with_class_impl(S: frozenset) -> Conic:
    base_gens = [-1, 2] + sorted({v.p for v in S if not v.is_real} - {2})
    aux = [p for p in range(3, 200) if is_prime(p) and p not in base_gens]
    gens = list(base_gens)
    while True:
        cands = _subset_products(gens)
        for a in cands:
            for b in cands:
                if _quaternion_ram_set(a, b) == S:
                    conic = conic_from_coeffs(a, b, -1)
                    assert conic.cls.places == S
                    return conic
        if not aux:
            raise ArithmeticError(f"no conic found for class {sorted(map(str, S))}")
        gens.append(aux.pop(0))


def brauer_product(C1: Conic, C2: Conic) -> Conic:
    """A conic whose class is the sum (symmetric difference) of the input
    classes; always exists over Q."""
    if C1.base is not None or C2.base is not None:
        raise DomainError("the product construction works over Q")
    return conic_with_class((C1.cls + C2.cls).places)


def common_splitting_field(C1: Conic, C2: Conic) -> QuadField:
    """A quadratic field over which both conics acquire points: no place in
    either class may split.  Verified by the isotropy decision over the
    field."""
    if C1.base is not None or C2.base is not None:
        raise DomainError("expected conics over Q")
    S = C1.cls.places | C2.cls.places
    if not S:
        return QuadField(-1)
    K = _splitting_field_for_places(frozenset(S))
    for C in (C1, C2):
        a, b, c = (K(Fraction(x)) for x in C.coeffs)
        assert is_isotropic(diagonal_form([a, b, c], K)), (C, K)
    return K


@lru_cache(maxsize=4096)
def _splitting_field_for_places(S: frozenset) -> QuadField:
    need_imaginary = any(v.is_real for v in S)
    finite = sorted(v.p for v in S if not v.is_real)
    mag = 1
    while mag < 10**6:
        mag += 1
        for m in ((-mag, mag) if not need_imaginary else (-mag,)):
            try:
                K = QuadField(m)
            except DomainError:
                continue
            if all(prime_splitting(p, K) != SPLIT for p in finite):
                return K
    raise ArithmeticError("no splitting field found")  # pragma: no cover


def is_descended(C: Conic):
    """If C over L is the base change of a conic N over Q, return such an N,
    else None.

    The class of any base-changed conic is supported on places of local
    degree one (split primes, and the real embeddings when L is real), and is
    Galois-stable.  Conversely any such class is realized: the underlying
    rational place set, with its parity corrected at a place that does not
    split, gives a conic whose base change is verified to match.
    """
    if C.base is None:
        raise DomainError("descent needs a conic over a quadratic field")
    K = C.base
    cls = C.cls
    if cls.conjugate() != cls:
        return None
    for w in cls.places:
        if not w.is_real and w.kind != SPLIT:
            return None
    S_q = {w.underlying() for w in cls.places}
    if len(S_q) % 2:
        if K.m < 0:
            S_q.add(INF)
        else:
            p = 3
            while prime_splitting(p, K) == SPLIT or Place.finite(p) in S_q:
                p += 2
                while not is_prime(p):
                    p += 2
            S_q.add(Place.finite(p))
    N = conic_with_class(S_q)
    lifted = base_change(N, K)
    assert lifted.cls == cls, "descent verification failed"
    return N


# ---------------------------------------------------------------------------
# finite 2-torsion subgroups of the Brauer group
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BrauerSubgroup:
    """Subgroup of Br(k)[2] generated by at most two classes.  An 'abstract'
    subgroup records only its order (used when generators inside Br(Q) are
    not identified)."""

    base: QuadField | None
    generators: tuple
    abstract_order: int | None = None

    def __post_init__(self):
        if self.abstract_order is None:
            for g in self.generators:
                if g.base != self.base:
                    raise DomainError("generator over the wrong field")

    @property
    def is_abstract(self) -> bool:
        return self.abstract_order is not None

    @property
    def elements(self) -> frozenset:
        if self.is_abstract:
            raise DomainError("abstract subgroup has unidentified elements")
        elems = {trivial_class(self.base)}
        for g in self.generators:
            elems |= {e + g for e in elems}
        return frozenset(elems)

    @property
    def order(self) -> int:
        if self.is_abstract:
            return self.abstract_order
        return len(self.elements)

    def same_subgroup(self, other: "BrauerSubgroup") -> bool:
        if self.base != other.base:
            raise DomainError("subgroups of different Brauer groups")
        if self.is_abstract or other.is_abstract:
            raise DomainError("abstract subgroups cannot be compared elementwise")
        return self.elements == other.elements

    def to_json(self):
        if self.is_abstract:
            return {"order": self.order, "generators": "abstract-order-2"}
        gens = sorted({g.labels() for g in self.generators if not g.is_trivial})
        return {"order": self.order, "generators": [list(g) for g in gens]}


def subgroup_generated(base, *classes) -> BrauerSubgroup:
    return BrauerSubgroup(base, tuple(classes))


def abstract_order_two(base=None) -> BrauerSubgroup:
    return BrauerSubgroup(base, (), abstract_order=2)
