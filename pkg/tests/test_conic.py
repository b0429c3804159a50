import random

import pytest

from dp8.arith import INF, DomainError, Place, QuadField, places_above
from dp8.conic import (
    BrauerClass2,
    abstract_order_two,
    base_change,
    brauer_class,
    brauer_product,
    common_splitting_field,
    conic_from_coeffs,
    conic_with_class,
    galois_conjugate,
    is_descended,
    isomorphic_conics,
    quaternion_pair,
    subgroup_generated,
    trivial_class,
)
from dp8.qform import diagonal_form, oracle_point_search


def places(*ps):
    return frozenset(INF if p == "inf" else Place.finite(p) for p in ps)


class TestBrauerClass:
    def test_parity_enforced(self):
        with pytest.raises(DomainError):
            BrauerClass2(None, places(2))

    def test_group_law(self):
        x = BrauerClass2(None, places("inf", 2))
        y = BrauerClass2(None, places("inf", 3))
        assert (x + y).places == places(2, 3)
        assert (x + x).is_trivial
        assert (x + trivial_class()) == x

    def test_labels_sorted(self):
        x = BrauerClass2(None, places(3, "inf", 2))
        assert x.labels() == ("inf", "2", "3")


class TestConicClasses:
    def test_trivial_example(self):
        C = conic_from_coeffs(1, 1, -1)
        assert C.is_trivial
        assert brauer_class(C).places == frozenset()

    def test_sum_of_squares(self):
        C = conic_from_coeffs(1, 1, 1)
        assert brauer_class(C).places == places("inf", 2)

    def test_one_one_minus_three(self):
        C = conic_from_coeffs(1, 1, -3)
        assert brauer_class(C).places == places(2, 3)

    def test_class_even(self):
        rng = random.Random(40)
        for _ in range(80):
            a, b, c = (rng.choice([x for x in range(-20, 21) if x]) for _ in range(3))
            C = conic_from_coeffs(a, b, c)
            assert len(C.cls.places) % 2 == 0

    def test_triviality_matches_point_search(self):
        rng = random.Random(41)
        for _ in range(40):
            a, b, c = (rng.choice([x for x in range(-30, 31) if x]) for _ in range(3))
            C = conic_from_coeffs(a, b, c)
            found = oracle_point_search(C.form(), 1000) is not None
            assert found == C.is_trivial, (a, b, c)

    def test_scaling_invariance(self):
        rng = random.Random(42)
        for _ in range(20):
            a, b, c = (rng.choice([x for x in range(-9, 10) if x]) for _ in range(3))
            s = rng.choice([2, 3, -5])
            C1 = conic_from_coeffs(a, b, c)
            C2 = conic_from_coeffs(a * s, b * s, c * s)
            assert isomorphic_conics(C1, C2), (a, b, c, s)

    def test_over_field_class(self):
        K = QuadField(3)
        C = conic_from_coeffs(K(1), K(1), K(1), base=K)
        inf1, inf2 = places_above(INF, K)
        assert inf1 in C.cls.places and inf2 in C.cls.places
        assert len(C.cls.places) % 2 == 0

    def test_isomorphism_examples(self):
        assert isomorphic_conics(conic_from_coeffs(1, 1, 1), conic_from_coeffs(2, 2, 2))
        assert not isomorphic_conics(conic_from_coeffs(1, 1, 1), conic_from_coeffs(1, 1, -3))
        C = conic_from_coeffs(3, -5, 7)
        assert isomorphic_conics(C, C)


class TestConicWithClass:
    def test_empty(self):
        C = conic_with_class(frozenset())
        assert C.is_trivial
        assert tuple(int(x) for x in C.coeffs) == (1, 1, -1)

    def test_inf_2(self):
        C = conic_with_class(places("inf", 2))
        assert C.cls.places == places("inf", 2)

    def test_2_3(self):
        C = conic_with_class(places(2, 3))
        assert C.cls.places == places(2, 3)

    def test_odd_rejected(self):
        with pytest.raises(DomainError, match="reciprocity"):
            conic_with_class(places(2))

    def test_random_even_sets(self):
        rng = random.Random(43)
        pool = [INF] + [Place.finite(p) for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)]
        for _ in range(100):
            k = rng.choice([0, 2, 2, 2, 4, 4, 6])
            S = frozenset(rng.sample(pool, k))
            if len(S) % 2:
                continue
            C = conic_with_class(S)
            assert C.cls.places == S, sorted(map(str, S))

    def test_needs_auxiliary_prime(self):
        # both 13 and 17 are 1 mod 4 and squares mod each other: no symbol
        # pair supported on {-1, 2, 13, 17} ramifies exactly there
        S = places(13, 17)
        C = conic_with_class(S)
        assert C.cls.places == S


class TestBrauerProduct:
    def test_identity(self):
        C = conic_from_coeffs(1, 1, -3)
        P1 = conic_from_coeffs(1, 1, -1)
        assert isomorphic_conics(brauer_product(C, P1), C)

    def test_two_torsion(self):
        C = conic_from_coeffs(1, 1, 1)
        assert brauer_product(C, C).is_trivial

    def test_symmetric_difference(self):
        C1 = conic_with_class(places("inf", 2))
        C2 = conic_with_class(places("inf", 3))
        P = brauer_product(C1, C2)
        assert P.cls.places == places(2, 3)

    def test_random_products(self):
        rng = random.Random(44)
        for _ in range(60):
            a1, b1, c1, a2, b2, c2 = (
                rng.choice([x for x in range(-20, 21) if x]) for _ in range(6)
            )
            C1, C2 = conic_from_coeffs(a1, b1, c1), conic_from_coeffs(a2, b2, c2)
            P = brauer_product(C1, C2)
            assert P.cls == C1.cls + C2.cls

    def test_associative_commutative_on_classes(self):
        rng = random.Random(45)
        cs = [
            conic_from_coeffs(*(rng.choice([x for x in range(-9, 10) if x]) for _ in range(3)))
            for _ in range(6)
        ]
        for A in cs[:3]:
            for B in cs[3:]:
                assert brauer_product(A, B).cls == brauer_product(B, A).cls
        A, B, C = cs[0], cs[2], cs[4]
        left = brauer_product(brauer_product(A, B), C).cls
        right = brauer_product(A, brauer_product(B, C)).cls
        assert left == right


class TestCommonSplittingField:
    def test_sum_of_squares_conic(self):
        C = conic_from_coeffs(1, 1, 1)
        K = common_splitting_field(C, C)
        assert K.m == -1

    def test_inf2_and_inf3(self):
        C1 = conic_with_class(places("inf", 2))
        C2 = conic_with_class(places("inf", 3))
        assert common_splitting_field(C1, C2).m == -1

    def test_both_trivial_convention(self):
        t = conic_from_coeffs(1, 1, -1)
        assert common_splitting_field(t, t).m == -1

    def test_random_pairs_split(self):
        from dp8.qform import is_isotropic

        rng = random.Random(46)
        for _ in range(40):
            C1 = conic_from_coeffs(*(rng.choice([x for x in range(-20, 21) if x]) for _ in range(3)))
            C2 = conic_from_coeffs(*(rng.choice([x for x in range(-20, 21) if x]) for _ in range(3)))
            K = common_splitting_field(C1, C2)
            for C in (C1, C2):
                assert is_isotropic(diagonal_form(list(C.coeffs), K)), (C1, C2, K)


class TestGaloisConjugate:
    def test_rational_coeffs_fixed(self):
        K = QuadField(3)
        C = conic_from_coeffs(K(1), K(2), K(-1), base=K)
        assert galois_conjugate(C).coeffs == C.coeffs

    def test_coefficient_map(self):
        K = QuadField(3)
        r = K.sqrt_gen()
        C = conic_from_coeffs(K(1), r, K(1), base=K)
        D = galois_conjugate(C)
        assert D.coeffs[1] == -r or D.coeffs[1] == -r * 1  # conjugated middle

    def test_involution_and_class_action(self):
        rng = random.Random(47)
        for m in (-1, 5, 3):
            K = QuadField(m)
            for _ in range(12):
                coeffs = [K(rng.randint(-5, 5), rng.randint(-5, 5)) for _ in range(3)]
                if any(x.is_zero() for x in coeffs):
                    continue
                try:
                    C = conic_from_coeffs(*coeffs, base=K)
                except DomainError:
                    continue
                D = galois_conjugate(C)
                assert galois_conjugate(D).cls == C.cls
                assert D.cls == C.cls.conjugate()

    def test_rejects_rational_base(self):
        with pytest.raises(DomainError):
            galois_conjugate(conic_from_coeffs(1, 1, 1))


class TestBaseChangeAndDescent:
    def test_base_change_class_rule(self):
        # ramification survives exactly at split places (both ideals) and, for
        # a real field, at both embeddings
        rng = random.Random(48)
        for m in (-1, 3, 5, -6, 13):
            K = QuadField(m)
            for _ in range(10):
                a, b, c = (rng.choice([x for x in range(-15, 16) if x]) for _ in range(3))
                N = conic_from_coeffs(a, b, c)
                NL = base_change(N, K)
                expect = set()
                for v in N.cls.places:
                    for w in places_above(v, K):
                        if w.local_degree == 1:
                            expect.add(w)
                assert NL.cls.places == frozenset(expect), (a, b, c, m)

    def test_trivial_descends(self):
        K = QuadField(-1)
        C = conic_from_coeffs(K(1), K(1), K(-1), base=K)
        N = is_descended(C)
        assert N is not None and N.is_trivial

    def test_pair_above_single_split_prime_descends(self):
        # class = both ideals over the split prime 5 of Q(i); N must combine 5
        # with a nonsplit parity place, e.g. the class {3, 5} conic
        K = QuadField(-1)
        N0 = conic_with_class(places(3, 5))
        C = base_change(N0, K)
        assert {str(w) for w in C.cls.places} == {"5:split:1", "5:split:2"}
        N = is_descended(C)
        assert N is not None
        assert base_change(N, K).cls == C.cls

    def test_nonstable_class_not_descended(self):
        # a class supported asymmetrically over a split prime is not stable
        K = QuadField(-1)
        w1, w2 = places_above(Place.finite(5), K)
        winert = places_above(Place.finite(3), K)[0]
        cls = BrauerClass2(K, frozenset({w1, winert}))
        assert cls.conjugate() != cls

    def test_inert_support_not_descended(self):
        # build a conic over Q(i) ramified at an inert place: never descended
        K = QuadField(-1)
        found = None
        rng = random.Random(49)
        while found is None:
            coeffs = [K(rng.randint(-6, 6), rng.randint(-6, 6)) for _ in range(3)]
            if any(x.is_zero() for x in coeffs):
                continue
            try:
                C = conic_from_coeffs(*coeffs, base=K)
            except DomainError:
                continue
            if any((not w.is_real) and w.kind != "split" for w in C.cls.places):
                found = C
        assert is_descended(found) is None

    def test_descent_roundtrip_random(self):
        rng = random.Random(50)
        for m in (-1, 3, 5):
            K = QuadField(m)
            for _ in range(8):
                a, b, c = (rng.choice([x for x in range(-15, 16) if x]) for _ in range(3))
                NL = base_change(conic_from_coeffs(a, b, c), K)
                N = is_descended(NL)
                assert N is not None
                assert base_change(N, K).cls == NL.cls


class TestBrauerSubgroup:
    def test_orders(self):
        x = BrauerClass2(None, places("inf", 2))
        y = BrauerClass2(None, places("inf", 3))
        assert subgroup_generated(None).order == 1
        assert subgroup_generated(None, x).order == 2
        assert subgroup_generated(None, x, x).order == 2
        assert subgroup_generated(None, x, y).order == 4

    def test_closure(self):
        x = BrauerClass2(None, places("inf", 2))
        y = BrauerClass2(None, places("inf", 3))
        g = subgroup_generated(None, x, y)
        assert trivial_class() in g.elements
        assert x + y in g.elements

    def test_abstract(self):
        g = abstract_order_two()
        assert g.order == 2
        with pytest.raises(DomainError):
            g.elements

    def test_json(self):
        x = BrauerClass2(None, places("inf", 2))
        assert subgroup_generated(None, x).to_json() == {
            "order": 2,
            "generators": [["inf", "2"]],
        }


class TestQuaternionPair:
    def test_pair_matches_class(self):
        rng = random.Random(51)
        for _ in range(25):
            a, b, c = (rng.choice([x for x in range(-12, 13) if x]) for _ in range(3))
            C = conic_from_coeffs(a, b, c)
            A, B = quaternion_pair(C)
            assert conic_from_coeffs(A, B, -1).cls == C.cls
