import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sumsetlab.errors import InputError, PolyOverflowError, PreconditionError
from sumsetlab.poly import (Poly, characteristic_vector, essentially_distinct, eval_poly, is_prime,
                            residue_obstruction, value_set)

N2 = Poly([0, 0, 1])


def test_eval_examples():
    assert eval_poly(N2, 10) == 100
    assert eval_poly(Poly([5, 0]), 12345) == 5
    assert eval_poly(Poly([1, -1, 0, 2]), 10**3) == 1999999001


@given(st.lists(st.integers(-2**63, 2**63 - 1), min_size=1, max_size=4), st.integers(-10**6, 10**6))
def test_eval_matches_big_integers(cs, n):
    exact = sum(c * n**i for i, c in enumerate(cs))
    if -2**127 <= exact < 2**127:
        assert eval_poly(Poly(cs), n) == exact
    else:
        with pytest.raises(PolyOverflowError):
            eval_poly(Poly(cs), n)


def test_overflow_is_explicit():
    with pytest.raises(PolyOverflowError):
        Poly([2**63])
    with pytest.raises(PolyOverflowError):
        eval_poly(Poly([0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1]), 10**10)
    with pytest.raises(PolyOverflowError):
        N2.values([2**32])


def test_parse_and_degree():
    p = Poly.parse("3,0,2,0")
    assert p.coeffs == (3, 0, 2) and p.degree == 2 and p.leading == 2
    assert Poly([0]).degree == 0
    with pytest.raises(InputError):
        Poly.parse("1,x")


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=5), st.integers(-20, 20), st.integers(-30, 30))
def test_taylor_shift(cs, h, n):
    p = Poly(cs)
    assert p.shifted(h)(n) == p(n + h)


@given(st.lists(st.integers(-100, 100), min_size=2, max_size=5).filter(lambda c: c[-1] > 0))
def test_increasing_from(cs):
    p = Poly(cs)
    n0 = p.increasing_from()
    assert all(p(n + 1) > p(n) for n in range(n0, n0 + 300))


def test_essential_distinctness():
    n, n3 = Poly([0, 1]), Poly([0, 0, 0, 1])
    assert not essentially_distinct([N2, Poly([1, 0, 1])])
    assert essentially_distinct([N2, Poly([0, 1, 1])])
    assert essentially_distinct([n, n3, Poly([0, 0, 0, 2])])
    with pytest.raises(InputError):
        essentially_distinct([N2])


def test_characteristic_vector():
    fam = [Poly([0, 1, 1]), N2, Poly([0, 0, 2]), Poly([1, 3])]
    assert characteristic_vector(fam).counts == (1, 2)
    assert characteristic_vector([Poly([0, 5])]).counts == (1,)
    for _ in range(10):
        random.shuffle(fam)
        assert characteristic_vector(fam).counts == (1, 2)
    shifted = [fam[0] + Poly([7])] + fam[1:]
    assert characteristic_vector(shifted).counts == (1, 2)
    with pytest.raises(PreconditionError):
        characteristic_vector([N2, Poly([1, 0, 1])])


def test_value_set_examples():
    assert value_set(Poly([0, 1]), 0, 10).count() == 10
    assert value_set(N2, 0, 50).members().tolist() == [0, 1, 4, 9, 16, 25, 36, 49]


def test_value_set_matches_root_inversion():
    p = Poly([0, 1, 1])
    vs = value_set(p, 0, 10**6)
    rng = random.Random(11)
    for m in [rng.randrange(10**6) for _ in range(1000)] + [0, 2, 6, 999000]:
        k = (math.isqrt(4 * m + 1) - 1) // 2
        assert (m in vs) == (k * k + k == m)


def test_value_set_with_a_dip():
    # p(n) = n^2 - 6n + 10 decreases first; forward scan still finds everything
    p = Poly([10, -6, 1])
    got = set(value_set(p, 0, 200).members().tolist())
    assert got == {p(n) for n in range(0, 40) if 0 <= p(n) < 200}


def test_residue_obstruction_examples():
    ob = residue_obstruction(N2, 7)
    assert ob.image == (0, 1, 2, 4) and not ob.surjective and ob.pair == (1, 2)
    assert residue_obstruction(Poly([0, 1]), 13).surjective
    assert residue_obstruction(Poly([0, 1]), 13).pair is None
    assert residue_obstruction(N2, 2).image == (0, 1) and residue_obstruction(N2, 2).surjective
    with pytest.raises(InputError):
        residue_obstruction(N2, 9)


def test_obstruction_pair_is_valid():
    for q in (3, 5, 7, 11, 13, 101):
        ob = residue_obstruction(Poly([3, 0, 2]), q)
        if ob.pair:
            assert (ob.pair[0] + ob.pair[1]) % q not in ob.image


@pytest.mark.parametrize("p", [N2, Poly([0, 1, 1]), Poly([0, 0, 0, 1]), Poly([3, 0, 2])])
def test_some_small_prime_obstructs(p):
    primes = [q for q in range(2, 201) if is_prime(q)]
    assert any(not residue_obstruction(p, q).surjective for q in primes)
