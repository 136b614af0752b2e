import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nangle import linalg as la
from nangle.angulation import is_n_angle
from nangle.errors import PreconditionError
from nangle.generators import random_commuting_square, random_matrix, random_member
from nangle.goodness import (
    Outcome,
    count_fill_ins,
    enumerate_fill_ins,
    find_good_fill_in,
    is_good,
    minimal_completion,
)
from nangle.sequences import (
    SequenceMorphism,
    f_p_sequence,
    identity_morphism,
    is_morphism,
    zero_morphism,
    zero_sequence,
)

from conftest import F2E, Z4, Z9


def test_identity_is_good(rng):
    for spec, n in ((Z4, 4), (Z9, 4), (F2E, 3)):
        assert is_good(identity_morphism(random_member(rng, spec, n)))


def test_zero_morphism_fp_is_good():
    a = f_p_sequence(Z4, 4, 1)
    assert is_good(zero_morphism(a, a))


def test_counterexample_is_not_good():
    a = f_p_sequence(Z4, 4, 1)
    z = la.scalar(Z4, 0)
    assert not is_good(SequenceMorphism(a, a, (z, z, z, la.scalar(Z4, 2))))


def test_is_good_requires_angles():
    a = f_p_sequence(Z4, 4, 1)
    bad = SequenceMorphism(a, a, (la.scalar(Z4, 1), la.scalar(Z4, 0), la.scalar(Z4, 0), la.scalar(Z4, 0)))
    with pytest.raises(PreconditionError):
        is_good(bad)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_fill_ins_of_identity_square_match_brute_force(n):
    a = f_p_sequence(Z4, n, 1)
    one = la.scalar(Z4, 1)
    got = {tuple(int(c.a[0, 0]) for c in phi.components[2:]) for phi in enumerate_fill_ins(a, a, one, one)}
    expected = set()
    for rest in itertools.product(range(4), repeat=n - 2):
        comps = (one, one) + tuple(la.scalar(Z4, v) for v in rest)
        if is_morphism(SequenceMorphism(a, a, comps)):
            expected.add(rest)
    assert got == expected
    assert count_fill_ins(a, a, one, one) == len(expected)


def test_zero_square_includes_zero_fill_in():
    a = f_p_sequence(Z9, 4, 1)
    z = la.scalar(Z9, 0)
    fills = list(enumerate_fill_ins(a, a, z, z))
    assert zero_morphism(a, a) in fills


def test_non_commuting_square_is_rejected():
    a = f_p_sequence(Z4, 4, 1)
    with pytest.raises(PreconditionError):
        list(enumerate_fill_ins(a, a, la.scalar(Z4, 1), la.scalar(Z4, 0)))


def test_good_fill_in_examples():
    a = f_p_sequence(Z4, 4, 1)
    one = la.scalar(Z4, 1)
    phi = find_good_fill_in(a, a, one, one, 1000)
    assert isinstance(phi, SequenceMorphism) and is_good(phi)
    z = zero_sequence(Z4, 4)
    assert find_good_fill_in(z, z, la.zeros(Z4, 0, 0), la.zeros(Z4, 0, 0), 10) == zero_morphism(z, z)


def test_good_fill_in_budget():
    a = f_p_sequence(Z4, 4, 2)
    b = f_p_sequence(Z4, 4, 2)
    z = la.zeros(Z4, 2, 2)
    # with one step only the zero fill-in is tried, and its cone is F(p)-like
    result = find_good_fill_in(a, b, z, z, 1)
    assert result == zero_morphism(a, b) or result is Outcome.NONE_WITHIN_BUDGET


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_good_fill_in_exists_for_random_squares(seed):
    rng = random.Random(seed)
    a, b = random_member(rng, Z4, 4, 1, 1), random_member(rng, Z4, 4, 1, 1)
    phi1, phi2 = random_commuting_square(rng, a, b)
    phi = find_good_fill_in(a, b, phi1, phi2, 10**5)
    assert isinstance(phi, SequenceMorphism)
    assert is_good(phi)
    assert phi.components[:2] == (phi1, phi2)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([(Z4, 4), (Z9, 4), (F2E, 5), (Z4, 3)]), st.integers(0, 2**32 - 1))
def test_minimal_completion(frame, seed):
    spec, n = frame
    rng = random.Random(seed)
    f = random_matrix(rng, spec, rng.randint(0, 3), rng.randint(0, 3))
    c = minimal_completion(f, n)
    assert c.maps[0] == f
    assert is_n_angle(c)
