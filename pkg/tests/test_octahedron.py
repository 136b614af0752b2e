import random

import pytest

from nangle import linalg as la
from nangle.errors import PreconditionError
from nangle.generators import random_commuting_square, random_matrix, random_member
from nangle.goodness import Outcome, find_good_fill_in, minimal_completion
from nangle.octahedron import (
    OctahedronWitness,
    associated_n_angle,
    check_frame,
    find_octahedron,
    octahedron_defects,
    verify_octahedron,
)
from nangle.sequences import (
    SequenceMorphism,
    f_p_sequence,
    identity_morphism,
    is_candidate,
    trivial_gamma,
    zero_sequence,
)
from nangle.verdier import VerdierWitness, search_verdier, verdier_defects, verify_verdier

from conftest import F2E, Z4, Z9


def rows_for(rng, spec, n):
    a = random_member(rng, spec, n, 1, 1)
    g1 = random_matrix(rng, spec, rng.randint(0, 2), a.ranks[1])
    c = minimal_completion(g1, n)
    b = minimal_completion(g1 @ a.maps[0], n)
    return a, b, c


def test_degenerate_witness():
    n = 4
    a = zero_sequence(Z4, n)
    b = trivial_gamma(Z4, n, 1, 2)
    c = b
    phi = SequenceMorphism(a, b, tuple(la.zeros(Z4, b.ranks[i], 0) for i in range(n)))
    w = OctahedronWitness(a, b, c, phi, identity_morphism(b), tuple(la.zeros(Z4, c.ranks[i - 2], 0) for i in range(4, n + 1)))
    assert is_candidate(associated_n_angle(w))
    assert verify_octahedron(w)


def test_frame_is_checked():
    a = f_p_sequence(Z4, 4, 1)
    with pytest.raises(PreconditionError):
        check_frame(a, a, a)  # beta_1 = p but gamma_1 alpha_1 = 0


@pytest.mark.parametrize("spec,n", [(Z4, 4), (Z4, 5), (Z9, 4), (F2E, 3)])
def test_search_then_verify(spec, n):
    rng = random.Random(11)
    for _ in range(6):
        a, b, c = rows_for(rng, spec, n)
        w = find_octahedron(a, b, c, 2000, seed=rng.randrange(1000))
        assert w is not None
        assert verify_octahedron(w)
        assert OctahedronWitness.from_json(w.to_json()) == w
        assoc = associated_n_angle(w)
        # first object A_3, last object C_n
        assert assoc.ranks[0] == a.ranks[2]
        assert assoc.ranks[-1] == c.ranks[-1]


def test_perturbed_witness_fails():
    rng = random.Random(5)
    for _ in range(10):
        a, b, c = rows_for(rng, Z4, 4)
        w = find_octahedron(a, b, c, 2000)
        assert w is not None
        comps = list(w.psi.components)
        comps[1] = comps[1] + la.scalar(Z4, 2, comps[1].rows) if comps[1].rows else comps[1]
        if comps[1] == w.psi.components[1]:
            continue
        bad = OctahedronWitness(w.a, w.b, w.c, w.phi, SequenceMorphism(w.b, w.c, tuple(comps)), w.lambdas)
        assert not verify_octahedron(bad)
        assert octahedron_defects(bad)


def test_verdier_identity_and_round_trip():
    rng = random.Random(2)
    a = random_member(rng, Z4, 4, 1, 1)
    w = search_verdier(identity_morphism(a), 5000)
    assert isinstance(w, VerdierWitness)
    phi = identity_morphism(a)
    assert verify_verdier(phi, w)
    assert VerdierWitness.from_json(w.to_json()) == w


@pytest.mark.parametrize("spec,n", [(Z4, 4), (Z9, 4), (F2E, 3)])
def test_verdier_search_then_verify(spec, n):
    rng = random.Random(3)
    found = 0
    for _ in range(5):
        a, b = random_member(rng, spec, n, 1, 1), random_member(rng, spec, n, 1, 1)
        phi1, phi2 = random_commuting_square(rng, a, b)
        phi = find_good_fill_in(a, b, phi1, phi2, 10**5)
        assert not isinstance(phi, Outcome)
        w = search_verdier(phi, 5000, seed=1)
        if isinstance(w, VerdierWitness):
            found += 1
            assert verify_verdier(phi, w)
    assert found >= 4


def test_verdier_factorization_perturbed():
    rng = random.Random(4)
    for _ in range(10):
        a = random_member(rng, Z4, 4, 1, 1)
        if a.ranks[2] == 0:
            continue
        phi = identity_morphism(a)
        w = search_verdier(phi, 5000)
        assert isinstance(w, VerdierWitness)
        comps = list(w.mu1.components)
        comps[2] = comps[2] + la.scalar(Z4, 1, comps[2].rows) if comps[2].rows == comps[2].cols else comps[2]
        first = OctahedronWitness(w.first.a, w.first.b, w.first.c, SequenceMorphism(w.first.a, w.first.b, tuple(comps)), w.first.psi, w.first.lambdas)
        bad = VerdierWitness(first, w.second)
        if bad == w:
            continue
        assert not verify_verdier(phi, bad)
        assert verdier_defects(phi, bad)
        return
    pytest.fail("no instance with a nonzero third object")
