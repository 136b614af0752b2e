"""Seeded random sequences, members and morphisms for property runs."""

from __future__ import annotations

import random
from typing import Sequence

import numpy as np

from . import linalg as la
from .angulation import block_form, block_forms_for_ranks
from .linalg import Matrix
from .ring import RingSpec
from .sequences import NSigmaSequence, conjugate, direct_sum, make_sequence


def random_matrix(rng: random.Random, spec: RingSpec, rows: int, cols: int, reduced: bool = False) -> Matrix:
    a = np.array([rng.randrange(spec.order) for _ in range(rows * cols)], dtype=np.int64).reshape(rows, cols)
    if reduced:
        a = spec.times_p(a)
    return Matrix._raw(spec, a)


def random_invertible(rng: random.Random, spec: RingSpec, r: int) -> Matrix:
    while True:
        m = random_matrix(rng, spec, r, r)
        if la.is_invertible(m):
            return m


def random_gl_tuple(rng: random.Random, spec: RingSpec, ranks: Sequence[int]) -> list[Matrix]:
    return [random_invertible(rng, spec, r) for r in ranks]


def random_sequence(rng: random.Random, spec: RingSpec, n: int, ranks: Sequence[int], reduced: bool = False) -> NSigmaSequence:
    maps = [random_matrix(rng, spec, ranks[(i + 1) % n], ranks[i], reduced) for i in range(n)]
    return make_sequence(spec, n, ranks, maps)


def random_block_form(rng: random.Random, spec: RingSpec, n: int, max_mult: int = 1, max_fp: int = 1) -> NSigmaSequence:
    trivials = [(s, rng.randint(0, max_mult)) for s in range(1, n + 1)]
    return block_form(spec, n, [t for t in trivials if t[1]], rng.randint(0, max_fp))


def random_member(rng: random.Random, spec: RingSpec, n: int, max_mult: int = 1, max_fp: int = 1) -> NSigmaSequence:
    """A random block form hidden by a random change of basis."""
    s = random_block_form(rng, spec, n, max_mult, max_fp)
    return conjugate(s, random_gl_tuple(rng, spec, s.ranks))


def random_member_with_ranks(rng: random.Random, spec: RingSpec, ranks: Sequence[int]) -> NSigmaSequence | None:
    forms = list(block_forms_for_ranks(ranks))
    if not forms:
        return None
    trivials, f = rng.choice(forms)
    s = block_form(spec, len(ranks), trivials, f)
    return conjugate(s, random_gl_tuple(rng, spec, s.ranks))


def random_candidate(rng: random.Random, spec: RingSpec, n: int, max_mult: int = 1, max_reduced: int = 1) -> NSigmaSequence:
    """A random candidate: a member plus an arbitrary reduced part, conjugated.

    Any sequence with all entries in ``(p)`` is a candidate since ``p^2 = 0``.
    """
    s = random_block_form(rng, spec, n, max_mult, 0)
    ranks = [rng.randint(0, max_reduced) for _ in range(n)]
    red = random_sequence(rng, spec, n, ranks, reduced=True)
    total = direct_sum(s, red)
    return conjugate(total, random_gl_tuple(rng, spec, total.ranks))


def random_commuting_square(
    rng: random.Random, a: NSigmaSequence, b: NSigmaSequence, tries: int = 20
) -> tuple[Matrix, Matrix]:
    """Random ``(phi_1, phi_2)`` with ``phi_2 alpha_1 = beta_1 phi_1``.

    ``phi_1`` is drawn at random until the square can be closed, falling back
    to ``phi_1 = 0``; ``phi_2`` is then a uniformly random solution.
    """
    spec = a.spec
    for attempt in range(tries + 1):
        if attempt < tries:
            phi1 = random_matrix(rng, spec, b.ranks[0], a.ranks[0])
        else:
            phi1 = la.zeros(spec, b.ranks[0], a.ranks[0])
        system = la.LinearSystem(spec)
        x = system.var("phi2", b.ranks[1], a.ranks[1])
        system.require_equal(x @ a.maps[0], b.maps[0] @ phi1)
        space = system.solve()
        if not space.is_empty:
            coeffs = [rng.randrange(o) for o in space.orders]
            return phi1, system.values(space.vector(coeffs))["phi2"]
    raise AssertionError("the zero square always commutes")
