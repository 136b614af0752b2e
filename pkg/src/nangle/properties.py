"""Seeded invariant suite behind ``nangle props``.

Case ``k`` runs property ``k mod len(PROPERTIES)`` with its own generator
seeded from ``(seed, k)``, so results do not depend on how many cases run
before it.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable

from . import linalg as la
from .angulation import (
    decide_contractible_homotopy,
    is_contractible,
    is_n_angle,
    n_angle_certificate,
    oracle_is_n_angle,
    strip_units,
)
from .generators import (
    random_candidate,
    random_commuting_square,
    random_gl_tuple,
    random_matrix,
    random_member,
    random_sequence,
)
from .goodness import Outcome, find_good_fill_in, is_good, minimal_completion
from .middling import search_middling_extension, verify_middling
from .octahedron import find_octahedron, verify_octahedron
from .ring import RingSpec
from .sequences import (
    NSigmaSequence,
    conjugate,
    direct_sum,
    identity_morphism,
    is_exact,
    mapping_cone,
    rotate_left,
    rotate_right,
)

Check = Callable[[random.Random], "str | None"]

Z4, Z9, F2E = RingSpec.parse("z4"), RingSpec.parse("z9"), RingSpec.parse("f2eps")
# frames where the exotic angulation exists
FRAMES = ((Z4, 4), (Z9, 4), (F2E, 5), (Z4, 3), (F2E, 4), (Z4, 6))

def _frame(rng: random.Random) -> tuple[RingSpec, int]:
    return FRAMES[rng.randrange(len(FRAMES))]

def ring_laws(rng: random.Random) -> str | None:
    spec, _ = _frame(rng)
    x, y, z = (rng.randrange(spec.order) for _ in range(3))
    if spec.mul(x, spec.add(y, z)) != spec.add(spec.mul(x, y), spec.mul(x, z)):
        return f"distributivity fails at {x}, {y}, {z}"
    if spec.mul(spec.mul(x, y), z) != spec.mul(x, spec.mul(y, z)):
        return f"associativity fails at {x}, {y}, {z}"
    if spec.is_unit_code(x) and spec.mul(x, spec.inv_code(x)) != 1:
        return f"inverse of {x} is wrong"
    if spec.mul(spec.p, spec.p) != 0:
        return "p^2 is not zero"
    return None

def smith_invariants(rng: random.Random) -> str | None:
    spec, _ = _frame(rng)
    m = random_matrix(rng, spec, rng.randint(0, 4), rng.randint(0, 4))
    snf = la.smith_normal_form(m)
    if snf.U @ m @ snf.V != snf.diagonal_matrix():
        return "U M V != D"
    if not (la.is_invertible(snf.U) and la.is_invertible(snf.V)):
        return "transforms are not invertible"
    if snf.image_size * snf.kernel_size != spec.order**m.cols:
        return "|image| |kernel| != |R|^cols"
    return None

def solve_round_trip(rng: random.Random) -> str | None:
    spec, _ = _frame(rng)
    m = random_matrix(rng, spec, rng.randint(1, 3), rng.randint(1, 3))
    x = random_matrix(rng, spec, m.cols, 1)
    b = m @ x
    space = la.solve(m, b.a[:, 0])
    if space.is_empty:
        return "consistent system reported empty"
    if space.count != la.kernel_size(m):
        return "solution count differs from the kernel size"
    for sol in itertools.islice(la.enumerate_solutions(space), 64):
        if m @ la.Matrix._raw(spec, sol.reshape(-1, 1)) != b:
            return "enumerated vector does not solve the system"
    return None

def member_certificate(rng: random.Random) -> str | None:
    spec, n = _frame(rng)
    a = random_member(rng, spec, n)
    d = n_angle_certificate(a)
    if d is None:
        return "hidden block form not recognised"
    if d.reassemble(spec, n) != a:
        return "certificate does not reassemble the input"
    if not is_exact(a):
        return "member is not exact"
    if not (is_n_angle(rotate_left(a)) and is_n_angle(rotate_right(a))):
        return "rotation left the class"
    return None

def closure(rng: random.Random) -> str | None:
    spec, n = _frame(rng)
    s = direct_sum(random_member(rng, spec, n), random_member(rng, spec, n))
    if not is_n_angle(conjugate(s, random_gl_tuple(rng, spec, s.ranks))):
        return "sum or conjugate of members is not a member"
    return None

def oracle_agreement(rng: random.Random) -> str | None:
    ranks = [rng.randint(0, 1) for _ in range(4)]
    a = random_sequence(rng, Z4, 4, ranks)
    if is_n_angle(a) != oracle_is_n_angle(a, 10**6):
        return f"membership disagrees with the oracle on {a}"
    return None

def contractibility_agreement(rng: random.Random) -> str | None:
    spec, n = _frame(rng)
    a = random_candidate(rng, spec, n)
    d = strip_units(a)
    by_strip = d.residual is None and d.fp_rank == 0
    if (decide_contractible_homotopy(a) is not None) != by_strip:
        return "homotopy and stripping disagree"
    return None

def cone_of_identity(rng: random.Random) -> str | None:
    spec, n = _frame(rng)
    a = random_member(rng, spec, n)
    if not is_contractible(mapping_cone(identity_morphism(a))):
        return "cone of an identity is not contractible"
    return None

def good_fill_in(rng: random.Random) -> str | None:
    spec, n = Z4, 4
    a, b = (random_member(rng, spec, n, 1, 1) for _ in range(2))
    phi1, phi2 = random_commuting_square(rng, a, b)
    phi = find_good_fill_in(a, b, phi1, phi2, 10**5)
    if isinstance(phi, Outcome):
        return f"no good fill-in ({phi.value})"
    if not is_good(phi):
        return "returned fill-in is not good"
    return None

def octahedron_round_trip(rng: random.Random) -> str | None:
    spec, n = _frame(rng)
    a = random_member(rng, spec, n, 1, 1)
    g1 = random_matrix(rng, spec, rng.randint(0, 2), a.ranks[1])
    c = minimal_completion(g1, n)
    b = minimal_completion(g1 @ a.maps[0], n)
    w = find_octahedron(a, b, c, 2000, seed=rng.randrange(2**32))
    if w is not None and not verify_octahedron(w):
        return "returned octahedron does not verify"
    return None

def middling_round_trip(rng: random.Random) -> str | None:
    spec, n = Z4, 4
    a = random_member(rng, spec, n, 1, 0)
    if max(a.ranks) > 1:
        return None
    res = search_middling_extension(identity_morphism(a), 1, 10**4)
    if res.diagram is None:
        return None
    if not verify_middling(res.diagram):
        return "returned diagram does not verify"
    if not verify_middling(res.diagram.transpose()):
        return "transpose of a verified diagram fails"
    return None

def json_round_trip(rng: random.Random) -> str | None:
    spec, n = _frame(rng)
    a = random_candidate(rng, spec, n)
    if NSigmaSequence.from_json(a.to_json()) != a:
        return "sequence JSON round trip changed the data"
    return None

PROPERTIES: dict[str, Check] = {
    "ring_laws": ring_laws,
    "smith_invariants": smith_invariants,
    "solve_round_trip": solve_round_trip,
    "member_certificate": member_certificate,
    "closure": closure,
    "oracle_agreement": oracle_agreement,
    "contractibility_agreement": contractibility_agreement,
    "cone_of_identity": cone_of_identity,
    "good_fill_in": good_fill_in,
    "octahedron_round_trip": octahedron_round_trip,
    "middling_round_trip": middling_round_trip,
    "json_round_trip": json_round_trip,
}

@dataclass
class PropertyTally:
    cases: int = 0
    passed: int = 0
    failures: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"cases": self.cases, "passed": self.passed, "failures": self.failures}

def run_properties(seed: int, cases: int, max_failures: int = 5) -> dict:
    names = list(PROPERTIES)
    tallies = {name: PropertyTally() for name in names}
    for k in range(cases):
        name = names[k % len(names)]
        rng = random.Random(f"{seed}:{k}")
        tally = tallies[name]
        tally.cases += 1
        detail = PROPERTIES[name](rng)
        if detail is None:
            tally.passed += 1
        elif len(tally.failures) < max_failures:
            tally.failures.append({"case": k, "detail": detail})
    all_passed = all(t.passed == t.cases for t in tallies.values())
    return {
        "properties": {name: t.to_json() for name, t in tallies.items()},
        "cases": cases,
        "all_passed": all_passed,
    }
