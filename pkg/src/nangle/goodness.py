"""Good morphisms, (N3) fill-ins and minimal n-angle completions of a base map."""

from __future__ import annotations

from enum import Enum
from typing import Iterator

from . import linalg as la
from .angulation import is_n_angle
from .errors import Budget, BudgetExceeded, PreconditionError
from .linalg import LinearSystem, Matrix
from .sequences import (
    NSigmaSequence,
    SequenceMorphism,
    conjugate,
    direct_sum,
    f_p_sequence,
    is_morphism,
    mapping_cone,
    trivial_gamma,
)


class Outcome(str, Enum):
    FOUND = "FOUND"
    NONE_EXHAUSTIVE = "NONE_EXHAUSTIVE"
    NONE_WITHIN_BUDGET = "NONE_WITHIN_BUDGET"


def _require_angles(*seqs: NSigmaSequence) -> None:
    for s in seqs:
        if not is_n_angle(s):
            raise PreconditionError("expected an n-angle")


def is_good(phi: SequenceMorphism) -> bool:
    """A morphism of n-angles is good when its mapping cone is an n-angle."""
    if not is_morphism(phi):
        raise PreconditionError("is_good needs a morphism")
    _require_angles(phi.source, phi.target)
    return is_n_angle(mapping_cone(phi))


# -- fill-ins -----------------------------------------------------------------


def fill_in_system(a: NSigmaSequence, b: NSigmaSequence, phi1: Matrix, phi2: Matrix) -> tuple[LinearSystem, list]:
    """Unknowns ``phi_3..phi_n`` with every square after the first one commuting."""
    if a.n != b.n or a.spec != b.spec:
        raise PreconditionError("sequences live in different frames")
    n, spec = a.n, a.spec
    if phi1.shape != (b.ranks[0], a.ranks[0]) or phi2.shape != (b.ranks[1], a.ranks[1]):
        raise PreconditionError("phi_1 or phi_2 has the wrong shape")
    if phi2 @ a.maps[0] != b.maps[0] @ phi1:
        raise PreconditionError("the given square does not commute")
    system = LinearSystem(spec)
    comps: list = [system.const(phi1), system.const(phi2)]
    for i in range(2, n):
        comps.append(system.var(f"phi{i + 1}", b.ranks[i], a.ranks[i]))
    for i in range(1, n):
        system.require_equal(comps[(i + 1) % n] @ a.maps[i], b.maps[i] @ comps[i])
    return system, comps


def _fill_in_morphism(a, b, phi1, phi2, system, x) -> SequenceMorphism:
    vals = system.values(x)
    comps = (phi1, phi2) + tuple(vals[f"phi{i + 1}"] for i in range(2, a.n))
    return SequenceMorphism(a, b, comps)


def enumerate_fill_ins(
    a: NSigmaSequence, b: NSigmaSequence, phi1: Matrix, phi2: Matrix, budget: int | Budget | None = None
) -> Iterator[SequenceMorphism]:
    """Every ``(phi_1, phi_2, phi_3, ..., phi_n)`` that is a morphism, in lexicographic order."""
    system, _ = fill_in_system(a, b, phi1, phi2)
    space = system.solve()
    for x in la.enumerate_solutions(space, budget):
        yield _fill_in_morphism(a, b, phi1, phi2, system, x)


def count_fill_ins(a: NSigmaSequence, b: NSigmaSequence, phi1: Matrix, phi2: Matrix) -> int:
    system, _ = fill_in_system(a, b, phi1, phi2)
    return system.solve().count


def find_good_fill_in(
    a: NSigmaSequence, b: NSigmaSequence, phi1: Matrix, phi2: Matrix, budget: int | Budget | None = None
) -> SequenceMorphism | Outcome:
    """First fill-in, in enumeration order, whose mapping cone is an n-angle."""
    _require_angles(a, b)
    try:
        for phi in enumerate_fill_ins(a, b, phi1, phi2, budget):
            if is_n_angle(mapping_cone(phi)):
                return phi
    except BudgetExceeded:
        return Outcome.NONE_WITHIN_BUDGET
    return Outcome.NONE_EXHAUSTIVE


# -- completions --------------------------------------------------------------


def minimal_completion(f: Matrix, n: int) -> NSigmaSequence:
    """An n-angle with base ``f`` and no contractible summand avoiding the base.

    In Smith form ``f`` splits into unit pivots (a trivial summand at slot 1),
    ``p`` pivots (copies of ``F(p)``), zero columns (trivial at slot ``n``)
    and zero rows (trivial at slot 2).
    """
    spec = f.spec
    snf = la.smith_normal_form(f)
    n1, np_, _ = snf.counts
    zc = f.cols - n1 - np_
    zr = f.rows - n1 - np_
    parts = [
        trivial_gamma(spec, n, n1, 1),
        f_p_sequence(spec, n, np_),
        trivial_gamma(spec, n, zc, n),
        trivial_gamma(spec, n, zr, 2),
    ]
    model = direct_sum(*parts)
    us = [la.identity(spec, r) for r in model.ranks]
    # U f V = D, so f = U^-1 D V^-1
    us[0] = snf.V
    us[1] = la.inverse(snf.U)
    out = conjugate(model, us)
    assert out.maps[0] == f
    return out
