"""Verdier good morphisms: factorizations through two octahedra sharing a row.

For a morphism ``phi : A -> B`` of n-angles the first octahedron has rows
``A``, ``S`` (base ``phi_2 alpha_1``) and ``T`` (base ``phi_2``) with
vertical morphisms ``mu_1 : A -> S`` and ``mu_2 : S -> T``.  The second has
rows ``R`` (base ``phi_1``), the same ``S`` and ``B``, with ``nu_1 : R -> S``
and ``nu_2 : S -> B``.  The morphism is Verdier good when
``phi_i = nu_{2i} mu_{1i}`` for ``3 <= i <= n``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import Budget, BudgetExceeded, PreconditionError
from .goodness import Outcome, minimal_completion
from .octahedron import OctahedronWitness, complete_octahedron, octahedron_defects
from .sequences import SequenceMorphism, direct_sum, is_morphism, trivial_gamma
from .angulation import is_n_angle

# inner searches for the second octahedron get at most this many steps per
# candidate first octahedron, so one hopeless candidate cannot eat the budget
INNER_CAP = 200


@dataclass(frozen=True)
class VerdierWitness:
    first: OctahedronWitness  # rows A, S, T; mu_1 = first.phi, mu_2 = first.psi
    second: OctahedronWitness  # rows R, S, B; nu_1 = second.phi, nu_2 = second.psi

    @property
    def mu1(self) -> SequenceMorphism:
        return self.first.phi

    @property
    def nu2(self) -> SequenceMorphism:
        return self.second.psi

    def to_json(self) -> dict:
        return {"first": self.first.to_json(), "second": self.second.to_json()}

    @classmethod
    def from_json(cls, obj, spec=None) -> "VerdierWitness":
        first = OctahedronWitness.from_json(obj["first"], spec)
        return cls(first, OctahedronWitness.from_json(obj["second"], first.a.spec))


def verdier_defects(phi: SequenceMorphism, w: VerdierWitness) -> list[str]:
    out = []
    a, b = phi.source, phi.target
    o1, o2 = w.first, w.second
    if o1.a != a:
        out.append("first octahedron does not start at the source")
    if o2.c != b:
        out.append("second octahedron does not end at the target")
    if o1.b != o2.b:
        out.append("the octahedra do not share the S row")
    if o1.c.maps[0] != phi.components[1]:
        out.append("T row must have base phi_2")
    if o2.a.maps[0] != phi.components[0]:
        out.append("R row must have base phi_1")
    if out:
        return out
    for name, o in (("first", o1), ("second", o2)):
        out.extend(f"{name} octahedron: {d}" for d in octahedron_defects(o))
    for i in range(2, a.n):
        if w.nu2.components[i] @ w.mu1.components[i] != phi.components[i]:
            out.append(f"phi_{i + 1} does not factor as nu_2 mu_1")
    return out


def verify_verdier(phi: SequenceMorphism, w: VerdierWitness) -> bool:
    return not verdier_defects(phi, w)


def _factorization(phi: SequenceMorphism, mu1: SequenceMorphism):
    def add(frame) -> None:
        for i in range(2, phi.n):
            frame.system.require_equal(frame.psi[i] @ mu1.components[i], phi.components[i])

    return add


def s_row_candidates(base, n: int, extra_bound: int) -> list:
    """Completions of ``base`` padded with trivial summands at slots ``3..n-1``.

    Those slots avoid ``S_1`` and ``S_2``, which the octahedra pin down.  A
    minimal completion alone can be too small for ``phi_i`` to factor through
    it (the identity of an n-angle with such summands is an example).
    """
    spec = base.spec
    core = minimal_completion(base, n)
    slots = list(range(3, n))
    cands = []
    for mults in itertools.product(range(extra_bound + 1), repeat=len(slots)):
        pads = [trivial_gamma(spec, n, m, s) for s, m in zip(slots, mults) if m]
        cands.append((sum(mults), mults, direct_sum(core, *pads) if pads else core))
    cands.sort(key=lambda t: (t[0], t[1]))
    return [c for _, _, c in cands]


def search_verdier(
    phi: SequenceMorphism, budget: int | Budget, seed: int = 0, extra_bound: int = 1
) -> VerdierWitness | Outcome:
    """Look for a Verdier witness.

    ``R`` and ``T`` are minimal completions of ``phi_1`` and ``phi_2``; the
    shared row ``S`` runs over :func:`s_row_candidates`, each with an equal
    share of the budget.  Candidate first octahedra are drawn by seeded
    sampling; for each, the second octahedron is searched with ``nu_2``
    constrained linearly by the factorization.  Running out of budget gives
    ``NONE_WITHIN_BUDGET``.
    """
    if not is_morphism(phi):
        raise PreconditionError("search_verdier needs a morphism")
    a, b = phi.source, phi.target
    if not (is_n_angle(a) and is_n_angle(b)):
        raise PreconditionError("source and target must be n-angles")
    n = a.n
    phi1, phi2 = phi.components[0], phi.components[1]
    t_row = minimal_completion(phi2, n)
    r_row = minimal_completion(phi1, n)
    bud = Budget.coerce(budget)
    cands = s_row_candidates(phi2 @ a.maps[0], n, extra_bound)
    share = None if bud.limit is None else max(bud.limit // len(cands), 1)
    for s_row in cands:
        part = Budget(share if share is None else min(share, bud.limit - bud.used) or 1)
        found = _search_with_row(phi, a, b, r_row, s_row, t_row, part, seed)
        try:
            bud.spend(max(part.used, 1))
        except BudgetExceeded:
            pass
        if found is not None:
            return found
        if bud.limit is not None and bud.used >= bud.limit:
            break
    return Outcome.NONE_WITHIN_BUDGET


def _search_with_row(phi, a, b, r_row, s_row, t_row, bud: Budget, seed: int) -> VerdierWitness | None:
    try:
        for k, first in enumerate(complete_octahedron(a, s_row, t_row, bud, seed=seed)):
            cap = INNER_CAP if bud.limit is None else min(INNER_CAP, bud.limit - bud.used)
            inner = Budget(max(cap, 1))
            try:
                second = next(
                    complete_octahedron(
                        r_row, s_row, b, inner, extra=_factorization(phi, first.phi), seed=seed + k + 1, psi_first=True
                    ),
                    None,
                )
            except BudgetExceeded:
                second = None
            bud.spend(max(inner.used, 1))
            if second is not None:
                w = VerdierWitness(first, second)
                assert verify_verdier(phi, w)
                return w
    except BudgetExceeded:
        pass
    return None
