"""Octahedra (axiom N4) and the n-angle associated to an octahedron.

An octahedron has three rows ``A``, ``B``, ``C`` with ``B_1 = A_1``,
``C_1 = A_2``, ``C_2 = B_2`` and ``beta_1 = gamma_1 alpha_1``, together with
morphisms ``phi = (1, gamma_1, phi_3, ..., phi_n) : A -> B`` and
``psi = (alpha_1, 1, psi_3, ..., psi_n) : B -> C`` and diagonal maps
``lambda_i : A_i -> C_{i-1}`` for ``4 <= i <= n``.

The associated sequence has objects ``X_j = A_{j+2} + B_{j+1} + C_j`` (only
the summands with index between 3 and n are present), first map
``(alpha_3; phi_3)``, middle maps

    [[-alpha_{j+2},              0,          0      ],
     [(-1)^j phi_{j+2},  -beta_{j+1},        0      ],
     [lambda_{j+2},       psi_{j+1},     gamma_j    ]]

restricted to the summands present, and last map ``alpha_2 gamma_n``.
The diagonal maps only enter through this sequence, so the octahedron is
accepted when both vertical tuples are morphisms and the associated
sequence is an n-angle.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

from . import linalg as la
from .angulation import is_n_angle
from .errors import Budget, BudgetExceeded, PreconditionError
from .linalg import Affine, LinearSystem, Matrix
from .sequences import NSigmaSequence, SequenceMorphism, is_morphism, make_sequence

Key = tuple[str, int]


@dataclass(frozen=True)
class OctahedronWitness:
    a: NSigmaSequence
    b: NSigmaSequence
    c: NSigmaSequence
    phi: SequenceMorphism
    psi: SequenceMorphism
    lambdas: tuple[Matrix, ...]  # lambda_4 .. lambda_n

    @property
    def n(self) -> int:
        return self.a.n

    def lam(self, i: int) -> Matrix:
        return self.lambdas[i - 4]

    def to_json(self) -> dict:
        return {
            "a": self.a.to_json(),
            "b": self.b.to_json(),
            "c": self.c.to_json(),
            "phi": [m.to_json() for m in self.phi.components],
            "psi": [m.to_json() for m in self.psi.components],
            "lambdas": [m.to_json() for m in self.lambdas],
        }

    @classmethod
    def from_json(cls, obj, spec=None) -> "OctahedronWitness":
        a = NSigmaSequence.from_json(obj["a"], spec)
        b = NSigmaSequence.from_json(obj["b"], a.spec)
        c = NSigmaSequence.from_json(obj["c"], a.spec)
        phi = SequenceMorphism(a, b, tuple(Matrix.from_json(a.spec, m) for m in obj["phi"]))
        psi = SequenceMorphism(b, c, tuple(Matrix.from_json(a.spec, m) for m in obj["psi"]))
        lams = tuple(Matrix.from_json(a.spec, m) for m in obj["lambdas"])
        return cls(a, b, c, phi, psi, lams)


def check_frame(a: NSigmaSequence, b: NSigmaSequence, c: NSigmaSequence) -> None:
    """The solid data: shared objects and ``beta_1 = gamma_1 alpha_1``."""
    if not (a.n == b.n == c.n and a.spec == b.spec == c.spec):
        raise PreconditionError("rows live in different frames")
    if b.ranks[0] != a.ranks[0] or c.ranks[0] != a.ranks[1] or c.ranks[1] != b.ranks[1]:
        raise PreconditionError("rows do not share A_1, A_2 and B_2")
    if b.maps[0] != c.maps[0] @ a.maps[0]:
        raise PreconditionError("beta_1 must equal gamma_1 alpha_1")


# -- associated sequence as block maps ------------------------------------------


def _objects(n: int) -> list[list[Key]]:
    out = []
    for j in range(1, n + 1):
        keys = []
        if j + 2 <= n:
            keys.append(("A", j + 2))
        if 3 <= j + 1 <= n:
            keys.append(("B", j + 1))
        if j >= 3:
            keys.append(("C", j))
        out.append(keys)
    return out


def _assoc_blocks(n: int, get: Callable[[str, int], object], neg: Callable) -> list[dict]:
    """Nonzero blocks ``{(target key, source key): part}`` of each associated map."""
    objs = _objects(n)
    maps = []
    for j in range(1, n + 1):
        src, dst = set(objs[j - 1]), set(objs[j % n])
        blocks: dict = {}
        if j == 1:
            if ("A", 4) in dst:
                blocks[(("A", 4), ("A", 3))] = get("alpha", 3)
            blocks[(("B", 3), ("A", 3))] = get("phi", 3)
        elif j == n:
            blocks[(("A", 3), ("C", n))] = get("alpha", 2) @ get("gamma", n)
        else:
            cand = [
                (("A", j + 3), ("A", j + 2), lambda: neg(get("alpha", j + 2))),
                (("B", j + 2), ("A", j + 2), lambda: get("phi", j + 2) if j % 2 == 0 else neg(get("phi", j + 2))),
                (("B", j + 2), ("B", j + 1), lambda: neg(get("beta", j + 1))),
                (("C", j + 1), ("A", j + 2), lambda: get("lambda", j + 2)),
                (("C", j + 1), ("B", j + 1), lambda: get("psi", j + 1)),
                (("C", j + 1), ("C", j), lambda: get("gamma", j)),
            ]
            for t, s, make in cand:
                if t in dst and s in src:
                    blocks[(t, s)] = make()
        maps.append(blocks)
    return maps


def _ranks_of(a, b, c) -> Callable[[Key], int]:
    rows = {"A": a, "B": b, "C": c}
    return lambda key: rows[key[0]].ranks[key[1] - 1]


def _getter(w_a, w_b, w_c, phi_comps, psi_comps, lams) -> Callable[[str, int], object]:
    def get(kind: str, i: int):
        if kind == "alpha":
            return w_a.maps[i - 1]
        if kind == "beta":
            return w_b.maps[i - 1]
        if kind == "gamma":
            return w_c.maps[(i - 1) % w_c.n]
        if kind == "phi":
            return phi_comps[i - 1]
        if kind == "psi":
            return psi_comps[i - 1]
        if kind == "lambda":
            return lams[i - 4]
        raise KeyError(kind)

    return get


def associated_n_angle(w: OctahedronWitness) -> NSigmaSequence:
    a, b, c = w.a, w.b, w.c
    n, spec = a.n, a.spec
    check_frame(a, b, c)
    get = _getter(a, b, c, w.phi.components, w.psi.components, w.lambdas)
    rank = _ranks_of(a, b, c)
    objs = _objects(n)
    maps = []
    for j, blocks in enumerate(_assoc_blocks(n, get, lambda m: -m)):
        src, dst = objs[j], objs[(j + 1) % n]
        grid = [[blocks.get((t, s), la.zeros(spec, rank(t), rank(s))) for s in src] for t in dst]
        rows = sum(rank(t) for t in dst)
        cols = sum(rank(s) for s in src)
        maps.append(la.block(grid) if grid and grid[0] else la.zeros(spec, rows, cols))
    ranks = [sum(rank(k) for k in keys) for keys in objs]
    return make_sequence(spec, n, ranks, maps)


def octahedron_defects(w: OctahedronWitness) -> list[str]:
    """Human-readable list of failed conditions; empty when the octahedron is valid."""
    a, b, c = w.a, w.b, w.c
    out = []
    try:
        check_frame(a, b, c)
    except PreconditionError as exc:
        return [str(exc)]
    spec = a.spec
    for name, row in (("A", a), ("B", b), ("C", c)):
        if not is_n_angle(row):
            out.append(f"row {name} is not an n-angle")
    if w.phi.components[0] != la.identity(spec, a.ranks[0]) or w.phi.components[1] != c.maps[0]:
        out.append("phi must start (1, gamma_1)")
    if w.psi.components[0] != a.maps[0] or w.psi.components[1] != la.identity(spec, b.ranks[1]):
        out.append("psi must start (alpha_1, 1)")
    if not is_morphism(w.phi):
        out.append("phi is not a morphism")
    if not is_morphism(w.psi):
        out.append("psi is not a morphism")
    if len(w.lambdas) != max(a.n - 3, 0):
        out.append("wrong number of diagonal maps")
    elif not out and not is_n_angle(associated_n_angle(w)):
        out.append("associated sequence is not an n-angle")
    return out


def verify_octahedron(w: OctahedronWitness) -> bool:
    return not octahedron_defects(w)


# -- completion search ----------------------------------------------------------


def _block_product(left: dict, right: dict, spec) -> dict:
    """Blockwise product of two block maps; every product has a constant side."""
    out: dict = {}
    for (t, m), x in left.items():
        for (m2, s), y in right.items():
            if m2 != m:
                continue
            term = x @ y
            out[(t, s)] = out[(t, s)] + term if (t, s) in out else term
    return out


class _Frame:
    """Unknown matrices of an octahedron completion inside one linear system."""

    def __init__(self, a, b, c, phi_fixed=None, psi_fixed=None):
        self.a, self.b, self.c = a, b, c
        self.n, self.spec = a.n, a.spec
        self.system = LinearSystem(self.spec)
        n, s = self.n, self.system
        one_b2 = la.identity(self.spec, b.ranks[1])
        self.phi = [s.const(la.identity(self.spec, a.ranks[0])), s.const(c.maps[0])]
        self.psi = [s.const(a.maps[0]), s.const(one_b2)]
        for i in range(3, n + 1):
            self.phi.append(s.const(phi_fixed[i - 1]) if phi_fixed else s.var(f"phi{i}", b.ranks[i - 1], a.ranks[i - 1]))
        for i in range(3, n + 1):
            self.psi.append(s.const(psi_fixed[i - 1]) if psi_fixed else s.var(f"psi{i}", c.ranks[i - 1], b.ranks[i - 1]))
        self.lams = [s.var(f"lambda{i}", c.ranks[i - 2], a.ranks[i - 1]) for i in range(4, n + 1)]
        # re-read refs so every expression knows every unknown
        self.phi = [self._refresh(x) for x in self.phi]
        self.psi = [self._refresh(x) for x in self.psi]

    def _refresh(self, x: Affine) -> Affine:
        return x + self.system.zero(*x.shape)

    def require_morphism(self, comps, src, dst) -> None:
        n = self.n
        for i in range(n):
            self.system.require_equal(comps[(i + 1) % n] @ src.maps[i], dst.maps[i] @ comps[i])

    def require_associated_candidate(self) -> None:
        get = _getter(self.a, self.b, self.c, self.phi, self.psi, self.lams)
        s = self.system
        blocks = _assoc_blocks(self.n, lambda k, i: _as_affine(s, get(k, i)), lambda m: -m)
        n = self.n
        for j in range(n):
            for block in _block_product(blocks[(j + 1) % n], blocks[j], self.spec).values():
                s.require_zero(block)

    def values(self, x) -> tuple[tuple[Matrix, ...], tuple[Matrix, ...], tuple[Matrix, ...]]:
        phi = tuple(e.evaluate(x) for e in self.phi)
        psi = tuple(e.evaluate(x) for e in self.psi)
        lams = tuple(e.evaluate(x) for e in self.lams)
        return phi, psi, lams


def _as_affine(system: LinearSystem, x) -> Affine:
    return x if isinstance(x, Affine) else system.const(x)


# spaces at most this large are enumerated in full even when sampling
SAMPLE_THRESHOLD = 256


def solution_stream(space, budget: Budget, seed: int | None) -> Iterator:
    """All solutions in order, or seeded samples when ``seed`` is set and the space is large."""
    if space.is_empty:
        return
    if seed is None or space.count <= SAMPLE_THRESHOLD:
        yield from la.enumerate_solutions(space, budget)
        return
    rng = random.Random(seed)
    while True:
        budget.spend()
        yield space.vector([rng.randrange(o) for o in space.orders])


def complete_octahedron(
    a: NSigmaSequence,
    b: NSigmaSequence,
    c: NSigmaSequence,
    budget: int | Budget | None = None,
    phi: Sequence[Matrix] | None = None,
    psi: Sequence[Matrix] | None = None,
    extra: Callable[["_Frame"], None] | None = None,
    seed: int | None = None,
    psi_first: bool = False,
) -> Iterator[OctahedronWitness]:
    """Every octahedron on the given rows, optionally with ``phi`` or ``psi`` fixed.

    With neither fixed, one vertical morphism (``phi`` unless ``psi_first``)
    is chosen first, subject to ``extra``; the remaining unknowns then enter
    the morphism squares and the candidacy of the associated sequence
    linearly.  With ``seed`` set, large spaces of the first morphism are
    sampled: the lexicographically first morphisms often admit no completion
    while random ones nearly always do.  Every candidate spends budget.
    """
    check_frame(a, b, c)
    bud = Budget.coerce(budget)
    if phi is None and psi is None:
        frame = _Frame(a, b, c)
        if psi_first:
            frame.require_morphism(frame.psi, b, c)
        else:
            frame.require_morphism(frame.phi, a, b)
        if extra is not None:
            extra(frame)
        for x in solution_stream(frame.system.solve(), bud, seed):
            phis, psis, _ = frame.values(x)
            if psi_first:
                yield from complete_octahedron(a, b, c, bud, psi=psis, extra=extra)
            else:
                yield from complete_octahedron(a, b, c, bud, phi=phis, extra=extra)
        return
    frame = _Frame(a, b, c, phi_fixed=phi, psi_fixed=psi)
    frame.require_morphism(frame.phi, a, b)
    frame.require_morphism(frame.psi, b, c)
    frame.require_associated_candidate()
    if extra is not None:
        extra(frame)
    for x in la.enumerate_solutions(frame.system.solve(), bud):
        phis, psis, lams = frame.values(x)
        w = OctahedronWitness(a, b, c, SequenceMorphism(a, b, phis), SequenceMorphism(b, c, psis), lams)
        if is_n_angle(associated_n_angle(w)):
            yield w


def find_octahedron(
    a: NSigmaSequence, b: NSigmaSequence, c: NSigmaSequence, budget: int | Budget, seed: int = 0
) -> OctahedronWitness | None:
    """First valid octahedron found by seeded sampling, or ``None`` when the budget runs out."""
    try:
        return next(complete_octahedron(a, b, c, budget, seed=seed), None)
    except BudgetExceeded:
        return None
