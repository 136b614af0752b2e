"""Middling good morphisms: (n+1) x (n+1) diagrams whose rows and columns are n-angles.

Grid conventions (1-based, cyclic): object ``(i, j)`` has rank ``r[i][j]``;
``alpha[i][j] : (i, j) -> (i, j+1)`` and ``phi[i][j] : (i, j) -> (i+1, j)``,
where row ``n+1`` is row 1 and column ``n+1`` is column 1.  Every square
``phi[i][j+1] alpha[i][j] = alpha[i+1][j] phi[i][j]`` commutes except the
corner square at ``(n, n)``, which carries the sign ``(-1)^n``.

Search strategy for extending a morphism ``A -> B`` (rows 1 and 2):

* Column ``j`` is an n-angle with top ``A_j -> B_j`` fixed.  Up to an
  isomorphism that is the identity on the top two objects, it equals
  ``conjugate(S, (U_1, U_2, 1, ..., 1))`` for a block form ``S`` and a pair
  ``(U_1, U_2)``; pairs differing by the top part of an automorphism of ``S``
  give isomorphic columns, so only one pair per orbit is kept.
* Row ``i`` maps form, for each ``j``, a morphism ``Col_j -> Col_{j+1}`` whose
  first two components are the given row maps; the last one lands in
  ``Col_1`` with its final map twisted by ``(-1)^n``.  These are found
  column by column as solutions of linear systems, with the candidacy of rows
  ``3..n`` added as linear constraints against the previous column.
* Complete horizontal tuples are accepted when rows ``3..n`` are n-angles.

Interior isomorphisms transport any extension to one of this normal form, so
exhausting the branches certifies that no extension with interior ranks at
most ``rank_bound`` exists.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from . import linalg as la
from .angulation import block_form, block_forms_for_ranks, is_n_angle
from .errors import Budget, BudgetExceeded, PreconditionError
from .goodness import Outcome
from .linalg import LinearSystem, Matrix
from .ring import RingSpec
from .sequences import NSigmaSequence, SequenceMorphism, conjugate, is_morphism, make_sequence

# top pairs are orbit-reduced only when there are at most this many of them
ORBIT_LIMIT = 20000
# extensions of a top automorphism are looked for among this many solutions
EXTENSION_TRIES = 64


@dataclass(frozen=True)
class MiddlingDiagram:
    spec: RingSpec
    n: int
    ranks: tuple[tuple[int, ...], ...]  # ranks[i-1][j-1]
    alpha: tuple[tuple[Matrix, ...], ...]  # alpha[i-1][j-1]
    phi: tuple[tuple[Matrix, ...], ...]  # phi[i-1][j-1]

    def row(self, i: int) -> NSigmaSequence:
        return make_sequence(self.spec, self.n, self.ranks[i - 1], self.alpha[i - 1])

    def column(self, j: int) -> NSigmaSequence:
        n = self.n
        return make_sequence(self.spec, n, [self.ranks[i][j - 1] for i in range(n)], [self.phi[i][j - 1] for i in range(n)])

    def transpose(self) -> "MiddlingDiagram":
        n = self.n
        ranks = tuple(tuple(self.ranks[j][i] for j in range(n)) for i in range(n))
        alpha = tuple(tuple(self.phi[j][i] for j in range(n)) for i in range(n))
        phi = tuple(tuple(self.alpha[j][i] for j in range(n)) for i in range(n))
        return MiddlingDiagram(self.spec, n, ranks, alpha, phi)

    def to_json(self) -> dict:
        return {
            "ring": self.spec.to_json(),
            "n": self.n,
            "ranks": [list(r) for r in self.ranks],
            "alpha": [[m.to_json() for m in row] for row in self.alpha],
            "phi": [[m.to_json() for m in row] for row in self.phi],
        }

    @classmethod
    def from_json(cls, obj) -> "MiddlingDiagram":
        spec = RingSpec.from_json(obj["ring"])
        alpha = tuple(tuple(Matrix.from_json(spec, m) for m in row) for row in obj["alpha"])
        phi = tuple(tuple(Matrix.from_json(spec, m) for m in row) for row in obj["phi"])
        return cls(spec, int(obj["n"]), tuple(tuple(r) for r in obj["ranks"]), alpha, phi)


def middling_defects(d: MiddlingDiagram) -> list[str]:
    n = d.n
    out = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            a = d.alpha[i - 1][j - 1]
            p = d.phi[i - 1][j - 1]
            if a.shape != (d.ranks[i - 1][j % n], d.ranks[i - 1][j - 1]):
                return [f"alpha[{i}][{j}] has the wrong shape"]
            if p.shape != (d.ranks[i % n][j - 1], d.ranks[i - 1][j - 1]):
                return [f"phi[{i}][{j}] has the wrong shape"]
    for i in range(1, n + 1):
        if not is_n_angle(d.row(i)):
            out.append(f"row {i} is not an n-angle")
        if not is_n_angle(d.column(i)):
            out.append(f"column {i} is not an n-angle")
    for i in range(n):
        for j in range(n):
            lhs = d.phi[i][(j + 1) % n] @ d.alpha[i][j]
            rhs = d.alpha[(i + 1) % n][j] @ d.phi[i][j]
            if i == n - 1 and j == n - 1:
                rhs = rhs.sign(-1 if n % 2 else 1)
            if lhs != rhs:
                out.append(f"square ({i + 1}, {j + 1}) fails")
    return out


def verify_middling(d: MiddlingDiagram) -> bool:
    return not middling_defects(d)


# -- column representatives -----------------------------------------------------


@dataclass(frozen=True)
class ColumnRep:
    form: tuple  # (trivial summands, fp rank)
    pair: tuple[Matrix, Matrix]
    column: NSigmaSequence

    def to_json(self) -> dict:
        trivials, f = self.form
        return {
            "trivial_summands": [{"slot": s, "multiplicity": m} for s, m in trivials],
            "fp_rank": f,
            "top": [self.pair[0].to_json(), self.pair[1].to_json()],
            "column": self.column.to_json(),
        }


def _top_extends(s: NSigmaSequence, g1: Matrix, g2: Matrix) -> bool:
    """Whether ``(g1, g2, ...)`` extends to an automorphism of ``s`` (sufficient check)."""
    spec, n = s.spec, s.n
    system = LinearSystem(spec)
    comps = [system.const(g1), system.const(g2)]
    for k in range(2, n):
        comps.append(system.var(f"g{k + 1}", s.ranks[k], s.ranks[k]))
    for k in range(n):
        system.require_equal(comps[(k + 1) % n] @ s.maps[k], s.maps[k] @ comps[k])
    space = system.solve()
    try:
        for x in la.enumerate_solutions(space, EXTENSION_TRIES):
            vals = system.values(x)
            if all(la.is_invertible(vals[f"g{k + 1}"]) for k in range(2, n)):
                return True
    except BudgetExceeded:
        pass
    return False


def column_reps(base: Matrix, n: int, rank_bound: int) -> list[ColumnRep]:
    """Normal-form n-angles with top ``base`` and interior ranks at most ``rank_bound``."""
    spec = base.spec
    a, b = base.cols, base.rows
    g_a = la.general_linear_group(spec, a)
    g_b = la.general_linear_group(spec, b)
    reps = []
    for interior in itertools.product(range(rank_bound + 1), repeat=n - 2):
        ranks = (a, b) + interior
        for trivials, f in block_forms_for_ranks(ranks):
            s = block_form(spec, n, trivials, f)
            s1 = s.maps[0].a
            # pairs with U_2 S_1 = base U_1
            pairs = []
            lhs = spec.matmul(g_b, s1)  # U_2 S_1 for every U_2
            for u1 in g_a:
                target = spec.matmul(base.a, u1)
                for idx in np.flatnonzero(np.all(lhs == target, axis=(1, 2))):
                    pairs.append((u1, g_b[idx]))
            if not pairs:
                continue
            keep = _orbit_reps(s, pairs, g_a, g_b) if len(pairs) <= ORBIT_LIMIT else pairs
            for u1, u2 in keep:
                m1, m2 = Matrix._raw(spec, u1), Matrix._raw(spec, u2)
                us = [m1, m2] + [la.identity(spec, r) for r in interior]
                reps.append(ColumnRep((trivials, f), (m1, m2), conjugate(s, us)))
    return reps


def _orbit_reps(s: NSigmaSequence, pairs, g_a, g_b) -> list:
    """One pair per orbit under top parts of automorphisms of ``s``.

    Any subset of the true top group keeps the search complete: a pair is only
    dropped when it equals a kept pair times a verified automorphism top.
    """
    spec = s.spec
    s1 = s.maps[0].a
    tops = []
    lhs = spec.matmul(g_b, s1)
    for h1 in g_a:
        rhs = spec.matmul(s1, h1)
        for idx in np.flatnonzero(np.all(lhs == rhs, axis=(1, 2))):
            h2 = g_b[idx]
            if _top_extends(s, Matrix._raw(spec, h1), Matrix._raw(spec, h2)):
                tops.append((h1, h2))
    key = lambda u1, u2: (u1.tobytes(), u2.tobytes())
    seen = set()
    reps = []
    for u1, u2 in pairs:
        if key(u1, u2) in seen:
            continue
        reps.append((u1, u2))
        for h1, h2 in tops:
            seen.add(key(spec.matmul(u1, h1), spec.matmul(u2, h2)))
    return reps


def _twist(col: NSigmaSequence) -> NSigmaSequence:
    n = col.n
    sign = -1 if n % 2 else 1
    maps = list(col.maps[:-1]) + [col.maps[-1].sign(sign)]
    return make_sequence(col.spec, n, col.ranks, maps)


# -- search ------------------------------------------------------------------------


@dataclass
class MiddlingResult:
    outcome: Outcome
    diagram: MiddlingDiagram | None
    budget: int
    budget_used: int
    branches_total: int
    branches_explored: int
    column_rep_counts: tuple[int, ...]
    rank_bound: int
    branch: tuple[int, ...] | None = None
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "verdict": self.outcome.value,
            "diagram": None if self.diagram is None else self.diagram.to_json(),
            "budget": self.budget,
            "budget_used": self.budget_used,
            "branches_total": self.branches_total,
            "branches_explored": self.branches_explored,
            "column_representatives": list(self.column_rep_counts),
            "rank_bound": self.rank_bound,
            "branch": None if self.branch is None else list(self.branch),
        }


@dataclass(frozen=True)
class _Context:
    phi: SequenceMorphism
    reps: tuple[tuple[ColumnRep, ...], ...]


def _branch_search(
    ctx: _Context, branch: Sequence[int], budget: Budget, stats: dict | None = None
) -> MiddlingDiagram | None:
    """Depth-first search over horizontal morphisms for one tuple of column reps.

    ``stats``, when given, collects the number of solutions met at each depth
    and how many complete tuples failed the row test.
    """
    if stats is not None:
        stats.setdefault("solutions_per_column", [0] * ctx.phi.n)
        stats.setdefault("rows_rejected", 0)
    phi = ctx.phi
    a, b = phi.source, phi.target
    n, spec = a.n, a.spec
    cols = [ctx.reps[j][k].column for j, k in enumerate(branch)]
    targets = cols[1:] + [_twist(cols[0])]
    chosen: list[list[Matrix]] = []

    def level(j: int) -> MiddlingDiagram | None:
        src, dst = cols[j], targets[j]
        system = LinearSystem(spec)
        comps = [system.const(a.maps[j]), system.const(b.maps[j])]
        for i in range(2, n):
            comps.append(system.var(f"x{i + 1}", dst.ranks[i], src.ranks[i]))
        for i in range(n):
            system.require_equal(comps[(i + 1) % n] @ src.maps[i], dst.maps[i] @ comps[i])
        for i in range(2, n):
            if j > 0:
                system.require_zero(comps[i] @ chosen[j - 1][i])
            if j == n - 1:
                system.require_zero(chosen[0][i] @ comps[i])
        space = system.solve()
        for x in la.enumerate_solutions(space, budget):
            vals = system.values(x)
            chosen.append([a.maps[j], b.maps[j]] + [vals[f"x{i + 1}"] for i in range(2, n)])
            if stats is not None:
                stats["solutions_per_column"][j] += 1
            if j == n - 1:
                d = _assemble(phi, cols, chosen)
                if all(is_n_angle(d.row(i)) for i in range(3, n + 1)):
                    return d
                if stats is not None:
                    stats["rows_rejected"] += 1
            else:
                found = level(j + 1)
                if found is not None:
                    return found
            chosen.pop()
        return None

    return level(0)


def _assemble(phi: SequenceMorphism, cols: Sequence[NSigmaSequence], chosen) -> MiddlingDiagram:
    n = phi.n
    ranks = tuple(tuple(cols[j].ranks[i] for j in range(n)) for i in range(n))
    alpha = tuple(tuple(chosen[j][i] for j in range(n)) for i in range(n))
    vert = tuple(tuple(cols[j].maps[i] for j in range(n)) for i in range(n))
    return MiddlingDiagram(phi.spec, n, ranks, alpha, vert)


# worker state for process pools
_CTX: _Context | None = None


def _init_worker(ctx: _Context) -> None:
    global _CTX
    _CTX = ctx


def _run_branch(args) -> tuple[MiddlingDiagram | None, int, bool]:
    branch, limit = args
    bud = Budget(limit)
    try:
        d = _branch_search(_CTX, branch, bud)
        return d, bud.used, False
    except BudgetExceeded:
        return None, bud.used, True


def _branches(reps) -> Iterator[tuple[int, ...]]:
    return itertools.product(*(range(len(r)) for r in reps))


def search_middling_extension(
    phi: SequenceMorphism, rank_bound: int, budget: int, jobs: int = 1
) -> MiddlingResult:
    """Complete search for a middling diagram extending ``phi`` within ``rank_bound``.

    Branches (tuples of column representatives) are explored in lexicographic
    order.  Each branch's outcome and step count do not depend on the other
    branches, and they are merged in branch order, so the verdict, the witness
    and the reported budget use are the same for every ``jobs`` value.
    """
    if not is_morphism(phi):
        raise PreconditionError("search_middling_extension needs a morphism")
    if not (is_n_angle(phi.source) and is_n_angle(phi.target)):
        raise PreconditionError("source and target must be n-angles")
    if rank_bound < 0 or budget <= 0:
        raise PreconditionError("rank_bound must be >= 0 and budget positive")
    n = phi.n
    reps = tuple(tuple(column_reps(phi.components[j], n, rank_bound)) for j in range(n))
    counts = tuple(len(r) for r in reps)
    ctx = _Context(phi, reps)
    total = math.prod(counts)
    result = MiddlingResult(Outcome.NONE_EXHAUSTIVE, None, budget, 0, total, 0, counts, rank_bound)
    if not total:
        return result

    used = 0

    def settle(k: int, br, d, steps: int, exhausted: bool) -> bool:
        nonlocal used
        result.branches_explored = k + 1
        if exhausted or used + steps > budget:
            result.outcome = Outcome.NONE_WITHIN_BUDGET
            result.budget_used = budget
            return True
        used += steps
        result.budget_used = used
        if d is not None:
            result.outcome = Outcome.FOUND
            result.diagram = d
            result.branch = br
            return True
        return False

    if jobs <= 1:
        _init_worker(ctx)
        for k, br in enumerate(_branches(reps)):
            d, steps, exhausted = _run_branch((br, max(budget - used, 1)))
            if settle(k, br, d, steps, exhausted):
                break
        return result

    with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker, initargs=(ctx,)) as pool:
        # every branch gets the full budget; the merge below applies the
        # cumulative limit exactly as the sequential loop does
        branches = list(_branches(reps))
        results = pool.map(_run_branch, [(br, budget) for br in branches], chunksize=1)
        for k, (d, steps, exhausted) in enumerate(results):
            if settle(k, branches[k], d, steps, exhausted):
                pool.shutdown(wait=False, cancel_futures=True)
                break
    return result
