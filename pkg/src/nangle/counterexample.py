"""The morphism ``(0, ..., 0, p) : F(p) -> F(p)`` and its non-extendability report."""

from __future__ import annotations

from . import linalg as la
from .angulation import decompose, is_n_angle, monodromy, verify_summand_lemma
from .errors import Budget, BudgetExceeded, PreconditionError
from .goodness import is_good
from .middling import _Context, _branch_search, _branches, column_reps, search_middling_extension
from .ring import RingSpec
from .sequences import (
    SequenceMorphism,
    check_parity,
    f_p_sequence,
    is_morphism,
    is_weak_isomorphism,
    mapping_cone,
)


def counterexample_morphism(n: int, spec: RingSpec) -> SequenceMorphism:
    """``phi_i = 0`` for ``i < n`` and ``phi_n = p`` on ``F(p)^1``."""
    if n < 4:
        raise PreconditionError("the counterexample needs n >= 4")
    check_parity(n, spec)
    a = f_p_sequence(spec, n, 1)
    zero = la.zeros(spec, 1, 1)
    comps = (zero,) * (n - 1) + (la.scalar(spec, spec.p),)
    return SequenceMorphism(a, a, comps)


def _cone_summary(phi: SequenceMorphism) -> dict:
    cone = mapping_cone(phi)
    d = decompose(cone)
    out = {"n_angle": is_n_angle(cone), "obstruction": d.obstruction, "monodromy": None}
    if d.residual is not None and d.residual.total_rank:
        mono = monodromy(d.residual)
        out["monodromy"] = mono.value if hasattr(mono, "value") else mono.tolist()
    return out


def constraint_trace(phi: SequenceMorphism, rank_bound: int) -> dict:
    """Normal forms of every column and what each branch of the search ran into.

    A column with base ``p`` contains ``F(p)`` as a summand and one with base
    ``0`` contains the two rotated trivial summands; these pin the normal
    forms that the search runs over.  Per branch the trace lists how many
    partial horizontal solutions survive at each column and how many complete
    ones fail the row test.  In this composition convention the candidacy of
    row 3 across the wrap reads ``gamma_1 gamma_n = 0``.
    """
    n = phi.n
    reps = tuple(tuple(column_reps(phi.components[j], n, rank_bound)) for j in range(n))
    columns = []
    for j, col_reps in enumerate(reps):
        lemma = verify_summand_lemma(col_reps[0].column) if col_reps else None
        columns.append(
            {
                "column": j + 1,
                "base": None if lemma is None else lemma.base,
                "located_summands": [] if lemma is None else list(lemma.located),
                "normal_forms": [
                    {
                        "ranks": list(r.column.ranks),
                        "trivial_summands": [[s, m] for s, m in r.form[0]],
                        "fp_rank": r.form[1],
                    }
                    for r in col_reps
                ],
            }
        )
    ctx = _Context(phi, reps)
    branches = []
    for br in _branches(reps):
        stats: dict = {}
        try:
            found = _branch_search(ctx, br, Budget(None), stats)
        except BudgetExceeded:  # pragma: no cover - unlimited budget
            found = None
        branches.append(
            {
                "branch": list(br),
                "solutions_per_column": stats["solutions_per_column"],
                "rows_rejected": stats["rows_rejected"],
                "extension_found": found is not None,
            }
        )
    return {"columns": columns, "branches": branches, "wrap_condition": "gamma_1 gamma_n = 0"}


def run_counterexample(n: int, spec: RingSpec, rank_bound: int, budget: int, jobs: int = 1, trace: bool = True) -> dict:
    phi = counterexample_morphism(n, spec)
    result = search_middling_extension(phi, rank_bound, budget, jobs=jobs)
    report = {
        "morphism": phi.to_json(),
        "is_morphism": is_morphism(phi),
        "is_weak_isomorphism": is_weak_isomorphism(phi),
        "is_good": is_good(phi),
        "cone": _cone_summary(phi),
        "search": result.to_json(),
        "verdict": result.outcome.value,
    }
    # the trace reruns every branch without a budget, so only when complete
    if trace and result.outcome.value == "NONE_EXHAUSTIVE":
        report["trace"] = constraint_trace(phi, rank_bound)
    else:
        report["trace"] = None
    return report
