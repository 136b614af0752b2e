"""Membership in the exotic angulation and contractibility.

The n-angles are the sequences isomorphic to ``C + F(p)^f`` with ``C`` a
contractible candidate.  Membership is decided by :func:`strip_units`:

1. While some structure map has a unit entry, change bases so that entry is
   an isolated ``1``.  Candidacy then forces the adjacent row and column to
   vanish, so a copy of ``trivial_gamma(1, slot)`` splits off.
2. What remains has every entry in ``(p)``.  Writing ``alpha_i = p * B_i``,
   the remainder is isomorphic to ``F(p)^f`` iff all ranks equal ``f``, every
   residue matrix ``B_i`` is invertible and the monodromy
   ``B_n ... B_1`` is the identity over the residue field.

Why this decides membership: the category of sequences is Krull-Schmidt, a
contractible summand of a sequence with all entries in ``(p)`` is zero
(``1 = Theta alpha + alpha Theta`` would put ``1`` in ``(p)``), so contractible
candidates are exactly sums of trivial sequences; and ``p B`` conjugates to
``p I`` iff the residue matrices conjugate to ``I``, which along the cycle
forces the monodromy to be ``I``.  :func:`oracle_is_n_angle` checks the same
predicate by brute force over block forms and basis changes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Sequence

import numpy as np

from . import linalg as la
from .errors import BudgetExceeded, PreconditionError
from .linalg import LinearSystem, Matrix
from .ring import RingSpec
from .sequences import (
    NSigmaSequence,
    SequenceMorphism,
    compose,
    direct_sum,
    f_p_sequence,
    identity_morphism,
    is_candidate,
    is_morphism,
    make_sequence,
    rotate_left,
    rotate_right,
    trivial_gamma,
    zero_sequence,
)


class Monodromy(str, Enum):
    NOT_SQUARE = "NOT_SQUARE"


NOT_SQUARE = Monodromy.NOT_SQUARE


# -- contracting homotopies ---------------------------------------------------


@dataclass(frozen=True)
class ContractingHomotopy:
    """``Theta_i : A_{i+1} -> A_i`` (``Theta_n : A_1 -> A_n``)."""

    thetas: tuple[Matrix, ...]


def homotopy_defects(a: NSigmaSequence, thetas: Sequence[Matrix]) -> list[int]:
    """Positions ``i`` where ``Theta_i alpha_i + alpha_{i-1} Theta_{i-1} != 1``."""
    n = a.n
    bad = []
    for i in range(n):
        lhs = thetas[i] @ a.maps[i] + a.maps[i - 1] @ thetas[i - 1]
        if lhs != la.identity(a.spec, a.ranks[i]):
            bad.append(i + 1)
    return bad


def decide_contractible_homotopy(a: NSigmaSequence) -> ContractingHomotopy | None:
    """Solve the homotopy identities as one linear system; ``None`` if unsolvable."""
    n, spec = a.n, a.spec
    system = LinearSystem(spec)
    th = [system.var(f"theta{i + 1}", a.ranks[i], a.ranks[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        system.require_equal(th[i] @ a.maps[i] + a.maps[i - 1] @ th[i - 1], la.identity(spec, a.ranks[i]))
    space = system.solve()
    if space.is_empty:
        return None
    vals = system.values(space.particular)
    thetas = tuple(vals[f"theta{i + 1}"] for i in range(n))
    assert not homotopy_defects(a, thetas)
    return ContractingHomotopy(thetas)


def is_contractible(a: NSigmaSequence) -> bool:
    return decide_contractible_homotopy(a) is not None


# -- block forms --------------------------------------------------------------


def block_form(spec: RingSpec, n: int, trivial_summands: Sequence[tuple[int, int]], fp_rank: int) -> NSigmaSequence:
    """``trivial_gamma(m_s, s)`` for each ``(s, m_s)`` in slot order, then ``F(p)^fp_rank``."""
    parts = [trivial_gamma(spec, n, m, s) for s, m in sorted(trivial_summands) if m]
    if fp_rank:
        parts.append(f_p_sequence(spec, n, fp_rank))
    return direct_sum(*parts) if parts else zero_sequence(spec, n)


def block_forms_for_ranks(ranks: Sequence[int]) -> Iterator[tuple[tuple[tuple[int, int], ...], int]]:
    """All ``(trivial multiplicities, f)`` whose block form has the given ranks.

    Object ``j`` receives ``f + m_j + m_{j-1}`` coordinates, where ``m_s`` is
    the multiplicity of the trivial summand at slot ``s``.
    """
    n = len(ranks)
    for f in range(min(ranks) + 1):
        for m_last in range(ranks[0] - f + 1):
            ms = []
            prev = m_last
            ok = True
            for j in range(n):
                m = ranks[j] - f - prev
                if m < 0:
                    ok = False
                    break
                ms.append(m)
                prev = m
            if ok and ms[-1] == m_last:
                yield tuple((s + 1, m) for s, m in enumerate(ms) if m), f


# -- stripping ----------------------------------------------------------------


@dataclass(frozen=True)
class Decomposition:
    """Certificate that ``input == conjugate(model, witness)``.

    ``model`` is the block form of ``trivial_summands`` and ``F(p)^fp_rank``
    when ``residual`` is ``None``; otherwise it is the block form of the
    trivial summands followed by ``residual`` (whose entries all lie in
    ``(p)`` and which is not isomorphic to any power of ``F(p)``, for the
    reason recorded in ``obstruction``).
    """

    trivial_summands: tuple[tuple[int, int], ...]
    fp_rank: int
    witness: tuple[Matrix, ...]
    residual: NSigmaSequence | None = None
    obstruction: str | None = None
    trivial_order: tuple[int, ...] = field(default=(), repr=False)

    @property
    def is_member(self) -> bool:
        return self.residual is None

    def model(self, spec: RingSpec, n: int) -> NSigmaSequence:
        if self.residual is None:
            return block_form(spec, n, self.trivial_summands, self.fp_rank)
        triv = block_form(spec, n, self.trivial_summands, 0)
        return direct_sum(triv, self.residual)

    def reassemble(self, spec: RingSpec, n: int) -> NSigmaSequence:
        model = self.model(spec, n)
        return _conjugate_checked(model, self.witness)

    def to_json(self) -> dict:
        return {
            "trivial_summands": [{"slot": s, "multiplicity": m} for s, m in self.trivial_summands],
            "fp_rank": self.fp_rank,
            "witness": [w.to_json() for w in self.witness],
            "residual": None if self.residual is None else self.residual.to_json(),
            "obstruction": self.obstruction,
        }


def _conjugate_checked(model: NSigmaSequence, w: Sequence[Matrix]) -> NSigmaSequence:
    n = model.n
    winv = [la.inverse(x) for x in w]
    maps = [w[(i + 1) % n] @ model.maps[i] @ winv[i] for i in range(n)]
    return make_sequence(model.spec, n, model.ranks, maps)


class _Reducer:
    """Mutable working copy ``X = conjugate(A, U)`` with ``Uinv`` tracked alongside."""

    def __init__(self, a: NSigmaSequence, track: bool = True):
        self.spec = a.spec
        self.n = a.n
        self.x = [m.a.copy() for m in a.maps]
        self.uinv = [np.eye(r, dtype=np.int64) for r in a.ranks] if track else None
        self.active = [list(range(r)) for r in a.ranks]

    def change_basis(self, k: int, e: np.ndarray, einv: np.ndarray) -> None:
        """New coordinates ``e @ old`` on object ``k`` (0-based)."""
        spec, n = self.spec, self.n
        self.x[k - 1] = spec.matmul(e, self.x[k - 1])
        self.x[k] = spec.matmul(self.x[k], einv)
        if self.uinv is not None:
            self.uinv[k] = spec.matmul(self.uinv[k], einv)

    def find_unit(self) -> tuple[int, int, int] | None:
        p = self.spec.p
        for i in range(self.n):
            rows, cols = self.active[(i + 1) % self.n], self.active[i]
            if not rows or not cols:
                continue
            sub = self.x[i][np.ix_(rows, cols)]
            hits = np.argwhere(sub % p != 0)
            if len(hits):
                return i, rows[int(hits[0][0])], cols[int(hits[0][1])]
        return None

    def split_off(self, i: int, r: int, c: int) -> None:
        spec, n = self.spec, self.n
        j = (i + 1) % n
        xi = self.x[i]
        s = spec.inv_code(int(xi[r, c]))
        # column operations on object i: scale c, then clear the rest of row r.
        # Only row c of the transform differs from the identity, and the
        # inverse's row c is row r of alpha_i itself.
        col = np.eye(xi.shape[1], dtype=np.int64)
        col_inv = np.eye(xi.shape[1], dtype=np.int64)
        col[c, c] = s
        col_inv[c, c] = xi[r, c]
        for c2 in self.active[i]:
            if c2 != c and xi[r, c2]:
                col[c, c2] = spec.neg(spec.mul(s, int(xi[r, c2])))
                col_inv[c, c2] = xi[r, c2]
        self.change_basis(i, col_inv, col)
        xi = self.x[i]
        # row operations on object j: clear the rest of column c
        row = np.eye(xi.shape[0], dtype=np.int64)
        row_inv = np.eye(xi.shape[0], dtype=np.int64)
        for r2 in self.active[j]:
            if r2 != r and xi[r2, c]:
                row[r2, r] = spec.neg(int(xi[r2, c]))
                row_inv[r2, r] = xi[r2, c]
        self.change_basis(j, row, row_inv)
        after = self.x[j]
        before = self.x[i - 1]
        if after[:, r].any() or before[c, :].any():
            raise PreconditionError("stripping requires a candidate n-angle")
        self.active[i].remove(c)
        self.active[j].remove(r)

    def residual(self) -> NSigmaSequence:
        n = self.n
        ranks = [len(a) for a in self.active]
        maps = [
            Matrix._raw(self.spec, self.x[i][np.ix_(self.active[(i + 1) % n], self.active[i])]) for i in range(n)
        ]
        return make_sequence(self.spec, n, ranks, maps)


def monodromy(reduced: NSigmaSequence) -> np.ndarray | Monodromy:
    """``B_n ... B_1`` over the residue field, where ``alpha_i = p * B_i``."""
    if not all(m.in_maximal_ideal() for m in reduced.maps):
        raise PreconditionError("monodromy needs every entry in (p)")
    if len(set(reduced.ranks)) > 1:
        return NOT_SQUARE
    p = reduced.spec.p
    f = reduced.ranks[0]
    out = np.eye(f, dtype=np.int64)
    for m in reduced.maps:
        out = (m.divide_by_p() @ out) % p
    return out


def _fp_normaliser(reduced: NSigmaSequence) -> tuple[list[np.ndarray] | None, str | None]:
    """Basis changes ``V`` with ``conjugate(reduced, V) == F(p)^f``, or the reason none exist."""
    n, p = reduced.n, reduced.spec.p
    mono = monodromy(reduced)
    if isinstance(mono, Monodromy):
        return None, f"ranks {list(reduced.ranks)} of the reduced part are not all equal"
    f = reduced.ranks[0]
    bbar = [m.divide_by_p() % p for m in reduced.maps]
    for i, b in enumerate(bbar):
        if la.rank_mod_p(b, p) < f:
            return None, f"residue matrix of alpha_{i + 1} in the reduced part is singular"
    if not np.array_equal(mono % p, np.eye(f, dtype=np.int64)):
        return None, "monodromy of the reduced part is not the identity"
    vs = [np.eye(f, dtype=np.int64)]
    for i in range(n - 1):
        vs.append((vs[-1] @ la.inv_mod_p(bbar[i], p)) % p)
    return vs, None


def strip_units(a: NSigmaSequence) -> Decomposition:
    """Split off trivial summands, then identify the reduced part with ``F(p)^f`` if possible."""
    if not is_candidate(a):
        raise PreconditionError("strip_units needs a candidate n-angle")
    spec, n = a.spec, a.n
    red = _Reducer(a)
    found: list[tuple[int, int, int]] = []  # (slot, coord at slot, coord at slot+1)
    while (hit := red.find_unit()) is not None:
        i, r, c = hit
        red.split_off(i, r, c)
        found.append((i + 1, c, r))

    reduced = red.residual()
    vs, obstruction = _fp_normaliser(reduced) if reduced.total_rank else ([], None)
    if vs is not None and reduced.total_rank:
        for k in range(n):
            act = red.active[k]
            e = np.eye(a.ranks[k], dtype=np.int64)
            e[np.ix_(act, act)] = vs[k]
            einv = la.inverse(Matrix._raw(spec, e)).a
            red.change_basis(k, e, einv)

    order = sorted(range(len(found)), key=lambda t: (found[t][0], t))
    counts: dict[int, int] = {}
    for slot, _, _ in found:
        counts[slot] = counts.get(slot, 0) + 1
    trivials = tuple(sorted(counts.items()))

    perm_rows = [_slot_major(found, order, k, n) + red.active[k] for k in range(n)]
    witness = tuple(
        Matrix._raw(spec, spec.matmul(red.uinv[k], la.permutation(spec, perm_rows[k]).a.T)) for k in range(n)
    )

    if vs is not None:
        decomp = Decomposition(trivials, reduced.ranks[0] if reduced.total_rank else 0, witness)
    else:
        decomp = Decomposition(trivials, 0, witness, residual=reduced, obstruction=obstruction)
    _check_reassembly(a, decomp)
    return decomp


def _slot_major(found, order, k: int, n: int) -> list[int]:
    """Coordinates of object ``k`` in block-form order: slots ascending, summand by summand."""
    coords = []
    for t in order:
        slot, c, r = found[t]
        if slot - 1 == k:
            coords.append(c)
        elif slot % n == k:
            coords.append(r)
    return coords


def _check_reassembly(a: NSigmaSequence, d: Decomposition) -> None:
    model = d.model(a.spec, a.n)
    n = a.n
    for i in range(n):
        if a.maps[i] @ d.witness[i] != d.witness[(i + 1) % n] @ model.maps[i]:
            raise AssertionError("decomposition witness failed to reassemble the input")


def decompose(a: NSigmaSequence) -> Decomposition:
    return strip_units(a)


def _member_verdict(a: NSigmaSequence) -> bool:
    red = _Reducer(a, track=False)
    while (hit := red.find_unit()) is not None:
        red.split_off(*hit)
    reduced = red.residual()
    return reduced.total_rank == 0 or _fp_normaliser(reduced)[0] is not None


def n_angle_certificate(a: NSigmaSequence) -> Decomposition | None:
    if not is_candidate(a):
        return None
    d = strip_units(a)
    return d if d.is_member else None


def is_n_angle(a: NSigmaSequence) -> bool:
    """Membership verdict; see :func:`n_angle_certificate` for the witness."""
    return is_candidate(a) and _member_verdict(a)


# -- brute-force oracle -------------------------------------------------------


def oracle_cost(ranks: Sequence[int], spec: RingSpec) -> int:
    total = 1
    for r in ranks:
        total *= la.gl_order(spec, r)
    return total


def oracle_witness(a: NSigmaSequence, budget: int) -> tuple[NSigmaSequence, tuple[Matrix, ...]] | None:
    """First block form and basis-change tuple (lexicographically) reproducing ``a``.

    Raises :class:`BudgetExceeded` when ``prod |GL_{r_i}(R)|`` exceeds ``budget``.
    """
    spec, n = a.spec, a.n
    cost = oracle_cost(a.ranks, spec)
    if cost > budget:
        raise BudgetExceeded(budget, f"oracle needs {cost} basis-change tuples, budget is {budget}")
    groups = [la.general_linear_group(spec, r) for r in a.ranks]
    amaps = [m.a for m in a.maps]
    for trivials, f in block_forms_for_ranks(a.ranks):
        s = block_form(spec, n, trivials, f)
        smaps = [m.a for m in s.maps]
        # U_{k+1} S_k for every candidate U_{k+1}, computed once per form
        images = [spec.matmul(groups[(k + 1) % n], smaps[k]) for k in range(n)]
        for u1 in groups[0]:
            hit = _extend(spec, amaps, smaps, groups, images, [u1], n)
            if hit is not None:
                return s, tuple(Matrix._raw(spec, u) for u in hit)
    return None


def _extend(spec, amaps, smaps, groups, images, chosen, n):
    k = len(chosen) - 1  # last fixed object, 0-based
    target = spec.matmul(amaps[k], chosen[-1])
    if k == n - 1:
        # wrap: A_n U_n == U_1 S_n
        return chosen if np.array_equal(spec.matmul(chosen[0], smaps[k]), target) else None
    mask = np.all(images[k] == target, axis=(1, 2))
    for idx in np.flatnonzero(mask):
        res = _extend(spec, amaps, smaps, groups, images, chosen + [groups[k + 1][idx]], n)
        if res is not None:
            return res
    return None


def oracle_is_n_angle(a: NSigmaSequence, budget: int) -> bool:
    if not is_candidate(a):
        # every block form is a candidate and conjugation preserves candidacy
        oracle_cost_check(a, budget)
        return False
    return oracle_witness(a, budget) is not None


def oracle_cost_check(a: NSigmaSequence, budget: int) -> None:
    cost = oracle_cost(a.ranks, a.spec)
    if cost > budget:
        raise BudgetExceeded(budget, f"oracle needs {cost} basis-change tuples, budget is {budget}")


# -- summands -----------------------------------------------------------------


@dataclass(frozen=True)
class SummandReport:
    """Summands located by :func:`verify_summand_lemma`.

    Each entry of ``summands`` carries a split inclusion ``iota`` and its
    retraction ``rho`` with ``rho . iota`` the identity morphism.
    """

    base: str  # "p" or "0"
    decomposition: Decomposition
    summands: tuple[tuple[str, SequenceMorphism, SequenceMorphism], ...]

    @property
    def located(self) -> tuple[str, ...]:
        return tuple(name for name, _, _ in self.summands)

    def to_json(self) -> dict:
        return {
            "base": self.base,
            "located": list(self.located),
            "decomposition": self.decomposition.to_json(),
            "summands": [
                {"name": name, "inclusion": i.to_json(), "retraction": r.to_json()} for name, i, r in self.summands
            ],
        }


def _split_summand(
    a: NSigmaSequence,
    d: Decomposition,
    piece: NSigmaSequence,
    coords: Sequence[Sequence[tuple[int, int]]],
) -> tuple[SequenceMorphism, SequenceMorphism]:
    """Inclusion of ``piece`` along model coordinates and the matching retraction.

    ``coords[k]`` lists ``(model coordinate, sign)`` for each basis vector of
    ``piece`` at object ``k``; ``sign`` is ``1`` or ``-1``.
    """
    spec, n = a.spec, a.n
    incl, retr = [], []
    for k in range(n):
        w = d.witness[k]
        winv = la.inverse(w)
        e = np.zeros((a.ranks[k], len(coords[k])), dtype=np.int64)
        for t, (c, s) in enumerate(coords[k]):
            e[c, t] = 1 if s == 1 else spec.neg(1)
        em = Matrix._raw(spec, e)
        incl.append(w @ em)
        retr.append(em.T @ winv)
    iota = SequenceMorphism(piece, a, tuple(incl))
    rho = SequenceMorphism(a, piece, tuple(retr))
    if not (is_morphism(iota) and is_morphism(rho) and compose(iota, rho) == identity_morphism(piece)):
        raise AssertionError("summand inclusion is not split")
    return iota, rho


def _model_offsets(d: Decomposition, n: int) -> list[dict]:
    """Model coordinate of every trivial summand copy and of the F(p) block, per object."""
    slots = [(s, m) for s, m in d.trivial_summands]
    nxt = [0] * n
    triv: dict[tuple[int, int], tuple[int, int]] = {}
    for s, m in slots:
        src, dst = s - 1, s % n
        for copy in range(m):
            triv[(s, copy)] = (nxt[src] + copy, nxt[dst] + copy)
        nxt[src] += m
        nxt[dst] += m
    return [{"trivial": triv, "fp_start": nxt}]


def verify_summand_lemma(a: NSigmaSequence) -> SummandReport:
    """Locate ``F(p)`` (base ``p``) or ``(Gamma R)[1]`` and ``(Gamma R)[-1]`` (base ``0``) as summands."""
    spec, n = a.spec, a.n
    if a.ranks[0] != 1 or a.ranks[1] != 1:
        raise PreconditionError("the base map alpha_1 must be 1x1")
    code = int(a.maps[0].a[0, 0])
    if code == spec.p:
        base = "p"
    elif code == 0:
        base = "0"
    else:
        raise PreconditionError("the base map must be (p) or (0)")
    d = n_angle_certificate(a)
    if d is None:
        raise PreconditionError("verify_summand_lemma needs an n-angle")
    info = _model_offsets(d, n)[0]
    found = []
    if base == "p":
        if d.fp_rank < 1:
            raise AssertionError("no F(p) summand although the base is p")
        piece = f_p_sequence(spec, n, 1)
        coords = [[(info["fp_start"][k], 1)] for k in range(n)]
        found.append(("R(p)",) + _split_summand(a, d, piece, coords))
    else:
        mults = dict(d.trivial_summands)
        if mults.get(2, 0) < 1 or mults.get(n, 0) < 1:
            raise AssertionError("rotated trivial summands missing although the base is 0")
        gamma = trivial_gamma(spec, n, 1, 1)
        # (Gamma R)[-1] has the identity at slot 2 with no sign
        minus = rotate_right(gamma)
        c_src, c_dst = info["trivial"][(2, 0)]
        coords = [[] for _ in range(n)]
        coords[1] = [(c_src, 1)]
        coords[2 % n] = [(c_dst, 1)]
        found.append(("(Gamma R)[-1]",) + _split_summand(a, d, minus, coords))
        # (Gamma R)[1] has (-1)^n on the wrap map; absorb the sign at object 1
        plus = rotate_left(gamma)
        sign = -1 if n % 2 else 1
        c_src, c_dst = info["trivial"][(n, 0)]
        coords = [[] for _ in range(n)]
        coords[n - 1] = [(c_src, 1)]
        coords[0] = [(c_dst, sign)]
        found.append(("(Gamma R)[1]",) + _split_summand(a, d, plus, coords))
    return SummandReport(base, d, tuple(found))
