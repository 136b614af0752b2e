"""Acceptance criteria, one test per criterion.

Each test records a ``PASS``/``FAIL criterion k: ...`` line that is printed
and repeated in the terminal summary.
"""

import itertools
import json
import random
import time

import numpy as np
import pytest

from nangle import linalg as la
from nangle.angulation import (
    block_form,
    decide_contractible_homotopy,
    homotopy_defects,
    is_contractible,
    is_n_angle,
    oracle_is_n_angle,
    strip_units,
    verify_summand_lemma,
)
from nangle.cli import main
from nangle.counterexample import counterexample_morphism
from nangle.generators import (
    random_candidate,
    random_commuting_square,
    random_gl_tuple,
    random_matrix,
    random_member,
    random_member_with_ranks,
    random_sequence,
)
from nangle.goodness import Outcome, enumerate_fill_ins, find_good_fill_in, is_good
from nangle.middling import search_middling_extension
from nangle.ring import RingSpec
from nangle.sequences import (
    SequenceMorphism,
    conjugate,
    direct_sum,
    f_p_sequence,
    identity_morphism,
    is_exact,
    is_morphism,
    make_sequence,
    mapping_cone,
    rotate_left,
    rotate_right,
    trivial_gamma,
)

from conftest import ACCEPTANCE, F2E, Z4, Z9

SEED = 20240611


def record(k, label: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {k}: {label} ({detail})"
    ACCEPTANCE.append(line)
    print(line)
    assert ok, line


def identity_on(m: la.Matrix) -> bool:
    return m == la.identity(m.spec, m.rows)


# -- 1 -------------------------------------------------------------------------


@pytest.mark.parametrize("spec", [Z4, Z9], ids=["z4", "z9"])
def test_criterion_1_counterexample(spec):
    start = time.perf_counter()
    phi = counterexample_morphism(4, spec)
    morphism, good = is_morphism(phi), is_good(phi)
    res = search_middling_extension(phi, 2, 10**6)
    elapsed = time.perf_counter() - start
    ok = morphism and not good and res.outcome is Outcome.NONE_EXHAUSTIVE and elapsed <= 600
    record(
        1,
        f"(0,0,0,p) over {spec.short_name}",
        ok,
        f"is_morphism={morphism} is_good={good} search={res.outcome.value} "
        f"branches={res.branches_explored}/{res.branches_total} {elapsed:.1f}s",
    )


# -- 2 -------------------------------------------------------------------------


def all_rank_le_1_sequences():
    n = 4
    for ranks in itertools.product((0, 1), repeat=n):
        shapes = [(ranks[(i + 1) % n], ranks[i]) for i in range(n)]
        for maps in itertools.product(*(list(la.all_matrices(Z4, r, c)) for r, c in shapes)):
            yield make_sequence(Z4, n, ranks, maps)


def rank_two_instances(rng, count):
    for k in range(count):
        ranks = [rng.randint(0, 1) for _ in range(4)]
        ranks[rng.randrange(4)] = 2
        kind = k % 3
        a = random_member_with_ranks(rng, Z4, ranks) if kind else None
        if a is None:
            yield random_sequence(rng, Z4, 4, ranks)
            continue
        if kind == 2:
            # perturb one entry of a member
            i = rng.choice([i for i, m in enumerate(a.maps) if m.rows and m.cols])
            arr = a.maps[i].a.copy()
            arr[rng.randrange(arr.shape[0]), rng.randrange(arr.shape[1])] = rng.randrange(Z4.order)
            maps = list(a.maps)
            maps[i] = la.Matrix(Z4, arr.tolist())
            a = make_sequence(Z4, 4, a.ranks, maps)
        yield a


def test_criterion_2_oracle_agreement():
    start = time.perf_counter()
    total = agree = members = 0
    for a in itertools.chain(all_rank_le_1_sequences(), rank_two_instances(random.Random(SEED), 300)):
        fast = is_n_angle(a)
        total += 1
        members += fast
        agree += fast == oracle_is_n_angle(a, 10**7)
    elapsed = time.perf_counter() - start
    ok = agree == total and elapsed <= 300
    record(2, "is_n_angle vs oracle, n=4 over Z/4", ok, f"{agree}/{total} agree, {members} members, {elapsed:.1f}s")


# -- 3 -------------------------------------------------------------------------

CANDIDATE_FRAMES = [(Z4, 4), (Z4, 5), (Z4, 6), (Z9, 4), (Z9, 6), (F2E, 4), (F2E, 5), (F2E, 6)]


def test_criterion_3_contractibility_agreement():
    rng = random.Random(SEED)
    total = agree = contractible = 0
    for k in range(1200):
        spec, n = CANDIDATE_FRAMES[k % len(CANDIDATE_FRAMES)]
        a = random_candidate(rng, spec, n, rng.randint(1, 2), rng.randint(0, 2))
        d = strip_units(a)
        by_strip = d.is_member and d.fp_rank == 0
        h = decide_contractible_homotopy(a)
        by_homotopy = h is not None and not homotopy_defects(a, h.thetas)
        total += 1
        contractible += by_strip
        agree += by_homotopy == by_strip
    record(3, "homotopy vs stripping", agree == total, f"{agree}/{total} agree, {contractible} contractible")


# -- 4 -------------------------------------------------------------------------


def test_criterion_4_axioms():
    rng = random.Random(SEED)
    results = []

    ok = 0
    for _ in range(500):
        s = direct_sum(random_member(rng, Z4, 4), random_member(rng, Z4, 4))
        ok += is_n_angle(conjugate(s, random_gl_tuple(rng, Z4, s.ranks)))
    results.append(("N1(a)", ok == 500, f"{ok}/500 sums and conjugates"))

    gammas = [trivial_gamma(Z4, 4, r, slot) for r in range(4) for slot in range(1, 5)]
    ok = sum(is_n_angle(g) for g in gammas)
    results.append(("N1(b)", ok == len(gammas), f"{ok}/{len(gammas)} trivial sequences"))

    members, non_members, rot_ok = 0, 0, 0
    while members < 500 or non_members < 500:
        if members < 500:
            a = random_member(rng, Z4, 4, 2, 1)
        else:
            a = random_candidate(rng, Z4, 4, 1, 2)
        inside = is_n_angle(a)
        if not inside and non_members >= 500:
            continue
        members += inside
        non_members += not inside
        rot_ok += is_n_angle(rotate_left(a)) == inside == is_n_angle(rotate_right(a))
    results.append(("N2", rot_ok == members + non_members, f"{rot_ok} rotations agree, {members} members, {non_members} non-members"))

    ok = 0
    for _ in range(120):
        a, b = random_member(rng, Z4, 4, 2, 1), random_member(rng, Z4, 4, 2, 1)
        phi1, phi2 = random_commuting_square(rng, a, b)
        ok += next(enumerate_fill_ins(a, b, phi1, phi2), None) is not None
    results.append(("N3", ok == 120, f"{ok}/120 squares have fill-ins"))

    ok = squares = 0
    while squares < 120:
        a, b = random_member(rng, Z4, 4), random_member(rng, Z4, 4)
        if max(a.ranks + b.ranks) > 2:
            continue
        squares += 1
        phi1, phi2 = random_commuting_square(rng, a, b)
        phi = find_good_fill_in(a, b, phi1, phi2, 10**6)
        ok += (
            not isinstance(phi, Outcome)
            and is_morphism(phi)
            and phi.components[0] == phi1
            and phi.components[1] == phi2
            and is_good(phi)
        )
    results.append(("N4", ok == squares, f"{ok}/{squares} good fill-ins"))

    detail = "; ".join(f"{name} {'ok' if good else 'FAILED'}: {text}" for name, good, text in results)
    record(4, "axioms for n=4 over Z/4", all(good for _, good, _ in results), detail)


# -- 5 -------------------------------------------------------------------------

MEMBER_FRAMES = [(Z4, 4), (Z9, 4), (F2E, 5), (Z4, 6), (F2E, 3), (Z4, 3)]


def cone_fixtures_hold() -> bool:
    a = f_p_sequence(Z4, 4, 1)
    cone = mapping_cone(identity_morphism(a))
    first = cone.ranks == (2, 2, 2, 2) and all(m.values() == [[2, 0], [1, 2]] for m in cone.maps)
    src, dst = trivial_gamma(Z9, 4, 1, 1), f_p_sequence(Z9, 4, 1)
    phi = SequenceMorphism(
        src, dst, (la.scalar(Z9, 3), la.scalar(Z9, 0), la.zeros(Z9, 1, 0), la.zeros(Z9, 1, 0))
    )
    cone = mapping_cone(phi)
    second = cone.ranks == (2, 1, 1, 2) and [m.values() for m in cone.maps] == [
        [[0, 3]],
        [[3]],
        [[0], [3]],
        [[8, 0], [3, 3]],
    ]
    return first and second


def test_criterion_5_cones():
    rng = random.Random(SEED)
    ok = 0
    for k in range(240):
        spec, n = MEMBER_FRAMES[k % len(MEMBER_FRAMES)]
        ok += is_contractible(mapping_cone(identity_morphism(random_member(rng, spec, n, 2, 1))))
    fixtures = cone_fixtures_hold()
    record(5, "cones of identities", ok == 240 and fixtures, f"{ok}/240 contractible, layout fixtures {'match' if fixtures else 'differ'}")


# -- 6 -------------------------------------------------------------------------

LEMMA_FRAMES = [(Z4, 4), (Z9, 4), (F2E, 5), (Z4, 6)]


def member_with_base(rng, spec, n, base):
    extra = [(slot, rng.randint(1, 2)) for slot in range(3, n) if rng.random() < 0.6]
    if base == "p":
        s = block_form(spec, n, extra, 1)
    else:
        s = block_form(spec, n, sorted(extra + [(2, 1), (n, 1)]), 0)
    us = random_gl_tuple(rng, spec, s.ranks)
    # the same unit on both ends keeps alpha_1 equal to (p) or (0)
    u = random_gl_tuple(rng, spec, [1])[0]
    us[0] = us[1] = u
    return conjugate(s, us)


def test_criterion_6_summand_lemma():
    rng = random.Random(SEED)
    expected = {"p": {"R(p)"}, "0": {"(Gamma R)[1]", "(Gamma R)[-1]"}}
    tally = {"p": 0, "0": 0}
    for base in ("p", "0"):
        for k in range(120):
            spec, n = LEMMA_FRAMES[k % len(LEMMA_FRAMES)]
            a = member_with_base(rng, spec, n, base)
            assert int(a.maps[0].a[0, 0]) == (spec.p if base == "p" else 0)
            r = verify_summand_lemma(a)
            split = all(
                is_morphism(iota)
                and is_morphism(rho)
                and all(identity_on(y @ x) for x, y in zip(iota.components, rho.components))
                for _, iota, rho in r.summands
            )
            tally[base] += r.base == base and set(r.located) == expected[base] and split
    ok = tally["p"] == 120 and tally["0"] == 120
    record(6, "summands located", ok, f"base p {tally['p']}/120, base 0 {tally['0']}/120")


# -- 7 -------------------------------------------------------------------------


def test_criterion_7_exactness():
    rng = random.Random(SEED)
    ok = 0
    for k in range(600):
        spec, n = MEMBER_FRAMES[k % len(MEMBER_FRAMES)]
        ok += is_exact(random_member(rng, spec, n, 2, 2))
    record(7, "members are exact", ok == 600, f"{ok}/600")


# -- 8 -------------------------------------------------------------------------


def brute_force_agrees(spec, rows: int, cols: int) -> tuple[int, int]:
    xs = np.array(list(itertools.product(range(spec.order), repeat=cols)), dtype=np.int64).reshape(-1, cols)
    bs = list(itertools.product(range(spec.order), repeat=rows))
    systems = agree = 0
    for m in la.all_matrices(spec, rows, cols):
        images = [tuple(int(v) for v in (m @ la.Matrix(spec, [[int(c)] for c in x])).a[:, 0]) for x in xs]
        by_image: dict = {}
        for x, img in zip(xs, images):
            by_image.setdefault(img, set()).add(tuple(int(c) for c in x))
        for b in bs:
            systems += 1
            space = la.solve(m, list(b))
            got = {tuple(int(c) for c in sol) for sol in la.enumerate_solutions(space)}
            want = by_image.get(b, set())
            agree += got == want and space.count == len(want) and space.is_empty == (not want)
    return systems, agree


def snf_invariants_hold(m: la.Matrix) -> bool:
    spec = m.spec
    snf = la.smith_normal_form(m)
    n1, np_, n0 = snf.counts
    order = [1] * n1 + [spec.p] * np_ + [0] * n0
    return (
        snf.U @ m @ snf.V == snf.diagonal_matrix()
        and la.is_invertible(snf.U)
        and la.is_invertible(snf.V)
        and list(snf.diag) == order
        and n1 == la.rank_mod_p(la.residue_matrix(m), spec.p)
        and snf.image_size * snf.kernel_size == spec.order**m.cols
    )


def test_criterion_8_linear_algebra():
    start = time.perf_counter()
    systems = agree = 0
    for spec in (Z4, Z9):
        for rows in (1, 2):
            for cols in (1, 2):
                s, a = brute_force_agrees(spec, rows, cols)
                systems += s
                agree += a
    rng = random.Random(SEED)
    specs = (Z4, Z9, F2E, RingSpec.parse("z25"))
    snf_ok = sum(
        snf_invariants_hold(random_matrix(rng, specs[k % 4], rng.randint(0, 5), rng.randint(0, 5))) for k in range(1200)
    )
    elapsed = time.perf_counter() - start
    record(
        8,
        "solve and Smith form",
        agree == systems and snf_ok == 1200,
        f"solve {agree}/{systems} systems, SNF {snf_ok}/1200, {elapsed:.1f}s",
    )


# -- 9 -------------------------------------------------------------------------


@pytest.mark.parametrize("ring", ["z4", "z9"])
def test_criterion_9_determinism(tmp_path, ring):
    outs = []
    for jobs in (1, 8):
        out = tmp_path / f"jobs{jobs}.json"
        code = main(["counterexample", "--n", "4", "--ring", ring, "--rank-bound", "2", "--jobs", str(jobs), "--out", str(out)])
        assert code == 0
        outs.append(out.read_bytes())
    same = outs[0] == outs[1]
    verdict = json.loads(outs[0])["verdict"]
    record(9, f"--jobs 1 vs --jobs 8 over {ring}", same, f"{'byte-identical' if same else 'reports differ'}, verdict {verdict}")
