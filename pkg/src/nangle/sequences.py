"""n-Sigma-sequences of free modules with Sigma the identity functor.

Objects are free modules ``R^r`` recorded by their rank.  A sequence on
ranks ``r_1..r_n`` has structure maps ``alpha_1..alpha_n`` where ``alpha_i``
is an ``r_{i+1} x r_i`` matrix and ``alpha_n`` wraps around to ``R^{r_1}``.
Positions are 1-based in the public API and cyclic.

Composition convention: ``g o f`` (apply ``f`` first) is the matrix product
``g @ f``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import linalg as la
from .errors import PreconditionError
from .linalg import Matrix
from .ring import RingSpec, check_same_ring, validate_parity


class ParityError(ValueError):
    """No exotic angulation exists for this ``(n, ring)`` pair."""


def check_parity(n: int, spec: RingSpec) -> None:
    if not validate_parity(n, spec):
        raise ParityError(f"n={n} is odd and 2p != 0 in {spec}; the exotic angulation needs n even or 2p = 0")


@dataclass(frozen=True)
class NSigmaSequence:
    spec: RingSpec
    n: int
    ranks: tuple[int, ...]
    maps: tuple[Matrix, ...]

    def __post_init__(self):
        object.__setattr__(self, "ranks", tuple(int(r) for r in self.ranks))
        object.__setattr__(self, "maps", tuple(self.maps))
        n = self.n
        check_parity(n, self.spec)
        if len(self.ranks) != n or len(self.maps) != n:
            raise la.ShapeError(f"need {n} ranks and {n} maps, got {len(self.ranks)} and {len(self.maps)}")
        if any(r < 0 for r in self.ranks):
            raise la.ShapeError("ranks must be non-negative")
        for i, m in enumerate(self.maps):
            check_same_ring(self.spec, m.spec)
            want = (self.ranks[(i + 1) % n], self.ranks[i])
            if m.shape != want:
                raise la.ShapeError(f"alpha_{i + 1} has shape {m.shape}, expected {want}")

    def alpha(self, i: int) -> Matrix:
        """Structure map ``alpha_i`` with cyclic 1-based index."""
        return self.maps[(i - 1) % self.n]

    def rank(self, i: int) -> int:
        return self.ranks[(i - 1) % self.n]

    @property
    def total_rank(self) -> int:
        return sum(self.ranks)

    def is_zero_object(self) -> bool:
        return self.total_rank == 0

    def __repr__(self):
        maps = ", ".join(repr(m) for m in self.maps)
        return f"NSigmaSequence(n={self.n}, {self.spec.short_name}, ranks={self.ranks}, maps=[{maps}])"

    def to_json(self) -> dict:
        return {
            "ring": self.spec.to_json(),
            "n": self.n,
            "ranks": list(self.ranks),
            "maps": [m.to_json() for m in self.maps],
        }

    @classmethod
    def from_json(cls, obj, spec: RingSpec | None = None) -> "NSigmaSequence":
        try:
            spec = spec or RingSpec.from_json(obj["ring"])
            n = int(obj["n"])
            ranks = [int(r) for r in obj["ranks"]]
            maps = [Matrix.from_json(spec, m) for m in obj["maps"]]
        except (KeyError, TypeError) as exc:
            raise la.ShapeError(f"malformed sequence: {exc}") from exc
        return cls(spec, n, tuple(ranks), tuple(maps))


def make_sequence(spec: RingSpec, n: int, ranks: Sequence[int], maps: Sequence[Matrix]) -> NSigmaSequence:
    return NSigmaSequence(spec, n, tuple(ranks), tuple(maps))


def zero_maps(spec: RingSpec, ranks: Sequence[int]) -> list[Matrix]:
    n = len(ranks)
    return [la.zeros(spec, ranks[(i + 1) % n], ranks[i]) for i in range(n)]


def zero_sequence(spec: RingSpec, n: int) -> NSigmaSequence:
    return make_sequence(spec, n, [0] * n, zero_maps(spec, [0] * n))


def trivial_gamma(spec: RingSpec, n: int, rank: int, slot: int) -> NSigmaSequence:
    """Identity ``R^rank -> R^rank`` at position ``slot``, zero objects elsewhere."""
    if not 1 <= slot <= n:
        raise ValueError(f"slot must lie in 1..{n}, got {slot}")
    ranks = [0] * n
    ranks[slot - 1] = rank
    ranks[slot % n] = rank
    maps = zero_maps(spec, ranks)
    maps[slot - 1] = la.identity(spec, rank)
    return make_sequence(spec, n, ranks, maps)


def f_p_sequence(spec: RingSpec, n: int, rank: int) -> NSigmaSequence:
    """``F(p)``: ``R^rank`` everywhere with every map ``p`` times the identity."""
    pm = la.scalar(spec, spec.value(spec.p), rank)
    return make_sequence(spec, n, [rank] * n, [pm] * n)


def rotate_left(a: NSigmaSequence) -> NSigmaSequence:
    """``A[1]``: maps ``(alpha_2, ..., alpha_n, (-1)^n alpha_1)``."""
    n = a.n
    s = -1 if n % 2 else 1
    maps = list(a.maps[1:]) + [a.maps[0].sign(s)]
    return make_sequence(a.spec, n, a.ranks[1:] + a.ranks[:1], maps)


def rotate_right(a: NSigmaSequence) -> NSigmaSequence:
    """``A[-1]``: maps ``((-1)^n alpha_n, alpha_1, ..., alpha_{n-1})``."""
    n = a.n
    s = -1 if n % 2 else 1
    maps = [a.maps[-1].sign(s)] + list(a.maps[:-1])
    return make_sequence(a.spec, n, a.ranks[-1:] + a.ranks[:-1], maps)


def rotate(a: NSigmaSequence, k: int) -> NSigmaSequence:
    """``A[k]`` for any integer ``k``."""
    for _ in range(abs(k)):
        a = rotate_left(a) if k > 0 else rotate_right(a)
    return a


def _same_frame(a: NSigmaSequence, b: NSigmaSequence) -> None:
    check_same_ring(a.spec, b.spec)
    if a.n != b.n:
        raise PreconditionError(f"sequences have different lengths {a.n} and {b.n}")


def direct_sum(*seqs: NSigmaSequence) -> NSigmaSequence:
    if not seqs:
        raise ValueError("direct_sum needs at least one sequence")
    first = seqs[0]
    for s in seqs[1:]:
        _same_frame(first, s)
    n = first.n
    ranks = [sum(s.ranks[i] for s in seqs) for i in range(n)]
    maps = [la.block_diag(*(s.maps[i] for s in seqs), spec=first.spec) for i in range(n)]
    return make_sequence(first.spec, n, ranks, maps)


def conjugate(a: NSigmaSequence, us: Sequence[Matrix], inverses: Sequence[Matrix] | None = None) -> NSigmaSequence:
    """Transport along the isomorphism ``(U_1..U_n)``: ``alpha_i -> U_{i+1} alpha_i U_i^{-1}``."""
    n = a.n
    if len(us) != n:
        raise PreconditionError(f"need {n} basis changes, got {len(us)}")
    for i, u in enumerate(us):
        if u.shape != (a.ranks[i], a.ranks[i]):
            raise PreconditionError(f"U_{i + 1} must be {a.ranks[i]}x{a.ranks[i]}, got {u.shape}")
    if inverses is None:
        if not all(la.is_invertible(u) for u in us):
            raise PreconditionError("conjugating matrices must be invertible")
        inverses = [la.inverse(u) for u in us]
    maps = [us[(i + 1) % n] @ a.maps[i] @ inverses[i] for i in range(n)]
    return make_sequence(a.spec, n, a.ranks, maps)


def is_candidate(a: NSigmaSequence) -> bool:
    """All cyclic consecutive composites vanish, including ``alpha_1 alpha_n``."""
    n = a.n
    return all((a.maps[(i + 1) % n] @ a.maps[i]).is_zero() for i in range(n))


def is_exact(a: NSigmaSequence) -> bool:
    """``|im alpha_i| == |ker alpha_{i+1}|`` at every position (requires a candidate)."""
    if not is_candidate(a):
        raise PreconditionError("exactness is only decided for candidate n-angles")
    n = a.n
    return all(la.image_size(a.maps[i]) == la.kernel_size(a.maps[(i + 1) % n]) for i in range(n))


def base(a: NSigmaSequence) -> Matrix:
    return a.maps[0]


# -- morphisms ----------------------------------------------------------------


@dataclass(frozen=True)
class SequenceMorphism:
    source: NSigmaSequence
    target: NSigmaSequence
    components: tuple[Matrix, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        _same_frame(self.source, self.target)
        n = self.source.n
        if len(self.components) != n:
            raise la.ShapeError(f"need {n} components, got {len(self.components)}")
        for i, c in enumerate(self.components):
            want = (self.target.ranks[i], self.source.ranks[i])
            if c.shape != want:
                raise la.ShapeError(f"phi_{i + 1} has shape {c.shape}, expected {want}")

    @property
    def n(self) -> int:
        return self.source.n

    @property
    def spec(self) -> RingSpec:
        return self.source.spec

    def phi(self, i: int) -> Matrix:
        return self.components[(i - 1) % self.n]

    def to_json(self) -> dict:
        return {
            "ring": self.spec.to_json(),
            "n": self.n,
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "components": [c.to_json() for c in self.components],
        }

    @classmethod
    def from_json(cls, obj, spec: RingSpec | None = None) -> "SequenceMorphism":
        try:
            spec = spec or RingSpec.from_json(obj["ring"])
            src = NSigmaSequence.from_json(obj["source"], spec)
            tgt = NSigmaSequence.from_json(obj["target"], spec)
            comps = [Matrix.from_json(spec, c) for c in obj["components"]]
        except (KeyError, TypeError) as exc:
            raise la.ShapeError(f"malformed morphism: {exc}") from exc
        return cls(src, tgt, tuple(comps))


def square_defects(phi: SequenceMorphism) -> list[int]:
    """1-based indices ``i`` where ``phi_{i+1} alpha_i != beta_i phi_i``."""
    a, b, n = phi.source, phi.target, phi.n
    comps = phi.components
    return [i + 1 for i in range(n) if comps[(i + 1) % n] @ a.maps[i] != b.maps[i] @ comps[i]]


def is_morphism(phi: SequenceMorphism) -> bool:
    return not square_defects(phi)


def is_isomorphism(phi: SequenceMorphism) -> bool:
    return is_morphism(phi) and all(la.is_invertible(c) for c in phi.components)


def is_weak_isomorphism(phi: SequenceMorphism) -> bool:
    """Some consecutive pair ``phi_i, phi_{i+1}`` (with ``phi_{n+1} = phi_1``) is invertible."""
    if not is_morphism(phi):
        return False
    inv = [la.is_invertible(c) for c in phi.components]
    n = phi.n
    return any(inv[i] and inv[(i + 1) % n] for i in range(n))


def identity_morphism(a: NSigmaSequence) -> SequenceMorphism:
    return SequenceMorphism(a, a, tuple(la.identity(a.spec, r) for r in a.ranks))


def zero_morphism(a: NSigmaSequence, b: NSigmaSequence) -> SequenceMorphism:
    return SequenceMorphism(a, b, tuple(la.zeros(a.spec, rb, ra) for ra, rb in zip(a.ranks, b.ranks)))


def compose(first: SequenceMorphism, second: SequenceMorphism) -> SequenceMorphism:
    """``second o first``: apply ``first``, then ``second``."""
    if first.target != second.source:
        raise PreconditionError("morphisms are not composable")
    comps = tuple(g @ f for f, g in zip(first.components, second.components))
    return SequenceMorphism(first.source, second.target, comps)


def mapping_cone(phi: SequenceMorphism) -> NSigmaSequence:
    """Cone on objects ``A_{i+1} + B_i`` with maps ``[[-alpha_{i+1}, 0], [phi_{i+1}, beta_i]]``."""
    if not is_morphism(phi):
        raise PreconditionError("the mapping cone needs a morphism (all squares commuting)")
    a, b, n = phi.source, phi.target, phi.n
    spec = a.spec
    ranks = [a.ranks[(i + 1) % n] + b.ranks[i] for i in range(n)]
    maps = []
    for i in range(n):
        ai1 = a.maps[(i + 1) % n]
        maps.append(
            la.block(
                [
                    [-ai1, la.zeros(spec, ai1.rows, b.ranks[i])],
                    [phi.components[(i + 1) % n], b.maps[i]],
                ]
            )
        )
    return make_sequence(spec, n, ranks, maps)
