"""Matrices over the rings of :mod:`nangle.ring`.

Entries are stored as ring codes in read-only ``int64`` numpy arrays.  The
module also provides Smith normal form, exact solution spaces of linear
systems with lazy enumeration, and :class:`LinearSystem`, which assembles
matrix equations in unknown matrices into one linear system.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import Budget
from .ring import RingElement, RingError, RingSpec, check_same_ring


class ShapeError(ValueError):
    pass


class SingularMatrixError(ArithmeticError):
    pass


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.int64, order="C")
    a.setflags(write=False)
    return a


class Matrix:
    __slots__ = ("spec", "a")

    def __init__(self, spec: RingSpec, a):
        arr = np.asarray(a, dtype=np.int64)
        if arr.ndim != 2:
            raise ShapeError(f"matrix data must be 2-dimensional, got shape {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() >= spec.order):
            raise RingError("matrix codes out of range")
        self.spec = spec
        self.a = arr if not arr.flags.writeable and arr.flags.c_contiguous else _frozen(arr)

    @classmethod
    def _raw(cls, spec: RingSpec, a: np.ndarray) -> "Matrix":
        m = object.__new__(cls)
        m.spec = spec
        m.a = _frozen(a)
        return m

    @classmethod
    def from_values(cls, spec: RingSpec, rows: Sequence[Sequence], cols: int | None = None) -> "Matrix":
        """Build from nested element values (ints, or ``(a, b)`` for dual numbers)."""
        data = [[spec.code(v) for v in row] for row in rows]
        if not data:
            return zeros(spec, 0, cols or 0)
        if len({len(r) for r in data}) != 1:
            raise ShapeError("ragged rows")
        return cls._raw(spec, np.array(data, dtype=np.int64).reshape(len(data), len(data[0])))

    # -- basic protocol ------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.spec == other.spec and self.a.shape == other.a.shape and np.array_equal(self.a, other.a)

    def __hash__(self):
        return hash((self.spec, self.a.shape, self.a.tobytes()))

    def __repr__(self):
        body = "; ".join(" ".join(self.spec.format_code(x) for x in row) for row in self.a)
        return f"Matrix<{self.spec.short_name} {self.rows}x{self.cols}>[{body}]"

    def entry(self, i: int, j: int) -> RingElement:
        return RingElement(self.spec, int(self.a[i, j]))

    def values(self) -> list[list]:
        return [[self.spec.value(x) for x in row] for row in self.a]

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other: "Matrix"):
        check_same_ring(self.spec, other.spec)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if not isinstance(other, Matrix):
            return NotImplemented
        self._check(other)
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        return Matrix._raw(self.spec, self.spec.matmul(self.a, other.a))

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.shape != other.shape:
            raise ShapeError(f"cannot add {self.shape} and {other.shape}")
        return Matrix._raw(self.spec, self.spec.add(self.a, other.a))

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.shape != other.shape:
            raise ShapeError(f"cannot subtract {self.shape} and {other.shape}")
        return Matrix._raw(self.spec, self.spec.sub(self.a, other.a))

    def __neg__(self) -> "Matrix":
        return Matrix._raw(self.spec, self.spec.neg(self.a))

    def scale(self, c) -> "Matrix":
        code = c.code if isinstance(c, RingElement) else self.spec.code(c)
        return Matrix._raw(self.spec, self.spec.mul(code, self.a))

    def sign(self, s: int) -> "Matrix":
        """Multiply by ``+1`` or ``-1``."""
        return self if s > 0 else -self

    @property
    def T(self) -> "Matrix":
        return Matrix._raw(self.spec, self.a.T)

    def is_zero(self) -> bool:
        return not self.a.any()

    def in_maximal_ideal(self) -> bool:
        return not (self.a % self.spec.p).any()

    def residue_matrix(self) -> np.ndarray:
        """Entrywise reduction to the residue field, as an array of ints mod p."""
        return self.a % self.spec.p

    def divide_by_p(self) -> np.ndarray:
        """Residue matrix ``B`` with ``self == p * lift(B)``."""
        if not self.in_maximal_ideal():
            raise RingError("matrix has entries outside (p)")
        return self.a // self.spec.p

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix._raw(self.spec, self.a[np.ix_(list(rows), list(cols))])

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [self.spec.json_entry(x) for x in self.a.ravel()],
        }

    @classmethod
    def from_json(cls, spec: RingSpec, obj) -> "Matrix":
        try:
            r, c, entries = int(obj["rows"]), int(obj["cols"]), obj["entries"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ShapeError(f"malformed matrix {obj!r}") from exc
        if r < 0 or c < 0 or len(entries) != r * c:
            raise ShapeError(f"matrix declares {r}x{c} but has {len(entries)} entries")
        codes = np.array([spec.code(e) for e in entries], dtype=np.int64).reshape(r, c)
        return cls._raw(spec, codes)


def identity(spec: RingSpec, r: int) -> Matrix:
    return Matrix._raw(spec, np.eye(r, dtype=np.int64))


def zeros(spec: RingSpec, r: int, c: int) -> Matrix:
    return Matrix._raw(spec, np.zeros((r, c), dtype=np.int64))


def scalar(spec: RingSpec, value, r: int = 1) -> Matrix:
    """``value`` times the ``r x r`` identity."""
    return identity(spec, r).scale(value)


def matmul(a: Matrix, b: Matrix) -> Matrix:
    return a @ b


def residue_matrix(a: Matrix) -> np.ndarray:
    return a.residue_matrix()


def block(parts: Sequence[Sequence[Matrix]]) -> Matrix:
    """Assemble a block matrix; every row of blocks must agree on heights and widths."""
    if not parts or not parts[0]:
        raise ShapeError("empty block grid")
    spec = parts[0][0].spec
    heights = [row[0].rows for row in parts]
    widths = [m.cols for m in parts[0]]
    for bi, row in enumerate(parts):
        if len(row) != len(widths):
            raise ShapeError("ragged block grid")
        for bj, m in enumerate(row):
            check_same_ring(spec, m.spec)
            if m.shape != (heights[bi], widths[bj]):
                raise ShapeError(f"block ({bi},{bj}) has shape {m.shape}, expected {(heights[bi], widths[bj])}")
    out = np.zeros((sum(heights), sum(widths)), dtype=np.int64)
    r0 = 0
    for bi, row in enumerate(parts):
        c0 = 0
        for bj, m in enumerate(row):
            out[r0 : r0 + heights[bi], c0 : c0 + widths[bj]] = m.a
            c0 += widths[bj]
        r0 += heights[bi]
    return Matrix._raw(spec, out)


def block_diag(*ms: Matrix, spec: RingSpec | None = None) -> Matrix:
    if not ms:
        if spec is None:
            raise ShapeError("block_diag of nothing needs a ring")
        return zeros(spec, 0, 0)
    spec = ms[0].spec
    out = np.zeros((sum(m.rows for m in ms), sum(m.cols for m in ms)), dtype=np.int64)
    r0 = c0 = 0
    for m in ms:
        check_same_ring(spec, m.spec)
        out[r0 : r0 + m.rows, c0 : c0 + m.cols] = m.a
        r0 += m.rows
        c0 += m.cols
    return Matrix._raw(spec, out)


def permutation(spec: RingSpec, order: Sequence[int]) -> Matrix:
    """Matrix ``P`` with ``P @ e_order[k] = e_k``, i.e. row ``k`` picks coordinate ``order[k]``."""
    r = len(order)
    out = np.zeros((r, r), dtype=np.int64)
    out[np.arange(r), list(order)] = 1
    return Matrix._raw(spec, out)


# -- linear algebra over the residue field ------------------------------------


def rank_mod_p(a: np.ndarray, p: int) -> int:
    m = np.array(a, dtype=np.int64) % p
    rows, cols = m.shape
    rank = 0
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if m[r, c]), None)
        if piv is None:
            continue
        m[[rank, piv]] = m[[piv, rank]]
        m[rank] = (m[rank] * pow(int(m[rank, c]), -1, p)) % p
        for r in range(rows):
            if r != rank and m[r, c]:
                m[r] = (m[r] - m[r, c] * m[rank]) % p
        rank += 1
        if rank == rows:
            break
    return rank


def inv_mod_p(a: np.ndarray, p: int) -> np.ndarray:
    n = a.shape[0]
    if a.shape != (n, n):
        raise ShapeError("inverse of a non-square matrix")
    m = np.concatenate([np.array(a, dtype=np.int64) % p, np.eye(n, dtype=np.int64)], axis=1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r, c]), None)
        if piv is None:
            raise SingularMatrixError("matrix is singular over the residue field")
        m[[c, piv]] = m[[piv, c]]
        m[c] = (m[c] * pow(int(m[c, c]), -1, p)) % p
        for r in range(n):
            if r != c and m[r, c]:
                m[r] = (m[r] - m[r, c] * m[c]) % p
    return m[:, n:]


# -- Smith normal form -------------------------------------------------------


@dataclass(frozen=True)
class SmithForm:
    """``U @ M @ V`` is diagonal with entries ``diag`` (codes 1, p or 0, in that order)."""

    U: Matrix
    V: Matrix
    diag: tuple[int, ...]
    counts: tuple[int, int, int]

    def diagonal_matrix(self) -> Matrix:
        spec = self.U.spec
        d = np.zeros((self.U.rows, self.V.rows), dtype=np.int64)
        for i, x in enumerate(self.diag):
            d[i, i] = x
        return Matrix._raw(spec, d)

    @property
    def image_size(self) -> int:
        n1, np_, _ = self.counts
        p = self.U.spec.p
        return p ** (2 * n1 + np_)

    @property
    def kernel_size(self) -> int:
        n1, np_, _ = self.counts
        p = self.U.spec.p
        cols = self.V.rows
        return p ** (np_ + 2 * (cols - n1 - np_))


def smith_normal_form(m: Matrix) -> SmithForm:
    """Smith normal form over a chain ring with pivots in ``{1, p, 0}``.

    Unit pivots are taken first, scanning row-major; once none remain every
    entry lies in ``(p)`` and pivots ``p * unit`` are normalised to ``p``.
    """
    spec = m.spec
    p = spec.p
    r, c = m.shape
    a = m.a.copy()
    u = np.eye(r, dtype=np.int64)
    v = np.eye(c, dtype=np.int64)
    diag: list[int] = []
    k = 0
    for phase in (1, 2):
        while k < min(r, c):
            sub = a[k:, k:]
            hits = np.argwhere(sub % p != 0) if phase == 1 else np.argwhere(sub != 0)
            if len(hits) == 0:
                break
            i, j = (int(x) + k for x in hits[0])
            if i != k:
                a[[k, i]] = a[[i, k]]
                u[[k, i]] = u[[i, k]]
            if j != k:
                a[:, [k, j]] = a[:, [j, k]]
                v[:, [k, j]] = v[:, [j, k]]
            piv = int(a[k, k])
            # unit that turns the pivot into 1 (phase 1) or p (phase 2)
            s = spec.inv_code(piv if phase == 1 else piv // p)
            a[k] = spec.mul(s, a[k])
            u[k] = spec.mul(s, u[k])
            for i2 in range(r):
                if i2 != k and a[i2, k]:
                    f = int(a[i2, k]) if phase == 1 else int(a[i2, k]) // p
                    a[i2] = spec.sub(a[i2], spec.mul(f, a[k]))
                    u[i2] = spec.sub(u[i2], spec.mul(f, u[k]))
            for j2 in range(c):
                if j2 != k and a[k, j2]:
                    f = int(a[k, j2]) if phase == 1 else int(a[k, j2]) // p
                    a[:, j2] = spec.sub(a[:, j2], spec.mul(f, a[:, k]))
                    v[:, j2] = spec.sub(v[:, j2], spec.mul(f, v[:, k]))
            diag.append(int(a[k, k]))
            k += 1
    diag.extend([0] * (min(r, c) - len(diag)))
    n1 = sum(1 for x in diag if x == 1)
    np_ = sum(1 for x in diag if x == p)
    return SmithForm(Matrix._raw(spec, u), Matrix._raw(spec, v), tuple(diag), (n1, np_, len(diag) - n1 - np_))


def image_size(m: Matrix) -> int:
    return smith_normal_form(m).image_size


def kernel_size(m: Matrix) -> int:
    return smith_normal_form(m).kernel_size


def is_invertible(m: Matrix) -> bool:
    if m.rows != m.cols:
        return False
    return rank_mod_p(m.residue_matrix(), m.spec.p) == m.rows


def inverse(m: Matrix) -> Matrix:
    if m.rows != m.cols:
        raise ShapeError("inverse of a non-square matrix")
    sf = smith_normal_form(m)
    if sf.counts[0] != m.rows:
        raise SingularMatrixError("matrix is not invertible")
    return sf.V @ sf.U


# -- solution spaces ---------------------------------------------------------


@dataclass(frozen=True)
class SolutionSpace:
    """All solutions of ``M x = b``.

    ``particular`` is ``None`` when the system is inconsistent.  Otherwise the
    solutions are ``particular + sum(t_k * kernel_generators[k])`` with
    ``t_k`` ranging over ``range(orders[k])``; distinct coefficient tuples give
    distinct solutions.
    """

    spec: RingSpec
    particular: np.ndarray | None
    kernel_generators: tuple[np.ndarray, ...] = ()
    orders: tuple[int, ...] = ()

    @property
    def is_empty(self) -> bool:
        return self.particular is None

    @property
    def count(self) -> int:
        if self.particular is None:
            return 0
        n = 1
        for o in self.orders:
            n *= o
        return n

    def vector(self, coeffs: Sequence[int]) -> np.ndarray:
        spec = self.spec
        x = self.particular.copy()
        for t, g in zip(coeffs, self.kernel_generators):
            if t:
                x = spec.add(x, spec.mul(t, g))
        return x


def solve(m: Matrix, b) -> SolutionSpace:
    spec = m.spec
    b = np.asarray(b.a.ravel() if isinstance(b, Matrix) else b, dtype=np.int64).ravel()
    if b.shape[0] != m.rows:
        raise ShapeError(f"right-hand side has length {b.shape[0]}, expected {m.rows}")
    p = spec.p
    sf = smith_normal_form(m)
    cvec = spec.matmul(sf.U.a, b)
    y = np.zeros(m.cols, dtype=np.int64)
    for i in range(m.rows):
        d = sf.diag[i] if i < len(sf.diag) else 0
        ci = int(cvec[i])
        if d == 1:
            y[i] = ci
        elif d == p:
            if ci % p:
                return SolutionSpace(spec, None)
            y[i] = ci // p
        elif ci:
            return SolutionSpace(spec, None)
    gens: list[np.ndarray] = []
    orders: list[int] = []
    vcols = sf.V.a
    for j in range(m.cols):
        d = sf.diag[j] if j < len(sf.diag) else 0
        if d == 1:
            continue
        if d == p:
            gens.append(spec.times_p(vcols[:, j]))
            orders.append(p)
        else:
            gens.append(vcols[:, j].copy())
            orders.append(spec.order)
    x0 = spec.matmul(vcols, y)
    return SolutionSpace(spec, x0, tuple(gens), tuple(orders))


def enumerate_solutions(space: SolutionSpace, budget: int | Budget | None = None) -> Iterator[np.ndarray]:
    """Yield every solution in lexicographic order of the coefficient tuples.

    Each yielded vector spends one unit of ``budget``; running past it raises
    :class:`~nangle.errors.BudgetExceeded` instead of truncating silently.
    """
    if space.particular is None:
        return
    bud = Budget.coerce(budget)
    for coeffs in itertools.product(*(range(o) for o in space.orders)):
        bud.spend()
        yield space.vector(coeffs)


# -- linear systems in unknown matrices ---------------------------------------


class Affine:
    """Matrix whose entries are affine functions of the unknowns of a system.

    ``const`` has shape ``(r, c)``; ``coef`` has shape ``(N, r, c)`` where ``N``
    is the number of scalar unknowns known when the expression was built.
    """

    __slots__ = ("system", "const", "coef")

    def __init__(self, system: "LinearSystem", const: np.ndarray, coef: np.ndarray):
        self.system = system
        self.const = const
        self.coef = coef

    @property
    def shape(self) -> tuple[int, int]:
        return self.const.shape

    def _coef(self, n: int) -> np.ndarray:
        if self.coef.shape[0] == n:
            return self.coef
        pad = np.zeros((n - self.coef.shape[0],) + self.const.shape, dtype=np.int64)
        return np.concatenate([self.coef, pad])

    def is_constant(self) -> bool:
        return not self.coef.any()

    def _lift(self, other) -> "Affine":
        if isinstance(other, Affine):
            return other
        return self.system.const(other)

    def __add__(self, other) -> "Affine":
        o = self._lift(other)
        if o.shape != self.shape:
            raise ShapeError(f"cannot add {self.shape} and {o.shape}")
        n = max(self.coef.shape[0], o.coef.shape[0])
        spec = self.system.spec
        return Affine(self.system, spec.add(self.const, o.const), spec.add(self._coef(n), o._coef(n)))

    __radd__ = __add__

    def __neg__(self) -> "Affine":
        spec = self.system.spec
        return Affine(self.system, spec.neg(self.const), spec.neg(self.coef))

    def __sub__(self, other) -> "Affine":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Affine":
        return self._lift(other) - self

    def sign(self, s: int) -> "Affine":
        return self if s > 0 else -self

    def __matmul__(self, other) -> "Affine":
        spec = self.system.spec
        if isinstance(other, Affine):
            if other.is_constant():
                other = Matrix._raw(spec, other.const)
            elif self.is_constant():
                return Matrix._raw(spec, self.const) @ other
            else:
                raise ValueError("product of two non-constant expressions is not linear")
        if self.shape[1] != other.rows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        return Affine(self.system, spec.matmul(self.const, other.a), spec.matmul(self.coef, other.a))

    def __rmatmul__(self, other: Matrix) -> "Affine":
        spec = self.system.spec
        if other.cols != self.shape[0]:
            raise ShapeError(f"cannot multiply {other.shape} by {self.shape}")
        return Affine(self.system, spec.matmul(other.a, self.const), spec.matmul(other.a, self.coef))

    def evaluate(self, x: np.ndarray) -> Matrix:
        spec = self.system.spec
        coef = self._coef(len(x))
        if len(x) == 0:
            return Matrix._raw(spec, self.const)
        # sum_k x_k * coef_k, done as a ring matrix product on flattened entries
        flat = coef.reshape(len(x), -1).T
        val = spec.matmul(flat, np.asarray(x, dtype=np.int64))
        return Matrix._raw(spec, spec.add(self.const, val.reshape(self.shape)))


def affine_block(parts: Sequence[Sequence], heights: Sequence[int], widths: Sequence[int], system: "LinearSystem") -> Affine:
    """Block assembly of :class:`Affine`/:class:`Matrix` parts; ``None`` is a zero block."""
    spec = system.spec
    n = system.size
    const = np.zeros((sum(heights), sum(widths)), dtype=np.int64)
    coef = np.zeros((n, sum(heights), sum(widths)), dtype=np.int64)
    r0 = 0
    for bi, row in enumerate(parts):
        c0 = 0
        for bj, part in enumerate(row):
            h, w = heights[bi], widths[bj]
            if part is not None:
                if part.shape != (h, w):
                    raise ShapeError(f"block ({bi},{bj}) has shape {part.shape}, expected {(h, w)}")
                if isinstance(part, Matrix):
                    check_same_ring(spec, part.spec)
                    const[r0 : r0 + h, c0 : c0 + w] = part.a
                else:
                    const[r0 : r0 + h, c0 : c0 + w] = part.const
                    coef[:, r0 : r0 + h, c0 : c0 + w] = part._coef(n)
            c0 += w
        r0 += heights[bi]
    return Affine(system, const, coef)


@dataclass
class LinearSystem:
    """Collects matrix equations ``expr == 0`` in named unknown matrices."""

    spec: RingSpec
    size: int = 0
    variables: dict[str, tuple[int, int, int]] = field(default_factory=dict)
    _rows: list[np.ndarray] = field(default_factory=list)
    _rhs: list[np.ndarray] = field(default_factory=list)
    inconsistent: bool = False

    def var(self, name: str, rows: int, cols: int) -> Affine:
        if name in self.variables:
            raise ValueError(f"duplicate unknown {name!r}")
        start = self.size
        self.variables[name] = (start, rows, cols)
        self.size += rows * cols
        return self.ref(name)

    def ref(self, name: str) -> Affine:
        start, rows, cols = self.variables[name]
        coef = np.zeros((self.size, rows, cols), dtype=np.int64)
        idx = np.arange(rows * cols)
        coef.reshape(self.size, rows * cols)[start + idx, idx] = 1
        return Affine(self, np.zeros((rows, cols), dtype=np.int64), coef)

    def const(self, m: Matrix) -> Affine:
        check_same_ring(self.spec, m.spec)
        return Affine(self, m.a.copy(), np.zeros((self.size,) + m.shape, dtype=np.int64))

    def zero(self, rows: int, cols: int) -> Affine:
        return Affine(self, np.zeros((rows, cols), dtype=np.int64), np.zeros((self.size, rows, cols), dtype=np.int64))

    def require_zero(self, expr) -> None:
        if isinstance(expr, Matrix):
            if not expr.is_zero():
                self.inconsistent = True
            return
        if expr.const.size == 0:
            return
        coef = expr._coef(self.size)
        self._rows.append(coef.reshape(self.size, expr.const.size).T)
        self._rhs.append(self.spec.neg(expr.const.ravel()))

    def require_equal(self, lhs, rhs) -> None:
        if isinstance(lhs, Matrix) and isinstance(rhs, Matrix):
            self.require_zero(lhs - rhs)
        elif isinstance(lhs, Matrix):
            self.require_zero(rhs - lhs)
        else:
            self.require_zero(lhs - rhs)

    def matrix(self) -> tuple[Matrix, np.ndarray]:
        n = self.size
        rows = [r if r.shape[1] == n else np.pad(r, ((0, 0), (0, n - r.shape[1]))) for r in self._rows]
        if rows:
            m = np.concatenate(rows)
            rhs = np.concatenate(self._rhs)
        else:
            m = np.zeros((0, n), dtype=np.int64)
            rhs = np.zeros(0, dtype=np.int64)
        return Matrix._raw(self.spec, m), rhs

    def solve(self) -> SolutionSpace:
        if self.inconsistent:
            return SolutionSpace(self.spec, None)
        m, rhs = self.matrix()
        return solve(m, rhs)

    def values(self, x: np.ndarray) -> dict[str, Matrix]:
        out = {}
        for name, (start, rows, cols) in self.variables.items():
            out[name] = Matrix._raw(self.spec, np.asarray(x[start : start + rows * cols]).reshape(rows, cols))
        return out


def all_matrices(spec: RingSpec, rows: int, cols: int) -> Iterable[Matrix]:
    """Every ``rows x cols`` matrix, in lexicographic order of row-major codes."""
    for codes in itertools.product(range(spec.order), repeat=rows * cols):
        yield Matrix._raw(spec, np.array(codes, dtype=np.int64).reshape(rows, cols))


_GL_CACHE: dict[tuple[RingSpec, int], np.ndarray] = {}


def general_linear_group(spec: RingSpec, r: int) -> np.ndarray:
    """Stack of all invertible ``r x r`` matrices as codes, shape ``(|GL|, r, r)``."""
    key = (spec, r)
    if key not in _GL_CACHE:
        q = spec.order
        count = q ** (r * r)
        codes = np.array(list(itertools.product(range(q), repeat=r * r)), dtype=np.int64).reshape(count, r, r)
        arr = codes[_residue_det(codes, spec.p) != 0]
        arr.setflags(write=False)
        _GL_CACHE[key] = arr
    return _GL_CACHE[key]


def _residue_det(stack: np.ndarray, p: int) -> np.ndarray:
    m = stack % p
    r = m.shape[-1]
    if r == 0:
        return np.ones(m.shape[0], dtype=np.int64)
    if r == 1:
        return m[:, 0, 0]
    if r == 2:
        return (m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0]) % p
    if r == 3:
        a = m
        det = (
            a[:, 0, 0] * (a[:, 1, 1] * a[:, 2, 2] - a[:, 1, 2] * a[:, 2, 1])
            - a[:, 0, 1] * (a[:, 1, 0] * a[:, 2, 2] - a[:, 1, 2] * a[:, 2, 0])
            + a[:, 0, 2] * (a[:, 1, 0] * a[:, 2, 1] - a[:, 1, 1] * a[:, 2, 0])
        )
        return det % p
    return np.array([1 if rank_mod_p(x, p) == r else 0 for x in m], dtype=np.int64)


def gl_order(spec: RingSpec, r: int) -> int:
    """``|GL_r(R)| = |GL_r(F_p)| * p^(r^2)``."""
    p = spec.p
    n = 1
    for i in range(r):
        n *= p**r - p**i
    return n * p ** (r * r)
