"""Finite local rings with square-zero principal maximal ideal.

Two families are supported: ``Z/p^2`` and the dual numbers ``F_p[e]/(e^2)``.
Both have ``p^2`` elements, and both are stored as integer *codes* in
``[0, p^2)`` so that whole matrices can live in numpy integer arrays:

* ``Z/p^2``: the code is the least non-negative representative.
* dual numbers: the code of ``a + b*e`` is ``a + p*b``.

With this encoding the residue of a code is ``code % p``, multiplication by
the uniformizer is ``p * (code % p)`` and division by it is ``code // p`` in
both families; only addition and multiplication differ.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

MAX_P = 7


class RingError(ValueError):
    """Invalid ring data or mixing elements of different rings."""


class NotAUnitError(ArithmeticError):
    pass


class RingKind(str, Enum):
    Z_MOD_P2 = "z-mod-p2"
    DUAL_NUMBERS = "dual-numbers"


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, int(p**0.5) + 1))


@dataclass(frozen=True)
class RingSpec:
    kind: RingKind
    p: int

    def __post_init__(self):
        object.__setattr__(self, "kind", RingKind(self.kind))
        if not isinstance(self.p, int) or not _is_prime(self.p):
            raise RingError(f"p must be prime, got {self.p!r}")
        if self.p > MAX_P:
            raise RingError(f"p={self.p} exceeds the desk-scale cap p <= {MAX_P}")

    # -- construction helpers ------------------------------------------------

    @classmethod
    def parse(cls, name: str) -> "RingSpec":
        """Parse short names: ``z4``, ``z9``, ``z25``, ``z49``, ``f2eps`` ... ``f7eps``."""
        s = name.strip().lower()
        if s.startswith("z") and s[1:].isdigit():
            q = int(s[1:])
            p = round(q**0.5)
            if p * p != q:
                raise RingError(f"{name!r}: modulus must be a prime square")
            return cls(RingKind.Z_MOD_P2, p)
        if s.startswith("f") and s.endswith("eps") and s[1:-3].isdigit():
            return cls(RingKind.DUAL_NUMBERS, int(s[1:-3]))
        raise RingError(f"unknown ring name {name!r}")

    @property
    def short_name(self) -> str:
        if self.kind is RingKind.Z_MOD_P2:
            return f"z{self.p * self.p}"
        return f"f{self.p}eps"

    def __str__(self):
        if self.kind is RingKind.Z_MOD_P2:
            return f"Z/{self.p * self.p}"
        return f"F_{self.p}[e]/(e^2)"

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "p": self.p}

    @classmethod
    def from_json(cls, obj) -> "RingSpec":
        if isinstance(obj, str):
            return cls.parse(obj)
        try:
            return cls(RingKind(obj["kind"]), int(obj["p"]))
        except (KeyError, TypeError) as exc:
            raise RingError(f"malformed ring spec {obj!r}") from exc

    @property
    def order(self) -> int:
        return self.p * self.p

    @property
    def is_dual(self) -> bool:
        return self.kind is RingKind.DUAL_NUMBERS

    # -- vectorised arithmetic on codes --------------------------------------
    # Every method accepts python ints or integer numpy arrays of codes.

    def add(self, x, y):
        p = self.p
        if self.is_dual:
            return (x % p + y % p) % p + p * ((x // p + y // p) % p)
        return (x + y) % (p * p)

    def neg(self, x):
        p = self.p
        if self.is_dual:
            return (-(x % p)) % p + p * ((-(x // p)) % p)
        return (-x) % (p * p)

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def mul(self, x, y):
        p = self.p
        if self.is_dual:
            a, b = x % p, x // p
            c, d = y % p, y // p
            return (a * c) % p + p * ((a * d + b * c) % p)
        return (x * y) % (p * p)

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Matrix product of code arrays; broadcasts over leading axes like ``@``."""
        p = self.p
        if self.is_dual:
            a0, a1 = a % p, a // p
            b0, b1 = b % p, b // p
            return (a0 @ b0) % p + p * ((a0 @ b1 + a1 @ b0) % p)
        return (a @ b) % (p * p)

    def times_p(self, x):
        return self.p * (x % self.p)

    def is_unit_code(self, x) -> bool:
        return x % self.p != 0

    def inv_code(self, x: int) -> int:
        p = self.p
        x = int(x)
        if x % p == 0:
            raise NotAUnitError(f"{self.format_code(x)} is not a unit in {self}")
        if self.is_dual:
            a, b = x % p, x // p
            ai = pow(a, -1, p)
            return ai + p * ((-b * ai * ai) % p)
        return pow(x, -1, p * p)

    def code(self, value) -> int:
        """Canonical code of an element given as int (Z/p^2) or ``(a, b)`` pair (dual)."""
        p = self.p
        if self.is_dual:
            if isinstance(value, (int, np.integer)):
                return int(value) % p
            try:
                a, b = value
            except (TypeError, ValueError) as exc:
                raise RingError(f"dual-number entry must be [a, b], got {value!r}") from exc
            return int(a) % p + p * (int(b) % p)
        if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
            return int(value) % (p * p)
        raise RingError(f"Z/{p * p} entry must be an integer, got {value!r}")

    def value(self, code: int):
        """Inverse of :meth:`code`: int for ``Z/p^2``, ``(a, b)`` for dual numbers."""
        code = int(code)
        if self.is_dual:
            return (code % self.p, code // self.p)
        return code

    def json_entry(self, code: int):
        v = self.value(code)
        return list(v) if isinstance(v, tuple) else v

    def format_code(self, code: int) -> str:
        v = self.value(code)
        if isinstance(v, tuple):
            a, b = v
            return f"{a}+{b}e" if b else str(a)
        return str(v)

    def elements(self) -> list["RingElement"]:
        return [RingElement(self, c) for c in range(self.order)]


def check_same_ring(a: "RingSpec", b: "RingSpec") -> None:
    if a != b:
        raise RingError(f"ring mismatch: {a} vs {b}")


@dataclass(frozen=True)
class ResidueElement:
    """Element of the residue field ``k = R/(p) = F_p``."""

    p: int
    value: int

    def __post_init__(self):
        object.__setattr__(self, "value", int(self.value) % self.p)

    def _check(self, other: "ResidueElement"):
        if other.p != self.p:
            raise RingError(f"residue field mismatch: F_{self.p} vs F_{other.p}")

    def __add__(self, other):
        self._check(other)
        return ResidueElement(self.p, self.value + other.value)

    def __sub__(self, other):
        self._check(other)
        return ResidueElement(self.p, self.value - other.value)

    def __mul__(self, other):
        self._check(other)
        return ResidueElement(self.p, self.value * other.value)

    def __neg__(self):
        return ResidueElement(self.p, -self.value)

    def inverse(self) -> "ResidueElement":
        if self.value == 0:
            raise NotAUnitError("0 has no inverse in the residue field")
        return ResidueElement(self.p, pow(self.value, -1, self.p))


@dataclass(frozen=True)
class RingElement:
    spec: RingSpec
    code: int

    def __post_init__(self):
        if not 0 <= self.code < self.spec.order:
            raise RingError(f"code {self.code} out of range for {self.spec}")

    @classmethod
    def of(cls, spec: RingSpec, value) -> "RingElement":
        return cls(spec, spec.code(value))

    @property
    def value(self):
        return self.spec.value(self.code)

    def _other(self, other) -> "RingElement":
        if isinstance(other, RingElement):
            check_same_ring(self.spec, other.spec)
            return other
        return RingElement.of(self.spec, other)

    def __add__(self, other):
        o = self._other(other)
        return RingElement(self.spec, int(self.spec.add(self.code, o.code)))

    def __sub__(self, other):
        o = self._other(other)
        return RingElement(self.spec, int(self.spec.sub(self.code, o.code)))

    def __mul__(self, other):
        o = self._other(other)
        return RingElement(self.spec, int(self.spec.mul(self.code, o.code)))

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return RingElement(self.spec, int(self.spec.neg(self.code)))

    def __repr__(self):
        return f"RingElement({self.spec.short_name}, {self.spec.format_code(self.code)})"


Scalar = Union[RingElement, int]


def add(a: RingElement, b: RingElement) -> RingElement:
    check_same_ring(a.spec, b.spec)
    return a + b


def mul(a: RingElement, b: RingElement) -> RingElement:
    check_same_ring(a.spec, b.spec)
    return a * b


def neg(a: RingElement) -> RingElement:
    return -a


def uniformizer(spec: RingSpec) -> RingElement:
    # p in Z/p^2 and e in the dual numbers both have code p
    return RingElement(spec, spec.p)


def is_unit(a: RingElement) -> bool:
    return a.code % a.spec.p != 0


def invert(a: RingElement) -> RingElement:
    return RingElement(a.spec, a.spec.inv_code(a.code))


def residue(a: RingElement) -> ResidueElement:
    return ResidueElement(a.spec.p, a.code % a.spec.p)


def lift(r: ResidueElement, spec: RingSpec) -> RingElement:
    if r.p != spec.p:
        raise RingError(f"cannot lift an element of F_{r.p} to {spec}")
    return RingElement(spec, r.value)


def in_maximal_ideal(a: RingElement) -> bool:
    return a.code % a.spec.p == 0


def divide_by_p(a: RingElement) -> ResidueElement:
    """The residue ``t`` with ``p * lift(t) == a``; ``a`` must lie in ``(p)``."""
    if not in_maximal_ideal(a):
        raise RingError(f"{a!r} is not in the maximal ideal (p)")
    return ResidueElement(a.spec.p, a.code // a.spec.p)


def validate_parity(n: int, spec: RingSpec) -> bool:
    """True iff the exotic angulation exists: ``n`` even, or ``n`` odd with ``2p = 0``."""
    if n < 3:
        raise ValueError(f"n must be at least 3, got {n}")
    if n % 2 == 0:
        return True
    return spec.add(spec.p, spec.p) == 0
