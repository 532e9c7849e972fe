"""Integer polynomials in q, stored as coefficient tuples (constant term first)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Tuple, Union

Poly = Tuple[int, ...]

ZERO: Poly = ()
ONE: Poly = (1,)
Q: Poly = (0, 1)


def trim(p: Iterable[int]) -> Poly:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def mono(k: int, c: int = 1) -> Poly:
    return trim((0,) * k + (c,))


def add(a: Poly, b: Poly) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] += x
    return trim(out)


def neg(a: Poly) -> Poly:
    return tuple(-x for x in a)


def sub(a: Poly, b: Poly) -> Poly:
    return add(a, neg(b))


def mul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ZERO
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim(out)


def shift(a: Poly, k: int = 1) -> Poly:
    """Multiply by q**k."""
    return (0,) * k + a if a else ZERO


def evaluate(a: Poly, q) -> Fraction:
    q = Fraction(q)
    acc = Fraction(0)
    for x in reversed(a):
        acc = acc * q + x
    return acc


def to_str(a: Poly) -> str:
    if not a:
        return "0"
    parts = []
    for k, c in enumerate(a):
        if c:
            parts.append(f"{c}" if k == 0 else f"{c}*q" + (f"^{k}" if k > 1 else ""))
    return " + ".join(parts)


@dataclass(frozen=True)
class QScalar:
    """Either a polynomial in q or its value at a recorded rational point."""

    poly: Optional[Poly] = None
    value: Optional[Fraction] = None
    q: Optional[Fraction] = None

    def __post_init__(self):
        if (self.poly is None) == (self.value is None):
            raise ValueError("QScalar needs exactly one of poly / value")
        if self.poly is not None:
            object.__setattr__(self, "poly", trim(self.poly))
        elif self.q is None:
            raise ValueError("evaluated QScalar must record its q point")

    @property
    def mode(self) -> str:
        return "symbolic" if self.poly is not None else "evaluated"

    def _check(self, other: "QScalar") -> None:
        if self.mode != other.mode or self.q != other.q:
            raise ValueError("cannot mix symbolic and evaluated q-scalars")

    def __add__(self, other: "QScalar") -> "QScalar":
        self._check(other)
        if self.poly is not None:
            return QScalar(poly=add(self.poly, other.poly))
        return QScalar(value=self.value + other.value, q=self.q)

    def __mul__(self, other: "QScalar") -> "QScalar":
        self._check(other)
        if self.poly is not None:
            return QScalar(poly=mul(self.poly, other.poly))
        return QScalar(value=self.value * other.value, q=self.q)

    def at(self, q) -> "QScalar":
        if self.poly is None:
            raise ValueError("already evaluated")
        return QScalar(value=evaluate(self.poly, q), q=Fraction(q))

    def to_json(self) -> Union[list, str]:
        if self.poly is not None:
            return list(self.poly)
        return f"{self.value.numerator}/{self.value.denominator}"
