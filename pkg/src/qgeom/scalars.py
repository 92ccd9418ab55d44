"""Scalar domains the workbench computes over.

Three coefficient fields are supported:

* complex floating point, with a configurable tolerance ``eps`` used for
  every equality/zero test (default 1e-12),
* GF(2) = {0, 1}, exact,
* Gaussian rationals a + b*i with a, b rational, exact.

Scalars of the exact kinds are small operator-overloading value classes so
that generic code can use ordinary ``+ - * /`` everywhere. Every scalar kind
exposes ``.conjugate()`` so star operations are uniform across domains.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Union


class GF2:
    """An element of the two-element field; 1 + 1 = 0."""

    __slots__ = ("v",)

    def __init__(self, v: int = 0):
        self.v = int(v) & 1

    def __add__(self, other):
        return GF2(self.v ^ _gf2val(other))

    __radd__ = __add__
    __sub__ = __add__
    __rsub__ = __add__

    def __mul__(self, other):
        return GF2(self.v & _gf2val(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _gf2val(other)
        if o == 0:
            raise ZeroDivisionError("division by zero in GF(2)")
        return GF2(self.v)

    def __neg__(self):
        return GF2(self.v)

    def __pow__(self, n: int):
        if n == 0:
            return GF2(1)
        return GF2(self.v)

    def conjugate(self):
        return GF2(self.v)

    def __eq__(self, other):
        if isinstance(other, GF2):
            return self.v == other.v
        if isinstance(other, int):
            return self.v == (other & 1)
        return NotImplemented

    def __hash__(self):
        return hash(("GF2", self.v))

    def __bool__(self):
        return self.v == 1

    def __repr__(self):
        return f"GF2({self.v})"


def _gf2val(x) -> int:
    if isinstance(x, GF2):
        return x.v
    if isinstance(x, int):
        return x & 1
    raise TypeError(f"cannot coerce {x!r} into GF(2)")


class GaussianRational:
    """Exact complex number a + b*i with rational a, b."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    def __add__(self, other):
        o = _gauss(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _gauss(other)
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _gauss(other)
        return GaussianRational(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = _gauss(other)
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _gauss(other)
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational(
            (self.re * o.re + self.im * o.im) / d,
            (self.im * o.re - self.re * o.im) / d,
        )

    def __rtruediv__(self, other):
        return _gauss(other) / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pow__(self, n: int):
        out = GaussianRational(1)
        base = self
        for _ in range(int(n)):
            out = out * base
        return out

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __eq__(self, other):
        try:
            o = _gauss(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash(("GaussQ", self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if self.im == 0:
            return f"GQ({self.re})"
        return f"GQ({self.re}{'+' if self.im >= 0 else ''}{self.im}i)"


def _gauss(x) -> GaussianRational:
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x)
    if isinstance(x, complex) and x.real == int(x.real) and x.imag == int(x.imag):
        return GaussianRational(int(x.real), int(x.imag))
    raise TypeError(f"cannot coerce {x!r} into a Gaussian rational")


Scalar = Union[complex, GF2, GaussianRational]


@dataclass(frozen=True)
class ScalarDomain:
    """Field the workbench computes over, with its equality semantics.

    ``kind`` is one of ``"complex"`` (floating, tolerance ``eps``),
    ``"gf2"`` (exact) or ``"gauss"`` (exact Gaussian rationals).
    """

    kind: str
    eps: float = 1e-12

    @property
    def exact(self) -> bool:
        return self.kind != "complex"

    @property
    def conjugable(self) -> bool:
        """Whether conjugation is a meaningful star operation (not GF(2))."""
        return self.kind in ("complex", "gauss")

    @property
    def zero(self) -> Scalar:
        return self.coerce(0)

    @property
    def one(self) -> Scalar:
        return self.coerce(1)

    def coerce(self, x: Any) -> Scalar:
        if self.kind == "complex":
            if isinstance(x, GaussianRational):
                return complex(x)
            return complex(x)
        if self.kind == "gf2":
            return GF2(_gf2val(x))
        return _gauss(x)

    def is_zero(self, x: Scalar) -> bool:
        if self.kind == "complex":
            return abs(x) <= self.eps
        return not bool(x)

    def eq(self, a: Scalar, b: Scalar) -> bool:
        return self.is_zero(a - b)

    def conj(self, x: Scalar) -> Scalar:
        return x.conjugate()

    def abs2(self, x: Scalar):
        """|x|^2 in a form suited to the domain (float, int or Fraction)."""
        if self.kind == "complex":
            return (x * x.conjugate()).real
        if self.kind == "gf2":
            return int(bool(x))
        return x.abs2()


COMPLEX = ScalarDomain("complex")
GF2_DOMAIN = ScalarDomain("gf2")
GAUSS = ScalarDomain("gauss")


def domain_named(name: str, eps: float = 1e-12) -> ScalarDomain:
    table = {"complex": "complex", "gf2": "gf2", "f2": "gf2", "gauss": "gauss",
             "gaussian-rational": "gauss"}
    if name not in table:
        raise ValueError(f"unknown scalar domain {name!r}")
    return ScalarDomain(table[name], eps)
