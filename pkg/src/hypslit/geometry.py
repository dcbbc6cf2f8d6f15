"""Exact planar arithmetic over the rationals.

Every coordinate in the package is a :class:`fractions.Fraction`.  Angles are
never materialised as floats; comparisons reduce to signs of cross and dot
products, and lengths are compared squared.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple, Union

Rat = Fraction
RatLike = Union[Fraction, int, str]


class GeometryError(ValueError):
    """Raised when an input violates a geometric precondition."""


def rat(value: RatLike) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to a Fraction.

    Floats are refused on purpose: they would silently break exactness.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not coordinates")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot make an exact rational from {type(value).__name__}")


def rat_str(q: Fraction) -> str:
    """Serialise as "p/q" in lowest terms (q > 0), including "n/1"."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


class Vec2(NamedTuple):
    x: Fraction
    y: Fraction

    @classmethod
    def of(cls, x: RatLike, y: RatLike) -> "Vec2":
        return cls(rat(x), rat(y))

    def __add__(self, other):  # type: ignore[override]
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other):
        return Vec2(self.x - other.x, self.y - other.y)

    def __neg__(self):
        return Vec2(-self.x, -self.y)

    def __mul__(self, k):  # type: ignore[override]
        k = rat(k)
        return Vec2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def norm_sq(self) -> Fraction:
        return self.x * self.x + self.y * self.y

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def is_upper(self) -> bool:
        """True for the canonical unoriented representative (y>0, or y=0 and x>0)."""
        return self.y > 0 or (self.y == 0 and self.x > 0)

    def canonical(self) -> "Vec2":
        return self if self.is_upper() else -self

    def to_json(self) -> list:
        return [rat_str(self.x), rat_str(self.y)]

    @classmethod
    def from_json(cls, data) -> "Vec2":
        if len(data) != 2:
            raise GeometryError("a vector needs exactly two coordinates")
        return cls(rat(data[0]), rat(data[1]))


ZERO = Vec2(Fraction(0), Fraction(0))


class Mat2(NamedTuple):
    """Row-major 2x2 matrix [[a, b], [c, d]]."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    @classmethod
    def of(cls, a: RatLike, b: RatLike, c: RatLike, d: RatLike) -> "Mat2":
        return cls(rat(a), rat(b), rat(c), rat(d))

    @classmethod
    def identity(cls) -> "Mat2":
        return cls.of(1, 0, 0, 1)

    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    def apply(self, v: Vec2) -> Vec2:
        return Vec2(self.a * v.x + self.b * v.y, self.c * v.x + self.d * v.y)

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "Mat2":
        det = self.det()
        if det == 0:
            raise GeometryError("singular matrix")
        return Mat2(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def to_json(self) -> list:
        return [rat_str(q) for q in self]


def horocycle_matrix(s: RatLike) -> Mat2:
    return Mat2.of(1, rat(s), 0, 1)


def dilation_matrix(lam: RatLike) -> Mat2:
    lam = rat(lam)
    if lam <= 0:
        raise GeometryError("dilation factor must be positive")
    return Mat2(lam, Fraction(0), Fraction(0), 1 / lam)


def cross(u: Vec2, v: Vec2) -> Fraction:
    return u.x * v.y - u.y * v.x


def dot(u: Vec2, v: Vec2) -> Fraction:
    return u.x * v.x + u.y * v.y


def _floor_log4(q: Fraction) -> int:
    # largest j with 4**j <= q, for q > 0
    n, d = q.numerator, q.denominator
    j = (n.bit_length() - d.bit_length()) // 2
    # bit lengths pin j down to within one step either way
    while _pow4_le(j + 1, n, d):
        j += 1
    while not _pow4_le(j, n, d):
        j -= 1
    return j


def _pow4_le(j: int, n: int, d: int) -> bool:
    # 4**j <= n/d
    if j >= 0:
        return d << (2 * j) <= n
    return d <= n << (-2 * j)


def size_of_sq(len_sq: Fraction) -> int:
    """Dyadic size j of a vector from its squared length: 4^j <= |v|^2 < 4^(j+1)."""
    len_sq = rat(len_sq)
    if len_sq <= 0:
        raise GeometryError("degenerate vector")
    return _floor_log4(len_sq)


def size_of(v: Vec2) -> int:
    if v.is_zero():
        raise GeometryError("degenerate vector")
    return size_of_sq(v.norm_sq())


def floor_log2(q: Fraction) -> int:
    """Largest l with 2^l <= q (q > 0)."""
    q = rat(q)
    if q <= 0:
        raise GeometryError("log of a nonpositive number")
    n, d = q.numerator, q.denominator
    l = n.bit_length() - d.bit_length()
    if l >= 0:
        if (d << l) > n:
            l -= 1
    elif d > (n << -l):
        l -= 1
    return l


def align_to_horizontal(v: Vec2) -> Mat2:
    """Rotation-scaling [[x, y], [-y, x]] sending v to (x^2+y^2, 0)."""
    if v.is_zero():
        raise GeometryError("degenerate vector")
    return Mat2(v.x, v.y, -v.y, v.x)


def sine_sq(u: Vec2, v: Vec2) -> Fraction:
    """Squared sine of the angle between u and v."""
    if u.is_zero() or v.is_zero():
        raise GeometryError("degenerate vector")
    c = cross(u, v)
    return c * c / (u.norm_sq() * v.norm_sq())


def angle_at_most(u: Vec2, v: Vec2, bound_num: RatLike, bound_den: RatLike = 1) -> bool:
    """Is the sine of the angle between u and v at most bound_num/bound_den?"""
    if u.is_zero() or v.is_zero():
        raise GeometryError("degenerate vector")
    bound = rat(bound_num) / rat(bound_den)
    if bound < 0:
        return False
    c = cross(u, v)
    return c * c <= bound * bound * u.norm_sq() * v.norm_sq()


def parse_vec(text: str) -> Vec2:
    """Parse "x,y" with rational entries such as "1/2,-3"."""
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if len(parts) != 2:
        raise GeometryError(f"cannot parse vector {text!r}")
    return Vec2(rat(parts[0]), rat(parts[1]))
