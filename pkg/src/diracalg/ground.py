"""The polynomial integro-differential algebra Q[x] with d/dx and the integral from 0."""
from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Iterable, Union

from .scalars import RationalLike, format_rational, rational


class Poly:
    """Immutable polynomial with rational coefficients, ``coeffs[i]`` multiplies ``x**i``."""

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Iterable[RationalLike] = ()):
        cs = [rational(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)
        self._hash = None

    @classmethod
    def const(cls, c: RationalLike) -> "Poly":
        return cls((c,))

    @classmethod
    def monomial(cls, power: int, c: RationalLike = 1) -> "Poly":
        return cls([0] * power + [c])

    @classmethod
    def x(cls) -> "Poly":
        return cls((0, 1))

    # structure
    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_const(self) -> bool:
        return len(self.coeffs) <= 1

    def coeff(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(("Poly", self.coeffs))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    # ring operations
    def __add__(self, other: Union["Poly", RationalLike]) -> "Poly":
        if not isinstance(other, (Poly, int, Fraction)):
            return NotImplemented
        other = as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self.coeff(i) + other.coeff(i) for i in range(n))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other: Union["Poly", RationalLike]) -> "Poly":
        if not isinstance(other, (Poly, int, Fraction)):
            return NotImplemented
        return self + (-as_poly(other))

    def __rsub__(self, other: RationalLike) -> "Poly":
        return as_poly(other) - self

    def __mul__(self, other: Union["Poly", RationalLike]) -> "Poly":
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            return Poly(c * a for a in self.coeffs)
        if not isinstance(other, Poly):
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return ZERO_POLY
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result = ONE_POLY
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c: RationalLike) -> "Poly":
        return self * rational(c)

    # calculus
    def derive(self, times: int = 1) -> "Poly":
        cs = list(self.coeffs)
        for _ in range(times):
            cs = [i * c for i, c in enumerate(cs)][1:]
        return Poly(cs)

    def integrate(self) -> "Poly":
        """Antiderivative with zero constant term."""
        return Poly([0] + [c / (i + 1) for i, c in enumerate(self.coeffs)])

    def evaluate(self, c: RationalLike) -> Fraction:
        c = rational(c)
        acc = Fraction(0)
        for a in reversed(self.coeffs):
            acc = acc * c + a
        return acc

    __call__ = evaluate

    def shift(self, a: RationalLike) -> "Poly":
        """Return ``f(x + a)``."""
        a = rational(a)
        if a == 0:
            return self
        out = [Fraction(0)] * len(self.coeffs)
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            # (x + a)^i expanded by the binomial theorem
            for j in range(i + 1):
                out[j] += c * comb(i, j) * a ** (i - j)
        return Poly(out)

    def integrate_from(self, c: RationalLike) -> "Poly":
        F = self.integrate()
        return F - F.evaluate(c)

    def definite_integral(self, c: RationalLike, d: RationalLike) -> Fraction:
        F = self.integrate()
        return F.evaluate(d) - F.evaluate(c)

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)!r})"

    def __str__(self) -> str:
        return format_poly(self)


def as_poly(value: Union[Poly, RationalLike]) -> Poly:
    return value if isinstance(value, Poly) else Poly.const(value)


ZERO_POLY = Poly()
ONE_POLY = Poly((1,))
X = Poly((0, 1))


def _format_monomial(c: Fraction, power: int, var: str) -> str:
    """Monomial with sign handled by the caller (``c`` is positive here)."""
    if power == 0:
        return format_rational(c)
    mono = var if power == 1 else f"{var}^{power}"
    if c == 1:
        return mono
    return f"{format_rational(c)}*{mono}"


def join_signed(parts: list[tuple[bool, str]]) -> str:
    """Join ``(negative, text)`` pieces into ``a - b + c``."""
    if not parts:
        return "0"
    out = []
    for k, (neg, text) in enumerate(parts):
        if k == 0:
            out.append(f"-{text}" if neg else text)
        else:
            out.append(f" - {text}" if neg else f" + {text}")
    return "".join(out)


def poly_parts(p: Poly, var: str = "x") -> list[tuple[bool, str]]:
    return [
        (c < 0, _format_monomial(abs(c), i, var))
        for i, c in reversed(list(enumerate(p.coeffs)))
        if c
    ]


def format_poly(p: Poly, var: str = "x") -> str:
    """Canonical text in descending powers, e.g. ``x^2 - 3/2*x + 1``."""
    return join_signed(poly_parts(p, var))


def format_coefficient(p: Poly, var: str = "x") -> tuple[bool, str]:
    """Render ``p`` as a multiplicative prefix for a generator, returning ``(negative, text)``.

    The text is empty for a coefficient of 1, so callers write ``text + generator``.
    """
    parts = poly_parts(p, var)
    if len(parts) == 1:
        neg, text = parts[0]
        return neg, "" if text == "1" else text + "*"
    return False, f"({format_poly(p, var)})*"


# functional aliases for the operation names used throughout the docs
def derive(f: Poly) -> Poly:
    return f.derive()


def integrate(f: Poly) -> Poly:
    return f.integrate()


def shift(f: Poly, a: RationalLike) -> Poly:
    return f.shift(a)


def evaluate(f: Poly, c: RationalLike) -> Fraction:
    return f.evaluate(c)


def integrate_from(f: Poly, c: RationalLike) -> Poly:
    return f.integrate_from(c)


def definite_integral(f: Poly, c: RationalLike, d: RationalLike) -> Fraction:
    return f.definite_integral(c, d)
