"""Piecewise polynomials ``f + sum f_a H_a`` with Heaviside generators ``H_a = H(x - a)``."""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Union

from .ground import ONE_POLY, ZERO_POLY, Poly, as_poly, format_coefficient, join_signed, poly_parts
from .scalars import RationalLike, co_heaviside, format_rational, heaviside, join, rational


def format_heaviside(a: Fraction, var: str = "x") -> str:
    if a == 0:
        return f"H({var}-0)"
    if a > 0:
        return f"H({var}-{format_rational(a)})"
    return f"H({var}+{format_rational(-a)})"


class Piecewise:
    """Canonical element ``base + sum(steps[a] * H_a)``; no step coefficient is zero."""

    __slots__ = ("base", "steps", "_hash")

    def __init__(self, base: Union[Poly, RationalLike] = ZERO_POLY,
                 steps: Mapping[Fraction, Poly] | Iterable[tuple[RationalLike, Poly]] = ()):
        self.base = as_poly(base)
        items = steps.items() if isinstance(steps, Mapping) else steps
        acc: dict[Fraction, Poly] = {}
        for a, f in items:
            a = rational(a)
            acc[a] = acc.get(a, ZERO_POLY) + as_poly(f)
        self.steps: tuple[tuple[Fraction, Poly], ...] = tuple(
            sorted((a, f) for a, f in acc.items() if f)
        )
        self._hash = None

    @classmethod
    def H(cls, a: RationalLike, coef: Union[Poly, RationalLike] = ONE_POLY) -> "Piecewise":
        return cls(ZERO_POLY, [(rational(a), as_poly(coef))])

    @classmethod
    def H_bar(cls, a: RationalLike) -> "Piecewise":
        """``1 - H_a``, the reflected step ``H(a - x)``."""
        return cls(ONE_POLY, [(rational(a), -ONE_POLY)])

    def step_map(self) -> dict[Fraction, Poly]:
        return dict(self.steps)

    def is_ground(self) -> bool:
        return not self.steps

    def jump_points(self) -> list[Fraction]:
        return [a for a, _ in self.steps]

    def __eq__(self, other) -> bool:
        if isinstance(other, (Poly, int, Fraction)):
            other = Piecewise(other)
        return isinstance(other, Piecewise) and self.base == other.base and self.steps == other.steps

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(("Piecewise", self.base, self.steps))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.base) or bool(self.steps)

    # ring structure
    def __add__(self, other) -> "Piecewise":
        other = as_piecewise(other)
        return Piecewise(self.base + other.base, list(self.steps) + list(other.steps))

    __radd__ = __add__

    def __neg__(self) -> "Piecewise":
        return Piecewise(-self.base, [(a, -f) for a, f in self.steps])

    def __sub__(self, other) -> "Piecewise":
        return self + (-as_piecewise(other))

    def __rsub__(self, other) -> "Piecewise":
        return as_piecewise(other) - self

    def __mul__(self, other) -> "Piecewise":
        if isinstance(other, (int, Fraction, str)):
            c = rational(other)
            return Piecewise(self.base * c, [(a, f * c) for a, f in self.steps])
        if not isinstance(other, (Poly, Piecewise)):
            return NotImplemented
        other = as_piecewise(other)
        terms: list[tuple[Fraction, Poly]] = []
        for a, f in self.steps:
            terms.append((a, f * other.base))
        for b, g in other.steps:
            terms.append((b, self.base * g))
        for a, f in self.steps:
            for b, g in other.steps:
                terms.append((join(a, b), f * g))
        return Piecewise(self.base * other.base, terms)

    __rmul__ = __mul__

    # operators
    def integrate(self) -> "Piecewise":
        """Integral from 0, term by term.

        For ``f H_a`` the result is ``(F - F(a)) H_a + co_heaviside(a) F(a)`` with
        ``F`` the antiderivative of ``f`` vanishing at 0.
        """
        base = self.base.integrate()
        steps = []
        for a, f in self.steps:
            F = f.integrate()
            Fa = F.evaluate(a)
            steps.append((a, F - Fa))
            base = base + co_heaviside(a) * Fa
        return Piecewise(base, steps)

    def derive(self) -> "Piecewise":
        """Derivation extended by zero on the Heaviside generators."""
        return Piecewise(self.base.derive(), [(a, f.derive()) for a, f in self.steps])

    def shift(self, c: RationalLike) -> "Piecewise":
        c = rational(c)
        return Piecewise(self.base.shift(c), [(a - c, f.shift(c)) for a, f in self.steps])

    def evaluate(self, c: RationalLike) -> Fraction:
        """The character ``e_c`` with ``e_c(H_a) = co_heaviside(a - c)``."""
        c = rational(c)
        total = self.base.evaluate(c)
        for a, f in self.steps:
            total += f.evaluate(c) * co_heaviside(a - c)
        return total

    def pseudo_eval(self) -> "Piecewise":
        return self - self.derive().integrate()

    def eval_at(self, t: RationalLike) -> Fraction:
        """Pointwise value of the left-continuous function at ``t``."""
        t = rational(t)
        total = self.base.evaluate(t)
        for a, f in self.steps:
            if heaviside(t - a):
                total += f.evaluate(t)
        return total

    def integrate_from(self, c: RationalLike) -> "Piecewise":
        F = self.integrate()
        return F - F.evaluate(c)

    def max_degree(self) -> int:
        return max([self.base.degree] + [f.degree for _, f in self.steps])

    def __repr__(self) -> str:
        return f"Piecewise({format_piecewise(self)!r})"

    def __str__(self) -> str:
        return format_piecewise(self)


def as_piecewise(value) -> Piecewise:
    if isinstance(value, Piecewise):
        return value
    return Piecewise(as_poly(value))


def piecewise_parts(p: Piecewise, var: str = "x") -> list[tuple[bool, str]]:
    parts = poly_parts(p.base, var)
    for a, f in p.steps:
        neg, prefix = format_coefficient(f, var)
        parts.append((neg, prefix + format_heaviside(a, var)))
    return parts


def format_piecewise(p: Piecewise, var: str = "x") -> str:
    return join_signed(piecewise_parts(p, var))


def pw_mul(p: Piecewise, q: Piecewise) -> Piecewise:
    return as_piecewise(p) * as_piecewise(q)


def pw_integrate(p: Piecewise) -> Piecewise:
    return as_piecewise(p).integrate()


def pw_derive(p: Piecewise) -> Piecewise:
    return as_piecewise(p).derive()


def pw_shift(p: Piecewise, c: RationalLike) -> Piecewise:
    return as_piecewise(p).shift(c)


def pw_evaluate(p: Piecewise, c: RationalLike) -> Fraction:
    return as_piecewise(p).evaluate(c)


def pw_pseudo_eval(p: Piecewise) -> Piecewise:
    return as_piecewise(p).pseudo_eval()


def eval_at(p: Piecewise, t: RationalLike) -> Fraction:
    return as_piecewise(p).eval_at(t)
