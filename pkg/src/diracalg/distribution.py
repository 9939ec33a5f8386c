"""Univariate distributions ``f + sum f_a H_a + sum c_{a,k} delta_a^(k)`` over Q[x].

Dirac coefficients are always rational scalars: a polynomial factor in front of
``delta_a^(k)`` is reduced away with the sifting rule and its derivatives.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, Union

from .errors import ForbiddenProductError
from .ground import ZERO_POLY, Poly, as_poly, join_signed
from .piecewise import Piecewise, as_piecewise, piecewise_parts
from .scalars import RationalLike, co_heaviside, format_rational, rational

DiracKey = tuple[Fraction, int]

# When set, reduce_product also runs the one-step rewrite and compares.
CHECK_REDUCTION = False


def format_dirac(a: Fraction, k: int, var: str = "x") -> str:
    if a == 0:
        arg = f"{var}-0"
    elif a > 0:
        arg = f"{var}-{format_rational(a)}"
    else:
        arg = f"{var}+{format_rational(-a)}"
    if k == 0:
        return f"delta({arg})"
    if k == 1:
        return f"delta'({arg})"
    return f"delta^{{{k}}}({arg})"


class Dist:
    __slots__ = ("pw", "diracs", "_hash")

    def __init__(self, pw: Union[Piecewise, Poly, RationalLike] = ZERO_POLY,
                 diracs: Mapping[DiracKey, RationalLike] | Iterable[tuple[DiracKey, RationalLike]] = ()):
        self.pw = as_piecewise(pw if not isinstance(pw, (int, str, Fraction)) else as_poly(rational(pw)))
        items = diracs.items() if isinstance(diracs, Mapping) else diracs
        acc: dict[DiracKey, Fraction] = {}
        for (a, k), lam in items:
            if k < 0:
                raise ValueError("Dirac order must be nonnegative")
            key = (rational(a), int(k))
            acc[key] = acc.get(key, Fraction(0)) + rational(lam)
        self.diracs: tuple[tuple[DiracKey, Fraction], ...] = tuple(
            sorted((key, c) for key, c in acc.items() if c)
        )
        self._hash = None

    @classmethod
    def delta(cls, a: RationalLike, k: int = 0, coef: RationalLike = 1) -> "Dist":
        return cls(ZERO_POLY, [((rational(a), k), coef)])

    def dirac_map(self) -> dict[DiracKey, Fraction]:
        return dict(self.diracs)

    def has_diracs(self) -> bool:
        return bool(self.diracs)

    def __eq__(self, other) -> bool:
        if isinstance(other, (Poly, Piecewise, int, Fraction)):
            other = Dist(as_piecewise(other) if not isinstance(other, (int, Fraction)) else other)
        return isinstance(other, Dist) and self.pw == other.pw and self.diracs == other.diracs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(("Dist", self.pw, self.diracs))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.pw) or bool(self.diracs)

    def __add__(self, other) -> "Dist":
        other = as_dist(other)
        return Dist(self.pw + other.pw, list(self.diracs) + list(other.diracs))

    __radd__ = __add__

    def __neg__(self) -> "Dist":
        return Dist(-self.pw, [(k, -c) for k, c in self.diracs])

    def __sub__(self, other) -> "Dist":
        return self + (-as_dist(other))

    def __rsub__(self, other) -> "Dist":
        return as_dist(other) - self

    def __mul__(self, other) -> "Dist":
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            return Dist(self.pw * c, [(k, lam * c) for k, lam in self.diracs])
        if isinstance(other, Poly):
            return module_scalar_mul(other, self)
        if isinstance(other, Piecewise):
            return piecewise_mul(other, self)
        if isinstance(other, Dist):
            if other.diracs and self.diracs:
                raise ForbiddenProductError("product of distributions is undefined")
            if other.diracs:
                return piecewise_mul(self.pw, other)
            return piecewise_mul(other.pw, self)
        return NotImplemented

    __rmul__ = __mul__

    # operators
    def derive(self) -> "Dist":
        pw = Piecewise(self.pw.base.derive(), [(a, f.derive()) for a, f in self.pw.steps])
        diracs = [((a, k + 1), lam) for (a, k), lam in self.diracs]
        # d/dx (f H_a) contributes f(a) delta_a by sifting
        diracs += [((a, 0), f.evaluate(a)) for a, f in self.pw.steps]
        return Dist(pw, diracs)

    def integrate(self) -> "Dist":
        out = Dist(self.pw.integrate())
        extra_pw = []
        extra_diracs = []
        for (a, k), lam in self.diracs:
            if k > 0:
                extra_diracs.append(((a, k - 1), lam))
            else:
                extra_pw.append(Piecewise(-lam * co_heaviside(a), [(a, Poly.const(lam))]))
        for p in extra_pw:
            out = out + Dist(p)
        return out + Dist(ZERO_POLY, extra_diracs)

    def shift(self, c: RationalLike) -> "Dist":
        c = rational(c)
        return Dist(self.pw.shift(c), [((a - c, k), lam) for (a, k), lam in self.diracs])

    def evaluate(self, c: RationalLike) -> Fraction:
        return self.pw.evaluate(c)

    def integrate_from(self, b: RationalLike) -> "Dist":
        F = self.integrate()
        return F - F.evaluate(b)

    def induced_eval(self) -> "Dist":
        """``id - integral o derivative``; constant-valued on D(F)."""
        return self - self.derive().integrate()

    def filtration_level(self) -> dict[Fraction, int]:
        levels: dict[Fraction, int] = {}
        for a, _ in self.pw.steps:
            levels[a] = max(levels.get(a, 0), 0)
        for (a, k), _ in self.diracs:
            levels[a] = max(levels.get(a, 0), k + 1)
        return levels

    def support_points(self) -> set[Fraction]:
        return set(self.filtration_level())

    def __repr__(self) -> str:
        return f"Dist({format_dist(self)!r})"

    def __str__(self) -> str:
        return format_dist(self)


def as_dist(value) -> Dist:
    if isinstance(value, Dist):
        return value
    if isinstance(value, (int, Fraction)):
        return Dist(Poly.const(value))
    return Dist(as_piecewise(value))


def dist_parts(d: Dist, var: str = "x") -> list[tuple[bool, str]]:
    parts = piecewise_parts(d.pw, var)
    for (a, k), lam in d.diracs:
        mag = abs(lam)
        prefix = "" if mag == 1 else format_rational(mag) + "*"
        parts.append((lam < 0, prefix + format_dirac(a, k, var)))
    return parts


def format_dist(d: Dist, var: str = "x") -> str:
    return join_signed(dist_parts(d, var))


def reduce_product(f: Poly, a: RationalLike, k: int) -> Dist:
    """Normal form of ``f * delta_a^(k)``.

    Uses ``sum_i C(k,i) (-1)^i f^(i)(a) delta_a^(k-i)``.
    """
    a = rational(a)
    f = as_poly(f)
    terms = []
    deriv = f
    for i in range(k + 1):
        terms.append(((a, k - i), comb(k, i) * (-1) ** i * deriv.evaluate(a)))
        deriv = deriv.derive()
    out = Dist(ZERO_POLY, terms)
    if CHECK_REDUCTION:
        stepwise = reduce_product_stepwise(f, a, k)
        if stepwise != out:
            raise AssertionError(f"reduction mismatch for ({f}) * delta^{k}_{a}")
    return out


def reduce_product_stepwise(f: Poly, a: RationalLike, k: int) -> Dist:
    """Same normal form, obtained by repeatedly applying ``f delta^(k) = (f delta^(k-1))' - f' delta^(k-1)``."""
    a = rational(a)
    f = as_poly(f)
    if k == 0:
        return Dist.delta(a, 0, f.evaluate(a))
    return reduce_product_stepwise(f, a, k - 1).derive() - reduce_product_stepwise(f.derive(), a, k - 1)


def module_scalar_mul(f: Poly, phi: Dist) -> Dist:
    f = as_poly(f)
    out = Dist(phi.pw * f)
    for (a, k), lam in phi.diracs:
        out = out + reduce_product(f, a, k) * lam
    return out


def piecewise_mul(p: Piecewise, phi: Dist) -> Dist:
    """Product of a piecewise element with a distribution.

    Allowed when either side carries no singular part: a Heaviside factor
    against a Dirac term has no consistent value.
    """
    p = as_piecewise(p)
    if p.steps and phi.diracs:
        raise ForbiddenProductError(
            "product of a Heaviside function with a Dirac distribution is undefined")
    if not phi.diracs:
        return Dist(p * phi.pw)
    return module_scalar_mul(p.base, phi)


def integrate_dirac_recursive(f: Poly, a: RationalLike, k: int) -> Dist:
    """Integral of ``f * delta_a^(k)`` by the integration-by-parts recursion.

    ``f delta_a^(k)`` integrates to ``f delta_a^(k-1) - integral(f' delta_a^(k-1))``,
    bottoming out at ``f(a) (H_a - co_heaviside(a))``.
    """
    a = rational(a)
    f = as_poly(f)
    if k == 0:
        return Dist(Piecewise(-f.evaluate(a) * co_heaviside(a), [(a, Poly.const(f.evaluate(a)))]))
    return reduce_product(f, a, k - 1) - integrate_dirac_recursive(f.derive(), a, k - 1)


def dist_derive(phi: Dist) -> Dist:
    return as_dist(phi).derive()


def dist_integrate(phi: Dist) -> Dist:
    return as_dist(phi).integrate()


def dist_shift(phi: Dist, c: RationalLike) -> Dist:
    return as_dist(phi).shift(c)


def dist_evaluate(phi: Dist, c: RationalLike) -> Fraction:
    return as_dist(phi).evaluate(c)


def dist_integrate_from(phi: Dist, b: RationalLike) -> Dist:
    return as_dist(phi).integrate_from(b)


def filtration_level(phi: Dist) -> dict[Fraction, int]:
    return as_dist(phi).filtration_level()


def support_points(phi: Dist) -> set[Fraction]:
    return as_dist(phi).support_points()
