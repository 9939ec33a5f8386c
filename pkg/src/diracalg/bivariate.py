"""Bivariate piecewise functions and distributions in ``(x, xi)``.

An element is a sum of terms ``c(x, xi) * [H(x-a)] * [H(xi-b)] * g`` where the
optional generator ``g`` is one of

* ``H(x-xi)`` (the diagonal step, written ``Hd`` below),
* ``delta^(k)(x-a)`` or ``delta^(k)(xi-a)`` (tensorial Diracs),
* ``delta^(k)(x-xi)`` (diagonal Diracs).

Canonical forms:

* a diagonal step never carries an ``H(x-a)`` factor; products ``H(x-a) Hd`` are
  rewritten as ``H(x-a) (1 - H(xi-a)) + H(xi-max(a,b)) Hd``,
* a Dirac in ``x`` (or on the diagonal) has an ``x``-free coefficient, obtained by
  sifting ``c(x) delta^(k)(x-p) = sum_i C(k,i) (-1)^i c^(i)(p) delta^(k-i)(x-p)``,
  where ``p = xi`` on the diagonal; symmetrically for Diracs in ``xi``,
* a Heaviside factor in the same variable as a Dirac is refused, except that
  ``H(x-a) delta(x-xi)`` is moved onto ``H(xi-a) delta(x-xi)``.
"""
from __future__ import annotations

import enum
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, Optional, Union

from .distribution import Dist, format_dirac
from .errors import ForbiddenProductError, UnsupportedOperationError
from .ground import Poly, join_signed
from .piecewise import Piecewise, format_heaviside
from .scalars import RationalLike, co_heaviside, format_rational, heaviside, join, rational


class Axis(enum.Enum):
    X = "x"
    XI = "xi"

    @classmethod
    def parse(cls, text: Union[str, "Axis"]) -> "Axis":
        if isinstance(text, Axis):
            return text
        try:
            return cls(text.lower())
        except ValueError:
            raise ValueError(f"unknown axis {text!r}; expected 'x' or 'xi'") from None


# ---------------------------------------------------------------------------
# bivariate polynomials

class Poly2:
    """Polynomial in ``x`` and ``xi``; ``terms[(i, j)]`` multiplies ``x^i xi^j``."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[tuple[int, int], RationalLike] | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[tuple[int, int], Fraction] = {}
        for (i, j), c in items:
            acc[(i, j)] = acc.get((i, j), Fraction(0)) + rational(c)
        self.terms: dict[tuple[int, int], Fraction] = {k: c for k, c in acc.items() if c}
        self._hash = None

    @classmethod
    def const(cls, c: RationalLike) -> "Poly2":
        return cls({(0, 0): c})

    @classmethod
    def from_poly(cls, p: Poly, axis: Axis = Axis.X) -> "Poly2":
        if axis is Axis.X:
            return cls({(i, 0): c for i, c in enumerate(p.coeffs)})
        return cls({(0, j): c for j, c in enumerate(p.coeffs)})

    @classmethod
    def from_polys(cls, f: Poly, g: Poly) -> "Poly2":
        """The tensor ``f(x) * g(xi)``."""
        return cls({(i, j): a * b for i, a in enumerate(f.coeffs) for j, b in enumerate(g.coeffs)})

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly2.const(other)
        return isinstance(other, Poly2) and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: "Poly2") -> "Poly2":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + c
        return Poly2(out)

    def __neg__(self) -> "Poly2":
        return Poly2({k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "Poly2") -> "Poly2":
        return self + (-other)

    def __mul__(self, other: Union["Poly2", RationalLike]) -> "Poly2":
        if not isinstance(other, Poly2):
            c = rational(other)
            return Poly2({k: v * c for k, v in self.terms.items()})
        out: dict[tuple[int, int], Fraction] = {}
        for (i, j), a in self.terms.items():
            for (k, l), b in other.terms.items():
                key = (i + k, j + l)
                out[key] = out.get(key, Fraction(0)) + a * b
        return Poly2(out)

    __rmul__ = __mul__

    def is_free_of(self, axis: Axis) -> bool:
        idx = 0 if axis is Axis.X else 1
        return all(k[idx] == 0 for k in self.terms)

    def derive(self, axis: Axis) -> "Poly2":
        if axis is Axis.X:
            return Poly2({(i - 1, j): i * c for (i, j), c in self.terms.items() if i})
        return Poly2({(i, j - 1): j * c for (i, j), c in self.terms.items() if j})

    def integrate(self, axis: Axis) -> "Poly2":
        """Antiderivative along ``axis`` vanishing where that variable is 0."""
        if axis is Axis.X:
            return Poly2({(i + 1, j): c / (i + 1) for (i, j), c in self.terms.items()})
        return Poly2({(i, j + 1): c / (j + 1) for (i, j), c in self.terms.items()})

    def substitute(self, axis: Axis, a: RationalLike) -> "Poly2":
        """Set the variable ``axis`` to the constant ``a``."""
        a = rational(a)
        out: dict[tuple[int, int], Fraction] = {}
        for (i, j), c in self.terms.items():
            if axis is Axis.X:
                key, val = (0, j), c * a ** i
            else:
                key, val = (i, 0), c * a ** j
            out[key] = out.get(key, Fraction(0)) + val
        return Poly2(out)

    def on_diagonal(self, keep: Axis) -> "Poly2":
        """Restrict to ``x = xi`` and express the result in the variable ``keep``."""
        out: dict[tuple[int, int], Fraction] = {}
        for (i, j), c in self.terms.items():
            key = (i + j, 0) if keep is Axis.X else (0, i + j)
            out[key] = out.get(key, Fraction(0)) + c
        return Poly2(out)

    def swap(self) -> "Poly2":
        return Poly2({(j, i): c for (i, j), c in self.terms.items()})

    def slices(self, axis: Axis) -> dict[int, Poly]:
        """Split as ``sum other^j * p_j(axis)``, returning ``{j: p_j}``."""
        rows: dict[int, dict[int, Fraction]] = {}
        for (i, j), c in self.terms.items():
            own, other = (i, j) if axis is Axis.X else (j, i)
            rows.setdefault(other, {})[own] = c
        out = {}
        for other, coeffs in rows.items():
            n = max(coeffs) + 1
            out[other] = Poly(coeffs.get(k, 0) for k in range(n))
        return out

    def to_poly(self, axis: Axis) -> Poly:
        """View a polynomial in the single variable ``axis``."""
        if not self.is_free_of(Axis.XI if axis is Axis.X else Axis.X):
            raise ValueError("polynomial depends on both variables")
        return self.slices(axis).get(0, Poly())

    def evaluate(self, x: RationalLike, xi: RationalLike) -> Fraction:
        x, xi = rational(x), rational(xi)
        return sum((c * x ** i * xi ** j for (i, j), c in self.terms.items()), Fraction(0))

    def monomials(self) -> list[tuple[int, int, Fraction]]:
        return sorted(((i, j, c) for (i, j), c in self.terms.items()),
                      key=lambda t: (-(t[0] + t[1]), -t[0]))

    def __repr__(self) -> str:
        return f"Poly2({format_poly2(self)!r})"

    def __str__(self) -> str:
        return format_poly2(self)


ONE2 = Poly2.const(1)


def _mono_text(i: int, j: int) -> str:
    parts = []
    if i:
        parts.append("x" if i == 1 else f"x^{i}")
    if j:
        parts.append("xi" if j == 1 else f"xi^{j}")
    return "*".join(parts)


def poly2_parts(p: Poly2) -> list[tuple[bool, str]]:
    out = []
    for i, j, c in p.monomials():
        mono = _mono_text(i, j)
        mag = abs(c)
        if not mono:
            text = format_rational(mag)
        elif mag == 1:
            text = mono
        else:
            text = f"{format_rational(mag)}*{mono}"
        out.append((c < 0, text))
    return out


def format_poly2(p: Poly2) -> str:
    return join_signed(poly2_parts(p))


# ---------------------------------------------------------------------------
# generators

# ``()`` no generator; ``("Hd",)`` diagonal step; ``("dx", a, k)``, ``("dxi", a, k)``
# tensorial Diracs; ``("dd", k)`` diagonal Dirac of order k.
Gen = tuple
NOGEN: Gen = ()
HD: Gen = ("Hd",)
Key = tuple  # (hx, hxi, gen)


def _sift(c: Poly2, axis: Axis, point: Optional[Fraction], k: int) -> list[tuple[Poly2, int]]:
    """Sift ``c * delta^(k)`` along ``axis`` at ``point`` (``None`` means the diagonal)."""
    out = []
    deriv = c
    for i in range(k + 1):
        if point is None:
            keep = Axis.XI if axis is Axis.X else Axis.X
            val = deriv.on_diagonal(keep)
        else:
            val = deriv.substitute(axis, point)
        if val:
            out.append((val * (comb(k, i) * (-1) ** i), k - i))
        deriv = deriv.derive(axis)
    return out


def _opt_join(a: Optional[Fraction], b: Optional[Fraction]) -> Optional[Fraction]:
    if a is None:
        return b
    if b is None:
        return a
    return join(a, b)


def _normalize(raw: Iterable[tuple[Poly2, Optional[Fraction], Optional[Fraction], Gen]]) -> dict:
    acc: dict[Key, Poly2] = {}

    def put(c: Poly2, hx, hxi, gen):
        if not c:
            return
        key = (hx, hxi, gen)
        prev = acc.get(key)
        acc[key] = c if prev is None else prev + c

    for c, hx, hxi, gen in raw:
        if not c:
            continue
        kind = gen[0] if gen else None
        if kind is None:
            put(c, hx, hxi, gen)
        elif kind == "Hd":
            if hx is None:
                put(c, None, hxi, HD)
            else:
                # H(x-a) Hd = H(x-a) (1 - H(xi-a)) + H(xi-a) Hd, times the H(xi-b) factor
                put(c, hx, hxi, NOGEN)
                put(-c, hx, _opt_join(hxi, hx), NOGEN)
                put(c, None, _opt_join(hxi, hx), HD)
        elif kind == "dx":
            if hx is not None:
                raise ForbiddenProductError(
                    "product of a Heaviside function with a Dirac distribution in x is undefined")
            _, a, k = gen
            for val, order in _sift(c, Axis.X, a, k):
                put(val, None, hxi, ("dx", a, order))
        elif kind == "dxi":
            if hxi is not None:
                raise ForbiddenProductError(
                    "product of a Heaviside function with a Dirac distribution in xi is undefined")
            _, a, k = gen
            for val, order in _sift(c, Axis.XI, a, k):
                put(val, hx, None, ("dxi", a, order))
        elif kind == "dd":
            k = gen[1]
            if hx is not None:
                if k > 0:
                    raise ForbiddenProductError(
                        "product of H(x-a) with a derivative of delta(x-xi) is undefined")
                hxi = _opt_join(hxi, hx)
            for val, order in _sift(c, Axis.X, None, k):
                put(val, None, hxi, ("dd", order))
        else:  # pragma: no cover - internal invariant
            raise ValueError(f"unknown generator {gen!r}")
    return {k: v for k, v in acc.items() if v}


def _key_order(key: Key):
    hx, hxi, gen = key
    rank = {None: 0, "Hd": 1, "dx": 2, "dxi": 3, "dd": 4}[gen[0] if gen else None]
    gen_rest = tuple(gen[1:]) if gen else ()
    return (rank, gen_rest, hx is not None, hx or 0, hxi is not None, hxi or 0)


class BivDist:
    """Canonical element of the bivariate distribution module."""

    __slots__ = ("terms", "_hash")

    def __init__(self, raw: Iterable[tuple[Poly2, Optional[RationalLike], Optional[RationalLike], Gen]] = ()):
        self.terms: dict[Key, Poly2] = _normalize(
            (c, None if hx is None else rational(hx), None if hxi is None else rational(hxi), tuple(gen))
            for c, hx, hxi, gen in raw
        )
        self._hash = None

    # constructors
    @classmethod
    def from_poly2(cls, c: Poly2) -> "BivDist":
        return cls([(c, None, None, NOGEN)])

    @classmethod
    def const(cls, c: RationalLike) -> "BivDist":
        return cls([(Poly2.const(c), None, None, NOGEN)])

    @classmethod
    def diag_step(cls, coef: Poly2 = ONE2) -> "BivDist":
        return cls([(coef, None, None, HD)])

    @classmethod
    def diag_delta(cls, k: int = 0, coef: Poly2 = ONE2) -> "BivDist":
        return cls([(coef, None, None, ("dd", k))])

    @classmethod
    def step(cls, axis: Axis, a: RationalLike, coef: Poly2 = ONE2) -> "BivDist":
        a = rational(a)
        if axis is Axis.X:
            return cls([(coef, a, None, NOGEN)])
        return cls([(coef, None, a, NOGEN)])

    @classmethod
    def delta(cls, axis: Axis, a: RationalLike, k: int = 0, coef: Poly2 = ONE2) -> "BivDist":
        tag = "dx" if axis is Axis.X else "dxi"
        return cls([(coef, None, None, (tag, rational(a), k))])

    @classmethod
    def lift(cls, value, axis: Axis = Axis.X) -> "BivDist":
        """Embed a univariate Poly, Piecewise or Dist in the variable ``axis``."""
        if isinstance(value, BivDist):
            return value
        if isinstance(value, Poly2):
            return cls.from_poly2(value)
        if isinstance(value, (int, Fraction)):
            return cls.const(value)
        if isinstance(value, Poly):
            return cls.from_poly2(Poly2.from_poly(value, axis))
        if isinstance(value, Piecewise):
            value = Dist(value)
        if not isinstance(value, Dist):
            raise TypeError(f"cannot lift {type(value).__name__}")
        raw = [(Poly2.from_poly(value.pw.base, axis), None, None, NOGEN)]
        for a, f in value.pw.steps:
            c = Poly2.from_poly(f, axis)
            raw.append((c, a, None, NOGEN) if axis is Axis.X else (c, None, a, NOGEN))
        tag = "dx" if axis is Axis.X else "dxi"
        for (a, k), lam in value.diracs:
            raw.append((Poly2.const(lam), None, None, (tag, a, k)))
        return cls(raw)

    @classmethod
    def _from_terms(cls, terms: dict) -> "BivDist":
        out = cls.__new__(cls)
        out.terms = terms
        out._hash = None
        return out

    def raw_terms(self):
        return [(c, hx, hxi, gen) for (hx, hxi, gen), c in self.terms.items()]

    # comparisons
    def __eq__(self, other) -> bool:
        if not isinstance(other, BivDist):
            try:
                other = BivDist.lift(other)
            except TypeError:
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    # queries
    def generators(self) -> set[str]:
        return {gen[0] for (_, _, gen) in self.terms if gen}

    def has_diracs(self) -> bool:
        return bool(self.generators() & {"dx", "dxi", "dd"})

    def is_piecewise(self) -> bool:
        return not self.has_diracs()

    def dirac_terms(self, kind: str) -> list[tuple[Poly2, Optional[Fraction], Optional[Fraction], Gen]]:
        return [(c, hx, hxi, gen) for (hx, hxi, gen), c in self.terms.items() if gen and gen[0] == kind]

    def depends_on(self, axis: Axis) -> bool:
        for (hx, hxi, gen), c in self.terms.items():
            if not c.is_free_of(axis):
                return True
            if gen and gen[0] in ("Hd", "dd"):
                return True
            if axis is Axis.X and (hx is not None or (gen and gen[0] == "dx")):
                return True
            if axis is Axis.XI and (hxi is not None or (gen and gen[0] == "dxi")):
                return True
        return False

    def to_univariate(self, axis: Axis = Axis.X) -> Dist:
        """Project an element that only involves ``axis`` onto a univariate Dist."""
        other = Axis.XI if axis is Axis.X else Axis.X
        if self.depends_on(other):
            raise ValueError(f"element depends on {other.value}")
        base = Poly()
        steps = []
        diracs = []
        for (hx, hxi, gen), c in self.terms.items():
            p = c.to_poly(axis)
            h = hx if axis is Axis.X else hxi
            if not gen:
                if h is None:
                    base = base + p
                else:
                    steps.append((h, p))
            else:
                _, a, k = gen
                diracs.append(((a, k), p.coeff(0)))
        return Dist(Piecewise(base, steps), diracs)

    # ring / module operations
    def __add__(self, other) -> "BivDist":
        other = BivDist.lift(other)
        return BivDist(self.raw_terms() + other.raw_terms())

    __radd__ = __add__

    def __neg__(self) -> "BivDist":
        return BivDist._from_terms({k: -c for k, c in self.terms.items()})

    def __sub__(self, other) -> "BivDist":
        return self + (-BivDist.lift(other))

    def __rsub__(self, other) -> "BivDist":
        return BivDist.lift(other) - self

    def __mul__(self, other) -> "BivDist":
        if isinstance(other, (int, Fraction)):
            return BivDist._from_terms({k: c * other for k, c in self.terms.items() if other})
        if isinstance(other, Poly2):
            return BivDist([(c * other, hx, hxi, gen) for c, hx, hxi, gen in self.raw_terms()])
        if isinstance(other, (Poly, Piecewise, Dist)):
            other = BivDist.lift(other, Axis.X)
        if not isinstance(other, BivDist):
            return NotImplemented
        raw = []
        for c1, hx1, hxi1, g1 in self.raw_terms():
            for c2, hx2, hxi2, g2 in other.raw_terms():
                raw.append((c1 * c2, _opt_join(hx1, hx2), _opt_join(hxi1, hxi2), _gen_product(g1, g2)))
        return BivDist(raw)

    __rmul__ = __mul__

    # calculus
    def derive(self, axis: Axis) -> "BivDist":
        axis = Axis.parse(axis)
        raw = []
        for c, hx, hxi, gen in self.raw_terms():
            raw.extend(_derive_term(c, hx, hxi, gen, axis))
        return BivDist(raw)

    def integrate(self, axis: Axis) -> "BivDist":
        axis = Axis.parse(axis)
        raw = []
        for c, hx, hxi, gen in self.raw_terms():
            raw.extend(_integrate_term(c, hx, hxi, gen, axis))
        return BivDist(raw)

    def evaluate(self, axis: Axis, a: RationalLike) -> "BivDist":
        axis = Axis.parse(axis)
        a = rational(a)
        raw = []
        for c, hx, hxi, gen in self.raw_terms():
            raw.extend(_evaluate_term(c, hx, hxi, gen, axis, a))
        return BivDist(raw)

    def definite_integral(self, axis: Axis, alpha: RationalLike, beta: RationalLike) -> "BivDist":
        alpha, beta = rational(alpha), rational(beta)
        if alpha >= beta:
            raise ValueError(f"definite integral needs alpha < beta, got [{alpha}, {beta}]")
        F = self.integrate(axis)
        return F.evaluate(axis, beta) - F.evaluate(axis, alpha)

    def exchange(self) -> "BivDist":
        raw = []
        for c, hx, hxi, gen in self.raw_terms():
            c2 = c.swap()
            kind = gen[0] if gen else None
            if kind is None:
                raw.append((c2, hxi, hx, NOGEN))
            elif kind == "Hd":
                # H(x - xi) becomes H(xi - x) = 1 - H(x - xi)
                raw.append((c2, hxi, hx, NOGEN))
                raw.append((-c2, hxi, hx, HD))
            elif kind == "dx":
                raw.append((c2, hxi, hx, ("dxi", gen[1], gen[2])))
            elif kind == "dxi":
                raw.append((c2, hxi, hx, ("dx", gen[1], gen[2])))
            else:
                k = gen[1]
                raw.append((c2 * (-1) ** k, hxi, hx, gen))
        return BivDist(raw)

    def shift(self, axis: Axis, c: RationalLike) -> "BivDist":
        """Shift one variable; refused on diagonal terms."""
        axis = Axis.parse(axis)
        c = rational(c)
        if self.generators() & {"Hd", "dd"}:
            raise UnsupportedOperationError("shifts of diagonal distributions are not defined")
        raw = []
        for coef, hx, hxi, gen in self.raw_terms():
            new = Poly2()
            for i, j, v in coef.monomials():
                mono = Poly.monomial(i if axis is Axis.X else j).shift(c)
                other_power = j if axis is Axis.X else i
                for p, w in enumerate(mono.coeffs):
                    key = (p, other_power) if axis is Axis.X else (other_power, p)
                    new = new + Poly2({key: v * w})
            if axis is Axis.X:
                hx = None if hx is None else hx - c
                if gen and gen[0] == "dx":
                    gen = ("dx", gen[1] - c, gen[2])
            else:
                hxi = None if hxi is None else hxi - c
                if gen and gen[0] == "dxi":
                    gen = ("dxi", gen[1] - c, gen[2])
            raw.append((new, hx, hxi, gen))
        return BivDist(raw)

    def reduce_interval(self, alpha: RationalLike, beta: RationalLike) -> "BivDist":
        """Canonical representative modulo the ideal generated by ``1 - H_alpha`` and ``H_beta``.

        Heaviside factors at or beyond ``beta`` vanish and those at or before
        ``alpha`` become 1, in both variables.
        """
        alpha, beta = rational(alpha), rational(beta)
        raw = []
        for c, hx, hxi, gen in self.raw_terms():
            if (hx is not None and hx >= beta) or (hxi is not None and hxi >= beta):
                continue
            if hx is not None and hx <= alpha:
                hx = None
            if hxi is not None and hxi <= alpha:
                hxi = None
            raw.append((c, hx, hxi, gen))
        return BivDist(raw)

    def eval_point(self, x: RationalLike, xi: RationalLike) -> Fraction:
        """Pointwise value of a Dirac-free element, left-continuous in each variable."""
        x, xi = rational(x), rational(xi)
        total = Fraction(0)
        for (hx, hxi, gen), c in self.terms.items():
            if gen and gen[0] != "Hd":
                raise ValueError("pointwise values of Dirac terms are undefined")
            v = c.evaluate(x, xi)
            if hx is not None:
                v *= heaviside(x - hx)
            if hxi is not None:
                v *= heaviside(xi - hxi)
            if gen:
                v *= heaviside(x - xi)
            total += v
        return total

    def __repr__(self) -> str:
        return f"BivDist({format_biv(self)!r})"

    def __str__(self) -> str:
        return format_biv(self)


def _gen_product(g1: Gen, g2: Gen) -> Gen:
    if not g1:
        return g2
    if not g2:
        return g1
    if g1 == HD and g2 == HD:
        return HD
    if g1 == HD or g2 == HD:
        raise ForbiddenProductError("product of H(x-xi) with a Dirac distribution is undefined")
    raise ForbiddenProductError("product of distributions is undefined")


def _univariate_integral(c: Poly2, h: Optional[Fraction], axis: Axis):
    """Integrate ``c * H(axis - h)`` along ``axis``, other variable constant.

    Yields ``(coef, step_point_or_None)`` pieces.
    """
    for power, p in c.slices(axis).items():
        other = Poly.monomial(power)
        pw = Piecewise(p) if h is None else Piecewise.H(h, p)
        res = pw.integrate()
        yield _tensor(res.base, other, axis), None
        for a, f in res.steps:
            yield _tensor(f, other, axis), a


def _tensor(own: Poly, other: Poly, axis: Axis) -> Poly2:
    return Poly2.from_polys(own, other) if axis is Axis.X else Poly2.from_polys(other, own)


def _integrate_term(c: Poly2, hx, hxi, gen: Gen, axis: Axis):
    kind = gen[0] if gen else None
    out = []
    if axis is Axis.X:
        if kind is None:
            for coef, a in _univariate_integral(c, hx, Axis.X):
                out.append((coef, a, hxi, NOGEN))
        elif kind == "Hd":
            C = c.integrate(Axis.X)
            Cd = C.on_diagonal(Axis.XI)
            out.append((C - Cd, None, hxi, HD))
            # C(xi, xi) * (1 - H(xi-0)) with the H(xi-b) factor
            out.append((Cd, None, hxi, NOGEN))
            out.append((-Cd, None, _opt_join(hxi, Fraction(0)), NOGEN))
        elif kind == "dx":
            _, a, k = gen
            if k > 0:
                out.append((c, None, hxi, ("dx", a, k - 1)))
            else:
                out.append((c, a, hxi, NOGEN))
                out.append((c * -co_heaviside(a), None, hxi, NOGEN))
        elif kind == "dxi":
            for coef, a in _univariate_integral(c, hx, Axis.X):
                out.append((coef, a, None, gen))
        else:
            k = gen[1]
            if k > 0:
                out.append((c, None, hxi, ("dd", k - 1)))
            else:
                # c(xi) * (H(x-xi) - (1 - H(xi-0)))
                out.append((c, None, hxi, HD))
                out.append((-c, None, hxi, NOGEN))
                out.append((c, None, _opt_join(hxi, Fraction(0)), NOGEN))
        return out

    if kind is None:
        for coef, b in _univariate_integral(c, hxi, Axis.XI):
            out.append((coef, hx, b, NOGEN))
    elif kind == "Hd":
        if hxi is not None:
            # H(xi-b) Hd = H(x-b) Hd - H(x-b) (1 - H(xi-b)); integrate each piece
            b = hxi
            out.extend(_integrate_xi_diag(c, b))
            out.extend(_integrate_term(-c, b, None, NOGEN, Axis.XI))
            out.extend(_integrate_term(c, b, b, NOGEN, Axis.XI))
        else:
            out.extend(_integrate_xi_diag(c, None))
    elif kind == "dxi":
        _, a, k = gen
        if k > 0:
            out.append((c, hx, None, ("dxi", a, k - 1)))
        else:
            out.append((c, hx, a, NOGEN))
            out.append((c * -co_heaviside(a), hx, None, NOGEN))
    elif kind == "dx":
        for coef, b in _univariate_integral(c, hxi, Axis.XI):
            out.append((coef, None, b, gen))
    else:
        k = gen[1]
        if hxi is not None and k > 0:
            raise ForbiddenProductError(
                "integral in xi of H(xi-b) times a derivative of delta(x-xi) is undefined")
        if k > 0:
            # minus sign: d/dxi of delta^(k-1)(x-xi) is -delta^(k)(x-xi)
            out.append((-c, None, None, ("dd", k - 1)))
            out.extend(_integrate_term(c.derive(Axis.XI), None, None, ("dd", k - 1), Axis.XI))
        else:
            # c(xi) delta(x-xi) = c(x) delta(x-xi); integral is c(x) (H(x-0) - Hd)
            cx = c.on_diagonal(Axis.X)
            out.append((cx, _opt_join(hxi, Fraction(0)), None, NOGEN))
            out.append((-cx, hxi, None, HD))
    return out


def _integrate_xi_diag(c: Poly2, hx: Optional[Fraction]):
    """Integral in xi of ``c(x, xi) H(x-xi)`` times an optional constant ``H(x-hx)``."""
    C = c.integrate(Axis.XI)
    Cd = C.on_diagonal(Axis.X)
    return [
        (C - Cd, hx, None, HD),
        (Cd, _opt_join(hx, Fraction(0)), None, NOGEN),
    ]


def _derive_term(c: Poly2, hx, hxi, gen: Gen, axis: Axis):
    kind = gen[0] if gen else None
    out = []
    if axis is Axis.X:
        # coefficients of x-Diracs are x-free, so this term vanishes for them
        out.append((c.derive(Axis.X), hx, hxi, gen))
        if kind is None:
            if hx is not None:
                out.append((c, None, hxi, ("dx", hx, 0)))
        elif kind == "Hd":
            out.append((c, None, hxi, ("dd", 0)))
        elif kind == "dx":
            out.append((c, None, hxi, ("dx", gen[1], gen[2] + 1)))
        elif kind == "dxi":
            if hx is not None and c.substitute(Axis.X, hx):
                raise UnsupportedOperationError(
                    "delta(x-a)*delta(xi-b) is outside the bivariate basis")
        else:
            out.append((c, None, hxi, ("dd", gen[1] + 1)))
        return out

    if kind is None:
        out.append((c.derive(Axis.XI), hx, hxi, gen))
        if hxi is not None:
            out.append((c, hx, None, ("dxi", hxi, 0)))
    elif kind == "Hd":
        if hxi is not None:
            b = hxi
            # rewrite H(xi-b) Hd with x-side Heavisides, which are constants here
            out.append((c.derive(Axis.XI), b, None, HD))
            out.append((-c, b, None, ("dd", 0)))
            out.extend(_derive_term(-c, b, None, NOGEN, Axis.XI))
            out.extend(_derive_term(c, b, b, NOGEN, Axis.XI))
        else:
            out.append((c.derive(Axis.XI), None, None, HD))
            out.append((-c, None, None, ("dd", 0)))
    elif kind == "dxi":
        out.append((c, hx, None, ("dxi", gen[1], gen[2] + 1)))
    elif kind == "dx":
        # the jump of H(xi-b) only matters where the coefficient survives at xi = b
        if hxi is not None and c.substitute(Axis.XI, hxi):
            raise UnsupportedOperationError(
                "delta(x-a)*delta(xi-b) is outside the bivariate basis")
        out.append((c.derive(Axis.XI), None, hxi, gen))
    else:
        if hxi is not None:
            raise ForbiddenProductError(
                "derivative in xi of H(xi-b) times delta(x-xi) is undefined")
        k = gen[1]
        out.append((c.derive(Axis.XI), None, None, gen))
        out.append((-c, None, None, ("dd", k + 1)))
    return out


def _evaluate_term(c: Poly2, hx, hxi, gen: Gen, axis: Axis, a: Fraction):
    kind = gen[0] if gen else None
    if axis is Axis.X:
        if kind in ("dx", "dd"):
            return []
        ca = c.substitute(Axis.X, a)
        if hx is not None:
            ca = ca * co_heaviside(hx - a)
        if kind is None:
            return [(ca, None, hxi, NOGEN)]
        if kind == "dxi":
            return [(ca, None, None, gen)]
        # H(x-xi) at x = a is 1 - H(xi-a)
        return [(ca, None, hxi, NOGEN), (-ca, None, _opt_join(hxi, a), NOGEN)]
    if kind in ("dxi", "dd"):
        return []
    ca = c.substitute(Axis.XI, a)
    if hxi is not None:
        ca = ca * co_heaviside(hxi - a)
    if kind is None:
        return [(ca, hx, None, NOGEN)]
    if kind == "dx":
        return [(ca, None, None, gen)]
    # H(x-xi) at xi = a is H(x-a)
    return [(ca, a, None, NOGEN)]


# ---------------------------------------------------------------------------
# printing

def _format_arg(var: str, a: Fraction) -> str:
    if a == 0:
        return f"{var}-0"
    if a > 0:
        return f"{var}-{format_rational(a)}"
    return f"{var}+{format_rational(-a)}"


def format_gen(gen: Gen) -> str:
    kind = gen[0]
    if kind == "Hd":
        return "H(x-xi)"
    if kind == "dx":
        return format_dirac(gen[1], gen[2], "x")
    if kind == "dxi":
        return format_dirac(gen[1], gen[2], "xi")
    k = gen[1]
    if k == 0:
        return "delta(x-xi)"
    if k == 1:
        return "delta'(x-xi)"
    return f"delta^{{{k}}}(x-xi)"


def biv_parts(phi: BivDist) -> list[tuple[bool, str]]:
    parts = []
    for key in sorted(phi.terms, key=_key_order):
        hx, hxi, gen = key
        c = phi.terms[key]
        factors = []
        if hx is not None:
            factors.append(format_heaviside(hx, "x"))
        if hxi is not None:
            factors.append(format_heaviside(hxi, "xi"))
        if gen:
            factors.append(format_gen(gen))
        if not factors:
            parts.extend(poly2_parts(c))
            continue
        cparts = poly2_parts(c)
        if len(cparts) == 1:
            neg, text = cparts[0]
            prefix = "" if text == "1" else text + "*"
        else:
            neg, prefix = False, f"({format_poly2(c)})*"
        parts.append((neg, prefix + "*".join(factors)))
    return parts


def format_biv(phi: BivDist) -> str:
    return join_signed(biv_parts(phi))


# ---------------------------------------------------------------------------
# functional interface

def exchange(phi: BivDist) -> BivDist:
    return phi.exchange()


def biv_derive(phi: BivDist, axis: Axis) -> BivDist:
    return phi.derive(axis)


def biv_integrate(phi: BivDist, axis: Axis) -> BivDist:
    return phi.integrate(axis)


def biv_evaluate(phi: BivDist, axis: Axis, a: RationalLike) -> BivDist:
    return phi.evaluate(axis, a)


def biv_definite_integral(phi: BivDist, axis: Axis, alpha: RationalLike, beta: RationalLike) -> BivDist:
    return phi.definite_integral(axis, alpha, beta)


def diagonal_normalize(phi) -> BivDist:
    """Bring raw terms (or an element) onto the canonical basis; idempotent."""
    if isinstance(phi, BivDist):
        return BivDist(phi.raw_terms())
    return BivDist(phi)
