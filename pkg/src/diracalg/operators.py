"""Integro-differential operators over Q[x] in normal form.

Every operator is a rational combination of basis monomials

* ``("D", p, i)``      x^p D^i
* ``("I", p, q)``      x^p I x^q
* ``("ED", p, a, i)``  x^p ev(a) D^i
* ``("EI", p, a, q)``  x^p ev(a) I x^q   (never with a = 0, since ev(0) I = 0)

where ``D`` is d/dx, ``I`` integrates from 0 and ``ev(a)`` evaluates at ``a``.
Composition is right-acting: ``A * B`` applies ``B`` first.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping, Union

from .bivariate import Axis, BivDist, Poly2
from .distribution import Dist, as_dist
from .errors import RewriteLimitError, UnsupportedOperationError
from .ground import Poly, as_poly, join_signed
from .piecewise import Piecewise, as_piecewise
from .scalars import RationalLike, format_rational, rational

Mono = tuple

_KIND_ORDER = {"D": 0, "I": 1, "ED": 2, "EI": 3}

# Composition of two monomials recurses on the derivative order; this bounds it.
MAX_REWRITE_DEPTH = 200


class IdOp:
    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Mono, RationalLike] | Iterable[tuple[Mono, RationalLike]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Mono, Fraction] = {}
        for mono, c in items:
            if mono[0] == "EI" and mono[2] == 0:
                continue
            acc[mono] = acc.get(mono, Fraction(0)) + rational(c)
        self.terms: dict[Mono, Fraction] = {m: c for m, c in acc.items() if c}
        self._hash = None

    # constructors
    @classmethod
    def identity(cls) -> "IdOp":
        return cls({("D", 0, 0): 1})

    @classmethod
    def mult(cls, f: Union[Poly, RationalLike]) -> "IdOp":
        f = as_poly(f)
        return cls({("D", p, 0): c for p, c in enumerate(f.coeffs)})

    @classmethod
    def D(cls, order: int = 1) -> "IdOp":
        return cls({("D", 0, order): 1})

    @classmethod
    def I(cls, weight: Union[Poly, RationalLike] = 1) -> "IdOp":
        w = as_poly(weight)
        return cls({("I", 0, q): c for q, c in enumerate(w.coeffs)})

    @classmethod
    def ev(cls, a: RationalLike, order: int = 0) -> "IdOp":
        return cls({("ED", 0, rational(a), order): 1})

    @classmethod
    def ev_int(cls, a: RationalLike, weight: Union[Poly, RationalLike] = 1) -> "IdOp":
        w = as_poly(weight)
        return cls({("EI", 0, rational(a), q): c for q, c in enumerate(w.coeffs)})

    @classmethod
    def differential(cls, coeffs: Iterable[Union[Poly, RationalLike]]) -> "IdOp":
        """``sum coeffs[i] * D^i``."""
        terms = {}
        for i, f in enumerate(coeffs):
            for p, c in enumerate(as_poly(f).coeffs):
                terms[("D", p, i)] = c
        return cls(terms)

    # structure
    def __eq__(self, other) -> bool:
        return isinstance(other, IdOp) and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    def part(self, kind: str) -> "IdOp":
        return IdOp({m: c for m, c in self.terms.items() if m[0] == kind})

    def kinds(self) -> set[str]:
        return {m[0] for m in self.terms}

    def diff_coeffs(self) -> dict[int, Poly]:
        """For the differential part, ``{i: coefficient of D^i}``."""
        rows: dict[int, dict[int, Fraction]] = {}
        for m, c in self.terms.items():
            if m[0] == "D":
                rows.setdefault(m[2], {})[m[1]] = c
        return {i: Poly(r.get(k, 0) for k in range(max(r) + 1)) for i, r in rows.items()}

    def order(self) -> int:
        orders = [m[2] for m in self.terms if m[0] in ("D", "ED")]
        return max(orders, default=0)

    def is_differential(self) -> bool:
        return self.kinds() <= {"D"}

    def is_integral_only(self) -> bool:
        """No derivative of positive order anywhere."""
        return all(not (m[0] in ("D", "ED") and m[-1] > 0) for m in self.terms)

    # arithmetic
    def __add__(self, other: "IdOp") -> "IdOp":
        other = as_op(other)
        return IdOp(list(self.terms.items()) + list(other.terms.items()))

    __radd__ = __add__

    def __neg__(self) -> "IdOp":
        return IdOp({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "IdOp") -> "IdOp":
        return self + (-as_op(other))

    def __rsub__(self, other) -> "IdOp":
        return as_op(other) - self

    def __mul__(self, other) -> "IdOp":
        if isinstance(other, (int, Fraction)):
            return IdOp({m: c * other for m, c in self.terms.items()})
        return op_compose(self, as_op(other))

    def __rmul__(self, other) -> "IdOp":
        if isinstance(other, (int, Fraction)):
            return self * other
        return op_compose(as_op(other), self)

    def __pow__(self, n: int) -> "IdOp":
        out = IdOp.identity()
        for _ in range(n):
            out = out * self
        return out

    # actions
    def act(self, f: Union[Poly, RationalLike]) -> Poly:
        return act(self, f)

    def __repr__(self) -> str:
        return f"IdOp({format_op(self)!r})"

    def __str__(self) -> str:
        return format_op(self)


def as_op(value) -> IdOp:
    if isinstance(value, IdOp):
        return value
    if isinstance(value, (Poly, int, Fraction)):
        return IdOp.mult(value)
    raise TypeError(f"cannot use {type(value).__name__} as an operator")


def _shift_left(op: IdOp, p: int) -> IdOp:
    """Left-multiply by x^p."""
    if p == 0:
        return op
    return IdOp({(m[0], m[1] + p) + m[2:]: c for m, c in op.terms.items()})


def _mono_poly(power: int, c: Fraction = Fraction(1)) -> Poly:
    return Poly.monomial(power, c)


def _leibniz(i: int, r: int) -> list[tuple[int, Fraction, int]]:
    """``D^i * x^r = sum c * x^s D^j``, returned as ``(s, c, j)``."""
    out = []
    for j in range(i + 1):
        d = i - j
        if d > r:
            continue
        coef = comb(i, j)
        for t in range(d):
            coef *= r - t
        out.append((r - d, Fraction(coef), j))
    return out


@lru_cache(maxsize=65536)
def _compose_mono(m1: Mono, m2: Mono, depth: int = 0) -> IdOp:
    if depth > MAX_REWRITE_DEPTH:
        raise RewriteLimitError("operator rewriting exceeded its depth bound")
    p = m1[1]
    # move x^r (left factor of m2) through the core of m1
    r = m2[1]
    core2 = (m2[0], 0) + m2[2:]
    out = IdOp()
    kind = m1[0]
    if kind == "D":
        for s, c, j in _leibniz(m1[2], r):
            out = out + _core_times(("D", j), s, core2, depth) * c
    elif kind == "I":
        out = _core_times(("I", m1[2] + r), 0, core2, depth)
    elif kind == "ED":
        a = m1[2]
        for s, c, j in _leibniz(m1[3], r):
            out = out + _core_times(("ED", a, j), 0, core2, depth) * (c * a ** s)
    else:
        a = m1[2]
        out = _core_times(("EI", a, m1[3] + r), 0, core2, depth)
    return _shift_left(out, p)


def _core_times(x_core: tuple, s: int, y: Mono, depth: int) -> IdOp:
    """Normal form of ``x^s * X * Y`` where ``X`` has no left factor and ``Y`` has none either.

    ``x_core`` is ``("D", j)``, ``("I", m)``, ``("ED", a, j)`` or ``("EI", a, m)``.
    """
    kind = x_core[0]
    ykind = y[0]
    if kind == "D":
        j = x_core[1]
        if ykind == "D":
            res = IdOp({("D", 0, j + y[2]): 1})
        elif ykind == "I":
            if j == 0:
                res = IdOp({y: 1})
            else:
                # D^j I x^q = D^(j-1) x^q
                res = IdOp({("D", t, jj): c for t, c, jj in _leibniz(j - 1, y[2])})
        else:
            res = IdOp({y: 1}) if j == 0 else IdOp()
        return _shift_left(res, s)

    if kind == "I":
        m = x_core[1]
        if ykind == "D":
            k = y[2]
            if k == 0:
                res = IdOp({("I", 0, m): 1})
            else:
                # I x^m D = x^m - m I x^(m-1) - [m = 0] ev(0), each times D^(k-1)
                res = IdOp({("D", m, k - 1): 1})
                if m > 0:
                    res = res - _core_times(("I", m - 1), 0, ("D", 0, k - 1), depth + 1) * m
                else:
                    res = res - IdOp({("ED", 0, Fraction(0), k - 1): 1})
        elif ykind == "I":
            q = y[2]
            # I x^m I = (I x^m) I - I (I x^m)
            res = IdOp({("I", m + 1, q): Fraction(1, m + 1), ("I", 0, m + 1 + q): -Fraction(1, m + 1)})
        else:
            res = IdOp({(ykind, m + 1) + y[2:]: Fraction(1, m + 1)})
        return _shift_left(res, s)

    if kind == "ED":
        a, j = x_core[1], x_core[2]
        if ykind == "D":
            res = IdOp({("ED", 0, a, j + y[2]): 1})
        elif ykind == "I":
            if j == 0:
                res = IdOp({("EI", 0, a, y[2]): 1})
            else:
                res = IdOp({("ED", 0, a, jj): c * a ** t for t, c, jj in _leibniz(j - 1, y[2])})
        else:
            res = IdOp({y: 1}) if j == 0 else IdOp()
        return _shift_left(res, s)

    a, m = x_core[1], x_core[2]
    if a == 0:
        return IdOp()
    if ykind == "D":
        k = y[2]
        if k == 0:
            res = IdOp({("EI", 0, a, m): 1})
        else:
            res = IdOp({("ED", 0, a, k - 1): a ** m})
            if m > 0:
                res = res - _core_times(("EI", a, m - 1), 0, ("D", 0, k - 1), depth + 1) * m
            else:
                res = res - IdOp({("ED", 0, Fraction(0), k - 1): 1})
    elif ykind == "I":
        q = y[2]
        A = a ** (m + 1) / (m + 1)
        res = IdOp({("EI", 0, a, q): A, ("EI", 0, a, m + 1 + q): -Fraction(1, m + 1)})
    else:
        res = IdOp({y: a ** (m + 1) / (m + 1)})
    return _shift_left(res, s)


def op_compose(A: IdOp, B: IdOp) -> IdOp:
    acc: dict[Mono, Fraction] = {}
    for m1, c1 in A.terms.items():
        for m2, c2 in B.terms.items():
            for m, c in _compose_mono(m1, m2).terms.items():
                acc[m] = acc.get(m, Fraction(0)) + c1 * c2 * c
    return IdOp(acc)


# ---------------------------------------------------------------------------
# actions

def act(A: IdOp, f: Union[Poly, RationalLike]) -> Poly:
    f = as_poly(f)
    out = Poly()
    for m, c in A.terms.items():
        kind = m[0]
        left = _mono_poly(m[1], c)
        if kind == "D":
            out = out + left * f.derive(m[2])
        elif kind == "I":
            out = out + left * (_mono_poly(m[2]) * f).integrate()
        elif kind == "ED":
            out = out + left * f.derive(m[3]).evaluate(m[2])
        else:
            out = out + left * (_mono_poly(m[3]) * f).integrate().evaluate(m[2])
    return out


def act_pw(A: IdOp, p: Piecewise) -> Piecewise:
    """Action on piecewise functions, defined for operators without derivatives."""
    if not A.is_integral_only():
        raise UnsupportedOperationError(
            "derivative terms do not act consistently on piecewise functions "
            "(the integral there is not compatible with a product rule for D)")
    p = as_piecewise(p)
    out = Piecewise()
    for m, c in A.terms.items():
        kind = m[0]
        left = _mono_poly(m[1], c)
        if kind == "D":
            out = out + p * left
        elif kind == "I":
            out = out + (p * _mono_poly(m[2])).integrate() * left
        elif kind == "ED":
            out = out + Piecewise(left * p.evaluate(m[2]))
        else:
            out = out + Piecewise(left * (p * _mono_poly(m[3])).integrate().evaluate(m[2]))
    return out


def act_dist(A: IdOp, phi: Dist) -> Dist:
    phi = as_dist(phi)
    out = Dist()
    for m, c in A.terms.items():
        kind = m[0]
        left = _mono_poly(m[1], c)
        if kind == "D":
            d = phi
            for _ in range(m[2]):
                d = d.derive()
            out = out + d * left
        elif kind == "I":
            out = out + (phi * _mono_poly(m[2])).integrate() * left
        elif kind == "ED":
            d = phi
            for _ in range(m[3]):
                d = d.derive()
            out = out + Dist(left * d.evaluate(m[2]))
        else:
            out = out + Dist(left * (phi * _mono_poly(m[3])).integrate().evaluate(m[2]))
    return out


def act_axis(A: IdOp, phi: BivDist, axis: Axis = Axis.X) -> BivDist:
    """Let ``A`` act on the variable ``axis`` of a bivariate element."""
    axis = Axis.parse(axis)
    out = BivDist()
    for m, c in A.terms.items():
        kind = m[0]
        left = Poly2.from_poly(_mono_poly(m[1], c), axis)
        if kind in ("D", "ED"):
            d = phi
            for _ in range(m[-1]):
                d = d.derive(axis)
            if kind == "ED":
                d = d.evaluate(axis, m[2])
            out = out + d * left
        else:
            weight = Poly2.from_poly(_mono_poly(m[-1]), axis)
            d = (phi * weight).integrate(axis)
            if kind == "EI":
                d = d.evaluate(axis, m[2])
            out = out + d * left
    return out


# ---------------------------------------------------------------------------
# Stieltjes boundary conditions

class StieltjesCond:
    """A boundary functional ``sum c ev(a) D^k + sum ev(a) I v``."""

    __slots__ = ("local", "weights")

    def __init__(self, local: Mapping[tuple[RationalLike, int], RationalLike] = (),
                 weights: Mapping[RationalLike, Poly] = ()):
        loc: dict[tuple[Fraction, int], Fraction] = {}
        for (a, k), c in dict(local).items():
            key = (rational(a), int(k))
            loc[key] = loc.get(key, Fraction(0)) + rational(c)
        self.local = {k: c for k, c in sorted(loc.items()) if c}
        w: dict[Fraction, Poly] = {}
        for a, v in dict(weights).items():
            a = rational(a)
            w[a] = w.get(a, Poly()) + as_poly(v)
        self.weights = {a: v for a, v in sorted(w.items()) if v and a != 0}

    @classmethod
    def from_op(cls, op: IdOp) -> "StieltjesCond":
        local: dict[tuple[Fraction, int], Fraction] = {}
        weights: dict[Fraction, dict[int, Fraction]] = {}
        for m, c in op.terms.items():
            if m[0] not in ("ED", "EI") or m[1] != 0:
                raise ValueError(f"not a boundary functional: {format_op(op)}")
            if m[0] == "ED":
                local[(m[2], m[3])] = c
            else:
                weights.setdefault(m[2], {})[m[3]] = c
        return cls(local, {a: Poly(ws.get(i, 0) for i in range(max(ws) + 1)) for a, ws in weights.items()})

    def as_op(self) -> IdOp:
        terms = {("ED", 0, a, k): c for (a, k), c in self.local.items()}
        for a, v in self.weights.items():
            for q, c in enumerate(v.coeffs):
                terms[("EI", 0, a, q)] = c
        return IdOp(terms)

    def apply(self, f: Poly) -> Fraction:
        return apply_cond(self, f)

    def points(self) -> list[Fraction]:
        return sorted({a for a, _ in self.local} | set(self.weights))

    def max_local_order(self) -> int:
        return max((k for _, k in self.local), default=-1)

    def __eq__(self, other) -> bool:
        return isinstance(other, StieltjesCond) and self.local == other.local and self.weights == other.weights

    def __hash__(self) -> int:
        return hash((tuple(self.local.items()), tuple(self.weights.items())))

    def __repr__(self) -> str:
        return f"StieltjesCond({format_op(self.as_op())!r})"

    def __str__(self) -> str:
        return format_op(self.as_op())


def apply_cond(beta: StieltjesCond, f: Poly) -> Fraction:
    f = as_poly(f)
    total = Fraction(0)
    for (a, k), c in beta.local.items():
        total += c * f.derive(k).evaluate(a)
    for a, v in beta.weights.items():
        total += (v * f).definite_integral(0, a)
    return total


# ---------------------------------------------------------------------------
# printing

def _x_power(p: int) -> str:
    return "" if p == 0 else ("x" if p == 1 else f"x^{p}")


def _d_power(i: int) -> str:
    return "" if i == 0 else ("D" if i == 1 else f"D^{i}")


def _op_mono_key(m: Mono):
    kind = m[0]
    if kind == "D":
        return (_KIND_ORDER[kind], -m[2], -m[1])
    if kind == "I":
        return (_KIND_ORDER[kind], -m[1], -m[2])
    if kind == "ED":
        return (_KIND_ORDER[kind], m[2], -m[3], -m[1])
    return (_KIND_ORDER[kind], m[2], -m[1], -m[3])


def format_op(A: IdOp) -> str:
    parts = []
    for m in sorted(A.terms, key=_op_mono_key):
        c = A.terms[m]
        factors = []
        kind = m[0]
        if m[1]:
            factors.append(_x_power(m[1]))
        if kind == "D":
            if m[2]:
                factors.append(_d_power(m[2]))
        elif kind == "I":
            factors.append("I")
            if m[2]:
                factors.append(_x_power(m[2]))
        elif kind == "ED":
            factors.append(f"ev({format_rational(m[2])})")
            if m[3]:
                factors.append(_d_power(m[3]))
        else:
            factors.append(f"ev({format_rational(m[2])})")
            factors.append("I")
            if m[3]:
                factors.append(_x_power(m[3]))
        mag = abs(c)
        if not factors:
            text = format_rational(mag)
        elif mag == 1:
            text = "*".join(factors)
        else:
            text = format_rational(mag) + "*" + "*".join(factors)
        parts.append((c < 0, text))
    return join_signed(parts)
