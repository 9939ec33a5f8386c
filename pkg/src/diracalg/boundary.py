"""Linear boundary problems over Q[x]: Green's operators, Green's functions and their checks."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .bivariate import Axis, BivDist, Poly2
from .errors import IllPosedError, IntervalError, InvalidProblemError, SingularError
from .ground import Poly, as_poly
from .operators import IdOp, StieltjesCond, act, act_axis, act_pw, apply_cond, format_op
from .piecewise import Piecewise, as_piecewise
from .scalars import RationalLike, rational

Matrix = list[list[Fraction]]


# ---------------------------------------------------------------------------
# exact linear algebra

def matrix_rank(m: Matrix) -> int:
    rows = [list(r) for r in m]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col] / rows[rank][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def matrix_inverse(m: Matrix) -> Matrix:
    n = len(m)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise SingularError("matrix is singular", n - matrix_rank(m))
        aug[col], aug[pivot] = aug[pivot], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def poly_det(m: list[list[Poly]]) -> Poly:
    """Determinant of a small polynomial matrix by cofactor expansion."""
    n = len(m)
    if n == 0:
        return Poly.const(1)
    if n == 1:
        return m[0][0]
    total = Poly()
    for j in range(n):
        if not m[0][j]:
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * poly_det(minor)
        total = total + (term if j % 2 == 0 else -term)
    return total


# ---------------------------------------------------------------------------
# problems

@dataclass(frozen=True)
class EvalMatrix:
    entries: Matrix
    inverse: Optional[Matrix] = None


@dataclass
class BoundaryProblem:
    """``T u = f`` with ``beta_j(u) = 0``; ``T`` monic, fundamental system supplied."""

    T: IdOp
    conds: list[StieltjesCond]
    fundamental: list[Poly]

    def __post_init__(self):
        self.conds = [c if isinstance(c, StieltjesCond) else StieltjesCond.from_op(c) for c in self.conds]
        self.fundamental = [as_poly(u) for u in self.fundamental]
        self.validate()

    @property
    def order(self) -> int:
        return self.T.order()

    def validate(self) -> None:
        if not self.T.is_differential() or not self.T:
            raise InvalidProblemError("T must be a differential operator")
        coeffs = self.T.diff_coeffs()
        n = self.order
        if n == 0:
            raise InvalidProblemError("T must have positive order")
        if coeffs.get(n) != Poly.const(1):
            raise InvalidProblemError(f"T must be monic, leading coefficient is {coeffs.get(n)}")
        if len(self.conds) != n:
            raise InvalidProblemError(f"order {n} needs {n} boundary conditions, got {len(self.conds)}")
        if len(self.fundamental) != n:
            raise InvalidProblemError(f"order {n} needs {n} fundamental solutions, got {len(self.fundamental)}")
        for u in self.fundamental:
            if act(self.T, u):
                raise InvalidProblemError(f"{u} is not a solution of T u = 0")
        W = self.wronskian()
        if not W:
            raise InvalidProblemError("fundamental system is linearly dependent (zero Wronskian)")
        if W.degree > 0:
            raise InvalidProblemError(
                f"Wronskian {W} is not constant; variation of constants would leave Q[x]")

    def wronski_matrix(self) -> list[list[Poly]]:
        n = self.order
        return [[u.derive(i) for u in self.fundamental] for i in range(n)]

    def wronskian(self) -> Poly:
        return poly_det(self.wronski_matrix())

    def is_well_posed(self) -> bool:
        """All local conditions have order below the order of ``T``."""
        return all(c.max_local_order() < self.order for c in self.conds)

    def interval_hint(self) -> tuple[Fraction, Fraction]:
        pts = [Fraction(0)] + [a for c in self.conds for a in c.points()]
        lo, hi = min(pts), max(pts)
        if lo == hi:
            hi = lo + 1
        return lo, hi


def evaluation_matrix(bp: BoundaryProblem) -> Matrix:
    return [[apply_cond(beta, u) for u in bp.fundamental] for beta in bp.conds]


def check_regular(bp: BoundaryProblem) -> EvalMatrix:
    m = evaluation_matrix(bp)
    rank = matrix_rank(m)
    if rank < len(m):
        raise SingularError(
            f"evaluation matrix {format_matrix(m)} is singular (rank defect {len(m) - rank})",
            len(m) - rank)
    return EvalMatrix(m, matrix_inverse(m))


def format_matrix(m: Matrix) -> str:
    from .scalars import format_rational
    return "[" + ", ".join("[" + ", ".join(format_rational(v) for v in row) + "]" for row in m) + "]"


def right_inverse(bp: BoundaryProblem) -> IdOp:
    """Variation of constants: ``sum u_i I w_i`` with ``w`` the last column of the inverse Wronski matrix."""
    n = bp.order
    M = bp.wronski_matrix()
    W = poly_det(M).coeffs[0]
    out = IdOp()
    for i, u in enumerate(bp.fundamental):
        # cofactor of entry (n-1, i)
        minor = [row[:i] + row[i + 1:] for row in M[:-1]]
        w = poly_det(minor) * (Fraction((-1) ** (n - 1 + i)) / W)
        out = out + IdOp.mult(u) * IdOp.I(w)
    return out


def kernel_projector(bp: BoundaryProblem, em: Optional[EvalMatrix] = None) -> IdOp:
    em = em or check_regular(bp)
    inv = em.inverse
    out = IdOp()
    for i, u in enumerate(bp.fundamental):
        for j, beta in enumerate(bp.conds):
            if inv[i][j]:
                out = out + IdOp.mult(u * inv[i][j]) * beta.as_op()
    return out


def greens_operator(bp: BoundaryProblem) -> IdOp:
    em = check_regular(bp)
    Td = right_inverse(bp)
    P = kernel_projector(bp, em)
    return Td - P * Td


# ---------------------------------------------------------------------------
# Green's functions

@dataclass(frozen=True)
class GreensFn:
    g: BivDist
    interval: tuple[Fraction, Fraction]


def _check_interval(alpha: Fraction, beta: Fraction, points: Sequence[Fraction]) -> None:
    if not alpha < beta:
        raise IntervalError(f"empty interval [{alpha}, {beta}]")
    if not alpha <= 0 <= beta:
        raise IntervalError(f"interval [{alpha}, {beta}] must contain the initialization point 0")
    for a in points:
        if not alpha <= a <= beta:
            raise IntervalError(f"evaluation point {a} lies outside [{alpha}, {beta}]")


def op_points(G: IdOp) -> list[Fraction]:
    return sorted({m[2] for m in G.terms if m[0] in ("ED", "EI")})


def extract_greens_fn(G: IdOp, interval: tuple[RationalLike, RationalLike]) -> GreensFn:
    """Translate an operator into its kernel ``g(x, xi)`` term by term."""
    alpha, beta = rational(interval[0]), rational(interval[1])
    _check_interval(alpha, beta, op_points(G))
    raw = []
    zero = Fraction(0)
    for m, c in G.terms.items():
        kind = m[0]
        p = m[1]
        if kind == "D":
            raw.append((Poly2({(p, 0): c}), None, None, ("dd", m[2])))
        elif kind == "I":
            uv = Poly2({(p, m[2]): c})
            # [0 <= xi <= x] = H(x - xi) + H(xi - 0) - 1
            raw += [(uv, None, None, ("Hd",)), (uv, None, zero, ()), (-uv, None, None, ())]
        elif kind == "ED":
            i = m[3]
            raw.append((Poly2({(p, 0): c * (-1) ** i}), None, None, ("dxi", m[2], i)))
        else:
            uv = Poly2({(p, m[3]): c})
            # [0 <= xi <= a] = H(xi - 0) - H(xi - a)
            raw += [(uv, None, zero, ()), (-uv, None, m[2], ())]
    return GreensFn(BivDist(raw), (alpha, beta))


def kernel_action(k: BivDist, f, interval: tuple[RationalLike, RationalLike]) -> BivDist:
    """``integral_alpha^beta k(x, xi) f(xi) dxi`` reduced to the interval."""
    alpha, beta = rational(interval[0]), rational(interval[1])
    fxi = BivDist.lift(f, Axis.XI) if not isinstance(f, BivDist) else f
    return (k * fxi).definite_integral(Axis.XI, alpha, beta).reduce_interval(alpha, beta)


@dataclass
class VerificationReport:
    residual: BivDist
    differential_ok: bool
    conditions: list[tuple[str, bool, BivDist]] = field(default_factory=list)
    interval: tuple[Fraction, Fraction] = (Fraction(0), Fraction(1))

    @property
    def ok(self) -> bool:
        return self.differential_ok and all(ok for _, ok, _ in self.conditions)

    def lines(self) -> list[str]:
        from .scalars import format_rational
        lo, hi = (format_rational(v) for v in self.interval)
        mark = lambda ok: "ok" if ok else "FAILED"  # noqa: E731
        out = [f"T_x g = delta(x-xi) on [{lo},{hi}]: {mark(self.differential_ok)}"]
        if not self.differential_ok:
            out.append(f"  residual T_x g = {self.residual}")
        for name, ok, value in self.conditions:
            out.append(f"{name} g = 0 in x: {mark(ok)}")
            if not ok:
                out.append(f"  got {value}")
        return out


def verify_distributional(bp: BoundaryProblem, gf: GreensFn) -> VerificationReport:
    alpha, beta = gf.interval
    target = BivDist.diag_delta()
    Tg = act_axis(bp.T, gf.g, Axis.X).reduce_interval(alpha, beta)
    report = VerificationReport(Tg, Tg == target, interval=(alpha, beta))
    for cond in bp.conds:
        val = act_axis(cond.as_op(), gf.g, Axis.X).reduce_interval(alpha, beta)
        report.conditions.append((str(cond), not val, val))
    return report


def check_uniqueness(k: BivDist, interval: tuple[RationalLike, RationalLike],
                     extra_degree: int = 5, hermite_params: int = 3) -> bool:
    """Test whether ``k`` acts as the identity kernel on a family of probe polynomials.

    Probes are all monomials up to a degree budget and, for every Dirac
    derivative ``(i, a)`` occurring in ``k``, a Hermite polynomial whose only
    nonzero derivative datum at ``a`` is the i-th one.
    """
    alpha, beta = rational(interval[0]), rational(interval[1])
    if not k:
        return False
    pairs: set[tuple[Fraction, int]] = set()
    max_order = 0
    for (hx, hxi, gen), _ in k.terms.items():
        if gen and gen[0] in ("dx", "dxi"):
            pairs.add((gen[1], gen[2]))
            max_order = max(max_order, gen[2])
        elif gen and gen[0] == "dd":
            max_order = max(max_order, gen[1])
    budget = max_order + extra_degree + 1
    probes = [Poly.monomial(d) for d in range(budget + 1)]
    points = sorted({a for a, _ in pairs})
    free = [alpha + (beta - alpha) * Fraction(j + 1, hermite_params + 1) for j in range(hermite_params)]
    nodes = sorted(set(points) | set(free))
    for a, i in sorted(pairs):
        probes.append(hermite_probe(nodes, max_order, a, i))
    target = lambda f: BivDist.lift(f, Axis.X).reduce_interval(alpha, beta)  # noqa: E731
    return all(kernel_action(k, f, (alpha, beta)) == target(f) for f in probes)


def hermite_probe(nodes: Sequence[Fraction], order: int, a: Fraction, i: int) -> Poly:
    """Polynomial whose derivatives of order <= ``order`` at ``nodes`` vanish except ``p^(i)(a) = 1``."""
    conds = [(b, j) for b in nodes for j in range(order + 1)]
    n = len(conds)
    rows = []
    for b, j in conds:
        row = []
        for d in range(n):
            mono = Poly.monomial(d).derive(j)
            row.append(mono.evaluate(b))
        rows.append(row)
    rhs = [Fraction(int((b, j) == (a, i))) for b, j in conds]
    inv = matrix_inverse(rows)
    coeffs = [sum(inv[r][c] * rhs[c] for c in range(n)) for r in range(n)]
    return Poly(coeffs)


# ---------------------------------------------------------------------------
# piecewise forcing

@dataclass
class ForcedSolution:
    u: Piecewise
    u_kernel: Piecewise
    agree: bool


def apply_greens(bp: BoundaryProblem, f, interval: Optional[tuple[RationalLike, RationalLike]] = None,
                 G: Optional[IdOp] = None) -> ForcedSolution:
    """Solve ``T u = f`` for piecewise ``f`` by the operator and by the kernel."""
    f = as_piecewise(f)
    if f.steps and not bp.is_well_posed():
        raise IllPosedError(
            "a boundary condition of order >= ord T puts Dirac terms in the Green's function; "
            "they cannot multiply a piecewise forcing term")
    G = G if G is not None else greens_operator(bp)
    interval = interval or bp.interval_hint()
    alpha, beta = rational(interval[0]), rational(interval[1])
    u = act_pw(G, f)
    gf = extract_greens_fn(G, (alpha, beta))
    uk_biv = kernel_action(gf.g, f, (alpha, beta))
    u_kernel = uk_biv.to_univariate(Axis.X).pw
    reduced_u = BivDist.lift(u, Axis.X).reduce_interval(alpha, beta)
    return ForcedSolution(u, u_kernel, reduced_u == uk_biv)


def solve_polynomial(bp: BoundaryProblem, f: Poly) -> Poly:
    return act(greens_operator(bp), f)


def describe(bp: BoundaryProblem) -> str:
    conds = ", ".join(str(c) for c in bp.conds)
    return f"T = {format_op(bp.T)}; conditions {conds}"
