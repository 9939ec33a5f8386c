from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diracalg.bivariate import Axis, BivDist, Poly2
from diracalg.boundary import (
    BoundaryProblem,
    GreensFn,
    apply_greens,
    check_regular,
    check_uniqueness,
    evaluation_matrix,
    extract_greens_fn,
    greens_operator,
    hermite_probe,
    kernel_action,
    verify_distributional,
)
from diracalg.errors import IllPosedError, IntervalError, InvalidProblemError, SingularError
from diracalg.ground import Poly
from diracalg.operators import IdOp, StieltjesCond, act, act_axis, act_pw, apply_cond
from diracalg.piecewise import Piecewise

from conftest import piecewises, polys, small_rats

X = Poly.x()
D, I, ev = IdOp.D(), IdOp.I(), IdOp.ev
Hd = BivDist.diag_step()
delta_diag = BivDist.diag_delta()
UNIT = (Fraction(0), Fraction(1))


def problem(T, conds, fundamental):
    return BoundaryProblem(T, [StieltjesCond.from_op(c) for c in conds], fundamental)


dirichlet = problem(D ** 2, [ev(0), ev(1)], [1, X])
first_order = problem(D, [ev(0)], [1])
initial2 = problem(D ** 2, [ev(0), ev(0, 1)], [1, X])
third = problem(D ** 3, [ev(-1), ev(0), ev(1)], [1, X, X ** 2])
stieltjes = problem(D ** 2, [ev(0), ev(1) * I], [1, X])
illposed = problem(D ** 2, [ev(0), ev(1) + ev(Fraction(1, 2), 2)], [1, X])
REGULAR = [dirichlet, first_order, initial2, third, stieltjes]


def reduced(f, interval) -> BivDist:
    return BivDist.lift(f, Axis.X).reduce_interval(*interval)


# --- problems and Green's operators ----------------------------------------

def test_evaluation_matrices():
    assert check_regular(dirichlet).entries == [[1, 0], [1, 1]]
    assert check_regular(first_order).entries == [[1]]
    neumann = problem(D ** 2, [ev(0, 1), ev(1, 1)], [1, X])
    assert evaluation_matrix(neumann) == [[0, 1], [0, 1]]
    with pytest.raises(SingularError) as err:
        check_regular(neumann)
    assert "singular" in str(err.value) and "rank defect 1" in str(err.value)


def test_problem_validation():
    with pytest.raises(InvalidProblemError):
        problem(IdOp.mult(2) * D, [ev(0)], [1])
    with pytest.raises(InvalidProblemError):
        problem(D ** 2, [ev(0)], [1, X])
    with pytest.raises(InvalidProblemError):
        problem(D ** 2, [ev(0), ev(1)], [1, X ** 2])
    with pytest.raises(InvalidProblemError):
        problem(D ** 2, [ev(0), ev(1)], [X, 2 * X])


def test_greens_operator_examples():
    assert greens_operator(first_order) == I
    assert greens_operator(initial2) == I * I
    assert str(greens_operator(initial2)) == "x*I - I*x"
    assert str(greens_operator(dirichlet)) == "x*I - I*x + x*ev(1)*I*x - x*ev(1)*I"


@pytest.mark.parametrize("bp", REGULAR, ids=["dirichlet", "first", "initial2", "third", "stieltjes"])
def test_defining_identities(bp):
    G = greens_operator(bp)

    @settings(max_examples=50)
    @given(polys(4))
    def check(f):
        u = act(G, f)
        assert act(bp.T, u) == f
        assert all(apply_cond(beta, u) == 0 for beta in bp.conds)

    check()


def test_dirichlet_classical_solution():
    assert act(greens_operator(dirichlet), 1) == (X ** 2 - X) * Fraction(1, 2)


# --- extraction --------------------------------------------------------------

def test_extraction_rows():
    u, v = Poly([1, 1]), Poly([0, 2])
    g = extract_greens_fn(IdOp.mult(u) * IdOp.I(v), UNIT).g
    uv = BivDist.from_poly2(Poly2({(0, 1): 2, (1, 1): 2}))
    assert g == uv * (Hd + BivDist.step(Axis.XI, 0) - 1)
    a = Fraction(1, 2)
    g = extract_greens_fn(IdOp.mult(u) * ev(a, 1), UNIT).g
    assert g == -BivDist.lift(u, Axis.X) * BivDist.delta(Axis.XI, a, 1)


def test_extraction_interval_checks():
    with pytest.raises(IntervalError):
        extract_greens_fn(I, (1, 0))
    with pytest.raises(IntervalError):
        extract_greens_fn(ev(2), UNIT)
    with pytest.raises(IntervalError):
        extract_greens_fn(I, (Fraction(1, 2), 1))


@st.composite
def row_instances(draw):
    a = draw(st.sampled_from([Fraction(-1, 2), Fraction(1, 3), Fraction(1, 2), Fraction(1)]))
    alpha = draw(st.sampled_from([Fraction(-1), Fraction(-3, 4)]))
    beta = draw(st.sampled_from([Fraction(3, 2), Fraction(2)]))
    u, v = draw(polys(2)), draw(polys(2))
    i = draw(st.integers(0, 3))
    return a, (alpha, beta), u, v, i


def row_check(op, f, interval):
    g = extract_greens_fn(op, interval).g
    assert kernel_action(g, f, interval) == reduced(act(op, f), interval)


@settings(max_examples=100)
@given(row_instances(), polys(4))
def test_row_derivative_on_diagonal(inst, f):
    _, interval, u, _, i = inst
    row_check(IdOp.mult(u) * IdOp.D(i), f, interval)


@settings(max_examples=100)
@given(row_instances(), polys(4))
def test_row_integral(inst, f):
    _, interval, u, v, _ = inst
    row_check(IdOp.mult(u) * IdOp.I(v), f, interval)


@settings(max_examples=100)
@given(row_instances(), polys(4))
def test_row_point_derivative(inst, f):
    a, _, u, _, i = inst
    # this row holds for any interval containing the point
    row_check(IdOp.mult(u) * ev(a, i), f, (a - 5, a + 5) if a < 0 else (Fraction(-1), a + 1))


@settings(max_examples=100)
@given(row_instances(), polys(4))
def test_row_definite_integral(inst, f):
    a, interval, u, v, _ = inst
    row_check(IdOp.mult(u) * IdOp.ev_int(a, v), f, interval)


@settings(max_examples=50)
@given(row_instances(), piecewises())
def test_route_equality_for_piecewise_forcing(inst, f):
    a, interval, u, v, _ = inst
    op = IdOp.mult(u) * IdOp.I(v) + IdOp.mult(v) * IdOp.ev_int(a, u)
    g = extract_greens_fn(op, interval).g
    assert kernel_action(g, f, interval) == BivDist.lift(act_pw(op, f), Axis.X).reduce_interval(*interval)


# --- Green's functions ------------------------------------------------------

def classical(x0, xi0):
    return xi0 * (x0 - 1) if xi0 <= x0 else x0 * (xi0 - 1)


def test_dirichlet_green_function():
    gf = extract_greens_fn(greens_operator(dirichlet), UNIT)
    g = gf.g.reduce_interval(*UNIT)
    assert g.is_piecewise()
    assert str(g) == "x*xi - x + (x - xi)*H(x-xi)"
    report = verify_distributional(dirichlet, gf)
    assert report.ok
    assert report.lines()[0] == "T_x g = delta(x-xi) on [0,1]: ok"
    grid = [Fraction(k, 6) + Fraction(1, 97) for k in range(5)]
    for x0 in grid:
        for xi0 in grid:
            if x0 != xi0:
                assert g.eval_point(x0, xi0) == classical(x0, xi0)


def test_first_order_green_function():
    gf = extract_greens_fn(greens_operator(first_order), (-1, 1))
    assert gf.g == Hd + BivDist.step(Axis.XI, 0) - 1
    assert verify_distributional(first_order, gf).ok


@pytest.mark.parametrize("bp", REGULAR, ids=["dirichlet", "first", "initial2", "third", "stieltjes"])
def test_verification_of_extracted_kernels(bp):
    gf = extract_greens_fn(greens_operator(bp), bp.interval_hint())
    report = verify_distributional(bp, gf)
    assert report.ok, report.lines()
    assert not gf.g.reduce_interval(*gf.interval).has_diracs()
    assert check_uniqueness(act_axis(bp.T, gf.g, Axis.X).reduce_interval(*gf.interval), gf.interval)


def test_perturbed_kernel_is_flagged():
    gf = extract_greens_fn(greens_operator(dirichlet), UNIT)
    bad = GreensFn(gf.g + Hd, gf.interval)
    report = verify_distributional(dirichlet, bad)
    assert not report.differential_ok and not report.ok
    assert any("FAILED" in line for line in report.lines())


def test_illposed_kernel_carries_diracs():
    G = greens_operator(illposed)
    g = extract_greens_fn(G, UNIT).g
    half = Fraction(1, 2)
    assert any(gen == ("dxi", half, 0) for _, _, gen in g.terms)
    assert not illposed.is_well_posed()
    # the diagonal evaluation rule sends delta(x-xi) to zero, so the condition row keeps -delta(xi-1/2)
    report = verify_distributional(illposed, extract_greens_fn(G, UNIT))
    assert report.differential_ok
    assert [ok for _, ok, _ in report.conditions] == [True, False]


# --- uniqueness ---------------------------------------------------------------

def test_uniqueness_examples():
    half = Fraction(1, 2)
    x = BivDist.lift(X, Axis.X)
    assert check_uniqueness(delta_diag, UNIT)
    assert not check_uniqueness(2 * delta_diag, UNIT)
    assert not check_uniqueness(delta_diag + x * BivDist.delta(Axis.XI, half), UNIT)
    assert not check_uniqueness(delta_diag + BivDist.diag_delta(1), UNIT)
    assert not check_uniqueness(BivDist(), UNIT)


@given(st.sampled_from([Fraction(1, 4), Fraction(1, 2)]), st.integers(0, 2))
def test_hermite_probe_isolates_one_datum(a, i):
    nodes = [Fraction(0), a, Fraction(1)]
    p = hermite_probe(nodes, 2, a, i)
    for b in nodes:
        for j in range(3):
            assert p.derive(j).evaluate(b) == (1 if (b, j) == (a, i) else 0)


# --- piecewise forcing -------------------------------------------------------

def test_apply_greens_examples():
    sol = apply_greens(dirichlet, Piecewise(1), UNIT)
    assert sol.u == Piecewise((X ** 2 - X) * Fraction(1, 2)) and sol.agree
    sol = apply_greens(first_order, Piecewise.H(0), (-1, 1))
    assert sol.u == Piecewise.H(0, X) and sol.agree


def test_apply_greens_half_step():
    half = Fraction(1, 2)
    sol = apply_greens(dirichlet, Piecewise.H(half), UNIT)
    assert sol.agree
    u = sol.u
    assert u.evaluate(0) == 0 and u.eval_at(1) == 0
    # T u = f away from the jump and the solution is C^1 across it
    assert u.derive().derive() == Piecewise.H(half)
    eps = Fraction(1, 10 ** 12)
    assert abs(u.derive().eval_at(half + eps) - u.derive().eval_at(half - eps)) < Fraction(1, 10 ** 10)


def test_illposed_with_piecewise_forcing_raises():
    with pytest.raises(IllPosedError):
        apply_greens(illposed, Piecewise.H(Fraction(1, 3)), UNIT)


@settings(max_examples=30)
@given(piecewises(max_degree=1), small_rats)
def test_forcing_routes_agree(f, c):
    assert apply_greens(dirichlet, f + c, UNIT).agree
