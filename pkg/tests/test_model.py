import numpy as np
import pytest

from c11cert import instances
from c11cert.errors import DimensionMismatch, NoCell
from c11cert.model import (
    Cell,
    Halfspace,
    PiecewiseFn,
    Problem,
    active_cells,
    eval as pw_eval,
    grad as pw_grad,
    piece_hessian,
    validate,
)
from c11cert.polynomial import Polynomial

from conftest import fd_grad, fd_jacobian, poly

LEFT = Cell((Halfspace((1.0,), 0.0),))     # t <= 0
RIGHT = Cell((Halfspace((-1.0,), 0.0),))   # t >= 0


def neg_half_square():
    """``-t|t|/2``."""
    return PiecewiseFn(1, ((LEFT, poly(1, (0.5, (2,)))), (RIGHT, poly(1, (-0.5, (2,))))))


def quadrants():
    """``x1|x1|/2 + x2|x2|`` on four quadrant cells."""
    pieces = []
    for s1 in (1.0, -1.0):
        for s2 in (1.0, -1.0):
            cell = Cell((Halfspace((-s1, 0.0), 0.0), Halfspace((0.0, -s2), 0.0)))
            pieces.append((cell, poly(2, (0.5 * s1, (2, 0)), (s2, (0, 2)))))
    return PiecewiseFn(2, tuple(pieces))


class TestEvaluation:
    def test_half_square_value(self):
        assert pw_eval(neg_half_square(), np.array([1.0])) == -0.5

    def test_linear_plus_square_at_origin(self):
        f = PiecewiseFn.from_polynomial(poly(2, (1.0, (1, 0)), (1.0, (0, 2))))
        assert pw_eval(f, np.zeros(2)) == 0.0
        np.testing.assert_array_equal(pw_grad(f, np.zeros(2)), [1.0, 0.0])

    def test_kink_objective(self, kink_equality):
        problem, x = kink_equality
        assert pw_eval(problem.f, x) == -0.5
        np.testing.assert_allclose(pw_grad(problem.f, x), [-1.0, 0.0])
        # independent check of the gradient by central differences
        np.testing.assert_allclose(fd_grad(problem.f, x), [-1.0, 0.0], atol=1e-8)

    def test_gradient_matches_at_kink(self):
        np.testing.assert_array_equal(pw_grad(neg_half_square(), np.zeros(1)), [0.0])

    def test_outside_every_cell(self):
        f = PiecewiseFn(1, ((RIGHT, poly(1, (1.0, (1,)))),))
        with pytest.raises(NoCell):
            pw_eval(f, np.array([-1.0]))

    def test_deterministic(self):
        f = quadrants()
        x = np.array([0.3, -0.2])
        assert pw_eval(f, x) == pw_eval(f, x)
        assert np.array_equal(pw_grad(f, x), pw_grad(f, x))


class TestActiveCells:
    def test_kink_point(self):
        assert active_cells(neg_half_square(), np.zeros(1)) == [0, 1]

    def test_interior_point(self):
        assert active_cells(neg_half_square(), np.array([1.0])) == [1]

    def test_four_quadrants_at_origin(self):
        assert active_cells(quadrants(), np.zeros(2)) == [0, 1, 2, 3]

    def test_slack_respected(self):
        f = quadrants()
        for i in active_cells(f, np.array([1e-11, -0.5])):
            assert f.cells[i].slack(np.array([[1e-11, -0.5]]))[0] >= -f.tol.tol_cell


class TestPieceHessian:
    def test_quadratic_piece(self):
        f = PiecewiseFn.from_polynomial(poly(1, (0.5, (2,))))
        np.testing.assert_array_equal(piece_hessian(f, 0, np.array([3.0])), [[1.0]])

    def test_kink_objective_cell(self, kink_equality):
        problem, x = kink_equality
        f = problem.f
        i = [k for k in f.active_cells(x)][0]
        np.testing.assert_allclose(piece_hessian(f, i, x), np.diag([-1.0, 2.0]))
        # cross-check by differencing the gradient inside the cell
        np.testing.assert_allclose(fd_jacobian(f.grad, x), np.diag([-1.0, 2.0]), atol=1e-6)

    def test_linear_piece(self):
        f = PiecewiseFn.from_polynomial(Polynomial.linear([1.0, -2.0], 4.0))
        np.testing.assert_array_equal(piece_hessian(f, 0, np.ones(2)), np.zeros((2, 2)))


class TestValidate:
    def test_matched_squares_accepted(self):
        f = PiecewiseFn(1, ((LEFT, poly(1, (1.0, (2,)))), (RIGHT, poly(1, (-1.0, (2,))))))
        assert validate(f).accepted

    def test_absolute_value_rejected(self):
        f = PiecewiseFn(1, ((LEFT, poly(1, (-1.0, (1,)))), (RIGHT, poly(1, (1.0, (1,))))))
        rep = validate(f)
        assert not rep.accepted
        assert rep.c1_mismatches and not rep.c0_mismatches
        assert any("C1 mismatch" in m for m in rep.messages())

    def test_kink_objective_accepted(self, kink_equality):
        assert validate(kink_equality[0].f).accepted

    def test_value_jump_rejected(self):
        f = PiecewiseFn(1, ((LEFT, poly(1, (1.0, (0,)))), (RIGHT, poly(1, (0.0, (0,))))))
        assert validate(f).c0_mismatches

    def test_coverage_gap(self):
        gap = Cell((Halfspace((-1.0,), 1.0),))    # t >= 1
        f = PiecewiseFn(1, ((LEFT, poly(1, (1.0, (2,)))), (gap, poly(1, (1.0, (2,))))))
        assert validate(f).coverage_gaps

    def test_interior_overlap(self):
        wide = Cell((Halfspace((1.0,), -1.0),))   # t <= 1
        f = PiecewiseFn(1, ((wide, poly(1, (1.0, (2,)))), (RIGHT, poly(1, (1.0, (2,))))))
        assert validate(f).overlaps

    def test_degenerate_cell(self):
        flat = Cell((Halfspace((1.0,), 0.0), Halfspace((-1.0,), 0.0)))
        f = PiecewiseFn(1, ((flat, poly(1)), (LEFT, poly(1)), (RIGHT, poly(1))))
        assert validate(f).degenerate_cells == [0]

    @pytest.mark.parametrize("seed", range(10))
    def test_random_hinge_functions_accepted(self, seed):
        rng = np.random.default_rng(seed)
        f = instances.random_piecewise_quadratic(int(rng.integers(1, 4)), rng)
        assert validate(f, samples=500).accepted


class TestFiniteDifferenceInvariants:
    """Gradients and piece Hessians against differencing at 100 interior points."""

    def _interior_points(self, count=100, seed=0):
        rng = np.random.default_rng(seed)
        while count:
            n = int(rng.integers(1, 4))
            f = instances.random_piecewise_quadratic(n, rng, through=np.zeros(n))
            x = rng.uniform(-2, 2, n)
            if len(f.active_cells(x, 1e-4)) == 1:   # stay clear of cell boundaries
                count -= 1
                yield f, x

    def test_gradient(self):
        for f, x in self._interior_points():
            g = f.grad(x)
            np.testing.assert_allclose(g, fd_grad(f, x), rtol=1e-5, atol=1e-5 * max(1, np.abs(g).max()))

    def test_piece_hessian(self):
        for f, x in self._interior_points(seed=1):
            H = f.hessian(x)
            np.testing.assert_allclose(H, fd_jacobian(f.grad, x), rtol=1e-4, atol=1e-4 * max(1, np.abs(H).max()))


class TestProblem:
    def test_polynomials_wrapped(self, orthant_linear):
        problem, _ = orthant_linear
        assert all(isinstance(f, PiecewiseFn) for f in problem.functions())
        assert (problem.q, problem.m, problem.p) == (1, 2, 0)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            Problem(2, (poly(1, (1.0, (1,))),))

    def test_violations(self, kink_equality):
        problem, _ = kink_equality
        assert problem.violations(np.array([1.0, 0.0])) == []
        kinds = {(k, i) for k, i, _ in problem.violations(np.array([-1.0, 0.0]))}
        assert kinds == {("g", 0), ("h", 0)}
