import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import minimize

from c11cert import bundles, cones, instances
from c11cert.bundles import HessianBundle, apply, bundle, lagrangian, qmax, qmin, taylor_check
from c11cert.cones import LEQ0, LinearCone
from c11cert.errors import RefinementTooLarge
from c11cert.model import Problem
from c11cert.multipliers import MultiplierVector
from c11cert.polynomial import Polynomial

from conftest import fd_jacobian, poly

SCALARS = (0.0, 0.5, 2.0, 10.0)


def half_square(sign=1.0):
    return instances.signed_half_square(1, 0, sign)


class TestLagrangian:
    def test_orthant(self, orthant_linear):
        problem, x = orthant_linear
        L = lagrangian(problem, MultiplierVector.scalar([1.0, 0.0], []))
        assert len(L.pieces) == 1
        assert L.polys[0].terms == (((0, 2), 1.0),)

    def test_biobjective_kink(self, biobjective_kink):
        problem, x = biobjective_kink
        L = lagrangian(problem, MultiplierVector(np.array([1.0, 0.0]), np.array([0.0]), np.zeros(0)))
        assert len(L.pieces) == 2
        assert all(p.terms == (((2,), 1.0),) for p in L.polys)

    def test_zero_multipliers_give_objective(self, kink_equality):
        problem, _ = kink_equality
        L = lagrangian(problem, MultiplierVector.scalar([0.0, 0.0], [0.0]))
        X = np.random.default_rng(0).uniform(-3, 3, (50, 2))
        np.testing.assert_allclose(L.eval_many(X), problem.f.eval_many(X), atol=1e-12)

    @pytest.mark.parametrize("seed", range(10))
    def test_weighted_sum_on_refinement(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 4))
        fs = [instances.random_piecewise_quadratic(n, rng, max_hinges=2) for _ in range(3)]
        problem = Problem(n, (fs[0],), (fs[1],), (fs[2],))
        w = rng.uniform(0.1, 2.0, 3)
        L = lagrangian(problem, MultiplierVector(np.array([w[0]]), np.array([w[1]]), np.array([w[2]])))
        for x in rng.uniform(-5, 5, (40, n)):
            ref = sum(wi * f(x) for wi, f in zip(w, fs))
            gref = sum(wi * f.grad(x) for wi, f in zip(w, fs))
            assert L(x) == pytest.approx(ref, abs=1e-10 * max(1, abs(ref)))
            np.testing.assert_allclose(L.grad(x), gref, atol=1e-10 * max(1, np.abs(gref).max()))

    def test_refinement_cap(self, monkeypatch):
        monkeypatch.setattr(bundles, "MAX_REFINED_CELLS", 3)
        f = instances.hinge_squared_sum(Polynomial.zero(2), [((1.0, 0.0), 0.0, 1.0), ((0.0, 1.0), 0.0, 1.0)])
        problem = Problem(2, (f,), (f,))
        with pytest.raises(RefinementTooLarge):
            lagrangian(problem, MultiplierVector.scalar([1.0], []))


class TestBundle:
    def test_half_square_at_kink(self):
        b = bundle(half_square(), np.zeros(1))
        assert [H.tolist() for H in b.matrices] == [[[-1.0]], [[1.0]]]

    def test_orthant_lagrangian(self, orthant_linear):
        problem, x = orthant_linear
        L = lagrangian(problem, MultiplierVector.scalar([1.0, 0.0], []))
        b = bundle(L, x)
        assert b.is_singleton
        np.testing.assert_array_equal(b.matrices[0], np.diag([0.0, 2.0]))

    def test_biobjective_lagrangian_dedups(self, biobjective_kink):
        problem, x = biobjective_kink
        L = lagrangian(problem, MultiplierVector(np.array([1.0, 0.0]), np.array([0.0]), np.zeros(0)))
        b = bundle(L, x)
        assert len(b) == 1 and b.matrices[0].tolist() == [[2.0]]

    def test_symmetric_and_nonempty(self):
        rng = np.random.default_rng(1)
        f = instances.random_piecewise_quadratic(3, rng, through=np.zeros(3))
        b = bundle(f, np.zeros(3))
        for H in b.matrices:
            np.testing.assert_allclose(H, H.T, atol=1e-12)
        with pytest.raises(ValueError):
            HessianBundle((), ())

    def test_apply(self):
        b = HessianBundle((np.diag([0.0, 2.0]),), (0,))
        np.testing.assert_array_equal(apply(b, [3.0, 4.0])[0], [0.0, 8.0])
        kink = bundle(half_square(), np.zeros(1))
        assert sorted(float(z[0]) for z in apply(kink, [2.0])) == [-2.0, 2.0]
        assert all(np.all(z == 0) for z in apply(kink, [0.0]))

    def test_extreme_values(self):
        b = HessianBundle((np.diag([0.0, 2.0]),), (0,))
        assert qmin(b, [0.0, 1.0]) == qmax(b, [0.0, 1.0]) == 2.0
        kink = bundle(half_square(), np.zeros(1))
        assert (qmin(kink, [1.0]), qmax(kink, [1.0])) == (-1.0, 1.0)
        assert qmin(kink, [0.0]) == qmax(kink, [0.0]) == 0.0


def random_bundles(count, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(1, 4))
        f = instances.random_piecewise_quadratic(n, rng, through=np.zeros(n))
        out.append((bundle(f, np.zeros(n)), rng))
    return out


class TestSecondOrderProperties:
    def test_homogeneity(self):
        """``apply(b, s v) = s apply(b, v)`` for four scalars and 100 directions."""
        for b, rng in random_bundles(100):
            v = rng.standard_normal(b.matrices[0].shape[0])
            base = apply(b, v)
            for s in SCALARS:
                for z, zs in zip(base, apply(b, s * v)):
                    np.testing.assert_allclose(zs, s * z, rtol=1e-13, atol=1e-13)

    @pytest.mark.parametrize("seed", range(20))
    def test_outer_semicontinuity(self, seed):
        """Hessians along cell-interior sequences converge into the bundle at the limit."""
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 4))
        f = instances.random_piecewise_quadratic(n, rng, max_hinges=3, through=np.zeros(n))
        xbar = np.zeros(n)
        limit = bundle(f, xbar)
        for _ in range(10):
            d = rng.standard_normal(n)
            d /= np.linalg.norm(d)
            seq = [xbar + t * d for t in np.geomspace(1e-1, 1e-9, 9)]
            last = f.hessian(seq[-1])
            assert min(np.linalg.norm(last - H) for H in limit.matrices) <= 1e-8

    def test_local_boundedness(self):
        rng = np.random.default_rng(7)
        f = instances.random_piecewise_quadratic(3, rng, through=np.zeros(3))
        bound = max(np.linalg.norm(f.piece_hessian(i, np.zeros(3))) for i in range(len(f.pieces)))
        for x in 0.1 * rng.standard_normal((100, 3)):
            assert max(np.linalg.norm(H) for H in bundle(f, x).matrices) <= bound + 1e-12

    def test_interior_points_give_finite_difference_hessian(self):
        checked = 0
        for b_unused, rng in random_bundles(60, seed=3):
            n = b_unused.matrices[0].shape[0]
            f = instances.random_piecewise_quadratic(n, rng)
            x = rng.uniform(-2, 2, n)
            if len(f.active_cells(x, 1e-4)) != 1:
                continue
            b = bundle(f, x)
            assert b.is_singleton
            np.testing.assert_allclose(b.matrices[0], fd_jacobian(f.grad, x), rtol=1e-4, atol=1e-4)
            checked += 1
        assert checked >= 30


def local_cone_minimum(H, rows, starts):
    """SLSQP on ``min v^T H v`` over the unit sphere inside the cone, from several starts."""
    cons = [{"type": "eq", "fun": lambda v: v @ v - 1.0}]
    cons += [{"type": "ineq", "fun": (lambda v, a=np.asarray(a): -a @ v)} for a, _, _ in rows]
    best = np.inf
    for v0 in starts:
        res = minimize(lambda v: v @ H @ v, v0, constraints=cons, method="SLSQP", options={"ftol": 1e-14})
        if res.success:
            best = min(best, res.fun)
    return best


class TestConeMinimum:
    """Exact face enumeration against a dense sampling oracle."""

    @pytest.mark.parametrize("seed", range(25))
    def test_against_sampling(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 4))
        rows = [(rng.standard_normal(n), LEQ0, "") for _ in range(int(rng.integers(0, n + 2)))]
        basis = cones.extreme_rays(LinearCone.build(n, rows))
        H = instances.random_symmetric(n, rng, (-2.0, 2.0))
        res = bundles.min_quadratic_on_cone(H, basis)
        if basis.is_trivial:
            assert res is None
            return
        val, v = res
        assert v @ H @ v == pytest.approx(val, abs=1e-12)
        assert np.linalg.norm(v) == pytest.approx(1.0)
        assert cones.contains(LinearCone.build(n, rows), v, 1e-9)
        S = cones.sample_directions(basis, 20000, seed)
        sampled = np.einsum("ki,ij,kj->k", S, H, S).min()
        assert val <= sampled + 1e-12
        assert local_cone_minimum(H, rows, S[np.argsort(np.einsum("ki,ij,kj->k", S, H, S))[:5]]) \
            == pytest.approx(val, abs=1e-6)

    def test_single_ray(self):
        basis = cones.extreme_rays(LinearCone.build(2, [((1.0, 0.0), "EQ0", ""), ((0.0, -1.0), LEQ0, "")]))
        val, v = bundles.min_quadratic_on_cone(np.diag([0.0, 2.0]), basis)
        assert val == 2.0 and v.tolist() == [0.0, 1.0]

    def test_too_many_rays(self):
        rays = np.array([[np.cos(t), np.sin(t), 1.0] for t in np.linspace(0, 2 * np.pi, 14)[:-1]])
        rays /= np.linalg.norm(rays, axis=1, keepdims=True)
        basis = cones.RayBasis(3, rays, np.zeros((0, 3)))
        assert bundles.min_quadratic_on_cone(np.eye(3), basis, max_rays=12) is None


def half_square_oracle(t):
    """``t|t|/2`` and its derivative in closed form, independent of the piecewise machinery."""
    return t * abs(t) / 2, abs(t)


class TestTaylor:
    def test_quadratic_is_exact(self):
        Q = np.array([[2.0, 0.5], [0.5, -1.0]])
        f = Problem(2, (Polynomial.quadratic(Q),)).f
        a, b = np.array([0.3, -1.0]), np.array([-0.4, 2.0])
        r = taylor_check(f, a, b)
        d = b - a
        assert r.delta == pytest.approx(0.5 * d @ Q @ d, abs=1e-12)
        assert r.lower == pytest.approx(r.delta, abs=1e-12) and r.upper == pytest.approx(r.delta, abs=1e-12)
        assert r.passed

    def test_half_square_across_kink(self):
        fa, ga = half_square_oracle(-1.0)
        fb, _ = half_square_oracle(1.0)
        expected = fb - fa - ga * 2.0
        # second check: integral remainder with f''(t) = sign(t)
        remainder, _ = quad(lambda s: (1 - s) * np.sign(-1 + 2 * s) * 4.0, 0, 1, points=[0.5])
        assert expected == pytest.approx(remainder, abs=1e-12)
        r = taylor_check(half_square(), np.array([-1.0]), np.array([1.0]))
        assert r.delta == pytest.approx(expected)
        assert (r.lower, r.upper) == (-2.0, 2.0)
        assert r.crossings == (0.5,)
        assert r.passed

    def test_random_suite(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            n = int(rng.integers(1, 4))
            f = instances.random_piecewise_quadratic(n, rng)
            a, b = rng.uniform(-10, 10, (2, n))
            assert taylor_check(f, a, b).passed
