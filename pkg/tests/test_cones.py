import warnings

import numpy as np
import pytest
from scipy.optimize import linprog

from c11cert import cones
from c11cert.cones import EQ0, LEQ0, LinearCone
from c11cert.errors import DimensionTooLarge, TrivialCone, ZeroGradientWarning
from c11cert.model import Problem
from c11cert.multipliers import active_set
from c11cert.oracle import contingent_probe, tangent_defect
from c11cert.polynomial import Polynomial

from conftest import poly


def cone(n, *rows):
    return LinearCone.build(n, [(a, rel, "") for a, rel in rows])


def rows_of(c):
    return sorted((tuple(r.a), r.relation) for r in c.rows)


def in_generated_cone(basis, v):
    """LP oracle: is ``v = R^T y + L^T z`` with ``y >= 0``?"""
    R, L = basis.rays, basis.lineality
    G = np.vstack([R, L]).T if len(R) + len(L) else np.zeros((basis.n, 0))
    if G.shape[1] == 0:
        return np.linalg.norm(v) <= 1e-9
    bounds = [(0, None)] * len(R) + [(None, None)] * len(L)
    res = linprog(np.zeros(G.shape[1]), A_eq=G, b_eq=v, bounds=bounds, method="highs")
    return res.status == 0


ORTHANT = cone(2, ((-1.0, 0.0), LEQ0), ((0.0, -1.0), LEQ0))
HALF_LINE = cone(2, ((1.0, 0.0), EQ0), ((0.0, -1.0), LEQ0))          # {0} x R_+
POINT = cone(2, ((0.0, 1.0), EQ0), ((1.0, 1.0), EQ0))                 # {0}


class TestBuilders:
    def test_linearization_orthant(self, orthant_linear):
        problem, x = orthant_linear
        assert rows_of(cones.linearization_cone(problem, x)) == rows_of(ORTHANT)

    def test_linearization_unconstrained(self, bowl):
        problem, x = bowl
        assert cones.linearization_cone(problem, x).rows == ()

    def test_linearization_kink_equality(self, kink_equality):
        problem, x = kink_equality
        c = cones.linearization_cone(problem, x)
        assert rows_of(c) == rows_of(cone(2, ((0.0, -1.0), LEQ0), ((1.0, 1.0), EQ0)))
        assert [r.label for r in c.rows] == ["g2", "h1"]

    def test_x0_kink_equality_is_trivial(self, kink_equality):
        problem, x = kink_equality
        c = cones.x0_cone(problem, x, [0.0, 1.0])
        assert rows_of(c) == rows_of(cone(2, ((0.0, -1.0), EQ0), ((1.0, 1.0), EQ0)))
        assert cones.is_trivial(c)
        assert any("ASSUMED_LINEARIZATION" in note for note in c.notes)

    def test_x0_without_strict_multipliers(self, orthant_linear):
        problem, x = orthant_linear
        assert rows_of(cones.x0_cone(problem, x, [0.0, 0.0])) == rows_of(cones.linearization_cone(problem, x))

    def test_x0_orthant(self, orthant_linear):
        problem, x = orthant_linear
        assert rows_of(cones.x0_cone(problem, x, [1.0, 0.0])) == rows_of(HALF_LINE)

    def test_x0_rejects_negative_multipliers(self, orthant_linear):
        problem, x = orthant_linear
        with pytest.raises(ValueError):
            cones.x0_cone(problem, x, [-1.0, 0.0])

    def test_critical_orthant(self, orthant_linear):
        problem, x = orthant_linear
        assert rows_of(cones.critical_cone(problem, x)) == rows_of(HALF_LINE)

    def test_critical_kink_equality(self, kink_equality):
        problem, x = kink_equality
        assert cones.is_trivial(cones.critical_cone(problem, x))

    def test_critical_whole_space(self, bowl):
        problem, x = bowl
        c = cones.critical_cone(problem, x)
        assert c.rows == () and not cones.is_trivial(c)

    def test_mop_union_biobjective(self, biobjective_kink):
        problem, x = biobjective_kink
        union = cones.mop_critical_union(problem, x)
        assert [l for l, _ in union.components] == [0, 1]
        for _, c in union.components:
            b = cones.extreme_rays(c)
            np.testing.assert_array_equal(b.rays, [[1.0]])
            assert len(b.lineality) == 0

    def test_mop_union_single_objective(self, orthant_linear):
        problem, x = orthant_linear
        (l, c), = cones.mop_critical_union(problem, x).components
        b1, b2 = cones.extreme_rays(c), cones.extreme_rays(cones.critical_cone(problem, x))
        np.testing.assert_array_equal(b1.rays, b2.rays)

    def test_mop_union_two_linear_objectives(self):
        problem = Problem(2, (Polynomial.linear([1.0, 0.0]), Polynomial.linear([0.0, 1.0])))
        union = cones.mop_critical_union(problem, np.zeros(2))
        rays = [cones.extreme_rays(c).rays.tolist() for _, c in union.components]
        assert rays == [[[0.0, -1.0]], [[-1.0, 0.0]]]
        assert union.contains(np.array([0.0, -1.0])) and union.contains(np.array([-1.0, 0.0]))
        assert not union.contains(np.array([-1.0, -1.0]))   # a union, not its convex hull

    def test_zero_gradient_row_dropped_with_warning(self):
        problem = Problem(1, (poly(1, (1.0, (2,))),), (poly(1, (1.0, (2,))),))
        with pytest.warns(ZeroGradientWarning):
            c = cones.linearization_cone(problem, np.zeros(1))
        assert c.rows == () and c.notes


class TestRowCanonicalization:
    def test_positive_multiples_merge(self):
        c = cone(2, ((1.0, 2.0), LEQ0), ((2.0, 4.0), LEQ0))
        assert len(c.rows) == 1

    def test_opposite_inequalities_become_equality(self):
        c = cone(2, ((1.0, 2.0), LEQ0), ((-3.0, -6.0), LEQ0))
        assert [r.relation for r in c.rows] == [EQ0]

    def test_zero_rows_dropped(self):
        assert cone(2, ((0.0, 0.0), LEQ0)).rows == ()


class TestMembership:
    def test_examples(self):
        assert cones.contains(ORTHANT, np.array([1.0, 1.0]))
        assert not cones.contains(ORTHANT, np.array([-1.0, 0.0]))
        assert cones.contains(HALF_LINE, np.array([0.0, 2.0]))

    def test_triviality(self):
        assert cones.is_trivial(POINT)
        assert not cones.is_trivial(cone(1, ((-1.0,), LEQ0)))
        assert not cones.is_trivial(LinearCone.whole_space(3))


class TestExtremeRays:
    def test_orthant(self):
        b = cones.extreme_rays(ORTHANT)
        np.testing.assert_array_equal(b.rays, [[1.0, 0.0], [0.0, 1.0]])
        assert b.lineality.shape == (0, 2)

    def test_trivial(self):
        b = cones.extreme_rays(POINT)
        assert b.is_trivial

    def test_whole_plane(self):
        b = cones.extreme_rays(LinearCone.whole_space(2))
        assert len(b.rays) == 0 and b.lineality.shape == (2, 2)
        np.testing.assert_allclose(b.lineality @ b.lineality.T, np.eye(2), atol=1e-14)

    def test_half_plane_has_one_ray_and_a_line(self):
        b = cones.extreme_rays(cone(2, ((0.0, -1.0), LEQ0)))
        np.testing.assert_array_equal(b.rays, [[0.0, 1.0]])
        assert b.lineality.shape == (1, 2)

    def test_degenerate_pyramid(self):
        """Four facets through the apex of a square pyramid: exactly four rays."""
        rows = [((s * 1.0, 0.0, -1.0), LEQ0) for s in (1, -1)] + [((0.0, s * 1.0, -1.0), LEQ0) for s in (1, -1)]
        b = cones.extreme_rays(cone(3, *rows))
        expected = np.array([[1, 1, 1], [1, -1, 1], [-1, 1, 1], [-1, -1, 1]]) / np.sqrt(3)
        assert sorted(map(tuple, np.round(b.rays, 12))) == sorted(map(tuple, np.round(expected, 12)))

    def test_rays_are_unit_and_ordered(self):
        rng = np.random.default_rng(5)
        c = cone(3, *[(rng.standard_normal(3), LEQ0) for _ in range(4)])
        b = cones.extreme_rays(c)
        np.testing.assert_allclose(np.linalg.norm(b.rays, axis=1), 1.0)
        keys = [tuple(np.round(r, 12)) for r in b.rays]
        assert keys == sorted(keys, reverse=True)

    def test_dimension_cap(self):
        with pytest.raises(DimensionTooLarge):
            cones.extreme_rays(LinearCone.whole_space(9))

    @pytest.mark.parametrize("seed", range(12))
    def test_reconstruction(self, seed):
        """``contains`` agrees with LP membership in cone(rays) + span(lineality) on 1000 vectors."""
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 5))
        rows = []
        for _ in range(int(rng.integers(0, n + 3))):
            a = rng.standard_normal(n) if rng.random() < 0.7 else rng.integers(-2, 3, n).astype(float)
            rows.append((a, EQ0 if rng.random() < 0.15 else LEQ0))
        c = cone(n, *rows)
        b = cones.extreme_rays(c)
        V = [rng.standard_normal(n) for _ in range(700)]
        if not b.is_trivial:   # add members and near-members so both answers occur
            S = cones.sample_directions(b, 300, seed)
            V += [s + 1e-3 * rng.standard_normal(n) * (k % 2) for k, s in enumerate(S[:300])]
        for v in V[:1000]:
            assert cones.contains(c, v, 1e-9) == in_generated_cone(b, v), v


class TestSampling:
    def test_rays_first(self):
        S = cones.sample_directions(cones.extreme_rays(ORTHANT), 4, seed=1)
        np.testing.assert_array_equal(S[:2], [[1.0, 0.0], [0.0, 1.0]])
        assert len(S) == 4

    def test_lineality_both_signs(self):
        b = cones.extreme_rays(cone(2, ((0.0, 1.0), EQ0)))
        S = cones.sample_directions(b, 5, seed=1)
        np.testing.assert_allclose(np.abs(S[:2]), [[1.0, 0.0], [1.0, 0.0]])
        assert S[0] @ S[1] == pytest.approx(-1.0)

    def test_single_ray(self):
        S = cones.sample_directions(cones.extreme_rays(HALF_LINE), 20, seed=3)
        np.testing.assert_allclose(S, np.tile([0.0, 1.0], (20, 1)))

    def test_trivial_cone_raises(self):
        with pytest.raises(TrivialCone):
            cones.sample_directions(cones.extreme_rays(POINT), 5)

    @pytest.mark.parametrize("seed", range(8))
    def test_members_and_deterministic(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 5))
        c = cone(n, *[(rng.standard_normal(n), LEQ0) for _ in range(int(rng.integers(1, n + 2)))])
        b = cones.extreme_rays(c)
        if b.is_trivial:      # normals that positively span R^n leave only the origin
            assert cones.is_trivial(c)
            return
        S = cones.sample_directions(b, 200, seed)
        assert np.array_equal(S, cones.sample_directions(b, 200, seed))
        np.testing.assert_allclose(np.linalg.norm(S, axis=1), 1.0)
        assert all(cones.contains(c, v, 1e-9) for v in S)


def convex_constrained_problem(seed):
    """Random feasible point with active convex quadratic inequalities and linear equalities (LICQ)."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 4))
    xbar = rng.uniform(-1, 1, n)
    A = np.linalg.qr(rng.standard_normal((n, n)))[0]
    p = int(rng.integers(0, 2))
    k = int(rng.integers(1, n - p + 1))
    ineq = []
    for a in A[:k]:
        M = rng.standard_normal((n, n))
        Q = M @ M.T * rng.uniform(0, 1)
        ineq.append(Polynomial.quadratic(Q, a - Q @ xbar, 0.5 * xbar @ Q @ xbar - a @ xbar))
    eqs = [Polynomial.linear(a, -a @ xbar) for a in A[k:k + p]]
    ineq.append(Polynomial.linear(rng.standard_normal(n), -5.0))   # inactive
    obj = Polynomial.quadratic(np.eye(n))
    return Problem(n, (obj,), tuple(ineq), tuple(eqs), mscq_asserted=True), xbar


class TestAbadieProperty:
    """Under MSCQ the tangent cone equals the linearization cone."""

    @pytest.mark.parametrize("seed", range(20))
    def test_secants_lie_in_linearization(self, seed):
        problem, x = convex_constrained_problem(seed)
        L = cones.linearization_cone(problem, x, active_set(problem, x))
        D = contingent_probe(problem, x, count=2000, seed=seed)
        assert len(D)
        assert all(cones.contains(L, d, 1e-6) for d in D)

    @pytest.mark.parametrize("seed", range(20))
    def test_generators_are_tangent(self, seed):
        problem, x = convex_constrained_problem(seed)
        b = cones.extreme_rays(cones.linearization_cone(problem, x))
        gens = list(b.rays) + [s * l for l in b.lineality for s in (1.0, -1.0)]
        for r in gens:
            defects = tangent_defect(problem, x, r)
            assert defects[-1] <= 1e-3, defects
