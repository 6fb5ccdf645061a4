"""Brute-force local sampling: empirical quadratic growth, local minimality and tangent directions.

Nothing here uses cones, multipliers or bundles, so the oracle can check
the certificates independently.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import TooFewFeasible
from .reporting import sig

FEASIBLE_THRESHOLD = 100
PROJECTION_STEPS = 10
LOCAL_MIN_TOL = 1e-10
PROBE_RADII = (1e-2, 1e-3, 1e-4, 1e-5)
ANGULAR_TOL = 1e-3


def sample_ball(n, radius, count, rng):
    """Uniform samples from the centered ball of the given radius."""
    d = rng.standard_normal((count, n))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    r = radius * rng.random(count) ** (1.0 / n)
    return d * r[:, None]


def project_equalities(problem, X, steps=PROJECTION_STEPS):
    """Gauss-Newton steps ``x <- x - J(x)^+ h(x)`` towards ``{h = 0}``, row by row."""
    if not problem.p:
        return X
    X = X.copy()
    for _ in range(steps):
        Hv = np.stack([h.eval_many(X) for h in problem.equalities], axis=1)          # (N, p)
        J = np.stack([h.grad_many(X) for h in problem.equalities], axis=1)          # (N, p, n)
        X -= np.einsum("kij,kj->ki", np.linalg.pinv(J), Hv)
    return X


def feasible_mask(problem, X, slack):
    ok = np.ones(len(X), dtype=bool)
    for g in problem.inequalities:
        ok &= g.eval_many(X) <= slack
    for h in problem.equalities:
        ok &= np.abs(h.eval_many(X)) <= slack
    return ok


def gap_values(problem, X, x):
    """``f(X) - f(x)``, or ``max_l phi_l(X) - phi_l(x)`` with several objectives."""
    gaps = [phi.eval_many(X) - phi.eval(x) for phi in problem.objectives]
    return np.max(np.stack(gaps, axis=1), axis=1)


def _feasible_samples(problem, x, radius, count, seed):
    x = np.asarray(x, dtype=float)
    rng = np.random.default_rng(seed)
    X = x + sample_ball(problem.n, radius, count, rng)
    X = project_equalities(problem, X)
    ok = feasible_mask(problem, X, problem.tol.tol_feas * radius)
    dist = np.linalg.norm(X - x, axis=1)
    ok &= dist > 1e-14 * radius
    X, dist = X[ok], dist[ok]
    if len(X) < FEASIBLE_THRESHOLD:
        raise TooFewFeasible(len(X), FEASIBLE_THRESHOLD)
    return X, dist


@dataclass(frozen=True)
class GrowthEstimate:
    radius: float
    samples: int
    feasible: int
    seed: int
    rho_emp: float
    argmin: np.ndarray

    def to_json(self):
        return {"radius": sig(self.radius), "samples": self.samples, "feasible": self.feasible,
                "seed": self.seed, "rho_emp": sig(self.rho_emp), "argmin": sig(self.argmin)}


def growth_ratio(problem, x, y):
    """``2 gap(y) / |y - x|^2``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    gap = gap_values(problem, y[None, :], x)[0]
    return 2.0 * gap / float((y - x) @ (y - x))


def empirical_growth(problem, x, radius=1e-2, count=100_000, seed=42):
    """Smallest ``2 gap / |y - x|^2`` over feasible samples ``y`` of the ball around ``x``."""
    X, dist = _feasible_samples(problem, x, radius, count, seed)
    rho = 2.0 * gap_values(problem, X, np.asarray(x, dtype=float)) / dist ** 2
    k = int(np.argmin(rho))
    return GrowthEstimate(float(radius), int(count), len(X), int(seed), float(rho[k]), X[k].copy())


@dataclass(frozen=True)
class LocalMinCheck:
    is_local_min: bool
    worst_point: np.ndarray
    worst_gap: float
    feasible: int

    def to_json(self):
        return {"local_min": self.is_local_min, "worst_point": sig(self.worst_point),
                "worst_gap": sig(self.worst_gap), "feasible": self.feasible}


def empirical_local_min(problem, x, radius=1e-2, count=100_000, seed=42):
    """No feasible sample improves on ``x`` by more than ``1e-10``."""
    X, _ = _feasible_samples(problem, x, radius, count, seed)
    gaps = gap_values(problem, X, np.asarray(x, dtype=float))
    k = int(np.argmin(gaps))
    return LocalMinCheck(bool(gaps[k] >= -LOCAL_MIN_TOL), X[k].copy(), float(gaps[k]), len(X))


def cluster_directions(D, tol=ANGULAR_TOL):
    """Greedy representatives: a direction is kept when it is more than ``tol`` radians from all kept ones."""
    kept = []
    cos_tol = np.cos(tol)
    for d in D:
        if not kept or np.max(np.array(kept) @ d) < cos_tol:
            kept.append(d)
    return np.array(kept).reshape(-1, D.shape[1])


def contingent_probe(problem, x, count=4000, seed=42, radii=PROBE_RADII, tol=ANGULAR_TOL):
    """Normalized feasible secants ``(y - x) / |y - x|`` at shrinking radii, clustered by angle."""
    x = np.asarray(x, dtype=float)
    rng = np.random.default_rng(seed)
    per = max(1, count // len(radii))
    secants = []
    for r in radii:
        X = project_equalities(problem, x + sample_ball(problem.n, r, per, rng))
        ok = feasible_mask(problem, X, problem.tol.tol_feas * r)
        D = X[ok] - x
        nrm = np.linalg.norm(D, axis=1)
        keep = nrm > 1e-14 * r
        secants.append(D[keep] / nrm[keep, None])
    D = np.vstack(secants)
    if len(D) < FEASIBLE_THRESHOLD:
        raise TooFewFeasible(len(D), FEASIBLE_THRESHOLD)
    return cluster_directions(D, tol)


def distance_to_feasible(problem, y, start=None):
    """Euclidean distance from ``y`` to the feasible set, by a local SLSQP projection."""
    y = np.asarray(y, dtype=float)
    cons = [{"type": "ineq", "fun": (lambda z, g=g: -g.eval(z)), "jac": (lambda z, g=g: -g.grad(z))}
            for g in problem.inequalities]
    cons += [{"type": "eq", "fun": (lambda z, h=h: h.eval(z)), "jac": (lambda z, h=h: h.grad(z))}
             for h in problem.equalities]
    z0 = y if start is None else np.asarray(start, dtype=float)
    res = minimize(lambda z: 0.5 * (z - y) @ (z - y), z0, jac=lambda z: z - y,
                   constraints=cons, method="SLSQP", options={"ftol": 1e-15, "maxiter": 200})
    z = res.x
    if problem.violations(z, 1e-9):
        return np.inf
    return float(np.linalg.norm(z - y))


def tangent_defect(problem, x, v, radii=(1e-2, 1e-3, 1e-4)):
    """``dist(x + t v, X) / t`` for shrinking ``t``; tends to 0 iff ``v`` is a tangent direction."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    v = v / np.linalg.norm(v)
    return [distance_to_feasible(problem, x + t * v, start=x) / t for t in radii]
