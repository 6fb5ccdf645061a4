"""Second-order subdifferentials of piecewise C^{1,1} functions through Hessian bundles.

For a piecewise-polynomial function the gradient is piecewise smooth, so the
limiting second-order subdifferential ``d2f(x)(v)`` is squeezed between the
Bouligand set ``{H_i v}`` (one Hessian per cell touching ``x``) and its convex
hull. Every decision made downstream depends on the extreme values of the
linear functional ``z -> <z, v>``, which coincide on both ends of that
sandwich, so the bundle of piece Hessians is all that needs computing.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from .cones import face_subsets
from .errors import RefinementTooLarge
from .model import CHEBYSHEV_MIN_RADIUS, Cell, PiecewiseFn
from .polynomial import Polynomial
from .reporting import sig

MAX_REFINED_CELLS = 10_000
DEDUP_TOL = 1e-12


@dataclass(frozen=True)
class HessianBundle:
    matrices: tuple
    cells: tuple

    def __post_init__(self):
        if not self.matrices:
            raise ValueError("a Hessian bundle is never empty")

    def __len__(self):
        return len(self.matrices)

    @property
    def is_singleton(self):
        return len(self.matrices) == 1

    def to_json(self):
        return {"matrices": [sig(H) for H in self.matrices], "cells": list(self.cells)}


@dataclass(frozen=True)
class LagrangianFn(PiecewiseFn):
    """The weighted sum of a problem's functions on the common refinement of their cells."""

    weights: tuple = ()


def _refine(n, weighted, box, near=None):
    current = [(Cell(), Polynomial.zero(n))]
    for w, fn in weighted:
        pieces = fn.pieces
        if near is not None:
            pieces = [fn.pieces[i] for i in fn.active_cells(near)]
        if len(pieces) == 1 and not pieces[0][0].guards:
            current = [(c, p + pieces[0][1] * w) for c, p in current]
            continue
        new = []
        for cell, poly in current:
            for c2, p2 in pieces:
                both = cell.intersect(c2)
                if both.chebyshev_radius(box) > CHEBYSHEV_MIN_RADIUS:
                    new.append((both, poly + p2 * w))
                    if len(new) > MAX_REFINED_CELLS:
                        raise RefinementTooLarge(f"more than {MAX_REFINED_CELLS} refined cells")
        current = new
    return current


def lagrangian(problem, mult, near=None):
    """``sum alpha_l phi_l + sum lambda_i g_i + sum mu_j h_j`` as a piecewise function.

    With ``near`` set, only cells whose closure contains that point take part,
    which is all a bundle at that point needs.
    """
    alpha = np.asarray(mult.alpha, dtype=float).reshape(-1)
    lam = np.asarray(mult.lam, dtype=float).reshape(-1)
    mu = np.asarray(mult.mu, dtype=float).reshape(-1)
    if alpha.size != problem.q or lam.size != problem.m or mu.size != problem.p:
        raise ValueError("multiplier dimensions do not match the problem")
    weights = list(alpha) + list(lam) + list(mu)
    weighted = list(zip(weights, problem.functions()))
    near = None if near is None else np.asarray(near, dtype=float)
    pieces = _refine(problem.n, weighted, problem.box, near)
    return LagrangianFn(problem.n, tuple(pieces), box=problem.box, tol=problem.tol,
                        name="lagrangian", weights=tuple(float(w) for w in weights))


def bundle(f, x):
    """Hessians of every piece whose cell touches ``x``, in cell order, deduplicated."""
    x = np.asarray(x, dtype=float)
    mats, cells = [], []
    for i in sorted(f.active_cells(x)):
        H = f.piece_hessian(i, x)
        if any(np.linalg.norm(H - K) <= DEDUP_TOL for K in mats):
            continue
        mats.append(H)
        cells.append(i)
    return HessianBundle(tuple(mats), tuple(cells))


def apply(b, v):
    v = np.asarray(v, dtype=float)
    return [H @ v for H in b.matrices]


def quad_values(b, v):
    v = np.asarray(v, dtype=float)
    return np.array([v @ H @ v for H in b.matrices])


def qmax(b, v):
    return float(quad_values(b, v).max())


def qmin(b, v):
    return float(quad_values(b, v).min())


def min_quadratic_on_cone(H, basis, max_rays=12):
    """Exact ``min v^T H v`` over unit vectors of ``cone(rays) + span(lineality)``.

    A minimizer lies in the relative interior of some face spanned by an
    independent set of rays (plus the lineality space) and is a generalized
    eigenvector of ``H`` restricted to that face with positive ray
    coordinates. Enumerating those faces gives the exact minimum. Returns
    ``(value, v)``, or ``None`` when the cone is ``{0}`` or has more than
    ``max_rays`` rays.
    """
    if basis.is_trivial:
        return None
    subsets = face_subsets(basis, max_rays)
    if subsets is None:
        return None
    H = 0.5 * (H + H.T)
    L = basis.lineality
    best = None
    for S in subsets:
        B = np.vstack([L, basis.rays[list(S)]]).T if S else L.T
        vals, vecs = eigh(B.T @ H @ B, B.T @ B)
        nl = len(L)
        for k in range(len(vals)):
            y = vecs[:, k]
            if S:
                ray_part = y[nl:]
                scale = np.abs(y).max()
                if np.all(ray_part > 1e-12 * scale):
                    pass
                elif np.all(ray_part < -1e-12 * scale):
                    y = -y
                else:
                    continue
            v = B @ y
            v /= np.linalg.norm(v)
            if not S:
                nz = np.flatnonzero(np.abs(v) > 1e-12)
                if v[nz[0]] < 0:
                    v = -v
            val = float(v @ H @ v)
            if best is None or val < best[0] - 1e-15:
                best = (val, v + 0.0)
    return best


@dataclass(frozen=True)
class TaylorResult:
    delta: float
    lower: float
    upper: float
    passed: bool
    crossings: tuple = ()

    def to_json(self):
        return {"delta": sig(self.delta), "lower": sig(self.lower), "upper": sig(self.upper),
                "pass": self.passed, "crossings": sig(list(self.crossings))}


def segment_crossings(f, a, b):
    """Parameters ``s in (0, 1)`` where ``a + s (b - a)`` meets a cell boundary."""
    d = b - a
    out = set()
    for cell in f.cells:
        for g in cell.guards:
            ga = np.asarray(g.a)
            slope = ga @ d
            if abs(slope) <= 1e-15 * np.linalg.norm(ga) * max(np.linalg.norm(d), 1e-300):
                continue
            s = -(ga @ a + g.b) / slope
            if 0.0 < s < 1.0:
                out.add(float(s))
    return sorted(out)


def taylor_check(f, a, b, tol=1e-8, interior_samples=16):
    """Test ``1/2 min <z, b-a> <= f(b) - f(a) - <grad f(a), b-a> <= 1/2 max <z, b-a>``.

    ``z`` ranges over bundle images ``H (b - a)`` at the segment's cell
    crossings, its endpoints, and ``interior_samples`` points inside each
    smooth sub-segment.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = b - a
    delta = f.eval(b) - f.eval(a) - f.grad(a) @ d
    cross = segment_crossings(f, a, b)
    knots = [0.0] + cross + [1.0]
    params = list(knots)
    for lo, hi in zip(knots[:-1], knots[1:]):
        params += list(lo + (hi - lo) * (np.arange(1, interior_samples + 1) / (interior_samples + 1)))
    vals = []
    for s in sorted(params):
        vals.extend(quad_values(bundle(f, a + s * d), d))
    lower, upper = 0.5 * min(vals), 0.5 * max(vals)
    ok = lower - tol <= delta <= upper + tol
    return TaylorResult(float(delta), float(lower), float(upper), bool(ok), tuple(cross))
