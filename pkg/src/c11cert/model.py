"""Piecewise-polynomial C^{1,1} functions over polyhedral cells, and problems built from them."""

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations

import numpy as np

from . import lp
from .config import DEFAULT_BOX_HALFWIDTH, DEFAULT_TOLERANCES, Tolerances
from .errors import DimensionMismatch, NoCell
from .polynomial import Polynomial

CHEBYSHEV_MIN_RADIUS = 1e-9


def default_box(n, halfwidth=DEFAULT_BOX_HALFWIDTH):
    return tuple((-halfwidth, halfwidth) for _ in range(n))


@dataclass(frozen=True)
class Halfspace:
    """The closed halfspace ``{x : a . x + b <= 0}``."""

    a: tuple
    b: float

    def __post_init__(self):
        a = tuple(float(v) for v in self.a)
        if not any(a):
            raise ValueError("halfspace normal must be nonzero")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", float(self.b))

    def value(self, x):
        return float(np.dot(self.a, x) + self.b)

    def to_json(self):
        return {"a": [float(v) + 0.0 for v in self.a], "b": float(self.b) + 0.0}


@dataclass(frozen=True)
class Cell:
    """Intersection of finitely many halfspaces; no guards means all of R^n."""

    guards: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "guards", tuple(self.guards))

    @cached_property
    def arrays(self):
        """Guard normals and offsets scaled to unit normals."""
        if not self.guards:
            return np.zeros((0, 0)), np.zeros(0)
        A = np.array([g.a for g in self.guards])
        b = np.array([g.b for g in self.guards])
        s = np.linalg.norm(A, axis=1)
        return A / s[:, None], b / s

    def slack(self, X):
        """``min_k -(a_k . x + b_k)`` per row of ``X`` (``+inf`` with no guards)."""
        X = np.atleast_2d(X)
        A, b = self.arrays
        if A.size == 0:
            return np.full(X.shape[0], np.inf)
        return -(X @ A.T + b).max(axis=1)

    def intersect(self, other):
        seen = dict.fromkeys(self.guards)
        seen.update(dict.fromkeys(other.guards))
        return Cell(tuple(seen))

    def chebyshev_radius(self, box):
        A, b = self.arrays
        return lp.chebyshev_ball(A, b, box)[0]

    def to_json(self):
        return {"guards": [g.to_json() for g in self.guards]}


@dataclass(frozen=True)
class PiecewiseFn:
    """A function given by polynomial pieces on polyhedral cells.

    The pieces must agree in value and gradient wherever two cells touch;
    :func:`validate` checks this on sampled boundary points. Evaluation uses
    the first cell containing the point.
    """

    n: int
    pieces: tuple
    box: tuple = None
    tol: Tolerances = DEFAULT_TOLERANCES
    name: str = ""

    def __post_init__(self):
        pieces = tuple((c if isinstance(c, Cell) else Cell(c), p) for c, p in self.pieces)
        if not pieces:
            raise ValueError("a piecewise function needs at least one piece")
        for cell, poly in pieces:
            if poly.n != self.n:
                raise DimensionMismatch(f"piece has {poly.n} variables, expected {self.n}")
            for g in cell.guards:
                if len(g.a) != self.n:
                    raise DimensionMismatch("guard dimension mismatch")
        object.__setattr__(self, "pieces", pieces)
        box = default_box(self.n) if self.box is None else tuple(tuple(map(float, r)) for r in self.box)
        if len(box) != self.n:
            raise DimensionMismatch("box dimension mismatch")
        object.__setattr__(self, "box", box)

    @classmethod
    def from_polynomial(cls, poly, box=None, tol=DEFAULT_TOLERANCES, name=""):
        return cls(poly.n, ((Cell(), poly),), box=box, tol=tol, name=name)

    @property
    def cells(self):
        return [c for c, _ in self.pieces]

    @property
    def polys(self):
        return [p for _, p in self.pieces]

    @property
    def is_smooth(self):
        return len(self.pieces) == 1

    def membership(self, X, tol_cell=None):
        """Boolean matrix ``(len(X), n_cells)`` of closed-cell membership."""
        tol_cell = self.tol.tol_cell if tol_cell is None else tol_cell
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.stack([c.slack(X) >= -tol_cell for c in self.cells], axis=1)

    def active_cells(self, x, tol_cell=None):
        """Indices of all cells whose closure contains ``x``."""
        x = np.asarray(x, dtype=float).reshape(-1)
        idx = np.flatnonzero(self.membership(x, tol_cell)[0])
        if idx.size == 0:
            raise NoCell(x)
        return [int(i) for i in idx]

    def locate(self, x):
        return self.active_cells(x)[0]

    def locate_many(self, X):
        M = self.membership(X)
        hit = M.any(axis=1)
        if not hit.all():
            raise NoCell(np.atleast_2d(X)[np.argmin(hit)])
        return M.argmax(axis=1)

    def eval(self, x):
        return self.polys[self.locate(x)](x)

    __call__ = eval

    def grad(self, x):
        return self.polys[self.locate(x)].grad(x)

    def piece_hessian(self, cell_index, x):
        H = self.polys[cell_index].hessian(x)
        return 0.5 * (H + H.T)

    def hessian(self, x):
        return self.piece_hessian(self.locate(x), x)

    def eval_many(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        which = self.locate_many(X)
        out = np.empty(X.shape[0])
        for k in np.unique(which):
            sel = which == k
            out[sel] = self.polys[k].eval_many(X[sel])
        return out

    def grad_many(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        which = self.locate_many(X)
        out = np.empty_like(X)
        for k in np.unique(which):
            sel = which == k
            out[sel] = self.polys[k].grad_many(X[sel])
        return out

    def scaled(self, c):
        return PiecewiseFn(self.n, tuple((cell, p * c) for cell, p in self.pieces), self.box, self.tol, self.name)

    def to_json(self):
        if self.is_smooth and not self.cells[0].guards:
            return {"poly": self.polys[0].to_json()}
        return {"piecewise": {"cells": [{**c.to_json(), "poly": p.to_json()} for c, p in self.pieces]}}


def eval(f, x):
    return f.eval(x)


def grad(f, x):
    return f.grad(x)


def active_cells(f, x, tol_cell=None):
    return f.active_cells(x, tol_cell)


def piece_hessian(f, cell_index, x):
    return f.piece_hessian(cell_index, x)


# -- validation ----------------------------------------------------------------

@dataclass
class ValidationReport:
    coverage_gaps: list = field(default_factory=list)
    c0_mismatches: list = field(default_factory=list)
    c1_mismatches: list = field(default_factory=list)
    overlaps: list = field(default_factory=list)
    degenerate_cells: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def accepted(self):
        return not (self.coverage_gaps or self.c0_mismatches or self.c1_mismatches
                    or self.overlaps or self.degenerate_cells)

    def messages(self):
        out = []
        for i in self.degenerate_cells:
            out.append(f"cell {i} has empty interior inside the box")
        for i, j in self.overlaps:
            out.append(f"cells {i} and {j} overlap in their interiors")
        for x in self.coverage_gaps:
            out.append(f"coverage gap: point {_fmt(x)} lies in no cell")
        for i, j, x, d in self.c0_mismatches:
            out.append(f"C0 mismatch between cells {i} and {j} at {_fmt(x)}: |dvalue| = {d:.3e}")
        for i, j, x, d in self.c1_mismatches:
            out.append(f"C1 mismatch between cells {i} and {j} at {_fmt(x)}: |dgrad| = {d:.3e}")
        return out

    def to_json(self):
        return {"accepted": self.accepted, "violations": self.messages(), "notes": list(self.notes)}


def _fmt(x):
    return "(" + ", ".join(f"{v:.6g}" for v in np.asarray(x).ravel()) + ")"


def _shared_points(ci, cj, box, count, rng):
    """Points in the intersection of two closed cells: LP vertices plus convex mixtures."""
    Ai, bi = ci.arrays
    Aj, bj = cj.arrays
    n = len(box)
    A = np.vstack([M for M in (Ai, Aj) if M.size] or [np.zeros((0, n))])
    b = np.concatenate([bi, bj])
    verts = []
    for _ in range(max(2, count // 2)):
        val, x = lp.minimize_linear(rng.standard_normal(n), A, b, box)
        if x is None:
            return np.zeros((0, n))
        verts.append(x)
    V = np.unique(np.round(np.array(verts), 12) + 0.0, axis=0)
    W = rng.dirichlet(np.ones(len(V)), size=count)
    return np.unique(np.round(np.vstack([V, W @ V]), 12) + 0.0, axis=0)


def validate(f, samples=2000, seed=0, max_report=10):
    """Check coverage, interior disjointness and C^1 matching of ``f`` on its box."""
    rng = np.random.default_rng(seed)
    rep = ValidationReport()
    rep.notes.append(f"checks restricted to the box {list(map(list, f.box))}")
    box = np.array(f.box)
    tol = f.tol

    for i, c in enumerate(f.cells):
        if c.chebyshev_radius(box) <= CHEBYSHEV_MIN_RADIUS:
            rep.degenerate_cells.append(i)

    X = rng.uniform(box[:, 0], box[:, 1], size=(samples, f.n))
    covered = f.membership(X).any(axis=1)
    rep.coverage_gaps = [X[k] for k in np.flatnonzero(~covered)[:max_report]]

    npairs = max(1, len(f.pieces) * (len(f.pieces) - 1) // 2)
    per_pair = int(min(64, max(8, samples // npairs)))
    for i, j in combinations(range(len(f.pieces)), 2):
        ci, cj = f.cells[i], f.cells[j]
        both = ci.intersect(cj)
        if both.chebyshev_radius(box) > CHEBYSHEV_MIN_RADIUS:
            rep.overlaps.append((i, j))
            continue
        P = _shared_points(ci, cj, box, per_pair, rng)
        if not len(P):
            continue
        pi, pj = f.polys[i], f.polys[j]
        vi, vj = pi.eval_many(P), pj.eval_many(P)
        gi, gj = pi.grad_many(P), pj.grad_many(P)
        dv = np.abs(vi - vj)
        dg = np.linalg.norm(gi - gj, axis=1)
        bad0 = dv > tol.tol_c0 * np.maximum(1.0, np.abs(vi))
        bad1 = dg > tol.tol_c1 * np.maximum(1.0, np.linalg.norm(gi, axis=1))
        for k in np.flatnonzero(bad0)[:max_report]:
            rep.c0_mismatches.append((i, j, P[k], float(dv[k])))
        for k in np.flatnonzero(bad1)[:max_report]:
            rep.c1_mismatches.append((i, j, P[k], float(dg[k])))
    return rep


# -- problems ------------------------------------------------------------------

@dataclass(frozen=True)
class Problem:
    """``min phi(x)`` subject to ``g_i(x) <= 0`` and ``h_j(x) = 0``.

    A single objective gives a scalar program; two or more give a
    multiobjective one.
    """

    n: int
    objectives: tuple
    inequalities: tuple = ()
    equalities: tuple = ()
    mscq_asserted: bool = False
    box: tuple = None
    multipliers: dict = None
    tol: Tolerances = DEFAULT_TOLERANCES
    name: str = ""

    def __post_init__(self):
        for attr in ("objectives", "inequalities", "equalities"):
            fns = tuple(_as_fn(f, self.n) for f in getattr(self, attr))
            object.__setattr__(self, attr, fns)
        if not self.objectives:
            raise ValueError("a problem needs at least one objective")
        box = default_box(self.n) if self.box is None else tuple(tuple(map(float, r)) for r in self.box)
        object.__setattr__(self, "box", box)
        for f in self.functions():
            if f.n != self.n:
                raise DimensionMismatch(f"function of dimension {f.n} in a problem of dimension {self.n}")

    @property
    def q(self):
        return len(self.objectives)

    @property
    def m(self):
        return len(self.inequalities)

    @property
    def p(self):
        return len(self.equalities)

    @property
    def f(self):
        return self.objectives[0]

    def functions(self):
        return list(self.objectives) + list(self.inequalities) + list(self.equalities)

    def g_values(self, x):
        return np.array([g(x) for g in self.inequalities])

    def h_values(self, x):
        return np.array([h(x) for h in self.equalities])

    def jacobians(self, x):
        """Gradient rows of objectives, inequalities and equalities at ``x``."""
        x = np.asarray(x, dtype=float)
        rows = lambda fs: np.array([f.grad(x) for f in fs]).reshape(len(fs), self.n)
        return rows(self.objectives), rows(self.inequalities), rows(self.equalities)

    def violations(self, x, tol_feas=None):
        tol_feas = self.tol.tol_feas if tol_feas is None else tol_feas
        out = []
        for i, v in enumerate(self.g_values(x)):
            if v > tol_feas:
                out.append(("g", i, float(v)))
        for j, v in enumerate(self.h_values(x)):
            if abs(v) > tol_feas:
                out.append(("h", j, float(v)))
        return out

    def scaled_objectives(self, c):
        return Problem(self.n, tuple(f.scaled(c) for f in self.objectives), self.inequalities,
                       self.equalities, self.mscq_asserted, self.box, None, self.tol, self.name)


def _as_fn(f, n):
    if isinstance(f, PiecewiseFn):
        return f
    if isinstance(f, Polynomial):
        return PiecewiseFn.from_polynomial(f)
    raise TypeError(f"expected PiecewiseFn or Polynomial, got {type(f).__name__}")
