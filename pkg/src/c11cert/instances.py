"""Ready-made problems: the worked examples and seeded random families used in tests and demos."""

from itertools import product

import numpy as np

from .model import CHEBYSHEV_MIN_RADIUS, Cell, Halfspace, PiecewiseFn, Problem, default_box
from .polynomial import Polynomial


def unit(n, i):
    e = np.zeros(n)
    e[i] = 1.0
    return e


def signed_half_square(n, i, sign=1.0, box=None):
    """``sign * x_i |x_i| / 2``: C^{1,1} with a second-derivative jump on ``x_i = 0``."""
    e = unit(n, i)
    sq = Polynomial.quadratic(np.diag(e))          # x_i^2 / 2
    neg = Cell((Halfspace(e, 0.0),))                # x_i <= 0
    pos = Cell((Halfspace(-e, 0.0),))               # x_i >= 0
    return PiecewiseFn(n, ((neg, sq * -sign), (pos, sq * sign)), box=box)


def hinge_squared_sum(base, hinges, box=None):
    """``base(x) + sum_k w_k max(0, a_k . x + b_k)^2 / 2`` with one cell per sign pattern.

    ``hinges`` is a list of ``(a, b, w)``; empty sign patterns are pruned.
    """
    n = base.n
    box = default_box(n) if box is None else box
    pieces = []
    for pattern in product((0, 1), repeat=len(hinges)):
        guards, poly = [], base
        for s, (a, b, w) in zip(pattern, hinges):
            a = np.asarray(a, dtype=float)
            if s:
                guards.append(Halfspace(-a, -b))
                lin = Polynomial.linear(a, b)
                poly = poly + lin * lin * (0.5 * w)
            else:
                guards.append(Halfspace(a, b))
        cell = Cell(tuple(guards))
        if cell.chebyshev_radius(box) > CHEBYSHEV_MIN_RADIUS:
            pieces.append((cell, poly))
    return PiecewiseFn(n, tuple(pieces), box=box)


# -- small reference problems ----------------------------------------------------

def kink_equality():
    """``f = -int_0^{x1} |t| dt + x2^2`` on ``{x >= 0, x1 + x2 = 1}``; candidate ``(1, 0)``."""
    f_kink = signed_half_square(2, 0, sign=-1.0)
    x2sq = Polynomial(2, [(1.0, (0, 2))])
    f = PiecewiseFn(2, tuple((c, p + x2sq) for c, p in f_kink.pieces), name="f")
    g1 = Polynomial.linear([-1.0, 0.0])
    g2 = Polynomial.linear([0.0, -1.0])
    h = Polynomial.linear([1.0, 1.0], -1.0)
    return Problem(2, (f,), (g1, g2), (h,), mscq_asserted=True, name="kink-equality")


def orthant_linear():
    """``f = x1 + x2^2`` on the nonnegative orthant; candidate ``(0, 0)``."""
    f = Polynomial(2, [(1.0, (1, 0)), (1.0, (0, 2))])
    g1 = Polynomial.linear([-1.0, 0.0])
    g2 = Polynomial.linear([0.0, -1.0])
    return Problem(2, (f,), (g1, g2), (), mscq_asserted=True, name="orthant-linear")


def biobjective_kink():
    """``(x^2, int_0^x |t| dt)`` on ``{x >= 0}``; candidate ``0``."""
    phi1 = Polynomial(1, [(1.0, (2,))])
    phi2 = signed_half_square(1, 0, sign=1.0)
    g = Polynomial.linear([-1.0])
    return Problem(1, (phi1, phi2), (g,), (), mscq_asserted=True, name="biobjective-kink")


# -- random families ---------------------------------------------------------------

def random_symmetric(n, rng, eig_range=(-1.0, 1.0)):
    Qo, _ = np.linalg.qr(rng.standard_normal((n, n)))
    ev = rng.uniform(*eig_range, size=n)
    return Qo @ np.diag(ev) @ Qo.T


def random_piecewise_quadratic(n, rng, max_hinges=3, through=None, box=None):
    """Random C^{1,1} piecewise quadratic built from squared hinges.

    With ``through`` set, every hinge hyperplane passes through that point,
    so all cells meet there.
    """
    Q = random_symmetric(n, rng, (-2.0, 2.0))
    base = Polynomial.quadratic(Q, rng.standard_normal(n), rng.standard_normal())
    hinges = []
    for _ in range(rng.integers(0, max_hinges + 1)):
        a = rng.standard_normal(n)
        a /= np.linalg.norm(a)
        b = -(a @ through) if through is not None else rng.uniform(-3.0, 3.0)
        hinges.append((a, b, rng.uniform(-2.0, 2.0)))
    return hinge_squared_sum(base, hinges, box)


def _stationary_objective(n, rng, grad_target, hess_range, hinge_weights, n_hinges):
    """Piecewise quadratic with ``grad f(0) = grad_target``; hinges pass through 0."""
    Q = random_symmetric(n, rng, hess_range)
    base = Polynomial.quadratic(Q, grad_target)
    hinges = []
    for _ in range(n_hinges):
        a = rng.standard_normal(n)
        a /= np.linalg.norm(a)
        hinges.append((a, 0.0, rng.uniform(*hinge_weights)))
    return hinge_squared_sum(base, hinges)


def random_convex_problem(seed):
    """Convex piecewise-quadratic program with LICQ whose global minimizer is ``x = 0``.

    Active linear constraints carry random positive multipliers, the
    objective gradient is chosen to make the KKT system hold, and one
    inactive constraint is added.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    k = int(rng.integers(0, n + 1))
    A = np.linalg.qr(rng.standard_normal((n, n)))[0][:k] if k else np.zeros((0, n))
    lam = rng.uniform(0.2, 2.0, size=k)
    grad0 = -(lam @ A) if k else np.zeros(n)
    f = _stationary_objective(n, rng, grad0, (0.1, 2.0), (0.0, 2.0), int(rng.integers(0, 3)))
    ineq = [Polynomial.linear(a) for a in A]
    a_off = rng.standard_normal(n)
    ineq.append(Polynomial.linear(a_off, -1.0 - abs(rng.standard_normal())))
    return Problem(n, (f,), tuple(ineq), (), name=f"convex-{seed}"), np.zeros(n)


def random_saddle_problem(seed):
    """A point ``0`` with a direction of negative curvature inside the X0 cone."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    k = int(rng.integers(0, n))                       # leave at least one free direction
    A = np.linalg.qr(rng.standard_normal((n, n)))[0]
    act = A[:k]
    free = A[k:]
    lam = rng.uniform(0.2, 2.0, size=k)
    grad0 = -(lam @ act) if k else np.zeros(n)
    Q = random_symmetric(n, rng, (-1.0, 2.0))
    # force negative curvature along a free direction
    u = free[0]
    Q = Q - (u @ Q @ u + rng.uniform(0.5, 2.0)) * np.outer(u, u)
    base = Polynomial.quadratic(Q, grad0)
    hinges = [(a / np.linalg.norm(a), -rng.uniform(0.5, 3.0), rng.uniform(-1, 1))   # inactive near 0
              for a in rng.standard_normal((int(rng.integers(0, 3)), n))]
    f = hinge_squared_sum(base, hinges)
    ineq = tuple(Polynomial.linear(a) for a in act)
    return Problem(n, (f,), ineq, (), name=f"saddle-{seed}"), np.zeros(n)


def random_sufficient_candidate(seed):
    """Stationary point ``0`` of a random program with nonsmooth curvature; SOS may or may not hold.

    Constraints are linear or quadratic, possibly including one equality;
    hinge hyperplanes of the objective pass through ``0``.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    k = int(rng.integers(0, n + 1))
    A = np.linalg.qr(rng.standard_normal((n, n)))[0]
    ineq_rows = A[:k]
    eq_rows = A[k:k + 1] if k < n and rng.random() < 0.3 else np.zeros((0, n))
    lam = np.where(rng.random(k) < 0.8, rng.uniform(0.5, 2.0, size=k), 0.0)
    mu = rng.uniform(-1.0, 1.0, size=len(eq_rows))
    grad0 = -(lam @ ineq_rows) - (mu @ eq_rows) if (k or len(eq_rows)) else np.zeros(n)
    f = _stationary_objective(n, rng, grad0, (-1.0, 3.0), (-0.5, 2.0), int(rng.integers(0, 3)))
    ineq = []
    for a in ineq_rows:
        curv = random_symmetric(n, rng, (-0.5, 0.5)) if rng.random() < 0.3 else np.zeros((n, n))
        ineq.append(Polynomial.quadratic(curv, a))
    eqs = [Polynomial.linear(a) for a in eq_rows]
    return Problem(n, (f,), tuple(ineq), tuple(eqs), name=f"candidate-{seed}"), np.zeros(n)
