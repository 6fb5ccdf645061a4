"""Active sets, Lagrange multipliers and constraint-qualification proxies."""

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import lp
from .errors import Infeasible
from .reporting import sig
from .simplex import find_feasible

ENUMERATION_LIMIT = 10
SINGULAR_TOL = 1e-8
MFCQ_MARGIN = 1e-8


@dataclass(frozen=True)
class ActiveSet:
    """Indices ``i`` (0-based) with ``g_i(x) >= -tol_act``."""

    indices: tuple = ()

    def __iter__(self):
        return iter(self.indices)

    def __len__(self):
        return len(self.indices)

    def __contains__(self, i):
        return i in self.indices


def active_set(problem, x, tol_act=None, tol_feas=None):
    tol_act = problem.tol.tol_act if tol_act is None else tol_act
    viol = problem.violations(x, tol_feas)
    if viol:
        raise Infeasible(viol)
    g = problem.g_values(x)
    return ActiveSet(tuple(int(i) for i in np.flatnonzero(g >= -tol_act)))


@dataclass(frozen=True)
class MultiplierVector:
    alpha: np.ndarray
    lam: np.ndarray
    mu: np.ndarray

    @classmethod
    def scalar(cls, lam, mu):
        return cls(np.array([1.0]), np.asarray(lam, dtype=float), np.asarray(mu, dtype=float))

    def scaled(self, c):
        return MultiplierVector(self.alpha, self.lam * c, self.mu * c)

    def to_json(self):
        return {"alpha": sig(self.alpha), "lambda": sig(self.lam), "mu": sig(self.mu)}


@dataclass(frozen=True)
class KKTResidual:
    stationarity: np.ndarray
    complementarity: np.ndarray

    @property
    def stationarity_norm(self):
        return float(np.linalg.norm(self.stationarity))

    @property
    def complementarity_norm(self):
        return float(np.linalg.norm(self.complementarity))

    @property
    def norm(self):
        return max(self.stationarity_norm, self.complementarity_norm)


@dataclass
class MultiplierResult:
    """Outcome of a multiplier search.

    ``multipliers is None`` means the multiplier set is empty; then
    ``farkas`` holds ``w`` with ``grad g_i . w >= 0`` (active ``i``),
    ``grad h_j . w = 0`` and ``grad f . w = 1``, i.e. ``-w`` is a first-order
    descent direction of the linearized feasible set.
    """

    multipliers: MultiplierVector | None
    residual: KKTResidual | None = None
    farkas: np.ndarray | None = None
    vertices: list | None = None
    unique: bool | None = None
    notes: list = field(default_factory=list)

    @property
    def found(self):
        return self.multipliers is not None

    @property
    def vertex_count(self):
        return None if self.vertices is None else len(self.vertices)

    def to_json(self):
        out = {"found": self.found}
        if self.found:
            out["values"] = self.multipliers.to_json()
            out["residual"] = {"stationarity": sig(self.residual.stationarity_norm),
                               "complementarity": sig(self.residual.complementarity_norm)}
        else:
            out["farkas_witness"] = sig(self.farkas) if self.farkas is not None else None
        out["vertex_count"] = self.vertex_count
        out["unique"] = self.unique
        out["notes"] = list(self.notes)
        return out


def kkt_residual(problem, x, mult):
    """Gradient of the Lagrangian and the products ``lambda_i g_i(x)``."""
    F, G, H = problem.jacobians(x)
    alpha = np.asarray(mult.alpha, dtype=float)
    lam = np.asarray(mult.lam, dtype=float)
    mu = np.asarray(mult.mu, dtype=float)
    if alpha.size != problem.q or lam.size != problem.m or mu.size != problem.p:
        raise ValueError("multiplier dimensions do not match the problem")
    stat = alpha @ F + lam @ G + mu @ H
    comp = lam * problem.g_values(x) if problem.m else np.zeros(0)
    return KKTResidual(np.asarray(stat, dtype=float).reshape(problem.n), comp)


def _columns(problem, x, active):
    F, G, H = problem.jacobians(x)
    act = list(active)
    return F, G[act].T.reshape(problem.n, len(act)), H.T.reshape(problem.n, problem.p), act


def _assemble(problem, act, lam_act, mu, alpha):
    lam = np.zeros(problem.m)
    lam[act] = lam_act
    return MultiplierVector(np.asarray(alpha, dtype=float) + 0.0, lam + 0.0, np.asarray(mu, dtype=float) + 0.0)


def _enumerate_vertices(A, b, n_sign, tol=1e-9):
    """Vertices of ``{y : A y = b, y[:n_sign] >= 0}`` by support enumeration."""
    k = A.shape[1]
    found = {}
    for size in range(n_sign + 1):
        for zero in combinations(range(n_sign), size):
            keep = [c for c in range(k) if c not in zero]
            C = A[:, keep]
            if keep and np.linalg.matrix_rank(C, 1e-10) < len(keep):
                continue
            y = np.zeros(k)
            if keep:
                y[keep] = np.linalg.lstsq(C, b, rcond=None)[0]
            if np.linalg.norm(A @ y - b) > tol * max(1.0, np.linalg.norm(b)):
                continue
            if np.any(y[:n_sign] < -tol):
                continue
            y[:n_sign] = np.maximum(y[:n_sign], 0.0)
            found.setdefault(tuple(np.round(y, 9) + 0.0), y)
    return list(found.values())


def _recession_trivial(A, n_sign):
    """True iff ``{d : A d = 0, d[:n_sign] >= 0}`` is ``{0}``."""
    from .cones import EQ0, LEQ0, LinearCone, is_trivial
    k = A.shape[1]
    if k == 0:
        return True
    rows = [(row, EQ0, "") for row in A]
    rows += [(-np.eye(k)[i], LEQ0, "") for i in range(n_sign)]
    return is_trivial(LinearCone.build(k, rows))


def _uniqueness(res, A, b, n_sign):
    if A.shape[1] > ENUMERATION_LIMIT:
        res.notes.append(f"uniqueness check skipped: {A.shape[1]} multipliers exceed {ENUMERATION_LIMIT}")
        return
    res.vertices = _enumerate_vertices(A, b, n_sign)
    res.unique = len(res.vertices) == 1 and _recession_trivial(A, n_sign)


def find_multipliers(problem, x, active=None):
    """Solve ``grad f + sum lambda_i grad g_i + sum mu_j grad h_j = 0`` with ``lambda >= 0`` on active constraints.

    Inactive constraints get ``lambda_i = 0``. The search is a phase-one
    simplex; on failure the dual (Farkas) system is solved instead and its
    solution stored in the result.
    """
    if problem.q != 1:
        raise ValueError("find_multipliers needs a scalar problem; use find_mop_multipliers")
    x = np.asarray(x, dtype=float)
    active = active_set(problem, x) if active is None else active
    F, GA, HT, act = _columns(problem, x, active)
    A = np.hstack([GA, HT])
    b = -F[0]
    nonneg = np.array([True] * len(act) + [False] * problem.p, dtype=bool)
    y = find_feasible(A, b, nonneg) if A.shape[1] else (np.zeros(0) if np.linalg.norm(b) <= 1e-12 else None)
    if y is None:
        res = MultiplierResult(None, farkas=_farkas(A, b, nonneg, problem.n))
        _uniqueness(res, A, b, len(act))
        return res
    mult = _assemble(problem, act, y[:len(act)], y[len(act):], [1.0])
    res = MultiplierResult(mult, kkt_residual(problem, x, mult))
    _uniqueness(res, A, b, len(act))
    return res


def _farkas(A, b, nonneg, n):
    """Solve ``A_s^T w >= 0``, ``A_f^T w = 0``, ``b . w = -1`` (solvable iff ``A y = b`` is not)."""
    As, Af = A[:, nonneg], A[:, ~nonneg]
    ks = As.shape[1]
    rows = []
    rhs = []
    for c in range(ks):
        rows.append(np.concatenate([As[:, c], -np.eye(ks)[c]]))
        rhs.append(0.0)
    for c in range(Af.shape[1]):
        rows.append(np.concatenate([Af[:, c], np.zeros(ks)]))
        rhs.append(0.0)
    rows.append(np.concatenate([b, np.zeros(ks)]))
    rhs.append(-1.0)
    sol = find_feasible(np.array(rows), np.array(rhs), np.array([False] * n + [True] * ks))
    return None if sol is None else sol[:n]


def find_mop_multipliers(problem, x, active=None):
    """Multipliers ``(alpha, lambda, mu)`` with ``alpha >= 0``, ``sum(alpha) = 1``."""
    x = np.asarray(x, dtype=float)
    active = active_set(problem, x) if active is None else active
    F, GA, HT, act = _columns(problem, x, active)
    q = problem.q
    A = np.vstack([np.hstack([F.T, GA, HT]),
                   np.concatenate([np.ones(q), np.zeros(len(act) + problem.p)])])
    b = np.concatenate([np.zeros(problem.n), [1.0]])
    nonneg = np.array([True] * (q + len(act)) + [False] * problem.p, dtype=bool)
    y = find_feasible(A, b, nonneg)
    if y is None:
        res = MultiplierResult(None, farkas=mop_descent_direction(problem, x, active))
        return res
    alpha = y[:q] / y[:q].sum()
    mult = _assemble(problem, act, y[q:q + len(act)], y[q + len(act):], alpha)
    res = MultiplierResult(mult, kkt_residual(problem, x, mult))
    _uniqueness(res, A, b, q + len(act))
    return res


def mop_descent_direction(problem, x, active=None):
    """``v`` in the linearization cone with ``grad phi_l . v <= -1`` for every ``l``, or ``None``."""
    x = np.asarray(x, dtype=float)
    active = active_set(problem, x) if active is None else active
    F, G, H = problem.jacobians(x)
    act = list(active)
    n, q, a = problem.n, problem.q, len(act)
    rows, rhs = [], []
    for l in range(q):   # grad phi_l . v + s_l = -1
        rows.append(np.concatenate([F[l], np.eye(q)[l], np.zeros(a)]))
        rhs.append(-1.0)
    for k, i in enumerate(act):   # grad g_i . v + t_i = 0
        rows.append(np.concatenate([G[i], np.zeros(q), np.eye(a)[k] if a else []]))
        rhs.append(0.0)
    for j in range(problem.p):
        rows.append(np.concatenate([H[j], np.zeros(q + a)]))
        rhs.append(0.0)
    sol = find_feasible(np.array(rows), np.array(rhs), np.array([False] * n + [True] * (q + a)))
    return None if sol is None else sol[:n]


def multiplier_defects(problem, x, mult, tol=None):
    """Reasons why ``mult`` is not a valid multiplier at ``x`` (empty list when it is)."""
    tol = problem.tol.tol_kkt if tol is None else tol
    out = []
    try:
        res = kkt_residual(problem, x, mult)
    except ValueError as exc:
        return [str(exc)]
    if np.any(mult.alpha < 0) or mult.alpha.sum() <= 0:
        out.append("alpha must be nonnegative and nonzero")
    if np.any(mult.lam < 0):
        out.append("lambda must be nonnegative")
    if res.stationarity_norm > tol:
        out.append(f"stationarity residual {res.stationarity_norm:.3e} exceeds {tol:g}")
    if res.complementarity_norm > tol:
        out.append(f"complementarity residual {res.complementarity_norm:.3e} exceeds {tol:g}")
    return out


# -- constraint qualifications ---------------------------------------------------

def _active_gradients(problem, x, active=None):
    active = active_set(problem, x) if active is None else active
    _, G, H = problem.jacobians(x)
    return G[list(active)], H


def check_licq(problem, x, active=None):
    """Active gradients linearly independent (smallest singular value above 1e-8)."""
    GA, H = _active_gradients(problem, x, active)
    M = np.vstack([GA, H])
    if len(M) == 0:
        return True, {"rows": 0, "min_singular_value": None}
    if len(M) > problem.n:
        return False, {"rows": len(M), "min_singular_value": 0.0}
    s = np.linalg.svd(M, compute_uv=False)
    smin = float(s.min())
    return smin > SINGULAR_TOL, {"rows": len(M), "min_singular_value": smin}


def check_mfcq(problem, x, active=None):
    """Independent equality gradients and a direction strictly decreasing every active inequality."""
    GA, H = _active_gradients(problem, x, active)
    n = problem.n
    ev = {}
    if len(H):
        s = np.linalg.svd(H, compute_uv=False)
        smin = float(s.min()) if len(H) <= n else 0.0
        ev["equality_min_singular_value"] = smin
        if smin <= SINGULAR_TOL:
            return False, ev
    if len(GA) == 0:
        ev["margin"] = None
        return True, ev
    # maximize s subject to grad g_i . d + s <= 0, grad h_j . d = 0, |d_k| <= 1, s <= 1
    A = np.hstack([GA, np.ones((len(GA), 1))])
    E = np.hstack([H, np.zeros((len(H), 1))]) if len(H) else None
    box = [(-1.0, 1.0)] * n + [(-1.0, 1.0)]
    c = np.zeros(n + 1)
    c[-1] = -1.0
    val, sol = lp.minimize_linear(c, A, np.zeros(len(A)), box, E, None if E is None else np.zeros(len(E)))
    margin = -val if val is not None else -np.inf
    ev["margin"] = float(margin)
    if sol is not None:
        ev["direction"] = sol[:n]
    return margin > MFCQ_MARGIN, ev
