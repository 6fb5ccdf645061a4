"""Polyhedral cones ``{v : a . v <= 0 or a . v = 0}`` and their generators.

The cones built here stand in for the tangent cones of the optimality
theory: the linearization of ``T(x, X)``, the cone of the tightened set
``X0``, the critical cone and the multiobjective critical set (a union of
cones, kept as separate components).
"""

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import lp
from .config import MAX_CONE_DIMENSION
from .errors import DimensionTooLarge, TrivialCone, ZeroGradientWarning
from .reporting import sig

LEQ0 = "LEQ0"
EQ0 = "EQ0"
FLOAT_PIVOT_TOL = 1e-10
ZERO_ROW_TOL = 1e-14


@dataclass(frozen=True)
class ConeRow:
    a: tuple
    relation: str
    label: str = ""

    @property
    def vector(self):
        return np.array(self.a)


def _key(u):
    return tuple(np.round(u, 12) + 0.0)


@dataclass(frozen=True)
class LinearCone:
    """Cone cut out by homogeneous linear rows; rows are deduplicated up to positive scaling."""

    n: int
    rows: tuple = ()
    notes: tuple = ()

    @classmethod
    def build(cls, n, rows, notes=()):
        """Build from ``(a, relation, label)`` triples, merging duplicate and opposite rows."""
        kept = {}        # key -> [a, relation, label]
        order = []
        for a, rel, label in rows:
            a = np.asarray(a, dtype=float).reshape(n)
            norm = np.linalg.norm(a)
            if norm <= ZERO_ROW_TOL:
                continue
            u = a / norm
            if rel == EQ0:
                nz = np.flatnonzero(np.abs(u) > 1e-12)
                if u[nz[0]] < 0:
                    u, a = -u, -a
            k, kneg = _key(u), _key(-u)
            if rel == EQ0:
                if k in kept:
                    kept[k][1] = EQ0
                    continue
                if kneg in kept:          # an LEQ row pointing the other way
                    kept[kneg][1] = EQ0
                    continue
            else:
                if k in kept:
                    continue
                if kneg in kept:
                    kept[kneg][1] = EQ0
                    continue
            kept[k] = [a, rel, label]
            order.append(k)
        out = tuple(ConeRow(tuple(float(v) + 0.0 for v in kept[k][0]), kept[k][1], kept[k][2]) for k in order)
        return cls(n, out, tuple(notes))

    @classmethod
    def whole_space(cls, n):
        return cls(n)

    def matrices(self):
        """``(A_leq, A_eq)`` as float arrays."""
        leq = [r.a for r in self.rows if r.relation == LEQ0]
        eq = [r.a for r in self.rows if r.relation == EQ0]
        return np.array(leq).reshape(-1, self.n), np.array(eq).reshape(-1, self.n)

    def intersect(self, other):
        return LinearCone.build(self.n, [(r.a, r.relation, r.label) for r in self.rows + other.rows],
                                self.notes + other.notes)

    def to_json(self):
        return {"rows": [{"a": sig(list(r.a)), "relation": r.relation, "label": r.label} for r in self.rows]}


@dataclass(frozen=True)
class RayBasis:
    """Generators: the cone equals ``cone(rays) + span(lineality)``."""

    n: int
    rays: np.ndarray
    lineality: np.ndarray

    @property
    def is_trivial(self):
        return len(self.rays) == 0 and len(self.lineality) == 0

    @property
    def is_subspace(self):
        return len(self.rays) == 0

    def to_json(self):
        return {"rays": sig(self.rays), "lineality": sig(self.lineality)}


@dataclass(frozen=True)
class CriticalUnion:
    """A union of cones; component ``l`` forces objective ``l`` to be critical."""

    components: tuple = field(default_factory=tuple)   # ((l, LinearCone), ...)

    def contains(self, v, tol=1e-9):
        return any(contains(c, v, tol) for _, c in self.components)


# -- constructing the cones of the theory -------------------------------------

def _active(problem, x, active_set):
    if active_set is None:
        from .multipliers import active_set as compute
        active_set = compute(problem, x)
    return list(active_set)


def _constraint_rows(problem, x, active, relation_for=None):
    _, G, H = problem.jacobians(x)
    rows, notes = [], []
    for i in active:
        rel = relation_for(i) if relation_for else LEQ0
        if np.linalg.norm(G[i]) <= ZERO_ROW_TOL:
            msg = f"active inequality g{i + 1} has zero gradient; row dropped (cone enlarged)"
            warnings.warn(msg, ZeroGradientWarning, stacklevel=3)
            notes.append(msg)
            continue
        rows.append((G[i], rel, f"g{i + 1}"))
    for j in range(problem.p):
        if np.linalg.norm(H[j]) <= ZERO_ROW_TOL:
            msg = f"equality h{j + 1} has zero gradient; row dropped (cone enlarged)"
            warnings.warn(msg, ZeroGradientWarning, stacklevel=3)
            notes.append(msg)
            continue
        rows.append((H[j], EQ0, f"h{j + 1}"))
    return rows, notes


def linearization_cone(problem, x, active_set=None):
    """``{v : grad g_i . v <= 0 (i active), grad h_j . v = 0}``."""
    x = np.asarray(x, dtype=float)
    rows, notes = _constraint_rows(problem, x, _active(problem, x, active_set))
    return LinearCone.build(problem.n, rows, notes)


def x0_cone(problem, x, lam, active_set=None, tol_mult=None):
    """Linearized cone of the set where constraints carrying positive multipliers are tight."""
    tol_mult = problem.tol.tol_mult if tol_mult is None else tol_mult
    x = np.asarray(x, dtype=float)
    lam = np.asarray(lam, dtype=float).reshape(-1)
    if np.any(lam < 0):
        raise ValueError("inequality multipliers must be nonnegative")
    rel = lambda i: EQ0 if lam[i] > tol_mult else LEQ0
    rows, notes = _constraint_rows(problem, x, _active(problem, x, active_set), rel)
    notes.append("ASSUMED_LINEARIZATION: T(x, X0) replaced by its linearization")
    return LinearCone.build(problem.n, rows, notes)


def critical_cone(problem, x, active_set=None):
    """Linearization cone intersected with ``{v : grad f . v = 0}``."""
    x = np.asarray(x, dtype=float)
    F, _, _ = problem.jacobians(x)
    rows, notes = _constraint_rows(problem, x, _active(problem, x, active_set))
    return LinearCone.build(problem.n, [(F[0], EQ0, "f")] + rows, notes)


def mop_critical_union(problem, x, active_set=None):
    """One cone per objective ``l``: ``grad phi_l . v = 0``, ``grad phi_k . v <= 0`` otherwise."""
    x = np.asarray(x, dtype=float)
    F, _, _ = problem.jacobians(x)
    rows, notes = _constraint_rows(problem, x, _active(problem, x, active_set))
    comps = []
    for l in range(problem.q):
        obj = [(F[k], EQ0 if k == l else LEQ0, f"phi{k + 1}") for k in range(problem.q)]
        comps.append((l, LinearCone.build(problem.n, obj + rows, notes)))
    return CriticalUnion(tuple(comps))


# -- membership and triviality -------------------------------------------------

def contains(cone, v, tol=1e-9):
    v = np.asarray(v, dtype=float)
    for r in cone.rows:
        a = r.vector
        s = a @ v
        lim = tol * np.linalg.norm(a)
        if r.relation == LEQ0 and s > lim:
            return False
        if r.relation == EQ0 and abs(s) > lim:
            return False
    return True


def is_trivial(cone, tol=1e-9):
    """True iff ``v = 0`` is the only element (LP over the unit box, coordinate by coordinate)."""
    A, E = cone.matrices()
    box = [(-1.0, 1.0)] * cone.n
    for i in range(cone.n):
        for s in (1.0, -1.0):
            c = np.zeros(cone.n)
            c[i] = -s
            val, _ = lp.minimize_linear(c, A, np.zeros(len(A)), box, E, np.zeros(len(E)))
            if val is not None and -val > tol:
                return False
    return True


# -- double description ----------------------------------------------------------

class _Field:
    """Arithmetic policy: exact rationals or floats with a pivot tolerance."""

    def __init__(self, exact):
        self.exact = exact

    def zero(self, x):
        return x == 0 if self.exact else abs(x) <= FLOAT_PIVOT_TOL


# Large denominators would let almost any double round-trip, hiding rounding residue from
# the exact path; 10^6 admits decimal inputs while generic floats fall back to tolerances.
MAX_DENOMINATOR = 10**6


def _rationalize(rows):
    out = []
    for r in rows:
        fr = [Fraction(v).limit_denominator(MAX_DENOMINATOR) for v in r]
        if any(float(f) != v for f, v in zip(fr, r)):
            return None
        out.append(fr)
    return out


def _rref(rows, n, F):
    R = [list(r) for r in rows]
    pivots = []
    i = 0
    for col in range(n):
        if i >= len(R):
            break
        p = max(range(i, len(R)), key=lambda k: abs(R[k][col]))
        if F.zero(R[p][col]):
            continue
        R[i], R[p] = R[p], R[i]
        piv = R[i][col]
        R[i] = [v / piv for v in R[i]]
        for k in range(len(R)):
            if k != i and not F.zero(R[k][col]):
                f = R[k][col]
                R[k] = [a - f * b for a, b in zip(R[k], R[i])]
        pivots.append(col)
        i += 1
    return R[:i], pivots


def _rank(rows, n, F):
    return len(_rref(rows, n, F)[1]) if rows else 0


def _nullspace(rows, n, F, one):
    if not rows:
        return [[one if i == j else one * 0 for i in range(n)] for j in range(n)]
    R, pivots = _rref(rows, n, F)
    basis = []
    for f in (c for c in range(n) if c not in pivots):
        v = [one * 0] * n
        v[f] = one
        for r, p in zip(R, pivots):
            v[p] = -r[f]
        basis.append(v)
    return basis


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _solve_neg_identity(B, n, F, one):
    """Columns of ``-B^{-1}``: initial rays of the simplicial cone ``{y : B y <= 0}``."""
    aug = [list(B[i]) + [(-one if i == j else one * 0) for j in range(n)] for i in range(n)]
    R, pivots = _rref(aug, 2 * n, F)
    inv = [r[n:] for r in R]
    return [[inv[i][j] for i in range(n)] for j in range(n)]


def _normalize(r, F):
    m = max(abs(v) for v in r)
    return [v / m for v in r]


def _double_description(M, n, F, one):
    """Extreme rays of the pointed cone ``{y : M y <= 0}`` (``rank M = n``)."""
    basis_idx = []
    for k in range(len(M)):
        if _rank([M[i] for i in basis_idx + [k]], n, F) > len(basis_idx):
            basis_idx.append(k)
        if len(basis_idx) == n:
            break
    B = [M[i] for i in basis_idx]
    rays = [_normalize(r, F) for r in _solve_neg_identity(B, n, F, one)]
    processed = list(basis_idx)
    rest = [k for k in range(len(M)) if k not in basis_idx]
    for k in rest:
        a = M[k]
        vals = [_dot(a, r) for r in rays]
        pos = [i for i, v in enumerate(vals) if not F.zero(v) and v > 0]
        neg = [i for i, v in enumerate(vals) if not F.zero(v) and v < 0]
        zer = [i for i, v in enumerate(vals) if F.zero(v)]
        tight = [{j for j in processed if F.zero(_dot(M[j], r))} for r in rays]
        new = [rays[i] for i in neg + zer]
        for p in pos:
            for q in neg:
                common = tight[p] & tight[q]
                if len(common) < n - 2:
                    continue
                if _rank([M[j] for j in common], n, F) != n - 2:
                    continue
                comb = [vals[p] * y - vals[q] * x for x, y in zip(rays[p], rays[q])]
                new.append(_normalize(comb, F))
        rays = new
        processed.append(k)
    return rays


def _gram_schmidt(vectors):
    out = []
    for v in vectors:
        w = np.array(v, dtype=float)
        for u in out:
            w = w - (w @ u) * u
        nrm = np.linalg.norm(w)
        if nrm > 1e-12:
            w = w / nrm
            nz = np.flatnonzero(np.abs(w) > 1e-12)
            if w[nz[0]] < 0:
                w = -w
            out.append(w + 0.0)
    return out


def extreme_rays(cone):
    """Extreme rays (unit vectors, lexicographically descending) and an orthonormal lineality basis."""
    n = cone.n
    if n > MAX_CONE_DIMENSION:
        raise DimensionTooLarge(f"dimension {n} exceeds {MAX_CONE_DIMENSION}")
    leq = [list(r.a) for r in cone.rows if r.relation == LEQ0]
    eq = [list(r.a) for r in cone.rows if r.relation == EQ0]
    exact_rows = _rationalize(leq + eq)
    if exact_rows is not None:
        F, one = _Field(True), Fraction(1)
        leq, eq = exact_rows[:len(leq)], exact_rows[len(leq):]
    else:
        F, one = _Field(False), 1.0
        unit = lambda r: list(np.asarray(r) / np.linalg.norm(r))
        leq, eq = [unit(r) for r in leq], [unit(r) for r in eq]

    lin = _nullspace(leq + eq, n, F, one)
    lineality = np.array(_gram_schmidt([[float(v) for v in l] for l in lin])).reshape(-1, n)
    M = list(leq) + [r for e in eq for r in (e, [-v for v in e])]
    M += [r for l in lin for r in (l, [-v for v in l])]
    rays = []
    if len(lin) < n:
        raw = _double_description(M, n, F, one)
        seen = set()
        for r in raw:
            v = np.array([float(t) for t in r])
            v /= np.linalg.norm(v)
            k = _key(v)
            if k not in seen:
                seen.add(k)
                rays.append(v + 0.0)
    rays.sort(key=_key, reverse=True)
    return RayBasis(n, np.array(rays).reshape(-1, n), lineality)


def sample_directions(basis, count, seed=0):
    """Unit vectors of the cone: every ray and every ``±`` lineality vector first, then random mixtures."""
    if basis.is_trivial:
        raise TrivialCone("the cone is {0}")
    out = [r for r in basis.rays] + [s * l for l in basis.lineality for s in (1.0, -1.0)]
    rng = np.random.default_rng(seed)
    k, m = len(basis.rays), len(basis.lineality)
    while len(out) < count:
        v = np.zeros(basis.n)
        if k:
            v += rng.exponential(size=k) @ basis.rays
        if m:
            v += rng.standard_normal(m) @ basis.lineality
        nrm = np.linalg.norm(v)
        if nrm > 1e-12:
            out.append(v / nrm)
    return np.array(out)


def is_pointed_simplicial(basis, tol=1e-10):
    """Rays linearly independent modulo the lineality space."""
    G = np.vstack([basis.lineality, basis.rays]) if len(basis.rays) else basis.lineality
    return np.linalg.matrix_rank(G, tol) == len(G) if len(G) else True


def face_subsets(basis, max_rays=12):
    """Subsets of rays that are independent together with the lineality space."""
    k = len(basis.rays)
    if k > max_rays:
        return None
    out = []
    for size in range(0, min(k, basis.n) + 1):
        for S in combinations(range(k), size):
            G = np.vstack([basis.lineality] + [basis.rays[list(S)]]) if size else basis.lineality
            d = len(G)
            if d == 0:
                continue
            if np.linalg.matrix_rank(G, 1e-10) == d:
                out.append(S)
    return out
