"""Dense two-phase tableau simplex with Bland's anti-cycling rule.

Used where a deterministic, dependency-free vertex solution matters: the
multiplier systems and their theorem-of-the-alternative certificates.
"""

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-12


@dataclass
class LPResult:
    status: str            # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    value: float | None
    phase1_value: float


def _pivot(T, basis, r, c):
    T[r] /= T[r, c]
    for i in range(T.shape[0]):
        if i != r and T[i, c] != 0.0:
            T[i] -= T[i, c] * T[r]
    basis[r] = c


def _bland(T, basis, ncols, tol, max_iter=10_000):
    """Run Bland iterations on the tableau; the last row holds reduced costs."""
    m = T.shape[0] - 1
    for _ in range(max_iter):
        cost = T[-1, :ncols]
        entering = np.flatnonzero(cost < -tol)
        if entering.size == 0:
            return "optimal"
        c = int(entering[0])
        col = T[:m, c]
        rows = np.flatnonzero(col > tol)
        if rows.size == 0:
            return "unbounded"
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + tol * max(1.0, abs(best))]
        r = int(min(ties, key=lambda i: basis[i]))
        _pivot(T, basis, r, c)
    raise RuntimeError("simplex iteration limit reached")


def solve_standard_form(A, b, c=None, tol=PIVOT_TOL):
    """Minimize ``c . x`` subject to ``A x = b``, ``x >= 0``.

    With ``c=None`` only phase one runs and any feasible vertex is returned.
    Column order matters: Bland's rule prefers low-index columns, which makes
    the returned vertex reproducible.
    """
    A = np.array(A, dtype=float, ndmin=2)
    b = np.array(b, dtype=float).reshape(-1)
    m, N = A.shape
    if m == 0:
        x = np.zeros(N)
        if c is not None and np.any(np.asarray(c) < -tol):
            return LPResult("unbounded", None, None, 0.0)
        return LPResult("optimal", x, 0.0, 0.0)
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1
    scale = np.maximum(np.abs(A).max(axis=1), 1.0)
    A /= scale[:, None]
    b /= scale

    T = np.zeros((m + 1, N + m + 1))
    T[:m, :N] = A
    T[:m, N:N + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :N] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    basis = list(range(N, N + m))
    _bland(T, basis, N + m, tol)
    phase1 = -T[-1, -1]
    if phase1 > 1e-9 * max(1.0, np.abs(b).max()):
        return LPResult("infeasible", None, None, float(phase1))

    # drive artificials out of the basis; drop redundant rows
    keep = []
    for r in range(m):
        if basis[r] >= N:
            cand = np.flatnonzero(np.abs(T[r, :N]) > 1e-9)
            if cand.size:
                _pivot(T, basis, r, int(cand[0]))
                keep.append(r)
        else:
            keep.append(r)
    T = np.vstack([T[keep][:, list(range(N)) + [T.shape[1] - 1]], np.zeros((1, N + 1))])
    basis = [basis[r] for r in keep]

    if c is not None:
        c = np.asarray(c, dtype=float)
        T[-1, :N] = c
        T[-1, -1] = 0.0
        for r, j in enumerate(basis):
            T[-1] -= c[j] * T[r]
        status = _bland(T, basis, N, tol)
        if status == "unbounded":
            return LPResult("unbounded", None, None, float(phase1))

    x = np.zeros(N)
    for r, j in enumerate(basis):
        x[j] = T[r, -1]
    x[x < 0] = 0.0
    value = float(c @ x) if c is not None else 0.0
    return LPResult("optimal", x, value, float(phase1))


def find_feasible(A_eq, b_eq, nonneg):
    """Find ``y`` with ``A_eq y = b_eq`` and ``y[k] >= 0`` where ``nonneg[k]``.

    Free variables are split as ``y = y+ - y-``; the split columns are placed
    after all sign-constrained columns. Returns ``None`` when infeasible.
    """
    A_eq = np.array(A_eq, dtype=float, ndmin=2)
    nonneg = np.asarray(nonneg, dtype=bool)
    k = nonneg.size
    free = np.flatnonzero(~nonneg)
    cols = [A_eq[:, nonneg], A_eq[:, free], -A_eq[:, free]]
    A = np.hstack(cols)
    res = solve_standard_form(A, b_eq)
    if res.status != "optimal":
        return None
    y = np.zeros(k)
    npos = int(nonneg.sum())
    y[nonneg] = res.x[:npos]
    y[free] = res.x[npos:npos + free.size] - res.x[npos + free.size:]
    return y
