"""Small geometric LPs over polyhedra ``{x : A x + b <= 0}`` intersected with a box."""

import numpy as np
from scipy.optimize import linprog


def _as_system(A, b, n):
    A = np.asarray(A, dtype=float).reshape(-1, n)
    b = np.asarray(b, dtype=float).reshape(-1)
    return A, b


def chebyshev_ball(A, b, box):
    """Largest ball inside ``{x : A x + b <= 0} ∩ box``.

    Returns ``(radius, center)``; radius is ``-inf`` when the set is empty.
    """
    box = np.asarray(box, dtype=float)
    n = box.shape[0]
    A, b = _as_system(A, b, n)
    norms = np.linalg.norm(A, axis=1)
    eye = np.eye(n)
    G = np.vstack([A, eye, -eye]) if A.size else np.vstack([eye, -eye])
    h = np.concatenate([-b, box[:, 1], -box[:, 0]]) if A.size else np.concatenate([box[:, 1], -box[:, 0]])
    gn = np.concatenate([norms, np.ones(2 * n)]) if A.size else np.ones(2 * n)
    # variables (x, r); maximize r
    A_ub = np.hstack([G, gn[:, None]])
    c = np.zeros(n + 1)
    c[-1] = -1.0
    bounds = [(None, None)] * n + [(None, None)]
    res = linprog(c, A_ub=A_ub, b_ub=h, bounds=bounds, method="highs")
    if res.status != 0:
        return -np.inf, None
    return float(res.x[-1]), res.x[:n]


def minimize_linear(c, A, b, box, A_eq=None, b_eq=None):
    """Minimize ``c . x`` over ``{A x + b <= 0, A_eq x + b_eq = 0} ∩ box``.

    Returns ``(value, x)`` or ``(None, None)`` when infeasible.
    """
    box = np.asarray(box, dtype=float)
    n = box.shape[0]
    A, b = _as_system(A, b, n)
    kw = {}
    if A.size:
        kw["A_ub"], kw["b_ub"] = A, -b
    if A_eq is not None and len(A_eq):
        A_eq, b_eq = _as_system(A_eq, b_eq, n)
        kw["A_eq"], kw["b_eq"] = A_eq, -b_eq
    res = linprog(np.asarray(c, dtype=float), bounds=list(map(tuple, box)), method="highs-ds", **kw)
    if res.status != 0:
        return None, None
    return float(res.fun), res.x
