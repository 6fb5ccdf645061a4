"""Sparse multivariate polynomials with exact term-wise calculus."""

from functools import cached_property

import numpy as np

from .config import MAX_DEGREE
from .errors import DegreeTooHigh, DimensionMismatch


class Polynomial:
    """A polynomial in ``n`` variables stored as ``{exponents: coefficient}``.

    Terms with equal exponent vectors are merged and zero coefficients are
    dropped, so two polynomials that are equal as functions compare equal.
    Derivatives are formed term by term, never by differencing.

    >>> p = Polynomial(2, [(1.0, (1, 0)), (1.0, (0, 2))])   # x1 + x2^2
    >>> p(np.array([0.0, 3.0]))
    9.0
    """

    def __init__(self, n, terms=(), max_degree=MAX_DEGREE):
        n = int(n)
        if n < 1:
            raise ValueError("a polynomial needs at least one variable")
        merged = {}
        for coef, exps in terms:
            exps = tuple(int(e) for e in exps)
            if len(exps) != n:
                raise DimensionMismatch(f"exponent vector {exps} has length != {n}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            merged[exps] = merged.get(exps, 0.0) + float(coef)
        self.n = n
        self.terms = tuple(sorted((e, c) for e, c in merged.items() if c != 0.0))
        if self.degree > max_degree:
            raise DegreeTooHigh(f"degree {self.degree} exceeds cap {max_degree}")

    # -- construction helpers -------------------------------------------------
    @classmethod
    def zero(cls, n):
        return cls(n)

    @classmethod
    def constant(cls, n, c):
        return cls(n, [(c, (0,) * n)])

    @classmethod
    def linear(cls, a, b=0.0):
        """``a . x + b``."""
        a = np.asarray(a, dtype=float)
        n = a.size
        terms = [(b, (0,) * n)]
        for i, ai in enumerate(a):
            e = [0] * n
            e[i] = 1
            terms.append((ai, e))
        return cls(n, terms)

    @classmethod
    def quadratic(cls, Q, c=None, d=0.0):
        """``x^T Q x / 2 + c . x + d`` for symmetric ``Q``."""
        Q = np.asarray(Q, dtype=float)
        n = Q.shape[0]
        Q = 0.5 * (Q + Q.T)
        terms = []
        for i in range(n):
            for j in range(i, n):
                e = [0] * n
                e[i] += 1
                e[j] += 1
                terms.append((Q[i, i] / 2 if i == j else Q[i, j], e))
        p = cls(n, terms)
        if c is not None:
            p = p + cls.linear(c, d)
        elif d:
            p = p + cls.constant(n, d)
        return p

    # -- algebra --------------------------------------------------------------
    @property
    def degree(self):
        return max((sum(e) for e, _ in self.terms), default=0)

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = Polynomial.constant(self.n, other)
        self._check_dim(other)
        return Polynomial(self.n, [(c, e) for e, c in self.terms + other.terms])

    __radd__ = __add__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating)):
            return Polynomial(self.n, [(c * float(other), e) for e, c in self.terms])
        self._check_dim(other)
        terms = []
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                terms.append((c1 * c2, tuple(a + b for a, b in zip(e1, e2))))
        return Polynomial(self.n, terms)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, Polynomial) and self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, self.terms))

    def __repr__(self):
        return f"Polynomial({self.n}, {[(c, e) for e, c in self.terms]})"

    def _check_dim(self, other):
        if other.n != self.n:
            raise DimensionMismatch(f"{self.n} vs {other.n} variables")

    def derivative(self, i):
        terms = []
        for e, c in self.terms:
            if e[i] > 0:
                e2 = list(e)
                e2[i] -= 1
                terms.append((c * e[i], e2))
        return Polynomial(self.n, terms)

    @cached_property
    def gradient_polys(self):
        return tuple(self.derivative(i) for i in range(self.n))

    @cached_property
    def hessian_polys(self):
        g = self.gradient_polys
        return tuple(tuple(g[i].derivative(j) for j in range(self.n)) for i in range(self.n))

    # -- evaluation -----------------------------------------------------------
    @cached_property
    def _arrays(self):
        if not self.terms:
            return np.zeros(0), np.zeros((0, self.n), dtype=int)
        exps = np.array([e for e, _ in self.terms], dtype=int)
        coefs = np.array([c for _, c in self.terms], dtype=float)
        return coefs, exps

    def eval_many(self, X):
        """Evaluate at the rows of ``X`` (shape ``(k, n)``)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        coefs, exps = self._arrays
        if coefs.size == 0:
            return np.zeros(X.shape[0])
        mono = np.prod(X[:, None, :] ** exps[None, :, :], axis=2)
        return mono @ coefs

    def __call__(self, x):
        return float(self.eval_many(np.asarray(x, dtype=float).reshape(1, -1))[0])

    def grad(self, x):
        x = np.asarray(x, dtype=float).reshape(1, -1)
        return np.array([g.eval_many(x)[0] for g in self.gradient_polys])

    def grad_many(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.stack([g.eval_many(X) for g in self.gradient_polys], axis=1)

    def hessian(self, x):
        x = np.asarray(x, dtype=float).reshape(1, -1)
        H = np.empty((self.n, self.n))
        for i in range(self.n):
            for j in range(i, self.n):
                H[i, j] = H[j, i] = self.hessian_polys[i][j].eval_many(x)[0]
        return H

    # -- serialization --------------------------------------------------------
    def to_json(self):
        return {"terms": [{"c": c, "e": list(e)} for e, c in self.terms]}
