"""Sparse multivariate polynomials with exact differentiation.

Terms are stored as {exponent tuple: coefficient}. This is the exact
companion to every closed-form evaluator: gradients and Hessians obtained by
formal differentiation carry no truncation error, so disagreements with a
closed form point at the closed form, not at the oracle.
"""

from __future__ import annotations

import numpy as np


class MonomialForm:
    """Polynomial in `nvars` variables as a sparse exponent->coefficient map."""

    def __init__(self, nvars, terms=None):
        self.nvars = int(nvars)
        self.terms = {}
        self._expo = None
        self._coef = None
        if terms:
            for expo, coeff in dict(terms).items():
                self.add(expo, coeff)

    def add(self, expo, coeff):
        expo = tuple(int(e) for e in expo)
        if len(expo) != self.nvars or any(e < 0 for e in expo):
            raise ValueError(f"bad exponent tuple {expo} for {self.nvars} variables")
        value = self.terms.get(expo, 0.0) + float(coeff)
        if value == 0.0:
            self.terms.pop(expo, None)
        else:
            self.terms[expo] = value
        self._expo = None
        return self

    def _compiled(self):
        if self._expo is None:
            items = sorted(self.terms.items())
            self._expo = np.array([e for e, _ in items], dtype=int).reshape(
                len(items), self.nvars
            )
            self._coef = np.array([c for _, c in items], dtype=float)
        return self._expo, self._coef

    def __call__(self, x):
        expo, coef = self._compiled()
        if len(coef) == 0:
            return 0.0
        x = np.asarray(x, dtype=float)
        return float(coef @ np.prod(x[None, :] ** expo, axis=1))

    def partial(self, i):
        """Exact partial derivative with respect to variable i."""
        if not 0 <= i < self.nvars:
            raise ValueError(f"variable index {i} out of range")
        out = MonomialForm(self.nvars)
        for expo, coeff in self.terms.items():
            if expo[i] == 0:
                continue
            lowered = list(expo)
            lowered[i] -= 1
            out.add(lowered, coeff * expo[i])
        return out

    def degree(self):
        return max((sum(e) for e in self.terms), default=0)

    def __len__(self):
        return len(self.terms)

    def __add__(self, other):
        out = MonomialForm(self.nvars, self.terms)
        for expo, coeff in other.terms.items():
            out.add(expo, coeff)
        return out

    def __sub__(self, other):
        out = MonomialForm(self.nvars, self.terms)
        for expo, coeff in other.terms.items():
            out.add(expo, -coeff)
        return out

    def __mul__(self, other):
        if np.isscalar(other):
            out = MonomialForm(self.nvars)
            for expo, coeff in self.terms.items():
                out.add(expo, coeff * other)
            return out
        if other.nvars != self.nvars:
            raise ValueError("variable counts differ")
        out = MonomialForm(self.nvars)
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                out.add(tuple(a + b for a, b in zip(ea, eb)), ca * cb)
        return out

    __rmul__ = __mul__


def quadratic_form(matrix):
    """MonomialForm of x^T A x for a symmetric matrix A."""
    a = np.asarray(matrix, dtype=float)
    n = a.shape[0]
    out = MonomialForm(n)
    for i in range(n):
        if a[i, i] != 0.0:
            expo = [0] * n
            expo[i] = 2
            out.add(expo, a[i, i])
        for j in range(i + 1, n):
            coeff = a[i, j] + a[j, i]
            if coeff != 0.0:
                expo = [0] * n
                expo[i] = 1
                expo[j] = 1
                out.add(expo, coeff)
    return out


def norm_square_form(n):
    """MonomialForm of |x|^2 on R^n."""
    out = MonomialForm(n)
    for i in range(n):
        expo = [0] * n
        expo[i] = 2
        out.add(expo, 1.0)
    return out
