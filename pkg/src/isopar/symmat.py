"""Symmetric-matrix kernel.

Elementary symmetric functions sigma_k and power sums rho_k of a spectrum,
Newton's identities in both directions, a cyclic Jacobi eigensolver, spectrum
recovery from moments via a companion matrix, and a Bjorck-Pereyra solver for
dual Vandermonde systems. Everything downstream (level-set invariants, shape
operators, trace recurrences) reduces to these primitives.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ConditioningError, ConvergenceError, IllPosedMomentsError

# Eigenvalue grouping scale; far below the curvature gaps that occur on
# regular level sets, far above eigensolver noise.
CLUSTER_TOL = 1e-6

JACOBI_TOL_FACTOR = 1e-12
JACOBI_MAX_SWEEPS = 100

NODE_GAP_MIN = 1e-8


@dataclass(frozen=True)
class SymmetricMatrix:
    """Dense real symmetric matrix; entries are symmetrized at construction.

    Rejects input whose asymmetry exceeds roundoff scale instead of silently
    averaging away a bug.
    """

    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        skew = float(np.max(np.abs(a - a.T)))
        scale = max(1.0, float(np.max(np.abs(a))))
        if skew > 1e-8 * scale:
            raise ValueError(f"matrix is not symmetric: max asymmetry {skew:.3e}")
        sym = (a + a.T) / 2.0
        sym.flags.writeable = False
        object.__setattr__(self, "entries", sym)

    @property
    def order(self) -> int:
        return self.entries.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.entries))


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted descending, plus a clustering into near-equal groups.

    grouping is a tuple of (representative value, multiplicity) pairs built
    with gap tolerance CLUSTER_TOL. imag_residual records how much imaginary
    part was discarded when the spectrum came from a root-finding path.
    """

    values: np.ndarray
    grouping: tuple
    imag_residual: float = 0.0

    @classmethod
    def from_values(cls, values, tol=CLUSTER_TOL, imag_residual=0.0):
        w = np.sort(np.asarray(values, dtype=float))[::-1].copy()
        groups = []
        start = 0
        for i in range(1, len(w) + 1):
            if i == len(w) or w[i - 1] - w[i] > tol:
                block = w[start:i]
                groups.append((float(block.mean()), len(block)))
                start = i
        w.flags.writeable = False
        return cls(values=w, grouping=tuple(groups), imag_residual=float(imag_residual))

    @property
    def order(self) -> int:
        return len(self.values)

    def multiplicities(self) -> tuple:
        return tuple(count for _, count in self.grouping)

    def distinct(self) -> tuple:
        return tuple(value for value, _ in self.grouping)


def _offdiag_norm(a):
    # Summed directly over the off-diagonal entries: the subtraction
    # ||A||_F^2 - ||diag||^2 cancels catastrophically once the off-diagonal
    # mass is below ||A||_F * sqrt(eps) and would stall convergence tests.
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def eigh_jacobi(matrix, max_sweeps=JACOBI_MAX_SWEEPS):
    """Cyclic Jacobi diagonalization of a symmetric matrix.

    Returns (eigenvalues descending, eigenvector columns in that order).
    Converged when the off-diagonal Frobenius norm drops below
    JACOBI_TOL_FACTOR times the Frobenius norm of the input; raises
    ConvergenceError carrying the remaining off-diagonal norm otherwise.
    """
    a = np.array(np.asarray(matrix, dtype=float))
    n = a.shape[0]
    v = np.eye(n)
    scale = float(np.linalg.norm(a))
    if n == 1 or scale == 0.0:
        order = np.argsort(-np.diag(a), kind="stable")
        return np.diag(a)[order], v[:, order]
    threshold = JACOBI_TOL_FACTOR * scale
    for _ in range(max_sweeps):
        if _offdiag_norm(a) <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        off = _offdiag_norm(a)
        raise ConvergenceError(
            f"Jacobi sweeps exhausted ({max_sweeps}); off-diagonal norm {off:.3e}",
            off_diagonal=off,
        )
    w = np.diag(a).copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def eigensolve(M: SymmetricMatrix) -> Spectrum:
    """Full spectrum of M via the Jacobi solver, clustered for multiplicity."""
    w, _ = eigh_jacobi(M.entries)
    return Spectrum.from_values(w)


def _elementary_from_values(values, k):
    # e[j] accumulates the degree-j elementary symmetric function; the slice
    # RHS is materialized before the in-place add, so order is safe.
    e = np.zeros(k + 1)
    e[0] = 1.0
    for lam in values:
        e[1 : k + 1] += lam * e[0:k]
    return e


def sigma_k(M: SymmetricMatrix, k: int) -> float:
    """Elementary symmetric function of the eigenvalues, sigma_0 = 1."""
    n = M.order
    if not 0 <= k <= n:
        raise ValueError(f"k = {k} out of range [0, {n}]")
    if k == 0:
        return 1.0
    w, _ = eigh_jacobi(M.entries)
    return float(_elementary_from_values(w, k)[k])


def sigma_k_minor_sum(M: SymmetricMatrix, k: int) -> float:
    """sigma_k as the sum of principal k-minors.

    Brute force over index subsets; independent of the eigenvalue path and
    meant as an oracle for order <= 8.
    """
    n = M.order
    if not 0 <= k <= n:
        raise ValueError(f"k = {k} out of range [0, {n}]")
    if k == 0:
        return 1.0
    total = 0.0
    for rows in itertools.combinations(range(n), k):
        sub = M.entries[np.ix_(rows, rows)]
        total += float(np.linalg.det(sub))
    return total


def rho_k(M: SymmetricMatrix, k: int) -> float:
    """Power sum of the eigenvalues, tr(M^k); rho_0 = order."""
    if k < 0:
        raise ValueError(f"k = {k} must be nonnegative")
    n = M.order
    if k == 0:
        return float(n)
    value = float(np.trace(np.linalg.matrix_power(M.entries, k)))
    if not np.isfinite(value):
        raise ArithmeticError(f"rho_{k} overflowed to a non-finite value")
    return value


def newton_sigma_from_rho(rho, n: int):
    """sigma_1..sigma_k from rho_1..rho_k by Newton's identities (k <= n)."""
    rho = [float(r) for r in rho]
    k = len(rho)
    if k == 0:
        raise ValueError("need at least one power sum")
    if k > n:
        raise ValueError(f"got {k} power sums for order n = {n}")
    sigma = [1.0]
    for j in range(1, k + 1):
        acc = 0.0
        for i in range(1, j + 1):
            acc += (-1.0) ** (i - 1) * sigma[j - i] * rho[i - 1]
        sigma.append(acc / j)
    return sigma[1:]


def newton_rho_from_sigma(sigma, n: int):
    """rho_1..rho_k from sigma_1..sigma_k, inverting Newton's identities."""
    sigma = [float(s) for s in sigma]
    k = len(sigma)
    if k == 0:
        raise ValueError("need at least one elementary symmetric value")
    if k > n:
        raise ValueError(f"got {k} values for order n = {n}")
    full = [1.0] + sigma
    rho = []
    for j in range(1, k + 1):
        acc = 0.0
        for i in range(1, j):
            acc += (-1.0) ** (i - 1) * full[j - i] * rho[i - 1]
        rho.append((-1.0) ** (j - 1) * (j * full[j] - acc))
    return rho


def spectrum_from_moments(rho, n: int, tol_imag=1e-6) -> Spectrum:
    """Recover the eigenvalue multiset of a symmetric operator of order n
    from its first n power sums.

    Newton's identities give the characteristic polynomial; its roots come
    from a companion-matrix eigensolve. Roots with imaginary part above
    tol_imag mean the moments are not realizable and raise
    IllPosedMomentsError.
    """
    rho = [float(r) for r in rho]
    if len(rho) != n:
        raise ValueError(f"need exactly n = {n} power sums, got {len(rho)}")
    sigma = newton_sigma_from_rho(rho, n)
    if n == 1:
        return Spectrum.from_values([sigma[0]])
    comp = np.zeros((n, n))
    # x^n - sigma_1 x^(n-1) + sigma_2 x^(n-2) - ... ; first-row companion.
    comp[0, :] = [(-1.0) ** k * sigma[k] for k in range(n)]
    comp[1:, :-1] = np.eye(n - 1)
    roots = np.linalg.eigvals(comp)
    imag = float(np.max(np.abs(roots.imag)))
    if imag > tol_imag:
        raise IllPosedMomentsError(
            f"complex spectrum (max imaginary part {imag:.3e}); moments not "
            "realizable by a real symmetric operator",
            imag_residual=imag,
        )
    return Spectrum.from_values(roots.real, imag_residual=imag)


def vandermonde_solve(nodes, moments):
    """Solve sum_j nodes_j**i * w_j = moments_i for the weights w.

    Bjorck-Pereyra elimination on the dual Vandermonde system: O(n^2), exact
    up to roundoff for well-separated nodes. Nodes closer than NODE_GAP_MIN
    raise ConditioningError naming the offending gap.
    """
    x = np.asarray(nodes, dtype=float)
    b = np.array(moments, dtype=float)
    n = len(x)
    if x.ndim != 1 or b.shape != (n,):
        raise ValueError("nodes and moments must be 1-D of equal length")
    if n == 0:
        raise ValueError("need at least one node")
    for i in range(n):
        for j in range(i + 1, n):
            gap = abs(x[i] - x[j])
            if gap <= NODE_GAP_MIN:
                raise ConditioningError(
                    f"nodes {x[i]} and {x[j]} are {gap:.3e} apart", gap=gap
                )
    for k in range(n - 1):
        for i in range(n - 1, k, -1):
            b[i] -= x[k] * b[i - 1]
    for k in range(n - 2, -1, -1):
        for i in range(k + 1, n):
            b[i] /= x[i] - x[i - k - 1]
        for i in range(k, n - 1):
            b[i] -= b[i + 1]
    return b
