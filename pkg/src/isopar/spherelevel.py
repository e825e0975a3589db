"""Unit-sphere restriction of a family member.

Adapted frames and shape operators on regular level sets, the cotangent-shift
principal curvature spectrum, power sums of the level-set and ambient
Hessians as functions of the level parameter t (with their first-order
recurrences), and projection of a point to a prescribed level along its
normal great circle.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import FocalPointError, ProjectionError
from .polyfam import IsoPolynomial, eval_F, eval_grad, eval_hessian, profile_of
from .symmat import Spectrum, SymmetricMatrix, eigensolve, rho_k

EPS_FOCAL = 1e-3  # levels with |f| > 1 - EPS_FOCAL count as focal
FD_STEP = 1e-4  # central-difference step for the t-recurrences
MATCH_TOL = 1e-6


def sphere_points(dim: int, count: int, seed: int) -> np.ndarray:
    """Deterministic unit-sphere samples; sample i depends only on (seed, i)."""
    pts = np.empty((count, dim))
    for i in range(count):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i,)))
        v = rng.standard_normal(dim)
        pts[i] = v / np.linalg.norm(v)
    return pts


def regular_sphere_points(P: IsoPolynomial, count: int, seed: int, f_bound=0.9):
    """Unit-sphere samples with |F| <= f_bound, redrawing per-index substreams
    so the result is reproducible and independent of rejection counts."""
    pts = np.empty((count, P.ambient_dim))
    for i in range(count):
        for attempt in range(64):
            rng = np.random.default_rng(
                np.random.SeedSequence(seed, spawn_key=(i, attempt))
            )
            v = rng.standard_normal(P.ambient_dim)
            v /= np.linalg.norm(v)
            if abs(eval_F(P, v)) <= f_bound:
                pts[i] = v
                break
        else:
            raise RuntimeError("could not draw a point away from the focal bands")
    return pts


def orthonormal_complement(vectors, dim: int) -> np.ndarray:
    """Orthonormal rows spanning the complement of the given orthonormal rows.

    Projects the standard basis, drops the len(vectors) smallest candidates,
    then Gram-Schmidts the rest in index order (deterministic). A second
    orthogonalization pass keeps the result clean near machine precision.
    """
    v = np.asarray(vectors, dtype=float)
    k = v.shape[0]
    proj = np.eye(dim) - v.T @ v
    norms = np.linalg.norm(proj, axis=0)
    drop = set(np.argsort(norms, kind="stable")[:k])
    rows = []
    for i in range(dim):
        if i in drop:
            continue
        w = proj[:, i].copy()
        for _ in range(2):
            for row in rows:
                w -= (row @ w) * row
        norm = np.linalg.norm(w)
        if norm < 1e-8:
            raise RuntimeError("degenerate complement candidate")
        rows.append(w / norm)
    return np.vstack(rows) if rows else np.empty((0, dim))


@dataclass(frozen=True)
class SpherePointFrame:
    """Adapted data at a regular point x of the unit sphere.

    tangent_basis: n orthonormal rows spanning the level-set tangent space
    (orthogonal to x and to the spherical gradient). hessian_sph is the
    spherical Hessian of f = F|_S in the frame (e_1..e_n, nu), order n+1.
    shape is the level-set shape operator, order n.
    """

    point: np.ndarray
    f: float
    grad_sph: np.ndarray
    grad_norm: float
    nu: np.ndarray
    tangent_basis: np.ndarray
    hessian_sph: SymmetricMatrix
    shape: SymmetricMatrix
    profile: object

    def residuals(self) -> dict:
        """Max-abs residuals of the frame invariants."""
        n = self.shape.order
        hs = self.hessian_sph.entries
        return {
            "unit-point": abs(float(np.linalg.norm(self.point)) - 1.0),
            "grad-tangency": abs(float(self.grad_sph @ self.point)),
            "mixed-row": float(np.max(np.abs(hs[:n, n]))),
            "normal-entry": abs(hs[n, n] - 0.5 * self.profile.b_prime(self.f)),
            "gradient-profile": abs(self.grad_norm**2 - self.profile.b(self.f)),
        }


def frame_at(P: IsoPolynomial, x) -> SpherePointFrame:
    """Build the adapted frame at a unit vector x on a regular level."""
    x = np.asarray(x, dtype=float)
    if abs(float(np.linalg.norm(x)) - 1.0) > 1e-12:
        raise ValueError("x must lie on the unit sphere to 1e-12")
    f = eval_F(P, x)
    if abs(f) > 1.0 - EPS_FOCAL:
        raise FocalPointError(
            f"level f = {f:.6f} is inside the focal band", level=f
        )
    df = eval_grad(P, x)
    grad_sph = df - P.g * f * x
    grad_norm = float(np.linalg.norm(grad_sph))
    nu = grad_sph / grad_norm
    basis = orthonormal_complement(np.vstack([x, nu]), P.ambient_dim)
    hf_amb = eval_hessian(P, x).entries
    frame_rows = np.vstack([basis, nu])
    n = P.n
    hess_sph = frame_rows @ hf_amb @ frame_rows.T - P.g * f * np.eye(n + 1)
    shape = -hess_sph[:n, :n] / grad_norm
    return SpherePointFrame(
        point=x,
        f=float(f),
        grad_sph=grad_sph,
        grad_norm=grad_norm,
        nu=nu,
        tangent_basis=basis,
        hessian_sph=SymmetricMatrix(hess_sph),
        shape=SymmetricMatrix(shape),
        profile=profile_of(P),
    )


def shape_spectrum(frame: SpherePointFrame) -> Spectrum:
    return eigensolve(frame.shape)


@dataclass(frozen=True)
class MunznerSpectrum:
    """Expected principal curvatures at level t: cot(tau + (i-1)pi/g) with
    tau = arccos(t)/g, multiplicities alternating (m1, m2, m1, ...)."""

    g: int
    m1: int
    m2: int
    t: float
    tau: float
    curvatures: tuple
    multiplicities: tuple

    @classmethod
    def at_level(cls, g: int, m1: int, m2: int, t: float):
        if not -1.0 < t < 1.0:
            raise ValueError(f"level t = {t} must be interior to (-1, 1)")
        tau = np.arccos(t) / g
        curv = tuple(
            1.0 / np.tan(tau + i * np.pi / g) for i in range(g)
        )  # descending since cot decreases on (0, pi)
        mult = tuple(m1 if i % 2 == 0 else m2 for i in range(g))
        return cls(
            g=g, m1=m1, m2=m2, t=float(t), tau=float(tau),
            curvatures=curv, multiplicities=mult,
        )

    def values(self) -> np.ndarray:
        return np.repeat(self.curvatures, self.multiplicities)


@dataclass(frozen=True)
class MunznerReport:
    match: bool
    max_deviation: float
    orientation_flipped: bool
    expected: np.ndarray
    observed: np.ndarray


def munzner_check(frame: SpherePointFrame, g: int, m1: int, m2: int) -> MunznerReport:
    """Compare the shape spectrum against the cotangent-shift prediction.

    A match of the sign-flipped multiset is reported separately so an
    orientation mismatch is distinguishable from a genuine failure.
    """
    expected = MunznerSpectrum.at_level(g, m1, m2, frame.f).values()
    observed = shape_spectrum(frame).values
    if len(expected) != len(observed):
        return MunznerReport(False, float("inf"), False, expected, observed)
    dev = float(np.max(np.abs(observed - expected)))
    flipped = np.sort(-expected)[::-1]
    dev_flipped = float(np.max(np.abs(observed - flipped)))
    match = dev <= MATCH_TOL
    return MunznerReport(
        match=match,
        max_deviation=dev,
        orientation_flipped=(not match) and dev_flipped <= MATCH_TOL,
        expected=expected,
        observed=observed,
    )


def munzner_qk(g: int, m1: int, m2: int, t: float, k: int) -> float:
    """Power sum Q_k(t) of the level-set principal curvatures."""
    tau = np.arccos(t) / g
    s1 = sum(
        (1.0 / np.tan(tau + 2.0 * i * np.pi / g)) ** k
        for i in range((g + 1) // 2)
    )
    s2 = sum(
        (1.0 / np.tan(tau + (2.0 * i + 1.0) * np.pi / g)) ** k
        for i in range(g // 2)
    )
    return m1 * s1 + m2 * s2


def munzner_q1_closed(g: int, m1: int, m2: int, t: float) -> float:
    """Closed form of Q_1 used as the recurrence seed."""
    return 0.5 * m1 * g * np.sqrt((1.0 + t) / (1.0 - t)) - 0.5 * m2 * g * np.sqrt(
        (1.0 - t) / (1.0 + t)
    )


def munzner_rhobar(g: int, m1: int, m2: int, t: float, k: int) -> float:
    """Power sum of the ambient Hessian eigenvalues on the level-t set:
    shifted curvature terms plus the fixed pair +-g(g-1)."""
    tau = np.arccos(t) / g
    stretch = g * np.sqrt(1.0 - t * t)
    acc = 0.0
    for i in range(g):
        lam = 1.0 / np.tan(tau + i * np.pi / g)
        mult = m1 if i % 2 == 0 else m2
        acc += mult * (-stretch * lam + g * t) ** k
    acc += float(g**k) * float((g - 1) ** k) * (1.0 + (-1.0) ** k)
    return acc


def _central(fun, t: float, h: float) -> float:
    return (fun(t + h) - fun(t - h)) / (2.0 * h)


@dataclass(frozen=True)
class QkRecurrenceReport:
    max_residual: float
    max_residual_richardson: float


def qk_recurrence_check(
    g: int, m1: int, m2: int, t_samples, k_max: int = 6
) -> QkRecurrenceReport:
    """Residual of Q_{k+1} = (g/k) sqrt(1-t^2) dQ_k/dt - Q_{k-1} with a
    central difference (step FD_STEP) and its Richardson refinement."""
    if not 1 <= k_max <= 8:
        raise ValueError(f"k_max = {k_max} out of range [1, 8]")
    worst = 0.0
    worst_rich = 0.0
    for t in t_samples:
        t = float(t)
        if not -0.9 < t < 0.9:
            raise ValueError(f"t = {t} outside (-0.9, 0.9)")
        for k in range(1, k_max):
            qk = lambda s, kk=k: munzner_qk(g, m1, m2, s, kk)
            d_h = _central(qk, t, FD_STEP)
            d_h2 = _central(qk, t, FD_STEP / 2.0)
            d_rich = (4.0 * d_h2 - d_h) / 3.0
            lhs = munzner_qk(g, m1, m2, t, k + 1)
            base = munzner_qk(g, m1, m2, t, k - 1)
            factor = (g / k) * np.sqrt(1.0 - t * t)
            worst = max(worst, abs(lhs - (factor * d_h - base)))
            worst_rich = max(worst_rich, abs(lhs - (factor * d_rich - base)))
    return QkRecurrenceReport(worst, worst_rich)


@dataclass(frozen=True)
class RhobarReport:
    max_residual_odd: float  # Richardson-refined derivative
    max_residual_even: float
    plain_odd: float  # raw central difference at FD_STEP
    plain_even: float
    path_agreement: float
    seed_zero_error: float  # | rhobar_0 - (n + 2) |
    seed_one_error: float  # | rhobar_1 - (g^2/2)(m2 - m1) |


def rhobar_recurrence_check(
    P: IsoPolynomial, t_samples, k_max: int = 6, seed: int = 0
) -> RhobarReport:
    """Check the ambient-Hessian power sums along levels two ways.

    Path (a) is the analytic eigenvalue-list formula; path (b) evaluates
    rho_k of the actual Hessian at a point projected to each level. The
    first-order recurrence in t has source terms that alternate with the
    parity of k, so its residual is tracked per parity branch.
    """
    g, m1, m2 = P.g, P.m1, P.m2
    n = P.n
    x0 = regular_sphere_points(P, 1, seed)[0]
    worst = {("rich", 1): 0.0, ("rich", 0): 0.0, ("plain", 1): 0.0, ("plain", 0): 0.0}
    agree = 0.0
    seed0 = 0.0
    seed1 = 0.0
    for t in t_samples:
        t = float(t)
        y = level_project(P, x0, t).point
        hess = eval_hessian(P, y)
        for k in range(0, k_max + 1):
            path_a = munzner_rhobar(g, m1, m2, t, k)
            path_b = rho_k(hess, k)
            agree = max(agree, abs(path_a - path_b))
        seed0 = max(seed0, abs(munzner_rhobar(g, m1, m2, t, 0) - (n + 2.0)))
        seed1 = max(
            seed1,
            abs(munzner_rhobar(g, m1, m2, t, 1) - 0.5 * g * g * (m2 - m1)),
        )
        for k in range(1, k_max):
            rb = lambda s, kk=k: munzner_rhobar(g, m1, m2, s, kk)
            d_h = _central(rb, t, FD_STEP)
            d_h2 = _central(rb, t, FD_STEP / 2.0)
            d_rich = (4.0 * d_h2 - d_h) / 3.0
            source = 2.0 * float(g ** (k + 1)) * float((g - 1) ** k) * (g - 2.0)
            source *= 1.0 if k % 2 == 1 else t
            lhs = munzner_rhobar(g, m1, m2, t, k + 1)
            fixed = (
                -g * (g - 2.0) * t * munzner_rhobar(g, m1, m2, t, k)
                + g * g * (g - 1.0) * munzner_rhobar(g, m1, m2, t, k - 1)
                + source
            )
            for label, deriv in (("plain", d_h), ("rich", d_rich)):
                rhs = -(g * g / k) * (1.0 - t * t) * deriv + fixed
                key = (label, k % 2)
                worst[key] = max(worst[key], abs(lhs - rhs))
    return RhobarReport(
        max_residual_odd=worst[("rich", 1)],
        max_residual_even=worst[("rich", 0)],
        plain_odd=worst[("plain", 1)],
        plain_even=worst[("plain", 0)],
        path_agreement=agree,
        seed_zero_error=seed0,
        seed_one_error=seed1,
    )


@dataclass(frozen=True)
class LevelProjection:
    point: np.ndarray
    arc: float  # signed arc length moved along the normal great circle
    level_residual: float
    path_residual: float


def level_project(P: IsoPolynomial, x, t_target: float) -> LevelProjection:
    """Move x along its normal great circle to the level F = t_target.

    Root-finds F(cos s x + sin s nu) = t_target with Brent's method on the
    monotone arc, then verifies the landing level and, at 20 intermediate
    arcs, that the whole path follows cos(g (tau0 - s)).
    """
    x = np.asarray(x, dtype=float)
    if abs(t_target) > 1.0 - EPS_FOCAL:
        raise FocalPointError(
            f"target level {t_target} is inside the focal band", level=t_target
        )
    f0 = eval_F(P, x)
    if abs(f0) > 1.0 - EPS_FOCAL:
        raise FocalPointError(f"start level {f0:.6f} is focal", level=f0)
    df = eval_grad(P, x)
    grad_sph = df - P.g * f0 * x
    nu = grad_sph / np.linalg.norm(grad_sph)
    tau0 = np.arccos(f0) / P.g

    def along(s):
        y = np.cos(s) * x + np.sin(s) * nu
        return eval_F(P, y)

    lo = tau0 - np.pi / P.g + 1e-9
    hi = tau0 - 1e-9
    if (along(lo) - t_target) * (along(hi) - t_target) > 0.0:
        raise ProjectionError(
            f"level {t_target} not bracketed on the normal arc from f = {f0:.6f}"
        )
    arc = brentq(lambda s: along(s) - t_target, lo, hi, xtol=1e-14, rtol=8.9e-16)
    y = np.cos(arc) * x + np.sin(arc) * nu
    y /= np.linalg.norm(y)
    level_residual = abs(eval_F(P, y) - t_target)
    if level_residual > 1e-10:
        raise ProjectionError(
            f"projected level misses target by {level_residual:.3e}"
        )
    path_residual = 0.0
    for s in np.linspace(min(0.0, arc), max(0.0, arc), 20):
        predicted = np.cos(P.g * (tau0 - s))
        path_residual = max(path_residual, abs(along(s) - predicted))
    return LevelProjection(
        point=y, arc=float(arc),
        level_residual=float(level_residual), path_residual=float(path_residual),
    )


def transnormal_residuals(P: IsoPolynomial, x):
    """Residuals of the spherical profile equations at unit x:
    (|grad f|^2 - b(f),  Delta f - a(f))."""
    frame = frame_at(P, x)
    prof = profile_of(P)
    res_grad = frame.grad_norm**2 - prof.b(frame.f)
    res_lap = frame.hessian_sph.trace() - prof.a(frame.f)
    return float(res_grad), float(res_lap)


def write_recurrence_csv(path, g, m1, m2, t_values, k_max=6):
    """Table of (t, Q_1..Q_kmax, rhobar_0..rhobar_kmax), 17 significant digits."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        header = (
            ["t"]
            + [f"Q{k}" for k in range(1, k_max + 1)]
            + [f"rhobar{k}" for k in range(0, k_max + 1)]
        )
        writer.writerow(header)
        for t in t_values:
            t = float(t)
            row = [t]
            row += [munzner_qk(g, m1, m2, t, k) for k in range(1, k_max + 1)]
            row += [munzner_rhobar(g, m1, m2, t, k) for k in range(0, k_max + 1)]
            writer.writerow([f"{value:.17g}" for value in row])
