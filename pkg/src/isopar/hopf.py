"""Circle-action invariants of the quartic family.

For a complex structure J commuting suitably with the Clifford system, F is
invariant under z -> cos(theta) z + sin(theta) J z. This module measures
that invariance, computes the quartic form Omega = DF^T J D^2F J DF and the
vertical curvature alpha it determines, exposes the shape operator in the
adapted complex frame (where the J x direction carries an exact -1 link to
J nu), and decomposes J x over the curvature eigenspaces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clifford import ComplexStructure, TAG_OZEKI_TAKEUCHI, TAG_STANDARD, J_BLOCK, J_LEFT, J_RIGHT
from .errors import (
    FocalPointError,
    InvarianceError,
    SpectralGapError,
    UnsupportedPairError,
)
from .polyfam import IsoPolynomial, eval_F, eval_grad, eval_hessian
from .spherelevel import (
    EPS_FOCAL,
    frame_at,
    level_project,
    orthonormal_complement,
    regular_sphere_points,
)
from .symmat import CLUSTER_TOL, SymmetricMatrix, eigh_jacobi, vandermonde_solve

INVARIANCE_TOL = 1e-9
CONTEXT_CHECK_SAMPLES = 50
CONTEXT_CHECK_SEED = 911


def _j_matrix(J):
    return J.matrix if isinstance(J, ComplexStructure) else np.asarray(J, dtype=float)


def s1_invariance_residual(P: IsoPolynomial, J, samples=50, seed=0) -> float:
    """Max |F(cos t z + sin t Jz) - F(z)| over seeded (z, theta) pairs."""
    jm = _j_matrix(J)
    if jm.shape != (P.ambient_dim, P.ambient_dim):
        raise ValueError("J has the wrong dimension for this family")
    worst = 0.0
    for i in range(samples):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i,)))
        z = rng.standard_normal(P.ambient_dim)
        z /= np.linalg.norm(z)
        theta = rng.uniform(0.0, 2.0 * np.pi)
        w = np.cos(theta) * z + np.sin(theta) * (jm @ z)
        worst = max(worst, abs(eval_F(P, w) - eval_F(P, z)))
    return worst


class HopfContext:
    """A family member paired with a complex structure it is invariant under.

    Construction verifies the circle invariance at CONTEXT_CHECK_SAMPLES
    seeded (z, theta) pairs and refuses non-invariant pairs.
    """

    def __init__(self, P: IsoPolynomial, J: ComplexStructure):
        if not isinstance(J, ComplexStructure):
            raise TypeError("J must be a ComplexStructure")
        if J.dim != P.ambient_dim:
            raise ValueError(
                f"dimension mismatch: family {P.ambient_dim}, J {J.dim}"
            )
        residual = s1_invariance_residual(
            P, J, samples=CONTEXT_CHECK_SAMPLES, seed=CONTEXT_CHECK_SEED
        )
        if residual > INVARIANCE_TOL:
            raise InvarianceError(
                f"F is not invariant under this circle action "
                f"(residual {residual:.3e})"
            )
        self.P = P
        self.J = J
        self.g = P.g


def omega_direct(ctx: HopfContext, x) -> float:
    """Omega = DF^T J D^2F J DF, evaluated from the raw derivatives."""
    jm = ctx.J.matrix
    df = eval_grad(ctx.P, x)
    hess = eval_hessian(ctx.P, x).entries
    return float(df @ jm @ hess @ (jm @ df))


def omega_closed_form(ctx: HopfContext, x, form: str = "auto") -> float:
    """Closed form of Omega for the supported (system, J) pairs.

    form = 'reduced' insists on the short m = 1 / m = 2 block expressions,
    'general' on the full standard-block formula; 'auto' picks the most
    specific one available. Unsupported combinations raise
    UnsupportedPairError.
    """
    P = ctx.P
    if P.family != "fkm" or P.system is None:
        raise UnsupportedPairError("closed forms exist for the quartic family only")
    system = P.system
    jm = ctx.J.matrix
    z = np.asarray(x, dtype=float)
    F = eval_F(P, z)
    qs = [float(z @ (a @ z)) for a in system.generators]
    if system.tag == TAG_STANDARD and ctx.J.tag == J_BLOCK:
        m = system.m
        if form in ("auto", "reduced") and m == 1:
            return 64.0 * (-2.0 * F * F - F + 2.0)
        if form in ("auto", "reduced") and m == 2:
            return 64.0 * (-2.0 * F * F - F + 2.0 - 8.0 * (1.0 + F) * qs[2] ** 2)
        if form == "reduced":
            raise UnsupportedPairError(f"no reduced block expression for m = {m}")
        acc = 2.0 * F * F - F - 2.0 + 8.0 * (1.0 + F) * (qs[0] ** 2 + qs[1] ** 2)
        for q in range(2, m + 1):
            inner = sum(
                qs[p] * float(z @ (system.generators[q] @ (jm @ (system.generators[p] @ z))))
                for p in range(2, m + 1)
            )
            acc += 16.0 * inner * inner
        return 64.0 * acc
    if system.tag == TAG_OZEKI_TAKEUCHI and form != "auto":
        # the two quaternion-block expressions are recorded per structure,
        # not as reduced/general variants of the standard-block formula
        raise UnsupportedPairError(
            f"form {form!r} does not apply to {system.tag}; use 'auto'"
        )
    if system.tag == TAG_OZEKI_TAKEUCHI and ctx.J.tag == J_RIGHT:
        acc = 2.0 * F * F - F - 2.0
        for q in range(4):
            inner = sum(
                qs[p] * float((jm @ (system.generators[q] @ z)) @ (system.generators[p] @ z))
                for p in range(4)
            )
            acc += 16.0 * inner * inner
        return 64.0 * acc
    if system.tag == TAG_OZEKI_TAKEUCHI and ctx.J.tag == J_LEFT:
        a0, a1 = system.generators[0], system.generators[1]
        cross = float(z @ (a0 @ (jm @ (a1 @ z))))
        acc = (
            2.0 * F * F - F - 2.0
            + 8.0 * (1.0 + F) * (qs[2] ** 2 + qs[3] ** 2)
            + 16.0 * (qs[0] ** 2 + qs[1] ** 2) * cross * cross
        )
        return 64.0 * acc
    raise UnsupportedPairError(
        f"no closed form for ({system.tag}, {ctx.J.tag})"
    )


@dataclass(frozen=True)
class AlphaPair:
    """alpha from the Omega formula and from the shape operator directly."""

    closed: float
    geometric: float

    @property
    def value(self) -> float:
        return self.closed

    @property
    def difference(self) -> float:
        return abs(self.closed - self.geometric)


def alpha_at(ctx: HopfContext, x) -> AlphaPair:
    """Vertical curvature alpha = <S Jnu, Jnu> at unit x on a regular level.

    Closed path: alpha = (g^3 F (3 - 2F^2) + Omega) / (g^3 (1 - F^2)^(3/2)).
    Geometric path: -H_f(Jnu, Jnu) / |grad f| from the raw Hessian.
    """
    P = ctx.P
    x = np.asarray(x, dtype=float)
    F = eval_F(P, x)
    if abs(F) > 1.0 - EPS_FOCAL:
        raise FocalPointError(f"level {F:.6f} is focal", level=F)
    g = float(P.g)
    omega = omega_direct(ctx, x)
    closed = (g**3 * F * (3.0 - 2.0 * F * F) + omega) / (
        g**3 * (1.0 - F * F) ** 1.5
    )
    df = eval_grad(P, x)
    grad_sph = df - g * F * x
    grad_norm = float(np.linalg.norm(grad_sph))
    nu = grad_sph / grad_norm
    jnu = ctx.J.matrix @ nu
    hess = eval_hessian(P, x).entries
    hf_vert = float(jnu @ hess @ jnu) - g * F
    geometric = -hf_vert / grad_norm
    return AlphaPair(closed=float(closed), geometric=float(geometric))


@dataclass(frozen=True)
class HopfBlocks:
    """Shape operator in the frame (e_1..e_(n-2), Jnu, Jx) and the residuals
    of its forced structure: S Jx = -Jnu, zero (Jx, Jx) corner, zero
    couplings between Jx and the horizontal block."""

    s_full: SymmetricMatrix
    s_tilde: SymmetricMatrix
    sjx_residual: float
    corner_residual: float
    offblock_residual: float
    link_residual: float


def hopf_blocks(ctx: HopfContext, x) -> HopfBlocks:
    P = ctx.P
    x = np.asarray(x, dtype=float)
    frame = frame_at(P, x)
    jm = ctx.J.matrix
    jx = jm @ x
    jnu = jm @ frame.nu
    if abs(float(jx @ frame.nu)) > 1e-8:
        raise InvarianceError(
            "J x is not tangent to the level set; frame is degenerate here"
        )
    rest = orthonormal_complement(
        np.vstack([x, frame.nu, jnu, jx]), P.ambient_dim
    )
    rows = np.vstack([rest, jnu, jx])
    hess = eval_hessian(P, x).entries
    hf = rows @ hess @ rows.T - P.g * frame.f * np.eye(rows.shape[0])
    s = -hf / frame.grad_norm
    n = s.shape[0]
    expected_col = np.zeros(n)
    expected_col[n - 2] = -1.0  # S Jx = -Jnu
    sjx = float(np.linalg.norm(s[:, n - 1] - expected_col))
    return HopfBlocks(
        s_full=SymmetricMatrix(s),
        s_tilde=SymmetricMatrix(s[: n - 1, : n - 1]),
        sjx_residual=sjx,
        corner_residual=abs(float(s[n - 1, n - 1])),
        offblock_residual=float(np.max(np.abs(s[: n - 2, n - 1]))),
        link_residual=abs(float(s[n - 2, n - 1]) + 1.0),
    )


@dataclass(frozen=True)
class HopfDecomposition:
    """Weights of Jx over the curvature eigenspaces: Jx = sum phi_i eps_i.

    phi_sq holds the squared weights from direct eigenprojection;
    phi_sq_moment holds the alternate route solving the moment system
    (1, 0, 1, alpha) on the curvature nodes (g = 2 closed form, g = 4
    Vandermonde solve, None otherwise). l counts weights above CLUSTER_TOL.
    """

    point: np.ndarray
    lambdas: tuple
    phi_sq: tuple
    phi_sq_moment: tuple | None
    route_difference: float
    l: int
    alpha: float
    moment_residuals: tuple  # deviations of (sum phi^2, sum lam phi^2 - 0, ...)


def phi_decomposition(ctx: HopfContext, x) -> HopfDecomposition:
    P = ctx.P
    x = np.asarray(x, dtype=float)
    frame = frame_at(P, x)
    w, vecs = eigh_jacobi(frame.shape.entries)
    groups = []
    start = 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i - 1] - w[i] > CLUSTER_TOL:
            groups.append((start, i))
            start = i
    if len(groups) != P.g:
        raise SpectralGapError(
            f"expected {P.g} curvature clusters, found {len(groups)}"
        )
    jx = ctx.J.matrix @ x
    coords = vecs.T @ (frame.tangent_basis @ jx)
    lambdas = tuple(float(np.mean(w[a:b])) for a, b in groups)
    phi_sq = tuple(float(np.sum(coords[a:b] ** 2)) for a, b in groups)
    alpha = alpha_at(ctx, x).closed
    if P.g == 2:
        lam1, lam2 = lambdas
        phi_m = (-lam2 / (lam1 - lam2), lam1 / (lam1 - lam2))
    elif P.g == 4:
        phi_m = tuple(
            float(v) for v in vandermonde_solve(lambdas, [1.0, 0.0, 1.0, alpha])
        )
    else:
        phi_m = None
    diff = (
        max(abs(a - b) for a, b in zip(phi_sq, phi_m)) if phi_m is not None else 0.0
    )
    lam = np.array(lambdas)
    phi = np.array(phi_sq)
    moment_residuals = (
        abs(float(phi.sum()) - 1.0),
        abs(float(lam @ phi)),
        abs(float(lam**2 @ phi) - 1.0),
        abs(float(lam**3 @ phi) - alpha),
    )
    return HopfDecomposition(
        point=x,
        lambdas=lambdas,
        phi_sq=phi_sq,
        phi_sq_moment=phi_m,
        route_difference=float(diff),
        l=int(sum(1 for p in phi_sq if p > CLUSTER_TOL)),
        alpha=float(alpha),
        moment_residuals=moment_residuals,
    )


def witness_points(P: IsoPolynomial):
    """The two reference points on F = 0 where Omega takes the values +128
    and -128 (quartic families with a known closed form only)."""
    if P.family != "fkm" or P.system is None:
        raise UnsupportedPairError("reference points exist for the quartic family")
    dim = P.ambient_dim
    if P.system.tag == TAG_STANDARD and P.system.m == 2:
        r = dim // 2
        if r % 2:
            raise UnsupportedPairError("reference points need an even block size r")
        half = r // 2
        z_plus = np.zeros(dim)
        z_plus[0] = 1.0 / np.sqrt(2.0)
        z_plus[r] = 0.5
        z_plus[r + 1] = 0.5
        z_minus = np.zeros(dim)
        z_minus[0] = 1.0 / np.sqrt(2.0)
        z_minus[r + half] = 0.5
        z_minus[r + half + 1] = 0.5
        return z_plus, z_minus
    if P.system.tag == TAG_OZEKI_TAKEUCHI:
        half = dim // 2
        c_plus = 0.5 * np.sqrt(2.0 + np.sqrt(2.0))
        c_minus = 0.5 * np.sqrt(2.0 - np.sqrt(2.0))
        z_plus = np.zeros(dim)
        z_plus[0] = c_plus
        z_plus[half] = c_minus
        z_minus = np.zeros(dim)
        z_minus[0] = c_plus / np.sqrt(2.0)
        z_minus[half] = c_plus / np.sqrt(2.0)
        z_minus[half + 4] = c_minus
        return z_plus, z_minus
    raise UnsupportedPairError(
        f"no reference points recorded for ({P.system.tag}, m = {P.system.m})"
    )


@dataclass(frozen=True)
class AlphaSample:
    index: int
    level: float
    alpha: float
    omega: float
    l: int


def alpha_scan(ctx: HopfContext, level: float, samples: int, seed: int):
    """alpha, Omega and the weight count l at `samples` points projected to
    the given level. Returns (records, summary stats of alpha)."""
    P = ctx.P
    pts = regular_sphere_points(P, samples, seed, f_bound=0.85)
    records = []
    for i, p in enumerate(pts):
        y = level_project(P, p, level).point
        pair = alpha_at(ctx, y)
        try:
            count = phi_decomposition(ctx, y).l
        except SpectralGapError:
            count = -1
        records.append(
            AlphaSample(
                index=i,
                level=level,
                alpha=pair.closed,
                omega=omega_direct(ctx, y),
                l=count,
            )
        )
    alphas = np.array([rec.alpha for rec in records])
    summary = {
        "min": float(alphas.min()),
        "max": float(alphas.max()),
        "mean": float(alphas.mean()),
        "std": float(alphas.std()),
    }
    return records, summary
