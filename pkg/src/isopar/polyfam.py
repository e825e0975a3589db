"""The two isoparametric polynomial families and their differential data.

Degree-4 family from a symmetric Clifford system on R^(2r):
    F(z) = |z|^4 - 2 sum_p <A_p z, z>^2,  g = 4, multiplicities (m, r-m-1).

Degree-3 family on R^(3m+2) for algebra dimension m in {1, 2, 4, 8}
(reals, complexes, quaternions, octonions), coordinates x = (u, v, X, Y, Z):
    F = u^3 - 3 u v^2 + (3/2) u (|X|^2 + |Y|^2 - 2|Z|^2)
        + (3 sqrt3 / 2) v (|X|^2 - |Y|^2) + 3 sqrt3 Re((X Y) Z),
    g = 3, multiplicities (m, m).

Each family carries a closed-form evaluation path and an exact monomial form;
the two are cross-checked at construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clifford import (
    TAG_OZEKI_TAKEUCHI,
    TAG_STANDARD,
    CliffordSystem,
    build_ozeki_takeuchi_system,
    build_standard_system,
)
from .errors import ConstructionError, FocalPointError
from .monomials import MonomialForm, norm_square_form, quadratic_form
from .symmat import SymmetricMatrix, rho_k, sigma_k

XCHECK_SEED = 20240817
XCHECK_POINTS = 100
XCHECK_TOL = 1e-10

CARTAN_ALGEBRA_DIMS = (1, 2, 4, 8)


def cd_conj(a):
    """Cayley-Dickson conjugate on R^1, R^2, R^4, R^8."""
    out = -np.asarray(a, dtype=float)
    out[0] = -out[0]
    return out


def cd_mult(a, b):
    """Cayley-Dickson product; doubling rule (a1,a2)(b1,b2) =
    (a1 b1 - conj(b2) a2, b2 a1 + a2 conj(b1))."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = len(a)
    if d == 1:
        return a * b
    h = d // 2
    a1, a2 = a[:h], a[h:]
    b1, b2 = b[:h], b[h:]
    return np.concatenate(
        [
            cd_mult(a1, b1) - cd_mult(cd_conj(b2), a2),
            cd_mult(b2, a1) + cd_mult(a2, cd_conj(b1)),
        ]
    )


def _cartan_eval_closed(m, x):
    u, v = x[0], x[1]
    X = x[2 : 2 + m]
    Y = x[2 + m : 2 + 2 * m]
    Z = x[2 + 2 * m :]
    xx = float(X @ X)
    yy = float(Y @ Y)
    zz = float(Z @ Z)
    tri = float(cd_mult(cd_mult(X, Y), Z)[0])
    s3 = np.sqrt(3.0)
    return (
        u**3
        - 3.0 * u * v**2
        + 1.5 * u * (xx + yy - 2.0 * zz)
        + 1.5 * s3 * v * (xx - yy)
        + 3.0 * s3 * tri
    )


def _cartan_monomials(m):
    nvars = 3 * m + 2
    s3 = np.sqrt(3.0)

    def mono(**powers):
        expo = [0] * nvars
        for idx, e in powers.items():
            expo[int(idx)] += e
        return tuple(expo)

    def term(*pairs):
        expo = [0] * nvars
        for idx, e in pairs:
            expo[idx] += e
        return tuple(expo)

    f = MonomialForm(nvars)
    f.add(term((0, 3)), 1.0)
    f.add(term((0, 1), (1, 2)), -3.0)
    for a in range(m):
        ix, iy, iz = 2 + a, 2 + m + a, 2 + 2 * m + a
        f.add(term((0, 1), (ix, 2)), 1.5)
        f.add(term((0, 1), (iy, 2)), 1.5)
        f.add(term((0, 1), (iz, 2)), -3.0)
        f.add(term((1, 1), (ix, 2)), 1.5 * s3)
        f.add(term((1, 1), (iy, 2)), -1.5 * s3)
    # Trilinear part: 3 sqrt3 Re((X Y) Z). Structure constants come from the
    # algebra itself: e_a e_b = sign * e_c, and Re(e_c e_c') pairs c with
    # itself, +1 for the real unit and -1 for imaginary ones.
    basis = np.eye(m)
    for a in range(m):
        for b in range(m):
            prod = cd_mult(basis[a], basis[b])
            c = int(np.argmax(np.abs(prod)))
            sign = float(prod[c])
            pairing = 1.0 if c == 0 else -1.0
            f.add(
                term((2 + a, 1), (2 + m + b, 1), (2 + 2 * m + c, 1)),
                3.0 * s3 * sign * pairing,
            )
    return f


def _fkm_monomials(system: CliffordSystem):
    dim = system.dim
    sq = norm_square_form(dim)
    f = sq * sq
    for a in system.generators:
        q = quadratic_form(a)
        f = f - 2.0 * (q * q)
    return f


class IsoPolynomial:
    """One family member with cross-checked closed and monomial forms.

    Immutable after construction. Fields: family ('fkm' | 'cartan'), g,
    m1, m2, ambient_dim, n = ambient_dim - 2, plus the family payload
    (Clifford system or algebra dimension).
    """

    def __init__(self, family, *, system=None, algebra_dim=None):
        if family == "fkm":
            if system is None:
                raise ConstructionError("fkm family needs a Clifford system")
            r = system.dim // 2
            m2 = r - system.m - 1
            if m2 <= 0:
                raise ConstructionError(
                    f"multiplicity r - m - 1 = {m2} must be positive "
                    f"(r = {r}, m = {system.m})"
                )
            self.g = 4
            self.m1 = system.m
            self.m2 = m2
            self.ambient_dim = system.dim
            self.system = system
            self.algebra_dim = None
            mono = _fkm_monomials(system)
        elif family == "cartan":
            if algebra_dim not in CARTAN_ALGEBRA_DIMS:
                raise ConstructionError(
                    f"algebra dimension must be one of {CARTAN_ALGEBRA_DIMS}, "
                    f"got {algebra_dim}"
                )
            self.g = 3
            self.m1 = self.m2 = algebra_dim
            self.ambient_dim = 3 * algebra_dim + 2
            self.system = None
            self.algebra_dim = algebra_dim
            mono = _cartan_monomials(algebra_dim)
        else:
            raise ValueError(f"unknown family {family!r}")
        self.family = family
        self.n = self.ambient_dim - 2
        self._mono = mono
        self._grad_forms = tuple(mono.partial(i) for i in range(self.ambient_dim))
        self._hess_forms = {
            (i, j): self._grad_forms[i].partial(j)
            for i in range(self.ambient_dim)
            for j in range(i, self.ambient_dim)
        }
        self._construction_check()

    def _construction_check(self):
        rng = np.random.default_rng(XCHECK_SEED)
        lams = rng.uniform(0.5, 2.0, size=XCHECK_POINTS)
        for k in range(XCHECK_POINTS):
            x = rng.standard_normal(self.ambient_dim)
            x *= 1.5 / max(1.0, np.linalg.norm(x))
            closed = eval_F(self, x)
            mono = self._mono(x)
            if abs(closed - mono) > XCHECK_TOL * max(1.0, abs(closed)):
                raise ConstructionError(
                    f"closed and monomial forms disagree by {abs(closed - mono):.3e}"
                )
            lam = lams[k]
            scaled = eval_F(self, lam * x)
            target = lam**self.g * closed
            if abs(scaled - target) > XCHECK_TOL * max(1.0, abs(target)):
                raise ConstructionError(
                    f"homogeneity violated by {abs(scaled - target):.3e} at lambda={lam}"
                )

    def __repr__(self):
        if self.family == "fkm":
            return (
                f"IsoPolynomial(fkm, dim={self.ambient_dim}, "
                f"m=({self.m1},{self.m2}), tag={self.system.tag})"
            )
        return f"IsoPolynomial(cartan, algebra_dim={self.algebra_dim})"


def make_cartan(m: int) -> IsoPolynomial:
    return IsoPolynomial("cartan", algebra_dim=m)


def make_fkm(m: int, r: int) -> IsoPolynomial:
    return IsoPolynomial("fkm", system=build_standard_system(m, r))


def make_ot(r: int) -> IsoPolynomial:
    return IsoPolynomial("fkm", system=build_ozeki_takeuchi_system(r))


def _check_point(P: IsoPolynomial, x):
    x = np.asarray(x, dtype=float)
    if x.shape != (P.ambient_dim,):
        raise ValueError(f"point has shape {x.shape}, expected ({P.ambient_dim},)")
    return x


def eval_F(P: IsoPolynomial, x) -> float:
    """Closed-form value of F at x."""
    x = _check_point(P, x)
    if P.family == "fkm":
        z2 = float(x @ x)
        qsum = 0.0
        for a in P.system.generators:
            q = float(x @ (a @ x))
            qsum += q * q
        return z2 * z2 - 2.0 * qsum
    return _cartan_eval_closed(P.algebra_dim, x)


def eval_F_monomial(P: IsoPolynomial, x) -> float:
    """Monomial-form value of F; exact alternate route to eval_F."""
    return P._mono(_check_point(P, x))


def eval_grad(P: IsoPolynomial, x) -> np.ndarray:
    """Ambient gradient DF. Closed form for the quartic family, exact
    monomial differentiation for the cubic family."""
    x = _check_point(P, x)
    if P.family == "fkm":
        z2 = float(x @ x)
        acc = z2 * x.copy()
        for a in P.system.generators:
            az = a @ x
            acc -= 2.0 * float(x @ az) * az
        return 4.0 * acc
    return np.array([form(x) for form in P._grad_forms])


def eval_grad_monomial(P: IsoPolynomial, x) -> np.ndarray:
    x = _check_point(P, x)
    return np.array([form(x) for form in P._grad_forms])


def eval_hessian(P: IsoPolynomial, x) -> SymmetricMatrix:
    """Ambient Hessian D^2 F as a SymmetricMatrix."""
    x = _check_point(P, x)
    if P.family == "fkm":
        dim = P.ambient_dim
        z2 = float(x @ x)
        h = z2 * np.eye(dim) + 2.0 * np.outer(x, x)
        for a in P.system.generators:
            az = a @ x
            h -= 2.0 * float(x @ az) * a
            h -= 4.0 * np.outer(az, az)
        return SymmetricMatrix(4.0 * h)
    return eval_hessian_monomial(P, x)


def eval_hessian_monomial(P: IsoPolynomial, x) -> SymmetricMatrix:
    x = _check_point(P, x)
    dim = P.ambient_dim
    h = np.zeros((dim, dim))
    for (i, j), form in P._hess_forms.items():
        value = form(x)
        h[i, j] = value
        h[j, i] = value
    return SymmetricMatrix(h)


@dataclass(frozen=True)
class TransnormalProfile:
    """The profile functions of the spherical restriction f = F|_{S}:
    |grad f|^2 = b(f), Delta f = a(f)."""

    g: int
    n: int
    m1: int
    m2: int

    def b(self, f: float) -> float:
        return self.g**2 * (1.0 - f * f)

    def b_prime(self, f: float) -> float:
        return -2.0 * self.g**2 * f

    def a(self, f: float) -> float:
        return 0.5 * self.g**2 * (self.m2 - self.m1) - self.g * (self.n + self.g) * f


def profile_of(P: IsoPolynomial) -> TransnormalProfile:
    return TransnormalProfile(g=P.g, n=P.n, m1=P.m1, m2=P.m2)


def cm_residuals(P: IsoPolynomial, x):
    """Residuals of the two defining differential equations at ambient x:
    (|DF|^2 - g^2 |x|^(2g-2),  tr D^2F - (g^2/2)(m2 - m1) |x|^(g-2))."""
    x = _check_point(P, x)
    radius = float(np.linalg.norm(x))
    if radius == 0.0:
        raise ValueError("x must be nonzero")
    grad = eval_grad(P, x)
    g = P.g
    res_grad = float(grad @ grad) - g * g * radius ** (2 * g - 2)
    res_lap = float(np.trace(eval_hessian(P, x).entries)) - 0.5 * g * g * (
        P.m2 - P.m1
    ) * radius ** (g - 2)
    return res_grad, res_lap


def delta_k(P: IsoPolynomial, x, k: int) -> float:
    """k-th elementary symmetric function of the ambient Hessian at x."""
    if not 1 <= k <= P.ambient_dim:
        raise ValueError(f"k = {k} out of range [1, {P.ambient_dim}]")
    return sigma_k(eval_hessian(P, x), k)


def hidden_rho_residual(P: IsoPolynomial, x, k: int) -> float:
    """Residual of the closed form for rho_k(D^2 F), k in {2, 3, 4}.

    The k = 4 expression is stated for n >= 4; for smaller families it is
    evaluated exactly as written and the residual simply reported.
    """
    x = _check_point(P, x)
    r = float(np.linalg.norm(x))
    if r == 0.0:
        raise ValueError("x must be nonzero")
    g, n = float(P.g), float(P.n)
    dm = float(P.m2 - P.m1)
    F = eval_F(P, x)
    direct = rho_k(eval_hessian(P, x), k)
    if k == 2:
        closed = -(g**3 / 2.0) * (g - 2.0) * dm * F * r ** (g - 4) + g * g * (
            g - 1.0
        ) * (n + 2.0 * g - 2.0) * r ** (2 * g - 4)
    elif k == 3:
        closed = (
            (g**4 / 4.0) * (g - 2.0) * (g - 4.0) * dm * F * F * r ** (g - 6)
            - n * g**3 * (g - 1.0) * (g - 2.0) * F * r ** (2 * g - 6)
            + (g**4 / 4.0) * (g * g - 2.0) * dm * r ** (3 * g - 6)
        )
    elif k == 4:
        closed = (
            -(g**5 / 12.0) * (g - 2.0) * (g - 4.0) * (g - 6.0) * dm * F**3 * r ** (g - 8)
            + (2.0 * n / 3.0) * g**4 * (g - 1.0) * (g - 2.0) * (g - 3.0) * F * F
            * r ** (2 * g - 8)
            - (g**5 / 12.0) * (g - 2.0) * (5.0 * g * g - 2.0 * g - 12.0) * dm * F
            * r ** (3 * g - 8)
            + ((n / 3.0) * g**4 * (g - 1.0) * (g * g + g - 3.0)
               + 2.0 * g**4 * (g - 1.0) ** 4) * r ** (4 * g - 8)
        )
    else:
        raise ValueError(f"closed forms available for k in (2, 3, 4), got {k}")
    return float(direct - closed)


def delta_H_convert(values, profile: TransnormalProfile, f: float, direction: str):
    """Convert between level-set Hessian sigmas (Delta_1 f .. Delta_j f) and
    normalized mean curvatures (H_1 .. H_j) at level f.

    direction 'to_delta' maps H-values to Delta-values via
        Delta_j = (-sqrt b)^j H_j + (-sqrt b)^(j-1) (b'/2) H_(j-1),  H_0 = 1;
    direction 'to_H' inverts with
        H_j = ( sum_i (-1)^i 2^i b'^(j-i) Delta_i + b'^j ) / (2 sqrt b)^j.
    Levels with b(f) <= 0 are focal and rejected.
    """
    b = profile.b(f)
    if b <= 0.0:
        raise FocalPointError(f"b(f) = {b:.3e} <= 0 at level f = {f}", level=f)
    bp = profile.b_prime(f)
    sb = np.sqrt(b)
    vals = [float(v) for v in values]
    j_max = len(vals)
    if direction == "to_delta":
        h = [1.0] + vals
        return [
            (-sb) ** j * h[j] + (-sb) ** (j - 1) * (bp / 2.0) * h[j - 1]
            for j in range(1, j_max + 1)
        ]
    if direction == "to_H":
        out = []
        for j in range(1, j_max + 1):
            acc = sum(
                (-1.0) ** i * 2.0**i * bp ** (j - i) * vals[i - 1]
                for i in range(1, j + 1)
            )
            out.append((acc + bp**j) / (2.0 * sb) ** j)
        return out
    raise ValueError(f"direction must be 'to_H' or 'to_delta', got {direction!r}")


def to_descriptor(P: IsoPolynomial) -> dict:
    """JSON-ready description from which the polynomial can be rebuilt
    bit-identically."""
    if P.family == "cartan":
        return {"family": "cartan", "algebra_dim": P.algebra_dim}
    if P.system.tag == TAG_STANDARD:
        return {
            "family": "fkm",
            "construction": TAG_STANDARD,
            "m": P.system.m,
            "r": P.system.dim // 2,
        }
    return {
        "family": "fkm",
        "construction": TAG_OZEKI_TAKEUCHI,
        "r": (P.system.dim - 8) // 8,
    }


def from_descriptor(desc: dict) -> IsoPolynomial:
    family = desc.get("family")
    if family == "cartan":
        return make_cartan(int(desc["algebra_dim"]))
    if family == "fkm":
        construction = desc.get("construction", TAG_STANDARD)
        if construction == TAG_STANDARD:
            return make_fkm(int(desc["m"]), int(desc["r"]))
        if construction == TAG_OZEKI_TAKEUCHI:
            return make_ot(int(desc["r"]))
        raise ValueError(f"unknown construction {construction!r}")
    raise ValueError(f"unknown family {family!r}")
