"""Command line front end: verification suites with JSON reports.

Every subcommand prints a single JSON document (schema "isopar-report/1")
to stdout or --out FILE.  Detail rows carry the tolerance they were judged
against; rows with tolerance null are informational and do not gate the
exit code.  Exit codes: 0 all gated checks passed, 1 at least one failed,
2 usage or construction error (the error is still reported as JSON).

Determinism: identical (command, params, seed) produce byte-identical
report bodies.  No timestamps, no machine identifiers.  ISOPAR_SEED in
the environment overrides --seed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .clifford import (
    J_BLOCK,
    J_LEFT,
    J_RIGHT,
    TAG_OZEKI_TAKEUCHI,
    TAG_STANDARD,
    build_complex_structure,
)
from .errors import (
    BlowUpError,
    ConstructionError,
    FocalPointError,
    InvarianceError,
    IsoparError,
    ProjectionError,
    UnsupportedPairError,
)
from .hopf import HopfContext, alpha_scan, omega_direct, witness_points
from .polyfam import (
    IsoPolynomial,
    cm_residuals,
    delta_k,
    eval_F,
    hidden_rho_residual,
    make_cartan,
    make_fkm,
    make_ot,
)
from .riccati import (
    check_gamma_recurrence,
    check_moment_chain,
    check_power_sum_recurrence,
    evolve_closed,
    evolve_numeric,
    moment_to_spectrum_evolution,
    q_moment,
    rank_one,
    riccati_family,
    space_form,
    write_trajectory_csv,
)
from .spherelevel import (
    frame_at,
    level_project,
    munzner_check,
    regular_sphere_points,
    transnormal_residuals,
    write_recurrence_csv,
)

SCHEMA = "isopar-report/1"
GENERATOR = "PCG64"
DEFAULT_SEED = 2024

J_CHOICES = {"block": J_BLOCK, "right-i": J_RIGHT, "left-i": J_LEFT}

# Default gate tolerances, one per suite; every detail row repeats the
# value it was actually judged against.
TOL_CM = 1e-8
TOL_HIDDEN = 1e-8
TOL_WITNESS = 1e-9
TOL_SPECTRUM = 1e-6
TOL_RICCATI_EVOLVE = 1e-8
TOL_RICCATI_LEMMA = 1e-9
TOL_RICCATI_CHAIN = 1e-8
TOL_RICCATI_ROUNDTRIP = 1e-6


@dataclass(frozen=True)
class CheckRecord:
    """One named residual judged against one tolerance.

    tolerance None marks an informational row: reported, never gated.
    """

    name: str
    residual: float
    tolerance: float | None
    ref: str

    @property
    def passed(self) -> bool:
        return self.tolerance is None or self.residual <= self.tolerance


@dataclass
class SuiteReport:
    command: str
    params: dict
    seed: int
    samples: int
    details: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def add(self, name, residual, tolerance, ref):
        self.details.append(
            CheckRecord(name, float(residual), tolerance, ref)
        )

    @property
    def passed(self) -> bool:
        return all(rec.passed for rec in self.details)

    @property
    def max_residual(self) -> float:
        gated = [rec.residual for rec in self.details if rec.tolerance is not None]
        return max(gated) if gated else 0.0


def _json_float(value):
    # json.dumps(allow_nan=False) refuses inf/nan; encode them as strings
    # so failure reports stay well-formed.
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    return value


def report_body(report: SuiteReport) -> str:
    doc = {
        "schema": SCHEMA,
        "command": report.command,
        "params": {k: report.params[k] for k in sorted(report.params)},
        "seed": report.seed,
        "generator": GENERATOR,
        "samples": report.samples,
        "max_residual": _json_float(report.max_residual),
        "pass": report.passed,
        "details": [
            {
                "name": rec.name,
                "residual": _json_float(rec.residual),
                "tolerance": rec.tolerance,
                "ref": rec.ref,
            }
            for rec in report.details
        ],
    }
    if report.notes:
        doc["notes"] = report.notes
    doc.update(report.extra)
    return json.dumps(doc, indent=2, allow_nan=False)


def error_body(command: str, exc: Exception) -> str:
    doc = {
        "schema": SCHEMA,
        "command": command,
        "error": {"type": type(exc).__name__, "message": str(exc)},
        "pass": False,
    }
    return json.dumps(doc, indent=2, allow_nan=False)


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w") as handle:
            handle.write(text + "\n")
    else:
        print(text)


def _resolve_seed(args) -> int:
    env = os.environ.get("ISOPAR_SEED")
    if env is not None:
        return int(env)
    return args.seed


def _build_family(args) -> IsoPolynomial:
    if args.family == "cartan":
        if args.m is None:
            raise ConstructionError("cartan needs --m (1, 2, 4 or 8)")
        return make_cartan(args.m)
    if args.family == "fkm":
        if args.m is None or args.r is None:
            raise ConstructionError("fkm needs --m and --r")
        return make_fkm(args.m, args.r)
    if args.family == "ot":
        if args.r is None:
            raise ConstructionError("ot needs --r")
        return make_ot(args.r)
    raise ConstructionError(f"unknown family {args.family!r}")


def _family_params(fam: IsoPolynomial) -> dict:
    return {
        "family": fam.family,
        "g": fam.g,
        "m1": fam.m1,
        "m2": fam.m2,
        "dim": fam.ambient_dim,
    }


def _ball_points(dim: int, count: int, seed: int, radius: float) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    pts = rng.standard_normal((count, dim))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    radii = rng.uniform(0.2, radius, size=count)
    return pts * radii[:, None]


# ---------------------------------------------------------------- verify-cm


def cmd_verify_cm(args) -> int:
    seed = _resolve_seed(args)
    fam = _build_family(args)
    tol = args.tol
    report = SuiteReport(
        command="verify-cm",
        params=_family_params(fam),
        seed=seed,
        samples=args.samples,
    )

    g = fam.g
    worst_grad = worst_lap = 0.0
    for x in _ball_points(fam.ambient_dim, args.samples, seed, radius=2.0):
        r = float(np.linalg.norm(x))
        res_grad, res_lap = cm_residuals(fam, x)
        worst_grad = max(worst_grad, abs(res_grad) / r ** (2 * g - 2))
        scale_lap = r ** (g - 2) if g > 2 else 1.0
        worst_lap = max(worst_lap, abs(res_lap) / scale_lap)
    report.add(
        "ambient-gradient-norm", worst_grad, tol,
        "square norm of the gradient vs g^2 |x|^(2g-2)",
    )
    report.add(
        "ambient-laplacian", worst_lap, tol,
        "Laplacian vs (g^2/2)(m2 - m1) |x|^(g-2)",
    )

    worst_sgrad = worst_slap = 0.0
    for x in regular_sphere_points(fam, args.samples, seed + 1):
        res_grad, res_lap = transnormal_residuals(fam, x)
        worst_sgrad = max(worst_sgrad, abs(res_grad))
        worst_slap = max(worst_slap, abs(res_lap))
    report.add(
        "sphere-gradient-profile", worst_sgrad, tol,
        "|grad f|^2 on the sphere vs the polynomial profile b(f)",
    )
    report.add(
        "sphere-laplacian-profile", worst_slap, tol,
        "spherical Laplacian of f vs the affine profile a(f)",
    )

    _emit(report_body(report), args.out)
    return 0 if report.passed else 1


# ------------------------------------------------------------ verify-hidden


def _parse_k_list(text: str) -> list:
    try:
        ks = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ConstructionError(f"bad --k list {text!r}") from exc
    if not ks:
        raise ConstructionError("empty --k list")
    return ks


def cmd_verify_hidden(args) -> int:
    seed = _resolve_seed(args)
    fam = _build_family(args)
    is_cartan_base = fam.family == "cartan" and fam.m1 == 1

    if args.k is not None:
        ks = _parse_k_list(args.k)
    elif is_cartan_base:
        ks = [1, 2, 3, 4, 5]
    else:
        ks = [2, 3]
    for k in ks:
        delta_ok = is_cartan_base and 1 <= k <= 5
        rho_ok = 2 <= k <= 4
        if not (delta_ok or rho_ok):
            raise ConstructionError(
                f"k = {k} has no recorded closed form for this family "
                "(identity range 1..5 for the base cubic, 2..4 otherwise)"
            )

    report = SuiteReport(
        command="verify-hidden",
        params={**_family_params(fam), "k": ",".join(str(k) for k in ks)},
        seed=seed,
        samples=args.samples,
    )

    pts = _ball_points(fam.ambient_dim, args.samples, seed, radius=1.5)
    norms = np.linalg.norm(pts, axis=1)
    for k in ks:
        if is_cartan_base and 1 <= k <= 5:
            # Displayed identities for the 5-variable cubic:
            # sigma_1 = 0, sigma_2 = -63|x|^2, sigma_3 = -54F,
            # sigma_4 = 972|x|^4, sigma_5 = 1944|x|^2 F.
            worst = 0.0
            for x, r in zip(pts, norms):
                lhs = delta_k(fam, x, k)
                rhs = {
                    1: 0.0,
                    2: -63.0 * r**2,
                    3: -54.0 * eval_F(fam, x),
                    4: 972.0 * r**4,
                    5: 1944.0 * r**2 * eval_F(fam, x),
                }[k]
                worst = max(worst, abs(lhs - rhs) / max(r**k, 1e-30))
            report.add(
                f"hessian-minor-identity-{k}", worst, args.tol,
                "k-th elementary symmetric function of the Hessian, "
                "closed form for the 5-variable cubic",
            )
        if 2 <= k <= 4:
            informational = k == 4 and fam.n < 4
            worst = 0.0
            for x, r in zip(pts, norms):
                res = hidden_rho_residual(fam, x, k)
                worst = max(worst, abs(res) / max(r ** (k * (fam.g - 2)), 1e-30))
            report.add(
                f"power-sum-closed-form-{k}",
                worst,
                None if informational else args.tol,
                "power sum of Hessian eigenvalues vs its homogenized "
                "closed form" + (" (below its stated rank bound)" if informational else ""),
            )

    _emit(report_body(report), args.out)
    return 0 if report.passed else 1


# -------------------------------------------------------------- alpha-scan


def cmd_alpha_scan(args) -> int:
    seed = _resolve_seed(args)
    fam = _build_family(args)
    jtag = J_CHOICES[args.J]
    J = build_complex_structure(jtag, fam.ambient_dim)
    ctx = HopfContext(fam, J)

    levels = args.level if args.level else [0.0]
    report = SuiteReport(
        command="alpha-scan",
        params={
            **_family_params(fam),
            "J": jtag,
            "levels": ",".join(f"{lv:g}" for lv in levels),
        },
        seed=seed,
        samples=args.samples,
    )

    level_stats = []
    csv_rows = []
    for level in levels:
        records, summary = alpha_scan(ctx, level, args.samples, seed)
        level_stats.append({"level": level, **summary})
        report.add(
            f"alpha-spread-level={level:g}",
            summary["max"] - summary["min"],
            None,
            "spread of the normal-torsion ratio over the level set "
            "(zero iff constant)",
        )
        csv_rows.extend(records)
    report.extra["alpha"] = level_stats

    system = fam.system
    witnessed = system is not None and (
        (system.tag == TAG_STANDARD and system.m == 2 and jtag == J_BLOCK)
        or system.tag == TAG_OZEKI_TAKEUCHI
    )
    if witnessed:
        z_plus, z_minus = witness_points(fam)
        report.add(
            "reference-point-plus",
            abs(omega_direct(ctx, z_plus) - 128.0),
            TOL_WITNESS,
            "torsion form equals +128 at the recorded zero-level point",
        )
        report.add(
            "reference-point-minus",
            abs(omega_direct(ctx, z_minus) + 128.0),
            TOL_WITNESS,
            "torsion form equals -128 at the recorded zero-level point",
        )

    if args.csv:
        path = f"{args.csv}-alpha.csv"
        with open(path, "w") as handle:
            handle.write("index,level,alpha,omega,l\n")
            for rec in csv_rows:
                handle.write(
                    f"{rec.index},{rec.level:.17g},{rec.alpha:.17g},"
                    f"{rec.omega:.17g},{rec.l}\n"
                )
        report.notes.append(f"wrote {path}")

    _emit(report_body(report), args.out)
    return 0 if report.passed else 1


# ----------------------------------------------------------------- riccati


def _parse_float_list(text: str, flag: str) -> list:
    try:
        vals = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ConstructionError(f"bad {flag} list {text!r}") from exc
    if not vals:
        raise ConstructionError(f"empty {flag} list")
    return vals


def cmd_riccati(args) -> int:
    seed = _resolve_seed(args)
    kappas = _parse_float_list(args.kappa, "--kappa")
    mu0 = _parse_float_list(args.mu0, "--mu0")
    n = len(mu0)
    if len(kappas) == 1:
        jacobi = space_form(kappas[0], n)
    elif len(kappas) == 2:
        if args.mult is None:
            raise ConstructionError("two curvature values need --mult")
        jacobi = rank_one(kappas[0], kappas[1], args.mult, n)
    else:
        raise ConstructionError("--kappa takes one or two values")
    fam = riccati_family(jacobi, mu0)

    report = SuiteReport(
        command="riccati",
        params={
            "kappa": args.kappa,
            "mult": args.mult if args.mult is not None else 0,
            "mu0": args.mu0,
            "t0": args.t0,
            "t1": args.t1,
            "steps": args.steps,
        },
        seed=seed,
        samples=args.steps,
    )

    t0, t1 = args.t0, args.t1
    if t0 >= t1:
        raise ConstructionError(f"empty time range [{t0}, {t1}]")
    # Checks run well inside the blow-up window: within 85% of the distance
    # from t = 0 to each finite pole, conditioning of the comparisons decays
    # like powers of 1/(pole - t) and RK4 loses accuracy first.
    lo = 0.85 * fam.t_lower if math.isfinite(fam.t_lower) else t0
    hi = 0.85 * fam.t_upper if math.isfinite(fam.t_upper) else t1
    truncated = t0 < lo or t1 > hi
    t0c, t1c = max(t0, lo), min(t1, hi)
    if t0c >= t1c:
        raise BlowUpError(
            f"requested range [{t0}, {t1}] lies outside the safe interval "
            f"({fam.t_lower:.6g}, {fam.t_upper:.6g})"
        )
    if truncated:
        report.notes.append(
            f"range clipped to [{t0c:.6g}, {t1c:.6g}] before blow-up "
            f"(poles at {fam.t_lower:.6g}, {fam.t_upper:.6g})"
        )

    grid = np.linspace(t0c, t1c, 9)
    # Identity residuals grow with the moment magnitudes even at machine
    # precision, so the gated rows are scaled by the largest |Q_i| seen.
    scale = 1.0
    for t in grid:
        for i in range(1, 8):
            scale = max(scale, abs(q_moment(fam, float(t), i)))
    worst = 0.0
    for t in grid:
        closed = evolve_closed(fam, float(t))
        numeric = evolve_numeric(fam, float(t), args.steps)
        worst = max(worst, float(np.max(np.abs(closed - numeric))))
    report.add(
        "closed-vs-numeric", worst / scale, TOL_RICCATI_EVOLVE,
        "closed-branch evolution vs RK4, scaled by the moment magnitude",
    )
    report.add(
        "power-sum-recurrence",
        check_power_sum_recurrence(fam, grid) / scale,
        TOL_RICCATI_LEMMA,
        "derivative of the k-th curvature power sum vs the inductive step, "
        "scaled by the moment magnitude",
    )
    report.add(
        "mixed-trace-recurrence",
        check_gamma_recurrence(fam, grid) / scale,
        TOL_RICCATI_LEMMA,
        "derivative of tr(S^i R) vs the inductive step, scaled by the "
        "moment magnitude",
    )
    chain = check_moment_chain(fam, grid)
    report.add(
        "moment-chain", chain.max_residual / scale, TOL_RICCATI_CHAIN,
        "Q4 and Q5 propagated from lower moments vs direct power sums, "
        "scaled by the moment magnitude",
    )
    report.extra["moment_scale"] = scale
    # Recovery from power sums is well-posed only for pairwise distinct
    # values: a root of multiplicity m reacts to coefficient noise like
    # noise^(1/m), so tied branches are excluded rather than mis-scored.
    distinct = len(set(zip(jacobi.kappas, mu0)))
    if n <= 8 and distinct == n:
        worst_rt = 0.0
        for t in grid:
            rec = moment_to_spectrum_evolution(fam, float(t))
            direct = np.sort(evolve_closed(fam, float(t)))[::-1]
            worst_rt = max(worst_rt, float(np.max(np.abs(rec.values - direct))))
        report.add(
            "moment-round-trip", worst_rt, TOL_RICCATI_ROUNDTRIP,
            "eigenvalues recovered from power sums vs the evolved multiset",
        )
    else:
        reason = "n > 8" if n > 8 else "repeated branches"
        report.notes.append(f"moment round-trip skipped: {reason}")

    if args.csv:
        path = f"{args.csv}-trajectory.csv"
        write_trajectory_csv(path, fam, t0c, t1c, args.steps)
        report.notes.append(f"wrote {path}")

    _emit(report_body(report), args.out)
    return 0 if report.passed else 1


# ---------------------------------------------------------------- spectrum


def cmd_spectrum(args) -> int:
    seed = _resolve_seed(args)
    fam = _build_family(args)
    level = args.level
    if abs(level) >= 1.0:
        raise ConstructionError(f"level t = {level} must satisfy |t| < 1")

    report = SuiteReport(
        command="spectrum",
        params={**_family_params(fam), "level": level},
        seed=seed,
        samples=args.samples,
    )

    worst = 0.0
    flips = 0
    for x in regular_sphere_points(fam, args.samples, seed):
        y = level_project(fam, x, level).point
        check = munzner_check(frame_at(fam, y), fam.g, fam.m1, fam.m2)
        worst = max(worst, check.max_deviation)
        flips += int(check.orientation_flipped)
    report.add(
        "spectrum-match", worst, TOL_SPECTRUM,
        "shape operator eigenvalues vs the cotangent-shift prediction",
    )
    report.add(
        "orientation-flips", float(flips), 0.0,
        "count of points matching only after a global sign flip",
    )
    expected = [
        float(v)
        for v in munzner_check(
            frame_at(fam, level_project(
                fam, regular_sphere_points(fam, 1, seed)[0], level
            ).point),
            fam.g, fam.m1, fam.m2,
        ).expected
    ]
    report.extra["expected_values"] = expected

    if args.csv:
        path = f"{args.csv}-recurrence.csv"
        write_recurrence_csv(
            path, fam.g, fam.m1, fam.m2, np.linspace(-0.8, 0.8, 33)
        )
        report.notes.append(f"wrote {path}")

    _emit(report_body(report), args.out)
    return 0 if report.passed else 1


# ------------------------------------------------------------------ parser


def _add_family_flags(sub):
    sub.add_argument(
        "--family", required=True, choices=["cartan", "fkm", "ot"],
        help="polynomial family",
    )
    sub.add_argument("--m", type=int, help="cartan algebra index / fkm m")
    sub.add_argument("--r", type=int, help="fkm block size / ot block count")


def _add_common_flags(sub, samples_default):
    sub.add_argument("--samples", type=int, default=samples_default)
    sub.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sub.add_argument("--out", help="write the JSON report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isopar",
        description="numerical verification suites for isoparametric polynomials",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser(
        "verify-cm",
        help="defining differential equations and the spherical profile",
    )
    _add_family_flags(p)
    _add_common_flags(p, samples_default=200)
    p.add_argument("--tol", type=float, default=TOL_CM)
    p.set_defaults(func=cmd_verify_cm)

    p = subs.add_parser(
        "verify-hidden",
        help="closed forms of Hessian minors and eigenvalue power sums",
    )
    _add_family_flags(p)
    _add_common_flags(p, samples_default=100)
    p.add_argument("--k", help="comma separated k values (default depends on family)")
    p.add_argument("--tol", type=float, default=TOL_HIDDEN)
    p.set_defaults(func=cmd_verify_hidden)

    p = subs.add_parser(
        "alpha-scan",
        help="normal-torsion ratio statistics over level sets",
        epilog="CSV columns (--csv PREFIX -> PREFIX-alpha.csv): "
        "index, level, alpha, omega, l; floats carry 17 significant digits.",
    )
    _add_family_flags(p)
    _add_common_flags(p, samples_default=50)
    p.add_argument(
        "--J", default="block", choices=sorted(J_CHOICES),
        help="circle action: block, right-i or left-i",
    )
    p.add_argument(
        "--level", type=float, action="append",
        help="level value in (-1, 1); repeatable (default 0)",
    )
    p.add_argument("--csv", help="prefix for CSV side files")
    p.set_defaults(func=cmd_alpha_scan)

    p = subs.add_parser(
        "riccati",
        help="closed-form curvature evolution against a numeric integrator",
        epilog="CSV columns (--csv PREFIX -> PREFIX-trajectory.csv): "
        "t, mu_1..mu_n, Q_1..Q_4; floats carry 17 significant digits.",
    )
    p.add_argument("--kappa", required=True, help="one or two values, comma separated")
    p.add_argument("--mult", type=int, help="multiplicity of the second value (1, 3 or 7)")
    p.add_argument("--mu0", required=True, help="initial curvatures, comma separated")
    p.add_argument("--t0", type=float, default=-0.5)
    p.add_argument("--t1", type=float, default=0.5)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--csv", help="prefix for CSV side files")
    p.set_defaults(func=cmd_riccati)

    p = subs.add_parser(
        "spectrum",
        help="shape operator spectrum at a level vs the closed prediction",
        epilog="CSV columns (--csv PREFIX -> PREFIX-recurrence.csv): "
        "t, Q1..Q6, rhobar0..rhobar6; floats carry 17 significant digits.",
    )
    _add_family_flags(p)
    _add_common_flags(p, samples_default=50)
    p.add_argument("--level", type=float, default=0.0)
    p.add_argument("--csv", help="prefix for CSV side files")
    p.set_defaults(func=cmd_spectrum)

    return parser


USAGE_ERRORS = (
    ConstructionError,
    UnsupportedPairError,
    InvarianceError,
    FocalPointError,
    ProjectionError,
    BlowUpError,
    ValueError,
)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except USAGE_ERRORS as exc:
        _emit(error_body(args.command, exc), getattr(args, "out", None))
        return 2
    except IsoparError as exc:
        _emit(error_body(args.command, exc), getattr(args, "out", None))
        return 2


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
