"""Self-check suites: every analytic claim against its numerical oracle.

Each suite returns a list of check records {name, value, tolerance, pass}
where ``value`` is a residual (or an integer mismatch count) that must stay
below ``tolerance``.  All sampling is deterministic — fixed seeds and
low-discrepancy point sets — so repeated runs produce identical reports.
"""

from __future__ import annotations

import math

import numpy as np

from .algebra import Quaternion, Rotation, RootsOfUnity, null_vector, rotation_compose
from .bases import (
    b2_from_b3_matrix,
    b3_from_b2_matrix,
    eval_b2,
    eval_b3,
    eval_coherent,
    modes_b2,
    modes_b3,
    null_power_coeff_vector,
)
from .quad import (
    VOLUME,
    _low_discrepancy_sphere_points,
    gram_matrix,
    integrate,
    make_rule,
    project_onto_level,
    rule_for_level,
    harmonicity_residual,
)
from .quotients import GroupSpec, invariant_basis, invariant_projector, lens_modes, prism_modes
from .rotations import rotation_coeffs, rotation_coeffs_lstsq, rotation_scalars

TOLERANCE_DEFAULTS = {
    "quad": 1e-12,
    "gram": 1e-10,
    "roundtrip": 1e-9,
    "harmonic": 1e-5,
    "membership": 1e-9,
    "coeff": 1e-8,
    "rotation": 1e-8,
    "identity": 1e-12,
    "projector": 1e-8,
    "invariance": 1e-9,
}
FD_STEP_DEFAULT = 1e-3

SUITE_NAMES = ("quad", "bases", "rotations", "quotients")

_SEED = 20240817


def _check(name, value, tolerance):
    value = float(value)
    tolerance = float(tolerance)
    return {
        "name": name,
        "value": value,
        "tolerance": tolerance,
        "pass": bool(value < tolerance),
    }


def _random_rotation(rng):
    ql = rng.standard_normal(4)
    qr = rng.standard_normal(4)
    return Rotation(
        Quaternion(*(ql / np.linalg.norm(ql))), Quaternion(*(qr / np.linalg.norm(qr)))
    )


def suite_quad(k, tol):
    rule = rule_for_level(k)
    checks = [
        _check("weight_sum", abs(float(np.sum(rule.weights)) - VOLUME), tol["quad"]),
        _check(
            "u_linear_moment",
            abs(integrate(lambda p: np.cos(p.chi) ** 2, rule) - math.pi**2),
            tol["quad"],
        ),
        _check(
            "angular_exactness",
            abs(integrate(lambda p: np.exp(1j * p.theta), rule)),
            tol["quad"],
        ),
    ]
    # monomial/Fourier box: u^a alone has a one-dimensional analytic value,
    # any nonzero angular frequency below the grid size integrates to zero
    rule_small = make_rule(3, 4)
    worst = 0.0
    for a in range(3):
        exact = VOLUME / (a + 1) if a % 2 == 0 else 0.0
        got = integrate(lambda p, a=a: np.cos(2.0 * p.chi) ** a, rule_small)
        worst = max(worst, abs(got - exact))
    for b, c in [(1, 0), (0, 3), (2, 1)]:
        got = integrate(
            lambda p, b=b, c=c: np.cos(2.0 * p.chi)
            * np.exp(1j * (b * p.theta + c * p.phi)),
            rule_small,
        )
        worst = max(worst, abs(got))
    checks.append(_check("exactness_box", worst, tol["quad"]))

    rng = np.random.default_rng(_SEED)
    coeffs = rng.standard_normal((k + 1) ** 2) + 1j * rng.standard_normal((k + 1) ** 2)
    modes = modes_b2(k)

    def f(p):
        return sum(c * eval_b2(m, p) for c, m in zip(coeffs, modes))

    c1, _ = project_onto_level(f, k, rule)
    c2, _ = project_onto_level(
        lambda p: sum(c * eval_b2(m, p) for c, m in zip(c1, modes)), k, rule
    )
    scale = float(np.max(np.abs(c1)))
    checks.append(
        _check("projection_idempotent", float(np.max(np.abs(c2 - c1))) / scale, tol["quad"])
    )
    return checks


def suite_bases(k, tol, fd_step=FD_STEP_DEFAULT):
    rule = rule_for_level(k)
    modes2 = modes_b2(k)
    gram = gram_matrix([lambda p, m=m: eval_b2(m, p) for m in modes2], rule)
    diag = np.real(np.diag(gram)).copy()
    mean_diag = float(np.mean(diag))
    off = gram - np.diag(np.diag(gram))
    checks = [
        _check("gram_offdiag", float(np.max(np.abs(off))) / mean_diag, tol["gram"]),
        _check(
            "gram_diag_spread",
            float(np.max(np.abs(diag - mean_diag))) / mean_diag,
            tol["gram"],
        ),
    ]

    rng = np.random.default_rng(_SEED + 1)
    angles = rng.uniform(0.0, 2.0 * math.pi, size=(3, 2))
    worst_harm = max(
        harmonicity_residual(null_vector(a, b), k, h=fd_step) for a, b in angles
    )
    checks.append(_check("harmonicity", worst_harm, tol["harmonic"]))

    a0, b0 = (float(angles[0, 0]), float(angles[0, 1]))
    coh = lambda p: eval_coherent(k, a0, b0, p)
    _, resid = project_onto_level(coh, k, rule)
    checks.append(_check("membership", resid, tol["membership"]))
    up_coeffs, _ = project_onto_level(coh, k + 2, rule_for_level(k + 2))
    checks.append(
        _check("level_separation", float(np.max(np.abs(up_coeffs))), tol["membership"])
    )

    if k % 2 == 0:
        proj, _ = project_onto_level(coh, k, rule)
        freq = np.array([[m.ell, m.em] for m in modes2], dtype=float)
        phases = np.exp(1j * (-freq[:, 0] * a0 + freq[:, 1] * b0))
        expect = null_power_coeff_vector(k) * phases
        checks.append(
            _check(
                "coherent_coefficients",
                float(np.max(np.abs(proj - expect) / np.abs(expect))),
                tol["coeff"],
            )
        )

        fwd = b2_from_b3_matrix(k).entries
        bwd = b3_from_b2_matrix(k).entries
        eye = np.eye((k + 1) ** 2)
        checks.append(
            _check("roundtrip", float(np.max(np.abs(fwd @ bwd - eye))), tol["roundtrip"])
        )
        pts = _low_discrepancy_sphere_points(20)
        # the transform matrices live in the scaled toroidal frame,
        # coeff_P * T, where the coherent expansion has unit coefficients
        v2s = null_power_coeff_vector(k)[:, None] * np.stack(
            [eval_b2(m, pts) for m in modes2]
        )
        v3 = np.stack([eval_b3(m, pts) for m in modes_b3(k)])
        recon = max(
            float(np.max(np.abs(v2s - fwd @ v3))), float(np.max(np.abs(v3 - bwd @ v2s)))
        )
        checks.append(_check("reconstruction", recon, tol["roundtrip"]))
    return checks


def suite_rotations(k, tol):
    rng = np.random.default_rng(_SEED + 2)
    rotations = [_random_rotation(rng) for _ in range(3)]
    worst = 0.0
    coeff_cache = []
    for g in rotations:
        got = rotation_coeffs(g, k)
        oracle = rotation_coeffs_lstsq(g, k)
        coeff_cache.append(got)
        worst = max(worst, float(np.max(np.abs(got.matrix - oracle.matrix))))
    checks = [_check("formula_vs_oracle", worst, tol["rotation"])]

    g, h = rotations[0], rotations[1]
    cg = coeff_cache[0].matrix.T
    ch = coeff_cache[1].matrix.T
    cgh = rotation_coeffs(rotation_compose(h, g), k).matrix.T
    checks.append(
        _check("composition", float(np.max(np.abs(cg @ ch - cgh))), tol["rotation"])
    )

    rule = rule_for_level(k)
    gram = gram_matrix([lambda p, m=m: eval_b3(m, p) for m in modes_b3(k)], rule)
    c = coeff_cache[2].matrix.T
    drift = float(np.max(np.abs(c.conj().T @ gram @ c - gram))) / float(
        np.max(np.abs(gram))
    )
    checks.append(_check("gram_preservation", drift, tol["rotation"]))

    worst_id = 0.0
    for g in rotations:
        for I in range(k + 1):
            for J in range(k + 1):
                sc = rotation_scalars(g, k, I, J)
                worst_id = max(worst_id, abs(sc.A * sc.A_prime - sc.B * sc.D))
    checks.append(_check("scalar_identity", worst_id, tol["identity"]))

    roots = RootsOfUnity(k)
    gen2 = GroupSpec.prism(2).generators()[1]
    worst_prism = 0.0
    for I in range(k + 1):
        for J in range(k + 1):
            sc = rotation_scalars(gen2, k, I, J)
            worst_prism = max(
                worst_prism,
                abs(sc.A + roots.unit_power(J)),
                abs(sc.A_prime - roots.unit_power(-J)),
                abs(sc.B - roots.unit_power(I)),
                abs(sc.D + roots.unit_power(-I)),
            )
    checks.append(_check("prism_generator_scalars", worst_prism, tol["identity"]))
    return checks


def _invariance_residual(sub, group):
    basis_b3 = sub.coords("B3")
    worst = 0.0
    for g in group.elements:
        c = rotation_coeffs(g, sub.k).matrix.T
        worst = max(worst, float(np.max(np.abs(c @ basis_b3 - basis_b3))))
    return worst


def suite_quotients(k, tol):
    lens = GroupSpec.lens(5, 1)
    lens_group = lens.group()
    sub = invariant_basis(lens, k)
    checks = [
        _check(
            "lens_rank_vs_count",
            abs(sub.dimension - len(lens_modes(5, 1, k))),
            0.5,
        )
    ]
    if sub.dimension:
        checks.append(
            _check("lens_invariance", _invariance_residual(sub, lens_group), tol["invariance"])
        )

    proj = invariant_projector(lens_group, k)
    checks.append(
        _check("projector_idempotent", float(np.max(np.abs(proj @ proj - proj))), tol["projector"])
    )
    worst_comm = 0.0
    for g in lens_group.elements:
        c = rotation_coeffs(g, k).matrix.T
        worst_comm = max(worst_comm, float(np.max(np.abs(proj @ c - c @ proj))))
    checks.append(_check("projector_commutes", worst_comm, tol["projector"]))

    prism = GroupSpec.prism(2)
    prism_group = prism.group()
    vectors = prism_modes(2, k)
    psub = invariant_basis(prism, k)
    checks.append(
        _check("prism_rank_vs_construction", abs(psub.dimension - len(vectors)), 0.5)
    )
    if vectors:
        fwd = b2_from_b3_matrix(k).entries
        worst = 0.0
        for w in vectors:
            c_b3 = fwd.T @ w
            for g in prism_group.elements:
                cg = rotation_coeffs(g, k).matrix.T
                worst = max(worst, float(np.max(np.abs(cg @ c_b3 - c_b3))))
        checks.append(_check("prism_invariance", worst, tol["invariance"]))
    return checks


def run_verify(k, suites=None, tolerances=None, fd_step=FD_STEP_DEFAULT):
    """Run the requested suites at level k; returns the full report dict.

    ``suites`` is a list of names from SUITE_NAMES (None = all);
    ``tolerances`` overrides entries of TOLERANCE_DEFAULTS.
    """
    if k < 2 or k % 2 != 0:
        raise ValueError("verification needs an even level k >= 2")
    tol = dict(TOLERANCE_DEFAULTS)
    if tolerances:
        unknown = set(tolerances) - set(tol)
        if unknown:
            raise ValueError(f"unknown tolerance names: {sorted(unknown)}")
        tol.update(tolerances)
    chosen = list(SUITE_NAMES) if suites is None else list(suites)
    for name in chosen:
        if name not in SUITE_NAMES:
            raise ValueError(f"unknown suite: {name}")
    report = {
        "schema": 1,
        "kind": "verify",
        "k": int(k),
        "fd_step": float(fd_step),
        "tolerances": {key: float(tol[key]) for key in sorted(tol)},
        "suites": {},
    }
    failures = 0
    total = 0
    for name in chosen:
        if name == "quad":
            checks = suite_quad(k, tol)
        elif name == "bases":
            checks = suite_bases(k, tol, fd_step=fd_step)
        elif name == "rotations":
            checks = suite_rotations(k, tol)
        else:
            checks = suite_quotients(k, tol)
        report["suites"][name] = checks
        total += len(checks)
        failures += sum(1 for c in checks if not c["pass"])
    report["num_checks"] = total
    report["num_failures"] = failures
    report["passed"] = failures == 0
    return report
