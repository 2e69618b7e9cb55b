"""Action of rotations on eigenspace coefficients.

A rotation g permutes nothing: it sends each null-power basis function to
a combination of all of them at the same level,

    Phi_IJ(g x) = sum_ij G[IJ, ij] Phi_ij(x),

and the whole matrix G comes from four scalars per row.  Pairing the
rotated null vector with the fixed null combinations ALPHA, ALPHA_BAR,
BETA, DELTA gives

    A  = <q_left ALPHA q_right . n_IJ>      A' = <q_left ALPHA_BAR q_right . n_IJ>
    B  = <q_left BETA q_right . n_IJ>       D  = <q_left DELTA q_right . n_IJ>

which always satisfy A A' = B D.  When A' and B are nonzero the row is the
separable double sum

    G[IJ, ij] = A'^k rho^(i k) / (k+1)^2 * S_U[(i+j) mod k+1] * S_V[(i-j) mod k+1],

    S_U[t] = sum_A U^A rho^(-t A),  S_V[s] = sum_B V^B rho^(-s B),

with U = B/A', V = A/B.  Rows where A' or B (nearly) vanish, or where the
ratios are large enough to destroy cancellation, are filled instead from
the least-squares fit ``rotation_coeffs_lstsq``, which samples the sphere
and never divides.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    ALPHA,
    ALPHA_BAR,
    BETA,
    DELTA,
    RootsOfUnity,
    rotation_apply,
    scalar_product,
)
from .bases import b2_from_b3_matrix, b3_from_b2_matrix, eval_b3, modes_b3

DEGENERACY_RTOL = 1e-8
RATIO_LIMIT = 1e3


@dataclass(frozen=True)
class RotationScalars:
    """The four pairing scalars of one matrix row, plus their ratios.

    ``U`` and ``V`` are None when the row is degenerate (denominator below
    the relative threshold or ratio too large for the stable sum).
    """

    A: complex
    A_prime: complex
    B: complex
    D: complex
    U: complex | None
    V: complex | None

    @property
    def degenerate(self) -> bool:
        return self.U is None


def rotation_scalars(g, k, I, J):
    """Pairing scalars of rotation g for the B3 row (I, J) at level k."""
    roots = RootsOfUnity(k)
    n = null_vector_of_row(roots, I, J)
    a = complex(scalar_product(_sandwich(g, ALPHA), n))
    ap = complex(scalar_product(_sandwich(g, ALPHA_BAR), n))
    b = complex(scalar_product(_sandwich(g, BETA), n))
    d = complex(scalar_product(_sandwich(g, DELTA), n))
    u = v = None
    scale = max(abs(a), abs(ap), abs(b), abs(d))
    if min(abs(ap), abs(b)) >= DEGENERACY_RTOL * scale:
        u, v = b / ap, a / b
        if max(abs(u), abs(v)) > RATIO_LIMIT:
            u = v = None
    return RotationScalars(a, ap, b, d, u, v)


def _sandwich(g, q):
    return g.q_left.as_complex() * q * g.q_right.as_complex()


def null_vector_of_row(roots, I, J):
    from .algebra import null_vector

    return null_vector(I * roots.alpha, J * roots.alpha)


@dataclass(frozen=True, eq=False)
class RotationCoeffs:
    """Full (k+1)^2 x (k+1)^2 matrix of one rotation on a level.

    Row r = flat(I, J) holds the expansion of the rotated Phi_IJ over the
    unrotated B3 basis.  ``fallback_rows`` lists rows that were filled from
    the least-squares oracle instead of the separable formula.
    """

    k: int
    g: object
    matrix: np.ndarray = field(repr=False)
    fallback_rows: tuple = ()
    fit_residual: float | None = None

    def to_json_dict(self):
        n = (self.k + 1) ** 2
        flat = self.matrix.reshape(n * n)
        return {
            "schema": 1,
            "kind": "rotation_coeffs",
            "k": self.k,
            "q_left": [float(c) for c in self.g.q_left.coeffs()],
            "q_right": [float(c) for c in self.g.q_right.coeffs()],
            "shape": [n, n],
            "fallback_rows": [int(r) for r in self.fallback_rows],
            "fit_residual": self.fit_residual,
            "entries": [[float(z.real), float(z.imag)] for z in flat],
        }

    def to_csv_text(self):
        n = (self.k + 1) ** 2
        lines = []
        for r in range(n):
            for c in range(n):
                z = self.matrix[r, c]
                lines.append(f"{r},{c},{float(z.real)!r},{float(z.imag)!r}")
        return "\n".join(lines) + "\n"


def rotation_coeffs(g, k):
    """Coefficient matrix of a rotation on the level-k null-power basis.

    Uses the separable closed form row by row and falls back to the
    sampled least-squares solve for degenerate rows.  Even k only.
    """
    roots = RootsOfUnity(k)
    n1 = k + 1
    idx = np.arange(n1)
    # phase matrix rho^(-s A), reused for both inner sums
    omega = roots.unit_power(-np.outer(idx, idx))
    iv = np.repeat(idx, n1)
    jv = np.tile(idx, n1)
    su_index = (iv + jv) % n1
    sv_index = (iv - jv) % n1
    row_phase = roots.unit_power(iv * k)
    matrix = np.zeros((n1 * n1, n1 * n1), dtype=complex)
    oracle = None
    fallback = []
    for I in range(n1):
        for Jv in range(n1):
            r = I * n1 + Jv
            sc = rotation_scalars(g, k, I, Jv)
            if sc.degenerate:
                if oracle is None:
                    oracle = rotation_coeffs_lstsq(g, k)
                matrix[r] = oracle.matrix[r]
                fallback.append(r)
                continue
            s_u = omega @ (sc.U ** idx)
            s_v = omega @ (sc.V ** idx)
            matrix[r] = (
                sc.A_prime**k / n1**2 * row_phase * s_u[su_index] * s_v[sv_index]
            )
    return RotationCoeffs(k, g, matrix, tuple(fallback))


def _sample_points(k, skip=0):
    from .quad import _low_discrepancy_sphere_points

    return _low_discrepancy_sphere_points(2 * (k + 1) ** 2, skip=skip)


def rotation_coeffs_lstsq(g, k, max_attempts=3):
    """Coefficient matrix by sampling: fit Phi_IJ(g x) over the Phi_ij(x).

    Evaluates both sides on 2 (k+1)^2 deterministic low-discrepancy points
    and solves the least-squares system.  Resamples with fresh points when
    the design matrix is ill conditioned; raises after ``max_attempts``.
    Independent of the separable formula (no pairing scalars, no ratios).
    """
    modes = modes_b3(k)
    skip = 0
    for attempt in range(max_attempts):
        pts = _sample_points(k, skip=skip)
        design = np.stack([eval_b3(m, pts) for m in modes], axis=1)
        sv = np.linalg.svd(design, compute_uv=False)
        if sv[-1] <= 1e-10 * sv[0]:
            skip += pts.chi.size
            continue
        rotated = rotation_apply(g, pts.to_quaternion())
        from .algebra import quaternion_to_point

        gpts = quaternion_to_point(rotated)
        target = np.stack([eval_b3(m, gpts) for m in modes], axis=1)
        sol, *_ = np.linalg.lstsq(design, target, rcond=None)
        fit_residual = float(np.max(np.abs(design @ sol - target)))
        return RotationCoeffs(k, g, sol.T.copy(), fit_residual=fit_residual)
    raise ValueError(
        f"sample design matrix stayed ill conditioned after {max_attempts} attempts"
    )


def act_on_coeffs(coeffs, vec):
    """Coefficient vector of the rotated function.

    If f = sum_r vec[r] Phi_r then f(g^-1 .)... more precisely: composing
    with the rotation, (R f)(x) = f(g x) has B3 coefficients matrix^T vec.
    """
    vec = np.asarray(vec, dtype=complex)
    n = coeffs.matrix.shape[0]
    if vec.shape != (n,):
        raise ValueError(f"coefficient vector must have shape ({n},)")
    return coeffs.matrix.T @ vec


def to_b2_frame(coeffs):
    """Conjugate the rotation matrix into the scaled toroidal frame.

    Returns M_fwd @ matrix @ M_bwd where M_fwd / M_bwd are the B2-from-B3
    and B3-from-B2 transforms; row r then expands the rotated scaled mode r
    over unrotated scaled modes.  For rotations that only shift theta and
    phi the result is diagonal with unit-modulus entries.
    """
    fwd = b2_from_b3_matrix(coeffs.k).entries
    bwd = b3_from_b2_matrix(coeffs.k).entries
    return fwd @ coeffs.matrix @ bwd
