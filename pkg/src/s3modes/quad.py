"""Quadrature on the three-sphere and finite-difference harmonicity checks.

The round measure in toroidal coordinates is cos(chi) sin(chi) dchi dtheta
dphi.  Substituting u = cos(2 chi) turns the chi integral into du/4 over
[-1, 1], so a Gauss-Legendre rule in u crossed with uniform angular grids
integrates exactly any expression u^a e^(i b theta) e^(i c phi) with
a <= n_u - 1 and |b|, |c| < n_angle.  Basis products at level k need
n_u >= k + 1 and n_angle >= 2k + 1; ``rule_for_level`` adds a margin.

Functions are passed as callbacks taking a single ToroidalPoint whose
fields are arrays (all nodes at once) and returning the array of values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import ToroidalPoint

VOLUME = 2.0 * math.pi**2


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes (as one array-valued ToroidalPoint) and matching weights."""

    nodes: ToroidalPoint
    weights: np.ndarray = field(repr=False)

    @property
    def size(self):
        return self.weights.size


def make_rule(n_u, n_angle):
    """Product rule: n_u Gauss-Legendre nodes in cos(2 chi), n_angle uniform
    nodes in each of theta and phi.  Weights sum to the volume 2 pi^2."""
    if n_u < 1 or n_angle < 1:
        raise ValueError("rule sizes must be positive")
    u, wu = np.polynomial.legendre.leggauss(n_u)
    chi = 0.5 * np.arccos(u)
    ang = 2.0 * math.pi * np.arange(n_angle) / n_angle
    w_ang = (2.0 * math.pi / n_angle) ** 2
    chi_g, th_g, ph_g = np.meshgrid(chi, ang, ang, indexing="ij")
    w_g = np.broadcast_to((wu / 4.0)[:, None, None] * w_ang, chi_g.shape)
    nodes = ToroidalPoint(chi_g.ravel(), th_g.ravel(), ph_g.ravel())
    return QuadratureRule(nodes, w_g.ravel().copy())


def rule_for_level(k):
    """Rule exact for products of two level-k basis functions."""
    return make_rule(k + 2, 2 * k + 4)


def integrate(f, rule):
    """Integral of a callback over the sphere."""
    return np.sum(np.asarray(f(rule.nodes)) * rule.weights)


def inner_product(f, g, rule):
    """L^2 pairing integral of f * conj(g)."""
    fv = np.asarray(f(rule.nodes))
    gv = np.asarray(g(rule.nodes))
    return np.sum(fv * np.conjugate(gv) * rule.weights)


def norm_sq(f, rule):
    fv = np.asarray(f(rule.nodes))
    return float(np.sum(np.abs(fv) ** 2 * rule.weights).real)


def gram_matrix(funcs, rule):
    """Matrix of pairwise L^2 pairings <f_r, f_c> of a list of callbacks."""
    vals = np.stack([np.asarray(f(rule.nodes)) for f in funcs])
    return (vals * rule.weights) @ np.conjugate(vals.T)


def project_onto_level(f, k, rule=None):
    """Least-squares coefficients of a callback over the level-k toroidal basis.

    Solves the Gram system for the expansion over ``eval_b2`` modes and
    returns (coefficients in flat order, L^2 norm of the residual).
    """
    from .bases import eval_b2, modes_b2

    if rule is None:
        rule = rule_for_level(k)
    f_vals = np.asarray(f(rule.nodes), dtype=complex)
    basis_vals = np.stack(
        [np.asarray(eval_b2(m, rule.nodes), dtype=complex) for m in modes_b2(k)]
    )
    gram = (basis_vals * rule.weights) @ np.conjugate(basis_vals.T)
    rhs = (basis_vals * rule.weights) @ np.conjugate(f_vals)
    coeffs = np.conjugate(np.linalg.solve(gram, rhs))
    resid_vals = f_vals - coeffs @ basis_vals
    residual = math.sqrt(float(np.sum(np.abs(resid_vals) ** 2 * rule.weights).real))
    return coeffs, residual


def _low_discrepancy_sphere_points(count, skip=0):
    # Halton points mapped so u = cos(2 chi) is uniform, matching the round
    # measure; deterministic, so repeated runs sample identically.
    def vdc(n, base):
        v, denom = 0.0, 1.0
        while n > 0:
            n, rem = divmod(n, base)
            denom *= base
            v += rem / denom
        return v

    idx = np.arange(skip + 1, skip + count + 1)
    t1 = np.array([vdc(int(n), 2) for n in idx])
    t2 = np.array([vdc(int(n), 3) for n in idx])
    t3 = np.array([vdc(int(n), 5) for n in idx])
    chi = 0.5 * np.arccos(1.0 - 2.0 * t1)
    return ToroidalPoint(chi, 2.0 * math.pi * t2, 2.0 * math.pi * t3)


def fd_laplacian(func, x, h, order=4):
    """Flat 4D Laplacian of ``func`` at points x (shape (4, ...)) by a
    central stencil (three-point at order 2, five-point at order 4) in each
    coordinate."""
    if order not in (2, 4):
        raise ValueError("stencil order must be 2 or 4")
    x = np.asarray(x, dtype=float)
    total = np.zeros(x.shape[1:], dtype=complex)
    f0 = np.asarray(func(x))
    for mu in range(4):
        shift = np.zeros_like(x)
        shift[mu] = h
        fp1 = np.asarray(func(x + shift))
        fm1 = np.asarray(func(x - shift))
        if order == 2:
            total = total + (fp1 - 2 * f0 + fm1) / (h * h)
        else:
            fp2 = np.asarray(func(x + 2 * shift))
            fm2 = np.asarray(func(x - 2 * shift))
            total = total + (-fp2 + 16 * fp1 - 30 * f0 + 16 * fm1 - fm2) / (12 * h * h)
    return total


def harmonicity_residual(null_vec, k, h=1e-3, points=None, order=4):
    """Largest normalized flat-Laplacian residual of (x . N)^k.

    ``null_vec`` is the 4-vector N, given either as a ComplexQuaternion or
    as its coefficient array.  For a null N the polynomial is harmonic on
    R^4 and the residual is at truncation level; for generic N it is order
    one.  The residual at each sample point is divided by the local
    magnitude of the function over the stencil, floored at one.  Sample
    points default to 20 deterministic low-discrepancy points on the sphere.
    """
    if hasattr(null_vec, "to_array"):
        null_vec = null_vec.to_array()
    n = np.asarray(null_vec, dtype=complex)
    if n.shape != (4,):
        raise ValueError("null_vec must have shape (4,)")
    if points is None:
        points = _low_discrepancy_sphere_points(20)
    x = points.embedding()

    def func(y):
        return np.tensordot(n, y.astype(complex), axes=(0, 0)) ** k

    lap = fd_laplacian(func, x, h, order=order)
    local = np.abs(func(x))
    for mu in range(4):
        shift = np.zeros_like(x)
        shift[mu] = h
        local = np.maximum(local, np.abs(func(x + shift)))
        local = np.maximum(local, np.abs(func(x - shift)))
    scale = np.maximum(local, 1.0)
    return float(np.max(np.abs(lap) / scale))
