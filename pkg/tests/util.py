"""Shared oracles for the test suite.

Everything here is deliberately independent of the library code paths it
is used to check: the coherent polynomial is evaluated from the raw trig
closed form, its Fourier analysis is a literal double sum, and the Jacobi
oracle runs in exact rational arithmetic.
"""

import math
from fractions import Fraction

import numpy as np

from s3modes.algebra import Quaternion, Rotation, ToroidalPoint


def random_rotation(rng):
    ql = rng.standard_normal(4)
    qr = rng.standard_normal(4)
    return Rotation(
        Quaternion(*(ql / np.linalg.norm(ql))),
        Quaternion(*(qr / np.linalg.norm(qr))),
    )


def random_points(rng, n):
    # u = cos(2 chi) uniform, matching the round measure
    return ToroidalPoint(
        0.5 * np.arccos(rng.uniform(-1.0, 1.0, n)),
        rng.uniform(0.0, 2.0 * math.pi, n),
        rng.uniform(0.0, 2.0 * math.pi, n),
    )


def coherent_vals(k, a, b, pts):
    """(X . N(a,b))^k from the embedding, written out by hand."""
    return (
        np.cos(pts.chi) * np.cos(pts.theta - a)
        + 1j * np.sin(pts.chi) * np.sin(pts.phi + b)
    ) ** k


def fourier_extract(k, ell, em, pts):
    """Fourier component of the coherent polynomial on a (2k+2)^2 grid.

    Returns the scaled mode coeff * T_{m1,m2} evaluated at ``pts``; the
    (a, b) grid is exact because the polynomial has frequencies <= k.
    """
    grid = 2 * k + 2
    aa = 2.0 * math.pi * np.arange(grid) / grid
    total = np.zeros(np.shape(pts.chi), dtype=complex)
    for a in aa:
        for b in aa:
            total += coherent_vals(k, a, b, pts) * np.exp(1j * ell * a - 1j * em * b)
    return total / grid**2


def jacobi_series(d, a, b, x):
    """Jacobi polynomial as the finite hypergeometric sum, exact rationals.

    Generalized binomials are falling-factorial products, so negative
    integer parameters (down to a + d >= 0, b + d >= 0) are covered.
    """
    x = Fraction(x)

    def gbinom(n, kk):
        num = Fraction(1)
        for t in range(kk):
            num *= n - t
        return num / math.factorial(kk)

    total = Fraction(0)
    for s in range(d + 1):
        total += (
            gbinom(d + a, d - s)
            * gbinom(d + b, s)
            * ((x - 1) / 2) ** s
            * ((x + 1) / 2) ** (d - s)
        )
    return total
