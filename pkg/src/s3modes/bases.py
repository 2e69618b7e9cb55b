"""Two bases for the degree-k Laplacian eigenspace on the three-sphere.

Each eigenspace V^k (eigenvalue -k(k+2), dimension (k+1)^2) carries two
distinguished bases.

B2, the toroidal basis, consists of functions separable in toroidal
coordinates,

    T_{m1,m2} ~ cos^|l|(chi) sin^|m|(chi) P_d^(|m|,|l|)(cos 2chi) e^(i l theta) e^(i m phi),

labelled by m1, m2 in {-k/2, ..., k/2} (half-integers when k is odd) with
l = m1 + m2 and m = m2 - m1.  The normalization here fixes the squared L^2
norm to 2(k+1)^4, which makes the null-power expansion below come out with
the plain coefficient ``null_power_coeff``.

B3, defined for even k, consists of k-th powers of null pairings

    Phi_IJ(x) = (sum_mu x^mu N^mu)^k,   N = N(I alpha, J alpha),

with alpha = 2 pi/(k+1) and I, J in {0, ..., k}.  Every such power is a
finite sum of phased toroidal modes, and on the (k+1)-th roots of unity the
phases form a two-dimensional discrete Fourier transform; that transform
and its inverse are returned by ``b2_from_b3_matrix`` / ``b3_from_b2_matrix``.

Flattening conventions used by every matrix in this package:

    B2: row = (m1 + k/2) * (k+1) + (m2 + k/2)
    B3: row = I * (k+1) + J
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    ComplexQuaternion,
    RootsOfUnity,
    jacobi_poly,
    null_vector,
    point_to_quaternion,
    scalar_product,
)


def _half_int(value, label):
    twice = 2.0 * float(value)
    if abs(twice - round(twice)) > 0.0:
        raise ValueError(f"{label} must be an integer or half-integer")
    return int(round(twice))


@dataclass(frozen=True)
class ModeB2:
    """Toroidal mode label (k; m1, m2).

    m1 and m2 run over -k/2, -k/2 + 1, ..., k/2, so they are integers for
    even k and half-integers for odd k.  Derived labels: ``ell = m1 + m2``
    (theta frequency), ``em = m2 - m1`` (phi frequency), ``degree`` (Jacobi
    degree), all integers for either parity of k.
    """

    k: int
    m1: float
    m2: float

    def __post_init__(self):
        k = int(self.k)
        if k < 0:
            raise ValueError("k must be nonnegative")
        object.__setattr__(self, "k", k)
        t1 = _half_int(self.m1, "m1")
        t2 = _half_int(self.m2, "m2")
        for label, t in (("m1", t1), ("m2", t2)):
            if (t - k) % 2 != 0:
                raise ValueError(f"{label} must differ from k/2 by an integer")
            if abs(t) > k:
                raise ValueError(f"{label} out of range [-k/2, k/2]")
        object.__setattr__(self, "m1", t1 // 2 if t1 % 2 == 0 else t1 / 2)
        object.__setattr__(self, "m2", t2 // 2 if t2 % 2 == 0 else t2 / 2)

    @property
    def ell(self) -> int:
        return int(round(self.m1 + self.m2))

    @property
    def em(self) -> int:
        return int(round(self.m2 - self.m1))

    @property
    def degree(self) -> int:
        """Degree of the Jacobi factor, (k - |ell| - |em|) / 2."""
        return (self.k - abs(self.ell) - abs(self.em)) // 2

    @property
    def flat(self) -> int:
        """Row index in the package-wide B2 flattening."""
        a = int(round(2 * self.m1 + self.k)) // 2
        b = int(round(2 * self.m2 + self.k)) // 2
        return a * (self.k + 1) + b


@dataclass(frozen=True)
class ModeB3:
    """Null-power mode label (k; I, J) with I, J in {0, ..., k}, k even."""

    k: int
    I: int
    J: int

    def __post_init__(self):
        k = int(self.k)
        if k < 0 or k % 2 != 0:
            raise ValueError("B3 basis requires even k")
        for label in ("I", "J"):
            v = getattr(self, label)
            if int(v) != v or not 0 <= int(v) <= k:
                raise ValueError(f"{label} must be an integer in [0, k]")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "I", int(self.I))
        object.__setattr__(self, "J", int(self.J))

    @property
    def flat(self) -> int:
        return self.I * (self.k + 1) + self.J

    def null_vector(self) -> ComplexQuaternion:
        """N(I alpha, J alpha) for alpha = 2 pi / (k+1)."""
        alpha = RootsOfUnity(self.k).alpha
        return null_vector(self.I * alpha, self.J * alpha)


def modes_b2(k):
    """All (k+1)^2 toroidal modes of level k, in flat-index order."""
    half = k / 2
    return [
        ModeB2(k, a - half, b - half) for a in range(k + 1) for b in range(k + 1)
    ]


def modes_b3(k):
    """All (k+1)^2 null-power modes of level k, in flat-index order."""
    return [ModeB3(k, I, J) for I in range(k + 1) for J in range(k + 1)]


def _norm_constant(k, al, am):
    # sqrt of F(mx)/F(mn) with F(x) = (k/2+x)!(k/2-x)! at x = max, min of
    # (|m1|, |m2|); in terms of al = |ell|, am = |em| the four factorials are
    # as below.  Exact integers under the square root.
    num = math.factorial((k + al + am) // 2) * math.factorial((k - al - am) // 2)
    den = math.factorial((k + abs(al - am)) // 2) * math.factorial((k - abs(al - am)) // 2)
    return (k + 1) ** 2 * math.sqrt((k + 1) * num / den) / math.pi


def eval_b2(mode, p):
    """Evaluate a toroidal basis function at a point (or batch of points).

    Returns sigma * C * cos^|l|(chi) sin^|m|(chi) * P_d^(|m|,|l|)(cos 2 chi)
    * exp(i(l theta + m phi)) with l = mode.ell, m = mode.em; the constant C
    and the sign sigma = (-1)^min(m, 0) make the null-power expansion
    coefficients exactly ``null_power_coeff``.
    """
    k, ell, em = mode.k, mode.ell, mode.em
    al, am = abs(ell), abs(em)
    sigma = -1.0 if (em < 0 and em % 2 != 0) else 1.0
    c = sigma * _norm_constant(k, al, am)
    chi = np.asarray(p.chi, dtype=float)
    radial = (
        np.cos(chi) ** al
        * np.sin(chi) ** am
        * jacobi_poly(mode.degree, am, al, np.cos(2.0 * chi))
    )
    phase = np.exp(1j * (ell * np.asarray(p.theta) + em * np.asarray(p.phi)))
    return c * radial * phase


def eval_b3(mode, p):
    """Evaluate a null-power basis function via the R^4 dot product.

    Computes (sum_mu x^mu N^mu)^k with x the embedding of ``p`` and N the
    mode's null vector.  Defined for even k only.
    """
    n = mode.null_vector().to_array()
    x = p.embedding()
    s = np.tensordot(n, x.astype(complex), axes=(0, 0))
    return s ** mode.k


def eval_b3_via_quaternions(mode, p):
    """Same value as ``eval_b3`` through the quaternion scalar product."""
    s = scalar_product(mode.null_vector(), point_to_quaternion(p))
    return np.asarray(s, dtype=complex) ** mode.k


def eval_coherent(k, a, b, p):
    """k-th power of the pairing with the null vector N(a, b).

    Evaluated through the closed form

        (cos chi cos(theta - a) + i sin chi sin(phi + b))^k,

    which is an eigenfunction of the Laplacian for every real a, b.
    """
    chi = np.asarray(p.chi, dtype=float)
    s = np.cos(chi) * np.cos(np.asarray(p.theta) - a) + 1j * np.sin(chi) * np.sin(
        np.asarray(p.phi) + b
    )
    return s**k


def null_power_coeff(k, m1, m2):
    """Coefficient of the scaled toroidal mode in any k-th null power.

    Every (sum_mu x^mu N(a,b)^mu)^k expands over B2 with coefficients
    ``null_power_coeff(k, m1, m2) * exp(i(l a - m b))`` relative to
    ``eval_b2``; the magnitude is

        pi * k! / (2^k (k+1)^(5/2) sqrt(F(m1) F(m2))),

    with F(x) = (k/2+x)! (k/2-x)!.  Only the phase depends on the null
    vector.  Requires even k and valid integer labels.
    """
    if k < 0 or k % 2 != 0:
        raise ValueError("null power expansions need even k")
    mode = ModeB2(k, m1, m2)  # validates the labels
    half = k // 2
    f1 = math.factorial(half + int(mode.m1)) * math.factorial(half - int(mode.m1))
    f2 = math.factorial(half + int(mode.m2)) * math.factorial(half - int(mode.m2))
    return (
        math.pi
        * math.factorial(k)
        / (2**k * (k + 1) ** 2 * math.sqrt((k + 1) * f1 * f2))
    )


def null_power_coeff_vector(k):
    """All null-power coefficients of level k in B2 flat order.

    Multiplying B2-frame coordinates by this vector converts coordinates
    with respect to the scaled modes (coefficient times basis function)
    into coordinates with respect to ``eval_b2`` itself.
    """
    return np.array([null_power_coeff(k, m.m1, m.m2) for m in modes_b2(k)])


@dataclass(frozen=True, eq=False)
class CoeffMatrix:
    """Dense change-of-coefficients matrix between the two bases.

    Rows are indexed by modes of ``basis_to`` (the functions being
    expanded), columns by modes of ``basis_from`` (the basis used in the
    expansion), both in the package-wide flat order.  For ``basis_to`` B3
    the rows expand each null power over scaled toroidal modes; for
    ``basis_to`` B2 the rows recover each scaled toroidal mode from the
    null powers.
    """

    k: int
    basis_from: str
    basis_to: str
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = (self.k + 1) ** 2
        if self.entries.shape != (n, n):
            raise ValueError(f"entries must have shape {(n, n)}")
        if {self.basis_from, self.basis_to} != {"B2", "B3"}:
            raise ValueError("basis_from and basis_to must be 'B2' and 'B3'")

    @property
    def shape(self):
        return self.entries.shape

    def to_json_dict(self):
        n = self.shape[0]
        flat = self.entries.reshape(n * n)
        return {
            "schema": 1,
            "kind": "coeff_matrix",
            "k": self.k,
            "from": self.basis_from,
            "to": self.basis_to,
            "shape": [n, n],
            "entries": [[float(z.real), float(z.imag)] for z in flat],
        }

    def to_csv_text(self):
        n = self.shape[0]
        lines = []
        for r in range(n):
            for c in range(n):
                z = self.entries[r, c]
                lines.append(f"{r},{c},{float(z.real)!r},{float(z.imag)!r}")
        return "\n".join(lines) + "\n"


def _b2_frequencies(k):
    ells = np.array([m.ell for m in modes_b2(k)])
    ems = np.array([m.em for m in modes_b2(k)])
    return ells, ems


def b2_from_b3_matrix(k):
    """Matrix expressing each scaled toroidal mode over the null powers.

    Entry at row (m1, m2), column (I, J) is rho^(I l - J m) / (k+1)^2 with
    rho = exp(2 pi i/(k+1)); this is the inverse discrete Fourier transform
    of ``b3_from_b2_matrix`` and their product is the identity.  Even k only.
    """
    roots = RootsOfUnity(k)
    ells, ems = _b2_frequencies(k)
    idx = np.arange(k + 1)
    I = np.repeat(idx, k + 1)
    Jv = np.tile(idx, k + 1)
    expo = np.outer(ells, I) - np.outer(ems, Jv)
    entries = roots.unit_power(expo) / (k + 1) ** 2
    return CoeffMatrix(k, "B3", "B2", entries)


def b3_from_b2_matrix(k):
    """Matrix expressing each null power over the scaled toroidal modes.

    Entry at row (I, J), column (m1, m2) is rho^(-I l + J m); all entries
    have unit modulus.  Even k only.
    """
    roots = RootsOfUnity(k)
    ells, ems = _b2_frequencies(k)
    idx = np.arange(k + 1)
    I = np.repeat(idx, k + 1)
    Jv = np.tile(idx, k + 1)
    expo = np.outer(Jv, ems) - np.outer(I, ells)
    entries = roots.unit_power(expo)
    return CoeffMatrix(k, "B2", "B3", entries)
