"""Quaternion algebra, toroidal coordinates and scalar polynomials.

The three-sphere is identified with the unit quaternions.  A point with
toroidal coordinates (chi, theta, phi) embeds in R^4 as

    x = (cos chi cos theta, sin chi cos phi, sin chi sin phi, cos chi sin theta)

and the same four numbers are the coefficients of a unit quaternion.  An
orientation-preserving rotation of the sphere is a pair of unit quaternions
(q_left, q_right) acting by q -> q_left * q * q_right; the pair and its
negation give the same rotation.

Complexified quaternions carry a commuting imaginary unit i alongside the
quaternion units j1, j2, j3.  They have two distinct conjugations: ``bar``
flips the sign of the j-part, ``star`` conjugates the complex coefficients.
The bilinear scalar product of two (complex) quaternions is the sum of the
products of their coefficients; it is not Hermitian, and nonzero complex
quaternions can be null.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


def _mul_coeffs(a, b):
    # Hamilton product in the convention j1*j2 = j3 (cyclic), ji^2 = -1.
    return (
        a.c0 * b.c0 - a.c1 * b.c1 - a.c2 * b.c2 - a.c3 * b.c3,
        a.c0 * b.c1 + a.c1 * b.c0 + a.c2 * b.c3 - a.c3 * b.c2,
        a.c0 * b.c2 - a.c1 * b.c3 + a.c2 * b.c0 + a.c3 * b.c1,
        a.c0 * b.c3 + a.c1 * b.c2 - a.c2 * b.c1 + a.c3 * b.c0,
    )


class _QuaternionOps:
    """Arithmetic shared by the real and complexified quaternion types."""

    __slots__ = ()

    def __mul__(self, other):
        if isinstance(other, _QuaternionOps):
            cls = (
                ComplexQuaternion
                if isinstance(self, ComplexQuaternion)
                or isinstance(other, ComplexQuaternion)
                else Quaternion
            )
            return cls(*_mul_coeffs(self, other))
        return self._scale(other)

    def __rmul__(self, other):
        # scalars commute with quaternions, so left and right agree
        return self._scale(other)

    def _scale(self, s):
        cls = type(self)
        if isinstance(s, complex) and not isinstance(self, ComplexQuaternion):
            cls = ComplexQuaternion
        return cls(s * self.c0, s * self.c1, s * self.c2, s * self.c3)

    def __add__(self, other):
        cls = (
            ComplexQuaternion
            if isinstance(self, ComplexQuaternion)
            or isinstance(other, ComplexQuaternion)
            else Quaternion
        )
        return cls(
            self.c0 + other.c0,
            self.c1 + other.c1,
            self.c2 + other.c2,
            self.c3 + other.c3,
        )

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return type(self)(-self.c0, -self.c1, -self.c2, -self.c3)

    def bar(self):
        """Quaternionic conjugate: the sign of the j-part is flipped."""
        return type(self)(self.c0, -self.c1, -self.c2, -self.c3)

    def norm_sq(self):
        """Bilinear square q.q = sum of squared coefficients (no conjugation)."""
        return self.c0 * self.c0 + self.c1 * self.c1 + self.c2 * self.c2 + self.c3 * self.c3

    def coeffs(self):
        return (self.c0, self.c1, self.c2, self.c3)

    def to_array(self):
        return np.asarray(self.coeffs())

    def scalar_part(self):
        return self.c0


@dataclass(frozen=True, eq=False)
class Quaternion(_QuaternionOps):
    """Real quaternion c0 + c1*j1 + c2*j2 + c3*j3.

    Coefficients may be floats or equally shaped numpy arrays, in which case
    all operations act componentwise (a batch of quaternions).
    """

    c0: float
    c1: float
    c2: float
    c3: float

    @classmethod
    def from_array(cls, arr):
        arr = np.asarray(arr)
        if arr.shape[0] != 4:
            raise ValueError("expected 4 coefficients along the first axis")
        return cls(arr[0], arr[1], arr[2], arr[3])

    def star(self):
        """Complex conjugation of the coefficients; identity for real quaternions."""
        return self

    def as_complex(self):
        return ComplexQuaternion(
            complex(self.c0), complex(self.c1), complex(self.c2), complex(self.c3)
        )

    def inverse(self):
        n = self.norm_sq()
        return Quaternion(self.c0 / n, -self.c1 / n, -self.c2 / n, -self.c3 / n)

    def normalized(self):
        n = math.sqrt(float(self.norm_sq()))
        if n == 0.0:
            raise ValueError("cannot normalize the zero quaternion")
        return Quaternion(self.c0 / n, self.c1 / n, self.c2 / n, self.c3 / n)


@dataclass(frozen=True, eq=False)
class ComplexQuaternion(_QuaternionOps):
    """Quaternion with complex coefficients.

    The complex unit i commutes with j1, j2, j3.  ``bar`` and ``star`` are
    the two independent conjugations; the bilinear square ``norm_sq`` can
    vanish on nonzero elements (null vectors).
    """

    c0: complex
    c1: complex
    c2: complex
    c3: complex

    @classmethod
    def from_array(cls, arr):
        arr = np.asarray(arr, dtype=complex)
        if arr.shape[0] != 4:
            raise ValueError("expected 4 coefficients along the first axis")
        return cls(arr[0], arr[1], arr[2], arr[3])

    def star(self):
        return ComplexQuaternion(
            np.conjugate(self.c0),
            np.conjugate(self.c1),
            np.conjugate(self.c2),
            np.conjugate(self.c3),
        )

    def as_complex(self):
        return self


#: quaternion units; J[0] is the identity
J = (
    Quaternion(1.0, 0.0, 0.0, 0.0),
    Quaternion(0.0, 1.0, 0.0, 0.0),
    Quaternion(0.0, 0.0, 1.0, 0.0),
    Quaternion(0.0, 0.0, 0.0, 1.0),
)

#: auxiliary null combinations used to extract rotation scalars:
#: ALPHA = 1 + i j3, ALPHA_BAR = 1 - i j3, BETA = j1 - i j2, DELTA = -j1 - i j2
ALPHA = ComplexQuaternion(1.0, 0.0, 0.0, 1.0j)
ALPHA_BAR = ComplexQuaternion(1.0, 0.0, 0.0, -1.0j)
BETA = ComplexQuaternion(0.0, 1.0, -1.0j, 0.0)
DELTA = ComplexQuaternion(0.0, -1.0, -1.0j, 0.0)


def quat_mul(a, b):
    """Product a * b of two (real or complex) quaternions.

    Function form of the ``*`` operator, with the same type promotion.
    """
    return a * b


def scalar_product(a, b):
    """Bilinear scalar product <a.b> = sum_mu a_mu b_mu.

    Equals the scalar part of (a * bar(b) + b * bar(a)) / 2.  Bilinear in
    both slots; no complex conjugation is applied.
    """
    return a.c0 * b.c0 + a.c1 * b.c1 + a.c2 * b.c2 + a.c3 * b.c3


def null_vector(a, b):
    """Null quaternion N(a, b) = (cos a, i sin b, i cos b, sin a).

    Its bilinear square is zero for any real a, b, and for a unit X in R^4
    the pairing sum_mu X^mu N^mu has modulus at most 1.
    """
    return ComplexQuaternion(np.cos(a), 1j * np.sin(b), 1j * np.cos(b), np.sin(a))


@dataclass(frozen=True, eq=False)
class ToroidalPoint:
    """Point of the three-sphere in toroidal coordinates.

    chi in [0, pi/2]; theta and phi are angles stored modulo 2*pi.  Fields
    may be floats or equally shaped arrays (a batch of points).
    """

    chi: float
    theta: float
    phi: float

    def __post_init__(self):
        chi = np.asarray(self.chi)
        if np.any(chi < -1e-12) or np.any(chi > math.pi / 2 + 1e-12):
            raise ValueError("chi must lie in [0, pi/2]")
        object.__setattr__(self, "theta", np.mod(self.theta, TWO_PI) + 0.0)
        object.__setattr__(self, "phi", np.mod(self.phi, TWO_PI) + 0.0)

    def embedding(self):
        """Coordinates in R^4, shape (4,) or (4,) + batch shape."""
        return np.stack(
            [
                np.cos(self.chi) * np.cos(self.theta),
                np.sin(self.chi) * np.cos(self.phi),
                np.sin(self.chi) * np.sin(self.phi),
                np.cos(self.chi) * np.sin(self.theta),
            ]
        )

    def to_quaternion(self):
        return point_to_quaternion(self)


def point_to_quaternion(p):
    """Unit quaternion of a toroidal point.

    Writing zeta = cos(theta) + j3 sin(theta) and xi = cos(phi) + j3 sin(phi),
    the point is cos(chi) * zeta + sin(chi) * xi * j1, whose coefficients are
    exactly the R^4 embedding.
    """
    return Quaternion.from_array(p.embedding())


def quaternion_to_point(q):
    """Toroidal coordinates of a unit quaternion (inverse of the embedding)."""
    r03 = np.hypot(q.c0, q.c3)
    r12 = np.hypot(q.c1, q.c2)
    chi = np.arctan2(r12, r03)
    theta = np.arctan2(q.c3, q.c0)
    phi = np.arctan2(q.c2, q.c1)
    return ToroidalPoint(chi, theta, phi)


@dataclass(frozen=True, eq=False)
class Rotation:
    """Rotation of S^3 given by unit quaternions: q -> q_left * q * q_right.

    Both quaternions are renormalized on construction; coefficients further
    than 1e-9 from a unit quaternion are rejected.  (q_left, q_right) and
    (-q_left, -q_right) represent the same rotation.
    """

    q_left: Quaternion
    q_right: Quaternion

    def __post_init__(self):
        for name in ("q_left", "q_right"):
            q = getattr(self, name)
            n = math.sqrt(float(q.norm_sq()))
            if abs(n - 1.0) > 1e-9:
                raise ValueError(f"{name} must be a unit quaternion (|q| = {n:.6g})")
            object.__setattr__(
                self, name, Quaternion(q.c0 / n, q.c1 / n, q.c2 / n, q.c3 / n)
            )

    @classmethod
    def identity(cls):
        return cls(J[0], J[0])

    def inverse(self):
        return Rotation(self.q_left.bar(), self.q_right.bar())


def rotation_apply(g, p):
    """Image of a point under a rotation.

    Accepts a Quaternion or a ToroidalPoint and returns the image in the
    same form.
    """
    if isinstance(p, ToroidalPoint):
        return quaternion_to_point(rotation_apply(g, point_to_quaternion(p)))
    return g.q_left * p * g.q_right


def rotation_compose(g, h):
    """Rotation acting as x -> g(h(x))."""
    return Rotation(g.q_left * h.q_left, h.q_right * g.q_right)


def rotation_to_matrix(g):
    """4x4 orthogonal matrix of the rotation acting on R^4 coordinates."""
    cols = [rotation_apply(g, J[mu]).to_array() for mu in range(4)]
    return np.stack(cols, axis=1)


@dataclass(frozen=True)
class RootsOfUnity:
    """Primitive (k+1)-th root of unity rho = exp(2*pi*i/(k+1)) for even k.

    ``unit_power`` evaluates rho**n through the exact reduced angle, so large
    powers lose no accuracy.
    """

    k: int

    def __post_init__(self):
        if self.k < 0 or self.k % 2 != 0:
            raise ValueError("k must be an even nonnegative integer")

    @property
    def order(self):
        return self.k + 1

    @property
    def alpha(self):
        """Root angle 2*pi/(k+1)."""
        return TWO_PI / (self.k + 1)

    @property
    def rho(self):
        return complex(self.unit_power(1))

    def unit_power(self, n):
        """rho**n for integer n (scalar or array)."""
        n = np.mod(np.asarray(n), self.order)
        return np.exp(2j * math.pi * n / self.order)


def _falling_product(top, count):
    """top * (top-1) * ... * (top-count+1) as an exact integer."""
    out = 1
    for t in range(count):
        out *= top - t
    return out


def jacobi_poly(d, a, b, x):
    """Jacobi polynomial P_d^(a, b)(x) for integer a, b of either sign.

    Defined for negative integer parameters by polynomial continuation of
    the finite series in (x-1)/2, which is valid whenever d + a >= 0 and
    d + b >= 0.  Negative parameters are removed first with the exact
    reduction identities

        P_d^(-m, b)(x) = (d-m)!/d! * (d+b)!/(d+b-m)! * ((x-1)/2)^m * P_{d-m}^(m, b)(x)
        P_d^(a, -n)(x) = (d-n)!/d! * (d+a)!/(d+a-n)! * ((x+1)/2)^n * P_{d-n}^(a, n)(x)

    after which the standard three-term recurrence applies.  ``x`` may be a
    float or an array.

    Raises ValueError if d < 0, d + a < 0 or d + b < 0.
    """
    d, a, b = int(d), int(a), int(b)
    if d < 0:
        raise ValueError("degree d must be nonnegative")
    if d + a < 0 or d + b < 0:
        raise ValueError("need d + a >= 0 and d + b >= 0")
    x = np.asarray(x, dtype=float)
    factor = np.ones_like(x)
    if a < 0:
        m = -a
        num = _falling_product(d + b, m)  # (d+b)(d+b-1)...(d+b+1-m)
        if num == 0:
            return np.zeros_like(x) + 0.0
        coeff = num * math.factorial(d - m) / math.factorial(d)
        factor = factor * coeff * ((x - 1.0) / 2.0) ** m
        d, a = d - m, m
    if b < 0:
        n = -b
        num = _falling_product(d + a, n)
        if num == 0:
            return np.zeros_like(x) + 0.0
        coeff = num * math.factorial(d - n) / math.factorial(d)
        factor = factor * coeff * ((x + 1.0) / 2.0) ** n
        d, b = d - n, n
    return factor * _jacobi_recurrence(d, a, b, x)


def _jacobi_recurrence(d, a, b, x):
    # standard three-term recurrence, valid for a, b >= 0
    if d == 0:
        return np.ones_like(x)
    p_prev = np.ones_like(x)
    p = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0
    for n in range(2, d + 1):
        c1 = 2.0 * n * (n + a + b) * (2.0 * n + a + b - 2.0)
        c2 = (2.0 * n + a + b - 1.0) * (a * a - b * b)
        c3 = (2.0 * n + a + b - 2.0) * (2.0 * n + a + b - 1.0) * (2.0 * n + a + b)
        c4 = 2.0 * (n + a - 1.0) * (n + b - 1.0) * (2.0 * n + a + b)
        p, p_prev = ((c2 + c3 * x) * p - c4 * p_prev) / c1, p
    return p
