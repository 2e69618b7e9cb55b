"""Invariant eigenmodes of spherical quotients S^3 / Gamma.

A finite group Gamma of rotations acts on each eigenspace; the eigenmodes
of the quotient are the fixed vectors of that action.  The projector onto
the fixed space is the average of the coefficient-action matrices over the
group, and its rank is the multiplicity of the eigenvalue downstairs.

Two families are built in:

* lens spaces L(p, q): cyclic, generated by the simultaneous shift
  theta -> theta + 2 pi/p, phi -> phi + 2 pi q/p.  The toroidal modes
  diagonalize the generator, so the invariant modes are exactly those with
  (m1 + m2) + q (m2 - m1) = 0 modulo p, at every level k.

* prism spaces S^3 / D*_P: the binary dihedral group of order 4P,
  generated by a lens-like shift with both angles pi/P and by left
  multiplication with -j1.  The second generator sends the scaled toroidal
  mode (m1, m2) to (-1)^(m2 + k/2) times the mode (m1, -m2), so invariant
  combinations pair +-m2 with m2 = 0 modulo P; the resulting count is

      (k+1) * (floor(k/(2P)) + [k/2 even])     (k even; zero for k odd)

  which the projector rank confirms.  The simple closed form
  (k+1) * (1 + floor(k/(2P))) circulating for these spaces agrees only
  when k/2 is even; ``prism_reference_count`` reports it for comparison.

Custom groups are specified by explicit generator pairs and handled
through closure plus projection (even k).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import J, Quaternion, Rotation, rotation_compose
from .bases import ModeB2, modes_b2
from .rotations import rotation_coeffs


@dataclass(frozen=True)
class GroupSpec:
    """Parsed description of a holonomy group.

    ``kind`` is 'lens', 'prism' or 'custom'.  Lens uses (p, q), prism uses
    p as the dihedral index P, custom carries explicit generators.
    """

    kind: str
    p: int = 0
    q: int = 0
    custom_generators: tuple = ()

    @classmethod
    def lens(cls, p, q):
        p, q = int(p), int(q)
        if p < 1:
            raise ValueError("lens order p must be >= 1")
        if math.gcd(p, q % p if p > 1 else 1) != 1:
            raise ValueError("lens parameters must be coprime")
        return cls("lens", p, q % p if p > 1 else 0)

    @classmethod
    def prism(cls, P):
        P = int(P)
        if P < 2:
            raise ValueError("prism index P must be >= 2")
        return cls("prism", P)

    @classmethod
    def custom(cls, generators):
        gens = tuple(generators)
        if not gens:
            raise ValueError("custom group needs at least one generator")
        return cls("custom", custom_generators=gens)

    @classmethod
    def parse(cls, text):
        """Parse 'lens:p,q', 'prism:P' or a JSON generator list."""
        text = text.strip()
        if text.startswith("lens:"):
            parts = text[5:].split(",")
            if len(parts) != 2:
                raise ValueError("expected lens:p,q")
            return cls.lens(int(parts[0]), int(parts[1]))
        if text.startswith("prism:"):
            return cls.prism(int(text[6:]))
        if text.startswith("{"):
            try:
                payload = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ValueError(f"invalid group JSON: {exc}") from exc
            gens = []
            for item in payload.get("generators", []):
                ql = Quaternion(*[float(c) for c in item["q_left"]])
                qr = Quaternion(*[float(c) for c in item["q_right"]])
                gens.append(Rotation(ql, qr))
            return cls.custom(gens)
        raise ValueError(f"unrecognized group spec: {text!r}")

    def label(self):
        if self.kind == "lens":
            return f"lens:{self.p},{self.q}"
        if self.kind == "prism":
            return f"prism:{self.p}"
        return f"custom:{len(self.custom_generators)} generators"

    def generators(self):
        if self.kind == "lens":
            return (lens_rotation(self.p, self.q),)
        if self.kind == "prism":
            return prism_generators(self.p)
        return self.custom_generators

    def group(self, max_order=1000):
        return close_group(self.generators(), max_order=max_order)


def lens_rotation(p, q):
    """Generator of the lens holonomy: theta and phi shift by psi1, psi2.

    With w_i = cos(psi_i / 2) + j3 sin(psi_i / 2) for psi1 = 2 pi/p and
    psi2 = 2 pi q/p, the pair is (w1 w2, w1 / w2); it is a Clifford
    translation composition acting diagonally on the toroidal angles.
    """
    psi1 = 2.0 * math.pi / p
    psi2 = 2.0 * math.pi * q / p
    w1 = Quaternion(math.cos(psi1 / 2), 0.0, 0.0, math.sin(psi1 / 2))
    w2 = Quaternion(math.cos(psi2 / 2), 0.0, 0.0, math.sin(psi2 / 2))
    return Rotation(w1 * w2, w1 * w2.bar())


def prism_generators(P):
    """The two generators of the binary dihedral action of order 4P.

    Both are single sided (right quaternion 1): a j3 rotation by pi/P and
    left multiplication by -j1.
    """
    if P < 2:
        raise ValueError("prism index P must be >= 2")
    half_angle = math.pi / P
    g1 = Rotation(
        Quaternion(math.cos(half_angle), 0.0, 0.0, math.sin(half_angle)), J[0]
    )
    g2 = Rotation(Quaternion(0.0, -1.0, 0.0, 0.0), J[0])
    return (g1, g2)


@dataclass(frozen=True)
class FiniteGroup:
    """Closed set of rotations; element order follows the closure search."""

    elements: tuple

    @property
    def order(self):
        return len(self.elements)


def _canonical_key(g):
    coeffs = list(g.q_left.coeffs()) + list(g.q_right.coeffs())
    sign = 1.0
    for c in coeffs[:4]:
        if abs(c) > 1e-9:
            sign = 1.0 if c > 0 else -1.0
            break
    return tuple(round(sign * float(c), 9) + 0.0 for c in coeffs)


def close_group(generators, max_order=1000):
    """All distinct rotations generated by the given ones.

    Breadth-first closure; (q_left, q_right) and its negation are the same
    rotation and are deduplicated by a canonical sign choice.  Raises if
    more than ``max_order`` elements appear (the set must be finite).
    """
    identity = Rotation.identity()
    seen = {_canonical_key(identity): identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for e in frontier:
            for g in generators:
                f = rotation_compose(e, g)
                key = _canonical_key(f)
                if key not in seen:
                    if len(seen) >= max_order:
                        raise ValueError(
                            f"group closure exceeded max_order = {max_order}"
                        )
                    seen[key] = f
                    nxt.append(f)
        frontier = nxt
    return FiniteGroup(tuple(seen.values()))


def invariant_projector(group, k):
    """Average of the coefficient actions over the group, in the B3 frame.

    Idempotent; its column space is the fixed subspace of the group action
    on level-k coefficient vectors.  Even k only.
    """
    n = (k + 1) ** 2
    total = np.zeros((n, n), dtype=complex)
    for e in group.elements:
        total += rotation_coeffs(e, k).matrix.T
    return total / group.order


RANK_RTOL = 1e-6


@dataclass(frozen=True, eq=False)
class InvariantSubspace:
    """Basis of the fixed subspace of a holonomy group at one level.

    ``basis`` has one column per invariant vector, expressed in the frame
    named by ``frame`` ('B3' coefficients, or 'B2' scaled-toroidal
    coordinates for the odd-k lens route).
    """

    space: str
    k: int
    frame: str
    dimension: int
    basis: np.ndarray = field(repr=False)

    def coords(self, frame):
        """Basis columns converted to 'B3' or 'B2' coordinates.

        Returns None when the conversion does not exist (there are no null
        null-vector coefficients at odd k).
        """
        if frame == self.frame:
            return self.basis
        from .bases import b2_from_b3_matrix, b3_from_b2_matrix

        if frame == "B2" and self.frame == "B3":
            return b3_from_b2_matrix(self.k).entries.T @ self.basis
        if frame == "B3" and self.frame == "B2" and self.k % 2 == 0:
            return b2_from_b3_matrix(self.k).entries.T @ self.basis
        return None

    def to_json_dict(self):
        n, d = self.basis.shape

        def flat(arr):
            if arr is None:
                return None
            return [[float(z.real), float(z.imag)] for z in arr.reshape(arr.size)]

        return {
            "schema": 1,
            "kind": "invariant_subspace",
            "space": self.space,
            "k": self.k,
            "frame": self.frame,
            "dimension": self.dimension,
            "shape": [n, d],
            "basis_b3": flat(self.coords("B3")),
            "basis_b2": flat(self.coords("B2")),
        }


def invariant_basis(spec, k, max_order=1000):
    """Fixed-subspace basis for a group spec at level k.

    Lens groups at odd k are handled in the B2 frame, where the generator
    acts by diagonal phases; everything else goes through group closure
    and the projector in the B3 frame (which requires even k).
    """
    if spec.kind == "lens" and k % 2 == 1:
        diag = _lens_phase_average(spec.p, spec.q, k)
        cols = [r for r in range(diag.size) if abs(diag[r]) > 0.5]
        basis = np.zeros(((k + 1) ** 2, len(cols)), dtype=complex)
        for c, r in enumerate(cols):
            basis[r, c] = 1.0
        return InvariantSubspace(spec.label(), k, "B2", len(cols), basis)
    if k % 2 == 1:
        raise ValueError("only lens groups support odd k (diagonal B2 route)")
    group = spec.group(max_order=max_order) if isinstance(spec, GroupSpec) else spec
    proj = invariant_projector(group, k)
    u, s, _ = np.linalg.svd(proj)
    # an averaged projector is idempotent, so its top singular value is >= 1
    # unless it vanishes; flooring the reference at 1 keeps the rank of the
    # zero projector at 0 instead of counting rounding noise
    cutoff = RANK_RTOL * max(float(s[0]) if s.size else 0.0, 1.0)
    rank = int(np.sum(s > cutoff))
    return InvariantSubspace(
        spec.label() if isinstance(spec, GroupSpec) else "custom",
        k,
        "B3",
        rank,
        u[:, :rank].copy(),
    )


def _lens_phase_average(p, q, k):
    # average of the diagonal generator phases over the cyclic group; the
    # entries are 1 on invariant modes and 0 elsewhere up to rounding
    psi1 = 2.0 * math.pi / p
    psi2 = 2.0 * math.pi * q / p
    angles = np.array([m.ell * psi1 + m.em * psi2 for m in modes_b2(k)])
    t = np.arange(p)
    return np.mean(np.exp(1j * np.outer(t, angles)), axis=0)


def lens_modes(p, q, k):
    """Toroidal modes invariant under the lens group, any k.

    These are the modes with ell + q * em = 0 modulo p, in flat order.
    """
    GroupSpec.lens(p, q)  # validate
    return [m for m in modes_b2(k) if (m.ell + q * m.em) % p == 0]


def prism_modes(P, k):
    """Invariant combinations for the prism group, as scaled-B2 vectors.

    For even k, one vector per pair (m1, m2) with m2 a positive multiple
    of P (the combination of (m1, +-m2) with relative sign (-1)^(m2+k/2)),
    plus the single mode (m1, 0) when k/2 is even.  Odd k admits none.
    """
    GroupSpec.prism(P)
    if k % 2 == 1:
        return []
    n = (k + 1) ** 2
    out = []
    half = k // 2
    for a in range(k + 1):
        m1 = a - half
        if half % 2 == 0:
            v = np.zeros(n, dtype=complex)
            v[ModeB2(k, m1, 0).flat] = 1.0
            out.append(v)
        for m2 in range(P, half + 1, P):
            v = np.zeros(n, dtype=complex)
            v[ModeB2(k, m1, m2).flat] = 1.0
            v[ModeB2(k, m1, -m2).flat] = (-1.0) ** (m2 + half)
            out.append(v)
    return out


def prism_reference_count(P, k):
    """Closed-form count (k+1)(1 + floor(k/2P)) (even k) or (k+1) floor(k/2P).

    Quoted for comparison: it matches the projector rank exactly when k/2
    is even, and overcounts otherwise (the m2 = 0 modes drop out when k/2
    is odd, and odd levels support no invariants at all).
    """
    if k % 2 == 0:
        return (k + 1) * (1 + k // (2 * P))
    return (k + 1) * (k // (2 * P))


def multiplicity(spec, k):
    """Eigenvalue multiplicity of level k on the quotient.

    Lens: enumeration of diagonal-invariant modes (any k).  Prism: the
    pairing count (zero at odd k).  Custom: rank of the group-average
    projector (even k only).
    """
    if spec.kind == "lens":
        return len(lens_modes(spec.p, spec.q, k))
    if spec.kind == "prism":
        if k % 2 == 1:
            return 0
        half = k // 2
        return (k + 1) * (half // spec.p + (1 if half % 2 == 0 else 0))
    return invariant_basis(spec, k).dimension
