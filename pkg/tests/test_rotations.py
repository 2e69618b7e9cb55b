"""Rotation action on the null-power basis.

The closed-form matrix built from pairing scalars is checked against two
independent oracles: the sampled least-squares fit, and the defining
relation itself, Phi_IJ(g x) = sum_ij G[IJ, ij] Phi_ij(x), evaluated at
random points.  For the prism half turn the matrix is also compared with
a literal double-sum expansion written out term by term.
"""

import math

import numpy as np
import pytest

from s3modes.algebra import (
    Quaternion,
    Rotation,
    RootsOfUnity,
    rotation_compose,
)
from s3modes.bases import eval_b2, eval_b3, modes_b2, modes_b3
from s3modes.quad import gram_matrix, rule_for_level
from s3modes.rotations import (
    act_on_coeffs,
    rotation_coeffs,
    rotation_coeffs_lstsq,
    rotation_scalars,
    to_b2_frame,
)

from util import random_points, random_rotation

IDENTITY = Rotation(Quaternion(1, 0, 0, 0), Quaternion(1, 0, 0, 0))
# half turn used by the prism group: single action by -j1
HALF_TURN = Rotation(Quaternion(0, -1, 0, 0), Quaternion(1, 0, 0, 0))


def lens_like_rotation(psi1, psi2):
    # double rotation theta -> theta + psi1, phi -> phi + psi2, assembled
    # by hand from the two j3 half-angle factors
    w1 = Quaternion(math.cos(psi1 / 2.0), 0.0, 0.0, math.sin(psi1 / 2.0))
    w2 = Quaternion(math.cos(psi2 / 2.0), 0.0, 0.0, math.sin(psi2 / 2.0))
    return Rotation(w1 * w2, w1 * w2.bar())


def basis_values(k, pts):
    return np.stack([eval_b3(m, pts) for m in modes_b3(k)], axis=0)


def test_identity_scalars_are_root_powers():
    for k in (2, 4):
        roots = RootsOfUnity(k)
        for I in range(k + 1):
            for Jv in range(k + 1):
                sc = rotation_scalars(IDENTITY, k, I, Jv)
                np.testing.assert_allclose(sc.A, roots.unit_power(I), atol=1e-12)
                np.testing.assert_allclose(sc.A_prime, roots.unit_power(-I), atol=1e-12)
                np.testing.assert_allclose(sc.B, roots.unit_power(Jv), atol=1e-12)
                np.testing.assert_allclose(sc.D, roots.unit_power(-Jv), atol=1e-12)
                assert not sc.degenerate


def test_scalar_determinant_identity():
    # A A' = B D for every rotation and every row
    rng = np.random.default_rng(404)
    k = 4
    for _ in range(50):
        g = random_rotation(rng)
        I = int(rng.integers(0, k + 1))
        Jv = int(rng.integers(0, k + 1))
        sc = rotation_scalars(g, k, I, Jv)
        assert abs(sc.A * sc.A_prime - sc.B * sc.D) < 1e-12


def test_half_turn_scalars():
    for k in (2, 4, 6):
        roots = RootsOfUnity(k)
        for I in range(k + 1):
            for Jv in range(k + 1):
                sc = rotation_scalars(HALF_TURN, k, I, Jv)
                assert abs(sc.A + roots.unit_power(Jv)) < 1e-12
                assert abs(sc.A_prime - roots.unit_power(-Jv)) < 1e-12
                assert abs(sc.B - roots.unit_power(I)) < 1e-12
                assert abs(sc.D + roots.unit_power(-I)) < 1e-12


def test_half_turn_matrix_matches_double_sum():
    # literal expansion: G[IJ, ij] = rho^((i-J)k)/(k+1)^2
    #   * sum_{A,B} rho^(A(I+J-i-j) + B(J-I-i+j)) (-1)^B
    for k in (2, 4, 6):
        roots = RootsOfUnity(k)
        n1 = k + 1
        oracle = np.zeros((n1 * n1, n1 * n1), dtype=complex)
        for I in range(n1):
            for Jv in range(n1):
                for i in range(n1):
                    for j in range(n1):
                        acc = 0.0 + 0.0j
                        for a_idx in range(n1):
                            for b_idx in range(n1):
                                acc += (
                                    roots.unit_power(
                                        a_idx * (I + Jv - i - j)
                                        + b_idx * (Jv - I - i + j)
                                    )
                                    * (-1.0) ** b_idx
                                )
                        oracle[I * n1 + Jv, i * n1 + j] = (
                            roots.unit_power((i - Jv) * k) * acc / n1**2
                        )
        gc = rotation_coeffs(HALF_TURN, k)
        assert gc.fallback_rows == ()
        np.testing.assert_allclose(gc.matrix, oracle, atol=1e-12)


def test_formula_matches_sampled_fit():
    rng = np.random.default_rng(11)
    for k in (2, 4):
        for _ in range(3):
            g = random_rotation(rng)
            gc = rotation_coeffs(g, k)
            go = rotation_coeffs_lstsq(g, k)
            np.testing.assert_allclose(gc.matrix, go.matrix, atol=1e-10)


def test_pointwise_defining_relation():
    rng = np.random.default_rng(77)
    k = 4
    g = random_rotation(rng)
    gc = rotation_coeffs(g, k)
    pts = random_points(rng, 25)
    from s3modes.algebra import quaternion_to_point, rotation_apply

    gpts = quaternion_to_point(rotation_apply(g, pts.to_quaternion()))
    vals = basis_values(k, pts)
    rvals = basis_values(k, gpts)
    np.testing.assert_allclose(rvals, gc.matrix @ vals, atol=1e-9)


def test_unit_vector_action_returns_matrix_row():
    rng = np.random.default_rng(5)
    k = 2
    gc = rotation_coeffs(random_rotation(rng), k)
    n = (k + 1) ** 2
    for r in (0, 3, n - 1):
        e = np.zeros(n)
        e[r] = 1.0
        np.testing.assert_allclose(act_on_coeffs(gc, e), gc.matrix[r], atol=0)


def test_act_on_coeffs_rejects_wrong_shape():
    gc = rotation_coeffs(IDENTITY, 2)
    with pytest.raises(ValueError):
        act_on_coeffs(gc, np.zeros(4))


def test_composition():
    rng = np.random.default_rng(23)
    k = 2
    g = random_rotation(rng)
    h = random_rotation(rng)
    cg = rotation_coeffs(g, k).matrix.T
    ch = rotation_coeffs(h, k).matrix.T
    # (R_g R_h f)(x) = f(h(g(x))), so the product acts like h-then-g
    chg = rotation_coeffs(rotation_compose(h, g), k).matrix.T
    np.testing.assert_allclose(cg @ ch, chg, atol=1e-10)


def test_inverse_rotation_inverts_matrix():
    rng = np.random.default_rng(29)
    k = 2
    g = random_rotation(rng)
    cg = rotation_coeffs(g, k).matrix.T
    cginv = rotation_coeffs(g.inverse(), k).matrix.T
    np.testing.assert_allclose(cg @ cginv, np.eye((k + 1) ** 2), atol=1e-10)
    np.testing.assert_allclose(cginv @ cg, np.eye((k + 1) ** 2), atol=1e-10)


def test_action_preserves_gram_matrix():
    rng = np.random.default_rng(31)
    k = 2
    rule = rule_for_level(k)
    gram = gram_matrix([lambda p, m=m: eval_b3(m, p) for m in modes_b3(k)], rule)
    c = rotation_coeffs(random_rotation(rng), k).matrix.T
    drift = np.max(np.abs(c.conj().T @ gram @ c - gram)) / np.max(np.abs(gram))
    assert drift < 1e-10


def test_b2_frame_identity_is_identity():
    k = 4
    frame = to_b2_frame(rotation_coeffs(IDENTITY, k))
    np.testing.assert_allclose(frame, np.eye((k + 1) ** 2), atol=1e-10)


def test_b2_frame_double_rotation_is_diagonal_phases():
    # theta/phi shifts act diagonally on the toroidal modes with phase
    # exp(i(ell psi1 + em psi2))
    psi1, psi2 = 2.0 * math.pi / 5.0, 4.0 * math.pi / 5.0
    g = lens_like_rotation(psi1, psi2)
    for k in (2, 4):
        frame = to_b2_frame(rotation_coeffs(g, k))
        expected = np.diag(
            [np.exp(1j * (m.ell * psi1 + m.em * psi2)) for m in modes_b2(k)]
        )
        np.testing.assert_allclose(frame, expected, atol=1e-10)


def test_b2_frame_half_turn_is_signed_permutation():
    # T_{m1,m2} -> (-1)^(m2 + k/2) T_{m1,-m2}
    for k in (2, 4):
        frame = to_b2_frame(rotation_coeffs(HALF_TURN, k))
        lookup = {(m.m1, m.m2): m.flat for m in modes_b2(k)}
        expected = np.zeros_like(frame)
        for m in modes_b2(k):
            sign = (-1.0) ** int(m.m2 + k / 2)
            expected[m.flat, lookup[(m.m1, -m.m2)]] = sign
        np.testing.assert_allclose(frame, expected, atol=1e-10)


def test_degenerate_rows_use_sampled_fallback():
    c = math.cos(math.pi / 4.0)
    gd = Rotation(Quaternion(c, c, 0.0, 0.0), Quaternion(c, -c, 0.0, 0.0))
    k = 2
    gc = rotation_coeffs(gd, k)
    assert len(gc.fallback_rows) > 0
    go = rotation_coeffs_lstsq(gd, k)
    np.testing.assert_allclose(gc.matrix, go.matrix, atol=1e-10)

    # the mixed formula/fallback matrix still satisfies the defining relation
    rng = np.random.default_rng(43)
    pts = random_points(rng, 20)
    from s3modes.algebra import quaternion_to_point, rotation_apply

    gpts = quaternion_to_point(rotation_apply(gd, pts.to_quaternion()))
    np.testing.assert_allclose(
        basis_values(k, gpts), gc.matrix @ basis_values(k, pts), atol=1e-9
    )


def test_sampled_fit_residual_and_determinism():
    rng = np.random.default_rng(47)
    g = random_rotation(rng)
    first = rotation_coeffs_lstsq(g, 4)
    assert first.fit_residual is not None and first.fit_residual < 1e-10
    second = rotation_coeffs_lstsq(g, 4)
    assert np.array_equal(first.matrix, second.matrix)


def test_rotation_coeffs_rejects_odd_level():
    with pytest.raises(ValueError):
        rotation_coeffs(IDENTITY, 3)


def test_serialization():
    gc = rotation_coeffs(HALF_TURN, 2)
    payload = gc.to_json_dict()
    assert payload["schema"] == 1
    assert payload["kind"] == "rotation_coeffs"
    assert payload["k"] == 2
    assert payload["q_left"] == [0.0, -1.0, 0.0, 0.0]
    assert payload["shape"] == [9, 9]
    assert payload["fallback_rows"] == []
    assert payload["fit_residual"] is None
    assert len(payload["entries"]) == 81
    csv = gc.to_csv_text()
    lines = csv.strip().split("\n")
    assert len(lines) == 81
    r, cidx, re_part, im_part = lines[0].split(",")
    assert (r, cidx) == ("0", "0")
    z = complex(float(re_part), float(im_part))
    assert abs(z - gc.matrix[0, 0]) == 0.0
