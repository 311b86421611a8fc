import math

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import angles, random_unitary
from pointspec import (
    BoundaryData,
    BoundaryMatrix,
    CharacteristicParams,
    InteractionClass,
    Sector,
    Transform,
    boundary_residual,
    classify,
    coupling_strengths,
    current_mismatch,
    inversion,
    is_parity_invariant,
    params_from_u,
    s_matrix,
    torus_from_u,
    transform,
    u_from_params,
    u_from_torus,
)
from pointspec.boundary import (
    SIGMA_0,
    SIGMA_1,
    SIGMA_2,
    SIGMA_3,
    TorusPoint,
    ext_inv,
    ext_isclose,
    ext_neg_inv,
    unitarity_defect,
)
from pointspec.errors import (
    ConstraintViolated,
    NonpositiveMomentum,
    NonpositiveScale,
    NotParityInvariant,
    NotUnitary,
)

PI = math.pi
I2 = np.eye(2)


def bm(m, l0=1.0):
    return BoundaryMatrix(np.asarray(m, dtype=complex), l0)


# ---------------------------------------------------------------- construction

def test_params_identity():
    u = u_from_params(CharacteristicParams(0.0, 1.0, 0.0, 0.0, 0.0))
    assert np.array_equal(u.matrix, I2)


def test_params_off_diagonal():
    u = u_from_params(CharacteristicParams(0.0, 0.0, 0.0, 1.0, 0.0))
    assert np.array_equal(u.matrix, np.array([[0, 1], [-1, 0]]))
    assert np.linalg.det(u.matrix) == pytest.approx(1.0)


def test_params_generic_is_unitary():
    u = u_from_params(CharacteristicParams(0.0, 0.5, 0.5, 0.5, 0.5))
    assert unitarity_defect(u.matrix) <= 1e-12


def test_params_constraint_enforced():
    with pytest.raises(ConstraintViolated):
        u_from_params(CharacteristicParams(0.0, 1.0, 0.1, 0.0, 0.0))


def test_boundary_matrix_validation():
    with pytest.raises(NotUnitary):
        bm([[1, 1], [0, 1]])
    with pytest.raises(NonpositiveScale):
        bm(I2, l0=0.0)
    with pytest.raises(NonpositiveScale):
        u_from_torus(TorusPoint(0, PI), l0=-1.0)


def test_boundary_matrix_is_immutable():
    u = bm(I2)
    with pytest.raises(ValueError):
        u.matrix[0, 0] = 2.0


def test_params_round_trip(rng):
    for _ in range(200):
        u = random_unitary(rng)
        p = params_from_u(u)
        assert 0.0 <= p.xi < PI
        assert p.norm_defect() <= 1e-12
        assert u_from_params(p) == u


@pytest.mark.parametrize("t, expected", [
    ((0.0, PI), SIGMA_1),
    ((PI, PI), -I2),
    ((PI / 2, PI / 2), 1j * I2),
])
def test_u_from_torus_examples(t, expected):
    assert np.allclose(u_from_torus(TorusPoint(*t)).matrix, expected, atol=1e-15)


@pytest.mark.parametrize("m, expected", [(SIGMA_1, (0.0, PI)), (-I2, (PI, PI))])
def test_torus_from_u_examples(m, expected):
    assert torus_from_u(bm(m)) == TorusPoint(*expected)


def test_torus_round_trip_example():
    t = torus_from_u(u_from_torus(TorusPoint(0.7, 2.1)))
    assert t.theta_plus == pytest.approx(0.7, abs=1e-12)
    assert t.theta_minus == pytest.approx(2.1, abs=1e-12)


@given(angles, angles)
def test_torus_round_trip(a, b):
    t = TorusPoint(a, b)
    assert torus_from_u(u_from_torus(t)) == t


def test_torus_from_u_rejects_non_invariant():
    with pytest.raises(NotParityInvariant):
        torus_from_u(bm(SIGMA_3))


def test_torus_point_modular_equality():
    assert TorusPoint(2 * PI + 0.3, -PI) == TorusPoint(0.3, PI)
    assert TorusPoint(7.0, 1.0).theta_plus == pytest.approx(7.0 - 2 * PI)
    assert TorusPoint(0.1, 0.2).swapped() == TorusPoint(0.2, 0.1)


# ---------------------------------------------------------------- parity, transforms

@pytest.mark.parametrize("m, expected", [(SIGMA_1, True), (SIGMA_3, False), (1j * I2, True)])
def test_is_parity_invariant_examples(m, expected):
    assert is_parity_invariant(bm(m)) is expected


@given(angles, angles)
def test_torus_points_are_parity_invariant(a, b):
    u = u_from_torus(TorusPoint(a, b))
    assert is_parity_invariant(u)
    assert transform(u, Transform.PARITY) == u


def test_half_reflection_of_free_point():
    free = u_from_torus(TorusPoint(0.0, PI))
    dual = transform(free, Transform.HALF_REFLECTION)
    assert dual == u_from_torus(TorusPoint(PI, 0.0))
    assert np.allclose(dual.matrix, -SIGMA_1)


def test_q_of_sigma3():
    assert np.allclose(transform(bm(SIGMA_3), Transform.Q).matrix, -SIGMA_3)


@given(angles, angles)
def test_half_reflection_swaps_angles(a, b):
    t = TorusPoint(a, b)
    assert torus_from_u(transform(u_from_torus(t), Transform.HALF_REFLECTION)) == t.swapped()


def test_transforms_are_involutions(rng):
    for _ in range(100):
        u = random_unitary(rng)
        for w in Transform:
            assert transform(transform(u, w), w) == u


def test_pauli_algebra_is_exact():
    # the transform generators P, Q, R multiply like sigma_1, sigma_2, sigma_3
    gens = {Transform.PARITY: SIGMA_1, Transform.Q: SIGMA_2, Transform.HALF_REFLECTION: SIGMA_3}
    for w, s in gens.items():
        assert np.array_equal(transform(bm(SIGMA_0), w).matrix, SIGMA_0)
        assert np.array_equal(s @ s, SIGMA_0)
    s = [SIGMA_1, SIGMA_2, SIGMA_3]
    for a in range(3):
        for b in range(3):
            anti = s[a] @ s[b] + s[b] @ s[a]
            assert np.array_equal(anti, 2 * (a == b) * SIGMA_0)
        c = (a + 1) % 3, (a + 2) % 3
        assert np.array_equal(s[c[0]] @ s[c[1]] - s[c[1]] @ s[c[0]], 2j * s[a])


def test_transforms_use_the_right_pauli(rng):
    u = random_unitary(rng)
    for w, s in ((Transform.PARITY, SIGMA_1), (Transform.Q, SIGMA_2),
                 (Transform.HALF_REFLECTION, SIGMA_3)):
        assert np.array_equal(transform(u, w).matrix, s @ u.matrix @ s)


# ---------------------------------------------------------------- couplings

@pytest.mark.parametrize("t, expected", [
    ((0.0, PI), (0.0, 0.0)),
    ((PI / 2, PI / 2), (1.0, 1.0)),
    ((PI, 0.0), (math.inf, math.inf)),
])
def test_coupling_examples(t, expected):
    g = coupling_strengths(TorusPoint(*t))
    assert ext_isclose(g.g_plus, expected[0])
    assert ext_isclose(g.g_minus, expected[1])


def test_inversion_examples():
    t = inversion(TorusPoint(PI / 2, PI), Sector.PLUS)
    assert t == TorusPoint(3 * PI / 2, PI)
    assert coupling_strengths(t).g_plus == pytest.approx(-1.0)
    t = inversion(TorusPoint(0.0, PI), Sector.MINUS)
    assert t == TorusPoint(0.0, 0.0)
    assert math.isinf(coupling_strengths(t).g_minus)


@given(angles, angles)
def test_inversion_twice_is_identity(a, b):
    t = TorusPoint(a, b)
    for s in Sector:
        assert inversion(inversion(t, s), s) == t


def test_inversion_maps_g_to_minus_inverse(rng):
    for _ in range(1000):
        t = TorusPoint(*rng.uniform(0, 2 * PI, 2))
        g = coupling_strengths(t)
        gp = coupling_strengths(inversion(t, Sector.PLUS))
        gm = coupling_strengths(inversion(t, Sector.MINUS))
        assert ext_isclose(gp.g_plus, ext_neg_inv(g.g_plus), rtol=1e-8)
        assert ext_isclose(gp.g_minus, g.g_minus)
        assert ext_isclose(gm.g_minus, ext_neg_inv(g.g_minus), rtol=1e-8)
        assert ext_isclose(gm.g_plus, g.g_plus)


@given(angles, angles)
def test_half_reflection_is_strong_weak_duality(a, b):
    # g_+ of the image is 1/g_- of the original
    t = TorusPoint(a, b)
    g, h = coupling_strengths(t), coupling_strengths(t.swapped())
    assert ext_isclose(h.g_plus, ext_inv(g.g_minus), rtol=1e-8)
    assert ext_isclose(h.g_minus, ext_inv(g.g_plus), rtol=1e-8)


@pytest.mark.parametrize("t, expected", [
    ((0.0, PI), InteractionClass.FREE),
    ((PI, 0.0), InteractionClass.FREE_POINT_DUAL),
    ((1.3, PI), InteractionClass.DELTA_LINE),
    ((2.2, 2.2), InteractionClass.SELF_DUAL),
    ((PI, PI), InteractionClass.SELF_DUAL),
    ((0.0, 1.0), InteractionClass.EPSILON_LINE),
    ((0.4, 1.9), InteractionClass.GENERIC),
    ((2 * PI - 1e-13, PI), InteractionClass.FREE),
])
def test_classify(t, expected):
    assert classify(TorusPoint(*t)) is expected


# ---------------------------------------------------------------- boundary values

def test_residual_free_condition():
    d = BoundaryData(np.array([2.0, 2.0]), np.array([0.5, -0.5]))
    assert np.allclose(boundary_residual(bm(SIGMA_1), d), 0.0)


def test_residual_dirichlet():
    d = BoundaryData(np.zeros(2), np.array([3.0 + 1j, -7.0]))
    assert np.allclose(boundary_residual(bm(-I2), d), 0.0)


def test_residual_neumann():
    assert np.allclose(boundary_residual(bm(I2), BoundaryData(np.array([1, 0]), np.zeros(2))), 0.0)
    r = boundary_residual(bm(I2), BoundaryData(np.array([1, 0]), np.array([1, 0])))
    assert np.linalg.norm(r) > 1.0


def test_from_one_sided_sign_convention():
    d = BoundaryData.from_one_sided(1.0, 2.0, 3.0, 4.0)
    assert np.array_equal(d.phi, [1.0, 2.0])
    assert np.array_equal(d.phi_prime, [3.0, -4.0])


def test_current_mismatch_examples():
    assert current_mismatch(BoundaryData(np.array([1, 1]), np.zeros(2))) == 0.0
    assert current_mismatch(BoundaryData(np.array([1, 0]), np.array([1j, 0]))) == pytest.approx(2.0)


def test_admissible_data_conserves_current(rng):
    # admissible data: Phi = -i L0 (U + I) w, Phi' = (U - I) w spans the solution space
    for _ in range(200):
        u = random_unitary(rng, l0=rng.uniform(0.1, 5.0))
        w = rng.normal(size=2) + 1j * rng.normal(size=2)
        phi = -1j * u.l0 * (u.matrix + SIGMA_0) @ w
        dphi = (u.matrix - SIGMA_0) @ w
        d = BoundaryData(phi, dphi)
        assert np.linalg.norm(boundary_residual(u, d)) <= 1e-12
        assert current_mismatch(d) <= 1e-12 * max(1.0, np.linalg.norm(w) ** 2 * u.l0)


# ---------------------------------------------------------------- scattering

@pytest.mark.parametrize("k", [0.01, 1.0, 37.5])
def test_s_matrix_limits(k):
    free = s_matrix(bm(SIGMA_1), k)
    assert abs(free.r_left) < 1e-14 and free.t_left == pytest.approx(1.0)
    dirichlet = s_matrix(bm(-I2), k)
    assert dirichlet.r_left == pytest.approx(-1.0) and abs(dirichlet.t_left) < 1e-14
    neumann = s_matrix(bm(I2), k)
    assert neumann.r_left == pytest.approx(1.0) and abs(neumann.t_left) < 1e-14


def test_s_matrix_rejects_nonpositive_k():
    for k in (0.0, -1.0):
        with pytest.raises(NonpositiveMomentum):
            s_matrix(bm(SIGMA_1), k)


def test_s_matrix_solves_scattering_ansatz(rng):
    for _ in range(200):
        u = random_unitary(rng, l0=rng.uniform(0.2, 3.0))
        k = rng.uniform(0.05, 20.0)
        s = s_matrix(u, k)
        ik = 1j * k
        # incident from the left: e^{ikx} + r e^{-ikx} (x<0), t e^{ikx} (x>0)
        left = BoundaryData.from_one_sided(s.t_left, 1 + s.r_left, ik * s.t_left, ik * (1 - s.r_left))
        # incident from the right: e^{-ikx} + r e^{ikx} (x>0), t e^{-ikx} (x<0)
        right = BoundaryData.from_one_sided(1 + s.r_right, s.t_right, ik * (s.r_right - 1), -ik * s.t_right)
        assert np.linalg.norm(boundary_residual(u, left)) <= 1e-10
        assert np.linalg.norm(boundary_residual(u, right)) <= 1e-10


def test_s_matrix_unitarity(rng):
    worst = 0.0
    for _ in range(1000):
        u = random_unitary(rng, l0=rng.uniform(0.1, 10.0))
        k = float(np.exp(rng.uniform(np.log(1e-3), np.log(1e3))))
        worst = max(worst, s_matrix(u, k).unitarity_defect())
    assert worst <= 1e-12


@settings(max_examples=50)
@given(angles, angles)
def test_parity_invariant_scattering_is_symmetric(a, b):
    # on a parity-invariant condition the S-matrix is symmetric under left/right exchange
    s = s_matrix(u_from_torus(TorusPoint(a, b)), 1.7)
    assert s.r_left == pytest.approx(s.r_right, abs=1e-12)
    assert s.t_left == pytest.approx(s.t_right, abs=1e-12)
