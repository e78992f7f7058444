"""Fiberwise machinery: inertia, congruence, L, square roots, openness."""
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from inertia_bundles.errors import DegenerateForm, NonPositiveSpectrum, NotDefiniteOnSummand, NotPositiveDefinite, SingularMatrix
from inertia_bundles.linalg import (
    Inertia,
    SymForm,
    congruence_diagonalize,
    eigh,
    format_real,
    gl0_congruence_witness,
    inertia,
    openness_radius,
    operator_L,
    principal_angles,
    simultaneous_diagonalize,
    spd_sqrt,
)
from inertia_bundles.random_fields import random_invertible, random_spd, random_symmetric


def numpy_inertia(a):
    # independent oracle: LAPACK eigenvalues
    w = np.linalg.eigvalsh(a)
    return int(np.sum(w > 0)), int(np.sum(w < 0))


# -- SymForm ----------------------------------------------------------------

def test_symform_is_symmetrised_and_frozen():
    f = SymForm([[1.0, 2.0], [0.0, 3.0]])
    assert np.array_equal(f.mat, [[1.0, 1.0], [1.0, 3.0]])
    assert f.dim == 2
    with pytest.raises(ValueError):
        f.mat[0, 0] = 5.0
    assert f([1.0, 1.0]) == pytest.approx(6.0)


# -- inertia ----------------------------------------------------------------

def test_inertia_diagonal():
    assert inertia(np.diag([1.0, -1.0]), 1e-10) == Inertia(1, 1)


def test_inertia_explicit_zero_is_degenerate():
    with pytest.raises(DegenerateForm):
        inertia(np.diag([3.0, 2.0, 0.0]), 1e-10)


def test_inertia_near_zero_relative_to_norm():
    with pytest.raises(DegenerateForm):
        inertia(np.diag([1e6, 1e-5]), 1e-10)
    assert inertia(np.diag([1e6, 1e-3]), 1e-10) == (2, 0)


def test_inertia_seed_42_congruent_to_signature():
    rng = np.random.default_rng(42)
    g = rng.standard_normal((3, 3))
    a = g.T @ np.diag([1.0, 1.0, -1.0]) @ g
    assert numpy_inertia(a) == (2, 1)
    assert inertia(SymForm(a)) == (2, 1)


def test_inertia_rejects_nonpositive_tol():
    with pytest.raises(ValueError):
        inertia(np.eye(2), 0.0)


@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_congruence_invariance(n, seed):
    rng = np.random.default_rng(seed)
    a = random_symmetric(rng, n)
    base = inertia(a)
    assert base == numpy_inertia(a)
    for _ in range(5):
        g = random_invertible(rng, n)
        assert inertia(g.T @ a @ g) == base


def test_eigh_descending_and_sign_normalised(rng):
    a = random_symmetric(rng, 5)
    w, v = eigh(a)
    assert np.all(np.diff(w) <= 0)
    np.testing.assert_allclose(w, np.linalg.eigvalsh(a)[::-1], atol=1e-12 * np.abs(w).max())
    idx = np.argmax(np.abs(v), axis=0)
    assert np.all(v[idx, np.arange(5)] > 0)


# -- congruence_diagonalize -------------------------------------------------

def test_congruence_identity():
    g, d = congruence_diagonalize(np.eye(2))
    assert np.array_equal(g, np.eye(2))
    assert np.array_equal(d, np.eye(2))


def test_congruence_diag_4_minus_9():
    g, d = congruence_diagonalize(np.diag([4.0, -9.0]))
    np.testing.assert_allclose(g, np.diag([0.5, 1.0 / 3.0]), rtol=1e-15)
    assert np.array_equal(d, np.diag([1.0, -1.0]))


def test_congruence_seed_7_residual():
    rng = np.random.default_rng(7)
    a = random_symmetric(rng, 5)
    g, d = congruence_diagonalize(a)
    assert np.linalg.norm(g.T @ a @ g - d) < 1e-9 * np.linalg.norm(a)
    assert int(np.sum(np.diag(d) > 0)) == numpy_inertia(a)[0]


@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_congruence_normal_form_property(n, seed):
    a = random_symmetric(np.random.default_rng(seed), n)
    g, d = congruence_diagonalize(a)
    diag = np.diag(d)
    assert np.all(np.abs(diag) == 1.0)
    # +1 block first
    assert np.all(np.diff(diag) <= 0)
    assert np.linalg.norm(g.T @ a @ g - d) < 1e-9 * np.linalg.norm(a)


# -- GL0 witness ------------------------------------------------------------

def test_gl0_identity_and_reflection():
    assert np.array_equal(gl0_congruence_witness(np.eye(3)), np.eye(3))
    assert np.array_equal(gl0_congruence_witness(np.diag([-1.0, 1.0])), np.eye(2))


def test_gl0_seed_3():
    rng = np.random.default_rng(3)
    g = random_invertible(rng, 3, det_sign=-1.0)
    assert np.linalg.det(g) < 0
    g2 = gl0_congruence_witness(g)
    delta = np.diag([1.0, -1.0, 1.0])
    assert np.linalg.det(g2) > 0
    assert np.max(np.abs(g2.T @ delta @ g2 - g.T @ delta @ g)) < 1e-12


def test_gl0_singular():
    with pytest.raises(SingularMatrix):
        gl0_congruence_witness(np.array([[1.0, 2.0], [2.0, 4.0]]))


@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_gl0_property(n, seed):
    rng = np.random.default_rng(seed)
    g = random_invertible(rng, n)
    g2 = gl0_congruence_witness(g)
    assert np.linalg.det(g2) > 0
    for signs in rng.choice([-1.0, 1.0], size=(4, n)):
        delta = np.diag(signs)
        assert np.max(np.abs(g2.T @ delta @ g2 - g.T @ delta @ g)) < 1e-12 * max(1.0, np.abs(g).max() ** 2)


# -- operator L -------------------------------------------------------------

def test_L_identity_reference(rng):
    a = random_symmetric(rng, 3)
    np.testing.assert_allclose(operator_L(np.eye(3), a), a, atol=1e-15)


def test_L_diagonal():
    np.testing.assert_allclose(operator_L(np.diag([2.0, 2.0]), np.diag([2.0, -4.0])), np.diag([1.0, -2.0]))


def test_L_seed_11_bilinear_identity():
    rng = np.random.default_rng(11)
    r = random_spd(rng, 4)
    q = random_symmetric(rng, 4)
    lop = operator_L(r, q)
    rl = r @ lop
    assert np.linalg.norm(rl - rl.T) < 1e-10 * np.linalg.norm(rl)
    for _ in range(20):
        u, v = rng.standard_normal((2, 4))
        bq = u @ q @ v
        br = (lop @ u) @ r @ v
        assert abs(bq - br) < 1e-10 * max(1.0, abs(bq))


def test_L_rejects_indefinite_reference():
    with pytest.raises(NotPositiveDefinite):
        operator_L(np.diag([1.0, -1.0]), np.eye(2))


@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_L_symmetry_property(n, seed):
    rng = np.random.default_rng(seed)
    r, q = random_spd(rng, n), random_symmetric(rng, n)
    rl = r @ operator_L(r, q)
    assert np.linalg.norm(rl - rl.T) < 1e-10 * np.linalg.norm(rl)


# -- square root ------------------------------------------------------------

def test_sqrt_identity_and_diagonal():
    np.testing.assert_allclose(spd_sqrt(np.eye(3)), np.eye(3), atol=1e-15)
    np.testing.assert_allclose(spd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), rtol=1e-15)


def test_sqrt_seed_13():
    rng = np.random.default_rng(13)
    r, q = random_spd(rng, 4), random_spd(rng, 4)
    lop = operator_L(r, q)
    s = spd_sqrt(lop, metric=r)
    assert np.linalg.norm(s @ s - lop) < 1e-9 * np.linalg.norm(lop)
    rs = r @ s
    assert np.linalg.norm(rs - rs.T) < 1e-10 * np.linalg.norm(rs)
    for v in rng.standard_normal((20, 4)):
        qv = v @ q @ v
        assert abs(qv - (s @ v) @ r @ (s @ v)) < 1e-9 * abs(qv)


def test_sqrt_rejects_nonpositive_spectrum():
    with pytest.raises(NonPositiveSpectrum):
        spd_sqrt(np.diag([1.0, -1.0]))


def test_sqrt_rejects_non_selfadjoint():
    with pytest.raises(ValueError):
        spd_sqrt(np.array([[1.0, 1.0], [0.0, 1.0]]))


@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_sqrt_identity_property(n, seed):
    rng = np.random.default_rng(seed)
    r, q = random_spd(rng, n), random_spd(rng, n)
    s = spd_sqrt(operator_L(r, q), metric=r)
    for v in rng.standard_normal((5, n)):
        qv = v @ q @ v
        assert abs(qv - (s @ v) @ r @ (s @ v)) < 1e-9 * qv
    # the positive root is unique: compare with the principal root of the symmetric conjugate
    c = np.linalg.cholesky(r)
    m = np.linalg.solve(c, np.linalg.solve(c, q).T)
    w, u = np.linalg.eigh(0.5 * (m + m.T))
    root = np.linalg.solve(c.T, (u * np.sqrt(w)) @ u.T @ c.T)
    np.testing.assert_allclose(s, root, atol=1e-8 * np.abs(root).max())


# -- simultaneous diagonalisation --------------------------------------------

def test_simdiag_identity():
    b, d = simultaneous_diagonalize(np.eye(3), np.eye(3))
    np.testing.assert_allclose(b.T @ b, np.eye(3), atol=1e-15)
    np.testing.assert_allclose(d, np.ones(3))


def test_simdiag_diagonal():
    b, d = simultaneous_diagonalize(np.diag([5.0, -2.0]), np.eye(2))
    np.testing.assert_allclose(d, [5.0, -2.0])
    np.testing.assert_allclose(np.abs(b), np.eye(2))


def test_simdiag_seed_17():
    rng = np.random.default_rng(17)
    r, q = random_spd(rng, 6), random_symmetric(rng, 6)
    b, d = simultaneous_diagonalize(q, r)
    assert np.linalg.norm(b.T @ r @ b - np.eye(6)) < 1e-9
    assert np.linalg.norm(b.T @ q @ b - np.diag(d)) < 1e-9 * np.linalg.norm(q)
    assert np.all(np.diff(d) <= 0)
    # oracle: generalised eigenvalues are those of R^-1 Q
    np.testing.assert_allclose(d, np.sort(np.linalg.eigvals(np.linalg.solve(r, q)).real)[::-1], rtol=1e-9)


def test_simdiag_allows_degenerate_q():
    b, d = simultaneous_diagonalize(np.diag([1.0, 0.0]), np.eye(2))
    np.testing.assert_allclose(d, [1.0, 0.0], atol=1e-15)


# -- openness radius --------------------------------------------------------

def test_openness_standard():
    e = np.eye(2)
    assert openness_radius(np.diag([1.0, -1.0]), e[:, :1], e[:, 1:]) == pytest.approx(0.5)
    assert openness_radius(np.diag([4.0, -1.0]), e[:, :1], e[:, 1:]) == pytest.approx(0.5)


def test_openness_not_definite():
    e = np.eye(2)
    with pytest.raises(NotDefiniteOnSummand):
        openness_radius(np.diag([1.0, -1.0]), e[:, 1:], e[:, :1])


def test_openness_seed_19_perturbations():
    rng = np.random.default_rng(19)
    q = random_symmetric(rng, 4, (2, 2))
    w, v = np.linalg.eigh(q)
    rad = openness_radius(q, v[:, 2:], v[:, :2])
    for _ in range(50):
        d = rng.standard_normal((4, 4))
        d = d + d.T
        d *= 0.9 * rad / np.linalg.norm(d, 2)
        assert inertia(q + d) == (2, 2)


def test_openness_non_orthogonal_splitting():
    # a valid but skewed splitting gives a smaller, still valid radius
    q = np.diag([2.0, -1.0])
    rad = openness_radius(q, np.array([[1.0], [0.5]]), np.array([[0.0], [1.0]]))
    # q on the unit vector (1, 0.5)/|.| is (2 - 0.25)/1.25 = 1.4; -q on e2 is 1
    assert rad == pytest.approx(0.5)
    rad = openness_radius(q, np.array([[1.0], [0.9]]), np.array([[0.0], [1.0]]))
    assert rad == pytest.approx(0.5 * (2.0 - 0.81) / 1.81)


# -- subspaces and formatting -----------------------------------------------

def test_principal_angles():
    a = np.array([[1.0], [0.0], [0.0]])
    b = np.array([[1.0], [1.0], [0.0]])
    np.testing.assert_allclose(principal_angles(a, b), [np.pi / 4])
    np.testing.assert_allclose(principal_angles(np.eye(3)[:, :2], np.eye(3)[:, 1:]), [0.0, np.pi / 2], atol=1e-15)


def test_format_real_round_trips():
    for x in [0.1, 1.0 / 3.0, -2.5e-300, 1e300, 123456789.0]:
        assert float(format_real(x)) == x
    assert format_real(-0.0) == "0"
    assert format_real(1.0) == "1"
    with pytest.raises(ValueError):
        format_real(float("nan"))
