"""Hex8 element: geometry, kinematics, force/stiffness consistency."""

import numpy as np
import pytest

import oracles
from gelfem import (Hex8Element, InvertedElementError, MaterialParams,
                    b_matrix, deformation_gradient, element_gauss_data,
                    force_and_stiffness, internal_force, shape_functions,
                    shape_gradients, stiffness, strain_energy, sym_to_voigt)
from gelfem.element import HEX8_CORNERS

UNIT_CUBE = 0.5 * (np.array(HEX8_CORNERS, dtype=float) + 1.0)


def distorted_cube(rng, scale=0.1):
    return UNIT_CUBE + rng.uniform(-scale, scale, size=(8, 3))


def params_default():
    return MaterialParams.equilibrated(1e-3, 0.1, 0.0)


class TestShapeFunctions:
    def test_partition_of_unity(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            xi = rng.uniform(-1, 1, 3)
            assert shape_functions(xi).sum() == pytest.approx(1.0, abs=1e-15)

    def test_kronecker_at_corners(self):
        for a, corner in enumerate(HEX8_CORNERS):
            N = shape_functions(np.array(corner, dtype=float))
            expect = np.zeros(8)
            expect[a] = 1.0
            assert np.allclose(N, expect, atol=1e-15)

    def test_gradients_complete_linear_field(self):
        # a trilinear element reproduces any affine field exactly
        rng = np.random.default_rng(2)
        nodes = distorted_cube(rng)
        A = rng.standard_normal((3, 3))
        for _ in range(5):
            xi = rng.uniform(-1, 1, 3)
            dN_dX, _ = shape_gradients(nodes, xi)
            grad = (nodes @ A.T).T @ dN_dX
            assert np.allclose(grad, A, atol=1e-12)


class TestGaussData:
    def test_unit_cube_volume(self):
        gauss = element_gauss_data(UNIT_CUBE)
        vol = sum(gp.weight * gp.Jxi for gp in gauss)
        assert vol == pytest.approx(1.0, rel=1e-14)

    def test_parallelepiped_volume(self):
        M = np.array([[2.0, 0.3, 0.0], [0.0, 1.5, 0.2], [0.1, 0.0, 1.2]])
        nodes = UNIT_CUBE @ M.T
        vol = sum(gp.weight * gp.Jxi for gp in element_gauss_data(nodes))
        assert vol == pytest.approx(abs(np.linalg.det(M)), rel=1e-13)

    def test_inverted_element_raises(self):
        nodes = UNIT_CUBE.copy()
        nodes[:, 0] = -nodes[:, 0]     # mirrored: negative parent Jacobian
        with pytest.raises(InvertedElementError):
            element_gauss_data(nodes)

    def test_element_id_validation(self):
        with pytest.raises(ValueError):
            Hex8Element((0, 1, 2))


class TestKinematics:
    def test_affine_displacement_gives_exact_F(self):
        rng = np.random.default_rng(5)
        nodes = distorted_cube(rng)
        H = 0.1 * rng.standard_normal((3, 3))
        u = nodes @ H.T                 # u = H X, so F = I + H
        for gp in element_gauss_data(nodes):
            F = deformation_gradient(gp.dN_dX, u)
            assert np.allclose(F, np.eye(3) + H, atol=1e-13)

    def test_b_matrix_maps_du_to_voigt_strain_rate(self):
        # delta E in Voigt (engineering shear) must equal B delta u
        rng = np.random.default_rng(6)
        nodes = distorted_cube(rng)
        u = 0.05 * rng.standard_normal((8, 3))
        gp = element_gauss_data(nodes)[3]

        def E_voigt(uflat):
            F = deformation_gradient(gp.dN_dX, uflat.reshape(8, 3))
            E = 0.5 * (F.T @ F - np.eye(3))
            v = sym_to_voigt(E)
            v[3:] *= 2.0
            return v

        F = deformation_gradient(gp.dN_dX, u)
        B = b_matrix(gp.dN_dX, F)
        B_fd = oracles.fd_jacobian(E_voigt, u.reshape(24), h=1e-6)
        assert oracles.rel_err(B, B_fd) < 1e-9


class TestForceAndStiffness:
    def test_force_is_gradient_of_energy(self):
        rng = np.random.default_rng(7)
        p = params_default()
        nodes = distorted_cube(rng)
        u = 0.08 * rng.standard_normal((8, 3))

        def E_of_u(uflat):
            return np.array([strain_energy(nodes, uflat.reshape(8, 3), p)])

        f = internal_force(nodes, u, p)
        f_fd = oracles.fd_jacobian(E_of_u, u.reshape(24), h=1e-6).ravel()
        assert oracles.rel_err(f, f_fd) < 1e-6

    def test_stiffness_is_jacobian_of_force(self):
        rng = np.random.default_rng(8)
        p = params_default()
        for _ in range(5):
            nodes = distorted_cube(rng)
            u = 0.08 * rng.standard_normal((8, 3))

            def f_of_u(uflat):
                return internal_force(nodes, uflat.reshape(8, 3), p)

            K = stiffness(nodes, u, p)
            K_fd = oracles.fd_jacobian(f_of_u, u.reshape(24), h=1e-6)
            assert oracles.rel_err(K, K_fd) < 1e-5

    def test_stiffness_symmetry(self):
        rng = np.random.default_rng(9)
        p = params_default()
        nodes = distorted_cube(rng)
        u = 0.08 * rng.standard_normal((8, 3))
        f, K = force_and_stiffness(nodes, u, p)
        assert np.max(np.abs(K - K.T)) < 1e-12 * np.max(np.abs(K))

    def test_force_invariant_under_rigid_translation(self):
        rng = np.random.default_rng(10)
        p = params_default()
        nodes = distorted_cube(rng)
        u = 0.08 * rng.standard_normal((8, 3))
        f0 = internal_force(nodes, u, p)
        f1 = internal_force(nodes, u + np.array([0.3, -0.7, 1.1]), p)
        scale = max(np.max(np.abs(f0)), 1e-12)
        assert np.max(np.abs(f1 - f0)) < 1e-12 * max(1.0, scale)

    def test_zero_force_and_rigid_modes_at_equilibrium(self):
        # the free-swelling reference is stress free: no force, and the
        # stiffness has exactly the 6 rigid-body near-zero eigenvalues
        p = params_default()
        u = np.zeros((8, 3))
        f, K = force_and_stiffness(UNIT_CUBE, u, p)
        assert np.max(np.abs(f)) < 1e-15
        w = np.linalg.eigvalsh(K)
        assert np.all(np.abs(w[:6]) < 1e-12 * w[-1])
        assert np.all(w[6:] > 1e-6 * w[-1])

    def test_energy_of_homogeneous_state_is_density_times_volume(self):
        from gelfem import DeformationState, energy
        p = params_default()
        H = np.diag([0.08, -0.03, 0.05])
        u = UNIT_CUBE @ H.T
        W = energy(p, DeformationState.from_F(np.eye(3) + H))
        assert strain_energy(UNIT_CUBE, u, p) == pytest.approx(W, rel=1e-13)
