"""Global solve: assembly, Newton, constraints, continuation."""

import numpy as np
import pytest

import oracles
from gelfem import (AdmissibilityError, ContinuationSchedule, ConvergenceError,
                    Model, NewtonSettings, SingularSystemError, assemble,
                    face_stretch, free_swelling_cube_model, run_continuation,
                    solve_step, uniaxial_bar_model)
from gelfem.solver import assemble_internal_force


def small_model(n_steps=10, n_cells=1):
    return free_swelling_cube_model(1e-3, 0.1, -0.05, 0.0, n_steps,
                                    n_cells=n_cells)


class TestSchedule:
    def test_linear_endpoints(self):
        s = ContinuationSchedule.linear(-0.05, 0.0, 4)
        assert s.mu_path[0] == -0.05 and s.mu_path[-1] == 0.0
        assert s.load_factor_path[0] == 0.0 and s.load_factor_path[-1] == 1.0
        assert s.n_steps == 4

    def test_single_point_is_start_state(self):
        s = ContinuationSchedule.linear(-0.02, 0.0, 1)
        assert s.mu_path == (-0.02,)
        assert s.load_factor_path == (0.0,)

    def test_validation(self):
        with pytest.raises(ValueError):
            ContinuationSchedule(mu_path=(0.0,), load_factor_path=(0.5,))
        with pytest.raises(ValueError):
            ContinuationSchedule(mu_path=(0.0, 0.0), load_factor_path=(0.0,))
        with pytest.raises(ValueError):
            ContinuationSchedule.linear(-0.05, 0.0, 0)

    def test_run_rejects_mismatched_start(self):
        model = small_model()
        model.schedule = ContinuationSchedule.linear(-0.04, 0.0, 5)
        with pytest.raises(ValueError):
            run_continuation(model)


class TestModelValidation:
    def test_duplicate_constraint_rejected(self):
        model = small_model()
        with pytest.raises(ValueError):
            Model(nodes=model.nodes, elements=model.elements,
                  dirichlet=model.dirichlet + [model.dirichlet[0]],
                  loads=[], params=model.params, schedule=model.schedule)

    def test_bad_dof_rejected(self):
        model = small_model()
        with pytest.raises(ValueError):
            Model(nodes=model.nodes, elements=model.elements,
                  dirichlet=[(0, 3, 0.0)], loads=[], params=model.params,
                  schedule=model.schedule)


class TestAssembly:
    def test_global_force_is_gradient_of_total_energy(self):
        from gelfem import strain_energy
        model = small_model(n_cells=2)
        rng = np.random.default_rng(17)
        u = 0.02 * rng.standard_normal(model.n_dofs)

        def total_energy(uflat):
            E = 0.0
            for elem in model.elements:
                ids = np.array(elem.node_ids)
                edof = (3 * ids[:, None] + np.arange(3)).ravel()
                E += strain_energy(model.nodes[ids], uflat[edof].reshape(8, 3),
                                   model.params)
            return np.array([E])

        _, f_int = assemble(model, u)
        f_fd = oracles.fd_jacobian(total_energy, u, h=1e-6).ravel()
        assert oracles.rel_err(f_int, f_fd) < 1e-5

    def test_stiffness_is_jacobian_of_force(self):
        model = small_model(n_cells=2)
        rng = np.random.default_rng(19)
        u = 0.02 * rng.standard_normal(model.n_dofs)
        K, _ = assemble(model, u)
        K_fd = oracles.fd_jacobian(
            lambda x: assemble_internal_force(model, x), u, h=1e-6)
        assert oracles.rel_err(K.toarray(), K_fd) < 1e-5

    def test_admissibility_failures_name_elements(self):
        model = small_model(n_cells=2)
        u = np.zeros(model.n_dofs)
        # crush every element far below one total swollen volume
        u[0::3] = -0.95 * model.nodes[:, 0]
        u[1::3] = -0.95 * model.nodes[:, 1]
        u[2::3] = -0.95 * model.nodes[:, 2]
        with pytest.raises(AdmissibilityError, match="element 0"):
            assemble(model, u)


class TestSolveStep:
    def test_trivial_start_converges_immediately(self):
        model = small_model()
        st = solve_step(model, np.zeros(model.n_dofs), -0.05, 0.0)
        assert len(st.residual_history) == 1
        assert np.max(np.abs(st.u)) < 1e-12

    def test_dirichlet_exactness(self):
        model = uniaxial_bar_model(1e-3, 0.1, 0.0, 1.1 * oracles.LAMBDA0_MU0,
                                   n_steps=3)
        states = run_continuation(model)
        prescribed = {(n, d): v for n, d, v in model.dirichlet}
        for st in states:
            for (n, d), v in prescribed.items():
                assert st.u[3 * n + d] == st.load_factor * v

    def test_reaction_balance_under_load(self):
        model = uniaxial_bar_model(1e-3, 0.1, 0.0, 1.2 * oracles.LAMBDA0_MU0,
                                   n_steps=4, mode="force")
        st = run_continuation(model)[-1]
        f_ext = np.zeros(model.n_dofs)
        for n, d, f in model.loads:
            f_ext[3 * n + d] += st.load_factor * f
        total = (st.reactions + f_ext).reshape(-1, 3).sum(axis=0)
        load_scale = np.linalg.norm(f_ext)
        assert np.max(np.abs(total)) < 1e-8 * max(load_scale, 1.0)

    def test_equilibrium_residual_at_convergence(self):
        model = small_model()
        st = run_continuation(model)[-1]
        free = model.free_dof_mask()
        f_int = assemble_internal_force(model, st.u, st.mu_bar)
        assert np.max(np.abs(f_int[free])) < 1e-9

    def test_superlinear_tail(self):
        model = small_model()
        st = run_continuation(model)[-1]
        res = [r for r in st.residual_history if r > 1e-14]
        assert len(res) >= 3
        r1, r2, r3 = res[-3:]
        assert r2 / r1 < 1.0 and r3 / r2 < 1.0
        assert (r3 / r2) <= 0.1 * (r2 / r1)


class TestSingularity:
    def test_missing_constraints_detected(self):
        model = small_model()
        model.dirichlet = []
        model._cache = None
        with pytest.raises(SingularSystemError, match="rigid-body"):
            solve_step(model, np.zeros(model.n_dofs), -0.05, 0.0)

    def test_partial_constraints_detected(self):
        model = small_model()
        model.dirichlet = [(n, 2, 0.0) for n in range(4)]
        with pytest.raises(SingularSystemError, match="rank 3 of 6"):
            solve_step(model, np.zeros(model.n_dofs), -0.05, 0.0)


class TestContinuation:
    def test_matches_analytic_at_every_step(self):
        model = small_model(n_steps=10)
        states = run_continuation(model)
        assert len(states) == 10
        for st in states:
            lam_fe = face_stretch(model, st, 0, 1.0)
            lam_ref = oracles.bisect_swelling(1e-3, 0.1, st.mu_bar)
            assert abs(lam_fe - lam_ref) / lam_ref < 1e-10

    def test_path_independence(self):
        u10 = run_continuation(small_model(n_steps=10))[-1].u
        u40 = run_continuation(small_model(n_steps=40))[-1].u
        assert np.max(np.abs(u10 - u40)) < 1e-8

    def test_determinism_bitwise(self):
        u1 = run_continuation(small_model())[-1].u
        u2 = run_continuation(small_model())[-1].u
        assert np.array_equal(u1, u2)

    def test_bisection_rescues_a_hard_step(self):
        # two schedule points: reference state, then the full jump to
        # saturation; a strangled iteration budget forces the step to
        # bisect, and the final state must still be the right one
        model = small_model(n_steps=2)
        model.settings = NewtonSettings(max_iterations=5)
        states = run_continuation(model)
        lam_fe = face_stretch(model, states[-1], 0, 1.0)
        assert abs(lam_fe - oracles.LAMBDA0_MU0) / oracles.LAMBDA0_MU0 < 1e-10

    def test_depth_exhaustion_names_last_good_state(self):
        model = small_model(n_steps=2)
        model.settings = NewtonSettings(max_iterations=2,
                                        max_bisection_depth=2)
        with pytest.raises(ConvergenceError, match="mu_bar=-0.05"):
            run_continuation(model)

    def test_gp_fields_shapes(self):
        model = small_model(n_cells=2)
        st = run_continuation(model)[-1]
        assert st.gp_fields.Fp.shape == (8, 8, 3, 3)
        assert st.gp_fields.S.shape == (8, 8, 6)
        assert st.gp_fields.W.shape == (8, 8)
