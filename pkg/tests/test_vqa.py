"""Variational loop: cost, gradients, optimizer steps, metric, fit driver."""

import numpy as np
import pytest

from dickesim import (
    AdamState,
    Ansatz,
    DomainError,
    OptimizerConfig,
    UnsupportedConfigError,
    adam_step,
    cost,
    fit,
    fubini_study_metric,
    gd_step,
    grad_findiff,
    qng_step,
    tnt_coupling_value,
)


class TestTntCouplingValue:
    def test_table1_passthrough(self):
        assert tnt_coupling_value(50, 0.3, 2.5, "table1") == 2.5

    def test_accumulated_coefficient(self):
        # exponent -i (theta Jz^2 - omega Jx) means Lambda = N theta / omega
        assert tnt_coupling_value(100, 0.2, 0.1, "appendix-omega") == pytest.approx(200.0)

    def test_equal_angle_gives_n(self):
        assert tnt_coupling_value(64, 0.37, 0.37, "appendix-omega") == pytest.approx(64.0)

    def test_zero_theta_degenerates_to_identity_gate(self):
        assert tnt_coupling_value(10, 0.0, 0.5, "appendix-omega") == 1.0

    def test_zero_omega_is_pure_twisting(self):
        assert tnt_coupling_value(10, 0.4, 0.0, "appendix-omega") == np.inf

    def test_unknown_reading(self):
        with pytest.raises(DomainError):
            tnt_coupling_value(10, 0.1, 0.1, "figure")


class TestCost:
    def test_zero_angles_cost_one(self):
        # no twisting: the prepared coherent state has xi^2_S = 1
        for n in (4, 25, 100):
            assert cost([0.0, 0.0, 0.0], Ansatz(n)) == pytest.approx(1.0, abs=1e-10)

    def test_oat_only_squeezes(self):
        a = Ansatz(30)
        assert cost([0.05, 0.0, 0.0], a) < 1.0

    def test_reading_changes_cost(self):
        theta = [0.01, 0.1, 0.02]
        assert cost(theta, Ansatz(20, "table1")) != pytest.approx(
            cost(theta, Ansatz(20, "appendix-omega")), abs=1e-6
        )


class TestGradient:
    def test_quadratic_exact(self):
        fn = lambda t: float(3.0 * t[0] ** 2 - 2.0 * t[1] + t[0] * t[1])
        grad = grad_findiff(fn, np.array([1.0, 2.0]), 1e-4)
        # central differences are exact on quadratics up to roundoff
        np.testing.assert_allclose(grad, [8.0, -1.0], atol=1e-8)

    def test_step_domain(self):
        with pytest.raises(DomainError):
            grad_findiff(lambda t: 0.0, np.zeros(2), 0.0)

    def test_workers_agree(self):
        a = Ansatz(16)
        fn = lambda t: cost(t, a)
        theta = np.array([0.02, 0.05, 0.01])
        np.testing.assert_allclose(
            grad_findiff(fn, theta, 1e-3, workers=1),
            grad_findiff(fn, theta, 1e-3, workers=3),
            atol=1e-12,
        )

    def test_quadratic_convergence_order(self):
        # central differences: halving eps shrinks the truncation error 4x;
        # the reference is Richardson extrapolation of the two finest steps.
        a = Ansatz(12)
        fn = lambda t: cost(t, a)
        theta = np.array([0.03, 0.04, 0.02])
        eps = 1e-2
        g1 = grad_findiff(fn, theta, eps)
        g2 = grad_findiff(fn, theta, eps / 2)
        g4 = grad_findiff(fn, theta, eps / 4)
        reference = (4.0 * g4 - g2) / 3.0
        e1 = np.linalg.norm(g1 - reference)
        e2 = np.linalg.norm(g2 - reference)
        assert e2 < e1 / 3.0  # ~1/4 up to higher-order terms

    def test_matches_fine_step_reference(self):
        rng = np.random.default_rng(7)
        a = Ansatz(20)
        fn = lambda t: cost(t, a)
        for _ in range(3):
            theta = rng.uniform(-0.02, 0.02, 3)
            coarse = grad_findiff(fn, theta, 1e-4)
            fine = grad_findiff(fn, theta, 1e-6)
            assert np.linalg.norm(coarse - fine) <= 1e-3 * np.linalg.norm(fine)


class TestSteps:
    def test_gd(self):
        np.testing.assert_allclose(
            gd_step(np.array([1.0, -1.0]), np.array([2.0, 4.0]), 0.1),
            [0.8, -1.4],
        )

    def test_adam_first_step_is_signed_lr(self):
        # with bias correction the first update is -eta * sign(grad) up to eps
        theta, state = adam_step(
            AdamState.zeros(2), np.zeros(2), np.array([0.3, -40.0]), eta=0.01
        )
        np.testing.assert_allclose(theta, [-0.01, 0.01], atol=1e-8)
        assert state.t == 1

    def test_adam_moments_accumulate(self):
        state = AdamState.zeros(1)
        theta = np.zeros(1)
        grad = np.array([2.0])
        theta, state = adam_step(state, theta, grad, eta=0.5, beta1=0.8, beta2=0.999)
        assert state.m[0] == pytest.approx(0.4)       # (1-beta1)*g
        assert state.v[0] == pytest.approx(0.004)     # (1-beta2)*g^2
        theta, state = adam_step(state, theta, grad, eta=0.5, beta1=0.8, beta2=0.999)
        assert state.t == 2
        assert state.m[0] == pytest.approx(0.8 * 0.4 + 0.2 * 2.0)

    def test_qng_reduces_to_gd_on_identity_metric(self):
        theta = np.array([0.5, -0.2, 0.1])
        grad = np.array([1.0, 2.0, -3.0])
        np.testing.assert_allclose(
            qng_step(theta, grad, np.eye(3), 0.05),
            gd_step(theta, grad, 0.05),
        )

    def test_qng_confines_step_to_nonsingular_subspace(self):
        g = np.diag([4.0, 0.0])
        stepped = qng_step(np.zeros(2), np.array([8.0, 8.0]), g, 1.0)
        np.testing.assert_allclose(stepped, [-2.0, 0.0], atol=1e-12)


class TestMetric:
    def test_single_rotation_variance(self):
        # one RZ layer on an equatorial coherent state: g = Var(Jz) = N/4
        n = 4

        class RzAnsatz(Ansatz):
            def build(self, theta):
                from dickesim.gates import Circuit, GateSpec

                return Circuit(n, (
                    GateSpec("RN", (np.pi / 2, 0.0)),
                    GateSpec("RZ", (float(theta[0]),)),
                ))

        g = fubini_study_metric(np.array([0.3]), RzAnsatz(n), 1e-4)
        assert g.shape == (1, 1)
        assert g[0, 0] == pytest.approx(n / 4, abs=1e-4)

    def test_symmetric_and_psd(self):
        a = Ansatz(12)
        g = fubini_study_metric(np.array([0.02, 0.08, 0.03]), a, 1e-4)
        np.testing.assert_allclose(g, g.T, atol=1e-8)
        assert np.linalg.eigvalsh(g).min() > -1e-8

    def test_noisy_ansatz_rejected(self):
        class NoisyAnsatz(Ansatz):
            def build(self, theta):
                circuit = super().build(theta)
                from dataclasses import replace
                from dickesim.gates import Circuit

                noisy = tuple(
                    replace(spec, noise=0.1) for spec in circuit.instructions
                )
                return Circuit(circuit.n_particles, noisy)

        with pytest.raises(UnsupportedConfigError):
            fubini_study_metric(np.zeros(3), NoisyAnsatz(4), 1e-4)


class TestFit:
    def test_deterministic_random_init(self):
        cfg = OptimizerConfig(kind="gd", learning_rate=1e-3, max_iter=3, eps_fd=1e-3)
        a = Ansatz(10)
        r1 = fit(a, cfg, seed=11)
        r2 = fit(a, cfg, seed=11)
        np.testing.assert_array_equal(r1.theta_star, r2.theta_star)
        assert r1.cost_history == r2.cost_history
        r3 = fit(a, cfg, seed=12)
        assert not np.array_equal(r1.theta_history[0], r3.theta_history[0])

    def test_history_lengths(self):
        cfg = OptimizerConfig(kind="adam", learning_rate=0.01, max_iter=5, eps_fd=1e-3)
        res = fit(Ansatz(8), cfg, [0.01, 0.02, 0.03])
        assert len(res.cost_history) == 6  # initial cost + one per iteration
        assert len(res.theta_history) == 6
        assert len(res.iteration_times) == 5

    def test_gd_descends_small_n(self):
        cfg = OptimizerConfig(kind="gd", learning_rate=1e-3, max_iter=30, eps_fd=1e-3)
        res = fit(Ansatz(20), cfg, [0.01, 0.01, 0.01])
        assert res.cost_history[-1] < res.cost_history[0]

    def test_qng_descends_small_n(self):
        # the default spectrum-scaled pinv cutoff must not zero out steps on
        # small problems where the metric itself is O(1)
        cfg = OptimizerConfig(kind="qng", learning_rate=0.03, max_iter=25)
        res = fit(Ansatz(10), cfg, [0.01, 0.01, 0.01])
        assert res.cost_history[-1] < res.cost_history[0]

    def test_qng_explicit_threshold_is_absolute(self):
        # a cutoff above every eigenvalue freezes theta entirely
        cfg = OptimizerConfig(
            kind="qng", learning_rate=0.03, max_iter=2, pinv_threshold=1e9
        )
        res = fit(Ansatz(8), cfg, [0.01, 0.01, 0.01])
        np.testing.assert_array_equal(res.theta_star, [0.01, 0.01, 0.01])

    def test_tolerance_stops_early(self):
        cfg = OptimizerConfig(
            kind="gd", learning_rate=1e-12, max_iter=50, eps_fd=1e-3, tolerance=1e-6
        )
        res = fit(Ansatz(6), cfg, [0.01, 0.01, 0.01])
        assert res.converged
        assert len(res.cost_history) < 51

    def test_wrong_parameter_count(self):
        cfg = OptimizerConfig(kind="gd", learning_rate=1e-3, max_iter=1)
        with pytest.raises(DomainError):
            fit(Ansatz(6), cfg, [0.1, 0.2])

    def test_config_validation(self):
        with pytest.raises(DomainError):
            OptimizerConfig(kind="sgd", learning_rate=0.1)
        with pytest.raises(DomainError):
            OptimizerConfig(kind="gd", learning_rate=0.0)
        with pytest.raises(DomainError):
            OptimizerConfig(kind="gd", learning_rate=0.1, max_iter=0)
        with pytest.raises(DomainError):
            OptimizerConfig(kind="gd", learning_rate=0.1, eps_fd=-1.0)
