"""Fused-lasso signal approximator: exactness against a certified oracle."""

import numpy as np
import pytest

from smoothgl.flsa import FlsaProblem, flsa_objective, flsa_solve

from oracles import flsa_prox_descent, flsa_subgradient_violation


def _random_problem(rng, max_len=50):
    n = int(rng.integers(1, max_len + 1))
    scale = 10.0 ** rng.integers(-2, 3)
    kind = rng.integers(0, 3)
    if kind == 0:
        y = rng.normal(size=n) * scale
    elif kind == 1:
        # piecewise-constant signal plus noise: exercises long fused runs
        steps = np.repeat(rng.normal(size=-(-n // 7)) * scale, 7)[:n]
        y = steps + rng.normal(size=n) * 0.1 * scale
    else:
        y = np.round(rng.normal(size=n) * 2) * scale  # heavy ties
    lambda1 = float(rng.uniform(0, 3)) * (rng.random() > 0.15)
    lambda2 = float(rng.uniform(0, 3)) * (rng.random() > 0.15)
    return FlsaProblem(y, lambda1, lambda2)


class TestFlsaProblem:
    def test_empty_signal_rejected(self):
        with pytest.raises(ValueError, match="nonempty"):
            FlsaProblem(np.array([]), 1.0, 1.0)

    def test_negative_weight_rejected(self):
        with pytest.raises(ValueError, match="lambda1"):
            FlsaProblem(np.ones(3), -0.1, 0.0)
        with pytest.raises(ValueError, match="lambda2"):
            FlsaProblem(np.ones(3), 0.0, -1.0)

    def test_nonfinite_signal_rejected(self):
        with pytest.raises(ValueError, match="finite"):
            FlsaProblem(np.array([1.0, np.nan]), 0.0, 0.0)


class TestClosedFormCases:
    def test_no_penalty_is_identity(self):
        z = flsa_solve(FlsaProblem(np.array([1.0, 1.0, 1.0]), 0.0, 0.0))
        assert np.array_equal(z, [1.0, 1.0, 1.0])

    def test_large_sparsity_zeroes_everything(self):
        z = flsa_solve(FlsaProblem(np.array([2.0, -2.0]), 5.0, 0.0))
        assert np.array_equal(z, [0.0, 0.0])

    def test_two_point_fusion(self):
        # endpoints each move lambda2 toward the other while unfused
        z = flsa_solve(FlsaProblem(np.array([4.0, 0.0]), 0.0, 1.0))
        assert np.allclose(z, [3.0, 1.0], atol=1e-12)

    def test_full_fusion_hits_mean(self):
        z = flsa_solve(FlsaProblem(np.array([4.0, 0.0, 2.0]), 0.0, 100.0))
        assert np.allclose(z, [2.0, 2.0, 2.0], atol=1e-12)

    def test_single_point_soft_threshold(self):
        assert flsa_solve(FlsaProblem(np.array([3.0]), 1.0, 7.0))[0] == 2.0
        assert flsa_solve(FlsaProblem(np.array([-0.5]), 1.0, 7.0))[0] == 0.0

    def test_zeros_are_exact(self):
        z = flsa_solve(FlsaProblem(np.array([0.5, -0.3, 2.0]), 1.0, 0.0))
        assert z[0] == 0.0 and z[1] == 0.0
        assert z[2] == pytest.approx(1.0, abs=1e-12)


class TestAgainstOracle:
    def test_200_random_instances(self):
        rng = np.random.default_rng(2024)
        worst = 0.0
        for _ in range(200):
            prob = _random_problem(rng)
            fast = flsa_solve(prob)
            slow = flsa_prox_descent(prob.y, prob.lambda1, prob.lambda2)
            worst = max(worst, float(np.max(np.abs(fast - slow))))
        assert worst <= 1e-6, f"worst disagreement {worst:.3e}"


class TestProperties:
    def test_separation_property(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            prob = _random_problem(rng, max_len=40)
            combined = flsa_solve(prob)
            fused = flsa_solve(FlsaProblem(prob.y, 0.0, prob.lambda2))
            thresholded = np.sign(fused) * np.maximum(
                np.abs(fused) - prob.lambda1, 0.0)
            assert np.max(np.abs(combined - thresholded)) < 1e-8

    def test_objective_no_worse_than_input_or_perturbations(self):
        rng = np.random.default_rng(11)
        prob = _random_problem(rng, max_len=30)
        z = flsa_solve(prob)
        f_z = flsa_objective(z, prob.y, prob.lambda1, prob.lambda2)
        assert f_z <= flsa_objective(prob.y, prob.y, prob.lambda1,
                                     prob.lambda2) + 1e-12
        n = prob.y.shape[0]
        for _ in range(1000):
            delta = rng.normal(size=n)
            delta *= rng.uniform(0, 1e-3) / max(np.linalg.norm(delta), 1e-300)
            f_pert = flsa_objective(z + delta, prob.y, prob.lambda1,
                                    prob.lambda2)
            assert f_z <= f_pert + 1e-12

    def test_fusion_monotone_in_lambda2(self):
        rng = np.random.default_rng(13)
        for _ in range(10):
            y = rng.normal(size=25)
            counts = []
            for lam2 in (0.0, 0.01, 0.05, 0.2, 0.5, 1.0, 5.0, 50.0):
                z = flsa_solve(FlsaProblem(y, 0.0, lam2))
                counts.append(len(np.unique(np.round(z, 10))))
            assert all(a >= b for a, b in zip(counts, counts[1:]))

    def test_subgradient_optimality(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            prob = _random_problem(rng, max_len=40)
            z = flsa_solve(prob)
            v = flsa_subgradient_violation(prob.y, prob.lambda1,
                                           prob.lambda2, z)
            assert v <= 1e-8, f"subgradient violation {v:.3e}"
