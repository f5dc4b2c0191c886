import numpy as np
import pytest

from gadmm.objectives import (
    LocalObjective,
    NeighborContext,
    NeighborTerm,
    SubproblemError,
    compute_reference_optimum,
    eval_grad,
    eval_hessian,
    eval_loss,
    solve_local_subproblem,
)


def quad(shift=0.0):
    """f(theta) = 1/2 (theta - shift)^2 as a single-sample linear shard."""
    return LocalObjective("linear", [[1.0]], [shift])


def fd_gradient(obj, theta, h=1e-5):
    """Central finite differences of eval_loss -- the independent oracle."""
    theta = np.asarray(theta, dtype=float)
    g = np.zeros_like(theta)
    for i in range(theta.size):
        e = np.zeros_like(theta)
        e[i] = h
        g[i] = (eval_loss(obj, theta + e) - eval_loss(obj, theta - e)) / (2 * h)
    return g


class TestEvalLoss:
    def test_linear_zero_case(self):
        assert eval_loss(quad(0.0), np.zeros(1)) == 0.0

    def test_linear_hand_value(self):
        # 1/2 (0 - 2)^2 = 2
        assert eval_loss(quad(2.0), np.zeros(1)) == pytest.approx(2.0, abs=1e-15)

    def test_logistic_at_zero_is_m_log2(self):
        rng = np.random.default_rng(3)
        obj = LocalObjective("logistic", rng.standard_normal((7, 3)), (rng.random(7) < 0.5).astype(float))
        assert eval_loss(obj, np.zeros(3)) == pytest.approx(7 * np.log(2.0), rel=1e-14)

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError):
            eval_loss(quad(), np.zeros(2))


class TestEvalGrad:
    def test_linear_hand_value(self):
        # X^T (X theta - y) = 1 * (0 - 2)
        np.testing.assert_allclose(eval_grad(quad(2.0), np.zeros(1)), [-2.0])

    def test_logistic_single_sample_at_zero(self):
        obj = LocalObjective("logistic", [[1.0]], [1.0])
        np.testing.assert_allclose(eval_grad(obj, np.zeros(1)), [-0.5], atol=1e-15)

    @pytest.mark.parametrize("kind", ["linear", "logistic"])
    def test_matches_finite_differences_at_20_random_points(self, kind):
        rng = np.random.default_rng(11)
        y = rng.standard_normal(15) if kind == "linear" else (rng.random(15) < 0.5).astype(float)
        obj = LocalObjective(kind, rng.standard_normal((15, 4)), y)
        for _ in range(20):
            theta = rng.standard_normal(4)
            exact = eval_grad(obj, theta)
            approx = fd_gradient(obj, theta)
            np.testing.assert_allclose(exact, approx, rtol=1e-5, atol=1e-7)

    def test_hessian_matches_grad_differences(self):
        rng = np.random.default_rng(5)
        obj = LocalObjective("logistic", rng.standard_normal((20, 3)), (rng.random(20) < 0.5).astype(float))
        theta = rng.standard_normal(3)
        hess = eval_hessian(obj, theta)
        h = 1e-6
        for i in range(3):
            e = np.zeros(3)
            e[i] = h
            col = (eval_grad(obj, theta + e) - eval_grad(obj, theta - e)) / (2 * h)
            np.testing.assert_allclose(hess[:, i], col, rtol=1e-4, atol=1e-6)


class TestLocalObjectiveValidation:
    def test_rejects_non_binary_logistic_targets(self):
        with pytest.raises(ValueError):
            LocalObjective("logistic", [[1.0]], [0.5])

    def test_rejects_empty_shard(self):
        with pytest.raises(ValueError):
            LocalObjective("linear", np.empty((0, 2)), [])

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            LocalObjective("linear", [[np.inf]], [0.0])


def one_neighbor(dual, theta_r, sign=+1):
    return NeighborContext([NeighborTerm(np.atleast_1d(np.asarray(dual, float)), sign, np.atleast_1d(np.asarray(theta_r, float)))])


class TestSolveLocalSubproblem:
    def test_linear_hand_solve(self):
        # (1 + 1) theta = 1 + 1*3  ->  theta = 2
        theta = solve_local_subproblem(quad(1.0), 1.0, one_neighbor(0.0, 3.0))
        np.testing.assert_allclose(theta, [2.0], atol=1e-14)

    @pytest.mark.parametrize("rho", [0.1, 1.0, 10.0])
    def test_fixed_point_at_origin(self, rho):
        theta = solve_local_subproblem(quad(0.0), rho, one_neighbor(0.0, 0.0))
        np.testing.assert_allclose(theta, [0.0], atol=1e-15)

    def test_linear_stationarity_equation(self):
        # (X^T X + rho*deg*I) theta - (X^T y + lam_l - lam_r + rho * sum nbr) = 0
        rng = np.random.default_rng(9)
        obj = LocalObjective("linear", rng.standard_normal((12, 3)), rng.standard_normal(12))
        lam_l, lam_r = rng.standard_normal(3), rng.standard_normal(3)
        nbr_l, nbr_r = rng.standard_normal(3), rng.standard_normal(3)
        rho = 2.5
        ctx = NeighborContext(
            [NeighborTerm(lam_l, -1, nbr_l), NeighborTerm(lam_r, +1, nbr_r)]
        )
        theta = solve_local_subproblem(obj, rho, ctx)
        lhs = (obj.features.T @ obj.features + rho * 2 * np.eye(3)) @ theta
        rhs = obj.features.T @ obj.targets + lam_l - lam_r + rho * (nbr_l + nbr_r)
        np.testing.assert_allclose(lhs - rhs, 0.0, atol=1e-10)

    def test_logistic_gradient_at_solution_below_tol(self):
        rng = np.random.default_rng(21)
        obj = LocalObjective("logistic", rng.standard_normal((30, 4)), (rng.random(30) < 0.5).astype(float))
        lam = rng.standard_normal(4)
        nbr = rng.standard_normal(4)
        rho, tol = 1.5, 1e-10
        ctx = one_neighbor(lam, nbr)
        theta = solve_local_subproblem(obj, rho, ctx, tol)
        # independently evaluated subproblem gradient
        g = eval_grad(obj, theta) + lam + rho * (theta - nbr)
        assert np.linalg.norm(g) <= tol

    @pytest.mark.parametrize("kind", ["linear", "logistic"])
    def test_minimizer_dominates_probe_points(self, kind):
        rng = np.random.default_rng(33)
        y = rng.standard_normal(10) if kind == "linear" else (rng.random(10) < 0.5).astype(float)
        obj = LocalObjective(kind, rng.standard_normal((10, 2)), y)
        terms = [
            NeighborTerm(rng.standard_normal(2), -1, rng.standard_normal(2)),
            NeighborTerm(rng.standard_normal(2), +1, rng.standard_normal(2)),
        ]
        ctx = NeighborContext(terms)
        rho = 3.0

        def sub_value(th):
            lin = sum(t.dual_sign * float(t.dual @ th) for t in terms)
            quad_pen = sum(np.sum((th - t.neighbor_theta) ** 2) for t in terms)
            return eval_loss(obj, th) + lin + 0.5 * rho * quad_pen

        theta = solve_local_subproblem(obj, rho, ctx, 1e-10)
        v_star = sub_value(theta)
        for probe in [terms[0].neighbor_theta, terms[1].neighbor_theta, np.zeros(2)]:
            assert v_star <= sub_value(probe) + 1e-12

    def test_iteration_cap_carries_last_iterate(self):
        rng = np.random.default_rng(4)
        obj = LocalObjective("logistic", rng.standard_normal((10, 2)), (rng.random(10) < 0.5).astype(float))
        with pytest.raises(SubproblemError) as exc:
            solve_local_subproblem(obj, 1.0, one_neighbor([0.0, 0.0], [0.0, 0.0]), tol=1e-10, max_inner=1)
        assert exc.value.last_iterate.shape == (2,)


class TestReferenceOptimum:
    def test_two_shard_hand_solve(self):
        theta, f_star = compute_reference_optimum([quad(1.0), quad(3.0)])
        np.testing.assert_allclose(theta, [2.0], atol=1e-14)
        assert f_star == pytest.approx(1.0, abs=1e-14)

    def test_trivial_zero_problem(self):
        obj = LocalObjective("linear", np.eye(3), np.zeros(3))
        theta, f_star = compute_reference_optimum([obj])
        np.testing.assert_allclose(theta, np.zeros(3), atol=1e-15)
        assert f_star == 0.0

    def test_logistic_symmetric_data_gives_zero(self):
        # every point carries both labels, so the pooled loss is symmetric
        # under theta -> -theta and the unique stationary point is 0
        x = np.array([[1.0, 2.0], [1.0, 2.0], [3.0, -1.0], [3.0, -1.0]])
        y = np.array([1.0, 0.0, 1.0, 0.0])
        obj = LocalObjective("logistic", x, y)
        theta, f_star = compute_reference_optimum([obj], tol=1e-12)
        np.testing.assert_allclose(theta, np.zeros(2), atol=1e-10)
        assert f_star == pytest.approx(4 * np.log(2.0), rel=1e-12)

    def test_rank_deficient_flags_and_returns_least_norm(self):
        obj = LocalObjective("linear", [[1.0, 1.0]], [2.0])
        with pytest.warns(RuntimeWarning):
            theta, f_star = compute_reference_optimum([obj])
        np.testing.assert_allclose(theta, [1.0, 1.0], atol=1e-12)
        assert f_star == pytest.approx(0.0, abs=1e-20)

    def test_mixed_dimensions_rejected(self):
        with pytest.raises(ValueError):
            compute_reference_optimum([quad(), LocalObjective("linear", [[1.0, 0.0]], [0.0])])
