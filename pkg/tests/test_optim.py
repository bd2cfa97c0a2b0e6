import numpy as np
import pytest

from soaaa.errors import NonFiniteResidual
from soaaa.optim import (
    LineSearchFailure,
    NlsqOptions,
    NlsqProblem,
    VarProProblem,
    check_jacobian,
    minimize_nlsq,
    varpro_minimize,
)

from conftest import crandn, exp_problem, grid_min


class TestMinimizeNlsq:
    def test_real_linear(self):
        res = minimize_nlsq(NlsqProblem(lambda x: x - 1.0, lambda x: np.eye(1)), np.array([5.0]))
        np.testing.assert_allclose(res.params, [1.0], atol=1e-12)
        assert res.objective < 1e-24

    def test_complex_linear(self):
        prob = NlsqProblem(lambda z: z - (1 + 1j), lambda z: np.eye(1, dtype=complex),
                           complex_params=True)
        res = minimize_nlsq(prob, np.array([0j]))
        np.testing.assert_allclose(res.params, [1 + 1j], atol=1e-12)

    def test_square_root(self):
        prob = NlsqProblem(lambda b: b ** 2 - 2.0, lambda b: np.diag(2 * b))
        res = minimize_nlsq(prob, np.array([1.0]))
        np.testing.assert_allclose(res.params, [np.sqrt(2)], rtol=1e-8)

    def test_finite_difference_fallback(self):
        res = minimize_nlsq(NlsqProblem(lambda b: b ** 2 - 2.0), np.array([1.0]))
        np.testing.assert_allclose(res.params, [np.sqrt(2)], rtol=1e-6)

    def test_monotone_history(self, rng):
        t = np.linspace(0, 3, 30)
        y = 2 * np.exp(-1.3 * t) + 0.5 * np.exp(-0.2 * t) + 0.01 * rng.standard_normal(30)

        def r(p):
            return p[0] * np.exp(-p[1] * t) + p[2] * np.exp(-p[3] * t) - y

        res = minimize_nlsq(NlsqProblem(r), np.array([1.0, 2.0, 1.0, 0.1]))
        assert np.all(np.diff(res.history) <= 0)
        assert res.objective <= res.initial_objective

    def test_complex_matches_stacked_real(self, rng):
        for _ in range(5):
            A, b = crandn(rng, 8, 3), crandn(rng, 8)
            pc = NlsqProblem(lambda z: A @ z - b, lambda z: A, complex_params=True)
            Ar = np.block([[A.real, -A.imag], [A.imag, A.real]])
            br = np.concatenate([b.real, b.imag])
            pr = NlsqProblem(lambda x: Ar @ x - br, lambda x: Ar)
            rc = minimize_nlsq(pc, np.zeros(3, complex))
            rr = minimize_nlsq(pr, np.zeros(6))
            assert rc.objective == pytest.approx(rr.objective, rel=1e-10)
            np.testing.assert_allclose(np.concatenate([rc.params.real, rc.params.imag]),
                                       rr.params, rtol=1e-8)

    def test_wirtinger_jacobian(self):
        # r(z) = |z|^2 - 1 written as z conj(z) - 1
        prob = NlsqProblem(lambda z: z * z.conj() - 1, lambda z: (np.diag(z.conj()), np.diag(z)),
                           complex_params=True, jac_kind="wirtinger")
        assert check_jacobian(prob, np.array([0.3 + 0.4j])) < 1e-8
        res = minimize_nlsq(prob, np.array([2 + 1j]))
        assert abs(abs(res.params[0]) - 1) < 1e-8

    def test_nonfinite_start(self):
        with pytest.raises(NonFiniteResidual):
            minimize_nlsq(NlsqProblem(lambda x: x * np.nan), np.array([1.0]))

    def test_zero_iterations(self):
        res = minimize_nlsq(NlsqProblem(lambda x: x - 1.0), np.array([3.0]),
                            NlsqOptions(max_iters=0))
        np.testing.assert_array_equal(res.params, [3.0])
        assert res.iterations == 0

    def test_line_search_failure_on_request(self):
        # Jacobian with the wrong sign never produces a descent step
        prob = NlsqProblem(lambda x: x - 1.0, lambda x: -np.eye(1))
        res = minimize_nlsq(prob, np.array([3.0]))
        assert res.status == "no_decrease"
        np.testing.assert_array_equal(res.params, [3.0])
        with pytest.raises(LineSearchFailure):
            minimize_nlsq(prob, np.array([3.0]), raise_on_failure=True)


class TestCheckJacobian:
    def test_linear_exact(self, rng):
        A = rng.standard_normal((5, 3))
        prob = NlsqProblem(lambda x: A @ x, lambda x: A)
        for h in (1e-7, 1e-5, 1e-4):
            assert check_jacobian(prob, rng.standard_normal(3), h) <= 1e-8

    def test_sign_flip_detected(self, rng):
        A = rng.standard_normal((5, 3))
        prob = NlsqProblem(lambda x: A @ x, lambda x: -A)
        assert check_jacobian(prob, rng.standard_normal(3)) == pytest.approx(2.0, rel=1e-6)


class TestVarPro:
    def test_constant_psi(self):
        vp = VarProProblem(psi=lambda b: np.array([[1.0], [1.0]]),
                           dpsi=lambda b: [(np.array([0]), np.zeros((2, 1)))],
                           f=np.array([1.0, 3.0]), beta0=np.array([0.7]))
        res = varpro_minimize(vp)
        np.testing.assert_allclose(res.alpha, [2.0])
        assert res.objective == pytest.approx(2.0)
        np.testing.assert_array_equal(res.beta, [0.7])

    def test_exact_fit(self):
        vp = VarProProblem(psi=lambda b: np.array([[1.0], [b[0]]]),
                           dpsi=lambda b: [(np.array([0]), np.array([[0.0], [1.0]]))],
                           f=np.array([1.0, 2.0]), beta0=np.array([0.5]))
        res = varpro_minimize(vp)
        grid = np.linspace(-5, 5, 10001)
        scan = [np.sum((np.array([[1.0], [b]]) @ np.linalg.lstsq(
            np.array([[1.0], [b]]), [1.0, 2.0], rcond=None)[0] - [1.0, 2.0]) ** 2) for b in grid]
        assert abs(grid[np.argmin(scan)] - 2.0) < 1e-3
        np.testing.assert_allclose(res.beta, [2.0], rtol=1e-8)
        np.testing.assert_allclose(res.alpha, [1.0], rtol=1e-8)
        assert res.objective < 1e-20

    @pytest.mark.parametrize("kaufman", [False, True])
    def test_grid_equivalence(self, kaufman):
        rng = np.random.default_rng(11)
        t = np.linspace(0, 2, 15)
        for _ in range(4):
            a_true, b_true = rng.uniform(0.5, 2), rng.uniform(0.3, 2)
            f = a_true * np.exp(-b_true * t) + 0.05 * rng.standard_normal(t.size)
            res = varpro_minimize(exp_problem(t, f, 1.0), kaufman=kaufman)

            def joint(A, B):
                return np.sum((A[..., None] * np.exp(-B[..., None] * t) - f) ** 2, axis=-1)

            best, _, _ = grid_min(joint, (0, 4), (0, 4))
            assert res.objective == pytest.approx(best, rel=1e-6, abs=1e-12)

    def test_alpha_is_pseudoinverse_solution(self):
        t = np.linspace(0, 2, 12)
        f = 1.5 * np.exp(-0.8 * t) + 0.1 * np.sin(5 * t)
        vp = exp_problem(t, f, 2.0)
        res = varpro_minimize(vp)
        np.testing.assert_allclose(res.alpha, np.linalg.pinv(vp.psi(res.beta)) @ f, rtol=1e-12)

    def test_projected_jacobian_against_fd(self):
        from soaaa.optim import varpro_problem_as_nlsq

        t = np.linspace(0, 2, 12)
        f = np.cos(t)

        def psi(b):
            return np.column_stack([np.exp(-b[0] * t), np.exp(-b[1] * t)])

        def dpsi(b):
            return [(np.array([0]), (-t * np.exp(-b[0] * t))[:, None]),
                    (np.array([1]), (-t * np.exp(-b[1] * t))[:, None])]

        vp = VarProProblem(psi, dpsi, f, np.array([0.3, 1.7]))
        assert check_jacobian(varpro_problem_as_nlsq(vp), vp.beta0) < 1e-6
        assert check_jacobian(varpro_problem_as_nlsq(vp, kaufman=True), vp.beta0) > 1e-6
