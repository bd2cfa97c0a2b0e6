import numpy as np
import pytest

from soaaa.core import SecondOrderBarycentric, UnstructuredBarycentric
from soaaa.errors import DomainError, SingularShift
from soaaa.statespace import (
    FirstOrderRealization,
    SecondOrderRealization,
    eval_realization,
    to_first_order,
    to_first_order_real,
    to_realization,
    to_second_order,
    to_second_order_real,
)

from conftest import crandn, random_second_order, random_unstructured


class TestFirstOrder:
    def test_scalar_example(self):
        r = to_first_order(UnstructuredBarycentric([2.0], [4.0], [3.0]))
        np.testing.assert_array_equal(r.E, [[1]])
        np.testing.assert_array_equal(r.A, [[-1]])
        np.testing.assert_array_equal(r.b, [3])
        np.testing.assert_array_equal(r.c, [4])
        s = np.array([0.5j, 2.0])
        np.testing.assert_allclose(eval_realization(r, s), 12 / (s + 1), rtol=1e-15)

    def test_zero_weight(self):
        r = to_first_order(UnstructuredBarycentric([2.0], [4.0], [0.0]))
        np.testing.assert_array_equal(r.A, [[2]])
        assert eval_realization(r, 1j) == 0

    def test_random_grid(self, rng):
        m = random_unstructured(rng, 3)
        s = 1j * np.linspace(-5, 5, 30) + 0.1
        np.testing.assert_allclose(eval_realization(to_first_order(m), s), m(s), rtol=1e-10)


class TestSecondOrder:
    def test_scalar_example(self):
        r = to_second_order(SecondOrderBarycentric([-1.0], [4.0], [3.0], [-2.0]))
        for name, val in (("M", 1), ("D", 3), ("K", 5), ("b", 3), ("c", 4)):
            np.testing.assert_array_equal(getattr(r, name), np.atleast_1d(val).reshape(
                getattr(r, name).shape))
        s = np.array([1j, 3.0])
        np.testing.assert_allclose(eval_realization(r, s), 12 / (s ** 2 + 3 * s + 5), rtol=1e-15)

    def test_S1(self, S1):
        r = to_second_order(S1)
        np.testing.assert_array_equal(r.D, [[2]])
        np.testing.assert_array_equal(r.K, [[1]])
        assert eval_realization(r, 1.0) == pytest.approx(0.25)

    def test_random_grid(self, rng):
        m = random_second_order(rng, 3)
        s = 1j * np.linspace(-5, 5, 30) + 0.1
        np.testing.assert_allclose(eval_realization(to_second_order(m), s), m(s), rtol=1e-10)


class TestRealRealizations:
    def test_rotation_block_and_z(self):
        r = to_first_order_real(UnstructuredBarycentric([1 + 2j], [1.0], [0.0], real=True))
        np.testing.assert_array_equal(r.A, [[1, 2], [-2, 1]])
        m = UnstructuredBarycentric([1 + 2j, 3j], [1.0, 2.0], [1.0, 1j], real=True)
        r = to_first_order_real(m)
        b_t = r.b / np.sqrt(2)
        z = np.array([2, 0, 2, 0])
        A_t = r.A + np.outer(b_t, z)
        np.testing.assert_allclose(A_t[:2, :2], [[1, 2], [-2, 1]])
        np.testing.assert_allclose(A_t[:2, 2:], 0)

    def test_second_order_blocks(self):
        m = SecondOrderBarycentric([1j], [1.0 + 1j], [0.5 - 0.2j], [-1 + 1j], real=True)
        r = to_second_order_real(m)
        np.testing.assert_allclose(r.D, [[1, -2], [2, 1]])
        b_t = r.b / np.sqrt(2)
        np.testing.assert_allclose(r.K - np.outer(b_t, [2, 0]), [[-1, -1], [1, -1]])

    @pytest.mark.parametrize("second", [False, True])
    def test_matches_complex_augmented(self, rng, second):
        for _ in range(10):
            m = random_second_order(rng, 3, real=True) if second else \
                random_unstructured(rng, 3, real=True)
            r = to_realization(m)
            assert r.is_real and r.order == 6
            rc = to_realization(m.augmented())
            s = 1j * np.linspace(0.1, 10, 25)
            np.testing.assert_allclose(eval_realization(r, s), eval_realization(rc, s),
                                       rtol=1e-8)
            np.testing.assert_allclose(eval_realization(r, s.conj()),
                                       eval_realization(r, s).conj(), rtol=1e-12)

    def test_lower_half_rejected(self):
        with pytest.raises(DomainError):
            to_first_order_real(UnstructuredBarycentric([-1j], [1.0], [1.0]))


class TestEvalRealization:
    def test_first_order_value(self):
        r = FirstOrderRealization(np.eye(1), -np.eye(1), np.array([3.0]), np.array([4.0]))
        assert eval_realization(r, 1.0) == pytest.approx(6.0)

    def test_second_order_value(self):
        r = SecondOrderRealization(np.eye(1), 3 * np.eye(1), 5 * np.eye(1), np.array([3.0]),
                                   np.array([4.0]))
        assert eval_realization(r, 1.0) == pytest.approx(12 / 9)

    def test_second_order_at_zero(self, rng):
        K = rng.standard_normal((3, 3)) + 3 * np.eye(3)
        b, c = rng.standard_normal(3), rng.standard_normal(3)
        r = SecondOrderRealization(np.eye(3), np.eye(3), K, b, c)
        assert eval_realization(r, 0.0) == pytest.approx(c @ np.linalg.solve(K, b))

    def test_singular_shift(self):
        r = FirstOrderRealization(np.eye(1), -np.eye(1), np.array([3.0]), np.array([4.0]))
        with pytest.raises(SingularShift):
            eval_realization(r, -1.0)


def test_barycentric_realization_equivalence():
    rng = np.random.default_rng(5)
    for i in range(50):
        k = 1 + i % 5
        real = i % 2 == 1
        m = (random_second_order if i % 4 < 2 else random_unstructured)(rng, k, real=real)
        s = 4 * crandn(rng, 20)
        val = m(s)
        assert np.all(np.abs(eval_realization(to_realization(m), s) - val)
                      < 1e-9 * (1 + np.abs(val)))
